//! Python bindings: unitriangular matrices, finite groups, conjugacy classes and the
//! Massey, embedding, Bogomolov and Brauer computations.
//!
//! Structured results come back as plain dicts built from the serialized Rust reports.

use std::sync::Arc;

use massey_core::brauer::{self, BrauerError, EvalOptions, ScanPolicy};
use massey_core::cohom::{self, CohomError, EmbeddingOutcome, FiniteGroup, KernelSpec, Level, SolverOptions};
use massey_core::conjact::{self, ConjError};
use massey_core::massey::{self as mp, MasseyError, MasseyOptions, MasseyProblem};
use massey_core::unigroup::{self, AVec, UniError};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

create_exception!(massey_py, BudgetExceeded, PyRuntimeError, "An explicit size budget was exceeded.");

fn budget(e: impl ToString) -> PyErr {
    BudgetExceeded::new_err(e.to_string())
}

fn invalid(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

trait ToPyErr {
    fn py_err(self) -> PyErr;
}

impl ToPyErr for UniError {
    fn py_err(self) -> PyErr {
        match self {
            UniError::TooLarge(_) => budget(self),
            _ => invalid(self),
        }
    }
}

impl ToPyErr for ConjError {
    fn py_err(self) -> PyErr {
        match self {
            ConjError::Budget { .. } => budget(self),
            ConjError::Inconsistent(_) => PyRuntimeError::new_err(self.to_string()),
            _ => invalid(self),
        }
    }
}

impl ToPyErr for CohomError {
    fn py_err(self) -> PyErr {
        match self {
            CohomError::Budget(_) => budget(self),
            CohomError::Uni(u) => u.py_err(),
            _ => invalid(self),
        }
    }
}

impl ToPyErr for MasseyError {
    fn py_err(self) -> PyErr {
        if self.is_budget() {
            budget(self)
        } else {
            invalid(self)
        }
    }
}

impl ToPyErr for BrauerError {
    fn py_err(self) -> PyErr {
        if self.is_budget() {
            budget(self)
        } else {
            invalid(self)
        }
    }
}

fn ok<T, E: ToPyErr>(r: Result<T, E>) -> PyResult<T> {
    r.map_err(ToPyErr::py_err)
}

/// Serialize through JSON into Python objects.
fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn require_prime(p: u32) -> PyResult<()> {
    if massey_core::modarith::is_prime(p as u64) {
        Ok(())
    } else {
        Err(invalid(format!("{p} is not prime")))
    }
}

/// Upper unitriangular (n+1)×(n+1) matrix over Z/m.
#[pyclass(name = "UniTri", module = "massey_py", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyUniTri {
    inner: unigroup::UniTri,
}

fn wrap(x: unigroup::UniTri) -> PyUniTri {
    PyUniTri { inner: x }
}

#[pymethods]
impl PyUniTri {
    /// Build from a full matrix; the diagonal must be 1 and the lower part 0.
    #[new]
    fn new(m: u32, rows: Vec<Vec<i64>>) -> PyResult<Self> {
        let size = rows.len();
        if size < 2 || m < 2 {
            return Err(invalid("need at least a 2×2 matrix and modulus ≥ 2"));
        }
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(invalid(format!("row {i} has {} entries, expected {size}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                let v_mod = v.rem_euclid(m as i64);
                match i.cmp(&j) {
                    std::cmp::Ordering::Less => entries.push((i, j, v)),
                    std::cmp::Ordering::Equal if v_mod != 1 => {
                        return Err(invalid(format!("diagonal entry ({i}, {i}) is not 1")))
                    }
                    std::cmp::Ordering::Greater if v_mod != 0 => {
                        return Err(invalid(format!("entry ({i}, {j}) below the diagonal is not 0")))
                    }
                    _ => {}
                }
            }
        }
        ok(unigroup::UniTri::from_entries(size - 1, m, &entries)).map(wrap)
    }

    #[staticmethod]
    fn identity(n: usize, m: u32) -> Self {
        wrap(unigroup::UniTri::identity(n, m))
    }

    /// I + c·e_{ij}.
    #[staticmethod]
    #[pyo3(signature = (n, m, i, j, c = 1))]
    fn elementary(n: usize, m: u32, i: usize, j: usize, c: i64) -> PyResult<Self> {
        ok(unigroup::elem_gen(n, m, i, j, c)).map(wrap)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn modulus(&self) -> u32 {
        self.inner.modulus()
    }

    fn matrix(&self) -> Vec<Vec<u32>> {
        self.inner.to_matrix()
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<u32> {
        if i >= j || j > self.inner.n() {
            return Err(invalid(format!("({i}, {j}) is not above the diagonal")));
        }
        Ok(self.inner.get(i, j))
    }

    fn __mul__(&self, o: &PyUniTri) -> PyResult<Self> {
        ok(self.inner.try_mul(&o.inner)).map(wrap)
    }

    fn inverse(&self) -> Self {
        wrap(self.inner.inv())
    }

    fn __pow__(&self, e: i64, _m: Option<Py<PyAny>>) -> Self {
        wrap(self.inner.pow_i(e))
    }

    fn commutator(&self, o: &PyUniTri) -> PyResult<Self> {
        if (self.inner.n(), self.inner.modulus()) != (o.inner.n(), o.inner.modulus()) {
            return Err(invalid("shape or modulus mismatch"));
        }
        Ok(wrap(self.inner.commutator(&o.inner)))
    }

    /// Largest l with the matrix in the l-th lower central series term.
    fn lcs_level(&self) -> usize {
        self.inner.lcs_level()
    }

    fn is_identity(&self) -> bool {
        self.inner.is_identity()
    }

    /// Reflection in the antidiagonal.
    fn tau(&self) -> Self {
        wrap(self.inner.tau())
    }

    fn __repr__(&self) -> String {
        format!("UniTri(m={}, {:?})", self.inner.modulus(), self.inner.to_matrix())
    }
}

/// Finite group given by a multiplication table on 0..order with 0 the identity.
#[pyclass(name = "Group", module = "massey_py", frozen)]
pub struct PyGroup {
    inner: FiniteGroup,
}

#[pymethods]
impl PyGroup {
    #[staticmethod]
    fn cyclic(m: usize) -> PyResult<Self> {
        if m == 0 {
            return Err(invalid("order must be positive"));
        }
        Ok(PyGroup { inner: FiniteGroup::cyclic(m) })
    }

    #[staticmethod]
    fn dihedral(m: usize) -> PyResult<Self> {
        if m < 2 {
            return Err(invalid("dihedral groups need m ≥ 2"));
        }
        Ok(PyGroup { inner: FiniteGroup::dihedral(m) })
    }

    #[staticmethod]
    fn quaternion() -> Self {
        PyGroup { inner: FiniteGroup::quaternion() }
    }

    #[staticmethod]
    fn elementary_abelian(p: usize, r: usize) -> PyResult<Self> {
        require_prime(p as u32)?;
        Ok(PyGroup { inner: FiniteGroup::elementary_abelian(p, r) })
    }

    #[staticmethod]
    fn product(a: &PyGroup, b: &PyGroup) -> Self {
        PyGroup { inner: FiniteGroup::product(&a.inner, &b.inner) }
    }

    #[staticmethod]
    #[pyo3(signature = (rows, generators = None))]
    fn from_table(rows: Vec<Vec<u32>>, generators: Option<Vec<u32>>) -> PyResult<Self> {
        Ok(PyGroup { inner: ok(FiniteGroup::from_table(&rows, generators))? })
    }

    /// The subgroup of U(n, p) generated by the given matrices.
    #[staticmethod]
    fn generated_by(gens: Vec<PyUniTri>) -> PyResult<Self> {
        let first = gens.first().ok_or_else(|| invalid("need at least one generator"))?;
        let (n, m) = (first.inner.n(), first.inner.modulus());
        if gens.iter().any(|g| (g.inner.n(), g.inner.modulus()) != (n, m)) {
            return Err(invalid("generators differ in shape or modulus"));
        }
        let gens: Vec<unigroup::UniTri> = gens.into_iter().map(|g| g.inner).collect();
        let (g, _) = ok(FiniteGroup::from_closure(&gens, unigroup::UniTri::identity(n, m), |a, b| a.mul(b)))?;
        Ok(PyGroup { inner: g })
    }

    fn order(&self) -> usize {
        self.inner.order()
    }

    fn generators(&self) -> Vec<u32> {
        self.inner.generators().to_vec()
    }

    fn mul(&self, a: u32, b: u32) -> PyResult<u32> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.inner.mul(a, b))
    }

    fn inverse(&self, a: u32) -> PyResult<u32> {
        self.check(a)?;
        Ok(self.inner.inv(a))
    }

    fn element_order(&self, a: u32) -> PyResult<usize> {
        self.check(a)?;
        Ok(self.inner.elem_order(a))
    }

    fn is_abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    fn table(&self) -> Vec<Vec<u32>> {
        self.inner.table_rows()
    }

    /// Bogomolov multiplier B₀ via the commuting-pair route.
    fn bogomolov<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = ok(cohom::bogomolov(&self.inner))?;
        to_py(py, &r)
    }

    /// B₀ via restriction to bicyclic subgroups, for cross-checking.
    fn bogomolov_via_restriction<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = ok(cohom::bogomolov_via_restriction(&self.inner))?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("Group(order={}, generators={:?})", self.inner.order(), self.inner.generators())
    }
}

impl PyGroup {
    fn check(&self, a: u32) -> PyResult<()> {
        if (a as usize) < self.inner.order() {
            Ok(())
        } else {
            Err(invalid(format!("{a} is not an element of a group of order {}", self.inner.order())))
        }
    }
}

/// Conjugacy classes of U¹(n, p) under conjugation by U(n, p).
#[pyclass(name = "ConjClasses", module = "massey_py", frozen)]
pub struct PyConjClasses {
    inner: Arc<conjact::ConjClasses>,
}

fn avec(n: usize, p: u32, a: Vec<u32>) -> PyResult<AVec> {
    ok(AVec::new(n, p, a))
}

#[pymethods]
impl PyConjClasses {
    #[new]
    #[pyo3(signature = (n, p, max_elems = 1 << 25))]
    fn new(py: Python<'_>, n: usize, p: u32, max_elems: u64) -> PyResult<Self> {
        require_prime(p)?;
        let cc = py.detach(|| conjact::conj_classes_with_budget(n, p, max_elems));
        Ok(PyConjClasses { inner: Arc::new(ok(cc)?) })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    fn __len__(&self) -> usize {
        self.inner.num_classes()
    }

    fn u1_order(&self) -> usize {
        self.inner.u1_order()
    }

    fn class_of(&self, x: &PyUniTri) -> PyResult<u32> {
        ok(self.inner.class_of(&x.inner))
    }

    fn representative(&self, c: u32) -> PyResult<PyUniTri> {
        self.check(c)?;
        Ok(wrap(self.inner.rep(c)))
    }

    fn class_size(&self, c: u32) -> PyResult<u64> {
        self.check(c)?;
        Ok(self.inner.class_size(c))
    }

    /// Image of class c under σ ∈ A = (Z/p)^n.
    fn act(&self, sigma: Vec<u32>, c: u32) -> PyResult<u32> {
        self.check(c)?;
        let s = avec(self.inner.n(), self.inner.p(), sigma)?;
        ok(self.inner.act_on_class(&s, c))
    }

    fn fixed_classes(&self, sigma: Vec<u32>) -> PyResult<Vec<u32>> {
        let s = avec(self.inner.n(), self.inner.p(), sigma)?;
        Ok(self.inner.fixed_classes(&s))
    }

    fn outer_exponent<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = conjact::outer_exponent(&self.inner);
        to_py(py, &r)
    }

    /// Evaluate the Brauer-group formula for G ⊆ A × (Z/e)* given by (a, χ) generators.
    #[pyo3(signature = (generators, coboundary_samples = 100, class_samples = 16, seed = 0x5eed))]
    fn brauer<'py>(
        &self,
        py: Python<'py>,
        generators: Vec<(Vec<u32>, u32)>,
        coboundary_samples: usize,
        class_samples: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = EvalOptions { coboundary_samples, class_samples, seed };
        let cc = self.inner.clone();
        let r = py.detach(move || -> Result<_, BrauerError> {
            let problem = brauer::build_problem_with(cc, &generators)?;
            brauer::evaluate_formula_with(&problem, &opts)
        });
        to_py(py, &ok(r)?)
    }

    /// Sandwich check over all subgroups, or `sample` of them chosen with `seed`.
    #[pyo3(signature = (sample = None, seed = 0))]
    fn sandwich_scan<'py>(&self, py: Python<'py>, sample: Option<usize>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let policy = match sample {
            Some(count) => ScanPolicy::Sampled { count, seed },
            None => ScanPolicy::Exhaustive,
        };
        let cc = self.inner.clone();
        let scan = py.detach(move || brauer::sandwich_scan_with(cc, &policy, &EvalOptions::default()));
        to_py(py, &ok(scan)?)
    }
}

impl PyConjClasses {
    fn check(&self, c: u32) -> PyResult<()> {
        if (c as usize) < self.inner.num_classes() {
            Ok(())
        } else {
            Err(invalid(format!("class index {c} out of range")))
        }
    }
}

/// Outer exponent of U¹(n, p) with its class count.
#[pyfunction]
#[pyo3(signature = (n, p, max_elems = 1 << 25))]
fn outer_exponent<'py>(py: Python<'py>, n: usize, p: u32, max_elems: u64) -> PyResult<Bound<'py, PyAny>> {
    require_prime(p)?;
    let r = py.detach(|| conjact::conj_classes_with_budget(n, p, max_elems).map(|cc| conjact::outer_exponent(&cc)));
    to_py(py, &ok(r)?)
}

/// The closed form for S·Q·S⁻¹ with S the lift of σ.
#[pyfunction]
fn conjugate_by_lift(sigma: Vec<u32>, q: &PyUniTri) -> PyResult<PyUniTri> {
    let n = q.inner.n();
    if (0..n).any(|i| q.inner.get(i, i + 1) != 0) {
        return Err(invalid("Q must lie in U¹ (zero superdiagonal)"));
    }
    let s = avec(n, q.inner.modulus(), sigma)?;
    Ok(wrap(conjact::aide_matrix(&s, &q.inner)))
}

fn massey_problem(
    group: &PyGroup,
    n: usize,
    p: u32,
    alpha: &[Vec<u64>],
    modulus: Option<u32>,
    characters: Option<Vec<Vec<u32>>>,
) -> PyResult<MasseyProblem> {
    match (modulus, characters) {
        (None, None) => {
            require_prime(p)?;
            ok(MasseyProblem::classical(&group.inner, n, p, alpha))
        }
        (m, Some(chars)) => ok(MasseyProblem::generalized(&group.inner, n, m.unwrap_or(p), &chars, alpha)),
        (Some(_), None) => Err(invalid("a modulus other than p needs characters")),
    }
}

/// The Massey product ⟨α_0, …, α_{n−1}⟩ given generator values of each α_i.
///
/// Passing `characters` (n + 1 lists of generator values in (Z/m)*) selects the
/// generalized construction with coefficients Z/m.
#[pyfunction]
#[pyo3(signature = (group, alpha, p, modulus = None, characters = None, max_candidates = 1 << 22))]
fn massey_product<'py>(
    py: Python<'py>,
    group: &PyGroup,
    alpha: Vec<Vec<u64>>,
    p: u32,
    modulus: Option<u32>,
    characters: Option<Vec<Vec<u32>>>,
    max_candidates: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let problem = massey_problem(group, alpha.len(), p, &alpha, modulus, characters)?;
    let opts = MasseyOptions { max_candidates, ..Default::default() };
    let set = py.detach(|| mp::massey_product_set(&problem, &opts));
    let set = ok(set)?;
    let out = serde_json::json!({
        "defined": !set.is_empty(),
        "vanishes": set.contains_zero,
        "h2_invariants": set.h2_invariants,
        "classes": set.classes,
        "lift_count": set.raw_count(),
        "bucket_count": set.bucket_count,
        "lifts": set.lifts.iter().map(|l| serde_json::json!({
            "images": l.images.iter().map(|x| x.rows()).collect::<Vec<_>>(),
            "signature": l.signature,
            "value_trivial": l.value_trivial,
            "lifts_to_u": l.lifts_to_u,
        })).collect::<Vec<_>>(),
    });
    to_py(py, &out)
}

/// Whether the Massey product is defined (some defining system exists).
#[pyfunction]
#[pyo3(signature = (group, alpha, p))]
fn massey_defined(group: &PyGroup, alpha: Vec<Vec<u64>>, p: u32) -> PyResult<bool> {
    let problem = massey_problem(group, alpha.len(), p, &alpha, None, None)?;
    ok(mp::is_defined(&problem, &MasseyOptions::default()))
}

/// Whether the Massey product contains zero.
#[pyfunction]
#[pyo3(signature = (group, alpha, p))]
fn massey_vanishes(group: &PyGroup, alpha: Vec<Vec<u64>>, p: u32) -> PyResult<bool> {
    let problem = massey_problem(group, alpha.len(), p, &alpha, None, None)?;
    ok(mp::vanishes(&problem, &MasseyOptions::default()))
}

fn kernel_spec(kernel: &str, r: usize, s: usize) -> PyResult<KernelSpec> {
    match kernel {
        "center" => Ok(KernelSpec::Center),
        "u1" => Ok(KernelSpec::U1),
        "lcs" => Ok(KernelSpec::Lcs(r)),
        "prs" => Ok(KernelSpec::Prs(r, s)),
        _ => Err(invalid(format!("unknown kernel `{kernel}` (center, u1, lcs, prs)"))),
    }
}

/// Lift a homomorphism Γ → U/K, given by generator images, to Γ → U.
/// Returns the lifted images or None when no lift exists.
#[pyfunction]
#[pyo3(signature = (group, images, kernel, r = 2, s = 1, max_nodes = 1_000_000))]
fn solve_embedding(
    py: Python<'_>,
    group: &PyGroup,
    images: Vec<PyUniTri>,
    kernel: &str,
    r: usize,
    s: usize,
    max_nodes: u64,
) -> PyResult<Option<Vec<PyUniTri>>> {
    let first = images.first().ok_or_else(|| invalid("need one image per generator"))?;
    let (n, p) = (first.inner.n(), first.inner.modulus());
    require_prime(p)?;
    let k = kernel_spec(kernel, r, s)?;
    let base: Level = ok(k.levels(n))?[0];
    let alpha: Vec<unigroup::UniTri> = images.iter().map(|x| base.normal_form(&x.inner)).collect();
    let opts = SolverOptions { max_nodes, ..Default::default() };
    let (out, _) = ok(py.detach(|| cohom::solve_embedding(&group.inner, n, p, k, &alpha, &opts)))?;
    Ok(match out {
        EmbeddingOutcome::Lift(v) => Some(v.into_iter().map(wrap).collect()),
        EmbeddingOutcome::Unsolvable => None,
    })
}

/// Structure of P^{r,s}(n, p).
#[pyfunction]
fn prs_check<'py>(py: Python<'py>, n: usize, p: u32, r: usize, s: usize) -> PyResult<Bound<'py, PyAny>> {
    require_prime(p)?;
    let rep = ok(unigroup::prs_check(n, p, r, s))?;
    let d = to_py(py, &rep)?;
    d.cast::<PyDict>()?.set_item("passed", rep.passed())?;
    Ok(d)
}

#[pymodule]
pub fn massey_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUniTri>()?;
    m.add_class::<PyGroup>()?;
    m.add_class::<PyConjClasses>()?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_function(wrap_pyfunction!(outer_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_by_lift, m)?)?;
    m.add_function(wrap_pyfunction!(massey_product, m)?)?;
    m.add_function(wrap_pyfunction!(massey_defined, m)?)?;
    m.add_function(wrap_pyfunction!(massey_vanishes, m)?)?;
    m.add_function(wrap_pyfunction!(solve_embedding, m)?)?;
    m.add_function(wrap_pyfunction!(prs_check, m)?)?;
    Ok(())
}
