//! The algebraic unramified Brauer formula for the Massey splitting variety, evaluated
//! group-theoretically: for G ⊆ A × (Z/e)* it computes H¹(G, B̂), the formula subgroup,
//! Sha¹_cyc(G, B̂) and the kernel of H¹(G, B̂) → H¹(G, B̂₀).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohom::{CohomError, FiniteGroup, GModule, H1Basis, H1Subgroup};
use crate::conjact::{conj_classes, outer_exponent, ConjClasses, ConjError};
use crate::modarith::{is_prime, mat_mul, pow_mod, span_basis_fp, ArithError, DenseMat};
use crate::unigroup::{a_action_matrix, b0_pairs, b_pairs, AVec, UniError, UniTri};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BrauerError {
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("outer exponent {0} is not prime; the formula path needs a prime e")]
    CompositeExponent(u64),
    #[error("invalid generator {index}: {reason}")]
    Generator { index: usize, reason: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Conj(#[from] ConjError),
    #[error(transparent)]
    Cohom(#[from] CohomError),
    #[error(transparent)]
    Uni(#[from] UniError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl BrauerError {
    pub fn is_budget(&self) -> bool {
        match self {
            BrauerError::Budget(_) => true,
            BrauerError::Conj(ConjError::Budget { .. }) => true,
            BrauerError::Cohom(CohomError::Budget(_)) => true,
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, BrauerError>;

/// An element (a, c) of A × (Z/e)*.
pub type GElem = (Vec<u32>, u32);

#[derive(Clone, Debug)]
pub struct BrauerProblem {
    n: usize,
    p: u32,
    e: u64,
    classes: Arc<ConjClasses>,
    group: FiniteGroup,
    elems: Vec<GElem>,
}

pub fn build_problem(n: usize, p: u32, gens: &[GElem]) -> Result<BrauerProblem> {
    if n < 3 {
        return Err(BrauerError::Precondition("n must be at least 3".into()));
    }
    if !is_prime(p as u64) {
        return Err(BrauerError::Precondition(format!("{p} is not prime")));
    }
    build_problem_with(Arc::new(conj_classes(n, p)?), gens)
}

/// As [`build_problem`], reusing an existing class enumeration.
pub fn build_problem_with(classes: Arc<ConjClasses>, gens: &[GElem]) -> Result<BrauerProblem> {
    let (n, p) = (classes.n(), classes.p());
    if n < 3 {
        return Err(BrauerError::Precondition("n must be at least 3".into()));
    }
    let e = outer_exponent(&classes).e;
    if !is_prime(e) {
        return Err(BrauerError::CompositeExponent(e));
    }
    let mut checked = Vec::with_capacity(gens.len());
    for (index, (a, c)) in gens.iter().enumerate() {
        if a.len() != n {
            return Err(BrauerError::Generator {
                index,
                reason: format!("need {n} coordinates, got {}", a.len()),
            });
        }
        let c = (*c as u64 % e) as u32;
        if c == 0 {
            return Err(BrauerError::Generator {
                index,
                reason: "second coordinate is not a unit".into(),
            });
        }
        checked.push((a.iter().map(|x| x % p).collect::<Vec<u32>>(), c));
    }
    let id: GElem = (vec![0; n], 1);
    let mul = |x: &GElem, y: &GElem| -> GElem {
        let a = x.0.iter().zip(&y.0).map(|(u, v)| (u + v) % p).collect();
        (a, ((x.1 as u64 * y.1 as u64) % e) as u32)
    };
    let (group, elems) = FiniteGroup::from_closure(&checked, id, mul)?;
    Ok(BrauerProblem {
        n,
        p,
        e,
        classes,
        group,
        elems,
    })
}

impl BrauerProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// The outer exponent, recomputed from the class enumeration.
    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn classes(&self) -> &ConjClasses {
        &self.classes
    }

    pub fn element(&self, s: u32) -> &GElem {
        &self.elems[s as usize]
    }

    pub fn elements(&self) -> &[GElem] {
        &self.elems
    }

    pub fn sigma_a(&self, s: u32) -> AVec {
        AVec {
            n: self.n,
            p: self.p,
            a: self.elems[s as usize].0.clone(),
        }
    }

    pub fn chi(&self, s: u32) -> u64 {
        self.elems[s as usize].1 as u64
    }

    /// Whether χ maps G onto (Z/e)*.
    pub fn chi_surjective(&self) -> bool {
        let image: HashSet<u32> = self.elems.iter().map(|x| x.1).collect();
        image.len() as u64 == self.e - 1
    }
}

/// B̂ = Hom(B, Z/e) in coordinates dual to the (i, j) basis of B, with
/// (σf)(b) = χ(σ)·f(σ_A⁻¹·b).
#[derive(Clone, Debug)]
pub struct DualBModule {
    pub pairs: Vec<(usize, usize)>,
    pub module: GModule,
}

impl DualBModule {
    pub fn rank(&self) -> usize {
        self.pairs.len()
    }
}

fn neg_avec(a: &AVec) -> AVec {
    AVec {
        n: a.n,
        p: a.p,
        a: a.a.iter().map(|&x| (a.p - x) % a.p).collect(),
    }
}

fn scale(m: &DenseMat, c: u64) -> DenseMat {
    DenseMat::from_fn(m.rows(), m.cols(), m.modulus(), |i, j| (m.get(i, j) * c) % m.modulus())
}

/// B̂ as a G-module, with the pairing identity checked on every element.
pub fn dual_b(problem: &BrauerProblem) -> Result<DualBModule> {
    let pairs = b_pairs(problem.n);
    let q = problem.p as u64;
    let r = pairs.len();
    let id = DenseMat::identity(r, q);
    let mut action = Vec::with_capacity(problem.group.order());
    for s in 0..problem.group.order() as u32 {
        let a = problem.sigma_a(s);
        let t = a_action_matrix(&a);
        let t_neg = a_action_matrix(&neg_avec(&a));
        if mat_mul(&t, &t_neg)? != id {
            return Err(BrauerError::Inconsistent("A-action matrix is not invertible as expected".into()));
        }
        let d = scale(&t_neg.transpose(), problem.chi(s));
        // ⟨σf, σb⟩ = χ(σ)⟨f, b⟩ for all f, b
        if mat_mul(&d.transpose(), &t)? != scale(&id, problem.chi(s)) {
            return Err(BrauerError::Inconsistent("dual pairing is not χ-equivariant".into()));
        }
        action.push(d);
    }
    let module = GModule::from_action(&problem.group, q, action)?;
    Ok(DualBModule { pairs, module })
}

/// B̂₀ together with the restriction map B̂ → B̂₀ (rows index B₀ coordinates).
pub fn dual_b0(problem: &BrauerProblem) -> Result<(DualBModule, DenseMat)> {
    let all = b_pairs(problem.n);
    let pairs = b0_pairs(problem.n);
    let idx: Vec<usize> = pairs
        .iter()
        .map(|pr| all.iter().position(|x| x == pr).expect("B₀ pair lies in B"))
        .collect();
    let q = problem.p as u64;
    let r0 = idx.len();
    let mut action = Vec::with_capacity(problem.group.order());
    for s in 0..problem.group.order() as u32 {
        let a = problem.sigma_a(s);
        let t = a_action_matrix(&a);
        // B₀ must be A-stable
        for &c in &idx {
            for row in 0..all.len() {
                if !idx.contains(&row) && t.get(row, c) != 0 {
                    return Err(BrauerError::Inconsistent("B₀ is not stable under A".into()));
                }
            }
        }
        let t_neg = a_action_matrix(&neg_avec(&a));
        let restricted = DenseMat::from_fn(r0, r0, q, |i, j| t_neg.get(idx[i], idx[j]));
        action.push(scale(&restricted.transpose(), problem.chi(s)));
    }
    let module = GModule::from_action(&problem.group, q, action)?;
    let restriction = DenseMat::from_fn(r0, all.len(), q, |i, j| (idx[i] == j) as u64);
    Ok((DualBModule { pairs, module }, restriction))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalOptions {
    pub coboundary_samples: usize,
    pub class_samples: usize,
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            coboundary_samples: 100,
            class_samples: 16,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BrauerReport {
    pub n: usize,
    pub p: u32,
    pub e: u64,
    pub group_order: usize,
    pub chi_surjective: bool,
    pub b_rank: usize,
    pub b0_rank: usize,
    pub h1_dim: usize,
    pub sha_dim: usize,
    pub formula_dim: usize,
    pub b0_kernel_dim: usize,
    pub sha_b0_dim: usize,
    /// Generator values (on the distinguished generators of G) of the cyclic generators.
    pub h1_basis: Vec<Vec<u64>>,
    pub sha_basis: Vec<Vec<u64>>,
    pub formula_basis: Vec<Vec<u64>>,
    pub b0_kernel_basis: Vec<Vec<u64>>,
    pub qualifying_pairs: usize,
    pub condition_rank: usize,
    pub sha_in_formula: bool,
    pub formula_in_h1: bool,
    /// None outside 3 ≤ n ≤ 6, where containment is not asserted.
    pub formula_in_b0_kernel: Option<bool>,
    pub coboundary_samples: usize,
    pub coboundary_invariant: bool,
    pub class_samples: usize,
    pub class_invariant: bool,
    pub power_conditions_redundant: bool,
    /// Some(H¹ = 0) when p is odd and χ is onto (Z/p)*.
    pub nopthroot: Option<bool>,
    pub notes: Vec<String>,
}

impl BrauerReport {
    pub fn sandwich_holds(&self) -> bool {
        self.sha_in_formula && self.formula_in_h1 && self.sha_dim <= self.formula_dim && self.formula_dim <= self.h1_dim
    }

    pub fn all_checks_pass(&self) -> bool {
        self.sandwich_holds()
            && self.formula_in_b0_kernel != Some(false)
            && self.coboundary_invariant
            && self.class_invariant
            && self.nopthroot != Some(false)
    }
}

fn b_coords(u: &UniTri, pairs: &[(usize, usize)]) -> Vec<u64> {
    pairs.iter().map(|&(i, j)| u.get(i, j) as u64).collect()
}

struct Harvest {
    /// per σ: the distinct ū of qualifying classes
    per_sigma: Vec<Vec<Vec<u64>>>,
    qualifying_pairs: usize,
}

/// For each σ, the classes [u] with σ_A([u]) = [u^{χ(σ)}], reduced to their B-images.
fn harvest(problem: &BrauerProblem, pairs: &[(usize, usize)]) -> Result<Harvest> {
    let cls = &problem.classes;
    let nc = cls.num_classes() as u32;
    let reps: Vec<UniTri> = (0..nc).map(|c| cls.rep(c)).collect();
    let ubar: Vec<Vec<u64>> = reps.iter().map(|u| b_coords(u, pairs)).collect();
    let units: BTreeSet<u32> = problem.elems.iter().map(|x| x.1).collect();
    let mut power_class: HashMap<u32, Vec<u32>> = HashMap::new();
    for &c in &units {
        let v = reps
            .iter()
            .map(|u| cls.class_of(&u.pow(c as u64)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        power_class.insert(c, v);
    }
    let per: Vec<(Vec<Vec<u64>>, usize)> = (0..problem.group.order() as u32)
        .into_par_iter()
        .map(|s| {
            let perm = cls.action_perm(&problem.sigma_a(s));
            let pc = &power_class[&problem.elems[s as usize].1];
            let mut seen = BTreeSet::new();
            let mut count = 0;
            for c in 0..nc as usize {
                if perm[c] == pc[c] {
                    count += 1;
                    if ubar[c].iter().any(|&x| x != 0) {
                        seen.insert(ubar[c].clone());
                    }
                }
            }
            (seen.into_iter().collect(), count)
        })
        .collect();
    let qualifying_pairs = per.iter().map(|x| x.1).sum();
    Ok(Harvest {
        per_sigma: per.into_iter().map(|x| x.0).collect(),
        qualifying_pairs,
    })
}

fn condition_rows(h1: &H1Basis, sigma: u32, ubars: &[Vec<u64>], q: u64) -> Vec<Vec<u64>> {
    let l = h1.linear_at(sigma);
    ubars
        .iter()
        .map(|u| {
            (0..l.cols())
                .map(|k| (0..l.rows()).fold(0u64, |acc, r| (acc + u[r] * l.get(r, k)) % q))
                .collect()
        })
        .collect()
}

fn reduce_rows(rows: Vec<Vec<u64>>, width: usize, q: u64) -> Result<DenseMat> {
    let basis = span_basis_fp(&rows, width, q)?;
    if basis.is_empty() {
        return Ok(DenseMat::zeros(0, width, q));
    }
    Ok(DenseMat::from_rows(&basis, q)?)
}

/// Evaluate the formula subgroup and the full sandwich report.
pub fn evaluate_formula(problem: &BrauerProblem) -> Result<BrauerReport> {
    evaluate_formula_with(problem, &EvalOptions::default())
}

pub fn evaluate_formula_with(problem: &BrauerProblem, opts: &EvalOptions) -> Result<BrauerReport> {
    let q = problem.p as u64;
    let g = &problem.group;
    let bhat = dual_b(problem)?;
    let (b0hat, restriction) = dual_b0(problem)?;
    let h1 = H1Basis::new(g, &bhat.module)?;
    let width = h1.unknowns();
    let mut notes = vec![format!(
        "coefficients: B̂ = Hom(B, μ_e) realised as Hom(B, Z/{}) since e = p is prime",
        problem.e
    )];
    notes.push(format!(
        "classes of U¹ enumerated: {} (|U¹| = {})",
        problem.classes.num_classes(),
        problem.classes.u1_order()
    ));

    let hv = harvest(problem, &bhat.pairs)?;
    let mut rows = Vec::new();
    for (s, ubars) in hv.per_sigma.iter().enumerate() {
        rows.extend(condition_rows(&h1, s as u32, ubars, q));
    }
    let rows: Vec<Vec<u64>> = rows.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let cond = reduce_rows(rows, width, q)?;
    let formula = h1.subgroup_where(&cond)?;
    let full = h1.full()?;
    let sha = h1.sha1_cyc()?;
    let b0_kernel = h1.map_kernel(&restriction, &b0hat.module)?;
    let h1_b0 = H1Basis::new(g, &b0hat.module)?;
    let sha_b0 = h1_b0.sha1_cyc()?;

    let sha_in_formula = h1.subgroup_le(&sha, &formula)?;
    let formula_in_h1 = h1.subgroup_le(&formula, &full)?;
    let formula_in_b0_kernel = if (3..=6).contains(&problem.n) {
        Some(h1.subgroup_le(&formula, &b0_kernel)?)
    } else {
        notes.push(format!("n = {} is outside 3..=6; formula ⊆ B₀-kernel not asserted", problem.n));
        None
    };

    let mut rng = StdRng::seed_from_u64(opts.seed);
    let coboundary_invariant = coboundary_check(problem, &hv, q, opts.coboundary_samples, &mut rng);
    let class_invariant = class_check(problem, &bhat.pairs, opts.class_samples, &mut rng)?;
    let power_conditions_redundant = power_check(problem, &h1, &bhat.pairs, &formula, width, q)?;
    if !power_conditions_redundant {
        notes.push("power-derived conditions cut the formula subgroup further".into());
    }
    let chi_surjective = problem.chi_surjective();
    let nopthroot = (problem.p % 2 == 1 && problem.e == problem.p as u64 && chi_surjective).then(|| h1.dim() == 0);

    Ok(BrauerReport {
        n: problem.n,
        p: problem.p,
        e: problem.e,
        group_order: g.order(),
        chi_surjective,
        b_rank: bhat.rank(),
        b0_rank: b0hat.rank(),
        h1_dim: h1.dim(),
        sha_dim: sha.dim(),
        formula_dim: formula.dim(),
        b0_kernel_dim: b0_kernel.dim(),
        sha_b0_dim: sha_b0.dim(),
        h1_basis: full.quotient.generators.clone(),
        sha_basis: sha.quotient.generators.clone(),
        formula_basis: formula.quotient.generators.clone(),
        b0_kernel_basis: b0_kernel.quotient.generators.clone(),
        qualifying_pairs: hv.qualifying_pairs,
        condition_rank: cond.rows(),
        sha_in_formula,
        formula_in_h1,
        formula_in_b0_kernel,
        coboundary_samples: opts.coboundary_samples,
        coboundary_invariant,
        class_samples: opts.class_samples,
        class_invariant,
        power_conditions_redundant,
        nopthroot,
        notes,
    })
}

/// Kernel of H¹(G, B̂) → H¹(G, B̂₀).
pub fn b0_kernel(problem: &BrauerProblem) -> Result<H1Subgroup> {
    let bhat = dual_b(problem)?;
    let (b0hat, restriction) = dual_b0(problem)?;
    let h1 = H1Basis::new(&problem.group, &bhat.module)?;
    Ok(h1.map_kernel(&restriction, &b0hat.module)?)
}

/// The formula subgroup alone, with the H¹ it lives in.
pub fn formula_subgroup(problem: &BrauerProblem) -> Result<(H1Basis, H1Subgroup)> {
    let q = problem.p as u64;
    let bhat = dual_b(problem)?;
    let h1 = H1Basis::new(&problem.group, &bhat.module)?;
    let hv = harvest(problem, &bhat.pairs)?;
    let mut rows = Vec::new();
    for (s, ubars) in hv.per_sigma.iter().enumerate() {
        rows.extend(condition_rows(&h1, s as u32, ubars, q));
    }
    let cond = reduce_rows(rows, h1.unknowns(), q)?;
    let sub = h1.subgroup_where(&cond)?;
    Ok((h1, sub))
}

/// δf(σ) = σf − f, paired with ū on every qualifying (σ, u), computed from the
/// explicit dual action rather than the module tables.
fn coboundary_check(problem: &BrauerProblem, hv: &Harvest, q: u64, samples: usize, rng: &mut StdRng) -> bool {
    let r = b_pairs(problem.n).len();
    let duals: Vec<DenseMat> = (0..problem.group.order() as u32)
        .map(|s| {
            let t_neg = a_action_matrix(&neg_avec(&problem.sigma_a(s)));
            scale(&t_neg.transpose(), problem.chi(s))
        })
        .collect();
    for _ in 0..samples {
        let f: Vec<u64> = (0..r).map(|_| rng.gen_range(0..q)).collect();
        for (s, ubars) in hv.per_sigma.iter().enumerate() {
            if ubars.is_empty() {
                continue;
            }
            let sf = duals[s].mul_vec(&f).expect("shape");
            for u in ubars {
                let v = (0..r).fold(0u64, |acc, k| (acc + (sf[k] + q - f[k]) % q * u[k]) % q);
                if v != 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn qualifies(problem: &BrauerProblem, s: u32, x: &UniTri) -> Result<bool> {
    let cls = &problem.classes;
    let sm = problem.sigma_a(s).lift();
    let left = cls.class_of(&x.conj_by(&sm))?;
    let right = cls.class_of(&x.pow(problem.chi(s)))?;
    Ok(left == right)
}

/// Sampled check that qualification and ū depend only on the U¹-class of u.
fn class_check(problem: &BrauerProblem, pairs: &[(usize, usize)], samples: usize, rng: &mut StdRng) -> Result<bool> {
    let cls = &problem.classes;
    let total = cls.u1_order() as u64;
    for _ in 0..samples {
        let s = rng.gen_range(0..problem.group.order()) as u32;
        let x = cls.element(rng.gen_range(0..total));
        let h = cls.element(rng.gen_range(0..total));
        let y = x.conj_by(&h);
        if cls.class_of(&x)? != cls.class_of(&y)? {
            return Ok(false);
        }
        if qualifies(problem, s, &x)? != qualifies(problem, s, &y)? {
            return Ok(false);
        }
        if b_coords(&x, pairs) != b_coords(&y, pairs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Add, for each σ and class [u], the condition at (σ^k, u) with k minimal such that
/// (σ^k, u) qualifies, and compare the resulting kernel with the formula subgroup.
fn power_check(
    problem: &BrauerProblem,
    h1: &H1Basis,
    pairs: &[(usize, usize)],
    formula: &H1Subgroup,
    width: usize,
    q: u64,
) -> Result<bool> {
    let g = &problem.group;
    let cls = &problem.classes;
    let nc = cls.num_classes() as u32;
    let reps: Vec<UniTri> = (0..nc).map(|c| cls.rep(c)).collect();
    let perms: Vec<Vec<u32>> = (0..g.order() as u32).map(|s| cls.action_perm(&problem.sigma_a(s))).collect();
    let mut power_class: HashMap<u32, Vec<u32>> = HashMap::new();
    for x in problem.elems.iter() {
        if !power_class.contains_key(&x.1) {
            let v = reps
                .iter()
                .map(|u| cls.class_of(&u.pow(x.1 as u64)))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            power_class.insert(x.1, v);
        }
    }
    let mut per_sigma: Vec<BTreeSet<Vec<u64>>> = vec![BTreeSet::new(); g.order()];
    for s in 0..g.order() as u32 {
        for c in 0..nc as usize {
            let mut t = s;
            loop {
                if perms[t as usize][c] == power_class[&problem.elems[t as usize].1][c] {
                    let u = b_coords(&reps[c], pairs);
                    if u.iter().any(|&x| x != 0) {
                        per_sigma[t as usize].insert(u);
                    }
                    break;
                }
                t = g.mul(t, s);
            }
        }
    }
    let mut rows = Vec::new();
    for (s, us) in per_sigma.iter().enumerate() {
        let us: Vec<Vec<u64>> = us.iter().cloned().collect();
        rows.extend(condition_rows(h1, s as u32, &us, q));
    }
    let cond = reduce_rows(rows, width, q)?;
    let extended = h1.subgroup_where(&cond)?;
    Ok(h1.subgroup_le(formula, &extended)?)
}

/// How sandwich_scan chooses subgroups of A × (Z/p)*.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScanPolicy {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
    /// Exhaustive when the subgroup count is at most `max_exhaustive`, else sampled.
    Auto { max_exhaustive: usize, count: usize, seed: u64 },
}

impl Default for ScanPolicy {
    fn default() -> Self {
        ScanPolicy::Auto {
            max_exhaustive: 4096,
            count: 200,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub generators: Vec<GElem>,
    pub report: BrauerReport,
    pub sha_ne_formula: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichScan {
    pub n: usize,
    pub p: u32,
    pub e: u64,
    pub exhaustive: bool,
    pub subgroup_count: Option<u128>,
    pub rows: Vec<ScanRow>,
    /// Indices of rows with Sha¹_cyc ≠ formula subgroup.
    pub flagged: Vec<usize>,
}

impl SandwichScan {
    pub fn all_checks_pass(&self) -> bool {
        self.rows.iter().all(|r| r.report.all_checks_pass())
    }
}

/// Bases (in reduced echelon form) of every subspace of F_p^n.
pub fn subspaces(n: usize, p: u32) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    for k in 0..=n {
        let mut pivots = Vec::new();
        pivot_sets(n, k, 0, &mut pivots, &mut |piv| {
            // free slots: row r, column c > piv[r], c not a pivot
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| ((piv[r] + 1)..n).filter(|c| !piv.contains(c)).map(move |c| (r, c)))
                .collect();
            let total = (p as u64).pow(free.len() as u32);
            for mut idx in 0..total {
                let mut basis = vec![vec![0u32; n]; k];
                for r in 0..k {
                    basis[r][piv[r]] = 1;
                }
                for &(r, c) in &free {
                    basis[r][c] = (idx % p as u64) as u32;
                    idx /= p as u64;
                }
                out.push(basis);
            }
        });
    }
    out
}

fn pivot_sets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        pivot_sets(n, k, c + 1, cur, f);
        cur.pop();
    }
}

/// Number of subspaces of F_p^n (sum of Gaussian binomials).
pub fn subspace_count(n: usize, p: u32) -> u128 {
    let q = p as u128;
    let mut total = 0u128;
    for k in 0..=n {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k {
            num *= q.pow((n - i) as u32) - 1;
            den *= q.pow((i + 1) as u32) - 1;
        }
        total += num / den;
    }
    total
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m % d == 0).collect()
}

fn primitive_root(p: u64) -> u64 {
    (1..p)
        .find(|&g| (1..p - 1).all(|k| pow_mod(g, k, p) != 1))
        .unwrap_or(1)
}

/// Generator lists for every subgroup of A × (Z/e)* (the orders are coprime, so each
/// subgroup is a product of a subspace of A and a subgroup of the cyclic unit group).
pub fn all_subgroups(n: usize, p: u32, e: u64) -> Vec<Vec<GElem>> {
    let units = e - 1;
    let g = primitive_root(e);
    let mut out = Vec::new();
    for d in divisors(units) {
        let unit_gen = pow_mod(g, units / d, e) as u32;
        for basis in subspaces(n, p) {
            let mut gens: Vec<GElem> = basis.into_iter().map(|a| (a, 1)).collect();
            if d > 1 {
                gens.push((vec![0; n], unit_gen));
            }
            out.push(gens);
        }
    }
    out
}

fn random_generators(n: usize, p: u32, e: u64, rng: &mut StdRng) -> Vec<GElem> {
    let k = rng.gen_range(1..=3usize);
    (0..k)
        .map(|_| {
            let a = (0..n).map(|_| rng.gen_range(0..p)).collect();
            let c = if e > 2 { rng.gen_range(1..e) as u32 } else { 1 };
            (a, c)
        })
        .collect()
}

pub fn sandwich_scan(n: usize, p: u32, policy: &ScanPolicy) -> Result<SandwichScan> {
    let classes = Arc::new(conj_classes(n, p)?);
    sandwich_scan_with(classes, policy, &EvalOptions::default())
}

pub fn sandwich_scan_with(classes: Arc<ConjClasses>, policy: &ScanPolicy, opts: &EvalOptions) -> Result<SandwichScan> {
    let (n, p) = (classes.n(), classes.p());
    let e = outer_exponent(&classes).e;
    if !is_prime(e) {
        return Err(BrauerError::CompositeExponent(e));
    }
    let count = subspace_count(n, p).checked_mul(divisors(e - 1).len() as u128);
    let (exhaustive, samples, seed) = match policy {
        ScanPolicy::Exhaustive => (true, 0, 0),
        ScanPolicy::Sampled { count, seed } => (false, *count, *seed),
        ScanPolicy::Auto {
            max_exhaustive,
            count: c,
            seed,
        } => (count.is_some_and(|x| x <= *max_exhaustive as u128), *c, *seed),
    };
    let gen_lists = if exhaustive {
        if count.map_or(true, |x| x > 1 << 22) {
            return Err(BrauerError::Budget(format!("too many subgroups at (n, p) = ({n}, {p})")));
        }
        all_subgroups(n, p, e)
    } else {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..samples).map(|_| random_generators(n, p, e, &mut rng)).collect()
    };
    let rows = gen_lists
        .into_par_iter()
        .map(|gens| {
            let problem = build_problem_with(classes.clone(), &gens)?;
            let report = evaluate_formula_with(&problem, opts)?;
            let sha_ne_formula = report.sha_dim != report.formula_dim;
            Ok(ScanRow {
                generators: gens,
                report,
                sha_ne_formula,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let flagged = rows.iter().enumerate().filter(|(_, r)| r.sha_ne_formula).map(|(i, _)| i).collect();
    Ok(SandwichScan {
        n,
        p,
        e,
        exhaustive,
        subgroup_count: count,
        rows,
        flagged,
    })
}
