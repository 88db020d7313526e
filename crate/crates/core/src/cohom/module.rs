//! G-modules over Z/p^k, cochains, coboundaries and cup products.

use crate::modarith::{
    add_mod, mat_mul, mul_mod, prime_power, solve_pk, sub_mod, DenseMat, PkSolution, RowSpanPk,
};

use super::group::FiniteGroup;
use super::{CohomError, Result};

/// Split a modulus into (p, k) with m = p^k.
pub(crate) fn split_modulus(m: u64) -> Result<(u64, u32)> {
    match prime_power(m) {
        Some((p, k)) if k >= 1 => Ok((p, k)),
        _ => Err(CohomError::UnsupportedModulus(m)),
    }
}

/// A free Z/m-module of finite rank with a G-action given per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    modulus: u64,
    p: u64,
    k: u32,
    rank: usize,
    action: Vec<DenseMat>,
}

impl GModule {
    pub fn trivial(g: &FiniteGroup, modulus: u64, rank: usize) -> Result<Self> {
        let (p, k) = split_modulus(modulus)?;
        Ok(GModule {
            modulus,
            p,
            k,
            rank,
            action: vec![DenseMat::identity(rank, modulus); g.order()],
        })
    }

    /// Extend matrices for the distinguished generators to a representation of G.
    pub fn from_generators(g: &FiniteGroup, modulus: u64, rank: usize, gen_mats: Vec<DenseMat>) -> Result<Self> {
        let (p, k) = split_modulus(modulus)?;
        for a in &gen_mats {
            if a.rows() != rank || a.cols() != rank || a.modulus() != modulus {
                return Err(CohomError::InvalidModule("generator matrix shape or modulus".into()));
            }
        }
        let id = DenseMat::identity(rank, modulus);
        let action = g
            .extend_hom(&gen_mats, &id, |x, y| mat_mul(x, y).expect("square matrices"))
            .ok_or_else(|| CohomError::InvalidModule("generator matrices do not define an action".into()))?;
        Ok(GModule {
            modulus,
            p,
            k,
            rank,
            action,
        })
    }

    /// Action given on every element; validated as a homomorphism.
    pub fn from_action(g: &FiniteGroup, modulus: u64, action: Vec<DenseMat>) -> Result<Self> {
        let (p, k) = split_modulus(modulus)?;
        let rank = action.first().map_or(0, |a| a.rows());
        if action.len() != g.order()
            || action.iter().any(|a| a.rows() != rank || a.cols() != rank || a.modulus() != modulus)
        {
            return Err(CohomError::InvalidModule("action shape".into()));
        }
        if !g.is_hom(&action, |x, y| mat_mul(x, y).expect("square")) {
            return Err(CohomError::InvalidModule("action is not a homomorphism".into()));
        }
        Ok(GModule {
            modulus,
            p,
            k,
            rank,
            action,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Order of the group the action is defined on.
    pub fn group_order(&self) -> usize {
        self.action.len()
    }

    pub fn act(&self, g: u32) -> &DenseMat {
        &self.action[g as usize]
    }

    pub fn apply(&self, g: u32, v: &[u64]) -> Vec<u64> {
        self.action[g as usize].mul_vec(v).expect("rank")
    }

    pub fn is_trivial(&self) -> bool {
        let id = DenseMat::identity(self.rank, self.modulus);
        self.action.iter().all(|a| *a == id)
    }

    /// The same action restricted along an inclusion H → G.
    pub fn restrict(&self, embedding: &[u32]) -> GModule {
        GModule {
            modulus: self.modulus,
            p: self.p,
            k: self.k,
            rank: self.rank,
            action: embedding.iter().map(|&g| self.action[g as usize].clone()).collect(),
        }
    }
}

/// A 1-cocycle, stored by its value on every group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle1 {
    pub values: Vec<Vec<u64>>,
}

impl Cocycle1 {
    /// Validates f(gh) = f(g) + g·f(h) on all pairs.
    pub fn new(g: &FiniteGroup, m: &GModule, values: Vec<Vec<u64>>) -> Result<Self> {
        if !is_1cocycle(g, m, &values) {
            return Err(CohomError::NotCocycle("1-cocycle identity fails".into()));
        }
        Ok(Cocycle1 { values })
    }

    pub fn value(&self, g: u32) -> &[u64] {
        &self.values[g as usize]
    }
}

fn vadd(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| add_mod(x, y, m)).collect()
}

fn vsub(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| sub_mod(x, y, m)).collect()
}

pub fn is_1cocycle(g: &FiniteGroup, m: &GModule, f: &[Vec<u64>]) -> bool {
    if f.len() != g.order() || f.iter().any(|v| v.len() != m.rank()) {
        return false;
    }
    let q = m.modulus();
    (0..g.order() as u32).all(|x| {
        (0..g.order() as u32).all(|y| f[g.mul(x, y) as usize] == vadd(&f[x as usize], &m.apply(x, &f[y as usize]), q))
    })
}

/// (δf)(g, h) = g·f(h) − f(gh) + f(g), indexed g·|G| + h.
pub fn coboundary1(g: &FiniteGroup, m: &GModule, f: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = g.order() as u32;
    let q = m.modulus();
    let mut out = Vec::with_capacity((n * n) as usize);
    for x in 0..n {
        for y in 0..n {
            let t = vsub(&m.apply(x, &f[y as usize]), &f[g.mul(x, y) as usize], q);
            out.push(vadd(&t, &f[x as usize], q));
        }
    }
    out
}

/// (δc)(g, h, k) = g·c(h,k) − c(gh,k) + c(g,hk) − c(g,h), indexed (g·|G| + h)·|G| + k.
pub fn coboundary2(g: &FiniteGroup, m: &GModule, c: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = g.order();
    let q = m.modulus();
    let at = |a: u32, b: u32| &c[a as usize * n + b as usize];
    let mut out = Vec::with_capacity(n * n * n);
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            for z in 0..n as u32 {
                let mut v = m.apply(x, at(y, z));
                v = vsub(&v, at(g.mul(x, y), z), q);
                v = vadd(&v, at(x, g.mul(y, z)), q);
                v = vsub(&v, at(x, y), q);
                out.push(v);
            }
        }
    }
    out
}

pub fn is_2cocycle(g: &FiniteGroup, m: &GModule, c: &[Vec<u64>]) -> bool {
    let n = g.order();
    if c.len() != n * n || c.iter().any(|v| v.len() != m.rank()) {
        return false;
    }
    let q = m.modulus();
    let at = |a: u32, b: u32| &c[a as usize * n + b as usize];
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            for z in 0..n as u32 {
                let lhs = vadd(&m.apply(x, at(y, z)), at(x, g.mul(y, z)), q);
                let rhs = vadd(at(g.mul(x, y), z), at(x, y), q);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// A bilinear pairing M ⊗ M' → M'': x ⊗ y ↦ Σ_i x_i · mats[i] · y.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub mats: Vec<DenseMat>,
}

impl Pairing {
    /// Multiplication Z/m ⊗ Z/m → Z/m.
    pub fn scalar(modulus: u64) -> Self {
        Pairing {
            mats: vec![DenseMat::identity(1, modulus)],
        }
    }

    pub fn apply(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let m = self.mats[0].modulus();
        let mut out = vec![0u64; self.mats[0].rows()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let v = self.mats[i].mul_vec(y).expect("pairing shape");
            for (o, w) in out.iter_mut().zip(v) {
                *o = add_mod(*o, mul_mod(xi, w, m), m);
            }
        }
        out
    }
}

/// (a ∪ a')(σ, τ) = ⟨a(σ), σ·a'(τ)⟩, indexed σ·|G| + τ.
pub fn cup11(
    g: &FiniteGroup,
    a: &[Vec<u64>],
    right: &GModule,
    a2: &[Vec<u64>],
    pairing: &Pairing,
) -> Result<Vec<Vec<u64>>> {
    let n = g.order();
    if a.len() != n || a2.len() != n {
        return Err(CohomError::Inconsistent("cochain length".into()));
    }
    if pairing.mats.len() != a.first().map_or(0, |v| v.len())
        || pairing.mats.iter().any(|p| p.cols() != right.rank() || p.modulus() != right.modulus())
    {
        return Err(CohomError::Inconsistent("incompatible pairing".into()));
    }
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n as u32 {
        for t in 0..n as u32 {
            out.push(pairing.apply(&a[s as usize], &right.apply(s, &a2[t as usize])));
        }
    }
    Ok(out)
}

/// Affine linear forms over the generator values, evaluated along the spanning tree.
///
/// Unknowns are x_s ∈ M for each distinguished generator s (block s of length rank).
/// F_1 = f1 and F_{hs} = F_h + h·x_s + t(h, s). The constraints F_{xs} = F_x + x·x_s + t(x, s)
/// for the non-tree edges (x, s) make F a function with F(xs) = F(x) + x·x_s + t(x, s) everywhere.
#[derive(Clone, Debug)]
pub(crate) struct AffineSystem {
    pub rank: usize,
    pub unknowns: usize,
    /// per element, rank × (unknowns + 1) with the constant in the last column
    pub forms: Vec<DenseMat>,
    pub span: RowSpanPk,
    pub p: u64,
    pub k: u32,
}

impl AffineSystem {
    pub fn build(
        g: &FiniteGroup,
        m: &GModule,
        f1: &[u64],
        t: impl Fn(u32, usize) -> Vec<u64>,
    ) -> Result<Self> {
        let r = m.rank();
        let q = m.modulus();
        let ns = g.generators().len();
        let unknowns = ns * r;
        let cols = unknowns + 1;
        let mut forms: Vec<Option<DenseMat>> = vec![None; g.order()];
        let mut f = DenseMat::zeros(r, cols, q);
        for i in 0..r {
            f.set(i, unknowns, f1[i]);
        }
        forms[g.identity() as usize] = Some(f);
        let step = |fh: &DenseMat, h: u32, s: usize| -> DenseMat {
            let mut out = fh.clone();
            let a = m.act(h);
            let ts = t(h, s);
            for i in 0..r {
                for j in 0..r {
                    let c = s * r + j;
                    out.set(i, c, add_mod(out.get(i, c), a.get(i, j), q));
                }
                out.set(i, unknowns, add_mod(out.get(i, unknowns), ts[i], q));
            }
            out
        };
        for &x in &g.bfs_order()[1..] {
            let (h, s) = g.tree_edge(x).expect("tree");
            let fx = step(forms[h as usize].as_ref().unwrap(), h, s);
            forms[x as usize] = Some(fx);
        }
        let forms: Vec<DenseMat> = forms.into_iter().map(|f| f.unwrap()).collect();
        let (p, k) = (m.prime(), m.exponent());
        let mut span = RowSpanPk::new(cols, p, k)?;
        for x in 0..g.order() as u32 {
            for (s, &gs) in g.generators().iter().enumerate() {
                let y = g.mul(x, gs);
                if g.tree_edge(y) == Some((x, s)) {
                    continue;
                }
                let lhs = &forms[y as usize];
                let rhs = step(&forms[x as usize], x, s);
                for i in 0..r {
                    let row: Vec<u64> = (0..cols).map(|c| sub_mod(lhs.get(i, c), rhs.get(i, c), q)).collect();
                    if row.iter().any(|&v| v != 0) {
                        span.insert(&row)?;
                    }
                }
            }
        }
        Ok(AffineSystem {
            rank: r,
            unknowns,
            forms,
            span,
            p,
            k,
        })
    }

    /// Solutions x of the constraints: a particular solution and homogeneous generators.
    pub fn solve(&self) -> Result<Option<PkSolution>> {
        let q = self.span.modulus();
        let rows = self.span.rows();
        if rows.is_empty() {
            return Ok(Some(PkSolution {
                particular: vec![0; self.unknowns],
                kernel_generators: (0..self.unknowns)
                    .map(|i| (0..self.unknowns).map(|j| (i == j) as u64).collect())
                    .collect(),
            }));
        }
        let a = DenseMat::from_fn(rows.len(), self.unknowns, q, |i, j| rows[i][j]);
        let b: Vec<u64> = rows.iter().map(|r| (q - r[self.unknowns]) % q).collect();
        Ok(solve_pk(&a, &b, self.p, self.k)?)
    }

    /// Value at g for generator values x.
    pub fn eval(&self, g: u32, x: &[u64]) -> Vec<u64> {
        let f = &self.forms[g as usize];
        let q = f.modulus();
        (0..self.rank)
            .map(|i| {
                let mut v = f.get(i, self.unknowns);
                for (c, &xc) in x.iter().enumerate() {
                    v = add_mod(v, mul_mod(f.get(i, c), xc, q), q);
                }
                v
            })
            .collect()
    }

    /// The linear part at g (rank × unknowns).
    pub fn linear(&self, g: u32) -> DenseMat {
        let f = &self.forms[g as usize];
        DenseMat::from_fn(self.rank, self.unknowns, f.modulus(), |i, j| f.get(i, j))
    }
}

/// Solve δf = c for a 2-cocycle c; `None` if the class is non-trivial.
pub fn coboundary2_test(g: &FiniteGroup, m: &GModule, c: &[Vec<u64>]) -> Result<Option<Vec<Vec<u64>>>> {
    if !is_2cocycle(g, m, c) {
        return Err(CohomError::NotCocycle("2-cocycle identity fails".into()));
    }
    let n = g.order();
    let q = m.modulus();
    let gens = g.generators().to_vec();
    // δf = c  ⇔  f(hs) = f(h) + h·f(s) − c(h, s), with f(1) = c(1, 1)
    let one = g.identity();
    let sys = AffineSystem::build(g, m, &c[one as usize * n + one as usize], |h, s| {
        c[h as usize * n + gens[s] as usize].iter().map(|&v| (q - v) % q).collect()
    })?;
    let Some(sol) = sys.solve()? else {
        return Ok(None);
    };
    let f: Vec<Vec<u64>> = (0..n as u32).map(|x| sys.eval(x, &sol.particular)).collect();
    // the unknowns are the values on the generators, which the tree must reproduce
    for (si, &s) in gens.iter().enumerate() {
        if f[s as usize][..] != sol.particular[si * m.rank()..(si + 1) * m.rank()] {
            return Err(CohomError::Inconsistent("generator values not reproduced".into()));
        }
    }
    debug_assert_eq!(coboundary1(g, m, &f), c);
    Ok(Some(f))
}
