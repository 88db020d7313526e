//! Defining systems for n-fold Massey products and their correspondence with
//! homomorphisms Γ → U/Z (classical coefficients F_p) or Γ → T(W)/Z(W)
//! (cyclic coefficients N_i = Z/m with a diagonal action).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cohom::{
    coboundary2_test, cup11, h2_bar, solve_embedding_to, CohomError, EmbeddingOutcome, FiniteGroup, GModule, H1Basis,
    KernelSpec, Level, Pairing, SolverOptions,
};
use crate::modarith::{add_mod, inv_mod, is_prime, mul_mod, neg_mod, prime_power, sub_mod, ArithError, DenseMat};
use crate::unigroup::{TriW, UniError, UniTri};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MasseyError {
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("not a homomorphism: {0}")]
    NotHom(String),
    #[error("does not lift α: {0}")]
    NotLift(String),
    #[error("defining-system condition fails at (i, j) = ({i}, {j}), σ = {sigma}, τ = {tau}")]
    Condition { i: usize, j: usize, sigma: u32, tau: u32 },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Cohom(#[from] CohomError),
    #[error(transparent)]
    Uni(#[from] UniError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl MasseyError {
    pub fn is_budget(&self) -> bool {
        matches!(self, MasseyError::Budget(_) | MasseyError::Cohom(CohomError::Budget(_)))
    }
}

pub type Result<T> = std::result::Result<T, MasseyError>;

/// Γ, n, the coefficients and the characters α_0, …, α_{n−1}.
#[derive(Clone, Debug)]
pub struct MasseyProblem {
    gamma: FiniteGroup,
    n: usize,
    m: u32,
    classical: bool,
    /// χ_i(σ) ∈ (Z/m)*, i = 0..=n
    chars: Vec<Vec<u32>>,
    /// α_i(σ) ∈ M_{i,i+1}
    alpha: Vec<Vec<u64>>,
}

impl MasseyProblem {
    /// Classical case: α_i: Γ → F_p homomorphisms, given on Γ's generators.
    pub fn classical(gamma: &FiniteGroup, n: usize, p: u32, alpha_gens: &[Vec<u64>]) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(MasseyError::Invalid(format!("p = {p} is not prime")));
        }
        let chars = vec![vec![1; gamma.generators().len()]; n + 1];
        Self::build(gamma, n, p, true, &chars, alpha_gens)
    }

    /// Cyclic coefficients N_i = Z/m with Γ acting on N_i through χ_i (given on generators);
    /// α_i is a 1-cocycle into M_{i,i+1} = Hom(N_{i+1}, N_i), given on generators.
    pub fn generalized(
        gamma: &FiniteGroup,
        n: usize,
        m: u32,
        chars_gens: &[Vec<u32>],
        alpha_gens: &[Vec<u64>],
    ) -> Result<Self> {
        if m < 2 || prime_power(m as u64).is_none() {
            return Err(MasseyError::Invalid(format!("modulus {m} is not a prime power")));
        }
        Self::build(gamma, n, m, false, chars_gens, alpha_gens)
    }

    fn build(
        gamma: &FiniteGroup,
        n: usize,
        m: u32,
        classical: bool,
        chars_gens: &[Vec<u32>],
        alpha_gens: &[Vec<u64>],
    ) -> Result<Self> {
        if n < 2 {
            return Err(MasseyError::Invalid("n ≥ 2 required".into()));
        }
        let ng = gamma.generators().len();
        if chars_gens.len() != n + 1 || chars_gens.iter().any(|c| c.len() != ng) {
            return Err(MasseyError::Invalid(format!("need n + 1 = {} characters with {ng} generator values", n + 1)));
        }
        if alpha_gens.len() != n || alpha_gens.iter().any(|a| a.len() != ng) {
            return Err(MasseyError::Invalid(format!("need n = {n} cocycles with {ng} generator values")));
        }
        let mm = m as u64;
        let mut chars = Vec::with_capacity(n + 1);
        for (i, c) in chars_gens.iter().enumerate() {
            let c: Vec<u32> = c.iter().map(|&x| x % m).collect();
            if c.iter().any(|&x| inv_mod(x as u64, mm).is_none()) {
                return Err(MasseyError::Invalid(format!("χ_{i} takes a non-unit value")));
            }
            let full = gamma
                .extend_hom(&c, &(1 % m), |&a, &b| (a as u64 * b as u64 % mm) as u32)
                .ok_or_else(|| MasseyError::NotHom(format!("χ_{i} is not a homomorphism")))?;
            chars.push(full);
        }
        let mut pr = MasseyProblem {
            gamma: gamma.clone(),
            n,
            m,
            classical,
            chars,
            alpha: Vec::new(),
        };
        for (i, a) in alpha_gens.iter().enumerate() {
            let vals: Vec<u64> = a.iter().map(|&x| x % mm).collect();
            let full = extend_cocycle(gamma, |s| pr.act(i, i + 1, s), &vals, mm).ok_or_else(|| {
                MasseyError::NotHom(format!("α_{i} is not a 1-cocycle (a homomorphism for trivial action)"))
            })?;
            pr.alpha.push(full);
        }
        Ok(pr)
    }

    pub fn gamma(&self) -> &FiniteGroup {
        &self.gamma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.m
    }

    pub fn is_classical(&self) -> bool {
        self.classical
    }

    /// χ_i on all elements.
    pub fn character(&self, i: usize) -> &[u32] {
        &self.chars[i]
    }

    /// α_i on all elements.
    pub fn alpha(&self, i: usize) -> &[u64] {
        &self.alpha[i]
    }

    /// σ acts on M_{i,j} by multiplication with χ_i(σ)χ_j(σ)^{-1}.
    pub fn act(&self, i: usize, j: usize, s: u32) -> u64 {
        let m = self.m as u64;
        let cj = inv_mod(self.chars[j][s as usize] as u64, m).expect("unit");
        mul_mod(self.chars[i][s as usize] as u64, cj, m)
    }

    /// M_{i,j} as a rank-one Γ-module.
    pub fn module(&self, i: usize, j: usize) -> Result<GModule> {
        let m = self.m as u64;
        let action = (0..self.gamma.order() as u32)
            .map(|s| DenseMat::from_cols(&[vec![self.act(i, j, s)]], 1, m))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GModule::from_action(&self.gamma, m, action)?)
    }

    /// Images of Γ's generators in A = T/U¹ (diagonal χ, first off-diagonal α_i(s)χ_{i+1}(s)).
    pub fn a_images(&self) -> Vec<TriW> {
        let m = self.m as u64;
        self.gamma
            .generators()
            .iter()
            .map(|&s| {
                let diag: Vec<u32> = (0..=self.n).map(|i| self.chars[i][s as usize]).collect();
                let mut x = TriW::diagonal(self.n, self.m, diag).expect("units");
                for i in 0..self.n {
                    let v = mul_mod(self.alpha[i][s as usize], self.chars[i + 1][s as usize] as u64, m);
                    x.set(i, i + 1, v as u32);
                }
                x
            })
            .collect()
    }

    /// Classical case: the images of Γ's generators in U/U¹.
    pub fn a_images_uni(&self) -> Result<Vec<UniTri>> {
        self.a_images()
            .iter()
            .map(|x| x.to_unitri().ok_or_else(|| MasseyError::Invalid("non-trivial diagonal action".into())))
            .collect()
    }

    /// Positions (i, j) of a defining system: 0 ≤ i < j ≤ n, (i, j) ≠ (0, n), by distance then i.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (1..=n)
            .flat_map(|d| (0..=n - d).map(move |i| (i, i + d)))
            .filter(|&p| p != (0, n))
            .collect()
    }
}

/// Extend generator values of a 1-cocycle into a rank-one module along the spanning tree
/// and check the cocycle identity on all (x, s).
fn extend_cocycle(gamma: &FiniteGroup, act: impl Fn(u32) -> u64, gen_vals: &[u64], m: u64) -> Option<Vec<u64>> {
    let n = gamma.order();
    let gens = gamma.generators();
    let mut f = vec![0u64; n];
    for &g in gamma.bfs_order() {
        if let Some((parent, idx)) = gamma.tree_edge(g) {
            f[g as usize] = add_mod(f[parent as usize], mul_mod(act(parent), gen_vals[idx], m), m);
        }
    }
    if f[gamma.identity() as usize] != 0 {
        return None;
    }
    for (si, &s) in gens.iter().enumerate() {
        if f[s as usize] != gen_vals[si] {
            return None;
        }
    }
    for x in 0..n as u32 {
        for &s in gens {
            let want = add_mod(f[x as usize], mul_mod(act(x), f[s as usize], m), m);
            if f[gamma.mul(x, s) as usize] != want {
                return None;
            }
        }
    }
    Some(f)
}

/// The cochains a_{i,j}, 0 ≤ i < j ≤ n, (i, j) ≠ (0, n), as values on all elements of Γ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DefiningSystem {
    pub n: usize,
    pub modulus: u32,
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<Vec<u64>>,
}

impl DefiningSystem {
    pub fn get(&self, i: usize, j: usize) -> &[u64] {
        let k = self.pairs.iter().position(|&p| p == (i, j)).expect("stored pair");
        &self.values[k]
    }

    fn from_fn(problem: &MasseyProblem, mut f: impl FnMut(usize, usize) -> Vec<u64>) -> Self {
        let pairs = problem.pairs();
        let values = pairs.iter().map(|&(i, j)| f(i, j)).collect();
        DefiningSystem {
            n: problem.n,
            modulus: problem.m,
            pairs,
            values,
        }
    }

    /// Check shape, a_{i,i+1} = α_i, and ∂a_{i,j} = −∑ a_{i,k} ∪ a_{k,j}.
    pub fn validate(&self, problem: &MasseyProblem) -> Result<()> {
        let n = problem.n;
        let m = problem.m as u64;
        let g = &problem.gamma;
        let order = g.order();
        if self.n != n || self.modulus != problem.m || self.pairs != problem.pairs() {
            return Err(MasseyError::Invalid("defining system has the wrong shape".into()));
        }
        if self.values.iter().any(|v| v.len() != order || v.iter().any(|&x| x >= m)) {
            return Err(MasseyError::Invalid("cochain values out of range".into()));
        }
        for i in 0..n {
            if self.get(i, i + 1) != problem.alpha(i) {
                return Err(MasseyError::NotLift(format!("a_{{{i},{}}} differs from α_{i}", i + 1)));
            }
        }
        for &(i, j) in &self.pairs {
            if j - i < 2 {
                continue;
            }
            let a = self.get(i, j);
            for s in 0..order as u32 {
                let aij = problem.act(i, j, s);
                for t in 0..order as u32 {
                    let st = g.mul(s, t);
                    let lhs = add_mod(sub_mod(mul_mod(aij, a[t as usize], m), a[st as usize], m), a[s as usize], m);
                    let mut rhs = 0u64;
                    for k in i + 1..j {
                        let c = mul_mod(
                            self.get(i, k)[s as usize],
                            mul_mod(problem.act(k, j, s), self.get(k, j)[t as usize], m),
                            m,
                        );
                        rhs = add_mod(rhs, c, m);
                    }
                    if lhs != neg_mod(rhs, m) {
                        return Err(MasseyError::Condition { i, j, sigma: s, tau: t });
                    }
                }
            }
        }
        Ok(())
    }
}

fn nf_center(x: &TriW) -> TriW {
    let mut y = x.clone();
    y.set(0, x.n(), 0);
    y
}

/// Drop the entries at distance > d.
fn truncate(x: &TriW, d: usize) -> TriW {
    let n = x.n();
    let mut y = x.clone();
    for i in 0..=n {
        for j in i + d + 1..=n {
            y.set(i, j, 0);
        }
    }
    y
}

fn check_images(problem: &MasseyProblem, images: &[TriW]) -> Result<()> {
    if images.len() != problem.gamma.generators().len() {
        return Err(MasseyError::Invalid("one image per generator of Γ is required".into()));
    }
    for x in images {
        if x.n() != problem.n || x.modulus() != problem.m {
            return Err(MasseyError::Invalid("image has the wrong shape".into()));
        }
        if x.entry(0, problem.n) != 0 {
            return Err(MasseyError::Invalid("image is not in normal form for T/Z (entry (0, n) must be 0)".into()));
        }
    }
    Ok(())
}

/// Check that a hom (on all elements) lifts α: diagonal χ and first off-diagonal α_i·χ_{i+1}.
fn check_lifts(problem: &MasseyProblem, entry: impl Fn(u32, usize, usize) -> u32) -> Result<()> {
    let m = problem.m as u64;
    for s in 0..problem.gamma.order() as u32 {
        for i in 0..=problem.n {
            if entry(s, i, i) != problem.chars[i][s as usize] {
                return Err(MasseyError::NotLift(format!("diagonal entry {i} at σ = {s} is not χ_{i}(σ)")));
            }
        }
        for i in 0..problem.n {
            let want = mul_mod(problem.alpha[i][s as usize], problem.chars[i + 1][s as usize] as u64, m);
            if entry(s, i, i + 1) as u64 != want {
                return Err(MasseyError::NotLift(format!("entry ({i}, {}) at σ = {s} does not match α_{i}", i + 1)));
            }
        }
    }
    Ok(())
}

/// Classical reading: a_{i,j}(σ) is the (i, j) entry of the coset matrix of α_Λ(σ) in U/Z.
pub fn hom_to_defining_system_uni(problem: &MasseyProblem, images: &[UniTri]) -> Result<DefiningSystem> {
    if !problem.classical {
        return Err(MasseyError::Invalid("classical reading needs a classical problem".into()));
    }
    let tw: Vec<TriW> = images.iter().map(TriW::from_unitri).collect();
    check_images(problem, &tw)?;
    let (n, p) = (problem.n, problem.m);
    let full = problem
        .gamma
        .extend_hom(images, &UniTri::identity(n, p), |a, b| Level::ModCenter.mul(a, b))
        .ok_or_else(|| MasseyError::NotHom("images do not define a homomorphism Γ → U/Z".into()))?;
    check_lifts(problem, |s, i, j| full[s as usize].entry(i, j))?;
    let ds = DefiningSystem::from_fn(problem, |i, j| full.iter().map(|x| x.get(i, j) as u64).collect());
    ds.validate(problem)
        .map_err(|e| MasseyError::Inconsistent(format!("extracted system invalid: {e}")))?;
    Ok(ds)
}

/// The defining system of a homomorphism α_Λ: Γ → U/Z or T(W)/Z(W), given on Γ's generators.
///
/// Generalized coefficients use a_{i,j}(σ) = α_{i,j}(σ)·α_{j,j}(σ^{−1}).
pub fn hom_to_defining_system(problem: &MasseyProblem, images: &[TriW]) -> Result<DefiningSystem> {
    check_images(problem, images)?;
    if problem.classical {
        let uni = images
            .iter()
            .map(|x| x.to_unitri().ok_or_else(|| MasseyError::NotLift("diagonal must be trivial".into())))
            .collect::<Result<Vec<_>>>()?;
        return hom_to_defining_system_uni(problem, &uni);
    }
    let (n, m) = (problem.n, problem.m);
    let g = &problem.gamma;
    let full = g
        .extend_hom(images, &TriW::identity(n, m), |a, b| nf_center(&a.mul(b)))
        .ok_or_else(|| MasseyError::NotHom("images do not define a homomorphism Γ → T(W)/Z(W)".into()))?;
    check_lifts(problem, |s, i, j| full[s as usize].entry(i, j))?;
    let mm = m as u64;
    let ds = DefiningSystem::from_fn(problem, |i, j| {
        (0..g.order() as u32)
            .map(|s| {
                let sinv = g.inv(s);
                mul_mod(full[s as usize].entry(i, j) as u64, full[sinv as usize].diag()[j] as u64, mm)
            })
            .collect()
    });
    ds.validate(problem)
        .map_err(|e| MasseyError::Inconsistent(format!("extracted system invalid: {e}")))?;
    Ok(ds)
}

/// The homomorphism of a valid defining system, on all elements of Γ (normal form: entry (0, n) = 0).
pub fn defining_system_to_hom(problem: &MasseyProblem, ds: &DefiningSystem) -> Result<Vec<TriW>> {
    ds.validate(problem)?;
    let (n, m) = (problem.n, problem.m);
    let g = &problem.gamma;
    let order = g.order();
    if problem.classical {
        let mats: Vec<UniTri> = (0..order)
            .map(|s| {
                let mut x = UniTri::identity(n, m);
                for (&(i, j), v) in ds.pairs.iter().zip(&ds.values) {
                    x.set(i, j, v[s] as u32);
                }
                x
            })
            .collect();
        for s in 0..order as u32 {
            for t in 0..order as u32 {
                if Level::ModCenter.mul(&mats[s as usize], &mats[t as usize]) != mats[g.mul(s, t) as usize] {
                    return Err(MasseyError::Inconsistent(format!("matrix map fails at σ = {s}, τ = {t}")));
                }
            }
        }
        return Ok(mats.iter().map(TriW::from_unitri).collect());
    }
    let mm = m as u64;
    let mats: Vec<TriW> = (0..order)
        .map(|s| {
            let diag: Vec<u32> = (0..=n).map(|i| problem.chars[i][s]).collect();
            let mut x = TriW::diagonal(n, m, diag).expect("units");
            for (&(i, j), v) in ds.pairs.iter().zip(&ds.values) {
                x.set(i, j, mul_mod(v[s], problem.chars[j][s] as u64, mm) as u32);
            }
            x
        })
        .collect();
    for s in 0..order as u32 {
        for t in 0..order as u32 {
            if nf_center(&mats[s as usize].mul(&mats[t as usize])) != mats[g.mul(s, t) as usize] {
                return Err(MasseyError::Inconsistent(format!("matrix map fails at σ = {s}, τ = {t}")));
            }
        }
    }
    Ok(mats)
}

/// Generator images of a homomorphism given on all elements.
pub fn on_generators(gamma: &FiniteGroup, full: &[TriW]) -> Vec<TriW> {
    gamma.generators().iter().map(|&s| full[s as usize].clone()).collect()
}

/// ⟨α_0, …, α_{n−1}⟩_Λ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MasseyValue {
    /// b_{0,n} = −∑ a_{0,k} ∪ a_{k,n}, indexed σ·|Γ| + τ
    pub cocycle: Vec<u64>,
    /// −α̃(σ)α̃(τ)α̃(στ)^{−1} for the lift α̃ with zero (0, n) entry
    pub from_extension: Vec<u64>,
    pub trivial: bool,
    /// f with ∂f = b_{0,n}, when the class is trivial
    pub trivializer: Option<Vec<u64>>,
}

fn to_vecs(c: &[u64]) -> Vec<Vec<u64>> {
    c.iter().map(|&x| vec![x]).collect()
}

pub fn massey_value(problem: &MasseyProblem, ds: &DefiningSystem) -> Result<MasseyValue> {
    ds.validate(problem)?;
    let (n, m) = (problem.n, problem.m as u64);
    let g = &problem.gamma;
    let order = g.order();
    let pairing = Pairing::scalar(m);
    // cup-sum route
    let mut b = vec![0u64; order * order];
    for k in 1..n {
        let right = problem.module(k, n)?;
        let c = cup11(g, &to_vecs(ds.get(0, k)), &right, &to_vecs(ds.get(k, n)), &pairing)?;
        for (x, y) in b.iter_mut().zip(&c) {
            *x = sub_mod(*x, y[0], m);
        }
    }
    // extension route
    let hom = defining_system_to_hom(problem, ds)?;
    let mut ext = Vec::with_capacity(order * order);
    for s in 0..order as u32 {
        for t in 0..order as u32 {
            let st = g.mul(s, t) as usize;
            let (x, s_ok) = if problem.classical {
                let u: Vec<UniTri> = [s as usize, t as usize, st].iter().map(|&i| hom[i].to_unitri().unwrap()).collect();
                let x = u[0].mul(&u[1]).mul(&u[2].inv());
                let mut rest = x.clone();
                rest.set(0, n, 0);
                (x.get(0, n), rest.is_identity())
            } else {
                let x = hom[s as usize].mul(&hom[t as usize]).mul(&hom[st].inv());
                let mut rest = x.clone();
                rest.set(0, n, 0);
                (x.entry(0, n), rest == TriW::identity(n, problem.m))
            };
            if !s_ok {
                return Err(MasseyError::Inconsistent(format!(
                    "α̃(σ)α̃(τ)α̃(στ)⁻¹ not central at σ = {s}, τ = {t}"
                )));
            }
            ext.push(neg_mod(x as u64, m));
        }
    }
    let module = problem.module(0, n)?;
    let diff: Vec<u64> = b.iter().zip(&ext).map(|(&x, &y)| sub_mod(x, y, m)).collect();
    if coboundary2_test(g, &module, &to_vecs(&diff))?.is_none() {
        return Err(MasseyError::Inconsistent("cup-sum and extension values differ by a non-trivial class".into()));
    }
    let triv = coboundary2_test(g, &module, &to_vecs(&b))?;
    Ok(MasseyValue {
        cocycle: b,
        from_extension: ext,
        trivial: triv.is_some(),
        trivializer: triv.map(|f| f.into_iter().map(|v| v[0]).collect()),
    })
}

#[derive(Clone, Debug)]
pub struct MasseyOptions {
    /// Cap on generator-image candidates tried by the enumeration.
    pub max_candidates: u64,
    /// Cap on defining systems enumerated level by level.
    pub max_systems: u64,
    pub solver: SolverOptions,
}

impl Default for MasseyOptions {
    fn default() -> Self {
        MasseyOptions {
            max_candidates: 1 << 22,
            max_systems: 1 << 20,
            solver: SolverOptions::default(),
        }
    }
}

/// All homomorphisms Γ → T/Z lifting α, as generator images, found distance by distance.
/// Returns the list and the number of candidates tried.
pub fn enumerate_homs(problem: &MasseyProblem, max_candidates: u64) -> Result<(Vec<Vec<TriW>>, u64)> {
    let base = problem.a_images();
    let mut out = Vec::new();
    let mut tried = 1u64;
    if !is_hom_at(problem, &base, 1) {
        return Err(MasseyError::Inconsistent("α does not define a homomorphism to A".into()));
    }
    enum_level(problem, 2, base, &mut out, &mut tried, max_candidates)?;
    Ok((out, tried))
}

fn is_hom_at(problem: &MasseyProblem, imgs: &[TriW], d: usize) -> bool {
    problem
        .gamma
        .extend_hom(imgs, &TriW::identity(problem.n, problem.m), |a, b| truncate(&a.mul(b), d))
        .is_some()
}

fn enum_level(
    problem: &MasseyProblem,
    d: usize,
    imgs: Vec<TriW>,
    out: &mut Vec<Vec<TriW>>,
    tried: &mut u64,
    max: u64,
) -> Result<()> {
    let n = problem.n;
    if d >= n {
        out.push(imgs);
        return Ok(());
    }
    let pos: Vec<(usize, usize)> = (0..=n - d).map(|i| (i, i + d)).collect();
    let slots = pos.len() * imgs.len();
    let m = problem.m as u64;
    let count = m
        .checked_pow(slots as u32)
        .filter(|&c| tried.saturating_add(c) <= max)
        .ok_or_else(|| MasseyError::Budget(format!("hom enumeration exceeds {max} candidates")))?;
    for idx in 0..count {
        let mut next = imgs.clone();
        let mut r = idx;
        for x in next.iter_mut() {
            for &(i, j) in &pos {
                x.set(i, j, (r % m) as u32);
                r /= m;
            }
        }
        *tried += 1;
        if is_hom_at(problem, &next, d) {
            enum_level(problem, d + 1, next, out, tried, max)?;
        }
    }
    Ok(())
}

/// All defining systems, built distance by distance: at (i, j) the solutions of
/// ∂a = −∑ a_{i,k} ∪ a_{k,j} form a coset of Z¹(Γ, M_{i,j}) or are empty.
pub fn enumerate_defining_systems(problem: &MasseyProblem, max_systems: u64) -> Result<Vec<DefiningSystem>> {
    let pairs = problem.pairs();
    let mut cocycles: HashMap<(usize, usize), Vec<Vec<u64>>> = HashMap::new();
    for &(i, j) in &pairs {
        if j - i >= 2 {
            let h = H1Basis::new(&problem.gamma, &problem.module(i, j)?)?;
            let all = h.all_cocycles()?;
            cocycles.insert((i, j), all.iter().map(|c| c.values.iter().map(|v| v[0]).collect()).collect());
        }
    }
    let mut cur: HashMap<(usize, usize), Vec<u64>> = HashMap::new();
    for i in 0..problem.n {
        cur.insert((i, i + 1), problem.alpha(i).to_vec());
    }
    let mut out = Vec::new();
    let first = problem.n; // pairs at distance 1 come first
    ds_rec(problem, &pairs, first, &cocycles, &mut cur, &mut out, max_systems)?;
    Ok(out)
}

fn ds_rec(
    problem: &MasseyProblem,
    pairs: &[(usize, usize)],
    idx: usize,
    cocycles: &HashMap<(usize, usize), Vec<Vec<u64>>>,
    cur: &mut HashMap<(usize, usize), Vec<u64>>,
    out: &mut Vec<DefiningSystem>,
    max: u64,
) -> Result<()> {
    if idx == pairs.len() {
        if out.len() as u64 >= max {
            return Err(MasseyError::Budget(format!("more than {max} defining systems")));
        }
        out.push(DefiningSystem::from_fn(problem, |i, j| cur[&(i, j)].clone()));
        return Ok(());
    }
    let (i, j) = pairs[idx];
    let g = &problem.gamma;
    let order = g.order();
    let m = problem.m as u64;
    let mut c = Vec::with_capacity(order * order);
    for s in 0..order {
        for t in 0..order {
            let mut acc = 0u64;
            for k in i + 1..j {
                let v = mul_mod(cur[&(i, k)][s], mul_mod(problem.act(k, j, s as u32), cur[&(k, j)][t], m), m);
                acc = add_mod(acc, v, m);
            }
            c.push(vec![neg_mod(acc, m)]);
        }
    }
    let Some(f0) = coboundary2_test(g, &problem.module(i, j)?, &c)? else {
        return Ok(());
    };
    for z in &cocycles[&(i, j)] {
        let a: Vec<u64> = f0.iter().zip(z).map(|(x, &y)| add_mod(x[0], y, m)).collect();
        cur.insert((i, j), a);
        ds_rec(problem, pairs, idx + 1, cocycles, cur, out, max)?;
    }
    cur.remove(&(i, j));
    Ok(())
}

/// One homomorphism Γ → T/Z lifting α with the data of its Massey value.
#[derive(Clone, Debug, Serialize)]
pub struct LiftRecord {
    /// generator images, entry (0, n) = 0
    pub images: Vec<TriW>,
    /// class of the value in H²(Γ, M_{0,n})
    pub signature: Vec<u64>,
    pub value_trivial: bool,
    /// classical case: whether this lift extends to Γ → U (solver)
    pub lifts_to_u: Option<bool>,
    /// index of the U¹/Z-conjugacy bucket
    pub bucket: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MasseyProductSet {
    pub h2_invariants: Vec<u32>,
    /// sorted distinct class signatures
    pub classes: Vec<Vec<u64>>,
    pub contains_zero: bool,
    pub lifts: Vec<LiftRecord>,
    pub bucket_count: usize,
    pub candidates_tried: u64,
}

impl MasseyProductSet {
    pub fn raw_count(&self) -> usize {
        self.lifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifts.is_empty()
    }

    /// Whether every lift to U/Z has trivial value.
    pub fn all_lifts_vanish(&self) -> bool {
        self.lifts.iter().all(|l| l.value_trivial)
    }
}

/// The set of values ⟨α_0, …, α_{n−1}⟩ over all defining systems, with per-lift outcomes.
pub fn massey_product_set(problem: &MasseyProblem, opts: &MasseyOptions) -> Result<MasseyProductSet> {
    let (homs, tried) = enumerate_homs(problem, opts.max_candidates)?;
    let h2 = h2_bar(&problem.gamma, &problem.module(0, problem.n)?)?;
    let buckets = conjugacy_buckets(problem, &homs)?;
    let records = homs
        .par_iter()
        .zip(buckets.par_iter())
        .map(|(imgs, &bucket)| -> Result<LiftRecord> {
            let ds = hom_to_defining_system(problem, imgs)?;
            let v = massey_value(problem, &ds)?;
            let signature = h2.signature(&to_vecs(&v.cocycle))?;
            if signature.iter().all(|&x| x == 0) != v.trivial {
                return Err(MasseyError::Inconsistent("class signature disagrees with the coboundary test".into()));
            }
            let lifts_to_u = if problem.classical {
                let uni: Vec<UniTri> = imgs.iter().map(|x| x.to_unitri().unwrap()).collect();
                let (out, _) = solve_embedding_to(
                    &problem.gamma,
                    problem.n,
                    problem.m,
                    KernelSpec::Center,
                    Level::Full,
                    &uni,
                    &opts.solver,
                )?;
                Some(matches!(out, EmbeddingOutcome::Lift(_)))
            } else {
                None
            };
            Ok(LiftRecord {
                images: imgs.clone(),
                signature,
                value_trivial: v.trivial,
                lifts_to_u,
                bucket,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<Vec<u64>> = records.iter().map(|r| r.signature.clone()).collect();
    classes.sort();
    classes.dedup();
    let contains_zero = records.iter().any(|r| r.value_trivial);
    let bucket_count = buckets.iter().max().map_or(0, |&b| b + 1);
    Ok(MasseyProductSet {
        h2_invariants: h2.invariants().to_vec(),
        classes,
        contains_zero,
        lifts: records,
        bucket_count,
        candidates_tried: tried,
    })
}

/// Orbits of U¹/Z (resp. U¹(W)/Z(W)) acting by conjugation on a complete list of lifts.
fn conjugacy_buckets(problem: &MasseyProblem, homs: &[Vec<TriW>]) -> Result<Vec<usize>> {
    let n = problem.n;
    let index: HashMap<&Vec<TriW>, usize> = homs.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut parent: Vec<usize> = (0..homs.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j) in problem.pairs() {
        if j - i < 2 {
            continue;
        }
        let mut u = TriW::identity(n, problem.m);
        u.set(i, j, 1);
        let uinv = u.inv();
        for (k, h) in homs.iter().enumerate() {
            let c: Vec<TriW> = h.iter().map(|x| nf_center(&u.mul(x).mul(&uinv))).collect();
            let &l = index
                .get(&c)
                .ok_or_else(|| MasseyError::Inconsistent("conjugate lift missing from the enumeration".into()))?;
            let (a, b) = (find(&mut parent, k), find(&mut parent, l));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(homs.len());
    for k in 0..homs.len() {
        let r = find(&mut parent, k);
        let next = ids.len();
        out.push(*ids.entry(r).or_insert(next));
    }
    Ok(out)
}

/// Whether α lifts to U/Z (equivalently, the Massey product is defined).
pub fn is_defined(problem: &MasseyProblem, opts: &MasseyOptions) -> Result<bool> {
    if problem.classical {
        let (out, _) = solve_embedding_to(
            &problem.gamma,
            problem.n,
            problem.m,
            KernelSpec::U1,
            Level::ModCenter,
            &problem.a_images_uni()?,
            &opts.solver,
        )?;
        return Ok(matches!(out, EmbeddingOutcome::Lift(_)));
    }
    Ok(!enumerate_homs(problem, opts.max_candidates)?.0.is_empty())
}

/// Whether α lifts to U (equivalently, the Massey product contains 0).
pub fn vanishes(problem: &MasseyProblem, opts: &MasseyOptions) -> Result<bool> {
    let v = if problem.classical {
        let (out, _) = solve_embedding_to(
            &problem.gamma,
            problem.n,
            problem.m,
            KernelSpec::U1,
            Level::Full,
            &problem.a_images_uni()?,
            &opts.solver,
        )?;
        matches!(out, EmbeddingOutcome::Lift(_))
    } else {
        massey_product_set(problem, opts)?.contains_zero
    };
    if v && !is_defined(problem, opts)? {
        return Err(MasseyError::Inconsistent("vanishes but not defined".into()));
    }
    Ok(v)
}
