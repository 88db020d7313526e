//! Staged lifting Γ → U/K ⇝ Γ → U through abelian layers of K, with a brute-force oracle.

use serde::Serialize;

use crate::modarith::DenseMat;
use crate::unigroup::{num_entries, positions, UniTri};

use super::group::FiniteGroup;
use super::lift::stage_solve;
use super::module::GModule;
use super::{CohomError, Result};

/// Default cap on the number of stage nodes visited.
pub const DEFAULT_MAX_NODES: u64 = 1_000_000;

/// The normal subgroup K with U/K the starting quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KernelSpec {
    /// Z = ⟨e_{0,n}⟩
    Center,
    /// U^m (first m non-principal diagonals vanish)
    Lcs(usize),
    /// P^{r,s}
    Prs(usize, usize),
    /// U¹ = U^1
    U1,
}

/// A quotient of U represented by a normal form on matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Level {
    Full,
    ModCenter,
    /// U/U^j: entries at distance > j are dropped
    ModLcs(usize),
    /// U/P^{r,s}: coset representative with zeros on the support of P
    ModP(usize, usize),
}

impl Level {
    pub fn normal_form(&self, x: &UniTri) -> UniTri {
        let n = x.n();
        let m = x.modulus() as i64;
        match *self {
            Level::Full => x.clone(),
            Level::ModCenter => {
                let mut y = x.clone();
                y.set(0, n, 0);
                y
            }
            Level::ModLcs(j) => {
                let mut y = x.clone();
                for (a, b) in positions(n) {
                    if b - a > j {
                        y.set(a, b, 0);
                    }
                }
                y
            }
            Level::ModP(r, s) => {
                let mut y = x.clone();
                // right multiplication by e_{0,j}^c adds c to (0, j), since column 0 of y is e_0
                for j in n.saturating_sub(s)..n {
                    if j >= 1 {
                        y.set(0, j, 0);
                    }
                }
                // right multiplication by e_{k,n}^c adds c·(column k) to column n; descending k
                for k in (0..=r.min(n - 1)).rev() {
                    let c = y.entry(k, n) as i64;
                    if c != 0 {
                        let g = crate::unigroup::elem_gen(n, m as u32, k, n, -c).expect("valid index");
                        y = y.mul(&g);
                    }
                }
                y
            }
        }
    }

    /// Multiplication in the quotient.
    pub fn mul(&self, a: &UniTri, b: &UniTri) -> UniTri {
        self.normal_form(&a.mul(b))
    }
}

impl KernelSpec {
    fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            KernelSpec::Center | KernelSpec::U1 => n >= 1,
            KernelSpec::Lcs(m) => (1..=n).contains(&m),
            KernelSpec::Prs(r, s) => r < n && s < n,
        };
        if ok {
            Ok(())
        } else {
            Err(CohomError::Unsupported(format!("kernel {self:?} at n = {n}")))
        }
    }

    /// The chain of levels from U/K up to U.
    pub fn levels(&self, n: usize) -> Result<Vec<Level>> {
        self.validate(n)?;
        Ok(match *self {
            KernelSpec::Center => vec![Level::ModCenter, Level::Full],
            KernelSpec::U1 => chain_lcs(1, n),
            KernelSpec::Lcs(m) => chain_lcs(m, n),
            KernelSpec::Prs(r, s) => vec![Level::ModP(r, s), Level::ModCenter, Level::Full],
        })
    }
}

fn chain_lcs(m: usize, n: usize) -> Vec<Level> {
    let mut v: Vec<Level> = (m..n).map(Level::ModLcs).collect();
    v.push(Level::Full);
    v
}

/// Entries forming the abelian layer between consecutive levels.
fn layer_positions(n: usize, from: Level, to: Level) -> Result<Vec<(usize, usize)>> {
    let pos = positions(n);
    Ok(match (from, to) {
        (Level::ModLcs(j), Level::ModLcs(_)) | (Level::ModLcs(j), Level::Full) => {
            pos.into_iter().filter(|&(a, b)| b - a == j + 1).collect()
        }
        (Level::ModCenter, Level::Full) => vec![(0, n)],
        (Level::ModP(r, s), Level::ModCenter) => pos
            .into_iter()
            .filter(|&(a, b)| (a, b) != (0, n) && crate::unigroup::in_p_support(n, r, s, a, b))
            .collect(),
        _ => return Err(CohomError::Unsupported(format!("stage {from:?} → {to:?}"))),
    })
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub max_nodes: u64,
    /// Use the exhaustive search when |Γ|·log_p|U| is at most this.
    pub exhaustive_threshold: u64,
    /// Enumeration budget for the exhaustive search (elements of U tried per generator).
    pub max_elems: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_nodes: DEFAULT_MAX_NODES,
            exhaustive_threshold: 8,
            max_elems: 1 << 25,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub nodes: u64,
    pub stages: usize,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingOutcome {
    /// Images in U of Γ's distinguished generators.
    Lift(Vec<UniTri>),
    Unsolvable,
}

/// Lift ᾱ: Γ → U/K (images of Γ's generators in normal form) to Γ → U.
pub fn solve_embedding(
    gamma: &FiniteGroup,
    n: usize,
    p: u32,
    kernel: KernelSpec,
    alpha: &[UniTri],
    opts: &SolverOptions,
) -> Result<(EmbeddingOutcome, SolverStats)> {
    solve_embedding_to(gamma, n, p, kernel, Level::Full, alpha, opts)
}

/// As [`solve_embedding`], stopping at `target` (either `Full` or `ModCenter`).
/// Returned images are in the normal form of `target`.
pub fn solve_embedding_to(
    gamma: &FiniteGroup,
    n: usize,
    p: u32,
    kernel: KernelSpec,
    target: Level,
    alpha: &[UniTri],
    opts: &SolverOptions,
) -> Result<(EmbeddingOutcome, SolverStats)> {
    if !crate::modarith::is_prime(p as u64) {
        return Err(CohomError::UnsupportedModulus(p as u64));
    }
    let mut levels = kernel.levels(n)?;
    match target {
        Level::Full => {}
        Level::ModCenter => {
            levels.pop();
            let last = levels.last().copied();
            if !matches!(last, Some(Level::ModCenter)) && last != Some(Level::ModLcs(n - 1)) {
                return Err(CohomError::Unsupported(format!("kernel {kernel:?} does not contain the center chain")));
            }
        }
        _ => return Err(CohomError::Unsupported(format!("target level {target:?}"))),
    }
    if alpha.len() != gamma.generators().len() {
        return Err(CohomError::Inconsistent("one image per generator of Γ is required".into()));
    }
    let base = levels[0];
    for a in alpha {
        if a.n() != n || a.modulus() != p {
            return Err(CohomError::Inconsistent("image has the wrong shape".into()));
        }
        if base.normal_form(a) != *a {
            return Err(CohomError::Inconsistent("image is not in normal form for U/K".into()));
        }
    }
    if gamma.extend_hom(alpha, &UniTri::identity(n, p), |x, y| base.mul(x, y)).is_none() {
        return Err(CohomError::Inconsistent("ᾱ is not a homomorphism".into()));
    }
    let log_u = num_entries(n) as u64;
    if target == Level::Full && (gamma.order() as u64) * log_u <= opts.exhaustive_threshold {
        let found = brute_force_lifts(gamma, n, p, kernel, alpha, 1, opts.max_elems)?;
        let stats = SolverStats {
            nodes: 0,
            stages: levels.len() - 1,
            exhaustive: true,
        };
        return Ok((
            match found.into_iter().next() {
                Some(x) => EmbeddingOutcome::Lift(x),
                None => EmbeddingOutcome::Unsolvable,
            },
            stats,
        ));
    }
    let mut stats = SolverStats {
        nodes: 0,
        stages: levels.len() - 1,
        exhaustive: false,
    };
    let res = dfs(gamma, n, p, &levels, 0, alpha.to_vec(), opts, &mut stats)?;
    Ok((
        match res {
            Some(x) => EmbeddingOutcome::Lift(x),
            None => EmbeddingOutcome::Unsolvable,
        },
        stats,
    ))
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    gamma: &FiniteGroup,
    n: usize,
    p: u32,
    levels: &[Level],
    depth: usize,
    images: Vec<UniTri>,
    opts: &SolverOptions,
    stats: &mut SolverStats,
) -> Result<Option<Vec<UniTri>>> {
    stats.nodes += 1;
    if stats.nodes > opts.max_nodes {
        return Err(CohomError::Budget(format!("solver node cap {} reached", opts.max_nodes)));
    }
    if depth + 1 == levels.len() {
        return Ok(Some(images));
    }
    let (from, to) = (levels[depth], levels[depth + 1]);
    let layer = layer_positions(n, from, to)?;
    let r = layer.len();
    let q = p as u64;
    let id = UniTri::identity(n, p);
    let lam = gamma
        .extend_hom(&images, &id, |x, y| from.mul(x, y))
        .ok_or_else(|| CohomError::Inconsistent("stage input is not a homomorphism".into()))?;
    let coords = |x: &UniTri| -> Vec<u64> { layer.iter().map(|&(a, b)| x.get(a, b) as u64).collect() };
    let kelem = |v: &[u64]| -> UniTri {
        let mut x = id.clone();
        for (&(a, b), &c) in layer.iter().zip(v) {
            x.set(a, b, (c % q) as u32);
        }
        x
    };
    // action on the layer by conjugation with λ(γ), computed at the upper level
    let mut action = Vec::with_capacity(gamma.order());
    for l in &lam {
        let linv = l.inv();
        let cols: Vec<Vec<u64>> = (0..r)
            .map(|j| {
                let mut e = vec![0u64; r];
                e[j] = 1;
                coords(&to.normal_form(&l.mul(&kelem(&e)).mul(&linv)))
            })
            .collect();
        action.push(DenseMat::from_cols(&cols, r, q)?);
    }
    let module = GModule::from_action(gamma, q, action)?;
    let gens = gamma.generators().to_vec();
    let obs = |h: u32, s: usize| -> Vec<u64> {
        let hs = gamma.mul(h, gens[s]);
        let x = lam[h as usize].mul(&lam[gens[s] as usize]).mul(&lam[hs as usize].inv());
        coords(&to.normal_form(&x))
    };
    let Some(st) = stage_solve(gamma, &module, obs, true)? else {
        return Ok(None);
    };
    for sol in st.solutions {
        let next: Vec<UniTri> = gens
            .iter()
            .enumerate()
            .map(|(si, &s)| to.normal_form(&kelem(&sol[si * r..(si + 1) * r]).mul(&lam[s as usize])))
            .collect();
        if let Some(found) = dfs(gamma, n, p, levels, depth + 1, next, opts, stats)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Exhaustive search: all homomorphisms Γ → U lifting ᾱ, up to `limit` of them.
pub fn brute_force_lifts(
    gamma: &FiniteGroup,
    n: usize,
    p: u32,
    kernel: KernelSpec,
    alpha: &[UniTri],
    limit: usize,
    max_elems: u64,
) -> Result<Vec<Vec<UniTri>>> {
    let base = kernel.levels(n)?[0];
    let ne = num_entries(n) as u32;
    let size = (p as u64)
        .checked_pow(ne)
        .filter(|&s| s <= max_elems)
        .ok_or_else(|| CohomError::Budget(format!("|U| = {p}^{ne} exceeds {max_elems}")))?;
    let mut fibers: Vec<Vec<UniTri>> = vec![Vec::new(); alpha.len()];
    for idx in 0..size {
        let x = UniTri::from_index(n, p, idx as u128);
        let nf = base.normal_form(&x);
        for (i, a) in alpha.iter().enumerate() {
            if nf == *a {
                fibers[i].push(x.clone());
            }
        }
    }
    let id = UniTri::identity(n, p);
    let mut out = Vec::new();
    let mut choice = vec![0usize; alpha.len()];
    if fibers.iter().any(|f| f.is_empty()) {
        return Ok(out);
    }
    loop {
        let imgs: Vec<UniTri> = choice.iter().zip(&fibers).map(|(&c, f)| f[c].clone()).collect();
        if gamma.extend_hom(&imgs, &id, |x, y| x.mul(y)).is_some() {
            out.push(imgs);
            if out.len() >= limit {
                return Ok(out);
            }
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < fibers[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
