//! Lifting homomorphisms through a surjection with abelian kernel.

use std::collections::HashMap;

use crate::modarith::{add_mod, DenseMat, Quotient};

use super::group::FiniteGroup;
use super::h1::H1Basis;
use super::module::{AffineSystem, GModule};
use super::{CohomError, Result};

/// Largest number of K-conjugacy classes of lifts enumerated at one stage.
pub(crate) const MAX_STAGE_CLASSES: u64 = 1 << 20;

/// All elements of a finite abelian p-group ⊕ Z/p^{e_i}, given by generators, as vectors.
pub(crate) fn enumerate_quotient(q: &Quotient, dim: usize, modulus: u64) -> Result<Vec<Vec<u64>>> {
    let total: u32 = q.invariants.iter().sum();
    let size = q.p.checked_pow(total).filter(|&s| s <= MAX_STAGE_CLASSES).ok_or_else(|| {
        CohomError::Budget(format!("{}^{} stage classes", q.p, total))
    })?;
    let orders: Vec<u64> = q.invariants.iter().map(|&e| q.p.pow(e)).collect();
    let mut out = Vec::with_capacity(size as usize);
    let mut c = vec![0u64; orders.len()];
    loop {
        let mut v = vec![0u64; dim];
        for (ci, g) in c.iter().zip(&q.generators) {
            for (x, &y) in v.iter_mut().zip(g) {
                *x = add_mod(*x, (ci * y) % modulus, modulus);
            }
        }
        out.push(v);
        let mut i = 0;
        loop {
            if i == c.len() {
                return Ok(out);
            }
            c[i] += 1;
            if c[i] < orders[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

/// Solutions of one abelian lifting stage: generator values k_s of the correcting cochain.
pub(crate) struct StageSolutions {
    /// one solution per class of H¹(Γ, K), particular solution first
    pub solutions: Vec<Vec<u64>>,
}

/// Solve k_{hs} = k_h + h·k_s + o(h, s) on Γ, returning all solutions up to coboundaries,
/// or `None` when the obstruction class is non-trivial.
pub(crate) fn stage_solve(
    gamma: &FiniteGroup,
    module: &GModule,
    obstruction: impl Fn(u32, usize) -> Vec<u64>,
    all: bool,
) -> Result<Option<StageSolutions>> {
    let r = module.rank();
    let sys = AffineSystem::build(gamma, module, &vec![0; r], obstruction)?;
    let Some(sol) = sys.solve()? else {
        return Ok(None);
    };
    let q = module.modulus();
    let mut solutions = vec![sol.particular.clone()];
    if all && sys.unknowns > 0 {
        let h1 = H1Basis::new(gamma, module)?;
        if !h1.is_trivial() {
            solutions.clear();
            let q1 = h1_quotient(&h1)?;
            for off in enumerate_quotient(&q1, sys.unknowns, q)? {
                solutions.push(sol.particular.iter().zip(&off).map(|(&a, &b)| add_mod(a, b, q)).collect());
            }
        }
    }
    Ok(Some(StageSolutions { solutions }))
}

fn h1_quotient(h1: &H1Basis) -> Result<Quotient> {
    super::h1::quotient_cols(
        h1.cocycle_generators(),
        h1.coboundary_generators(),
        h1.unknowns(),
        h1.module().prime(),
        h1.module().exponent(),
    )
}

/// A homocyclic abelian normal subgroup K ≅ (Z/p^k)^r of a table-backed group, with coordinates.
#[derive(Clone, Debug)]
pub struct AbelianKernel {
    pub p: u64,
    pub k: u32,
    pub basis: Vec<u32>,
    coords: HashMap<u32, Vec<u64>>,
    elems: HashMap<Vec<u64>, u32>,
}

impl AbelianKernel {
    /// Analyse K ⊆ E (given as element ids); must be abelian and homocyclic of prime-power order.
    pub fn new(e: &FiniteGroup, k_elems: &[u32]) -> Result<Self> {
        if !e.is_subgroup(k_elems) {
            return Err(CohomError::NotSubgroup);
        }
        for &a in k_elems {
            for &b in k_elems {
                if !e.commute(a, b) {
                    return Err(CohomError::Unsupported("kernel is not abelian".into()));
                }
            }
        }
        let order = k_elems.len() as u64;
        let id = e.identity();
        if order == 1 {
            let mut coords = HashMap::new();
            coords.insert(id, Vec::new());
            let mut elems = HashMap::new();
            elems.insert(Vec::new(), id);
            return Ok(AbelianKernel { p: 2, k: 1, basis: Vec::new(), coords, elems });
        }
        let (p, _) = crate::modarith::prime_power(order)
            .ok_or_else(|| CohomError::Unsupported("kernel order is not a prime power".into()))?;
        let exp = k_elems.iter().map(|&x| e.elem_order(x) as u64).max().unwrap();
        let k = crate::modarith::valuation(exp, p, 64);
        let q = exp;
        // greedy basis: x of full order with p^{k-1}x outside the current span
        let mut basis = Vec::new();
        let mut span: Vec<u32> = vec![id];
        for &x in k_elems {
            if e.elem_order(x) as u64 != exp {
                continue;
            }
            let xp = e.pow(x, exp / p);
            if span.contains(&xp) {
                continue;
            }
            basis.push(x);
            span = e.generated(&basis);
            if span.len() as u64 == order {
                break;
            }
        }
        if span.len() as u64 != order {
            return Err(CohomError::Unsupported("kernel is not homocyclic".into()));
        }
        let mut coords = HashMap::new();
        let mut elems = HashMap::new();
        let r = basis.len();
        let mut c = vec![0u64; r];
        loop {
            let mut x = id;
            for (ci, &b) in c.iter().zip(&basis) {
                x = e.mul(x, e.pow(b, *ci));
            }
            coords.insert(x, c.clone());
            elems.insert(c.clone(), x);
            let mut i = 0;
            loop {
                if i == r {
                    return Ok(AbelianKernel { p, k, basis, coords, elems });
                }
                c[i] += 1;
                if c[i] < q {
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn coords(&self, x: u32) -> Option<&Vec<u64>> {
        self.coords.get(&x)
    }

    pub fn element(&self, v: &[u64]) -> u32 {
        let m = self.modulus();
        let v: Vec<u64> = v.iter().map(|x| x % m).collect();
        self.elems[&v]
    }
}

/// Result of a lifting problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    /// A homomorphism Γ → E on all elements, and (on request) one lift per K-conjugacy class.
    Lift { images: Vec<u32>, all: Vec<Vec<u32>> },
    /// The obstruction cocycle o(γ, δ) in K-coordinates, indexed γ·|Γ| + δ.
    Obstructed { obstruction: Vec<Vec<u64>> },
}

/// Lift φ: Γ → Q (given on Γ's generators) through π: E → Q with abelian kernel.
pub fn lift_abelian_kernel(
    gamma: &FiniteGroup,
    e: &FiniteGroup,
    q: &FiniteGroup,
    pi: &[u32],
    phi_gens: &[u32],
    all: bool,
) -> Result<LiftOutcome> {
    if pi.len() != e.order() || !e.is_hom(pi, |&a, &b| q.mul(a, b)) {
        return Err(CohomError::Inconsistent("π is not a homomorphism E → Q".into()));
    }
    let mut hit = vec![false; q.order()];
    for &y in pi {
        hit[y as usize] = true;
    }
    if hit.iter().any(|&h| !h) {
        return Err(CohomError::Inconsistent("π is not surjective".into()));
    }
    let phi = gamma
        .extend_hom(phi_gens, &q.identity(), |&a, &b| q.mul(a, b))
        .ok_or_else(|| CohomError::Inconsistent("φ is not a homomorphism".into()))?;
    let kel: Vec<u32> = (0..e.order() as u32).filter(|&x| pi[x as usize] == q.identity()).collect();
    let kern = AbelianKernel::new(e, &kel)?;
    let m = kern.modulus();
    let r = kern.rank();
    // section with s(1) = 1
    let mut section = vec![u32::MAX; q.order()];
    for x in (0..e.order() as u32).rev() {
        section[pi[x as usize] as usize] = x;
    }
    section[q.identity() as usize] = e.identity();
    let lam: Vec<u32> = phi.iter().map(|&y| section[y as usize]).collect();
    // Γ acts on K by conjugation with λ(γ)
    let mut action = Vec::with_capacity(gamma.order());
    for g in 0..gamma.order() as u32 {
        let l = lam[g as usize];
        let cols: Vec<Vec<u64>> = kern
            .basis
            .iter()
            .map(|&b| kern.coords(e.mul(e.mul(l, b), e.inv(l))).unwrap().clone())
            .collect();
        action.push(if r == 0 { DenseMat::zeros(0, 0, m) } else { DenseMat::from_cols(&cols, r, m)? });
    }
    let module = if r == 0 {
        GModule::trivial(gamma, m, 0)?
    } else {
        GModule::from_action(gamma, m, action)?
    };
    let obs = |a: u32, b: u32| -> Vec<u64> {
        let x = e.mul(e.mul(lam[a as usize], lam[b as usize]), e.inv(lam[gamma.mul(a, b) as usize]));
        kern.coords(x).expect("obstruction lies in K").clone()
    };
    let gens = gamma.generators().to_vec();
    let Some(st) = stage_solve(gamma, &module, |h, s| obs(h, gens[s]), all)? else {
        let n = gamma.order() as u32;
        let obstruction = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| obs(a, b)).collect();
        return Ok(LiftOutcome::Obstructed { obstruction });
    };
    let mut lifts = Vec::new();
    for x in &st.solutions {
        let imgs: Vec<u32> = gens
            .iter()
            .enumerate()
            .map(|(si, &s)| e.mul(kern.element(&x[si * r..(si + 1) * r]), lam[s as usize]))
            .collect();
        let full = gamma
            .extend_hom(&imgs, &e.identity(), |&a, &b| e.mul(a, b))
            .ok_or_else(|| CohomError::Inconsistent("stage solution is not a homomorphism".into()))?;
        if full.iter().zip(&phi).any(|(&x, &y)| pi[x as usize] != y) {
            return Err(CohomError::Inconsistent("lift does not cover φ".into()));
        }
        lifts.push(full);
    }
    Ok(LiftOutcome::Lift {
        images: lifts[0].clone(),
        all: if all { lifts } else { Vec::new() },
    })
}
