//! H¹ by cocycle linear algebra on generator values.

use crate::modarith::{quotient_pk, solve_pk, sub_mod, DenseMat, Quotient};

use super::group::FiniteGroup;
use super::module::{AffineSystem, Cocycle1, GModule};
use super::{CohomError, Result};

/// X/Y for column generators in (Z/p^k)^dim; empty inputs are padded with a zero column.
pub(crate) fn quotient_cols(x: &[Vec<u64>], y: &[Vec<u64>], dim: usize, p: u64, k: u32) -> Result<Quotient> {
    let q = p.pow(k);
    let d = dim.max(1);
    let pad = |v: &[Vec<u64>]| -> Vec<Vec<u64>> {
        if v.is_empty() || dim == 0 {
            vec![vec![0; d]]
        } else {
            v.to_vec()
        }
    };
    let mut xs = pad(x);
    let ys = pad(y);
    // Y ⊆ X is required, so X is taken as X + Y
    if dim > 0 {
        xs.extend(y.iter().cloned());
    }
    let xm = DenseMat::from_cols(&xs, d, q)?;
    let ym = DenseMat::from_cols(&ys, d, q)?;
    Ok(quotient_pk(&xm, &ym, p, k)?)
}

/// Whether `v` lies in the span of the columns over Z/p^k.
pub(crate) fn in_span_pk(cols: &[Vec<u64>], v: &[u64], p: u64, k: u32) -> Result<bool> {
    if v.iter().all(|&x| x == 0) {
        return Ok(true);
    }
    if cols.is_empty() {
        return Ok(false);
    }
    let a = DenseMat::from_cols(cols, v.len(), p.pow(k))?;
    Ok(solve_pk(&a, v, p, k)?.is_some())
}

fn nonzero(v: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    v.into_iter().filter(|x| x.iter().any(|&c| c != 0)).collect()
}

/// H¹(G, M) = Z¹/B¹ with cocycles recorded by their values on the distinguished generators.
#[derive(Clone, Debug)]
pub struct H1Basis {
    group: FiniteGroup,
    module: GModule,
    sys: AffineSystem,
    z1: Vec<Vec<u64>>,
    b1: Vec<Vec<u64>>,
    quotient: Quotient,
    reps: Vec<Cocycle1>,
}

/// A subgroup of H¹, given by cocycle generators (on the generator values) modulo B¹.
#[derive(Clone, Debug)]
pub struct H1Subgroup {
    pub generators: Vec<Vec<u64>>,
    pub quotient: Quotient,
    /// Whether every coboundary satisfies the defining conditions.
    pub contains_coboundaries: bool,
}

impl H1Subgroup {
    pub fn dim(&self) -> usize {
        self.quotient.invariants.len()
    }

    pub fn invariants(&self) -> &[u32] {
        &self.quotient.invariants
    }

    pub fn order_log(&self) -> u32 {
        self.quotient.order_log()
    }

    pub fn is_trivial(&self) -> bool {
        self.quotient.is_trivial()
    }
}

/// Compute H¹(G, M).
pub fn h1(g: &FiniteGroup, m: &GModule) -> Result<H1Basis> {
    H1Basis::new(g, m)
}

impl H1Basis {
    pub fn new(g: &FiniteGroup, m: &GModule) -> Result<Self> {
        if g.order() != m.group_order() {
            return Err(CohomError::InvalidModule("module is for a group of another order".into()));
        }
        let r = m.rank();
        let q = m.modulus();
        let sys = AffineSystem::build(g, m, &vec![0; r], |_, _| vec![0; r])?;
        let sol = sys.solve()?.expect("homogeneous system");
        let z1 = nonzero(sol.kernel_generators);
        let mut b1 = Vec::new();
        for j in 0..r {
            let mut v = vec![0u64; sys.unknowns];
            for (si, &s) in g.generators().iter().enumerate() {
                let a = m.act(s);
                for i in 0..r {
                    v[si * r + i] = sub_mod(a.get(i, j), (i == j) as u64, q);
                }
            }
            b1.push(v);
        }
        let b1 = nonzero(b1);
        let quotient = quotient_cols(&z1, &b1, sys.unknowns, m.prime(), m.exponent())?;
        let mut h = H1Basis {
            group: g.clone(),
            module: m.clone(),
            sys,
            z1,
            b1,
            quotient,
            reps: Vec::new(),
        };
        h.reps = h
            .quotient
            .generators
            .clone()
            .iter()
            .map(|x| h.cocycle(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(h)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn module(&self) -> &GModule {
        &self.module
    }

    /// Number of cyclic factors.
    pub fn dim(&self) -> usize {
        self.quotient.invariants.len()
    }

    pub fn invariants(&self) -> &[u32] {
        &self.quotient.invariants
    }

    pub fn order_log(&self) -> u32 {
        self.quotient.order_log()
    }

    pub fn is_trivial(&self) -> bool {
        self.quotient.is_trivial()
    }

    pub fn representatives(&self) -> &[Cocycle1] {
        &self.reps
    }

    /// Generators of Z¹ and B¹ (as generator-value vectors).
    pub fn cocycle_generators(&self) -> &[Vec<u64>] {
        &self.z1
    }

    pub fn coboundary_generators(&self) -> &[Vec<u64>] {
        &self.b1
    }

    pub fn unknowns(&self) -> usize {
        self.sys.unknowns
    }

    /// Value at g as a linear function of the generator values (rank × unknowns).
    pub fn linear_at(&self, g: u32) -> DenseMat {
        self.sys.linear(g)
    }

    /// The full cocycle with the given generator values (validated).
    pub fn cocycle(&self, x: &[u64]) -> Result<Cocycle1> {
        let values = (0..self.group.order() as u32).map(|g| self.sys.eval(g, x)).collect();
        Cocycle1::new(&self.group, &self.module, values)
    }

    /// Every 1-cocycle, as full cochains.
    pub fn all_cocycles(&self) -> Result<Vec<Cocycle1>> {
        let m = &self.module;
        let q = quotient_cols(&self.z1, &[], self.sys.unknowns, m.prime(), m.exponent())?;
        super::lift::enumerate_quotient(&q, self.sys.unknowns, m.modulus())?
            .iter()
            .map(|x| self.cocycle(x))
            .collect()
    }

    pub fn generator_values(&self, f: &Cocycle1) -> Vec<u64> {
        self.group.generators().iter().flat_map(|&s| f.value(s).to_vec()).collect()
    }

    /// Coordinates of the class of f on the cyclic generators of H¹.
    pub fn coords(&self, f: &Cocycle1) -> Result<Vec<u64>> {
        self.coords_of_generator_values(&self.generator_values(f))
    }

    pub fn coords_of_generator_values(&self, x: &[u64]) -> Result<Vec<u64>> {
        if self.sys.unknowns == 0 {
            return Ok(Vec::new());
        }
        self.quotient
            .coords(x)?
            .ok_or_else(|| CohomError::NotCocycle("vector is not a cocycle".into()))
    }

    pub fn is_coboundary(&self, f: &Cocycle1) -> Result<bool> {
        Ok(self.coords(f)?.iter().all(|&c| c == 0))
    }

    fn subgroup_from(&self, gens: Vec<Vec<u64>>) -> Result<H1Subgroup> {
        let gens = nonzero(gens);
        let (p, k) = (self.module.prime(), self.module.exponent());
        let mut contains = true;
        for b in &self.b1 {
            if !in_span_pk(&gens, b, p, k)? {
                contains = false;
                break;
            }
        }
        let quotient = quotient_cols(&gens, &self.b1, self.sys.unknowns, p, k)?;
        Ok(H1Subgroup {
            generators: gens,
            quotient,
            contains_coboundaries: contains,
        })
    }

    /// The whole group as a subgroup object.
    pub fn full(&self) -> Result<H1Subgroup> {
        self.subgroup_from(self.z1.clone())
    }

    /// Cocycles with R·x = 0 for the rows R (over the generator values), modulo B¹.
    pub fn subgroup_where(&self, rows: &DenseMat) -> Result<H1Subgroup> {
        if rows.cols() != self.sys.unknowns {
            return Err(CohomError::Inconsistent("condition width".into()));
        }
        let (p, k) = (self.module.prime(), self.module.exponent());
        let q = self.module.modulus();
        if rows.rows() == 0 || self.z1.is_empty() {
            return self.subgroup_from(self.z1.clone());
        }
        let zmat = DenseMat::from_cols(&self.z1, self.sys.unknowns, q)?;
        let rz = crate::modarith::mat_mul(rows, &zmat)?;
        let ker = crate::modarith::kernel_pk(&rz, p, k)?;
        let gens = ker.iter().map(|w| zmat.mul_vec(w)).collect::<std::result::Result<Vec<_>, _>>()?;
        self.subgroup_from(gens)
    }

    /// Classes whose restriction to every listed subgroup is trivial.
    pub fn restriction_kernel(&self, subgroups: &[Vec<u32>]) -> Result<H1Subgroup> {
        let g = &self.group;
        let m = &self.module;
        let (p, k) = (m.prime(), m.exponent());
        let q = m.modulus();
        let r = m.rank();
        let nz = self.z1.len();
        if nz == 0 {
            return self.subgroup_from(Vec::new());
        }
        let zmat = DenseMat::from_cols(&self.z1, self.sys.unknowns, q)?;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let cols = nz + r * subgroups.len();
        for (hi, h) in subgroups.iter().enumerate() {
            if !g.is_subgroup(h) {
                return Err(CohomError::NotSubgroup);
            }
            let (sub, emb) = g.subgroup(h)?;
            for &t in sub.generators() {
                let t = emb[t as usize];
                let lz = crate::modarith::mat_mul(&self.sys.linear(t), &zmat)?;
                let a = m.act(t);
                for i in 0..r {
                    let mut row = vec![0u64; cols];
                    row[..nz].copy_from_slice(lz.row(i));
                    for j in 0..r {
                        row[nz + hi * r + j] = sub_mod((i == j) as u64, a.get(i, j), q);
                    }
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            return self.subgroup_from(self.z1.clone());
        }
        let big = DenseMat::from_rows(&rows, q)?;
        let ker = crate::modarith::kernel_pk(&big, p, k)?;
        let gens = ker
            .iter()
            .map(|w| zmat.mul_vec(&w[..nz]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        self.subgroup_from(gens)
    }

    /// Kernel of H¹(G, M) → H¹(G, N) induced by a module map f: M → N.
    pub fn map_kernel(&self, f: &DenseMat, target: &GModule) -> Result<H1Subgroup> {
        let g = &self.group;
        let m = &self.module;
        let q = m.modulus();
        if target.modulus() != q || f.rows() != target.rank() || f.cols() != m.rank() {
            return Err(CohomError::Inconsistent("module map shape".into()));
        }
        for x in 0..g.order() as u32 {
            let lhs = crate::modarith::mat_mul(f, m.act(x))?;
            let rhs = crate::modarith::mat_mul(target.act(x), f)?;
            if lhs != rhs {
                return Err(CohomError::Inconsistent("module map is not equivariant".into()));
            }
        }
        let (p, k) = (m.prime(), m.exponent());
        let r0 = target.rank();
        let nz = self.z1.len();
        if nz == 0 {
            return self.subgroup_from(Vec::new());
        }
        let zmat = DenseMat::from_cols(&self.z1, self.sys.unknowns, q)?;
        let cols = nz + r0;
        let mut rows = Vec::new();
        for &s in g.generators() {
            let fz = crate::modarith::mat_mul(f, &crate::modarith::mat_mul(&self.sys.linear(s), &zmat)?)?;
            let a = target.act(s);
            for i in 0..r0 {
                let mut row = vec![0u64; cols];
                row[..nz].copy_from_slice(fz.row(i));
                for j in 0..r0 {
                    row[nz + j] = sub_mod((i == j) as u64, a.get(i, j), q);
                }
                rows.push(row);
            }
        }
        if rows.is_empty() {
            return self.subgroup_from(self.z1.clone());
        }
        let big = DenseMat::from_rows(&rows, q)?;
        let ker = crate::modarith::kernel_pk(&big, p, k)?;
        let gens = ker
            .iter()
            .map(|w| zmat.mul_vec(&w[..nz]))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        self.subgroup_from(gens)
    }

    /// Whether `a` ⊆ `b` modulo coboundaries.
    pub fn subgroup_le(&self, a: &H1Subgroup, b: &H1Subgroup) -> Result<bool> {
        let (p, k) = (self.module.prime(), self.module.exponent());
        let mut span = b.generators.clone();
        span.extend(self.b1.iter().cloned());
        for v in &a.generators {
            if !in_span_pk(&span, v, p, k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sha¹_cyc: classes trivial on every cyclic subgroup (maximal ones suffice).
    pub fn sha1_cyc(&self) -> Result<H1Subgroup> {
        let subs: Vec<Vec<u32>> = self
            .group
            .maximal_cyclic_generators()
            .into_iter()
            .map(|c| self.group.generated(&[c]))
            .collect();
        self.restriction_kernel(&subs)
    }
}

/// Matrix of restriction H¹(G, M) → H¹(H, M) on the chosen cyclic generators.
#[derive(Clone, Debug)]
pub struct RestrictionMap {
    pub source_invariants: Vec<u32>,
    pub target_invariants: Vec<u32>,
    /// target-dim × source-dim; column j is the image of the j-th source generator
    pub matrix: DenseMat,
}

impl RestrictionMap {
    pub fn is_injective(&self) -> Result<bool> {
        restriction_is_injective(self)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

fn restriction_is_injective(r: &RestrictionMap) -> Result<bool> {
    // kernel over the source group ⊕ Z/p^{e_j}: enumerate when small, else use Smith data
    let s = &r.source_invariants;
    let t = &r.target_invariants;
    if s.is_empty() {
        return Ok(true);
    }
    let total: u32 = s.iter().sum();
    if total > 20 {
        return Err(CohomError::Budget("source group too large to enumerate".into()));
    }
    let q = r.matrix.modulus();
    let p = crate::modarith::prime_power(q).map(|(p, _)| p).unwrap_or(q);
    let orders: Vec<u64> = s.iter().map(|&e| p.pow(e)).collect();
    let mut x = vec![0u64; s.len()];
    loop {
        // next nonzero x
        let mut i = 0;
        loop {
            if i == x.len() {
                return Ok(true);
            }
            x[i] += 1;
            if x[i] < orders[i] {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        let y = r.matrix.mul_vec(&x)?;
        if y.iter().zip(t).all(|(&v, &e)| v % p.pow(e) == 0) {
            return Ok(false);
        }
    }
}

/// Restriction to the subgroup on the given element ids.
pub fn restrict_h1(g: &FiniteGroup, m: &GModule, h: &[u32]) -> Result<RestrictionMap> {
    let src = H1Basis::new(g, m)?;
    let (sub, emb) = g.subgroup(h)?;
    let mh = m.restrict(&emb);
    let tgt = H1Basis::new(&sub, &mh)?;
    let q = m.modulus();
    let mut cols = Vec::new();
    for rep in src.representatives() {
        let vals: Vec<Vec<u64>> = emb.iter().map(|&x| rep.value(x).to_vec()).collect();
        let f = Cocycle1::new(&sub, &mh, vals)?;
        cols.push(tgt.coords(&f)?);
    }
    let matrix = if cols.is_empty() {
        DenseMat::zeros(tgt.dim(), 0, q)
    } else {
        DenseMat::from_cols(&cols, tgt.dim(), q)?
    };
    Ok(RestrictionMap {
        source_invariants: src.invariants().to_vec(),
        target_invariants: tgt.invariants().to_vec(),
        matrix,
    })
}

/// Sha¹_cyc(G, M).
pub fn sha1_cyc(g: &FiniteGroup, m: &GModule) -> Result<H1Subgroup> {
    H1Basis::new(g, m)?.sha1_cyc()
}
