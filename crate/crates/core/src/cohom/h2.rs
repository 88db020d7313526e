//! H² by normalized cocycles reduced to their values on (g, s), s a distinguished generator;
//! Q/Z-proxy coefficients and the Bogomolov multiplier.

use std::collections::BTreeMap;
use serde::Serialize;

use crate::modarith::{
    add_mod, kernel_pk, mat_mul, mul_mod, sparse_rank_fp, sub_mod, CosetReducer, DenseMat, Quotient,
    RowSpanPk, SparseMat,
};

use super::group::FiniteGroup;
use super::h1::{in_span_pk, quotient_cols, H1Basis};
use super::module::{is_2cocycle, GModule};
use super::{CohomError, Result};

/// Largest group order for a full H² basis.
pub const H2_MAX_ORDER: usize = 128;
/// Largest group order for the unreduced bar-complex rank computation.
pub const FULL_BAR_MAX_ORDER: usize = 32;

/// Normalized 2-cochains recorded on pairs (g, s) with g ≠ 1 and s a distinguished generator.
#[derive(Clone, Debug)]
struct ReducedBar {
    group: FiniteGroup,
    module: GModule,
    /// position of g among non-identity elements
    slot: Vec<Option<usize>>,
    unknowns: usize,
}

impl ReducedBar {
    fn new(g: &FiniteGroup, m: &GModule) -> Self {
        let mut slot = vec![None; g.order()];
        let mut t = 0;
        for x in 0..g.order() as u32 {
            if x != g.identity() {
                slot[x as usize] = Some(t);
                t += 1;
            }
        }
        let unknowns = t * g.generators().len() * m.rank();
        ReducedBar {
            group: g.clone(),
            module: m.clone(),
            slot,
            unknowns,
        }
    }

    fn unk(&self, g: u32, s: usize, j: usize) -> Option<usize> {
        let r = self.module.rank();
        let ns = self.group.generators().len();
        self.slot[g as usize].map(|t| (t * ns + s) * r + j)
    }

    /// For fixed g: rows[h][i] is c(g, h)_i as a linear form in the unknowns.
    fn forms_at(&self, g: u32) -> Vec<Vec<Vec<u64>>> {
        let grp = &self.group;
        let r = self.module.rank();
        let q = self.module.modulus();
        let mut out: Vec<Vec<Vec<u64>>> = vec![Vec::new(); grp.order()];
        out[grp.identity() as usize] = vec![vec![0; self.unknowns]; r];
        for &x in &grp.bfs_order()[1..] {
            let (h, s) = grp.tree_edge(x).unwrap();
            let v = self.step(&out[h as usize], g, h, s, q);
            out[x as usize] = v;
        }
        out
    }

    /// c(g, hs) = c(g, h) + c(gh, s) − g·c(h, s)
    fn step(&self, prev: &[Vec<u64>], g: u32, h: u32, s: usize, q: u64) -> Vec<Vec<u64>> {
        let r = self.module.rank();
        let grp = &self.group;
        if g == grp.identity() {
            return prev.to_vec();
        }
        let a = self.module.act(g);
        let gh = grp.mul(g, h);
        let mut v = prev.to_vec();
        for i in 0..r {
            if let Some(c) = self.unk(gh, s, i) {
                v[i][c] = add_mod(v[i][c], 1, q);
            }
            for j in 0..r {
                if let Some(c) = self.unk(h, s, j) {
                    v[i][c] = sub_mod(v[i][c], a.get(i, j), q);
                }
            }
        }
        v
    }

    /// Rows expressing the cocycle identity on the non-tree edges.
    fn cocycle_rows(&self, span: &mut RowSpanPk) -> Result<()> {
        let grp = &self.group;
        let q = self.module.modulus();
        for g in 0..grp.order() as u32 {
            if g == grp.identity() {
                continue;
            }
            let f = self.forms_at(g);
            for h in 0..grp.order() as u32 {
                for (s, &gs) in grp.generators().iter().enumerate() {
                    let y = grp.mul(h, gs);
                    if grp.tree_edge(y) == Some((h, s)) {
                        continue;
                    }
                    let rhs = self.step(&f[h as usize], g, h, s, q);
                    for (a, b) in f[y as usize].iter().zip(&rhs) {
                        let row: Vec<u64> = a.iter().zip(b).map(|(&x, &y)| sub_mod(x, y, q)).collect();
                        if row.iter().any(|&x| x != 0) {
                            span.insert(&row)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Coboundaries δe_{x,j} of normalized 1-cochains.
    fn coboundaries(&self) -> Vec<Vec<u64>> {
        let grp = &self.group;
        let r = self.module.rank();
        let q = self.module.modulus();
        let mut out = Vec::new();
        for x in 0..grp.order() as u32 {
            if x == grp.identity() {
                continue;
            }
            for j in 0..r {
                let mut v = vec![0u64; self.unknowns];
                for g in 0..grp.order() as u32 {
                    if g == grp.identity() {
                        continue;
                    }
                    let a = self.module.act(g);
                    for (s, &gs) in grp.generators().iter().enumerate() {
                        let base = self.unk(g, s, 0).unwrap();
                        if gs == x {
                            for i in 0..r {
                                v[base + i] = add_mod(v[base + i], a.get(i, j), q);
                            }
                        }
                        if grp.mul(g, gs) == x {
                            v[base + j] = sub_mod(v[base + j], 1, q);
                        }
                        if g == x {
                            v[base + j] = add_mod(v[base + j], 1, q);
                        }
                    }
                }
                if v.iter().any(|&c| c != 0) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Reduced vector of a full 2-cocycle (after normalizing by δ of a constant cochain).
    fn reduce(&self, c: &[Vec<u64>]) -> Vec<u64> {
        let grp = &self.group;
        let n = grp.order();
        let r = self.module.rank();
        let q = self.module.modulus();
        let one = grp.identity() as usize;
        let c11 = &c[one * n + one];
        let mut v = vec![0u64; self.unknowns];
        for g in 0..n as u32 {
            if g == grp.identity() {
                continue;
            }
            let gc = self.module.apply(g, c11);
            for (s, &gs) in grp.generators().iter().enumerate() {
                let val = &c[g as usize * n + gs as usize];
                for i in 0..r {
                    v[self.unk(g, s, i).unwrap()] = sub_mod(val[i], gc[i], q);
                }
            }
        }
        v
    }

    /// The full normalized cochain with reduced values x.
    fn expand(&self, x: &[u64]) -> Vec<Vec<u64>> {
        let grp = &self.group;
        let n = grp.order();
        let q = self.module.modulus();
        let mut out = vec![Vec::new(); n * n];
        for g in 0..n as u32 {
            let f = self.forms_at(g);
            for h in 0..n {
                out[g as usize * n + h] = f[h].iter().map(|row| dot(row, x, q)).collect();
            }
        }
        out
    }
}

fn dot(a: &[u64], b: &[u64], q: u64) -> u64 {
    a.iter().zip(b).fold(0, |acc, (&x, &y)| add_mod(acc, mul_mod(x, y, q), q))
}

/// H²(G, M) (optionally modulo extra cocycles), with class signatures.
#[derive(Clone, Debug)]
pub struct H2Classes {
    bar: ReducedBar,
    z2: Vec<Vec<u64>>,
    b2: Vec<Vec<u64>>,
    extra: Vec<Vec<u64>>,
    quotient: Quotient,
    reducer: CosetReducer,
}

impl H2Classes {
    pub fn invariants(&self) -> &[u32] {
        &self.quotient.invariants
    }

    pub fn dim(&self) -> usize {
        self.quotient.invariants.len()
    }

    pub fn order_log(&self) -> u32 {
        self.quotient.order_log()
    }

    pub fn is_trivial(&self) -> bool {
        self.quotient.is_trivial()
    }

    /// Full normalized cocycles representing the cyclic generators.
    pub fn representatives(&self) -> Vec<Vec<Vec<u64>>> {
        if self.bar.unknowns == 0 {
            return Vec::new();
        }
        self.quotient.generators.iter().map(|x| self.bar.expand(x)).collect()
    }

    /// A canonical signature of the class of a full 2-cocycle.
    pub fn signature(&self, c: &[Vec<u64>]) -> Result<Vec<u64>> {
        if !is_2cocycle(&self.bar.group, &self.bar.module, c) {
            return Err(CohomError::NotCocycle("2-cocycle identity fails".into()));
        }
        if self.bar.unknowns == 0 {
            return Ok(Vec::new());
        }
        Ok(self.reducer.signature(&self.bar.reduce(c))?)
    }

    pub fn is_trivial_class(&self, c: &[Vec<u64>]) -> Result<bool> {
        Ok(self.signature(c)?.iter().all(|&x| x == 0))
    }

    /// Number of unknowns of the reduced description.
    pub fn unknowns(&self) -> usize {
        self.bar.unknowns
    }

    pub fn cocycle_generators(&self) -> &[Vec<u64>] {
        &self.z2
    }
}

fn build_h2(g: &FiniteGroup, m: &GModule, extra_rows: bool) -> Result<(ReducedBar, Vec<Vec<u64>>, Option<Vec<Vec<u64>>>)> {
    if g.order() > H2_MAX_ORDER {
        return Err(CohomError::Budget(format!("|G| = {} > {H2_MAX_ORDER}", g.order())));
    }
    if m.group_order() != g.order() {
        return Err(CohomError::InvalidModule("module is for a group of another order".into()));
    }
    let bar = ReducedBar::new(g, m);
    let (p, k) = (m.prime(), m.exponent());
    let mut span = RowSpanPk::new(bar.unknowns, p, k)?;
    bar.cocycle_rows(&mut span)?;
    let z2 = nonzero(span.kernel()?);
    let sym = if extra_rows {
        // c(x, y) = c(y, x) on commuting pairs
        let q = m.modulus();
        let mut forms: BTreeMap<u32, Vec<Vec<Vec<u64>>>> = BTreeMap::new();
        for x in 0..g.order() as u32 {
            forms.insert(x, bar.forms_at(x));
        }
        for x in 0..g.order() as u32 {
            for y in x + 1..g.order() as u32 {
                if !g.commute(x, y) {
                    continue;
                }
                for i in 0..m.rank() {
                    let a = &forms[&x][y as usize][i];
                    let b = &forms[&y][x as usize][i];
                    let row: Vec<u64> = a.iter().zip(b).map(|(&u, &v)| sub_mod(u, v, q)).collect();
                    if row.iter().any(|&c| c != 0) {
                        span.insert(&row)?;
                    }
                }
            }
        }
        Some(nonzero(span.kernel()?))
    } else {
        None
    };
    Ok((bar, z2, sym))
}

fn nonzero(v: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    v.into_iter().filter(|x| x.iter().any(|&c| c != 0)).collect()
}

fn classes(bar: ReducedBar, z2: Vec<Vec<u64>>, extra: Vec<Vec<u64>>) -> Result<H2Classes> {
    let (p, k) = (bar.module.prime(), bar.module.exponent());
    let q = bar.module.modulus();
    let b2 = bar.coboundaries();
    let mut y = b2.clone();
    y.extend(extra.iter().cloned());
    let quotient = quotient_cols(&z2, &y, bar.unknowns, p, k)?;
    let d = bar.unknowns.max(1);
    let ycols = if y.is_empty() || bar.unknowns == 0 { vec![vec![0; d]] } else { y };
    let reducer = CosetReducer::new(&DenseMat::from_cols(&ycols, d, q)?, p, k)?;
    Ok(H2Classes {
        bar,
        z2,
        b2,
        extra,
        quotient,
        reducer,
    })
}

/// H²(G, M) via reduced normalized cocycles.
pub fn h2_bar(g: &FiniteGroup, m: &GModule) -> Result<H2Classes> {
    let (bar, z2, _) = build_h2(g, m, false)?;
    classes(bar, z2, Vec::new())
}

/// dim H²(G, M) over F_p from the unreduced bar complex: dim C² − rank d² − rank d¹.
pub fn h2_full_bar_dim(g: &FiniteGroup, m: &GModule) -> Result<usize> {
    let n = g.order();
    if n > FULL_BAR_MAX_ORDER {
        return Err(CohomError::Budget(format!("|G| = {n} > {FULL_BAR_MAX_ORDER} for the full bar complex")));
    }
    if m.exponent() != 1 {
        return Err(CohomError::UnsupportedModulus(m.modulus()));
    }
    let p = m.prime();
    let r = m.rank();
    // d¹: C¹ → C², (δf)(x, y) = x f(y) − f(xy) + f(x)
    let mut t1 = Vec::new();
    for x in 0..n as u32 {
        let a = m.act(x);
        for y in 0..n as u32 {
            let row0 = (x as usize * n + y as usize) * r;
            for i in 0..r {
                for j in 0..r {
                    t1.push((row0 + i, y as usize * r + j, a.get(i, j)));
                }
                t1.push((row0 + i, g.mul(x, y) as usize * r + i, p - 1));
                t1.push((row0 + i, x as usize * r + i, 1));
            }
        }
    }
    let d1 = SparseMat::accumulate(n * n * r, n * r, p, t1)?;
    let c2 = |x: u32, y: u32| (x as usize * n + y as usize) * r;
    let mut t2 = Vec::new();
    for x in 0..n as u32 {
        let a = m.act(x);
        for y in 0..n as u32 {
            for z in 0..n as u32 {
                let row0 = ((x as usize * n + y as usize) * n + z as usize) * r;
                for i in 0..r {
                    for j in 0..r {
                        t2.push((row0 + i, c2(y, z) + j, a.get(i, j)));
                    }
                    t2.push((row0 + i, c2(g.mul(x, y), z) + i, p - 1));
                    t2.push((row0 + i, c2(x, g.mul(y, z)) + i, 1));
                    t2.push((row0 + i, c2(x, y) + i, p - 1));
                }
            }
        }
    }
    let d2 = SparseMat::accumulate(n * n * n * r, n * n * r, p, t2.into_iter().filter(|t| t.2 % p != 0))?;
    let r1 = sparse_rank_fp(&d1, p)?;
    let r2 = sparse_rank_fp(&d2, p)?;
    Ok(n * n * r - r2 - r1)
}

/// The p-primary part of H²(G, Q/Z) computed as H²(G, Z/p^k)/δH¹(G, Q/Z), p^k the p-part of |G|.
#[derive(Clone, Debug)]
pub struct QzProxyPart {
    pub p: u64,
    pub k: u32,
    pub classes: H2Classes,
}

impl QzProxyPart {
    pub fn proxy(&self) -> String {
        format!("Z/{}^{} (trivial action) modulo Bockstein images", self.p, self.k)
    }
}

fn prime_parts(order: usize) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = order as u64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Bockstein images of Hom(G, Z/N) in reduced coordinates.
fn bockstein(bar: &ReducedBar, g: &FiniteGroup, modulus: u64) -> Result<Vec<Vec<u64>>> {
    let triv = GModule::trivial(g, modulus, 1)?;
    let h1 = H1Basis::new(g, &triv)?;
    let mut out = Vec::new();
    for z in h1.cocycle_generators() {
        let a = h1.cocycle(z)?;
        let mut c = vec![Vec::new(); g.order() * g.order()];
        for x in 0..g.order() as u32 {
            for y in 0..g.order() as u32 {
                let s = a.value(x)[0] + a.value(y)[0] - a.value(g.mul(x, y))[0];
                c[x as usize * g.order() + y as usize] = vec![s / modulus];
            }
        }
        let v = bar.reduce(&c);
        if v.iter().any(|&t| t != 0) {
            out.push(v);
        }
    }
    Ok(out)
}

fn qz_part(g: &FiniteGroup, p: u64, k: u32, symmetric: bool) -> Result<(H2Classes, Option<H2Classes>)> {
    let modulus = p.pow(k);
    let m = GModule::trivial(g, modulus, 1)?;
    let (bar, z2, sym) = build_h2(g, &m, symmetric)?;
    let bock = bockstein(&bar, g, modulus)?;
    let h2 = classes(bar.clone(), z2, bock.clone())?;
    let b0 = match sym {
        Some(zs) => Some(classes(bar, zs, bock)?),
        None => None,
    };
    Ok((h2, b0))
}

/// H²(G, Q/Z) by primary parts.
pub fn h2_qz_proxy(g: &FiniteGroup) -> Result<Vec<QzProxyPart>> {
    prime_parts(g.order())
        .into_iter()
        .map(|(p, k)| {
            let (classes, _) = qz_part(g, p, k, false)?;
            Ok(QzProxyPart { p, k, classes })
        })
        .collect()
}

/// One primary part of B₀(G).
#[derive(Clone, Debug, Serialize)]
pub struct BogomolovPart {
    pub p: u64,
    pub k: u32,
    pub h2_invariants: Vec<u32>,
    pub b0_invariants: Vec<u32>,
    /// Reduced cocycles generating the B₀ part (modulo coboundaries and Bockstein images).
    pub generators: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BogomolovReport {
    pub order: usize,
    pub method: &'static str,
    pub parts: Vec<BogomolovPart>,
}

impl BogomolovReport {
    pub fn is_trivial(&self) -> bool {
        self.parts.iter().all(|p| p.b0_invariants.is_empty())
    }

    pub fn proxy(&self) -> String {
        let v: Vec<String> = self.parts.iter().map(|p| format!("Z/{}^{}", p.p, p.k)).collect();
        format!("trivial-action {} modulo Bockstein images", v.join(" ⊕ "))
    }
}

/// B₀(G): classes whose representatives are symmetric on every commuting pair, which is
/// exactly the kernel of restriction to all bicyclic subgroups.
pub fn bogomolov(g: &FiniteGroup) -> Result<BogomolovReport> {
    let mut parts = Vec::new();
    for (p, k) in prime_parts(g.order()) {
        let (h2, b0) = qz_part(g, p, k, true)?;
        let b0 = b0.unwrap();
        parts.push(BogomolovPart {
            p,
            k,
            h2_invariants: h2.invariants().to_vec(),
            b0_invariants: b0.invariants().to_vec(),
            generators: if b0.bar.unknowns == 0 { Vec::new() } else { b0.quotient.generators.clone() },
        });
    }
    Ok(BogomolovReport {
        order: g.order(),
        method: "commuting-pair symmetry",
        parts,
    })
}

/// Maximal elements (under inclusion) of the bicyclic subgroups.
fn maximal_bicyclic(g: &FiniteGroup) -> Vec<Vec<u32>> {
    let all = g.bicyclic_subgroups();
    all.iter()
        .filter(|h| {
            !all.iter()
                .any(|k| k.len() > h.len() && h.iter().all(|x| k.binary_search(x).is_ok()))
        })
        .cloned()
        .collect()
}

/// B₀(G) as the intersection of the kernels of restriction to the bicyclic subgroups, each
/// restricted cocycle tested against coboundaries and Bockstein images of the subgroup.
pub fn bogomolov_via_restriction(g: &FiniteGroup) -> Result<BogomolovReport> {
    let mut parts = Vec::new();
    let subs = maximal_bicyclic(g);
    for (p, k) in prime_parts(g.order()) {
        let modulus = p.pow(k);
        let (h2, _) = qz_part(g, p, k, false)?;
        let bar = &h2.bar;
        let nz = h2.z2.len();
        if nz == 0 {
            parts.push(BogomolovPart {
                p,
                k,
                h2_invariants: Vec::new(),
                b0_invariants: Vec::new(),
                generators: Vec::new(),
            });
            continue;
        }
        let zmat = DenseMat::from_cols(&h2.z2, bar.unknowns, modulus)?;
        // columns of w span the current subgroup of cocycle coefficients
        let mut w = DenseMat::identity(nz, modulus);
        for hs in &subs {
            if w.cols() == 0 {
                break;
            }
            let (sub, emb) = g.subgroup(hs)?;
            let nh = sub.order();
            // restriction rows: c(x, y) for x, y in H
            let mut rrows = Vec::with_capacity(nh * nh);
            for &x in &emb {
                let f = bar.forms_at(x);
                for &y in &emb {
                    rrows.push(f[y as usize][0].clone());
                }
            }
            let rmat = DenseMat::from_rows(&rrows, modulus)?;
            let restricted = mat_mul(&mat_mul(&rmat, &zmat)?, &w)?;
            // coboundaries and Bockstein images on H, as full cochains
            let mut ycols: Vec<Vec<u64>> = Vec::new();
            for z in 0..nh as u32 {
                let mut v = vec![0u64; nh * nh];
                for a in 0..nh as u32 {
                    for b in 0..nh as u32 {
                        let mut t = 0u64;
                        if b == z {
                            t = add_mod(t, 1, modulus);
                        }
                        if sub.mul(a, b) == z {
                            t = sub_mod(t, 1, modulus);
                        }
                        if a == z {
                            t = add_mod(t, 1, modulus);
                        }
                        v[a as usize * nh + b as usize] = t;
                    }
                }
                ycols.push(v);
            }
            let triv = GModule::trivial(&sub, modulus, 1)?;
            let hh = H1Basis::new(&sub, &triv)?;
            for zc in hh.cocycle_generators() {
                let a = hh.cocycle(zc)?;
                let mut v = vec![0u64; nh * nh];
                for x in 0..nh as u32 {
                    for y in 0..nh as u32 {
                        let s = a.value(x)[0] + a.value(y)[0] - a.value(sub.mul(x, y))[0];
                        v[x as usize * nh + y as usize] = s / modulus;
                    }
                }
                ycols.push(v);
            }
            let t = w.cols();
            let big = DenseMat::from_fn(nh * nh, t + ycols.len(), modulus, |i, j| {
                if j < t {
                    restricted.get(i, j)
                } else {
                    (modulus - ycols[j - t][i]) % modulus
                }
            });
            let ker = kernel_pk(&big, p, k)?;
            let tops: Vec<Vec<u64>> = nonzero(ker.into_iter().map(|v| v[..t].to_vec()).collect());
            let new_cols: Vec<Vec<u64>> = tops
                .iter()
                .map(|c| w.mul_vec(c))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let new_cols = nonzero(new_cols);
            w = if new_cols.is_empty() {
                DenseMat::zeros(nz, 0, modulus)
            } else {
                DenseMat::from_cols(&new_cols, nz, modulus)?
            };
        }
        let gens: Vec<Vec<u64>> = (0..w.cols())
            .map(|j| zmat.mul_vec(&w.col(j)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let gens = nonzero(gens);
        let mut y = h2.b2.clone();
        y.extend(h2.extra.iter().cloned());
        let q = quotient_cols(&gens, &y, bar.unknowns, p, k)?;
        parts.push(BogomolovPart {
            p,
            k,
            h2_invariants: h2.invariants().to_vec(),
            b0_invariants: q.invariants.clone(),
            generators: if bar.unknowns == 0 { Vec::new() } else { q.generators.clone() },
        });
    }
    Ok(BogomolovReport {
        order: g.order(),
        method: "restriction to maximal bicyclic subgroups",
        parts,
    })
}

/// Whether the two reports describe the same subgroups of H² (generators span the same
/// classes modulo coboundaries and Bockstein images).
pub fn same_b0(g: &FiniteGroup, a: &BogomolovReport, b: &BogomolovReport) -> Result<bool> {
    if a.parts.len() != b.parts.len() {
        return Ok(false);
    }
    for (pa, pb) in a.parts.iter().zip(&b.parts) {
        if pa.p != pb.p || pa.b0_invariants != pb.b0_invariants {
            return Ok(false);
        }
        let (h2, _) = qz_part(g, pa.p, pa.k, false)?;
        let mut y = h2.b2.clone();
        y.extend(h2.extra.iter().cloned());
        for (u, v) in [(&pa.generators, &pb.generators), (&pb.generators, &pa.generators)] {
            let mut span = v.clone();
            span.extend(y.iter().cloned());
            for x in u {
                if !in_span_pk(&span, x, pa.p, pa.k)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
