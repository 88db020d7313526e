//! Conjugacy classes of U¹, the induced action of A on them, and the outer exponent.

use serde::Serialize;
use thiserror::Error;

use crate::modarith::{in_span_fp, is_prime, rref_fp, span_basis_fp, DenseMat};
use crate::unigroup::{b_fixed_space, b_pairs, elem_gen, entry_pos, num_entries, AVec, BVec, UniTri};

/// Default enumeration budget for U¹ (number of elements).
pub const DEFAULT_MAX_ELEMS: u64 = 1 << 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConjError {
    #[error("budget exceeded: |U¹| = {required} > {budget}")]
    Budget { required: u128, budget: u64 },
    #[error("element is not in U¹")]
    NotInU1,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, ConjError>;

/// The partition of U¹(n, p) into U¹-conjugacy classes.
#[derive(Clone, Debug)]
pub struct ConjClasses {
    n: usize,
    p: u32,
    /// number of strictly-upper entries outside the first diagonal
    k: usize,
    class_of: Vec<u32>,
    reps: Vec<u64>,
    sizes: Vec<u64>,
    table: AActionTable,
}

/// Per generator ē_{i,i+1} of A, the permutation it induces on class ids.
#[derive(Clone, Debug, Default)]
pub struct AActionTable {
    pub perms: Vec<Vec<u32>>,
}

impl AActionTable {
    pub fn is_permutation(&self) -> bool {
        self.perms.iter().all(|perm| {
            let mut seen = vec![false; perm.len()];
            perm.iter().all(|&c| {
                let c = c as usize;
                c < seen.len() && !std::mem::replace(&mut seen[c], true)
            })
        })
    }

    /// Whether the generator permutations pairwise commute.
    pub fn generators_commute(&self) -> bool {
        let g = &self.perms;
        (0..g.len()).all(|i| {
            (0..g.len()).all(|j| (0..g[i].len()).all(|c| g[i][g[j][c] as usize] == g[j][g[i][c] as usize]))
        })
    }
}

fn u1_size(n: usize, p: u32) -> Option<u128> {
    (p as u128).checked_pow((num_entries(n) - n) as u32)
}

pub fn conj_classes(n: usize, p: u32) -> Result<ConjClasses> {
    conj_classes_with_budget(n, p, DEFAULT_MAX_ELEMS)
}

pub fn conj_classes_with_budget(n: usize, p: u32, budget: u64) -> Result<ConjClasses> {
    if n < 2 {
        return Err(ConjError::Precondition("n must be at least 2".into()));
    }
    if !is_prime(p as u64) {
        return Err(ConjError::Precondition(format!("{p} is not prime")));
    }
    let size = u1_size(n, p).unwrap_or(u128::MAX);
    if size > budget as u128 || size > u32::MAX as u128 {
        return Err(ConjError::Budget {
            required: size,
            budget,
        });
    }
    let size = size as usize;
    let k = num_entries(n) - n;
    let pw: Vec<u64> = (0..k).map(|t| (p as u64).pow(t as u32)).collect();
    // digit slot of (i, j) with j − i ≥ 2
    let slot = |i: usize, j: usize| entry_pos(n, i, j) - n;
    let gens: Vec<(usize, usize)> = (2..=3usize.min(n))
        .flat_map(|d| (0..=n - d).map(move |i| (i, i + d)))
        .collect();

    let mut parent: Vec<u32> = (0..size as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let gp = parent[parent[x as usize] as usize];
            parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    let pm = p as u64;
    let mut digits = vec![0u32; k];
    let mut full = vec![vec![0u32; n + 1]; n + 1];
    for idx in 0..size {
        let mut t = idx as u64;
        for d in digits.iter_mut() {
            *d = (t % pm) as u32;
            t /= pm;
        }
        for d in 2..=n {
            for i in 0..=n - d {
                full[i][i + d] = digits[slot(i, i + d)];
            }
        }
        let ra = find(&mut parent, idx as u32);
        for &(a, b) in &gens {
            // e_ab X e_ab⁻¹: row a += row b right of b, column b −= column a above a
            let mut y = idx as i64;
            for c in b + 1..=n {
                let add = full[b][c];
                if add != 0 {
                    let old = full[a][c];
                    let new = (old + add) % p;
                    y += (new as i64 - old as i64) * pw[slot(a, c)] as i64;
                }
            }
            for r in 0..a {
                let sub = full[r][a];
                if sub != 0 {
                    let old = full[r][b];
                    let new = (old + p - sub) % p;
                    y += (new as i64 - old as i64) * pw[slot(r, b)] as i64;
                }
            }
            let y = y as u32;
            if y as usize != idx {
                let ra2 = find(&mut parent, ra);
                let rb = find(&mut parent, y);
                if ra2 != rb {
                    let (lo, hi) = if ra2 < rb { (ra2, rb) } else { (rb, ra2) };
                    parent[hi as usize] = lo;
                }
            }
        }
    }
    // parent[x] ≤ x throughout, so one ascending pass compresses fully
    for idx in 0..size {
        let q = parent[idx] as usize;
        parent[idx] = parent[q];
    }
    let mut reps = Vec::new();
    let mut sizes: Vec<u64> = Vec::new();
    for idx in 0..size {
        let r = parent[idx] as usize;
        if r == idx {
            parent[idx] = reps.len() as u32;
            reps.push(idx as u64);
            sizes.push(1);
        } else {
            let c = parent[r];
            parent[idx] = c;
            sizes[c as usize] += 1;
        }
    }
    let mut cc = ConjClasses {
        n,
        p,
        k,
        class_of: parent,
        reps,
        sizes,
        table: AActionTable::default(),
    };
    cc.table = cc.build_action_table();
    Ok(cc)
}

impl ConjClasses {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn num_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn u1_order(&self) -> usize {
        self.class_of.len()
    }

    pub fn class_size(&self, c: u32) -> u64 {
        self.sizes[c as usize]
    }

    pub fn action_table(&self) -> &AActionTable {
        &self.table
    }

    /// Dense index of an element of U¹.
    pub fn index_of(&self, x: &UniTri) -> Result<u64> {
        if x.n() != self.n || x.modulus() != self.p || x.lcs_level() < 1 {
            return Err(ConjError::NotInU1);
        }
        let e = &x.entries()[self.n..];
        let mut idx = 0u64;
        for &d in e.iter().rev() {
            idx = idx * self.p as u64 + d as u64;
        }
        Ok(idx)
    }

    pub fn element(&self, idx: u64) -> UniTri {
        let mut x = UniTri::identity(self.n, self.p);
        let mut t = idx;
        let pos = crate::unigroup::positions(self.n);
        for &(i, j) in pos[self.n..].iter() {
            x.set(i, j, (t % self.p as u64) as u32);
            t /= self.p as u64;
        }
        debug_assert_eq!(t, 0);
        let _ = self.k;
        x
    }

    pub fn class_of(&self, x: &UniTri) -> Result<u32> {
        Ok(self.class_of[self.index_of(x)? as usize])
    }

    pub fn class_of_index(&self, idx: u64) -> u32 {
        self.class_of[idx as usize]
    }

    /// Canonical representative: the element of minimal index.
    pub fn rep(&self, c: u32) -> UniTri {
        self.element(self.reps[c as usize])
    }

    pub fn rep_index(&self, c: u32) -> u64 {
        self.reps[c as usize]
    }

    fn build_action_table(&self) -> AActionTable {
        let perms = (0..self.n)
            .map(|i| {
                let g = elem_gen(self.n, self.p, i, i + 1, 1).unwrap();
                let gi = g.inv();
                (0..self.num_classes() as u32)
                    .map(|c| {
                        let q = self.rep(c);
                        self.class_of(&g.mul(&q).mul(&gi)).expect("U¹ is normal")
                    })
                    .collect()
            })
            .collect();
        AActionTable { perms }
    }

    /// Permutation of class ids induced by s, composed from the generator table.
    pub fn action_perm(&self, s: &AVec) -> Vec<u32> {
        let mut perm: Vec<u32> = (0..self.num_classes() as u32).collect();
        for (i, &a) in s.a.iter().enumerate() {
            let g = &self.table.perms[i];
            for _ in 0..a {
                for c in perm.iter_mut() {
                    *c = g[*c as usize];
                }
            }
        }
        perm
    }

    /// The class of S·rep(c)·S⁻¹, checked against the closed-form matrix.
    pub fn act_on_class(&self, s: &AVec, c: u32) -> Result<u32> {
        if s.n != self.n || s.p != self.p {
            return Err(ConjError::Precondition("σ has the wrong shape".into()));
        }
        if c as usize >= self.num_classes() {
            return Err(ConjError::Precondition(format!("unknown class {c}")));
        }
        let q = self.rep(c);
        let sm = s.lift();
        let m = q.conj_by(&sm);
        let closed = aide_matrix(s, &q);
        if closed != m {
            return Err(ConjError::Inconsistent(format!(
                "closed form {closed:?} differs from S·Q·S⁻¹ = {m:?}"
            )));
        }
        self.class_of(&m)
    }

    pub fn fixed_classes(&self, s: &AVec) -> Vec<u32> {
        let perm = self.action_perm(s);
        (0..self.num_classes() as u32).filter(|&c| perm[c as usize] == c).collect()
    }

    /// Basis (reduced echelon) of the span of the B-images of the σ-fixed classes.
    pub fn image_span_in_b(&self, s: &AVec) -> Result<Vec<Vec<u64>>> {
        let pairs = b_pairs(self.n);
        let p = self.p as u64;
        let vecs: Vec<Vec<u64>> = self
            .fixed_classes(s)
            .into_iter()
            .map(|c| {
                let r = self.rep(c);
                pairs.iter().map(|&(i, j)| r.get(i, j) as u64).collect()
            })
            .collect();
        let basis = span_basis_fp(&vecs, pairs.len(), p).map_err(|e| ConjError::Inconsistent(e.to_string()))?;
        let fixed = b_fixed_space(s);
        for v in &basis {
            if !in_span_fp(&fixed, v, p).map_err(|e| ConjError::Inconsistent(e.to_string()))? {
                return Err(ConjError::Inconsistent(format!(
                    "image vector {v:?} is not σ-invariant"
                )));
            }
        }
        Ok(basis)
    }

    /// The σ-invariant class lifting b, built from the second-diagonal matrix Q.
    pub fn fixed_class_lift(&self, s: &AVec, b: &BVec) -> Result<Option<u32>> {
        if b.n != self.n || b.p != self.p {
            return Err(ConjError::Precondition("b has the wrong shape".into()));
        }
        for (k, &(i, j)) in b_pairs(self.n).iter().enumerate() {
            if j - i == 3 && b.b[k] != 0 {
                return Err(ConjError::Precondition(
                    "b must be supported on the second diagonal".into(),
                ));
            }
        }
        if crate::unigroup::a_act_on_b_conj(s, b) != *b {
            return Err(ConjError::Precondition("b is not σ-invariant".into()));
        }
        let q = b.lift();
        let c = self.class_of(&q)?;
        Ok((self.act_on_class(s, c)? == c).then_some(c))
    }

    /// τ applied to a class.
    pub fn tau_class(&self, c: u32) -> u32 {
        self.class_of(&self.rep(c).tau()).expect("τ preserves U¹")
    }
}

/// M = S·Q·S⁻¹ by the closed-form entry formula for the lift S of σ.
pub fn aide_matrix(s: &AVec, q: &UniTri) -> UniTri {
    let n = q.n();
    let m = q.modulus() as i64;
    let a: Vec<i64> = s.a.iter().map(|&x| x as i64).collect();
    let mut out = UniTri::identity(n, q.modulus());
    for d in 1..=n {
        for i in 0..=n - d {
            let j = i + d;
            let mut acc = q.entry(i, j) as i64;
            for mm in i + 2..j {
                let mut prod = 1i64;
                for l in mm + 1..j {
                    prod = prod * a[l] % m;
                }
                let inner = (q.entry(i, mm) as i64 * a[mm] - a[i] * q.entry(i + 1, mm + 1) as i64) % m;
                let sign = if (j - mm) % 2 == 0 { 1 } else { -1 };
                acc = (acc + sign * inner * prod) % m;
            }
            out.set(i, j, acc.rem_euclid(m) as u32);
        }
    }
    out
}

/// Outcome of the outer-exponent computation.
#[derive(Clone, Debug, Serialize)]
pub struct OuterExponent {
    pub n: usize,
    pub p: u32,
    /// exponent of U¹
    pub d: u64,
    /// smallest e | d with [x^i] = [x] for all x whenever i ≡ 1 mod e
    pub e: u64,
    /// the same minimum taken over units i ∈ (Z/d)* only
    pub literal_unit_e: u64,
    /// residues i mod d with [x^i] = [x] for every x
    pub invariant_residues: Vec<u64>,
    pub class_count: usize,
    pub u1_order: usize,
}

fn element_order(x: &UniTri, p: u64) -> u64 {
    let mut ord = 1u64;
    let mut y = x.clone();
    while !y.is_identity() {
        y = y.pow(p);
        ord *= p;
    }
    ord
}

pub fn outer_exponent(classes: &ConjClasses) -> OuterExponent {
    let p = classes.p() as u64;
    let reps: Vec<UniTri> = (0..classes.num_classes() as u32).map(|c| classes.rep(c)).collect();
    let d = reps.iter().map(|x| element_order(x, p)).max().unwrap_or(1);
    let invariant: Vec<u64> = (0..d)
        .filter(|&i| {
            reps.iter().enumerate().all(|(c, x)| {
                classes.class_of(&x.pow(i)).expect("powers stay in U¹") == c as u32
            })
        })
        .collect();
    let inv_set: std::collections::HashSet<u64> = invariant.iter().copied().collect();
    let divisors: Vec<u64> = (1..=d).filter(|e| d % e == 0).collect();
    let smallest = |units_only: bool| {
        divisors
            .iter()
            .copied()
            .find(|&e| {
                (0..d)
                    .filter(|&i| i % e == 1 % e)
                    .filter(|&i| !units_only || crate::modarith::gcd(i, d) == 1)
                    .all(|i| inv_set.contains(&i))
            })
            .unwrap_or(d)
    };
    OuterExponent {
        n: classes.n(),
        p: classes.p(),
        d,
        e: smallest(false),
        literal_unit_e: smallest(true),
        invariant_residues: invariant,
        class_count: classes.num_classes(),
        u1_order: classes.u1_order(),
    }
}

/// The case of the construction used to produce b from σ (requires a_0, a_4 ≠ 0, n = 5).
pub fn theta_case(s: &AVec) -> Result<(u8, BVec)> {
    if s.n != 5 {
        return Err(ConjError::Precondition("n must be 5".into()));
    }
    let a = &s.a;
    let p = s.p;
    if a[0] == 0 || a[4] == 0 {
        return Err(ConjError::Precondition("a_0 and a_4 must be nonzero".into()));
    }
    let mut b = BVec::zero(5, p);
    let set = |b: &mut BVec, i: usize, j: usize, v: u64| {
        let k = b_pairs(5).iter().position(|&q| q == (i, j)).unwrap();
        b.b[k] = (v % p as u64) as u32;
    };
    let case = if a[2] == 0 {
        set(&mut b, 0, 2, 1);
        set(&mut b, 3, 5, 1);
        1
    } else if a[3] == 0 {
        set(&mut b, 0, 2, a[0] as u64);
        set(&mut b, 1, 3, a[2] as u64);
        2
    } else if a[1] == 0 {
        set(&mut b, 3, 5, a[4] as u64);
        set(&mut b, 2, 4, a[2] as u64);
        3
    } else {
        for i in 0..4 {
            set(&mut b, i, i + 2, a[i] as u64 * a[i + 1] as u64);
        }
        4
    };
    Ok((case, b))
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub p: u32,
    pub b: Vec<u32>,
    /// rows: Θ_Q(ē_{ij}) for (i,j) in B order; columns: exponents of e04, e15, e05
    pub matrix: Vec<Vec<u32>>,
    pub rank: usize,
    pub surjective: bool,
    pub listed_values_match: bool,
    pub mismatches: Vec<String>,
    /// all lifts of ē14 + b lie in the class of Q (only when classes were supplied)
    pub unique_lift_class: Option<bool>,
}

/// Θ_Q(M̄) = M⁻¹QMQ⁻¹ for the Q built from b (with Q_{1,4} = 1), n = 5.
pub fn theta_surjectivity(p: u32, b: &BVec, classes: Option<&ConjClasses>) -> Result<ThetaReport> {
    let n = 5;
    if b.n != n || b.p != p {
        return Err(ConjError::Precondition("b must be a BVec for n = 5".into()));
    }
    if b.coeff(1, 4) != 1 % p || b.coeff(0, 3) != 0 || b.coeff(2, 5) != 0 {
        return Err(ConjError::Precondition(
            "b needs ē14 coefficient 1 and no ē03, ē25 terms".into(),
        ));
    }
    let bi = |i: usize| b.coeff(i, i + 2) as u64;
    let pm = p as u64;
    if (bi(0) * bi(1)) % pm == 0 && (bi(2) * bi(3)) % pm == 0 && (bi(0) * bi(3)) % pm == 0 {
        return Err(ConjError::Precondition(
            "need b0·b1, b2·b3 or b0·b3 nonzero".into(),
        ));
    }
    let q = b.lift();
    let qi = q.inv();
    let u3 = [(0usize, 4usize), (1, 5), (0, 5)];
    let mut rows = Vec::new();
    let mut theta_of = std::collections::HashMap::new();
    for &(i, j) in &b_pairs(n) {
        let m = elem_gen(n, p, i, j, 1).unwrap();
        let t = m.inv().mul(&q).mul(&m).mul(&qi);
        if t.lcs_level() < 3 {
            return Err(ConjError::Inconsistent(format!("Θ_Q(ē{i}{j}) = {t:?} is not in U³")));
        }
        let row: Vec<u32> = u3.iter().map(|&(a, c)| t.get(a, c)).collect();
        theta_of.insert((i, j), row.clone());
        rows.push(row);
    }
    let mat = DenseMat::from_rows(
        &rows.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect::<Vec<Vec<u64>>>(),
        pm,
    )
    .map_err(|e| ConjError::Inconsistent(e.to_string()))?;
    let rank = rref_fp(&mat, pm).map_err(|e| ConjError::Inconsistent(e.to_string()))?.rank;
    let neg = |x: u64| ((pm - x % pm) % pm) as u32;
    let pos = |x: u64| (x % pm) as u32;
    let listed: [((usize, usize), [u32; 3]); 6] = [
        ((2, 4), [pos(bi(0)), 0, 0]),
        ((2, 5), [0, 0, pos(bi(0))]),
        ((3, 5), [0, pos(bi(1)), 0]),
        ((0, 2), [neg(bi(2)), 0, 0]),
        ((0, 3), [0, 0, neg(bi(3))]),
        ((1, 3), [0, neg(bi(3)), 0]),
    ];
    let mut mismatches = Vec::new();
    for (key, want) in listed {
        let got = &theta_of[&key];
        if got.as_slice() != want {
            mismatches.push(format!("Θ_Q(ē{}{}) = {:?}, listed {:?}", key.0, key.1, got, want));
        }
    }
    let unique = match classes {
        Some(cc) if cc.n() == n && cc.p() == p => {
            let cq = cc.class_of(&q)?;
            let mut all = true;
            for x in 0..pm {
                for y in 0..pm {
                    for z in 0..pm {
                        let w = UniTri::from_entries(n, p, &[(0, 4, x as i64), (1, 5, y as i64), (0, 5, z as i64)])
                            .unwrap();
                        if cc.class_of(&w.mul(&q))? != cq {
                            all = false;
                        }
                    }
                }
            }
            Some(all)
        }
        _ => None,
    };
    Ok(ThetaReport {
        p,
        b: b.b.clone(),
        matrix: rows,
        rank,
        surjective: rank == 3,
        listed_values_match: mismatches.is_empty(),
        mismatches,
        unique_lift_class: unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n3_classes_are_singletons() {
        let cc = conj_classes(3, 2).unwrap();
        assert_eq!(cc.num_classes(), 8);
        let cc = conj_classes(3, 3).unwrap();
        assert_eq!(cc.num_classes(), 27);
    }

    #[test]
    fn budget_is_reported() {
        let err = conj_classes_with_budget(5, 3, 100).unwrap_err();
        assert!(matches!(err, ConjError::Budget { required: 59049, .. }));
    }
}
