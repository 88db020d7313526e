//! Exact arithmetic and linear algebra over Z/m and F_p.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("modulus must lie in [1, 2^31], got {0}")]
    BadModulus(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("{0} is not a unit modulo {1}")]
    NotUnit(u64, u64),
    #[error("duplicate sparse entry at ({0}, {1})")]
    DuplicateEntry(usize, usize),
    #[error("sparse entry ({0}, {1}) out of range")]
    EntryOutOfRange(usize, usize),
}

pub type Result<T> = std::result::Result<T, ArithError>;

// ---------------------------------------------------------------------------
// scalar helpers

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a * b) % m
}

#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Reduce a signed integer into [0, m).
#[inline]
pub fn reduce_i64(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = ((a % m) as i64, m as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(reduce_i64(old_s, m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Decompose `m = p^k` with `p` prime and `k >= 1`.
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= m && m % p != 0 {
        p += 1;
    }
    if m % p != 0 {
        p = m;
    }
    let mut k = 0;
    let mut r = m;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// p-adic valuation of `a` in Z/p^k (returns k for zero).
#[inline]
pub fn valuation(mut a: u64, p: u64, k: u32) -> u32 {
    if a == 0 {
        return k;
    }
    if p == 2 {
        return a.trailing_zeros().min(k);
    }
    let mut v = 0;
    while a % p == 0 && v < k {
        a /= p;
        v += 1;
    }
    v
}

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 || m > MAX_MODULUS {
        Err(ArithError::BadModulus(m))
    } else {
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ArithError::NotPrime(p))
    }
}

// ---------------------------------------------------------------------------
// Residue

/// An element of Z/m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Residue {
            value: value % modulus,
            modulus,
        })
    }

    pub fn from_i64(value: i64, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Residue {
            value: reduce_i64(value, modulus),
            modulus,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        gcd(self.value, self.modulus) == 1
    }

    pub fn inv(&self) -> Result<Self> {
        inv_mod(self.value, self.modulus)
            .map(|v| Residue {
                value: v,
                modulus: self.modulus,
            })
            .ok_or(ArithError::NotUnit(self.value, self.modulus))
    }

    pub fn pow(&self, e: u64) -> Self {
        Residue {
            value: pow_mod(self.value, e, self.modulus),
            modulus: self.modulus,
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(*self + *o)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(*self * *o)
    }

    fn same(&self, o: &Self) -> Result<()> {
        if self.modulus != o.modulus {
            Err(ArithError::ModulusMismatch(self.modulus, o.modulus))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, o: Residue) -> Residue {
        assert_eq!(self.modulus, o.modulus, "residue modulus mismatch");
        Residue {
            value: add_mod(self.value, o.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, o: Residue) -> Residue {
        assert_eq!(self.modulus, o.modulus, "residue modulus mismatch");
        Residue {
            value: sub_mod(self.value, o.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, o: Residue) -> Residue {
        assert_eq!(self.modulus, o.modulus, "residue modulus mismatch");
        Residue {
            value: mul_mod(self.value, o.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: neg_mod(self.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

// ---------------------------------------------------------------------------
// DenseMat

/// Row-major dense matrix over Z/m.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DenseMat {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl DenseMat {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> Self {
        assert!(modulus >= 1 && modulus <= MAX_MODULUS, "bad modulus {modulus}");
        DenseMat {
            rows,
            cols,
            modulus,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(ArithError::DimensionMismatch(format!(
                    "row {i} has length {} (expected {cols})",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&x| x % modulus));
        }
        Ok(DenseMat {
            rows: rows.len(),
            cols,
            modulus,
            data,
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], modulus: u64) -> Result<Self> {
        let r: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| reduce_i64(x, modulus)).collect())
            .collect();
        Self::from_rows(&r, modulus)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<u64>], rows: usize, modulus: u64) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len(), modulus);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(ArithError::DimensionMismatch(format!(
                    "column {j} has length {} (expected {rows})",
                    c.len()
                )));
            }
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x % modulus);
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, modulus: u64, f: impl Fn(usize, usize) -> u64) -> Self {
        let mut m = Self::zeros(rows, cols, modulus);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % modulus;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.modulus;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> DenseMat {
        DenseMat::from_fn(self.cols, self.rows, self.modulus, |i, j| self.get(j, i))
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(ArithError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let m = self.modulus;
        Ok((0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for (a, b) in self.row(i).iter().zip(v) {
                    acc += (*a as u128) * (*b as u128);
                }
                (acc % m as u128) as u64
            })
            .collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &DenseMat) -> Result<DenseMat> {
        if self.rows != other.rows {
            return Err(ArithError::DimensionMismatch("hstack row counts differ".into()));
        }
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        let cols = self.cols + other.cols;
        Ok(DenseMat::from_fn(self.rows, cols, self.modulus, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                other.get(i, j - self.cols)
            }
        }))
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &DenseMat) -> Result<DenseMat> {
        if self.cols != other.cols {
            return Err(ArithError::DimensionMismatch("vstack column counts differ".into()));
        }
        if self.modulus != other.modulus {
            return Err(ArithError::ModulusMismatch(self.modulus, other.modulus));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(DenseMat {
            rows: self.rows + other.rows,
            cols: self.cols,
            modulus: self.modulus,
            data,
        })
    }

    pub fn push_row(&mut self, r: &[u64]) {
        assert_eq!(r.len(), self.cols);
        self.data.extend(r.iter().map(|&x| x % self.modulus));
        self.rows += 1;
    }

    /// Rows `lo..hi` as a new matrix.
    pub fn row_block(&self, lo: usize, hi: usize) -> DenseMat {
        DenseMat {
            rows: hi - lo,
            cols: self.cols,
            modulus: self.modulus,
            data: self.data[lo * self.cols..hi * self.cols].to_vec(),
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> DenseMat {
        DenseMat::from_fn(self.rows, idx.len(), self.modulus, |i, j| self.get(i, idx[j]))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        for j in 0..c {
            self.data.swap(a * c + j, b * c + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        for i in 0..self.rows {
            self.data.swap(i * c + a, i * c + b);
        }
    }

    /// row[dst] -= f * row[src] for columns >= from
    fn row_axpy(&mut self, dst: usize, src: usize, f: u64, from: usize) {
        let (m, c) = (self.modulus, self.cols);
        let nf = neg_mod(f % m, m);
        if nf == 0 {
            return;
        }
        for j in from..c {
            let s = self.data[src * c + j];
            if s != 0 {
                let d = &mut self.data[dst * c + j];
                *d = (*d + s * nf) % m;
            }
        }
    }

    /// col[dst] -= f * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, f: u64) {
        let (m, c) = (self.modulus, self.cols);
        let nf = neg_mod(f % m, m);
        if nf == 0 {
            return;
        }
        for i in 0..self.rows {
            let s = self.data[i * c + src];
            if s != 0 {
                let d = &mut self.data[i * c + dst];
                *d = (*d + s * nf) % m;
            }
        }
    }

    fn scale_col(&mut self, j: usize, f: u64) {
        let (m, c) = (self.modulus, self.cols);
        for i in 0..self.rows {
            let d = &mut self.data[i * c + j];
            *d = (*d * f) % m;
        }
    }
}

impl fmt::Display for DenseMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Exact product over Z/m.
pub fn mat_mul(a: &DenseMat, b: &DenseMat) -> Result<DenseMat> {
    if a.modulus != b.modulus {
        return Err(ArithError::ModulusMismatch(a.modulus, b.modulus));
    }
    if a.cols != b.rows {
        return Err(ArithError::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let m = a.modulus;
    let mut out = DenseMat::zeros(a.rows, b.cols, m);
    let mut acc = vec![0u128; b.cols];
    for i in 0..a.rows {
        acc.iter_mut().for_each(|x| *x = 0);
        for k in 0..a.cols {
            let x = a.get(i, k) as u128;
            if x == 0 {
                continue;
            }
            for (j, y) in b.row(k).iter().enumerate() {
                acc[j] += x * (*y as u128);
            }
        }
        for j in 0..b.cols {
            out.data[i * b.cols + j] = (acc[j] % m as u128) as u64;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// SparseMat

/// Sparse matrix over Z/m stored as sorted coordinate triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    modulus: u64,
    triples: Vec<(usize, usize, u64)>,
}

impl SparseMat {
    /// Build from triples; duplicates are rejected and zeros dropped.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        modulus: u64,
        triples: Vec<(usize, usize, u64)>,
    ) -> Result<Self> {
        check_modulus(modulus)?;
        let mut t: Vec<(usize, usize, u64)> = Vec::with_capacity(triples.len());
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(ArithError::EntryOutOfRange(r, c));
            }
            t.push((r, c, v % modulus));
        }
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in t.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(ArithError::DuplicateEntry(w[0].0, w[0].1));
            }
        }
        t.retain(|&(_, _, v)| v != 0);
        Ok(SparseMat {
            rows,
            cols,
            modulus,
            triples: t,
        })
    }

    /// Build from triples, summing duplicates.
    pub fn accumulate(
        rows: usize,
        cols: usize,
        modulus: u64,
        triples: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Result<Self> {
        check_modulus(modulus)?;
        let mut acc: HashMap<(usize, usize), u64> = HashMap::new();
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(ArithError::EntryOutOfRange(r, c));
            }
            let e = acc.entry((r, c)).or_insert(0);
            *e = add_mod(*e, v % modulus, modulus);
        }
        let t: Vec<_> = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        Self::from_triples(rows, cols, modulus, t)
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        SparseMat {
            rows: n,
            cols: n,
            modulus,
            triples: (0..n).map(|i| (i, i, 1 % modulus)).filter(|t| t.2 != 0).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn nnz(&self) -> usize {
        self.triples.len()
    }

    pub fn triples(&self) -> &[(usize, usize, u64)] {
        &self.triples
    }

    pub fn to_dense(&self) -> DenseMat {
        let mut d = DenseMat::zeros(self.rows, self.cols, self.modulus);
        for &(r, c, v) in &self.triples {
            d.set(r, c, v);
        }
        d
    }

    pub fn from_dense(d: &DenseMat) -> Self {
        let mut t = Vec::new();
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                let v = d.get(i, j);
                if v != 0 {
                    t.push((i, j, v));
                }
            }
        }
        SparseMat {
            rows: d.rows(),
            cols: d.cols(),
            modulus: d.modulus(),
            triples: t,
        }
    }
}

// ---------------------------------------------------------------------------
// F_p elimination

/// Reduced row echelon data for a matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    /// Pivot columns, increasing.
    pub pivots: Vec<usize>,
    /// Basis of the right kernel, one vector per free column (in column order).
    pub kernel_basis: Vec<Vec<u64>>,
    /// The nonzero rows of the reduced echelon form.
    pub reduced: DenseMat,
}

fn rref_rows_generic(rows: &mut [Vec<u64>], cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][c], p).expect("nonzero in a field");
        for x in rows[r].iter_mut() {
            *x = (*x * inv) % p;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for j in c..cols {
                if pivot_row[j] != 0 {
                    row[j] = (row[j] + f * pivot_row[j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rref_rows_f2(rows: &[Vec<u64>], cols: usize) -> (Vec<Vec<u64>>, Vec<usize>) {
    let words = cols.div_ceil(64);
    let mut bits: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            let mut w = vec![0u64; words];
            for (j, &x) in r.iter().enumerate() {
                if x & 1 == 1 {
                    w[j / 64] |= 1 << (j % 64);
                }
            }
            w
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == bits.len() {
            break;
        }
        let (wi, bi) = (c / 64, 1u64 << (c % 64));
        let Some(pr) = (r..bits.len()).find(|&i| bits[i][wi] & bi != 0) else {
            continue;
        };
        bits.swap(r, pr);
        let pivot = bits[r].clone();
        for (i, row) in bits.iter_mut().enumerate() {
            if i != r && row[wi] & bi != 0 {
                for w in wi..words {
                    row[w] ^= pivot[w];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let out = bits[..r]
        .iter()
        .map(|w| (0..cols).map(|j| (w[j / 64] >> (j % 64)) & 1).collect())
        .collect();
    (out, pivots)
}

/// Reduced row echelon form over F_p, with rank, pivots and a kernel basis.
pub fn rref_fp(a: &DenseMat, p: u64) -> Result<Rref> {
    check_prime(p)?;
    if a.modulus() != p {
        return Err(ArithError::ModulusMismatch(a.modulus(), p));
    }
    let cols = a.cols();
    let (reduced_rows, pivots) = if p == 2 {
        rref_rows_f2(&a.to_rows(), cols)
    } else {
        let mut rows = a.to_rows();
        let piv = rref_rows_generic(&mut rows, cols, p);
        rows.truncate(piv.len());
        (rows, piv)
    };
    let rank = pivots.len();
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut kernel_basis = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = neg_mod(reduced_rows[r][f], p);
        }
        kernel_basis.push(v);
    }
    let reduced = if reduced_rows.is_empty() {
        DenseMat::zeros(0, cols, p)
    } else {
        DenseMat::from_rows(&reduced_rows, p)?
    };
    Ok(Rref {
        rank,
        pivots,
        kernel_basis,
        reduced,
    })
}

/// Solution set of a linear system over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSolution {
    pub particular: Vec<u64>,
    pub kernel_basis: Vec<Vec<u64>>,
}

/// Solve `a x = b` over F_p; `None` means the system is inconsistent.
pub fn solve_fp(a: &DenseMat, b: &[u64], p: u64) -> Result<Option<FpSolution>> {
    check_prime(p)?;
    if a.modulus() != p {
        return Err(ArithError::ModulusMismatch(a.modulus(), p));
    }
    if b.len() != a.rows() {
        return Err(ArithError::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let bcol = DenseMat::from_cols(&[b.iter().map(|x| x % p).collect()], a.rows(), p)?;
    let aug = a.hstack(&bcol)?;
    let r = rref_fp(&aug, p)?;
    let n = a.cols();
    if r.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![0u64; n];
    for (i, &pc) in r.pivots.iter().enumerate() {
        x[pc] = r.reduced.get(i, n);
    }
    let kernel_basis = r
        .kernel_basis
        .into_iter()
        .filter(|v| v[n] == 0)
        .map(|mut v| {
            v.truncate(n);
            v
        })
        .collect();
    Ok(Some(FpSolution {
        particular: x,
        kernel_basis,
    }))
}

/// Rank of a sparse matrix over F_p by incremental sparse elimination.
pub fn sparse_rank_fp(a: &SparseMat, p: u64) -> Result<usize> {
    check_prime(p)?;
    if a.modulus() != p {
        return Err(ArithError::ModulusMismatch(a.modulus(), p));
    }
    let mut rows: Vec<Vec<(usize, u64)>> = vec![Vec::new(); a.rows()];
    for &(r, c, v) in a.triples() {
        rows[r].push((c, v));
    }
    // pivot rows keyed by leading column, normalized to leading coefficient 1
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    let mut rank = 0;
    for mut row in rows {
        row.sort_unstable_by_key(|&(c, _)| c);
        loop {
            let Some(&(lead, lv)) = row.first() else {
                break;
            };
            match pivots.get(&lead) {
                Some(prow) => {
                    row = sparse_axpy(&row, prow, neg_mod(lv, p), p);
                }
                None => {
                    let inv = inv_mod(lv, p).expect("field");
                    let norm: Vec<_> = row.iter().map(|&(c, v)| (c, (v * inv) % p)).collect();
                    pivots.insert(lead, norm);
                    rank += 1;
                    break;
                }
            }
        }
    }
    Ok(rank)
}

/// `x + f*y` for sorted sparse vectors.
fn sparse_axpy(x: &[(usize, u64)], y: &[(usize, u64)], f: u64, p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            let v = (y[j].1 * f) % p;
            if v != 0 {
                out.push((y[j].0, v));
            }
            j += 1;
        } else {
            let v = (x[i].1 + y[j].1 * f) % p;
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Z/p^k elimination

/// Elementary divisors of a matrix over the local ring Z/p^k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithForm {
    pub p: u64,
    pub k: u32,
    /// Divisors p^{e} in pivot order (nondecreasing valuation), units included.
    pub divisors: Vec<u64>,
    pub valuations: Vec<u32>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    /// log_p of the kernel size for a matrix with `cols` columns.
    pub fn kernel_log(&self, cols: usize) -> u32 {
        self.valuations.iter().sum::<u32>() + self.k * (cols - self.rank()) as u32
    }

    /// log_p of the image size.
    pub fn image_log(&self) -> u32 {
        self.valuations.iter().map(|v| self.k - v).sum()
    }
}

/// Full Smith decomposition `L A V = D` with optional transforms.
#[derive(Clone, Debug)]
pub struct SmithDecomp {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
    /// Valuation of the t-th pivot (D_tt = p^{v_t}).
    pub valuations: Vec<u32>,
    pub v: Option<DenseMat>,
    pub l: Option<DenseMat>,
    pub linv: Option<DenseMat>,
    /// Right-hand sides after the row operations (i.e. `L b`).
    pub rhs: Option<DenseMat>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SmithOptions {
    pub track_v: bool,
    pub track_l: bool,
    pub track_linv: bool,
}

pub fn smith_pk(a: &DenseMat, p: u64, k: u32) -> Result<SmithForm> {
    let d = smith_decompose(a, p, k, SmithOptions::default(), None)?;
    Ok(SmithForm {
        p,
        k,
        divisors: d.valuations.iter().map(|&v| p.pow(v)).collect(),
        valuations: d.valuations,
    })
}

/// Diagonalize `a` over Z/p^k pivoting on minimal valuation (smallest row, then column).
pub fn smith_decompose(
    a: &DenseMat,
    p: u64,
    k: u32,
    opts: SmithOptions,
    rhs: Option<&DenseMat>,
) -> Result<SmithDecomp> {
    check_prime(p)?;
    if k == 0 {
        return Err(ArithError::NotPrimePower(1));
    }
    let m = p.checked_pow(k).filter(|&m| m <= MAX_MODULUS).ok_or(ArithError::BadModulus(u64::MAX))?;
    if a.modulus() != m {
        return Err(match prime_power(a.modulus()) {
            None => ArithError::NotPrimePower(a.modulus()),
            Some(_) => ArithError::ModulusMismatch(a.modulus(), m),
        });
    }
    let (rows, cols) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = opts.track_v.then(|| DenseMat::identity(cols, m));
    let mut l = opts.track_l.then(|| DenseMat::identity(rows, m));
    let mut linv = opts.track_linv.then(|| DenseMat::identity(rows, m));
    let mut rhs = match rhs {
        Some(b) => {
            if b.rows() != rows || b.modulus() != m {
                return Err(ArithError::DimensionMismatch("right-hand side shape".into()));
            }
            Some(b.clone())
        }
        None => None,
    };
    let mut vals = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // minimal valuation pivot
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for i in t..rows {
            let r = &w.data[i * cols..(i + 1) * cols];
            for j in t..cols {
                let x = r[j];
                if x == 0 {
                    continue;
                }
                let val = valuation(x, p, k);
                if best.is_none_or(|b| val < b.0) {
                    best = Some((val, i, j));
                    if val == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        if let Some(l) = l.as_mut() {
            l.swap_rows(t, pi);
        }
        if let Some(li) = linv.as_mut() {
            li.swap_cols(t, pi);
        }
        if let Some(b) = rhs.as_mut() {
            b.swap_rows(t, pi);
        }
        w.swap_cols(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }
        let pv = p.pow(val);
        let unit = w.get(t, t) / pv;
        let uinv = inv_mod(unit, m).expect("unit part");
        // clear column t below the pivot
        for i in t + 1..rows {
            let x = w.data[i * cols + t];
            if x == 0 {
                continue;
            }
            let f = mul_mod(x / pv, uinv, m);
            w.row_axpy(i, t, f, t);
            if let Some(l) = l.as_mut() {
                l.row_axpy(i, t, f, 0);
            }
            if let Some(b) = rhs.as_mut() {
                b.row_axpy(i, t, f, 0);
            }
            if let Some(li) = linv.as_mut() {
                // L <- E L with E = I - f e_{it}; so L^{-1} <- L^{-1} (I + f e_{it})
                li.col_axpy(t, i, neg_mod(f, m));
            }
        }
        // clear row t to the right; only row t is touched in w
        for j in t + 1..cols {
            let x = w.data[t * cols + j];
            if x == 0 {
                continue;
            }
            let f = mul_mod(x / pv, uinv, m);
            w.data[t * cols + j] = 0;
            if let Some(v) = v.as_mut() {
                v.col_axpy(j, t, f);
            }
        }
        w.data[t * cols + t] = pv % m;
        if let Some(v) = v.as_mut() {
            v.scale_col(t, uinv);
        }
        vals.push(val);
        t += 1;
    }
    Ok(SmithDecomp {
        p,
        k,
        modulus: m,
        rows,
        cols,
        valuations: vals,
        v,
        l,
        linv,
        rhs,
    })
}

impl SmithDecomp {
    pub fn rank(&self) -> usize {
        self.valuations.len()
    }

    /// Generators of the kernel as vectors (requires `track_v`).
    pub fn kernel_generators(&self) -> Vec<Vec<u64>> {
        let v = self.v.as_ref().expect("kernel generators need the column transform");
        let m = self.modulus;
        let mut out = Vec::new();
        for t in 0..self.cols {
            let scale = if t < self.rank() {
                let val = self.valuations[t];
                if val == 0 {
                    continue;
                }
                self.p.pow(self.k - val) % m
            } else {
                1
            };
            out.push(v.col(t).into_iter().map(|x| mul_mod(x, scale, m)).collect());
        }
        out
    }
}

/// Generators of the kernel of `a` over Z/p^k.
pub fn kernel_pk(a: &DenseMat, p: u64, k: u32) -> Result<Vec<Vec<u64>>> {
    let d = smith_decompose(
        a,
        p,
        k,
        SmithOptions {
            track_v: true,
            ..Default::default()
        },
        None,
    )?;
    Ok(d.kernel_generators())
}

/// Solution set of `a x = b` over Z/p^k: a particular solution and kernel generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkSolution {
    pub particular: Vec<u64>,
    pub kernel_generators: Vec<Vec<u64>>,
}

pub fn solve_pk(a: &DenseMat, b: &[u64], p: u64, k: u32) -> Result<Option<PkSolution>> {
    if b.len() != a.rows() {
        return Err(ArithError::DimensionMismatch("right-hand side length".into()));
    }
    let m = a.modulus();
    let bcol = DenseMat::from_cols(&[b.iter().map(|x| x % m).collect()], a.rows(), m)?;
    let d = smith_decompose(
        a,
        p,
        k,
        SmithOptions {
            track_v: true,
            ..Default::default()
        },
        Some(&bcol),
    )?;
    let lb = d.rhs.as_ref().unwrap().col(0);
    let mut y = vec![0u64; a.cols()];
    for (t, &yt) in lb.iter().enumerate() {
        if t < d.rank() {
            let pv = p.pow(d.valuations[t]);
            if yt % pv != 0 {
                return Ok(None);
            }
            y[t] = yt / pv;
        } else if yt != 0 {
            return Ok(None);
        }
    }
    let x = d.v.as_ref().unwrap().mul_vec(&y)?;
    Ok(Some(PkSolution {
        particular: x,
        kernel_generators: d.kernel_generators(),
    }))
}

/// The finite abelian group X/Y for subgroups Y ⊆ X ⊆ (Z/p^k)^N given by generators.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub p: u64,
    pub k: u32,
    /// Exponents e_i >= 1 with X/Y ≅ ⊕ Z/p^{e_i}.
    pub invariants: Vec<u32>,
    /// Representatives in X of the cyclic generators.
    pub generators: Vec<Vec<u64>>,
    gx: DenseMat,
    l: DenseMat,
    keep: Vec<usize>,
    valuation_of: Vec<u32>,
}

impl Quotient {
    pub fn order_log(&self) -> u32 {
        self.invariants.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    /// Coordinates of `x ∈ X` on the cyclic generators (each reduced mod its order).
    pub fn coords(&self, x: &[u64]) -> Result<Option<Vec<u64>>> {
        let Some(sol) = solve_pk(&self.gx, x, self.p, self.k)? else {
            return Ok(None);
        };
        let y = self.l.mul_vec(&sol.particular)?;
        Ok(Some(
            self.keep
                .iter()
                .map(|&t| y[t] % self.p.pow(self.valuation_of[t]))
                .collect(),
        ))
    }
}

/// Compute X/Y where X, Y are spanned by the columns of `x_gens`, `y_gens` (Y ⊆ X required).
pub fn quotient_pk(x_gens: &DenseMat, y_gens: &DenseMat, p: u64, k: u32) -> Result<Quotient> {
    let m = x_gens.modulus();
    if y_gens.modulus() != m {
        return Err(ArithError::ModulusMismatch(y_gens.modulus(), m));
    }
    if x_gens.rows() != y_gens.rows() {
        return Err(ArithError::DimensionMismatch("ambient dimensions differ".into()));
    }
    let a = x_gens.cols();
    // relations: w with x_gens w ∈ Y
    let neg_y = DenseMat::from_fn(y_gens.rows(), y_gens.cols(), m, |i, j| neg_mod(y_gens.get(i, j), m));
    let big = x_gens.hstack(&neg_y)?;
    let kern = kernel_pk(&big, p, k)?;
    let rel_cols: Vec<Vec<u64>> = kern.iter().map(|v| v[..a].to_vec()).collect();
    // Y ⊆ X check: each y is in the image of x_gens
    for j in 0..y_gens.cols() {
        if solve_pk(x_gens, &y_gens.col(j), p, k)?.is_none() {
            return Err(ArithError::DimensionMismatch(
                "quotient requires Y to be contained in X".into(),
            ));
        }
    }
    let r = DenseMat::from_cols(&rel_cols, a, m)?;
    let d = smith_decompose(
        &r,
        p,
        k,
        SmithOptions {
            track_l: true,
            track_linv: true,
            ..Default::default()
        },
        None,
    )?;
    let mut valuation_of = vec![k; a];
    for (t, &v) in d.valuations.iter().enumerate() {
        valuation_of[t] = v;
    }
    let keep: Vec<usize> = (0..a).filter(|&t| valuation_of[t] > 0).collect();
    let linv = d.linv.as_ref().unwrap();
    let mut generators = Vec::new();
    for &t in &keep {
        let w = linv.col(t);
        generators.push(x_gens.mul_vec(&w)?);
    }
    Ok(Quotient {
        p,
        k,
        invariants: keep.iter().map(|&t| valuation_of[t]).collect(),
        generators,
        gx: x_gens.clone(),
        l: d.l.unwrap(),
        keep,
        valuation_of,
    })
}

/// Canonical reduction of vectors modulo a fixed subgroup Y ⊆ (Z/p^k)^N.
#[derive(Clone, Debug)]
pub struct CosetReducer {
    p: u64,
    l: DenseMat,
    valuations: Vec<u32>,
}

impl CosetReducer {
    pub fn new(y_gens: &DenseMat, p: u64, k: u32) -> Result<Self> {
        let d = smith_decompose(
            y_gens,
            p,
            k,
            SmithOptions {
                track_l: true,
                ..Default::default()
            },
            None,
        )?;
        Ok(CosetReducer {
            p,
            l: d.l.unwrap(),
            valuations: d.valuations,
        })
    }

    /// A signature that is equal for two vectors iff they differ by an element of Y.
    pub fn signature(&self, x: &[u64]) -> Result<Vec<u64>> {
        let y = self.l.mul_vec(x)?;
        Ok(y.iter()
            .enumerate()
            .map(|(t, &yt)| match self.valuations.get(t) {
                Some(&v) => yt % self.p.pow(v),
                None => yt,
            })
            .collect())
    }

    pub fn contains(&self, x: &[u64]) -> Result<bool> {
        Ok(self.signature(x)?.iter().all(|&v| v == 0))
    }
}

// ---------------------------------------------------------------------------
// incremental row spans over Z/p^k

/// Row span of a stream of vectors over Z/p^k, kept as an echelon set with at most one
/// row per leading column (Howell-style, so spans are exact without storing all rows).
#[derive(Clone, Debug)]
pub struct RowSpanPk {
    p: u64,
    k: u32,
    m: u64,
    cols: usize,
    pivots: Vec<Option<Vec<u64>>>,
}

impl RowSpanPk {
    pub fn new(cols: usize, p: u64, k: u32) -> Result<Self> {
        check_prime(p)?;
        let m = p.checked_pow(k).filter(|&m| k > 0 && m <= MAX_MODULUS).ok_or(ArithError::NotPrimePower(0))?;
        Ok(RowSpanPk {
            p,
            k,
            m,
            cols,
            pivots: vec![None; cols],
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn insert(&mut self, row: &[u64]) -> Result<()> {
        if row.len() != self.cols {
            return Err(ArithError::DimensionMismatch("row length".into()));
        }
        let m = self.m;
        let mut stack = vec![row.iter().map(|&x| x % m).collect::<Vec<u64>>()];
        while let Some(mut r) = stack.pop() {
            let mut start = 0;
            loop {
                let Some(c) = (start..self.cols).find(|&c| r[c] != 0) else {
                    break;
                };
                let v = valuation(r[c], self.p, self.k);
                let pv = self.p.pow(v);
                // scale so the leading entry is exactly p^v
                let u = inv_mod((r[c] / pv) % m, m).expect("unit part");
                if u != 1 {
                    for x in r[c..].iter_mut() {
                        *x = mul_mod(*x, u, m);
                    }
                }
                match &mut self.pivots[c] {
                    None => {
                        if v > 0 {
                            let f = self.p.pow(self.k - v);
                            stack.push(r.iter().map(|&x| mul_mod(x, f, m)).collect());
                        }
                        self.pivots[c] = Some(r);
                        break;
                    }
                    Some(piv) => {
                        let w = valuation(piv[c], self.p, self.k);
                        if v < w {
                            std::mem::swap(piv, &mut r);
                            let f = self.p.pow(self.k - v);
                            stack.push(piv.iter().map(|&x| mul_mod(x, f, m)).collect());
                            continue;
                        }
                        let f = self.p.pow(v - w);
                        for t in c..self.cols {
                            r[t] = sub_mod(r[t], mul_mod(f, piv[t], m), m);
                        }
                        start = c + 1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Generators of the span, one per leading column.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.pivots.iter().flatten().cloned().collect()
    }

    pub fn matrix(&self) -> DenseMat {
        let rows = self.rows();
        if rows.is_empty() {
            return DenseMat::zeros(0, self.cols, self.m);
        }
        DenseMat::from_rows(&rows, self.m).expect("consistent rows")
    }

    /// Generators of the right kernel of the span.
    pub fn kernel(&self) -> Result<Vec<Vec<u64>>> {
        kernel_pk(&self.matrix(), self.p, self.k)
    }
}

// ---------------------------------------------------------------------------
// F_p subspace helpers

/// Row-reduced basis of the span of the given vectors over F_p.
pub fn span_basis_fp(vectors: &[Vec<u64>], dim: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let m = DenseMat::from_rows(vectors, p)?;
    if m.cols() != dim {
        return Err(ArithError::DimensionMismatch("span vectors".into()));
    }
    Ok(rref_fp(&m, p)?.reduced.to_rows())
}

/// Whether `v` lies in the span of `basis` over F_p.
pub fn in_span_fp(basis: &[Vec<u64>], v: &[u64], p: u64) -> Result<bool> {
    if v.iter().all(|&x| x % p == 0) {
        return Ok(true);
    }
    if basis.is_empty() {
        return Ok(false);
    }
    let a = DenseMat::from_cols(basis, v.len(), p)?;
    Ok(solve_fp(&a, v, p)?.is_some())
}

/// Basis of the right kernel of `a` over F_p.
pub fn kernel_fp(a: &DenseMat, p: u64) -> Result<Vec<Vec<u64>>> {
    Ok(rref_fp(a, p)?.kernel_basis)
}

/// Basis of `{λ : M λ ∈ span(Y)}` for `M` an N×h matrix and `Y` a list of N-vectors, over F_p.
pub fn preimage_fp(m: &DenseMat, y: &[Vec<u64>], p: u64) -> Result<Vec<Vec<u64>>> {
    let h = m.cols();
    let big = if y.is_empty() {
        m.clone()
    } else {
        m.hstack(&DenseMat::from_cols(y, m.rows(), p)?)?
    };
    let kern = kernel_fp(&big, p)?;
    let proj: Vec<Vec<u64>> = kern.into_iter().map(|v| v[..h].to_vec()).collect();
    span_basis_fp(&proj, h, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_decomposition() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 8), Some(3));
        assert_eq!(inv_mod(2, 8), None);
        assert_eq!(Residue::new(5, 12).unwrap().inv().unwrap().value(), 5);
        assert!(Residue::new(4, 12).unwrap().inv().is_err());
    }

    #[test]
    fn smith_units_and_transforms() {
        let a = DenseMat::from_rows(&[vec![2, 4], vec![6, 3]], 9).unwrap();
        let d = smith_decompose(
            &a,
            3,
            2,
            SmithOptions {
                track_v: true,
                track_l: true,
                track_linv: true,
            },
            None,
        )
        .unwrap();
        let l = d.l.clone().unwrap();
        let v = d.v.clone().unwrap();
        let lav = mat_mul(&mat_mul(&l, &a).unwrap(), &v).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j && i < d.rank() { 3u64.pow(d.valuations[i]) % 9 } else { 0 };
                assert_eq!(lav.get(i, j), want);
            }
        }
        let li = mat_mul(&l, d.linv.as_ref().unwrap()).unwrap();
        assert_eq!(li, DenseMat::identity(2, 9));
    }
}
