//! Finite groups given by multiplication tables.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use super::{CohomError, Result};

/// Largest order accepted for a table-backed group.
pub const MAX_TABLE_ORDER: usize = 4096;

/// A finite group stored as a multiplication table on element ids 0..order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverses: Vec<u32>,
    gens: Vec<u32>,
    /// spanning tree from the identity: g = parent · gens[index]
    tree: Vec<Option<(u32, usize)>>,
    bfs: Vec<u32>,
}

impl FiniteGroup {
    /// Build from a full table; validates the group axioms (associativity by Light's test).
    pub fn from_table(rows: &[Vec<u32>], gens: Option<Vec<u32>>) -> Result<Self> {
        let order = rows.len();
        if order == 0 {
            return Err(CohomError::InvalidGroup("empty table".into()));
        }
        if order > MAX_TABLE_ORDER {
            return Err(CohomError::Budget(format!("table order {order} > {MAX_TABLE_ORDER}")));
        }
        let mut table = Vec::with_capacity(order * order);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != order {
                return Err(CohomError::InvalidGroup(format!("row {i} has length {}", r.len())));
            }
            for &x in r {
                if x as usize >= order {
                    return Err(CohomError::InvalidGroup(format!("entry {x} out of range")));
                }
            }
            table.extend_from_slice(r);
        }
        Self::from_flat(order, table, gens)
    }

    fn from_flat(order: usize, table: Vec<u32>, gens: Option<Vec<u32>>) -> Result<Self> {
        let at = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) as usize == x && at(x, e) as usize == x))
            .ok_or_else(|| CohomError::InvalidGroup("no identity element".into()))? as u32;
        for i in 0..order {
            let mut row = vec![false; order];
            let mut col = vec![false; order];
            for j in 0..order {
                if std::mem::replace(&mut row[at(i, j) as usize], true)
                    || std::mem::replace(&mut col[at(j, i) as usize], true)
                {
                    return Err(CohomError::InvalidGroup(format!("element {i} is not invertible")));
                }
            }
        }
        let inverses: Vec<u32> = (0..order)
            .map(|x| (0..order).find(|&y| at(x, y) == identity).unwrap() as u32)
            .collect();
        let mut g = FiniteGroup {
            order,
            table,
            identity,
            inverses,
            gens: Vec::new(),
            tree: Vec::new(),
            bfs: Vec::new(),
        };
        let gens = match gens {
            Some(gs) => {
                if gs.iter().any(|&s| s as usize >= order) {
                    return Err(CohomError::InvalidGroup("generator out of range".into()));
                }
                gs
            }
            None => g.greedy_generators(),
        };
        g.set_generators(gens)?;
        // Light's associativity test over the generators
        for &a in &g.gens {
            for x in 0..order as u32 {
                let xa = g.mul(x, a);
                for y in 0..order as u32 {
                    if g.mul(xa, y) != g.mul(x, g.mul(a, y)) {
                        return Err(CohomError::InvalidGroup(format!(
                            "not associative at ({x}, {a}, {y})"
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Replace the distinguished generators (must generate the group).
    pub fn set_generators(&mut self, gens: Vec<u32>) -> Result<()> {
        let mut tree = vec![None; self.order];
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut bfs = vec![self.identity];
        let mut q = VecDeque::from([self.identity]);
        while let Some(h) = q.pop_front() {
            for (si, &s) in gens.iter().enumerate() {
                let x = self.mul(h, s);
                if !seen[x as usize] {
                    seen[x as usize] = true;
                    tree[x as usize] = Some((h, si));
                    bfs.push(x);
                    q.push_back(x);
                }
            }
        }
        if bfs.len() != self.order {
            return Err(CohomError::InvalidGroup("generators do not generate the group".into()));
        }
        self.gens = gens;
        self.tree = tree;
        self.bfs = bfs;
        Ok(())
    }

    fn greedy_generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut sub: BTreeSet<u32> = BTreeSet::from([self.identity]);
        for x in 0..self.order as u32 {
            if !sub.contains(&x) {
                gens.push(x);
                sub = self.generated(&gens).into_iter().collect();
            }
        }
        gens
    }

    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1);
        let table = (0..m * m).map(|t| ((t / m + t % m) % m) as u32).collect();
        let gens = if m > 1 { vec![1] } else { vec![] };
        Self::from_flat(m, table, Some(gens)).unwrap()
    }

    /// Direct product; element (a, b) has id a·|H| + b.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (ng, nh) = (g.order, h.order);
        let n = ng * nh;
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let a = g.mul((x / nh) as u32, (y / nh) as u32);
                let b = h.mul((x % nh) as u32, (y % nh) as u32);
                table[x * n + y] = a * nh as u32 + b;
            }
        }
        let mut gens: Vec<u32> = g.gens.iter().map(|&s| s * nh as u32 + h.identity).collect();
        gens.extend(h.gens.iter().map(|&s| g.identity * nh as u32 + s));
        Self::from_flat(n, table, Some(gens)).unwrap()
    }

    /// (Z/p)^r
    pub fn elementary_abelian(p: usize, r: usize) -> Self {
        let mut g = Self::cyclic(1);
        for _ in 0..r {
            g = Self::product(&g, &Self::cyclic(p));
        }
        g
    }

    /// Dihedral group of order 2m; r^i s^f has id i + m·f.
    pub fn dihedral(m: usize) -> Self {
        assert!(m >= 1);
        let n = 2 * m;
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let (i, f) = (x % m, x / m);
                let (j, g) = (y % m, y / m);
                let k = if f == 0 { (i + j) % m } else { (i + m - j) % m };
                table[x * n + y] = (k + m * ((f + g) % 2)) as u32;
            }
        }
        let gens = if m > 1 { vec![1, m as u32] } else { vec![m as u32] };
        Self::from_flat(n, table, Some(gens)).unwrap()
    }

    /// Quaternion group of order 8; ids 0..3 are 1, i, j, k and 4..7 their negatives.
    pub fn quaternion() -> Self {
        // unit products: (sign, unit)
        const U: [[(u8, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let mut table = vec![0u32; 64];
        for x in 0..8 {
            for y in 0..8 {
                let (s, u) = U[x % 4][y % 4];
                let sign = (s as usize + x / 4 + y / 4) % 2;
                table[x * 8 + y] = (u + 4 * sign) as u32;
            }
        }
        Self::from_flat(8, table, Some(vec![1, 2])).unwrap()
    }

    /// The group generated by `gens` under `mul`, with the elements in discovery order.
    pub fn from_closure<T, F>(gens: &[T], identity: T, mul: F) -> Result<(Self, Vec<T>)>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut index: HashMap<T, u32> = HashMap::new();
        let mut elems = vec![identity.clone()];
        index.insert(identity, 0);
        let mut head = 0;
        while head < elems.len() {
            let x = elems[head].clone();
            for g in gens {
                let y = mul(&x, g);
                if !index.contains_key(&y) {
                    if elems.len() >= MAX_TABLE_ORDER {
                        return Err(CohomError::Budget(format!(
                            "closure exceeds {MAX_TABLE_ORDER} elements"
                        )));
                    }
                    index.insert(y.clone(), elems.len() as u32);
                    elems.push(y);
                }
            }
            head += 1;
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                table[i * n + j] = index[&mul(x, y)];
            }
        }
        let gen_ids: Vec<u32> = gens.iter().map(|g| index[g]).collect();
        let mut dedup = Vec::new();
        for g in gen_ids {
            if !dedup.contains(&g) && g != 0 {
                dedup.push(g);
            }
        }
        Ok((Self::from_flat(n, table, Some(dedup))?, elems))
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        let mut r = self.identity;
        for _ in 0..e % self.elem_order(a) as u64 {
            r = self.mul(r, a);
        }
        r
    }

    pub fn elem_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    /// Elements in breadth-first order from the identity (parents first).
    pub fn bfs_order(&self) -> &[u32] {
        &self.bfs
    }

    /// For g ≠ 1, the pair (h, s) with g = h · gens[s] in the spanning tree.
    pub fn tree_edge(&self, g: u32) -> Option<(u32, usize)> {
        self.tree[g as usize]
    }

    pub fn table_rows(&self) -> Vec<Vec<u32>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.gens
            .iter()
            .all(|&a| self.gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn commute(&self, a: u32, b: u32) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut q = VecDeque::from([self.identity]);
        while let Some(x) = q.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    q.push_back(y);
                }
            }
        }
        (0..self.order as u32).filter(|&x| seen[x as usize]).collect()
    }

    pub fn is_subgroup(&self, elems: &[u32]) -> bool {
        let set: BTreeSet<u32> = elems.iter().copied().collect();
        set.contains(&self.identity)
            && set.iter().all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// The subgroup on `elems` as a group in its own right, with the inclusion map.
    pub fn subgroup(&self, elems: &[u32]) -> Result<(FiniteGroup, Vec<u32>)> {
        let mut sorted: Vec<u32> = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if !self.is_subgroup(&sorted) {
            return Err(CohomError::NotSubgroup);
        }
        let pos: HashMap<u32, u32> = sorted.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let n = sorted.len();
        let mut table = vec![0u32; n * n];
        for (i, &a) in sorted.iter().enumerate() {
            for (j, &b) in sorted.iter().enumerate() {
                table[i * n + j] = pos[&self.mul(a, b)];
            }
        }
        Ok((Self::from_flat(n, table, None)?, sorted))
    }

    /// One generator (the smallest id) per cyclic subgroup not contained in a larger cyclic one.
    pub fn maximal_cyclic_generators(&self) -> Vec<u32> {
        let mut cyclics: Vec<(Vec<u32>, u32)> = Vec::new();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        for g in 0..self.order as u32 {
            let c = self.generated(&[g]);
            if seen.insert(c.clone()) {
                cyclics.push((c, g));
            }
        }
        cyclics
            .iter()
            .filter(|(c, _)| {
                !cyclics
                    .iter()
                    .any(|(d, _)| d.len() > c.len() && c.iter().all(|x| d.binary_search(x).is_ok()))
            })
            .map(|&(_, g)| g)
            .collect()
    }

    /// All distinct subgroups generated by two commuting elements (includes the cyclic ones).
    pub fn bicyclic_subgroups(&self) -> Vec<Vec<u32>> {
        let mut out: BTreeSet<Vec<u32>> = BTreeSet::new();
        for a in 0..self.order as u32 {
            for b in a..self.order as u32 {
                if self.commute(a, b) {
                    out.insert(self.generated(&[a, b]));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Extend generator images to a map on all elements; `None` unless it is a homomorphism.
    pub fn extend_hom<T, F>(&self, images: &[T], identity: &T, mul: F) -> Option<Vec<T>>
    where
        T: Clone + PartialEq,
        F: Fn(&T, &T) -> T,
    {
        if images.len() != self.gens.len() {
            return None;
        }
        let mut f: Vec<Option<T>> = vec![None; self.order];
        f[self.identity as usize] = Some(identity.clone());
        for &g in &self.bfs[1..] {
            let (h, s) = self.tree[g as usize].unwrap();
            f[g as usize] = Some(mul(f[h as usize].as_ref().unwrap(), &images[s]));
        }
        let f: Vec<T> = f.into_iter().map(|x| x.unwrap()).collect();
        for x in 0..self.order as u32 {
            for (si, &s) in self.gens.iter().enumerate() {
                if f[self.mul(x, s) as usize] != mul(&f[x as usize], &images[si]) {
                    return None;
                }
            }
        }
        Some(f)
    }

    /// Whether `f` (values on all elements) is a homomorphism.
    pub fn is_hom<T, F>(&self, f: &[T], mul: F) -> bool
    where
        T: PartialEq,
        F: Fn(&T, &T) -> T,
    {
        f.len() == self.order
            && (0..self.order as u32).all(|x| {
                (0..self.order as u32).all(|y| f[self.mul(x, y) as usize] == mul(&f[x as usize], &f[y as usize]))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_groups_validate() {
        assert_eq!(FiniteGroup::cyclic(6).order(), 6);
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        assert!(!FiniteGroup::dihedral(4).is_abelian());
        let q = FiniteGroup::quaternion();
        assert_eq!(q.elem_order(1), 4);
        assert_eq!((0..8).filter(|&x| q.elem_order(x) == 2).count(), 1);
        assert!(FiniteGroup::elementary_abelian(2, 3).is_abelian());
    }

    #[test]
    fn non_associative_table_rejected() {
        // a Latin square with identity 0 that is not associative
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(FiniteGroup::from_table(&rows, None).is_err());
    }
}
