#![allow(dead_code)]

use massey_core::cohom::FiniteGroup;
use massey_core::unigroup::{elem_gen, positions, UniTri};

/// Small groups used across the suites, with names.
pub fn small_groups(max_order: usize) -> Vec<(String, FiniteGroup)> {
    let mut v: Vec<(String, FiniteGroup)> = Vec::new();
    for m in 1..=max_order {
        v.push((format!("Z{m}"), FiniteGroup::cyclic(m)));
    }
    let z2 = FiniteGroup::cyclic(2);
    let z3 = FiniteGroup::cyclic(3);
    let z4 = FiniteGroup::cyclic(4);
    let extra = vec![
        ("Z2xZ2".to_string(), FiniteGroup::product(&z2, &z2)),
        ("Z2xZ4".to_string(), FiniteGroup::product(&z2, &z4)),
        ("Z2^3".to_string(), FiniteGroup::elementary_abelian(2, 3)),
        ("S3".to_string(), FiniteGroup::dihedral(3)),
        ("D4".to_string(), FiniteGroup::dihedral(4)),
        ("Q8".to_string(), FiniteGroup::quaternion()),
        ("Z3xZ3".to_string(), FiniteGroup::product(&z3, &z3)),
        ("Z2xZ6".to_string(), FiniteGroup::product(&z2, &FiniteGroup::cyclic(6))),
        ("D6".to_string(), FiniteGroup::dihedral(6)),
    ];
    for (n, g) in extra {
        if g.order() <= max_order {
            v.push((n, g));
        }
    }
    v
}

/// U¹ at (n, p) as a table-backed group, generated by the second and third diagonals.
pub fn u1_group(n: usize, p: u32) -> FiniteGroup {
    let gens: Vec<UniTri> = positions(n)
        .into_iter()
        .filter(|&(i, j)| j - i == 2 || j - i == 3)
        .map(|(i, j)| elem_gen(n, p, i, j, 1).unwrap())
        .collect();
    FiniteGroup::from_closure(&gens, UniTri::identity(n, p), |a, b| a.mul(b))
        .unwrap()
        .0
}

/// Iterate over all vectors in (Z/m)^len.
pub fn all_vectors(len: usize, m: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut c = vec![0u64; len];
    loop {
        out.push(c.clone());
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            c[i] += 1;
            if c[i] < m {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}
