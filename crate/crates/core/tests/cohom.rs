mod common;

use std::collections::BTreeSet;

use common::{all_vectors, small_groups, u1_group};
use massey_core::cohom::*;
use massey_core::modarith::DenseMat;
use massey_core::unigroup::UniTri;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

/// |H¹| by enumerating every function G → M and filtering cocycles.
fn brute_h1_order(g: &FiniteGroup, m: &GModule) -> u64 {
    let q = m.modulus();
    let r = m.rank();
    let n = g.order();
    let mut z = 0u64;
    for flat in all_vectors(n * r, q) {
        let f: Vec<Vec<u64>> = flat.chunks(r.max(1)).map(|c| c[..r].to_vec()).collect();
        let f = if r == 0 { vec![Vec::new(); n] } else { f };
        if is_1cocycle(g, m, &f) {
            z += 1;
        }
    }
    let mut b = BTreeSet::new();
    for v in all_vectors(r, q) {
        let f: Vec<Vec<u64>> = (0..n as u32)
            .map(|x| {
                let gv = m.apply(x, &v);
                gv.iter().zip(&v).map(|(&a, &c)| (a + q - c) % q).collect()
            })
            .collect();
        b.insert(f);
    }
    z / b.len() as u64
}

fn modules_for(g: &FiniteGroup) -> Vec<GModule> {
    let mut out = Vec::new();
    for q in [2u64, 3, 4] {
        out.push(GModule::trivial(g, q, 1).unwrap());
        let ns = g.generators().len();
        // each generator acts by ±1
        for mask in 0..(1u32 << ns) {
            let mats: Vec<DenseMat> = (0..ns)
                .map(|i| DenseMat::from_rows(&[vec![if mask >> i & 1 == 1 { q - 1 } else { 1 }]], q).unwrap())
                .collect();
            if let Ok(m) = GModule::from_generators(g, q, 1, mats) {
                out.push(m);
            }
        }
    }
    // rank 2 over F_2 with generators acting by the unipotent or swap matrices
    let cands = [vec![vec![1, 0], vec![0, 1]], vec![vec![1, 1], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]];
    let ns = g.generators().len();
    let total = 3usize.pow(ns as u32);
    for code in 0..total {
        let mut c = code;
        let mats: Vec<DenseMat> = (0..ns)
            .map(|_| {
                let m = DenseMat::from_rows(&cands[c % 3], 2).unwrap();
                c /= 3;
                m
            })
            .collect();
        if let Ok(m) = GModule::from_generators(g, 2, 2, mats) {
            out.push(m);
        }
    }
    out
}

#[test]
fn h1_matches_enumeration() {
    let mut checked = 0;
    for (name, g) in small_groups(8) {
        for m in modules_for(&g) {
            let size = (m.modulus() as f64).powi((g.order() * m.rank()) as i32);
            if size > 70_000.0 {
                continue;
            }
            let h = h1(&g, &m).unwrap();
            let order = m.prime().pow(h.order_log());
            assert_eq!(order, brute_h1_order(&g, &m), "{name} modulus {} rank {}", m.modulus(), m.rank());
            for rep in h.representatives() {
                assert!(is_1cocycle(&g, &m, &rep.values));
            }
            checked += 1;
        }
    }
    assert!(checked > 50, "only {checked} cases");
}

#[test]
fn h1_examples() {
    let z2 = FiniteGroup::cyclic(2);
    let f2 = GModule::trivial(&z2, 2, 1).unwrap();
    assert_eq!(h1(&z2, &f2).unwrap().dim(), 1);
    let neg = GModule::from_generators(&z2, 4, 1, vec![DenseMat::from_rows(&[vec![3]], 4).unwrap()]).unwrap();
    let h = h1(&z2, &neg).unwrap();
    assert_eq!(h.invariants(), &[1]);
    assert_eq!(brute_h1_order(&z2, &neg), 2);
}

#[test]
fn restriction_examples() {
    for (name, g) in small_groups(8) {
        for m in modules_for(&g).into_iter().take(4) {
            let all: Vec<u32> = (0..g.order() as u32).collect();
            let r = restrict_h1(&g, &m, &all).unwrap();
            assert!(r.is_injective().unwrap(), "{name}: restriction to G");
            let r1 = restrict_h1(&g, &m, &[g.identity()]).unwrap();
            assert!(r1.is_zero(), "{name}: restriction to 1");
        }
    }
    // index prime to p with M of exponent p: S3 → Z/3 with F_3 coefficients
    let s3 = FiniteGroup::dihedral(3);
    let sign = GModule::from_generators(
        &s3,
        3,
        1,
        vec![DenseMat::from_rows(&[vec![1]], 3).unwrap(), DenseMat::from_rows(&[vec![2]], 3).unwrap()],
    )
    .unwrap();
    let rot = s3.generated(&[1]);
    let r = restrict_h1(&s3, &sign, &rot).unwrap();
    assert!(r.is_injective().unwrap());
    assert!(matches!(restrict_h1(&s3, &sign, &[0, 3, 1]), Err(CohomError::NotSubgroup)));
}

#[test]
fn sha_examples() {
    for m in 2..=8 {
        let g = FiniteGroup::cyclic(m);
        for md in modules_for(&g) {
            assert!(sha1_cyc(&g, &md).unwrap().is_trivial());
        }
    }
    let v4 = FiniteGroup::elementary_abelian(2, 2);
    let f2 = GModule::trivial(&v4, 2, 1).unwrap();
    assert!(sha1_cyc(&v4, &f2).unwrap().is_trivial());
    for (_, g) in small_groups(8) {
        for md in modules_for(&g) {
            let h = h1(&g, &md).unwrap();
            let sha = h.sha1_cyc().unwrap();
            assert!(h.subgroup_le(&sha, &h.full().unwrap()).unwrap());
            assert!(sha.order_log() <= h.order_log());
        }
    }
}

#[test]
fn cup_square_of_the_sign_character() {
    let z2 = FiniteGroup::cyclic(2);
    let f2 = GModule::trivial(&z2, 2, 1).unwrap();
    let chi = vec![vec![0], vec![1]];
    let c = cup11(&z2, &chi, &f2, &chi, &Pairing::scalar(2)).unwrap();
    assert_eq!(c[3], vec![1]);
    assert!(is_2cocycle(&z2, &f2, &c));
    assert_eq!(coboundary2_test(&z2, &f2, &c).unwrap(), None);
    // oracle: no 1-cochain among the 4 has coboundary c
    for f in all_vectors(2, 2) {
        let f: Vec<Vec<u64>> = f.into_iter().map(|x| vec![x]).collect();
        assert_ne!(coboundary1(&z2, &f2, &f), c);
    }
    let zero = vec![vec![0]; 2];
    let c0 = cup11(&z2, &zero, &f2, &chi, &Pairing::scalar(2)).unwrap();
    assert!(c0.iter().all(|v| v[0] == 0));
    assert!(coboundary2_test(&z2, &f2, &c0).unwrap().is_some());
}

#[test]
fn coboundary_test_against_enumeration() {
    for (name, g) in small_groups(6) {
        for m in modules_for(&g) {
            let q = m.modulus();
            if (q as f64).powi((g.order() * m.rank()) as i32) > 5000.0 {
                continue;
            }
            let mut boundaries = BTreeSet::new();
            for flat in all_vectors(g.order() * m.rank(), q) {
                let f: Vec<Vec<u64>> = flat.chunks(m.rank()).map(|c| c.to_vec()).collect();
                boundaries.insert(coboundary1(&g, &m, &f));
            }
            for c in boundaries.iter().take(40) {
                let f = coboundary2_test(&g, &m, c).unwrap().expect("a coboundary");
                assert_eq!(&coboundary1(&g, &m, &f), c, "{name}");
            }
        }
    }
    let v4 = FiniteGroup::elementary_abelian(2, 2);
    let f2 = GModule::trivial(&v4, 2, 1).unwrap();
    let bad = vec![vec![1]; 16];
    assert!(coboundary2_test(&v4, &f2, &bad).is_ok());
    let mut not_cocycle = vec![vec![0]; 16];
    not_cocycle[5] = vec![1];
    assert!(matches!(coboundary2_test(&v4, &f2, &not_cocycle), Err(CohomError::NotCocycle(_))));
}

/// dim H²(V4, F_2) by enumerating all 2^16 cochains.
#[test]
fn h2_klein_four_by_enumeration() {
    let v4 = FiniteGroup::elementary_abelian(2, 2);
    let f2 = GModule::trivial(&v4, 2, 1).unwrap();
    let mut z = 0u64;
    for bits in 0u32..1 << 16 {
        let c: Vec<Vec<u64>> = (0..16).map(|i| vec![(bits >> i & 1) as u64]).collect();
        if is_2cocycle(&v4, &f2, &c) {
            z += 1;
        }
    }
    let mut b = BTreeSet::new();
    for f in all_vectors(4, 2) {
        let f: Vec<Vec<u64>> = f.into_iter().map(|x| vec![x]).collect();
        b.insert(coboundary1(&v4, &f2, &f));
    }
    let brute_dim = (z / b.len() as u64).trailing_zeros() as usize;
    assert_eq!(brute_dim, 3);
    assert_eq!(h2_bar(&v4, &f2).unwrap().dim(), 3);
    assert_eq!(h2_full_bar_dim(&v4, &f2).unwrap(), 3);
}

/// H²(V4, Q/Z) via normalized Z/4-cochains: 4^9 candidates, modulo coboundaries and Bockstein images.
#[test]
fn schur_multiplier_of_klein_four_by_enumeration() {
    let v4 = FiniteGroup::elementary_abelian(2, 2);
    let z4 = GModule::trivial(&v4, 4, 1).unwrap();
    let nontriv: Vec<u32> = (1..4).collect();
    let mut cocycles = 0u64;
    for vals in all_vectors(9, 4) {
        let mut c = vec![vec![0u64]; 16];
        for (t, &(x, y)) in nontriv.iter().flat_map(|&x| nontriv.iter().map(move |&y| (x, y))).collect::<Vec<_>>().iter().enumerate() {
            c[x as usize * 4 + y as usize] = vec![vals[t]];
        }
        if is_2cocycle(&v4, &z4, &c) {
            cocycles += 1;
        }
    }
    let mut sub: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    for f in all_vectors(3, 4) {
        let mut ff = vec![vec![0u64]; 4];
        for i in 0..3 {
            ff[i + 1] = vec![f[i]];
        }
        sub.insert(coboundary1(&v4, &z4, &ff));
    }
    // Bockstein images of homomorphisms V4 → Z/4 (values in {0, 2})
    let homs: Vec<Vec<u64>> = all_vectors(2, 2)
        .into_iter()
        .map(|ab| (0..4u32).map(|x| 2 * ((ab[0] * (x & 1) as u64 + ab[1] * (x >> 1 & 1) as u64) % 2)).collect())
        .collect();
    let mut gens: Vec<Vec<Vec<u64>>> = Vec::new();
    for a in &homs {
        let c: Vec<Vec<u64>> = (0..16u32)
            .map(|t| {
                let (x, y) = (t / 4, t % 4);
                vec![(a[x as usize] + a[y as usize] - a[v4.mul(x, y) as usize]) / 4]
            })
            .collect();
        gens.push(c);
    }
    loop {
        let mut grown = sub.clone();
        for s in &sub {
            for gch in &gens {
                grown.insert(s.iter().zip(gch).map(|(a, b)| vec![(a[0] + b[0]) % 4]).collect());
            }
        }
        if grown.len() == sub.len() {
            break;
        }
        sub = grown;
    }
    assert_eq!(cocycles / sub.len() as u64, 2);
    let parts = h2_qz_proxy(&v4).unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].classes.invariants(), &[1]);
}

#[test]
fn schur_multipliers_of_small_groups() {
    let expect: &[(&str, Vec<Vec<u32>>)] = &[
        ("Z4", vec![vec![]]),
        ("Z6", vec![vec![], vec![]]),
        ("Z2xZ2", vec![vec![1]]),
        ("Z2xZ4", vec![vec![1]]),
        ("Z2^3", vec![vec![1, 1, 1]]),
        ("D4", vec![vec![1]]),
        ("Q8", vec![vec![]]),
        ("S3", vec![vec![], vec![]]),
        ("Z3xZ3", vec![vec![1]]),
    ];
    let groups = small_groups(9);
    for (name, inv) in expect {
        let g = &groups.iter().find(|(n, _)| n == name).unwrap().1;
        let got: Vec<Vec<u32>> = h2_qz_proxy(g).unwrap().iter().map(|p| p.classes.invariants().to_vec()).collect();
        assert_eq!(&got, inv, "{name}");
    }
}

#[test]
fn reduced_and_full_bar_complexes_agree() {
    for (name, g) in small_groups(12) {
        for m in modules_for(&g) {
            if m.exponent() != 1 || g.order() > 12 {
                continue;
            }
            let a = h2_bar(&g, &m).unwrap().dim();
            let b = h2_full_bar_dim(&g, &m).unwrap();
            assert_eq!(a, b, "{name} mod {} rank {}", m.modulus(), m.rank());
        }
    }
}

#[test]
fn h2_budget_is_explicit() {
    let g = FiniteGroup::cyclic(200);
    let m = GModule::trivial(&g, 2, 1).unwrap();
    assert!(matches!(h2_bar(&g, &m), Err(CohomError::Budget(_))));
    assert!(matches!(h2_full_bar_dim(&g, &m), Err(CohomError::Budget(_))));
}

#[test]
fn class_signatures_respect_coboundaries() {
    let d4 = FiniteGroup::dihedral(4);
    let f2 = GModule::trivial(&d4, 2, 1).unwrap();
    let h = h2_bar(&d4, &f2).unwrap();
    let reps = h.representatives();
    assert_eq!(reps.len(), 3);
    let mut rng_state = 12345u64;
    for rep in &reps {
        let f: Vec<Vec<u64>> = (0..8)
            .map(|_| {
                rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                vec![(rng_state >> 33) % 2]
            })
            .collect();
        let db = coboundary1(&d4, &f2, &f);
        let shifted: Vec<Vec<u64>> = rep.iter().zip(&db).map(|(a, b)| vec![(a[0] + b[0]) % 2]).collect();
        assert_eq!(h.signature(rep).unwrap(), h.signature(&shifted).unwrap());
        assert!(!h.is_trivial_class(rep).unwrap());
        assert!(coboundary2_test(&d4, &f2, rep).unwrap().is_none());
    }
}

#[test]
fn bogomolov_vanishes_on_small_groups() {
    for (name, g) in small_groups(12) {
        let a = bogomolov(&g).unwrap();
        let b = bogomolov_via_restriction(&g).unwrap();
        assert!(a.is_trivial(), "{name}");
        assert!(b.is_trivial(), "{name}");
        assert!(same_b0(&g, &a, &b).unwrap());
    }
    let u = u1_group(3, 2);
    assert!(bogomolov(&u).unwrap().is_trivial());
}

#[test]
fn lifting_examples() {
    let z2 = FiniteGroup::cyclic(2);
    let z4 = FiniteGroup::cyclic(4);
    let pi: Vec<u32> = (0..4).map(|x| x % 2).collect();
    // Z/2 → Z/2 identity does not lift to Z/4
    match lift_abelian_kernel(&z2, &z4, &z2, &pi, &[1], false).unwrap() {
        LiftOutcome::Obstructed { obstruction } => assert_eq!(obstruction.len(), 4),
        other => panic!("expected obstruction, got {other:?}"),
    }
    // Z/4 → Z/2 reduction lifts to the identity (up to K-conjugacy, the only lifts are x ↦ ±x)
    match lift_abelian_kernel(&z4, &z4, &z2, &pi, &[1], true).unwrap() {
        LiftOutcome::Lift { images, all } => {
            assert!(images == vec![0, 1, 2, 3] || images == vec![0, 3, 2, 1]);
            assert_eq!(all.len(), 2);
        }
        other => panic!("{other:?}"),
    }
    // trivial φ lifts trivially
    match lift_abelian_kernel(&z2, &z4, &z2, &pi, &[0], false).unwrap() {
        LiftOutcome::Lift { images, .. } => assert!(z2.is_hom(&images, |&a, &b| z4.mul(a, b)) && images.iter().all(|&x| pi[x as usize] == 0)),
        other => panic!("{other:?}"),
    }
    // non-abelian kernel is rejected: D4 → trivial group
    let d4 = FiniteGroup::dihedral(4);
    let one = FiniteGroup::cyclic(1);
    assert!(matches!(
        lift_abelian_kernel(&z2, &d4, &one, &[0; 8], &[0], false),
        Err(CohomError::Unsupported(_))
    ));
}

/// Homomorphisms Γ → U/K by enumerating normal forms per generator.
fn quotient_homs(gamma: &FiniteGroup, n: usize, p: u32, k: KernelSpec) -> Vec<Vec<UniTri>> {
    let base = k.levels(n).unwrap()[0];
    let ne = massey_core::unigroup::num_entries(n) as u32;
    let mut nfs = BTreeSet::new();
    for idx in 0..(p as u128).pow(ne) {
        nfs.insert(base.normal_form(&UniTri::from_index(n, p, idx)));
    }
    let nfs: Vec<UniTri> = nfs.into_iter().collect();
    let ng = gamma.generators().len();
    let mut out = Vec::new();
    let mut c = vec![0usize; ng];
    loop {
        let imgs: Vec<UniTri> = c.iter().map(|&i| nfs[i].clone()).collect();
        if gamma.extend_hom(&imgs, &UniTri::identity(n, p), |x, y| base.mul(x, y)).is_some() {
            out.push(imgs);
        }
        let mut i = 0;
        loop {
            if i == ng {
                return out;
            }
            c[i] += 1;
            if c[i] < nfs.len() {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn solver_agrees_with_oracle_on_small_cases() {
    let opts = SolverOptions {
        exhaustive_threshold: 0,
        ..Default::default()
    };
    let mut unsolvable = 0;
    for (name, g) in small_groups(4) {
        for k in [KernelSpec::Center, KernelSpec::U1, KernelSpec::Prs(1, 1)] {
            for alpha in quotient_homs(&g, 3, 2, k) {
                let (out, _) = solve_embedding(&g, 3, 2, k, &alpha, &opts).unwrap();
                let oracle = brute_force_lifts(&g, 3, 2, k, &alpha, 1, 1 << 20).unwrap();
                match out {
                    EmbeddingOutcome::Lift(imgs) => {
                        let base = k.levels(3).unwrap()[0];
                        assert!(g.extend_hom(&imgs, &UniTri::identity(3, 2), |x, y| x.mul(y)).is_some());
                        for (a, b) in imgs.iter().zip(&alpha) {
                            assert_eq!(&base.normal_form(a), b);
                        }
                        assert!(!oracle.is_empty(), "{name} {k:?}");
                    }
                    EmbeddingOutcome::Unsolvable => {
                        assert!(oracle.is_empty(), "{name} {k:?} {alpha:?}");
                        unsolvable += 1;
                    }
                }
            }
        }
    }
    assert!(unsolvable > 0, "expected some obstructed instances");
}

#[test]
fn solver_node_cap_is_explicit() {
    let g = FiniteGroup::cyclic(2);
    let alpha = vec![UniTri::identity(3, 2)];
    let opts = SolverOptions {
        max_nodes: 1,
        exhaustive_threshold: 0,
        ..Default::default()
    };
    assert!(matches!(
        solve_embedding(&g, 3, 2, KernelSpec::U1, &alpha, &opts),
        Err(CohomError::Budget(_))
    ));
    let (out, _) = solve_embedding(&g, 3, 2, KernelSpec::U1, &alpha, &SolverOptions::default()).unwrap();
    assert_eq!(out, EmbeddingOutcome::Lift(vec![UniTri::identity(3, 2)]));
}

#[test]
fn prs_normal_form_is_a_quotient_map() {
    let mut rng = StdRng::seed_from_u64(7);
    for (r, s) in [(0, 0), (1, 1), (2, 0), (0, 2), (2, 2)] {
        let lvl = Level::ModP(r, s);
        for _ in 0..300 {
            let x = UniTri::random(3, 3, &mut rng);
            let y = UniTri::random(3, 3, &mut rng);
            assert_eq!(lvl.normal_form(&x.mul(&y)), lvl.mul(&lvl.normal_form(&x), &lvl.normal_form(&y)));
            let nf = lvl.normal_form(&x);
            assert!(massey_core::unigroup::in_p(&x.inv().mul(&nf), r, s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_coboundaries_are_trivial(seed in any::<u64>(), gi in 0usize..18) {
        let groups = small_groups(8);
        let g = &groups[gi % groups.len()].1;
        let m = GModule::trivial(g, 3, 1).unwrap();
        let mut s = seed;
        let f: Vec<Vec<u64>> = (0..g.order()).map(|_| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1); vec![(s >> 40) % 3] }).collect();
        let c = coboundary1(g, &m, &f);
        let f2 = coboundary2_test(g, &m, &c).unwrap().unwrap();
        prop_assert_eq!(coboundary1(g, &m, &f2), c);
        let h = h2_bar(g, &m).unwrap();
        prop_assert!(h.is_trivial_class(&coboundary1(g, &m, &f)).unwrap());
    }

    #[test]
    fn cup_of_cocycles_is_a_cocycle(seed in any::<u64>(), gi in 0usize..18) {
        let groups = small_groups(8);
        let g = &groups[gi % groups.len()].1;
        let m = GModule::trivial(g, 2, 1).unwrap();
        let h = h1(g, &m).unwrap();
        let z = h.cocycle_generators();
        prop_assume!(!z.is_empty());
        let a = h.cocycle(&z[(seed % z.len() as u64) as usize]).unwrap();
        let b = h.cocycle(&z[((seed >> 8) % z.len() as u64) as usize]).unwrap();
        let c = cup11(g, &a.values, &m, &b.values, &Pairing::scalar(2)).unwrap();
        prop_assert!(is_2cocycle(g, &m, &c));
    }
}
