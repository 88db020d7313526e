use std::collections::HashSet;

use massey_core::conjact::*;
use massey_core::modarith::{in_span_fp, kernel_fp, span_basis_fp, DenseMat};
use massey_core::unigroup::{a_act_on_b, a_action_matrix, b0_pairs, b_pairs, elem_gen, AVec, BVec, UniTri};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn b_of(x: &UniTri) -> BVec {
    x.to_b().unwrap()
}

/// Orbits of U¹ acting on itself by conjugation, by closing each unvisited element
/// under conjugation by every element of U¹.
fn orbit_count(n: usize, p: u32) -> usize {
    let cc = conj_classes(n, p).unwrap();
    let u1: Vec<UniTri> = (0..cc.u1_order() as u64).map(|i| cc.element(i)).collect();
    let mut seen: HashSet<UniTri> = HashSet::new();
    let mut count = 0;
    for x in &u1 {
        if seen.contains(x) {
            continue;
        }
        count += 1;
        for g in &u1 {
            seen.insert(x.conj_by(g));
        }
    }
    count
}

/// B₀ ∩ B^σ as a basis.
fn b0_fixed(s: &AVec) -> Vec<Vec<u64>> {
    let pairs = b_pairs(s.n);
    let b0 = b0_pairs(s.n);
    let p = s.p as u64;
    let t = a_action_matrix(s);
    let r = pairs.len();
    let mut rows: Vec<Vec<u64>> = (0..r)
        .map(|i| (0..r).map(|j| (t.get(i, j) + p - (i == j) as u64) % p).collect())
        .collect();
    for (k, pr) in pairs.iter().enumerate() {
        if !b0.contains(pr) {
            let mut row = vec![0; r];
            row[k] = 1;
            rows.push(row);
        }
    }
    kernel_fp(&DenseMat::from_rows(&rows, p).unwrap(), p).unwrap()
}

fn b_fixed(s: &AVec) -> Vec<Vec<u64>> {
    let p = s.p as u64;
    let t = a_action_matrix(s);
    let r = t.rows();
    let rows: Vec<Vec<u64>> = (0..r)
        .map(|i| (0..r).map(|j| (t.get(i, j) + p - (i == j) as u64) % p).collect())
        .collect();
    kernel_fp(&DenseMat::from_rows(&rows, p).unwrap(), p).unwrap()
}

#[test]
fn class_counts() {
    assert_eq!(conj_classes(3, 2).unwrap().num_classes(), 8);
    assert_eq!(conj_classes(3, 3).unwrap().num_classes(), 27);
    for (n, p) in [(4usize, 2u32), (4, 3), (5, 2)] {
        assert_eq!(conj_classes(n, p).unwrap().num_classes(), orbit_count(n, p));
    }
    assert!(conj_classes_with_budget(5, 3, 100).unwrap_err().to_string().contains("59049"));
}

#[test]
fn classes_are_consistent() {
    let mut rng = StdRng::seed_from_u64(5);
    for (n, p) in [(4usize, 3u32), (5, 2), (5, 3)] {
        let cc = conj_classes(n, p).unwrap();
        for c in 0..cc.num_classes() as u32 {
            // representative is the minimal index of its class
            assert_eq!(cc.class_of_index(cc.rep_index(c)), c);
        }
        let mut min_index = vec![u64::MAX; cc.num_classes()];
        for i in 0..cc.u1_order() as u64 {
            let c = cc.class_of_index(i) as usize;
            min_index[c] = min_index[c].min(i);
        }
        for c in 0..cc.num_classes() {
            assert_eq!(min_index[c], cc.rep_index(c as u32));
        }
        let total: u64 = (0..cc.num_classes() as u32).map(|c| cc.class_size(c)).sum();
        assert_eq!(total, cc.u1_order() as u64);
        for _ in 0..500 {
            let x = cc.element(rng.gen_range(0..cc.u1_order() as u64));
            let g = UniTri::random_in_level(n, p, 1, &mut rng);
            assert_eq!(cc.class_of(&x).unwrap(), cc.class_of(&x.conj_by(&g)).unwrap());
        }
        assert!(cc.action_table().is_permutation());
        assert!(cc.action_table().generators_commute());
    }
}

#[test]
fn act_on_class_examples() {
    let cc = conj_classes(4, 3).unwrap();
    let id: Vec<u32> = (0..cc.num_classes() as u32).collect();
    assert_eq!(cc.action_perm(&AVec::zero(4, 3)), id);
    let e02 = elem_gen(4, 3, 0, 2, 1).unwrap();
    let c = cc.class_of(&e02).unwrap();
    let img = cc.act_on_class(&AVec::basis(4, 3, 2), c).unwrap();
    let expect = e02.mul(&elem_gen(4, 3, 0, 3, -1).unwrap());
    assert_eq!(img, cc.class_of(&expect).unwrap());
    // aide matrix gives M_{0,3} = −1 directly
    assert_eq!(aide_matrix(&AVec::basis(4, 3, 2), &e02).get(0, 3), 2);
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3)] {
        let cc = conj_classes(n, p).unwrap();
        for s in AVec::all(n, p) {
            for c in 0..cc.num_classes() as u32 {
                let out = cc.act_on_class(&s, c).unwrap();
                assert_eq!(b_of(&cc.rep(out)), a_act_on_b(&s, &b_of(&cc.rep(c))).unwrap());
            }
        }
    }
}

#[test]
fn aide_formula_matches_conjugation() {
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3)] {
        let cc = conj_classes(n, p).unwrap();
        for s in AVec::all(n, p) {
            let sm = s.lift();
            for c in 0..cc.num_classes() as u32 {
                let q = cc.rep(c);
                assert_eq!(aide_matrix(&s, &q), q.conj_by(&sm));
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..20_000 {
        let s = AVec::new(6, 2, (0..6).map(|_| rng.gen_range(0..2)).collect()).unwrap();
        let q = UniTri::random_in_level(6, 2, 1, &mut rng);
        assert_eq!(aide_matrix(&s, &q), q.conj_by(&s.lift()));
    }
}

#[test]
fn descended_action_is_well_defined() {
    let mut rng = StdRng::seed_from_u64(7);
    for (n, p) in [(4usize, 3u32), (5, 2)] {
        let cc = conj_classes(n, p).unwrap();
        for _ in 0..500 {
            let s = AVec::new(n, p, (0..n).map(|_| rng.gen_range(0..p)).collect()).unwrap();
            let c = rng.gen_range(0..cc.num_classes() as u32);
            let g = UniTri::random_in_level(n, p, 1, &mut rng);
            let q = cc.rep(c).conj_by(&g);
            let via_rep = cc.act_on_class(&s, c).unwrap();
            let via_other = cc.class_of(&q.conj_by(&s.lift())).unwrap();
            assert_eq!(via_rep, via_other);
        }
    }
}

#[test]
fn tau_equivariance_on_classes() {
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3)] {
        let cc = conj_classes(n, p).unwrap();
        for s in AVec::all(n, p) {
            for c in 0..cc.num_classes() as u32 {
                let lhs = cc.act_on_class(&s.tau(), cc.tau_class(c)).unwrap();
                let rhs = cc.tau_class(cc.act_on_class(&s, c).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn fixed_class_examples() {
    let cc = conj_classes(4, 2).unwrap();
    assert_eq!(cc.fixed_classes(&AVec::zero(4, 2)).len(), cc.num_classes());
    let z = cc.class_of(&elem_gen(4, 2, 0, 4, 1).unwrap()).unwrap();
    for s in AVec::all(4, 2) {
        let fixed = cc.fixed_classes(&s);
        assert!(fixed.contains(&z));
        // brute force: classes whose conjugated representative stays in the class
        let brute: Vec<u32> = (0..cc.num_classes() as u32)
            .filter(|&c| cc.class_of(&cc.rep(c).conj_by(&s.lift())).unwrap() == c)
            .collect();
        assert_eq!(fixed, brute);
    }
}

#[test]
fn image_span_contains_b0_fixed() {
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3), (6, 2)] {
        let cc = conj_classes(n, p).unwrap();
        for s in AVec::all(n, p) {
            let span = cc.image_span_in_b(&s).unwrap();
            for v in b0_fixed(&s) {
                assert!(in_span_fp(&span, &v, p as u64).unwrap(), "n={n} p={p} s={:?}", s.a);
            }
            if n == 4 || n == 5 || n == 3 {
                let full = span_basis_fp(&b_fixed(&s), b_pairs(n).len(), p as u64).unwrap();
                assert_eq!(span.len(), full.len(), "n={n} p={p} s={:?}", s.a);
            }
        }
    }
}

#[test]
fn fixed_class_lift_witnesses() {
    let cc = conj_classes(4, 2).unwrap();
    let s = AVec::basis(4, 2, 0);
    let c = cc.fixed_class_lift(&s, &BVec::zero(4, 2)).unwrap().unwrap();
    assert!(cc.rep(c).is_identity());
    let b = BVec::basis(4, 2, 2, 4).unwrap();
    let c = cc.fixed_class_lift(&s, &b).unwrap().unwrap();
    assert_eq!(c, cc.class_of(&elem_gen(4, 2, 2, 4, 1).unwrap()).unwrap());
    assert!(cc.fixed_class_lift(&s, &BVec::basis(4, 2, 0, 3).unwrap()).is_err());
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3)] {
        let cc = conj_classes(n, p).unwrap();
        let pairs = b_pairs(n);
        let second: Vec<usize> = (0..pairs.len()).filter(|&k| pairs[k].1 - pairs[k].0 == 2).collect();
        let total = (p as usize).pow(second.len() as u32);
        for s in AVec::all(n, p) {
            let mut found = 0;
            for mut idx in 0..total {
                let mut b = BVec::zero(n, p);
                for &k in &second {
                    b.b[k] = (idx % p as usize) as u32;
                    idx /= p as usize;
                }
                if a_act_on_b(&s, &b).unwrap() != b {
                    assert!(cc.fixed_class_lift(&s, &b).is_err());
                    continue;
                }
                let c = cc.fixed_class_lift(&s, &b).unwrap();
                assert!(c.is_some(), "n={n} p={p} s={:?} b={:?}", s.a, b.b);
                assert_eq!(b_of(&cc.rep(c.unwrap())), b);
                found += 1;
            }
            assert!(found >= 1);
        }
    }
}

#[test]
fn outer_exponent_small() {
    for p in [2u32, 3, 5] {
        let oe = outer_exponent(&conj_classes(2, p).unwrap());
        assert_eq!(oe.e, p as u64);
    }
    for (n, p) in [(3usize, 2u32), (4, 2), (5, 2), (6, 2), (3, 3), (4, 3), (5, 3)] {
        let oe = outer_exponent(&conj_classes(n, p).unwrap());
        assert_eq!(oe.e, p as u64, "n={n} p={p}");
        assert_eq!(oe.e % p as u64, 0);
        assert_eq!(oe.d % oe.e, 0);
    }
}

#[test]
fn theta_examples() {
    let mut b = BVec::zero(5, 2);
    for (i, j) in [(0, 2), (3, 5), (1, 4)] {
        b = b.add(&BVec::basis(5, 2, i, j).unwrap());
    }
    let rep = theta_surjectivity(2, &b, None).unwrap();
    assert!(rep.surjective);
    assert!(rep.listed_values_match, "{:?}", rep.mismatches);
    assert_eq!(rep.matrix[b_pairs(5).iter().position(|&x| x == (2, 4)).unwrap()], vec![1, 0, 0]);
    assert!(theta_surjectivity(2, &BVec::basis(5, 2, 1, 4).unwrap(), None).is_err());
    for p in [2u32, 3] {
        let cc = conj_classes(5, p).unwrap();
        let mut cases = HashSet::new();
        for s in AVec::all(5, p) {
            let Ok((case, bb)) = theta_case(&s) else { continue };
            cases.insert(case);
            let full = bb.add(&BVec::basis(5, p, 1, 4).unwrap());
            let rep = theta_surjectivity(p, &full, Some(&cc)).unwrap();
            assert!(rep.surjective && rep.listed_values_match, "{rep:?}");
            assert_eq!(rep.unique_lift_class, Some(true));
        }
        assert_eq!(cases.len(), 4);
    }
}
