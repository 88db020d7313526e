use std::collections::HashSet;

use massey_core::unigroup::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn e(n: usize, m: u32, i: usize, j: usize) -> UniTri {
    elem_gen(n, m, i, j, 1).unwrap()
}

fn all_elems(n: usize, p: u32) -> Vec<UniTri> {
    let total = (p as u128).pow(num_entries(n) as u32);
    (0..total).map(|i| UniTri::from_index(n, p, i)).collect()
}

#[test]
fn elem_gen_examples() {
    let z = e(3, 2, 0, 3);
    assert_eq!(z.lcs_level(), 2);
    assert!(elem_gen(3, 2, 0, 3, 0).unwrap().is_identity());
    let x = elem_gen(4, 3, 1, 3, 2).unwrap();
    assert_eq!(x.mul(&x), elem_gen(4, 3, 1, 3, 1).unwrap());
    assert!(matches!(elem_gen(3, 2, 2, 1, 1), Err(UniError::IndexOutOfRange(..))));
    assert!(elem_gen(3, 2, 0, 4, 1).is_err());
}

#[test]
fn product_and_commutators() {
    let x = e(3, 5, 0, 1).mul(&e(3, 5, 1, 2));
    assert_eq!((x.get(0, 1), x.get(1, 2), x.get(0, 2)), (1, 1, 1));
    assert_eq!(e(3, 5, 0, 1).commutator(&e(3, 5, 1, 2)), e(3, 5, 0, 2));
    assert!(e(3, 5, 0, 1).commutator(&e(3, 5, 2, 3)).is_identity());
    assert!(mul(&e(3, 5, 0, 1), &e(4, 5, 0, 1)).is_err());
}

#[test]
fn elementary_relations_up_to_n6() {
    for n in 2..=6 {
        let pos = positions(n);
        for &(i, j) in &pos {
            for &(k, l) in &pos {
                let c = e(n, 3, i, j).commutator(&e(n, 3, k, l));
                if j == k {
                    assert_eq!(c, e(n, 3, i, l));
                } else if i != l {
                    assert!(c.is_identity(), "[e{i}{j}, e{k}{l}] at n={n}");
                }
            }
        }
    }
}

#[test]
fn inverse_of_superdiagonal_matrix() {
    for (n, p) in [(4usize, 5u32), (5, 3), (6, 7)] {
        for a in [vec![1u32, 2, 3, 4, 1, 2], vec![2, 2, 0, 1, 3, 1]] {
            let s = AVec::new(n, p, a[..n].to_vec()).unwrap().lift();
            let si = s.inv();
            for i in 0..=n {
                for j in i + 1..=n {
                    let prod = (i..j).fold(1i64, |acc, l| acc * a[l] as i64 % p as i64);
                    let sign = if (j - i) % 2 == 0 { 1 } else { -1 };
                    let expect = (sign * prod).rem_euclid(p as i64) as u32;
                    assert_eq!(si.get(i, j), expect);
                }
            }
            assert!(s.mul(&si).is_identity());
        }
    }
}

#[test]
fn lcs_level_examples() {
    assert_eq!(e(4, 2, 0, 4).lcs_level(), 3);
    assert_eq!(e(4, 2, 1, 2).lcs_level(), 0);
    assert_eq!(e(4, 2, 0, 2).mul(&e(4, 2, 1, 4)).lcs_level(), 1);
    assert_eq!(UniTri::identity(4, 2).lcs_level(), 4);
}

#[test]
fn quotients_a_and_b() {
    for i in 0..4 {
        assert_eq!(e(4, 3, i, i + 1).to_a(), AVec::basis(4, 3, i));
    }
    let b = e(4, 3, 0, 2).mul(&e(4, 3, 0, 3)).to_b().unwrap();
    assert_eq!(b, BVec::basis(4, 3, 0, 2).unwrap().add(&BVec::basis(4, 3, 0, 3).unwrap()));
    assert!(matches!(e(4, 3, 0, 1).to_b(), Err(UniError::NotInU1)));
    // kernel of to_B on U¹ is U³, commutators of U¹ die in B
    for (n, p) in [(4usize, 2u32), (4, 3), (5, 2)] {
        let u1: Vec<UniTri> = all_elems(n, p).into_iter().filter(|x| x.lcs_level() >= 1).collect();
        for x in &u1 {
            assert_eq!(x.to_b().unwrap().is_zero(), x.lcs_level() >= 3);
        }
        let mut rng = StdRng::seed_from_u64(n as u64);
        for _ in 0..200 {
            let x = UniTri::random_in_level(n, p, 1, &mut rng);
            let y = UniTri::random_in_level(n, p, 1, &mut rng);
            assert!(x.commutator(&y).to_b().unwrap().is_zero());
            let s = x.mul(&y).to_b().unwrap();
            assert_eq!(s, x.to_b().unwrap().add(&y.to_b().unwrap()));
        }
    }
}

#[test]
fn tau_examples_and_levels() {
    let t = tau(&e(4, 3, 0, 2));
    assert_eq!(t, elem_gen(4, 3, 2, 4, -1).unwrap());
    for n in 2..=4 {
        for &(i, j) in &positions(n) {
            assert_eq!(tau(&e(n, 5, i, j)), elem_gen(n, 5, n - j, n - i, -1).unwrap());
        }
    }
    for n in 2..=4 {
        for x in all_elems(n, 2) {
            assert_eq!(tau(&tau(&x)), x);
            assert_eq!(tau(&x).lcs_level(), x.lcs_level());
        }
    }
}

#[test]
fn level_filtration_is_central_series() {
    for (n, p) in [(3usize, 2u32), (4, 3), (5, 2), (5, 3)] {
        for &(i, j) in &positions(n) {
            for &(k, l) in &positions(n) {
                let level = j - i - 1;
                let c = e(n, p, i, j).commutator(&e(n, p, k, l));
                assert!(c.lcs_level() >= level + 1);
            }
        }
    }
}

#[test]
fn a_action_on_b_examples() {
    let s = AVec::basis(4, 3, 0);
    let out = a_act_on_b(&s, &BVec::basis(4, 3, 1, 3).unwrap()).unwrap();
    assert_eq!(out, BVec::basis(4, 3, 1, 3).unwrap().add(&BVec::basis(4, 3, 0, 3).unwrap()));
    let s = AVec::basis(4, 3, 2);
    let out = a_act_on_b(&s, &BVec::basis(4, 3, 0, 2).unwrap()).unwrap();
    assert_eq!(out, BVec::basis(4, 3, 0, 2).unwrap().sub(&BVec::basis(4, 3, 0, 3).unwrap()));
    let s = AVec::basis(4, 3, 0);
    let b = BVec::basis(4, 3, 2, 4).unwrap();
    assert_eq!(a_act_on_b(&s, &b).unwrap(), b);
}

#[test]
fn a_action_matches_conjugation_exhaustively() {
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3)] {
        let u1: Vec<UniTri> = all_elems(n, p).into_iter().filter(|x| x.lcs_level() >= 1).collect();
        for s in AVec::all(n, p) {
            let sm = s.lift();
            for q in &u1 {
                let b = q.to_b().unwrap();
                let lhs = q.conj_by(&sm).to_b().unwrap();
                assert_eq!(lhs, a_act_on_b(&s, &b).unwrap());
                assert_eq!(lhs, a_act_on_b_composed(&s, &b));
            }
        }
    }
}

#[test]
fn prs_examples() {
    let r = prs_check(4, 2, 1, 2).unwrap();
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.order, 2usize.pow(4));
    assert_eq!(r.quotient_rank, 3);
    let r = prs_check(4, 2, 2, 2).unwrap();
    assert!(r.normal_in_u && r.contains_center && r.quotient_elementary_abelian && r.rank_matches);
    assert!(!r.abelian);
    assert!(!r.abelian_claimed);
    assert_eq!(r.witnesses, vec!["[e02, e24] = e04 ≠ 1".to_string()]);
    let r = prs_check(3, 3, 1, 1).unwrap();
    assert!(r.passed());
    // P/Z has rank r + s = 2, so |P| = 3³
    assert_eq!(r.order, 27);
    assert!(prs_check(4, 2, 3, 1).is_err());
    assert!(prs_check(4, 4, 1, 1).is_err());
}

#[test]
fn prs_all_parameters() {
    for n in 3..=5 {
        for p in [2u32, 3] {
            for r in 1..=n - 2 {
                for s in 1..=n - 2 {
                    let rep = prs_check(n, p, r, s).unwrap();
                    assert!(rep.passed(), "{rep:?}");
                }
            }
        }
    }
}

#[test]
fn rho_examples() {
    let n = 4;
    let u = [1u32, 0, 0, 0, 0];
    let v = [0u32, 0, 0, 0, 1];
    assert_eq!(rho_eval(&u, &v, &e(n, 2, 0, n), 1, 2).unwrap(), 1);
    assert_eq!(rho_eval(&u, &v, &e(n, 2, 1, n), 1, 2).unwrap(), 0);
    assert!(matches!(rho_eval(&u, &v, &e(n, 2, 1, 2), 1, 2), Err(UniError::NotInP(1, 2))));
    for (r, s) in [(1usize, 2usize), (2, 1)] {
        let p_elems = subgroup_closure(&p_generators(n, 2, r, s), n, 2);
        for x in &p_elems {
            for y in &p_elems {
                let lhs = rho_eval(&u, &v, &x.mul(y), r, s).unwrap();
                let rhs = (rho_eval(&u, &v, x, r, s).unwrap() + rho_eval(&u, &v, y, r, s).unwrap()) % 2;
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn s_group_examples() {
    let u = [1u32, 0, 0, 0, 0];
    let v = [0u32, 0, 0, 0, 1];
    for (r, s) in [(1usize, 2usize), (2, 1)] {
        let rep = s_group(&u, &v, 4, 2, r, s).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.elements_checked, 1 << 10);
        assert!(s_member(&u, &v, &UniTri::identity(4, 2), r, s));
        assert_eq!(bilinear(&u, &v, &UniTri::identity(4, 2)), 0);
    }
    let rep = s_group(&[1, 1, 0, 0], &[0, 1, 0, 1], 3, 3, 1, 1).unwrap();
    assert!(rep.passed());
    assert!(s_group(&[0, 0, 0, 0, 0], &v, 4, 2, 1, 2).is_err());
}

#[test]
fn triangular_w_structures() {
    let ctx = build_TW(3, 8, None).unwrap();
    let rep = aw_split_check(&ctx);
    assert!(rep.passed(), "{rep:?}");
    assert!(rep.checks.len() >= 5);
    for p in [2u32, 3, 5] {
        assert!(tw_degenerates_to_unitri(3, p, 2000));
    }
    assert!(tw_degenerates_to_unitri(4, 2, 2000));
    // P = ⟨e02, e03, e12, e13⟩ over Z/8 is abelian
    let gens = [e(3, 8, 0, 2), e(3, 8, 0, 3), e(3, 8, 1, 2), e(3, 8, 1, 3)];
    for x in &gens {
        for y in &gens {
            assert!(x.commutator(y).is_identity());
        }
    }
}

#[test]
fn index_round_trip() {
    let mut seen = HashSet::new();
    for x in all_elems(3, 3) {
        let i = x.index().unwrap();
        assert_eq!(UniTri::from_index(3, 3, i), x);
        assert!(seen.insert(i));
    }
}

fn unitri(n: usize, p: u32) -> impl Strategy<Value = UniTri> {
    proptest::collection::vec(0..p, num_entries(n)).prop_map(move |v| {
        let mut x = UniTri::identity(n, p);
        for (k, (i, j)) in positions(n).into_iter().enumerate() {
            x.set(i, j, v[k]);
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn group_laws(x in unitri(5, 3), y in unitri(5, 3), z in unitri(5, 3)) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inv()).is_identity());
        prop_assert!(x.inv().mul(&x).is_identity());
        prop_assert!(x.mul(&y).lcs_level() >= x.lcs_level().min(y.lcs_level()));
    }

    #[test]
    fn tau_is_an_involutive_automorphism(x in unitri(6, 5), y in unitri(6, 5)) {
        prop_assert_eq!(tau(&tau(&x)), x.clone());
        prop_assert_eq!(tau(&x.mul(&y)), tau(&x).mul(&tau(&y)));
        prop_assert_eq!(tau(&x).lcs_level(), x.lcs_level());
    }

    #[test]
    fn group_laws_over_z8(x in unitri(4, 8), y in unitri(4, 8), z in unitri(4, 8)) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inv()).is_identity());
    }
}

#[test]
fn associativity_sampled_many() {
    use rand::Rng;
    let mut rng = StdRng::seed_from_u64(11);
    for (n, m) in [(3usize, 2u32), (4, 3), (5, 8), (6, 2)] {
        for _ in 0..10_000 {
            let x = UniTri::random(n, m, &mut rng);
            let y = UniTri::random(n, m, &mut rng);
            let z = UniTri::random(n, m, &mut rng);
            assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }
        let _ = rng.gen::<u8>();
    }
}
