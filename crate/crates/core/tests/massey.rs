mod common;

use std::collections::BTreeSet;

use massey_core::cohom::{coboundary2_test, h2_bar, is_2cocycle, FiniteGroup, GModule, Level};
use massey_core::massey::{
    defining_system_to_hom, enumerate_defining_systems, enumerate_homs, hom_to_defining_system, is_defined,
    massey_product_set, massey_value, on_generators, vanishes, MasseyError, MasseyOptions, MasseyProblem,
};
use massey_core::unigroup::{TriW, UniTri};
use proptest::prelude::*;

use common::{all_vectors, small_groups};

/// Generator-value vectors of all homomorphisms Γ → Z/p.
fn homs_to_zp(g: &FiniteGroup, p: u64) -> Vec<Vec<u64>> {
    all_vectors(g.generators().len(), p)
        .into_iter()
        .filter(|v| g.extend_hom(v, &0u64, |&a, &b| (a + b) % p).is_some())
        .collect()
}

/// All tuples (α_0, …, α_{n−1}) of homomorphisms Γ → Z/p.
fn alpha_tuples(g: &FiniteGroup, n: usize, p: u64) -> Vec<Vec<Vec<u64>>> {
    let hs = homs_to_zp(g, p);
    let mut out: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                hs.iter().map(move |h| {
                    let mut t = t.clone();
                    t.push(h.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Oracle: every homomorphism Γ → U/Z by enumerating all generator images in U/Z.
fn brute_homs_mod_center(g: &FiniteGroup, n: usize, p: u32) -> Vec<Vec<UniTri>> {
    let ne = massey_core::unigroup::num_entries(n) as u32;
    let elems: Vec<UniTri> = (0..(p as u128).pow(ne))
        .map(|i| UniTri::from_index(n, p, i))
        .filter(|x| x.get(0, n) == 0)
        .collect();
    let k = g.generators().len();
    let mut out = Vec::new();
    for idx in all_vectors(k, elems.len() as u64) {
        let imgs: Vec<UniTri> = idx.iter().map(|&i| elems[i as usize].clone()).collect();
        if g.extend_hom(&imgs, &UniTri::identity(n, p), |a, b| Level::ModCenter.mul(a, b)).is_some() {
            out.push(imgs);
        }
    }
    out
}

fn superdiag(imgs: &[UniTri], n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| imgs.iter().map(|x| x.get(i, i + 1) as u64).collect()).collect()
}

fn small_opts() -> MasseyOptions {
    MasseyOptions::default()
}

#[test]
fn trivial_alpha_gives_zero_system() {
    let g = FiniteGroup::dihedral(4);
    let pr = MasseyProblem::classical(&g, 3, 2, &vec![vec![0, 0]; 3]).unwrap();
    let id = vec![TriW::identity(3, 2); 2];
    let ds = hom_to_defining_system(&pr, &id).unwrap();
    assert!(ds.values.iter().all(|v| v.iter().all(|&x| x == 0)));
    let hom = defining_system_to_hom(&pr, &ds).unwrap();
    assert!(hom.iter().all(|x| *x == TriW::identity(3, 2)));
    let v = massey_value(&pr, &ds).unwrap();
    assert!(v.trivial && v.cocycle.iter().all(|&x| x == 0));
    assert!(is_defined(&pr, &small_opts()).unwrap());
    assert!(vanishes(&pr, &small_opts()).unwrap());
    assert!(massey_product_set(&pr, &small_opts()).unwrap().contains_zero);
}

#[test]
fn round_trip_and_bijection_n3_p2() {
    let mut total = 0usize;
    for (name, g) in small_groups(8) {
        let oracle = brute_homs_mod_center(&g, 3, 2);
        for alpha in alpha_tuples(&g, 3, 2) {
            let pr = MasseyProblem::classical(&g, 3, 2, &alpha).unwrap();
            let expected: BTreeSet<Vec<UniTri>> =
                oracle.iter().filter(|h| superdiag(h, 3) == alpha).cloned().collect();
            for h in &expected {
                let tw: Vec<TriW> = h.iter().map(TriW::from_unitri).collect();
                let ds = hom_to_defining_system(&pr, &tw).unwrap();
                let back = defining_system_to_hom(&pr, &ds).unwrap();
                assert_eq!(on_generators(&g, &back), tw, "{name} {alpha:?}");
                total += 1;
            }
            let (found, _) = enumerate_homs(&pr, 1 << 22).unwrap();
            let found: BTreeSet<Vec<UniTri>> =
                found.iter().map(|h| h.iter().map(|x| x.to_unitri().unwrap()).collect()).collect();
            assert_eq!(found, expected, "{name} {alpha:?}");
            let systems = enumerate_defining_systems(&pr, 1 << 20).unwrap();
            assert_eq!(systems.len(), expected.len(), "{name} {alpha:?}");
        }
    }
    assert!(total > 1000);
}

#[test]
fn bijection_counts_n4_p2() {
    for (name, g) in small_groups(8) {
        let tuples = alpha_tuples(&g, 4, 2);
        // three-generator groups: every 37th tuple
        let step = if g.generators().len() >= 3 { 37 } else { 1 };
        for alpha in tuples.iter().step_by(step) {
            let pr = MasseyProblem::classical(&g, 4, 2, alpha).unwrap();
            let (homs, _) = enumerate_homs(&pr, 1 << 22).unwrap();
            let systems = enumerate_defining_systems(&pr, 1 << 20).unwrap();
            assert_eq!(systems.len(), homs.len(), "{name} {alpha:?}");
            let set: BTreeSet<_> = homs.iter().map(|h| hom_to_defining_system(&pr, h).unwrap()).collect();
            let sys: BTreeSet<_> = systems.iter().cloned().collect();
            assert_eq!(set.len(), systems.len());
            assert_eq!(set, sys, "{name} {alpha:?}");
        }
    }
}

#[test]
fn product_set_matches_brute_force_n3_p2() {
    for (name, g) in small_groups(8) {
        let oracle = brute_homs_mod_center(&g, 3, 2);
        let h2 = h2_bar(&g, &GModule::trivial(&g, 2, 1).unwrap()).unwrap();
        let order = g.order();
        for alpha in alpha_tuples(&g, 3, 2) {
            let pr = MasseyProblem::classical(&g, 3, 2, &alpha).unwrap();
            let ps = massey_product_set(&pr, &small_opts()).unwrap();
            let mut want = BTreeSet::new();
            for h in oracle.iter().filter(|h| superdiag(h, 3) == alpha) {
                let full = g.extend_hom(h, &UniTri::identity(3, 2), |a, b| Level::ModCenter.mul(a, b)).unwrap();
                // b(σ, τ) = −∑_k x_{0k}(σ) x_{k3}(τ)
                let mut c = Vec::with_capacity(order * order);
                for s in 0..order {
                    for t in 0..order {
                        let v: u32 = (1..3).map(|k| full[s].get(0, k) * full[t].get(k, 3)).sum();
                        c.push(vec![((2 - v % 2) % 2) as u64]);
                    }
                }
                want.insert(h2.signature(&c).unwrap());
            }
            let got: BTreeSet<Vec<u64>> = ps.classes.iter().cloned().collect();
            assert_eq!(got, want, "{name} {alpha:?}");
            let defined = is_defined(&pr, &small_opts()).unwrap();
            let van = vanishes(&pr, &small_opts()).unwrap();
            assert_eq!(defined, !ps.is_empty(), "{name} {alpha:?}");
            assert_eq!(van, ps.contains_zero, "{name} {alpha:?}");
            for l in &ps.lifts {
                assert_eq!(l.lifts_to_u, Some(l.value_trivial), "{name} {alpha:?}");
            }
            assert!(ps.bucket_count <= ps.raw_count());
        }
    }
}

#[test]
fn cup_product_case_n2() {
    for (name, g) in small_groups(8) {
        let order = g.order();
        let triv = GModule::trivial(&g, 2, 1).unwrap();
        for alpha in alpha_tuples(&g, 2, 2) {
            let pr = MasseyProblem::classical(&g, 2, 2, &alpha).unwrap();
            assert!(is_defined(&pr, &small_opts()).unwrap());
            let (a0, a1) = (pr.alpha(0).to_vec(), pr.alpha(1).to_vec());
            let c: Vec<Vec<u64>> = (0..order * order)
                .map(|x| vec![(a0[x / order] * a1[x % order]) % 2])
                .collect();
            let cup_trivial = coboundary2_test(&g, &triv, &c).unwrap().is_some();
            assert_eq!(vanishes(&pr, &small_opts()).unwrap(), cup_trivial, "{name} {alpha:?}");
            let systems = enumerate_defining_systems(&pr, 10).unwrap();
            assert_eq!(systems.len(), 1);
        }
    }
    // (Z/2)², coordinate characters: χ₁ ∪ χ₂ ≠ 0
    let z2 = FiniteGroup::cyclic(2);
    let v4 = FiniteGroup::product(&z2, &z2);
    let pr = MasseyProblem::classical(&v4, 2, 2, &[vec![1, 0], vec![0, 1]]).unwrap();
    assert!(!vanishes(&pr, &small_opts()).unwrap());
}

#[test]
fn mined_defined_but_not_vanishing() {
    let mut found = Vec::new();
    for p in [2u32, 3] {
        for (name, g) in small_groups(8) {
            for alpha in alpha_tuples(&g, 3, p as u64) {
                let pr = MasseyProblem::classical(&g, 3, p, &alpha).unwrap();
                if is_defined(&pr, &small_opts()).unwrap() && !vanishes(&pr, &small_opts()).unwrap() {
                    found.push((p, name.clone(), alpha));
                }
            }
        }
    }
    // at p = 2 every defined triple product over these groups vanishes
    assert!(found.iter().all(|(p, _, _)| *p == 3));
    // Z/3, α = (χ, χ, χ): x³ has (0, 3) entry α_0α_1α_2 = 1 for every lift x
    assert!(found.iter().any(|(_, n, a)| n == "Z3" && a == &vec![vec![1], vec![1], vec![1]]));
    let z3 = FiniteGroup::cyclic(3);
    let pr = MasseyProblem::classical(&z3, 3, 3, &[vec![1], vec![1], vec![1]]).unwrap();
    let ps = massey_product_set(&pr, &small_opts()).unwrap();
    assert!(!ps.is_empty() && !ps.contains_zero);
}

#[test]
fn generalized_degenerates_to_classical() {
    for p in [2u32, 3] {
        for (name, g) in small_groups(8) {
            for alpha in alpha_tuples(&g, 3, p as u64) {
                let ng = g.generators().len();
                let c = MasseyProblem::classical(&g, 3, p, &alpha).unwrap();
                let w = MasseyProblem::generalized(&g, 3, p, &vec![vec![1; ng]; 4], &alpha).unwrap();
                let (hc, tc) = enumerate_homs(&c, 1 << 22).unwrap();
                let (hw, tw) = enumerate_homs(&w, 1 << 22).unwrap();
                assert_eq!((&hc, tc), (&hw, tw));
                for h in &hc {
                    let dc = hom_to_defining_system(&c, h).unwrap();
                    let dw = hom_to_defining_system(&w, h).unwrap();
                    assert_eq!(dc, dw, "{name} {alpha:?}");
                    assert_eq!(defining_system_to_hom(&c, &dc).unwrap(), defining_system_to_hom(&w, &dw).unwrap());
                    assert_eq!(massey_value(&c, &dc).unwrap(), massey_value(&w, &dw).unwrap());
                }
                assert_eq!(
                    enumerate_defining_systems(&c, 1 << 20).unwrap(),
                    enumerate_defining_systems(&w, 1 << 20).unwrap()
                );
                let (pc, pw) = (massey_product_set(&c, &small_opts()).unwrap(), massey_product_set(&w, &small_opts()).unwrap());
                assert_eq!(pc.classes, pw.classes);
                assert_eq!(pc.bucket_count, pw.bucket_count);
                assert_eq!(pc.contains_zero, pw.contains_zero);
                assert_eq!(is_defined(&c, &small_opts()).unwrap(), is_defined(&w, &small_opts()).unwrap());
                assert_eq!(vanishes(&c, &small_opts()).unwrap(), vanishes(&w, &small_opts()).unwrap());
            }
        }
    }
}

/// All generator-value tuples (χ_0..χ_n) of characters Γ → (Z/m)* drawn from `units`.
fn char_tuples(g: &FiniteGroup, n: usize, m: u32, units: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let ng = g.generators().len();
    let mut chars = Vec::new();
    for idx in all_vectors(ng, units.len() as u64) {
        let v: Vec<u32> = idx.iter().map(|&i| units[i as usize]).collect();
        if g.extend_hom(&v, &1u32, |&a, &b| a * b % m).is_some() {
            chars.push(v);
        }
    }
    let mut out: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for _ in 0..=n {
        out = out
            .into_iter()
            .flat_map(|t| {
                chars.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    out
}

#[test]
fn generalized_twisted_coefficients() {
    // Γ ∈ {Z2, Z4, V4} acting on N_i = Z/m through ±1 (and Z/8 units), n = 3
    let cases: Vec<(FiniteGroup, u32, Vec<u32>)> = vec![
        (FiniteGroup::cyclic(2), 3, vec![1, 2]),
        (FiniteGroup::cyclic(2), 4, vec![1, 3]),
        (FiniteGroup::cyclic(2), 8, vec![1, 3, 5, 7]),
        (FiniteGroup::cyclic(4), 5, vec![1, 2, 3, 4]),
        (FiniteGroup::dihedral(3), 3, vec![1, 2]),
    ];
    let mut twisted = 0;
    for (g, m, units) in cases {
        let ng = g.generators().len();
        for chars in char_tuples(&g, 3, m, &units).into_iter().step_by(3) {
            // α_i: 1-cocycles into M_{i,i+1}; try all generator values
            for vals in all_vectors(3 * ng, m as u64).into_iter().step_by(7) {
                let alpha: Vec<Vec<u64>> = vals.chunks(ng).map(|c| c.to_vec()).collect();
                let Ok(pr) = MasseyProblem::generalized(&g, 3, m, &chars, &alpha) else {
                    continue;
                };
                if chars.iter().any(|c| c.iter().any(|&x| x != 1)) {
                    twisted += 1;
                }
                let (homs, _) = enumerate_homs(&pr, 1 << 22).unwrap();
                let systems = enumerate_defining_systems(&pr, 1 << 20).unwrap();
                assert_eq!(homs.len(), systems.len(), "m = {m}, χ = {chars:?}, α = {alpha:?}");
                for h in &homs {
                    let ds = hom_to_defining_system(&pr, h).unwrap();
                    ds.validate(&pr).unwrap();
                    let back = defining_system_to_hom(&pr, &ds).unwrap();
                    assert_eq!(on_generators(&g, &back), *h);
                    let v = massey_value(&pr, &ds).unwrap();
                    let module = pr.module(0, 3).unwrap();
                    let c: Vec<Vec<u64>> = v.cocycle.iter().map(|&x| vec![x]).collect();
                    assert!(is_2cocycle(&g, &module, &c));
                }
                let ps = massey_product_set(&pr, &small_opts()).unwrap();
                assert_eq!(ps.raw_count(), homs.len());
                assert_eq!(is_defined(&pr, &small_opts()).unwrap(), !homs.is_empty());
            }
        }
    }
    assert!(twisted > 20);
}

#[test]
fn errors_name_the_failure() {
    let z2 = FiniteGroup::cyclic(2);
    let v4 = FiniteGroup::product(&z2, &z2);
    let pr = MasseyProblem::classical(&v4, 3, 2, &[vec![1, 0], vec![0, 0], vec![0, 1]]).unwrap();
    let systems = enumerate_defining_systems(&pr, 1 << 20).unwrap();
    let mut bad = systems[0].clone();
    let k = bad.pairs.iter().position(|&p| p == (0, 2)).unwrap();
    bad.values[k][1] ^= 1;
    match defining_system_to_hom(&pr, &bad) {
        Err(MasseyError::Condition { i, j, .. }) => assert_eq!((i, j), (0, 2)),
        other => panic!("expected a condition failure, got {other:?}"),
    }
    assert!(matches!(massey_value(&pr, &bad), Err(MasseyError::Condition { .. })));
    // not a homomorphism: the generator of Z/3 sent to an element of order 2
    let z3 = FiniteGroup::cyclic(3);
    let pr3 = MasseyProblem::classical(&z3, 2, 2, &[vec![0], vec![0]]).unwrap();
    let mut x = TriW::identity(2, 2);
    x.set(0, 1, 1);
    assert!(hom_to_defining_system(&pr3, &[x]).is_err());
    // a homomorphism that does not lift α
    let pr0 = MasseyProblem::classical(&z2, 2, 2, &[vec![0], vec![0]]).unwrap();
    let mut y = TriW::identity(2, 2);
    y.set(0, 1, 1);
    assert!(matches!(hom_to_defining_system(&pr0, &[y]), Err(MasseyError::NotLift(_))));
    // α not a homomorphism
    assert!(matches!(
        MasseyProblem::classical(&z3, 2, 2, &[vec![1], vec![0]]),
        Err(MasseyError::NotHom(_))
    ));
    // budget
    let e8 = FiniteGroup::elementary_abelian(2, 3);
    let big = MasseyProblem::classical(&e8, 5, 2, &vec![vec![0, 0, 0]; 5]).unwrap();
    let opts = MasseyOptions {
        max_candidates: 100,
        ..MasseyOptions::default()
    };
    let err = massey_product_set(&big, &opts).unwrap_err();
    assert!(err.is_budget());
}

#[test]
fn conjugacy_buckets_zero_alpha() {
    // α = 0 on Z/2, n = 3, p = 2: lifts are pairs (x02, x13) with a unipotent relation; buckets are U¹/Z-orbits
    let z2 = FiniteGroup::cyclic(2);
    let pr = MasseyProblem::classical(&z2, 3, 2, &vec![vec![0]; 3]).unwrap();
    let ps = massey_product_set(&pr, &small_opts()).unwrap();
    // x = I + a e02 + b e13 (+ c e03 dropped) has x² ≡ 1 mod Z for all a, b
    assert_eq!(ps.raw_count(), 4);
    // U¹/Z is abelian of order 4 and acts trivially on these lifts when α = 0
    assert_eq!(ps.bucket_count, 4);
    let pr1 = MasseyProblem::classical(&z2, 3, 2, &vec![vec![1]; 3]).unwrap();
    let ps1 = massey_product_set(&pr1, &small_opts()).unwrap();
    assert!(ps1.bucket_count < ps1.raw_count() || ps1.raw_count() == 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn value_is_a_cocycle(gi in 0usize..20, ai in 0usize..10_000, si in 0usize..10_000, n in 2usize..5) {
        let groups = small_groups(8);
        let (_, g) = &groups[gi % groups.len()];
        let tuples = alpha_tuples(g, n, 2);
        let alpha = &tuples[ai % tuples.len()];
        let pr = MasseyProblem::classical(g, n, 2, alpha).unwrap();
        let systems = enumerate_defining_systems(&pr, 1 << 20).unwrap();
        prop_assume!(!systems.is_empty());
        let ds = &systems[si % systems.len()];
        let v = massey_value(&pr, ds).unwrap();
        let c: Vec<Vec<u64>> = v.cocycle.iter().map(|&x| vec![x]).collect();
        prop_assert!(is_2cocycle(g, &GModule::trivial(g, 2, 1).unwrap(), &c));
        prop_assert_eq!(v.cocycle, v.from_extension);
    }
}
