use std::collections::BTreeSet;

use massey_core::cohom::{
    brute_force_lifts, coboundary2_test, solve_embedding, EmbeddingOutcome, FiniteGroup, GModule, KernelSpec,
    Level, SolverOptions,
};
use massey_core::massey::{
    defining_system_to_hom, enumerate_defining_systems, enumerate_homs, hom_to_defining_system, massey_product_set,
    massey_value, on_generators, MasseyOptions, MasseyProblem,
};
use massey_core::unigroup::{num_entries, UniTri};
use serde_json::{json, Value};

use super::{all_vectors, small_groups, Tally};
use crate::report::{Budgets, CheckRow};
use crate::{Failure, Limits};

/// Generator values of every homomorphism Γ → Z/p.
fn homs_to_zp(g: &FiniteGroup, p: u64) -> Vec<Vec<u64>> {
    all_vectors(g.generators().len(), p)
        .into_iter()
        .filter(|v| g.extend_hom(v, &0u64, |&a, &b| (a + b) % p).is_some())
        .collect()
}

fn tuples<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                items.iter().map(move |h| {
                    let mut t = t.clone();
                    t.push(h.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Every homomorphism Γ → U/K, by trying all normal forms for each generator.
fn quotient_homs(g: &FiniteGroup, n: usize, p: u32, base: Level) -> Vec<Vec<UniTri>> {
    let ne = num_entries(n) as u32;
    let nfs: BTreeSet<UniTri> = (0..(p as u128).pow(ne))
        .map(|i| base.normal_form(&UniTri::from_index(n, p, i)))
        .collect();
    let nfs: Vec<UniTri> = nfs.into_iter().collect();
    let id = UniTri::identity(n, p);
    tuples(&nfs, g.generators().len())
        .into_iter()
        .filter(|imgs| g.extend_hom(imgs, &id, |x, y| base.mul(x, y)).is_some())
        .collect()
}

fn superdiag(imgs: &[UniTri], n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| imgs.iter().map(|x| x.get(i, i + 1) as u64).collect()).collect()
}

pub fn run(limits: &Limits, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let p = 2u32;
    let groups = small_groups(8);
    let mut bijection = Tally::new("defining systems biject with lifts Γ → U/Z", Some(11));
    let mut value = Tally::new("cup-sum value equals the extension class up to coboundary", Some(11));
    let mut degenerate = Tally::new("generalized construction with trivial characters equals the classical one", Some(11));
    let opts = MasseyOptions::default();
    for n in [2usize, 3] {
        for (name, g) in &groups {
            let oracle = quotient_homs(g, n, p, Level::ModCenter);
            let triv = GModule::trivial(g, p as u64, 1)?;
            let ng = g.generators().len();
            for alpha in tuples(&homs_to_zp(g, p as u64), n) {
                let pr = MasseyProblem::classical(g, n, p, &alpha)?;
                let expected: BTreeSet<Vec<UniTri>> =
                    oracle.iter().filter(|h| superdiag(h, n) == alpha).cloned().collect();
                let (homs, tried) = enumerate_homs(&pr, opts.max_candidates)?;
                budgets.add("candidates_tried", tried);
                let found: BTreeSet<Vec<UniTri>> = homs
                    .iter()
                    .map(|h| h.iter().map(|x| x.to_unitri().expect("classical lifts are unipotent")).collect())
                    .collect();
                let systems = enumerate_defining_systems(&pr, opts.max_systems)?;
                let sys_set: BTreeSet<_> = systems.iter().cloned().collect();
                let mut images = BTreeSet::new();
                let mut round_trip = true;
                for h in &homs {
                    let ds = hom_to_defining_system(&pr, h)?;
                    round_trip &= on_generators(g, &defining_system_to_hom(&pr, &ds)?) == *h;
                    images.insert(ds);
                }
                let ok = found == expected && systems.len() == expected.len() && images == sys_set && round_trip;
                bijection.observe(ok, || {
                    json!({"group": name, "n": n, "alpha": alpha, "oracle_lifts": expected.len(), "systems": systems.len()})
                });

                for ds in &systems {
                    let v = massey_value(&pr, ds)?;
                    let diff: Vec<Vec<u64>> = v
                        .cocycle
                        .iter()
                        .zip(&v.from_extension)
                        .map(|(a, b)| vec![(a + p as u64 - b) % p as u64])
                        .collect();
                    let ok = coboundary2_test(g, &triv, &diff)?.is_some();
                    value.observe(ok, || json!({"group": name, "n": n, "alpha": alpha}));
                }

                let w = MasseyProblem::generalized(g, n, p, &vec![vec![1; ng]; n + 1], &alpha)?;
                let (hw, _) = enumerate_homs(&w, opts.max_candidates)?;
                let sw = enumerate_defining_systems(&w, opts.max_systems)?;
                let mut same = hw == homs && sw == systems;
                for ds in &systems {
                    same &= massey_value(&pr, ds)? == massey_value(&w, ds)?;
                }
                let (pc, pw) = (massey_product_set(&pr, &opts)?, massey_product_set(&w, &opts)?);
                same &= pc.classes == pw.classes && pc.contains_zero == pw.contains_zero;
                degenerate.observe(same, || json!({"group": name, "n": n, "alpha": alpha}));
            }
        }
    }

    // embedding solver against exhaustive enumeration
    let mut solver = Tally::new("embedding solver agrees with exhaustive lift enumeration", Some(14));
    let sopts = SolverOptions {
        exhaustive_threshold: 0,
        max_nodes: limits.max_nodes,
        max_elems: limits.max_elems,
    };
    let n = 3;
    let mut unsolvable = 0u64;
    let mut nodes = 0u64;
    for (name, g) in &groups {
        for k in [KernelSpec::Center, KernelSpec::Lcs(2), KernelSpec::U1, KernelSpec::Prs(1, 1)] {
            let base = k.levels(n)?[0];
            for alpha in quotient_homs(g, n, p, base) {
                let (out, stats) = solve_embedding(g, n, p, k, &alpha, &sopts)?;
                nodes += stats.nodes;
                let oracle = brute_force_lifts(g, n, p, k, &alpha, 1, limits.max_elems)?;
                let ok = match &out {
                    EmbeddingOutcome::Lift(imgs) => {
                        !oracle.is_empty()
                            && g.extend_hom(imgs, &UniTri::identity(n, p), |x, y| x.mul(y)).is_some()
                            && imgs.iter().zip(&alpha).all(|(a, b)| base.normal_form(a) == *b)
                    }
                    EmbeddingOutcome::Unsolvable => {
                        unsolvable += 1;
                        oracle.is_empty()
                    }
                };
                solver.observe(ok, || {
                    json!({
                        "group": name,
                        "kernel": k,
                        "alpha": alpha.iter().map(|x| x.to_matrix()).collect::<Vec<_>>(),
                        "solver_found_lift": matches!(out, EmbeddingOutcome::Lift(_)),
                        "oracle_found_lift": !oracle.is_empty(),
                    })
                });
            }
        }
    }
    budgets.add("solver_nodes", nodes);
    let results = json!({
        "groups": groups.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "embedding_instances": solver.instances(),
        "unsolvable_instances": unsolvable,
    });
    let checks = vec![
        bijection.row("every α, |Γ| ≤ 8, n ∈ {2, 3}, p = 2"),
        value.row("every defining system, |Γ| ≤ 8, n ∈ {2, 3}, p = 2"),
        degenerate.row("every α, |Γ| ≤ 8, n ∈ {2, 3}, p = 2"),
        solver.row("every ᾱ: Γ → U/K, |Γ| ≤ 8, n = 3, p = 2, K ∈ {Z, U², U¹, P^{1,1}}"),
    ];
    Ok((results, checks))
}
