use massey_core::cohom::{is_2cocycle, FiniteGroup};
use massey_core::massey::{
    defining_system_to_hom, enumerate_defining_systems, enumerate_homs, hom_to_defining_system, massey_value,
    on_generators, MasseyProblem,
};
use massey_core::unigroup::{aw_split_check, build_TW, tw_degenerates_to_unitri};
use serde_json::{json, Value};

use super::{all_vectors, Tally};
use crate::report::{to_value, Budgets, CheckRow};
use crate::Failure;

/// Character tuples (χ_0..χ_n) of Γ into `units` ⊆ (Z/m)*.
fn char_tuples(g: &FiniteGroup, n: usize, m: u32, units: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let ng = g.generators().len();
    let chars: Vec<Vec<u32>> = all_vectors(ng, units.len() as u64)
        .into_iter()
        .map(|idx| idx.iter().map(|&i| units[i as usize]).collect::<Vec<u32>>())
        .filter(|v| g.extend_hom(v, &1u32, |&a, &b| a * b % m).is_some())
        .collect();
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

pub fn run(budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let mut checks = Vec::new();

    let ctx = build_TW(3, 8, None)?;
    let aw = aw_split_check(&ctx);
    checks.push(
        CheckRow::new(
            "A(W) sequence splits and the Z/8 subgroup diagram commutes with exact rows",
            Some(13),
            aw.passed(),
            format!("{} sub-checks", aw.checks.len()),
        )
        .with_witness(Some(to_value(&aw))),
    );
    let mut degen = Tally::new("T(W) with trivial diagonal is U at prime m", Some(13));
    for (n, p) in [(3usize, 2u32), (3, 3), (3, 5), (4, 2)] {
        degen.observe(tw_degenerates_to_unitri(n, p, 2000), || json!({"n": n, "p": p}));
    }
    checks.push(degen.row("(n, m) ∈ {(3,2), (3,3), (3,5), (4,2)}"));

    // twisted coefficients: defining systems, homomorphisms and values agree
    let mut twisted = Tally::new("twisted coefficients: systems biject with lifts, values are 2-cocycles", None);
    let cases: Vec<(&str, FiniteGroup, u32, Vec<u32>)> = vec![
        ("Z2", FiniteGroup::cyclic(2), 3, vec![1, 2]),
        ("Z2", FiniteGroup::cyclic(2), 4, vec![1, 3]),
        ("Z4", FiniteGroup::cyclic(4), 5, vec![1, 2, 3, 4]),
        ("S3", FiniteGroup::dihedral(3), 3, vec![1, 2]),
    ];
    let n = 3;
    for (name, g, m, units) in &cases {
        let ng = g.generators().len();
        for chars in char_tuples(g, n, *m, units).into_iter().step_by(5) {
            for vals in all_vectors(n * ng, *m as u64).into_iter().step_by(11) {
                let alpha: Vec<Vec<u64>> = vals.chunks(ng).map(|c| c.to_vec()).collect();
                let Ok(pr) = MasseyProblem::generalized(g, n, *m, &chars, &alpha) else {
                    continue;
                };
                let (homs, tried) = enumerate_homs(&pr, 1 << 22)?;
                budgets.add("candidates_tried", tried);
                let systems = enumerate_defining_systems(&pr, 1 << 20)?;
                let mut ok = homs.len() == systems.len();
                let module = pr.module(0, n)?;
                for h in &homs {
                    let ds = hom_to_defining_system(&pr, h)?;
                    ok &= on_generators(g, &defining_system_to_hom(&pr, &ds)?) == *h;
                    let v = massey_value(&pr, &ds)?;
                    let c: Vec<Vec<u64>> = v.cocycle.iter().map(|&x| vec![x]).collect();
                    ok &= is_2cocycle(g, &module, &c);
                }
                twisted.observe(ok, || json!({"group": name, "m": m, "characters": chars, "alpha": alpha}));
            }
        }
    }
    checks.push(twisted.row("Γ ∈ {Z2, Z4, S3}, m ∈ {3, 4, 5}, n = 3, strided over characters and cocycles"));
    Ok((json!({"aw_split": to_value(&aw)}), checks))
}
