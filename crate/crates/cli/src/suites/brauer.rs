use std::sync::Arc;

use massey_core::brauer::{
    all_subgroups, build_problem_with, evaluate_formula_with, sandwich_scan_with, EvalOptions, GElem, SandwichScan,
    ScanPolicy,
};
use massey_core::conjact::{conj_classes_with_budget, ConjClasses};
use serde_json::{json, Value};

use super::{SuiteOptions, Tally};
use crate::problem::scan_summary;
use crate::report::{to_value, Budgets, CheckRow};
use crate::{Failure, Limits};

fn classes(n: usize, p: u32, limits: &Limits, budgets: &mut Budgets) -> Result<Arc<ConjClasses>, Failure> {
    let cc = conj_classes_with_budget(n, p, limits.max_elems)?;
    budgets.record("u1_elements", cc.u1_order() as u64);
    Ok(Arc::new(cc))
}

/// The n = 4, p = 2 instance G = ⟨(1,1,0,1), (1,0,1,1)⟩ with Sha¹_cyc = Z/2.
pub fn n4_example() -> Vec<GElem> {
    vec![(vec![1, 1, 0, 1], 1), (vec![1, 0, 1, 1], 1)]
}

fn observe_scan(scan: &SandwichScan, sandwich: &mut Tally) {
    for row in &scan.rows {
        sandwich.observe(row.report.all_checks_pass(), || to_value(row));
    }
}

pub fn run(opts: &SuiteOptions, limits: &Limits, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let eval = EvalOptions::default();
    let mut checks = Vec::new();
    let mut sandwich = Tally::new(
        "Sha ⊆ formula ⊆ H¹, formula ⊆ B̂₀-kernel, conditions coboundary invariant",
        Some(10),
    );
    let mut scans = Vec::new();

    // n = 3: the formula subgroup vanishes on every subgroup
    let mut n3 = Tally::new("formula subgroup is 0 for every G at n = 3", Some(7));
    for p in [2u32, 3] {
        let cc = classes(3, p, limits, budgets)?;
        let scan = sandwich_scan_with(cc, &ScanPolicy::Exhaustive, &eval)?;
        for row in &scan.rows {
            n3.observe(row.report.formula_dim == 0, || to_value(row));
        }
        observe_scan(&scan, &mut sandwich);
        scans.push(scan_summary(&scan));
    }
    checks.push(n3.row("exhaustive over subgroups of A × (Z/p)*, p ∈ {2, 3}"));

    // the n = 4 example
    let cc4 = classes(4, 2, limits, budgets)?;
    let problem = build_problem_with(cc4.clone(), &n4_example())?;
    let r = evaluate_formula_with(&problem, &eval)?;
    let ok = r.sha_dim == 1 && r.formula_dim == 1 && r.sha_b0_dim == 0 && r.all_checks_pass();
    checks.push(
        CheckRow::new(
            "n = 4, G = ⟨(1,1,0,1), (1,0,1,1)⟩: dim Sha = dim formula = 1, Sha(B̂₀) = 0",
            Some(8),
            ok,
            format!(
                "|G| = {}, h1 = {}, sha = {}, formula = {}, sha_b0 = {}",
                r.group_order, r.h1_dim, r.sha_dim, r.formula_dim, r.sha_b0_dim
            ),
        )
        .with_witness(Some(to_value(&r))),
    );
    let n4_report = to_value(&r);

    // χ onto (Z/3)* forces H¹ = 0
    let mut nop = Tally::new("χ onto (Z/3)* gives H¹(G, B̂) = 0", Some(9));
    for n in [3usize, 4] {
        let cc = classes(n, 3, limits, budgets)?;
        for gens in all_subgroups(n, 3, 3) {
            if gens.iter().all(|g| g.1 == 1) {
                continue;
            }
            let problem = build_problem_with(cc.clone(), &gens)?;
            if !problem.chi_surjective() {
                continue;
            }
            let r = evaluate_formula_with(&problem, &eval)?;
            nop.observe(r.h1_dim == 0, || json!({"n": n, "generators": gens, "h1": r.h1_dim}));
        }
    }
    checks.push(nop.row("every subgroup with surjective χ, p = 3, n ∈ {3, 4}"));

    // sandwich on 3 ≤ n ≤ 6
    let n6_policy = if opts.extended {
        ScanPolicy::Exhaustive
    } else {
        ScanPolicy::Sampled { count: 40, seed: 11 }
    };
    let plan: Vec<(usize, u32, ScanPolicy)> = vec![
        (4, 2, ScanPolicy::Exhaustive),
        (5, 2, ScanPolicy::Sampled { count: 60, seed: 7 }),
        (6, 2, n6_policy),
        (4, 3, ScanPolicy::Sampled { count: 30, seed: 3 }),
    ];
    let mut flagged = 0usize;
    for (n, p, policy) in plan {
        let cc = if (n, p) == (4, 2) { cc4.clone() } else { classes(n, p, limits, budgets)? };
        let scan = sandwich_scan_with(cc, &policy, &eval)?;
        observe_scan(&scan, &mut sandwich);
        flagged += scan.flagged.len();
        scans.push(scan_summary(&scan));
    }
    budgets.record("subgroups_evaluated", sandwich.instances());
    let scope = if opts.extended {
        "n = 3 exhaustive, (4,2) and (6,2) exhaustive, (5,2) and (4,3) sampled; 100 coboundaries each"
    } else {
        "n = 3 and (4,2) exhaustive, (5,2), (6,2), (4,3) sampled; 100 coboundaries each"
    };
    checks.push(sandwich.row(scope));

    let results = json!({
        "n4_example": n4_report,
        "scans": scans,
        "sha_ne_formula_rows": flagged,
    });
    Ok((results, checks))
}
