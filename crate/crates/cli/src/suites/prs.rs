use massey_core::unigroup::{p_generators, prs_check, rho_eval, s_group, subgroup_closure};
use serde_json::{json, Value};

use super::Tally;
use crate::report::{to_value, Budgets, CheckRow};
use crate::Failure;

pub fn run(budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let mut props = Tally::new("P^{r,s} normal, contains Z, elementary abelian quotient of rank r + s", Some(12));
    let mut reports = Vec::new();
    for n in 3..=5usize {
        for p in [2u32, 3] {
            for r in 1..=n - 2 {
                for s in 1..=n - 2 {
                    let rep = prs_check(n, p, r, s)?;
                    props.observe(rep.passed(), || to_value(&rep));
                    reports.push(json!({
                        "n": n, "p": p, "r": r, "s": s, "order": rep.order,
                        "quotient_rank": rep.quotient_rank, "abelian": rep.abelian,
                        "witnesses": rep.witnesses,
                    }));
                }
            }
        }
    }

    let mut rho_hom = Tally::new("ρ(M) = u(M − I)v is a homomorphism on P^{r,s}", Some(12));
    let mut sgroup = Tally::new("S is a subgroup containing P on which u(M − I)v is a homomorphism", Some(12));
    let (n, p) = (4usize, 2u32);
    let uv: [([u32; 5], [u32; 5]); 2] = [([1, 0, 0, 0, 0], [0, 0, 0, 0, 1]), ([1, 1, 0, 1, 0], [0, 1, 1, 0, 1])];
    let mut s_reports = Vec::new();
    for (r, s) in [(1usize, 2usize), (2, 1)] {
        let elems = subgroup_closure(&p_generators(n, p, r, s), n, p);
        budgets.record("p_elements", elems.len() as u64);
        for (u, v) in &uv {
            for x in &elems {
                for y in &elems {
                    let lhs = rho_eval(u, v, &x.mul(y), r, s)?;
                    let rhs = (rho_eval(u, v, x, r, s)? + rho_eval(u, v, y, r, s)?) % p;
                    rho_hom.observe(lhs == rhs, || json!({"r": r, "s": s, "u": u, "v": v, "x": x.label(), "y": y.label()}));
                }
            }
            let rep = s_group(u, v, n, p, r, s)?;
            sgroup.observe(rep.passed(), || json!({"r": r, "s": s, "u": u, "v": v, "report": to_value(&rep)}));
            s_reports.push(json!({"r": r, "s": s, "u": u, "v": v, "s_order": rep.s_order, "p_order": rep.p_order}));
        }
    }
    let checks = vec![
        props.row("all 1 ≤ r, s ≤ n − 2, n ≤ 5, p ∈ {2, 3}"),
        rho_hom.row("all pairs in P at (n, p) = (4, 2), (r, s) ∈ {(1,2), (2,1)}"),
        sgroup.row("exhaustive over U at (n, p) = (4, 2), (r, s) ∈ {(1,2), (2,1)}"),
    ];
    Ok((json!({"prs": reports, "s_groups": s_reports}), checks))
}
