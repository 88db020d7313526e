use massey_core::cohom::{bogomolov, bogomolov_via_restriction, same_b0};
use serde_json::{json, Value};

use super::{u1_group, Tally};
use crate::report::{to_value, Budgets, CheckRow};
use crate::Failure;

pub fn run(budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let mut trivial = Tally::new("Bogomolov multiplier of U¹ vanishes", Some(6));
    let mut routes = Tally::new("commuting-pair and restriction routes give the same B₀", Some(6));
    let mut rows = Vec::new();
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2)] {
        let g = u1_group(n, p)?;
        budgets.record("group_order", g.order() as u64);
        let b = bogomolov(&g)?;
        let r = bogomolov_via_restriction(&g)?;
        let same = same_b0(&g, &b, &r)?;
        trivial.observe(b.is_trivial(), || json!({"n": n, "p": p, "report": to_value(&b)}));
        routes.observe(same, || json!({"n": n, "p": p}));
        rows.push(json!({
            "n": n,
            "p": p,
            "order": g.order(),
            "trivial": b.is_trivial(),
            "proxy": b.proxy(),
            "parts": to_value(&b.parts),
        }));
    }
    let scope = "U¹ at (n, p) ∈ {(3,2), (3,3), (4,2)}";
    Ok((json!({"u1": rows}), vec![trivial.row(scope), routes.row(scope)]))
}
