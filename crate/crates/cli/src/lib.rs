//! Problem files, verification suites and JSON reports for the `massey` binary.

pub mod error;
pub mod groups;
pub mod pretty;
pub mod problem;
pub mod report;
pub mod suites;

pub use error::Failure;
pub use report::{Budgets, CheckRow, Report};

/// Budgets shared by every command.
#[derive(Clone, Debug)]
pub struct Limits {
    pub max_elems: u64,
    pub max_nodes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elems: massey_core::conjact::DEFAULT_MAX_ELEMS,
            max_nodes: massey_core::cohom::DEFAULT_MAX_NODES,
        }
    }
}

/// Outer exponent of U¹(n, p), the exponent of U¹ and the class count.
pub fn cmd_exponent(n: usize, p: u32, limits: &Limits) -> Result<Report, Failure> {
    use massey_core::conjact::{conj_classes_with_budget, outer_exponent};
    use serde_json::json;

    if n < 2 {
        return Err(Failure::input(format!("n = {n}: need n ≥ 2")));
    }
    if !massey_core::modarith::is_prime(p as u64) {
        return Err(Failure::input(format!("p = {p} is not prime")));
    }
    let cc = conj_classes_with_budget(n, p, limits.max_elems)?;
    let oe = outer_exponent(&cc);
    let mut budgets = Budgets {
        max_elems: limits.max_elems,
        max_nodes: limits.max_nodes,
        ..Default::default()
    };
    budgets.record("u1_elements", oe.u1_order as u64);
    // e = p is established only for n ≤ 6
    let open_case = n >= 7;
    let mut checks = vec![CheckRow::new(
        "e divides the exponent of U¹ and is a multiple of p",
        None,
        oe.d % oe.e == 0 && oe.e % p as u64 == 0,
        format!("e = {}, d = {}", oe.e, oe.d),
    )];
    if !open_case {
        checks.push(CheckRow::new(
            "outer exponent equals p",
            (n >= 3).then_some(1),
            oe.e == p as u64,
            format!("e = {}, p = {p}", oe.e),
        ));
    }
    let results = json!({
        "n": n,
        "p": p,
        "e": oe.e,
        "d": oe.d,
        "literal_unit_e": oe.literal_unit_e,
        "class_count": oe.class_count,
        "u1_order": oe.u1_order,
        "invariant_residues": oe.invariant_residues,
        "open_case": open_case,
    });
    let command = json!({"name": "exponent", "n": n, "p": p});
    let input = serde_json::to_vec(&command).expect("command serializes");
    Ok(Report::new(command, &input, results, checks, budgets))
}
