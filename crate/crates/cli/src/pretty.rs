//! Human-readable rendering for `--pretty`.

use std::fmt::Write;

use serde_json::Value;

use crate::report::Report;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) && a.len() <= 16 => {
            Some(serde_json::to_string(v).unwrap_or_default())
        }
        _ => None,
    }
}

pub fn render(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command  {}", r.command);
    let _ = writeln!(out, "digest   {}", r.input_digest);
    if let Value::Object(map) = &r.results {
        let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        let _ = writeln!(out, "\nresults");
        for (k, v) in map {
            let shown = scalar(v).unwrap_or_else(|| match v {
                Value::Array(a) => format!("[{} entries]", a.len()),
                Value::Object(o) => format!("{{{} fields}}", o.len()),
                _ => String::new(),
            });
            let _ = writeln!(out, "  {k:<width$}  {shown}");
        }
    }
    if !r.checks.is_empty() {
        let _ = writeln!(out, "\nchecks");
        for c in &r.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let crit = c.criterion.map(|n| format!("[{n:>2}] ")).unwrap_or_default();
            let _ = writeln!(out, "  {tag}  {crit}{}", c.name);
            let _ = writeln!(out, "        {}", c.detail);
            if let Some(w) = &c.witness {
                let _ = writeln!(out, "        witness: {w}");
            }
        }
    }
    if !r.budgets.used.is_empty() {
        let _ = writeln!(out, "\nbudgets (max_elems {}, max_nodes {})", r.budgets.max_elems, r.budgets.max_nodes);
        for (k, v) in &r.budgets.used {
            let _ = writeln!(out, "  {k}: {v}");
        }
    }
    let _ = writeln!(out, "\n{}", if r.passed { "all checks passed" } else { "CHECKS FAILED" });
    out
}
