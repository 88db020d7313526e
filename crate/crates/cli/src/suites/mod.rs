//! Verification suites. Each check row carries the acceptance criterion it covers.

mod bogomolov;
mod brauer;
mod conjact;
mod dwyer;
mod generalized;
mod prs;

use std::str::FromStr;

use massey_core::cohom::FiniteGroup;
use massey_core::unigroup::{elem_gen, positions, UniTri};
use serde_json::{json, Value};

use crate::report::{Budgets, CheckRow, Report};
use crate::{Failure, Limits};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Dwyer,
    Conjact,
    Prs,
    Brauer,
    Bogomolov,
    Generalized,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Dwyer,
        Suite::Conjact,
        Suite::Prs,
        Suite::Brauer,
        Suite::Bogomolov,
        Suite::Generalized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Dwyer => "dwyer",
            Suite::Conjact => "conjact",
            Suite::Prs => "prs",
            Suite::Brauer => "brauer",
            Suite::Bogomolov => "bogomolov",
            Suite::Generalized => "generalized",
        }
    }
}

impl FromStr for Suite {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Failure::input(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Scan every subgroup at n = 6 instead of a sample.
    pub extended: bool,
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions, limits: &Limits) -> Result<Report, Failure> {
    let mut budgets = Budgets {
        max_elems: limits.max_elems,
        max_nodes: limits.max_nodes,
        ..Default::default()
    };
    let (results, checks) = match suite {
        Suite::Dwyer => dwyer::run(limits, &mut budgets)?,
        Suite::Conjact => conjact::run(limits, &mut budgets)?,
        Suite::Prs => prs::run(&mut budgets)?,
        Suite::Brauer => brauer::run(opts, limits, &mut budgets)?,
        Suite::Bogomolov => bogomolov::run(&mut budgets)?,
        Suite::Generalized => generalized::run(&mut budgets)?,
    };
    let command = json!({"name": "suite", "suite": suite.name(), "extended": opts.extended});
    let input = serde_json::to_vec(&command).expect("command serializes");
    Ok(Report::new(command, &input, results, checks, budgets))
}

/// Accumulates one check over many instances, keeping the first failure.
pub(crate) struct Tally {
    name: String,
    criterion: Option<u8>,
    instances: u64,
    failures: u64,
    witness: Option<Value>,
}

impl Tally {
    pub fn new(name: impl Into<String>, criterion: Option<u8>) -> Self {
        Tally {
            name: name.into(),
            criterion,
            instances: 0,
            failures: 0,
            witness: None,
        }
    }

    pub fn observe(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn instances(&self) -> u64 {
        self.instances
    }

    pub fn row(self, scope: &str) -> CheckRow {
        let passed = self.failures == 0 && self.instances > 0;
        let detail = format!("{} instances, {} failures; {scope}", self.instances, self.failures);
        CheckRow::new(self.name, self.criterion, passed, detail).with_witness(self.witness)
    }
}

/// Groups of order at most `max_order` used by the exhaustive suites.
pub(crate) fn small_groups(max_order: usize) -> Vec<(String, FiniteGroup)> {
    let mut v: Vec<(String, FiniteGroup)> = (1..=max_order).map(|m| (format!("Z{m}"), FiniteGroup::cyclic(m))).collect();
    let z2 = FiniteGroup::cyclic(2);
    let extra = [
        ("Z2xZ2", FiniteGroup::product(&z2, &z2)),
        ("Z2xZ4", FiniteGroup::product(&z2, &FiniteGroup::cyclic(4))),
        ("Z2^3", FiniteGroup::elementary_abelian(2, 3)),
        ("S3", FiniteGroup::dihedral(3)),
        ("D4", FiniteGroup::dihedral(4)),
        ("Q8", FiniteGroup::quaternion()),
    ];
    for (name, g) in extra {
        if g.order() <= max_order {
            v.push((name.to_string(), g));
        }
    }
    v
}

/// All vectors of (Z/m)^len, first coordinate fastest.
pub(crate) fn all_vectors(len: usize, m: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    for v in out.iter_mut() {
        v.reverse();
    }
    out
}

/// U¹(n, p) as a table-backed group generated by the elementary matrices of the second
/// and third diagonals.
pub(crate) fn u1_group(n: usize, p: u32) -> Result<FiniteGroup, Failure> {
    let gens: Vec<UniTri> = positions(n)
        .into_iter()
        .filter(|&(i, j)| j - i == 2 || j - i == 3)
        .map(|(i, j)| elem_gen(n, p, i, j, 1))
        .collect::<Result<_, _>>()?;
    Ok(FiniteGroup::from_closure(&gens, UniTri::identity(n, p), |a, b| a.mul(b))?.0)
}
