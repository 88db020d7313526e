//! Problem files: `{"kind": "massey" | "brauer" | "embedding" | "group", ...}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use massey_core::brauer::{self, EvalOptions, GElem, ScanPolicy};
use massey_core::cohom::{
    bogomolov, bogomolov_via_restriction, brute_force_lifts, same_b0, solve_embedding, EmbeddingOutcome,
    FiniteGroup, KernelSpec, SolverOptions,
};
use massey_core::conjact::conj_classes_with_budget;
use massey_core::massey::{
    enumerate_defining_systems, is_defined, massey_product_set, vanishes, MasseyOptions, MasseyProblem,
};
use massey_core::modarith::is_prime;
use massey_core::unigroup::{TriW, UniTri};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::groups::GroupSpec;
use crate::report::{to_value, Budgets, CheckRow, Report};
use crate::{Failure, Limits};

#[derive(Clone, Debug)]
pub enum ProblemFile {
    Massey(MasseyInput),
    Brauer(BrauerInput),
    Embedding(EmbeddingInput),
    Group(GroupInput),
}

/// Classical when `p` is given; cyclic twisted coefficients Z/m when `m` and `characters` are.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasseyInput {
    pub group: GroupSpec,
    pub n: usize,
    #[serde(default)]
    pub p: Option<u32>,
    #[serde(default)]
    pub m: Option<u32>,
    /// χ_0..χ_n on the generators of Γ
    #[serde(default)]
    pub characters: Option<Vec<Vec<u32>>>,
    /// α_0..α_{n−1} on the generators of Γ
    pub alpha: Vec<Vec<u64>>,
    #[serde(default)]
    pub max_candidates: Option<u64>,
    #[serde(default)]
    pub max_systems: Option<u64>,
    /// Expected values of top-level result fields; each becomes a check.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenInput {
    pub a: Vec<u32>,
    #[serde(default = "one")]
    pub chi: u32,
}

fn one() -> u32 {
    1
}

/// Either an explicit G (by generators in A × (Z/e)*) or a scan over subgroups.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrauerInput {
    pub n: usize,
    pub p: u32,
    #[serde(default)]
    pub generators: Option<Vec<GenInput>>,
    #[serde(default)]
    pub scan: Option<ScanPolicy>,
    #[serde(default)]
    pub coboundary_samples: Option<usize>,
    #[serde(default)]
    pub class_samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Expected values of top-level result fields; each becomes a check.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KernelInput {
    Center,
    U1,
    Lcs(usize),
    Prs(usize, usize),
}

impl From<KernelInput> for KernelSpec {
    fn from(k: KernelInput) -> Self {
        match k {
            KernelInput::Center => KernelSpec::Center,
            KernelInput::U1 => KernelSpec::U1,
            KernelInput::Lcs(m) => KernelSpec::Lcs(m),
            KernelInput::Prs(r, s) => KernelSpec::Prs(r, s),
        }
    }
}

/// Lift ᾱ: Γ → U/K to Γ → U; ᾱ given as full (n+1)×(n+1) matrices per generator.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingInput {
    pub group: GroupSpec,
    pub n: usize,
    pub p: u32,
    pub kernel: KernelInput,
    pub alpha: Vec<Vec<Vec<u32>>>,
    /// Cross-check against exhaustive enumeration of lifts.
    #[serde(default)]
    pub oracle: bool,
    /// Expected values of top-level result fields; each becomes a check.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInput {
    pub group: GroupSpec,
    #[serde(default)]
    pub bogomolov: bool,
    /// Expected values of top-level result fields; each becomes a check.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
}

fn body<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, Failure> {
    serde_path_to_error::deserialize(v).map_err(|e| Failure::Input(format!("at `{}`: {}", e.path(), e.inner())))
}

/// Parse with path-precise error messages.
pub fn parse(bytes: &[u8]) -> Result<ProblemFile, Failure> {
    let mut v: Value = serde_json::from_slice(bytes).map_err(|e| Failure::Input(format!("not JSON: {e}")))?;
    let obj = v
        .as_object_mut()
        .ok_or_else(|| Failure::input("a problem file is a JSON object"))?;
    let kind = match obj.remove("kind") {
        Some(Value::String(k)) => k,
        Some(other) => return Err(Failure::Input(format!("at `kind`: expected a string, got {other}"))),
        None => return Err(Failure::input("at `kind`: missing field")),
    };
    Ok(match kind.as_str() {
        "massey" => ProblemFile::Massey(body(v)?),
        "brauer" => ProblemFile::Brauer(body(v)?),
        "embedding" => ProblemFile::Embedding(body(v)?),
        "group" => ProblemFile::Group(body(v)?),
        _ => {
            return Err(Failure::Input(format!(
                "at `kind`: unknown kind `{kind}`, expected one of massey, brauer, embedding, group"
            )))
        }
    })
}

pub fn run_problem(bytes: &[u8], limits: &Limits) -> Result<Report, Failure> {
    let problem = parse(bytes)?;
    let mut budgets = Budgets {
        max_elems: limits.max_elems,
        max_nodes: limits.max_nodes,
        ..Default::default()
    };
    let (kind, results, mut checks, expect) = match &problem {
        ProblemFile::Massey(m) => {
            let (r, c) = run_massey(m, limits, &mut budgets)?;
            ("massey", r, c, &m.expect)
        }
        ProblemFile::Brauer(b) => {
            let (r, c) = run_brauer(b, limits, &mut budgets)?;
            ("brauer", r, c, &b.expect)
        }
        ProblemFile::Embedding(e) => {
            let (r, c) = run_embedding(e, limits, &mut budgets)?;
            ("embedding", r, c, &e.expect)
        }
        ProblemFile::Group(g) => {
            let (r, c) = run_group(g, &mut budgets)?;
            ("group", r, c, &g.expect)
        }
    };
    for (key, want) in expect {
        let got = results.get(key).cloned().unwrap_or(Value::Null);
        checks.push(
            CheckRow::new(format!("expected `{key}`"), None, &got == want, format!("got {got}, expected {want}"))
                .with_witness(Some(json!({"field": key, "got": got, "expected": want}))),
        );
    }
    Ok(Report::new(json!({"name": "run", "kind": kind}), bytes, results, checks, budgets))
}

fn check_len<T>(v: &[T], want: usize, path: &str) -> Result<(), Failure> {
    if v.len() != want {
        return Err(Failure::input(format!("`{path}`: expected {want} entries, got {}", v.len())));
    }
    Ok(())
}

fn check_range<T: Copy + Into<u64>>(v: &[T], bound: u64, path: &str) -> Result<(), Failure> {
    if let Some((i, &x)) = v.iter().enumerate().find(|(_, &x)| x.into() >= bound) {
        return Err(Failure::input(format!("`{path}[{i}]` = {} is not in 0..{bound}", x.into())));
    }
    Ok(())
}

fn require_prime(p: u32, what: &str) -> Result<(), Failure> {
    if !is_prime(p as u64) {
        return Err(Failure::input(format!("`{what}` = {p} is not prime")));
    }
    Ok(())
}

fn triw_matrix(x: &TriW) -> Vec<Vec<u32>> {
    let n = x.n();
    (0..=n).map(|i| (0..=n).map(|j| x.entry(i, j)).collect()).collect()
}

// ---------------------------------------------------------------------------
// massey

fn run_massey(inp: &MasseyInput, limits: &Limits, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let g = inp.group.build()?;
    let ng = g.generators().len();
    let n = inp.n;
    if !(2..=8).contains(&n) {
        return Err(Failure::input(format!("`n` = {n} is not in 2..=8")));
    }
    check_len(&inp.alpha, n, "alpha")?;
    let problem = match (inp.p, inp.m, &inp.characters) {
        (Some(p), None, None) => {
            require_prime(p, "p")?;
            for (i, a) in inp.alpha.iter().enumerate() {
                check_len(a, ng, &format!("alpha[{i}]"))?;
                check_range(a, p as u64, &format!("alpha[{i}]"))?;
            }
            MasseyProblem::classical(&g, n, p, &inp.alpha)?
        }
        (None, Some(m), Some(chars)) => {
            check_len(chars, n + 1, "characters")?;
            for (i, c) in chars.iter().enumerate() {
                check_len(c, ng, &format!("characters[{i}]"))?;
                check_range(c, m as u64, &format!("characters[{i}]"))?;
            }
            for (i, a) in inp.alpha.iter().enumerate() {
                check_len(a, ng, &format!("alpha[{i}]"))?;
                check_range(a, m as u64, &format!("alpha[{i}]"))?;
            }
            MasseyProblem::generalized(&g, n, m, chars, &inp.alpha)?
        }
        _ => {
            return Err(Failure::input(
                "give either `p` (classical) or both `m` and `characters` (twisted coefficients)",
            ))
        }
    };
    let opts = MasseyOptions {
        max_candidates: inp.max_candidates.unwrap_or(MasseyOptions::default().max_candidates),
        max_systems: inp.max_systems.unwrap_or(MasseyOptions::default().max_systems),
        solver: SolverOptions {
            max_nodes: limits.max_nodes,
            max_elems: limits.max_elems,
            ..SolverOptions::default()
        },
    };
    let defined = is_defined(&problem, &opts)?;
    let van = vanishes(&problem, &opts)?;
    let ps = massey_product_set(&problem, &opts)?;
    let systems = enumerate_defining_systems(&problem, opts.max_systems)?;
    budgets.record("candidates_tried", ps.candidates_tried);
    budgets.record("defining_systems", systems.len() as u64);

    let mut checks = vec![
        CheckRow::new(
            "defined iff some lift to U/Z exists",
            None,
            defined == !ps.is_empty(),
            format!("defined = {defined}, lifts = {}", ps.raw_count()),
        ),
        CheckRow::new(
            "vanishes iff the product set contains 0",
            None,
            van == ps.contains_zero,
            format!("vanishes = {van}, contains_zero = {}", ps.contains_zero),
        ),
        CheckRow::new(
            "defining systems biject with lifts",
            None,
            systems.len() == ps.raw_count(),
            format!("{} systems, {} lifts", systems.len(), ps.raw_count()),
        ),
    ];
    if problem.is_classical() {
        let bad = ps.lifts.iter().position(|l| l.lifts_to_u != Some(l.value_trivial));
        checks.push(
            CheckRow::new(
                "lift extends to U iff its value is trivial",
                None,
                bad.is_none(),
                format!("{} lifts compared with the embedding solver", ps.raw_count()),
            )
            .with_witness(bad.map(|i| json!({"lift": i}))),
        );
    }
    let lifts: Vec<Value> = ps
        .lifts
        .iter()
        .map(|l| {
            json!({
                "images": l.images.iter().map(triw_matrix).collect::<Vec<_>>(),
                "signature": l.signature,
                "value_trivial": l.value_trivial,
                "lifts_to_u": l.lifts_to_u,
                "bucket": l.bucket,
            })
        })
        .collect();
    let results = json!({
        "classical": problem.is_classical(),
        "n": n,
        "modulus": problem.modulus(),
        "group_order": g.order(),
        "defined": defined,
        "vanishes": van,
        "h2_invariants": ps.h2_invariants,
        "classes": ps.classes,
        "contains_zero": ps.contains_zero,
        "lift_count": ps.raw_count(),
        "bucket_count": ps.bucket_count,
        "lifts": lifts,
    });
    Ok((results, checks))
}

// ---------------------------------------------------------------------------
// brauer

fn eval_options(inp: &BrauerInput) -> EvalOptions {
    let d = EvalOptions::default();
    EvalOptions {
        coboundary_samples: inp.coboundary_samples.unwrap_or(d.coboundary_samples),
        class_samples: inp.class_samples.unwrap_or(d.class_samples),
        seed: inp.seed.unwrap_or(d.seed),
    }
}

/// Check rows for one evaluated G.
pub fn brauer_checks(r: &brauer::BrauerReport, label: &str, criterion: Option<u8>) -> Vec<CheckRow> {
    let mut v = vec![
        CheckRow::new(
            format!("{label}Sha ⊆ formula ⊆ H¹"),
            criterion,
            r.sandwich_holds(),
            format!("dims {} ≤ {} ≤ {}", r.sha_dim, r.formula_dim, r.h1_dim),
        ),
        CheckRow::new(
            format!("{label}formula ⊆ ker(H¹(G,B̂) → H¹(G,B̂₀))"),
            criterion,
            r.formula_in_b0_kernel != Some(false),
            match r.formula_in_b0_kernel {
                Some(_) => format!("formula {} , kernel {}", r.formula_dim, r.b0_kernel_dim),
                None => "not asserted outside 3 ≤ n ≤ 6".to_string(),
            },
        ),
        CheckRow::new(
            format!("{label}conditions are coboundary invariant"),
            criterion,
            r.coboundary_invariant,
            format!("{} random coboundaries", r.coboundary_samples),
        ),
        CheckRow::new(
            format!("{label}conditions depend only on the class of u"),
            None,
            r.class_invariant,
            format!("{} random conjugators", r.class_samples),
        ),
    ];
    if let Some(ok) = r.nopthroot {
        v.push(CheckRow::new(
            format!("{label}χ onto (Z/p)* forces H¹ = 0"),
            None,
            ok,
            format!("h1 = {}", r.h1_dim),
        ));
    }
    v
}

fn run_brauer(inp: &BrauerInput, limits: &Limits, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let (n, p) = (inp.n, inp.p);
    if !(3..=8).contains(&n) {
        return Err(Failure::input(format!("`n` = {n} is not in 3..=8")));
    }
    require_prime(p, "p")?;
    let classes = Arc::new(conj_classes_with_budget(n, p, limits.max_elems)?);
    budgets.record("u1_elements", classes.u1_order() as u64);
    let opts = eval_options(inp);
    match (&inp.generators, &inp.scan) {
        (Some(gens), None) => {
            let mut elems: Vec<GElem> = Vec::with_capacity(gens.len());
            for (i, g) in gens.iter().enumerate() {
                check_len(&g.a, n, &format!("generators[{i}].a"))?;
                check_range(&g.a, p as u64, &format!("generators[{i}].a"))?;
                elems.push((g.a.clone(), g.chi));
            }
            let problem = brauer::build_problem_with(classes, &elems)?;
            let report = brauer::evaluate_formula_with(&problem, &opts)?;
            let checks = brauer_checks(&report, "", None);
            let mut results = to_value(&report);
            results["generators"] = to_value(&elems);
            Ok((results, checks))
        }
        (None, Some(policy)) => {
            let scan = brauer::sandwich_scan_with(classes, policy, &opts)?;
            budgets.record("subgroups_evaluated", scan.rows.len() as u64);
            let bad = scan.rows.iter().position(|r| !r.report.all_checks_pass());
            let checks = vec![CheckRow::new(
                "every evaluated G passes sandwich, kernel and invariance checks",
                None,
                bad.is_none(),
                format!("{} subgroups", scan.rows.len()),
            )
            .with_witness(bad.map(|i| to_value(&scan.rows[i])))];
            Ok((scan_summary(&scan), checks))
        }
        _ => Err(Failure::input("give exactly one of `generators` and `scan`")),
    }
}

/// Compact scan output: dimensions per row, full reports only for rows with Sha ≠ formula.
pub fn scan_summary(scan: &brauer::SandwichScan) -> Value {
    let rows: Vec<Value> = scan
        .rows
        .iter()
        .map(|r| {
            json!({
                "generators": r.generators,
                "order": r.report.group_order,
                "h1": r.report.h1_dim,
                "sha": r.report.sha_dim,
                "formula": r.report.formula_dim,
                "b0_kernel": r.report.b0_kernel_dim,
                "sha_b0": r.report.sha_b0_dim,
            })
        })
        .collect();
    let flagged: Vec<Value> = scan.flagged.iter().map(|&i| to_value(&scan.rows[i])).collect();
    json!({
        "n": scan.n,
        "p": scan.p,
        "e": scan.e,
        "exhaustive": scan.exhaustive,
        "subgroup_count": scan.subgroup_count.map(|c| c.to_string()),
        "rows": rows,
        "flagged": flagged,
    })
}

// ---------------------------------------------------------------------------
// embedding

fn parse_matrix(rows: &[Vec<u32>], n: usize, p: u32, path: &str) -> Result<UniTri, Failure> {
    check_len(rows, n + 1, path)?;
    for (i, r) in rows.iter().enumerate() {
        check_len(r, n + 1, &format!("{path}[{i}]"))?;
        check_range(r, p as u64, &format!("{path}[{i}]"))?;
        for (j, &x) in r.iter().enumerate() {
            let want = match i.cmp(&j) {
                std::cmp::Ordering::Equal => Some(1),
                std::cmp::Ordering::Greater => Some(0),
                std::cmp::Ordering::Less => None,
            };
            if let Some(w) = want {
                if x != w {
                    return Err(Failure::input(format!(
                        "`{path}[{i}][{j}]` = {x}: matrices must be unitriangular"
                    )));
                }
            }
        }
    }
    Ok(UniTri::from_matrix(n, p, rows))
}

fn run_embedding(inp: &EmbeddingInput, limits: &Limits, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let g = inp.group.build()?;
    let (n, p) = (inp.n, inp.p);
    if !(2..=8).contains(&n) {
        return Err(Failure::input(format!("`n` = {n} is not in 2..=8")));
    }
    require_prime(p, "p")?;
    let kernel: KernelSpec = inp.kernel.into();
    let levels = kernel.levels(n)?;
    let base = levels[0];
    check_len(&inp.alpha, g.generators().len(), "alpha")?;
    let mut alpha = Vec::with_capacity(inp.alpha.len());
    for (i, m) in inp.alpha.iter().enumerate() {
        alpha.push(base.normal_form(&parse_matrix(m, n, p, &format!("alpha[{i}]"))?));
    }
    let id = UniTri::identity(n, p);
    if g.extend_hom(&alpha, &id, |x, y| base.mul(x, y)).is_none() {
        return Err(Failure::input("`alpha` does not define a homomorphism to U/K"));
    }
    let opts = SolverOptions {
        max_nodes: limits.max_nodes,
        max_elems: limits.max_elems,
        ..SolverOptions::default()
    };
    let (outcome, stats) = solve_embedding(&g, n, p, kernel, &alpha, &opts)?;
    budgets.record("solver_nodes", stats.nodes);
    let mut checks = Vec::new();
    let images = match &outcome {
        EmbeddingOutcome::Lift(imgs) => {
            let hom = g.extend_hom(imgs, &id, |x, y| x.mul(y)).is_some();
            let lifts = imgs.iter().zip(&alpha).all(|(a, b)| base.normal_form(a) == *b);
            checks.push(CheckRow::new(
                "returned images define a homomorphism lifting ᾱ",
                None,
                hom && lifts,
                format!("homomorphism = {hom}, reduces to ᾱ = {lifts}"),
            ));
            Some(imgs.iter().map(|x| x.to_matrix()).collect::<Vec<_>>())
        }
        EmbeddingOutcome::Unsolvable => None,
    };
    if inp.oracle {
        let found = brute_force_lifts(&g, n, p, kernel, &alpha, 1, limits.max_elems)?;
        let agree = found.is_empty() == images.is_none();
        checks.push(CheckRow::new(
            "solver agrees with exhaustive enumeration",
            None,
            agree,
            format!("oracle found {} lift(s)", found.len()),
        ));
    }
    let results = json!({
        "n": n,
        "p": p,
        "kernel": inp.kernel,
        "group_order": g.order(),
        "solvable": images.is_some(),
        "images": images,
        "stages": stats.stages,
        "exhaustive": stats.exhaustive,
    });
    Ok((results, checks))
}

// ---------------------------------------------------------------------------
// group

/// Exponent of a finite group (lcm of element orders).
pub fn group_exponent(g: &FiniteGroup) -> usize {
    (0..g.order() as u32).fold(1, |acc, a| {
        let o = g.elem_order(a);
        acc / massey_core::modarith::gcd(acc as u64, o as u64) as usize * o
    })
}

fn run_group(inp: &GroupInput, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let g = inp.group.build()?;
    budgets.record("group_order", g.order() as u64);
    let mut results = json!({
        "order": g.order(),
        "generators": g.generators(),
        "abelian": g.is_abelian(),
        "exponent": group_exponent(&g),
    });
    let mut checks = Vec::new();
    if inp.bogomolov {
        let b = bogomolov(&g)?;
        results["bogomolov"] = json!({
            "trivial": b.is_trivial(),
            "proxy": b.proxy(),
            "report": to_value(&b),
        });
        if g.order() <= 64 {
            let r = bogomolov_via_restriction(&g)?;
            let same = same_b0(&g, &b, &r)?;
            checks.push(CheckRow::new(
                "B₀ agrees with the restriction route",
                None,
                same,
                format!("commuting-pair route trivial = {}, restriction route trivial = {}", b.is_trivial(), r.is_trivial()),
            ));
        }
    }
    Ok((results, checks))
}
