use massey_core::conjact::{aide_matrix, conj_classes_with_budget, outer_exponent, ConjClasses};
use massey_core::modarith::{in_span_fp, kernel_fp, DenseMat};
use massey_core::unigroup::{a_action_matrix, b0_pairs, b_pairs, AVec, BVec, UniTri};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use super::Tally;
use crate::report::{Budgets, CheckRow};
use crate::{Failure, Limits};

const RANDOM_AIDE_PAIRS: usize = 100_000;

/// Rows of T_σ − I, optionally stacked with the coordinate rows outside B₀.
fn fixed_space(s: &AVec, only_b0: bool) -> Vec<Vec<u64>> {
    let pairs = b_pairs(s.n);
    let p = s.p as u64;
    let t = a_action_matrix(s);
    let r = pairs.len();
    let mut rows: Vec<Vec<u64>> = (0..r)
        .map(|i| (0..r).map(|j| (t.get(i, j) + p - (i == j) as u64) % p).collect())
        .collect();
    if only_b0 {
        let b0 = b0_pairs(s.n);
        for (k, pr) in pairs.iter().enumerate() {
            if !b0.contains(pr) {
                let mut row = vec![0; r];
                row[k] = 1;
                rows.push(row);
            }
        }
    }
    kernel_fp(&DenseMat::from_rows(&rows, p).expect("square rows"), p).expect("prime modulus")
}

fn classes(n: usize, p: u32, limits: &Limits, budgets: &mut Budgets) -> Result<ConjClasses, Failure> {
    let cc = conj_classes_with_budget(n, p, limits.max_elems)?;
    budgets.record("u1_elements", cc.u1_order() as u64);
    Ok(cc)
}

pub fn run(limits: &Limits, budgets: &mut Budgets) -> Result<(Value, Vec<CheckRow>), Failure> {
    let mut checks = Vec::new();

    // outer exponent
    let cases = [(3usize, 2u32), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3), (6, 2), (6, 3)];
    let mut exp_tally = Tally::new("outer exponent of U¹ equals p", Some(1));
    let mut exponents = Vec::new();
    for &(n, p) in &cases {
        let cc = classes(n, p, limits, budgets)?;
        let oe = outer_exponent(&cc);
        exp_tally.observe(oe.e == p as u64, || json!({"n": n, "p": p, "e": oe.e}));
        exponents.push(json!({
            "n": n, "p": p, "e": oe.e, "d": oe.d, "class_count": oe.class_count, "u1_order": oe.u1_order,
        }));
    }
    checks.push(exp_tally.row("3 ≤ n ≤ 6, p ∈ {2, 3}"));

    // closed-form conjugation
    let mut aide = Tally::new("closed-form S·Q·S⁻¹ matches matrix conjugation", Some(2));
    for n in 2..=5 {
        for p in [2u32, 3] {
            let cc = classes(n, p, limits, budgets)?;
            for s in AVec::all(n, p) {
                let sm = s.lift();
                for i in 0..cc.u1_order() as u64 {
                    let q = cc.element(i);
                    aide.observe(aide_matrix(&s, &q) == q.conj_by(&sm), || {
                        json!({"n": n, "p": p, "sigma": s.a, "q": q.to_matrix()})
                    });
                }
            }
        }
    }
    let exhaustive_pairs = aide.instances();
    let mut rng = StdRng::seed_from_u64(0x0a1de);
    for _ in 0..RANDOM_AIDE_PAIRS {
        let s = AVec::new(6, 2, (0..6).map(|_| rng.gen_range(0..2)).collect())?;
        let q = UniTri::random_in_level(6, 2, 1, &mut rng);
        aide.observe(aide_matrix(&s, &q) == q.conj_by(&s.lift()), || {
            json!({"n": 6, "p": 2, "sigma": s.a, "q": q.to_matrix()})
        });
    }
    checks.push(aide.row(&format!(
        "exhaustive over σ ∈ A, Q ∈ U¹ for n ≤ 5, p ≤ 3 ({exhaustive_pairs} pairs) and {RANDOM_AIDE_PAIRS} random pairs at (6,2)"
    )));

    // second-diagonal lifting, span containment and equality
    let mut b2 = Tally::new("σ-invariant second-diagonal b has a σ-invariant lifting class", Some(3));
    let mut contain = Tally::new("span of fixed-class images contains B₀ ∩ B^σ", Some(4));
    let mut equal = Tally::new("span of fixed-class images is all of B^σ", Some(5));
    let mut span_rows = Vec::new();
    for (n, p) in [(3usize, 2u32), (3, 3), (4, 2), (4, 3), (5, 2), (5, 3), (6, 2)] {
        let cc = classes(n, p, limits, budgets)?;
        let pairs = b_pairs(n);
        let pm = p as u64;
        let second: Vec<usize> = (0..pairs.len()).filter(|&k| pairs[k].1 - pairs[k].0 == 2).collect();
        let mut dims = (0usize, 0usize);
        for s in AVec::all(n, p) {
            if n <= 5 {
                let sm = s.lift();
                for vals in super::all_vectors(second.len(), pm) {
                    let mut b = BVec::zero(n, p);
                    for (&k, &v) in second.iter().zip(&vals) {
                        b.b[k] = v as u32;
                    }
                    if massey_core::unigroup::a_act_on_b(&s, &b)? != b {
                        continue;
                    }
                    let w = cc.fixed_class_lift(&s, &b)?;
                    let ok = match w {
                        Some(c) => {
                            let rep = cc.rep(c);
                            rep.to_b()? == b && cc.class_of(&rep.conj_by(&sm))? == c
                        }
                        None => false,
                    };
                    b2.observe(ok, || json!({"n": n, "p": p, "sigma": s.a, "b": b.b}));
                }
            }
            let span = cc.image_span_in_b(&s)?;
            for v in fixed_space(&s, true) {
                contain.observe(in_span_fp(&span, &v, pm).expect("prime"), || {
                    json!({"n": n, "p": p, "sigma": s.a, "missing": v})
                });
            }
            if n == 4 || n == 5 {
                let full = fixed_space(&s, false);
                equal.observe(span.len() == full.len(), || {
                    json!({"n": n, "p": p, "sigma": s.a, "span_dim": span.len(), "fixed_dim": full.len()})
                });
                dims.0 += span.len();
                dims.1 += full.len();
            }
        }
        if n == 4 || n == 5 {
            span_rows.push(json!({"n": n, "p": p, "span_dim_total": dims.0, "fixed_dim_total": dims.1}));
        }
    }
    checks.push(b2.row("every σ ∈ A, every σ-invariant b, 3 ≤ n ≤ 5, p ∈ {2, 3}"));
    checks.push(contain.row("every σ, n ∈ {3..6} at p = 2 and n ∈ {3, 4, 5} at p = 3"));
    checks.push(equal.row("every σ, n ∈ {4, 5}, p ∈ {2, 3}"));

    let results = json!({
        "outer_exponents": exponents,
        "aide_pairs": {"exhaustive": exhaustive_pairs, "random": RANDOM_AIDE_PAIRS},
        "span_dimensions": span_rows,
    });
    Ok((results, checks))
}
