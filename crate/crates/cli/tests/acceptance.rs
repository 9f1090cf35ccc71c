//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails. Every tolerance is fixed here.

mod common;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use chairs::bijection::{build_chain, check_chain, forward_map_traced, inverse_map};
use chairs::enumeration::{
    all_patterns, all_samples, matches, monte_carlo_average, pattern_match_counts, DEFAULT_BUDGET,
};
use chairs::formula::{closed_form_average, closed_form_average_float, closed_form_total, ExactCount};
use chairs::model::{MatchRecord, Sample};
use chairs::seating::{simulate_blocks, simulate_sequential};
use num_traits::ToPrimitive;
use serde_json::Value;

type Outcome = Result<String, String>;

const MC_SEED: u64 = 20_240_601;

fn falling(n: usize, k: usize) -> u64 {
    (0..k).map(|i| n as u64 - i as u64).product()
}

fn samples(n: usize, m: usize) -> impl Iterator<Item = Sample> {
    all_samples(n, m, DEFAULT_BUDGET).expect("within budget")
}

/// Brute-force rejection totals over every sample equal the closed form.
fn formula_identity() -> Outcome {
    let began = Instant::now();
    let mut points = 0;
    for m in 1..=6 {
        for n in 1..=m {
            let total: u64 = samples(n, m)
                .map(|s| simulate_sequential(&s).unwrap().rejections.len() as u64)
                .sum();
            let expected = closed_form_total(n as u64, m as u64).unwrap();
            if ExactCount::from(total) != expected {
                return Err(format!("n={n} m={m}: enumerated {total}, closed form {expected}"));
            }
            points += 1;
        }
    }
    let elapsed = began.elapsed();
    if elapsed > Duration::from_secs(30) {
        return Err(format!("took {elapsed:?}, limit 30 s"));
    }
    Ok(format!("{points} parameter pairs exact in {elapsed:.2?}"))
}

/// Sequential and block processes agree per sample.
fn process_equivalence() -> Outcome {
    let mut checked = 0u64;
    for m in 1..=6 {
        for n in 1..=m {
            for s in samples(n, m) {
                let seq = simulate_sequential(&s).unwrap();
                let blk = simulate_blocks(&s).unwrap();
                if seq.occupied() != blk.occupied() {
                    return Err(format!("sample {s} (m={m}): occupied chairs differ"));
                }
                if seq.rejections.len() != blk.rejections.len() {
                    return Err(format!(
                        "sample {s} (m={m}): {} vs {} rejections",
                        seq.rejections.len(),
                        blk.rejections.len()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} samples identical"))
}

/// Forward map is a bijection onto all matches, with both round trips.
fn bijection() -> Outcome {
    let began = Instant::now();
    let mut total_rejections = 0u64;
    for m in 1..=5 {
        for n in 1..=m {
            let mut images: HashSet<MatchRecord> = HashSet::new();
            let mut rejections = 0u64;
            for s in samples(n, m) {
                let trace = simulate_blocks(&s).unwrap();
                for r in &trace.rejections {
                    rejections += 1;
                    let (image, _) = forward_map_traced(&trace, r)
                        .map_err(|e| format!("sample {s}, {r:?}: {e}"))?;
                    match inverse_map(&image.sample, &image.pattern) {
                        Ok((back, back_r)) if back == s && back_r == *r => {}
                        other => return Err(format!("sample {s}, {r:?}: inverse gave {other:?}")),
                    }
                    if !images.insert(image) {
                        return Err(format!("n={n} m={m}: sample {s}, {r:?} collides"));
                    }
                }
            }
            // every match, by the plain predicate
            let mut all_matches: HashSet<MatchRecord> = HashSet::new();
            for j in 2..=n.min(m + 1) {
                for p in all_patterns(n, m, j).unwrap() {
                    for s in samples(n, m).filter(|s| matches(s, &p)) {
                        all_matches.insert(MatchRecord { sample: s, pattern: p.clone() });
                    }
                }
            }
            let expected = closed_form_total(n as u64, m as u64).unwrap();
            if ExactCount::from(rejections) != expected
                || ExactCount::from(all_matches.len() as u64) != expected
            {
                return Err(format!(
                    "n={n} m={m}: {rejections} rejections, {} matches, closed form {expected}",
                    all_matches.len()
                ));
            }
            if images != all_matches {
                return Err(format!("n={n} m={m}: image differs from the set of matches"));
            }
            for rec in &all_matches {
                let (s, r) = inverse_map(&rec.sample, &rec.pattern)
                    .map_err(|e| format!("{} / {:?}: {e}", rec.sample, rec.pattern))?;
                let (image, _) = forward_map_traced(&simulate_blocks(&s).unwrap(), &r)
                    .map_err(|e| format!("{s}, {r:?}: {e}"))?;
                if image != *rec {
                    return Err(format!("{} / {:?}: forward(inverse) differs", rec.sample, rec.pattern));
                }
            }
            total_rejections += rejections;
        }
    }
    let elapsed = began.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:?}, limit 2 min"));
    }
    Ok(format!("{total_rejections} rejections matched one-to-one in {elapsed:.2?}"))
}

/// Every structural invariant of the chain, checked on every chain.
fn chain_properties() -> Outcome {
    let mut chains = 0u64;
    let mut longest = 0;
    for m in 1..=5 {
        for n in 1..=m {
            for s in samples(n, m) {
                let trace = simulate_blocks(&s).unwrap();
                for r in &trace.rejections {
                    let chain = build_chain(&trace, r).map_err(|e| format!("sample {s}, {r:?}: {e}"))?;
                    let props = check_chain(&trace, &chain);
                    if !props.all() {
                        return Err(format!("sample {s}, {r:?}: {props:?}"));
                    }
                    chains += 1;
                    longest = longest.max(chain.len());
                }
            }
        }
    }
    Ok(format!("{chains} chains, zero violations, longest k={longest}"))
}

/// Pattern counts n^(j) m / 2 and m^(n-j) matching samples per pattern.
fn counting_claims() -> Outcome {
    let mut patterns_checked = 0u64;
    for n in 2..=6usize {
        for m in 1..=6usize {
            let counts: HashMap<_, u64> = pattern_match_counts(n, m, DEFAULT_BUDGET).unwrap();
            let mut listed_total = 0usize;
            for j in 2..=n.min(m + 1) {
                let listed: Vec<_> = all_patterns(n, m, j).unwrap().collect();
                let distinct: HashSet<_> = listed.iter().collect();
                let expected = falling(n, j) * m as u64 / 2;
                if listed.len() as u64 != expected || distinct.len() != listed.len() {
                    return Err(format!("n={n} m={m} j={j}: {} patterns, expected {expected}", listed.len()));
                }
                let per_pattern = (m as u64).pow((n - j) as u32);
                for p in &listed {
                    let got = counts.get(p).copied().unwrap_or(0);
                    if got != per_pattern {
                        return Err(format!("n={n} m={m} {p:?}: {got} samples, expected {per_pattern}"));
                    }
                }
                listed_total += listed.len();
                patterns_checked += listed.len() as u64;
            }
            if counts.len() != listed_total {
                return Err(format!("n={n} m={m}: samples matched {} distinct patterns", counts.len()));
            }
        }
    }
    Ok(format!("{patterns_checked} patterns counted exactly"))
}

/// Monte-Carlo mean within 5 standard errors of the float closed form.
fn monte_carlo() -> Outcome {
    let began = Instant::now();
    let est = monte_carlo_average(500, 997, 100_000, MC_SEED).map_err(|e| e.to_string())?;
    let reference = closed_form_average_float(500, 997).unwrap();
    let elapsed = began.elapsed();
    let z = (est.mean - reference) / est.std_error;
    if !(z.abs() < 5.0) {
        return Err(format!("mean {} vs {reference}: z = {z}", est.mean));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}, limit 60 s"));
    }
    Ok(format!("mean {:.6} vs {reference:.6}, z = {z:.3}, {elapsed:.2?}", est.mean))
}

/// Float evaluation within 1e-12 relative error of the exact rational.
fn exact_float_agreement() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=100u64 {
        for n in 1..=m {
            let exact = closed_form_average(n, m).unwrap().to_f64().unwrap();
            let approx = closed_form_average_float(n, m).unwrap();
            let err = if exact == 0.0 { approx.abs() } else { ((approx - exact) / exact).abs() };
            if !(err <= 1e-12) {
                return Err(format!("n={n} m={m}: relative error {err:e}"));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("worst relative error {worst:e}"))
}

struct Expect {
    args: &'static [&'static str],
    code: i32,
    check: fn(&Value) -> bool,
}

fn any(_: &Value) -> bool {
    true
}

/// Exit codes, schema validity, and byte-identical reruns for the
/// documented invocations.
fn cli_contract() -> Outcome {
    let schema = common::schema();
    let cases = [
        Expect {
            args: &["simulate", "--n", "2", "--m", "2", "--sample", "00", "--process", "sequential"],
            code: 0,
            check: |d| d["payload"]["rejection_count"] == 1,
        },
        Expect {
            args: &["simulate", "--n", "2", "--m", "2", "--sample", "01"],
            code: 0,
            check: |d| d["payload"]["rejection_count"] == 0,
        },
        Expect { args: &["simulate", "--n", "3", "--m", "2", "--sample", "000"], code: 3, check: any },
        Expect { args: &["simulate", "--n", "2", "--m", "2", "--sample", "0x"], code: 2, check: any },
        Expect {
            args: &["verify", "--n", "3", "--m", "3"],
            code: 0,
            check: |d| {
                d["payload"]["counts"]["rejections_sequential"] == 36
                    && d["payload"]["counts"]["matches"] == 36
                    && d["payload"]["passed"] == true
            },
        },
        Expect {
            args: &["verify", "--n", "1", "--m", "4"],
            code: 0,
            check: |d| {
                let c = &d["payload"]["counts"];
                c["rejections_sequential"] == 0 && c["matches"] == 0 && c["images"] == 0
            },
        },
        Expect { args: &["verify", "--n", "6", "--m", "6", "--budget", "100"], code: 4, check: any },
        Expect {
            args: &["formula", "--n", "3", "--m", "3", "--mode", "total"],
            code: 0,
            check: |d| d["payload"]["value"] == "36",
        },
        Expect {
            args: &["formula", "--n", "3", "--m", "3", "--mode", "average"],
            code: 0,
            check: |d| d["payload"]["value"] == "4/9",
        },
        Expect {
            args: &["formula", "--n", "1", "--m", "9", "--mode", "total"],
            code: 0,
            check: |d| d["payload"]["value"] == "0",
        },
        Expect { args: &["formula", "--n", "4", "--m", "3"], code: 2, check: any },
        Expect {
            args: &["demo", "--n", "2", "--m", "2", "--sample", "00", "--rejection", "0"],
            code: 0,
            check: |d| {
                let p = &d["payload"];
                p["chain"]["k"] == 1
                    && p["pattern"]["pair"] == serde_json::json!([0, 1])
                    && p["pattern"]["start"] == 0
                    && p["round_trip"]["ok"] == true
            },
        },
        Expect { args: &["demo", "--n", "2", "--m", "2", "--sample", "01", "--rejection", "0"], code: 2, check: any },
        Expect {
            args: &["demo", "--n", "3", "--m", "3", "--sample", "001", "--rejection", "0"],
            code: 0,
            check: |d| d["payload"]["round_trip"]["ok"] == true,
        },
        Expect {
            args: &["demo", "--n", "3", "--m", "3", "--sample", "001", "--rejection", "1"],
            code: 0,
            check: |d| d["payload"]["chain"]["k"] == 2 && d["payload"]["round_trip"]["ok"] == true,
        },
        Expect {
            args: &["montecarlo", "--n", "1", "--m", "10", "--trials", "100", "--seed", "7"],
            code: 0,
            check: |d| d["payload"]["mean"] == 0.0,
        },
        Expect {
            args: &["montecarlo", "--n", "3", "--m", "3", "--trials", "100000", "--seed", "1"],
            code: 0,
            check: |d| d["payload"]["z_score"].as_f64().is_some_and(|z| z.abs() < 5.0),
        },
        Expect { args: &["montecarlo", "--n", "4", "--m", "3", "--trials", "10"], code: 2, check: any },
    ];
    for case in &cases {
        let first = common::chairs(case.args);
        if first.code != case.code {
            return Err(format!("{:?}: exit {} (expected {}): {}", case.args, first.code, case.code, first.stderr));
        }
        if case.code == 0 {
            let doc = first.json();
            let problems = common::violations(&schema, &doc);
            if !problems.is_empty() {
                return Err(format!("{:?}: schema violations {problems:?}", case.args));
            }
            if !(case.check)(&doc) {
                return Err(format!("{:?}: unexpected payload {}", case.args, doc["payload"]));
            }
        } else if !first.stdout.is_empty() {
            return Err(format!("{:?}: failure printed a document", case.args));
        }
        let second = common::chairs(case.args);
        if second.stdout != first.stdout || second.code != first.code {
            return Err(format!("{:?}: reruns differ", case.args));
        }
    }
    Ok(format!("{} invocations", cases.len()))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 8] = [
        ("1", "exact formula identity, 1 <= n <= m <= 6", formula_identity),
        ("2", "process equivalence per sample, n <= m <= 6", process_equivalence),
        ("3", "bijection and round trips, n <= m <= 5", bijection),
        ("4", "chain invariants on every chain, n <= m <= 5", chain_properties),
        ("5", "pattern and per-pattern match counts, n, m <= 6", counting_claims),
        ("6", "Monte-Carlo (500, 997, 1e5) within 5 SE", monte_carlo),
        ("7", "float vs exact average, rel err <= 1e-12, n <= m <= 100", exact_float_agreement),
        ("8", "CLI exit codes, schema, determinism", cli_contract),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  criterion {id}: {name} ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {id}: {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
