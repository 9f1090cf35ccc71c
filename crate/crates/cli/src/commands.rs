use std::fmt::Write as _;

use chairs::bijection::{forward_map_traced, inverse_map, DistinguishedChain};
use chairs::enumeration::{monte_carlo_average, verify_all, Check};
use chairs::formula::{closed_form_average, closed_form_average_float, closed_form_total, format_rational};
use chairs::model::{Pattern, Rejection, Sample};
use chairs::seating::{simulate, Process, SeatingTrace};
use chairs::Error;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::document::OutputDocument;

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    CheckFailed = 1,
    Usage = 2,
    Infeasible = 3,
    Budget = 4,
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { exit: Exit::Usage, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Infeasible { .. } => Exit::Infeasible,
            Error::BudgetExceeded { .. } => Exit::Budget,
            Error::InvariantViolation(_) | Error::NoPreimage(_) | Error::NotAMatch => Exit::CheckFailed,
            Error::InvalidParameters(_)
            | Error::InvalidEncoding(_)
            | Error::InvalidInterval(_)
            | Error::InvalidPattern(_)
            | Error::NotARejection(_) => Exit::Usage,
        };
        Failure { exit, message: e.to_string() }
    }
}

/// What a command produced: a document (or table text) and an exit status.
pub struct Outcome {
    pub document: OutputDocument,
    pub table: Option<String>,
    pub exit: Exit,
}

impl Outcome {
    fn ok(document: OutputDocument) -> Self {
        Outcome { document, table: None, exit: Exit::Success }
    }
}

pub fn parse_sample(
    n: usize,
    m: usize,
    digits: Option<&str>,
    list: Option<&str>,
) -> Result<Sample, Failure> {
    let sample = match (digits, list) {
        (Some(d), None) => Sample::from_digits(d, m)?,
        (None, Some(l)) => Sample::from_list(l, m)?,
        _ => return Err(Failure::usage("give exactly one of --sample or --sample-list")),
    };
    if sample.players() != n {
        return Err(Failure::usage(format!(
            "sample encodes {} players but --n is {n}",
            sample.players()
        )));
    }
    Ok(sample)
}

fn rejection_json(r: &Rejection) -> Value {
    json!({ "player": r.player.0, "chair": r.chair.0, "occupant": r.occupant.0 })
}

fn pattern_json(p: &Pattern) -> Value {
    json!({
        "size": p.size(),
        "start": p.start().0,
        "pair": [p.pair().0 .0, p.pair().1 .0],
        "singles": p.singles().iter().map(|x| x.0).collect::<Vec<_>>(),
    })
}

fn chain_json(c: &DistinguishedChain) -> Value {
    json!({
        "k": c.len(),
        "c": c.start.0,
        "a": c.rejected.0,
        "z": c.z.0,
        "z_final": c.z_final.0,
        "links": c.links.iter().map(|l| json!({
            "origin": l.origin.0,
            "loss_chair": l.loss_chair.map(|d| d.0),
            "lost_player": l.lost_player.0,
        })).collect::<Vec<_>>(),
    })
}

fn trace_json(t: &SeatingTrace) -> Value {
    json!({
        "process": t.process,
        "sample": t.sample.encode(),
        "finals": t.finals.iter().map(|c| c.0).collect::<Vec<_>>(),
        "losses": t.losses.iter().map(|e| json!({
            "block_origin": e.block_origin.0,
            "chair": e.chair.0,
            "player": e.player.0,
            "step": e.step,
        })).collect::<Vec<_>>(),
        "rejections": t.rejections.iter().map(rejection_json).collect::<Vec<_>>(),
        "rejection_count": t.rejections.len(),
    })
}

fn trace_table(t: &SeatingTrace) -> String {
    let mut out = String::new();
    let process = match t.process {
        Process::Sequential => "sequential",
        Process::Blocks => "block",
    };
    let _ = writeln!(out, "sample {} ({process} process)", t.sample);
    let _ = writeln!(out, "{:>6} {:>7} {:>5}", "player", "initial", "final");
    for (p, (init, fin)) in t.sample.initial_chairs().iter().zip(&t.finals).enumerate() {
        let _ = writeln!(out, "{p:>6} {init:>7} {fin:>5}");
    }
    let _ = writeln!(out, "rejections: {}", t.rejections.len());
    for r in &t.rejections {
        let _ = writeln!(out, "  player {} at chair {} (occupant {})", r.player, r.chair, r.occupant);
    }
    out
}

pub fn simulate_cmd(sample: &Sample, process: Process, table: bool) -> Result<Outcome, Failure> {
    let trace = simulate(sample, process)?;
    let parameters = json!({
        "n": sample.players(),
        "m": sample.chairs(),
        "sample": sample.encode(),
        "process": process,
    });
    let mut outcome = Outcome::ok(OutputDocument::new("simulate", parameters, trace_json(&trace)));
    if table {
        outcome.table = Some(trace_table(&trace));
    }
    Ok(outcome)
}

pub fn verify_cmd(n: usize, m: usize, budget: u128, checks: &[Check]) -> Result<Outcome, Failure> {
    let report = verify_all(n, m, budget, checks)?;
    let parameters = json!({
        "n": n,
        "m": m,
        "budget": budget.to_string(),
        "checks": checks.iter().map(Check::name).collect::<Vec<_>>(),
    });
    let payload = serde_json::to_value(&report).expect("reports serialize");
    let exit = if report.passed { Exit::Success } else { Exit::CheckFailed };
    Ok(Outcome { document: OutputDocument::new("verify", parameters, payload), table: None, exit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FormulaMode {
    Total,
    Average,
    AverageFloat,
}

pub fn formula_cmd(n: u64, m: u64, mode: FormulaMode) -> Result<Outcome, Failure> {
    let (name, value) = match mode {
        FormulaMode::Total => ("total", json!(closed_form_total(n, m)?.to_string())),
        FormulaMode::Average => ("average", json!(format_rational(&closed_form_average(n, m)?))),
        FormulaMode::AverageFloat => ("average-float", json!(closed_form_average_float(n, m)?)),
    };
    let parameters = json!({ "n": n, "m": m, "mode": name });
    Ok(Outcome::ok(OutputDocument::new("formula", parameters, json!({ "mode": name, "value": value }))))
}

pub fn demo_cmd(sample: &Sample, index: usize) -> Result<Outcome, Failure> {
    let trace = simulate(sample, Process::Blocks)?;
    let Some(r) = trace.rejections.get(index) else {
        return Err(Failure::usage(format!(
            "rejection index {index} out of range: sample {sample} has {} rejections",
            trace.rejections.len()
        )));
    };
    let (record, chain) = forward_map_traced(&trace, r)?;
    let (back, back_r) = inverse_map(&record.sample, &record.pattern)?;
    let ok = back == *sample && back_r == *r;
    let parameters = json!({
        "n": sample.players(),
        "m": sample.chairs(),
        "sample": sample.encode(),
        "rejection": index,
    });
    let payload = json!({
        "rejection": rejection_json(r),
        "chain": chain_json(&chain),
        "t_sample": record.sample.encode(),
        "pattern": pattern_json(&record.pattern),
        "round_trip": {
            "sample": back.encode(),
            "rejection": rejection_json(&back_r),
            "ok": ok,
        },
    });
    let mut outcome = Outcome::ok(OutputDocument::new("demo", parameters, payload));
    if !ok {
        outcome.exit = Exit::CheckFailed;
    }
    Ok(outcome)
}

/// Largest `n` for which the exact reference rational is printed.
const EXACT_REFERENCE_LIMIT: usize = 100;

pub fn montecarlo_cmd(n: usize, m: usize, trials: u64, seed: u64) -> Result<Outcome, Failure> {
    let est = monte_carlo_average(n, m, trials, seed)?;
    let reference = closed_form_average_float(n as u64, m as u64)?;
    let exact = if n <= EXACT_REFERENCE_LIMIT {
        Some(closed_form_average(n as u64, m as u64)?)
    } else {
        None
    };
    // prefer the exact value when it exists
    let target = exact.as_ref().and_then(|r| r.to_f64()).unwrap_or(reference);
    let z = if est.std_error > 0.0 {
        Some((est.mean - target) / est.std_error)
    } else if est.mean == target {
        Some(0.0)
    } else {
        None
    };
    let parameters = json!({ "n": n, "m": m, "trials": trials, "seed": seed });
    let payload = json!({
        "mean": est.mean,
        "std_error": est.std_error,
        "reference_exact": exact.as_ref().map(format_rational),
        "reference_float": reference,
        "z_score": z,
        "generator": est.generator,
        "seed": seed,
    });
    Ok(Outcome::ok(OutputDocument::new("montecarlo", parameters, payload)))
}
