//! Exhaustive generators, the verification driver, and a Monte-Carlo
//! estimator for parameters too large to enumerate.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bijection::{check_chain, forward_map_traced, inverse_map, ChainProperties};
use crate::error::{Error, Result};
use crate::formula::{closed_form_total, falling_factorial, ExactCount};
use crate::model::{ChairId, MatchRecord, Pattern, PlayerId, Sample};
use crate::seating::{simulate_blocks, simulate_sequential, RejectionCounter};

/// Default cap on the number of samples an exhaustive run may visit.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Samples per work unit in parallel enumeration.
const CHUNK: u64 = 256;

fn space_size(n: usize, m: usize) -> Option<u128> {
    (m as u128).checked_pow(u32::try_from(n).ok()?)
}

fn check_budget(n: usize, m: usize, budget: u128) -> Result<u64> {
    match space_size(n, m) {
        Some(size) if size <= budget && size <= u64::MAX as u128 => Ok(size as u64),
        Some(size) => Err(Error::BudgetExceeded { required: size, budget }),
        None => Err(Error::BudgetExceeded { required: u128::MAX, budget }),
    }
}

/// The sample whose base-`m` encoding (player 0 most significant) is
/// `index`.
pub fn sample_at(n: usize, m: usize, mut index: u64) -> Sample {
    let mut initial = vec![ChairId(0); n];
    for slot in initial.iter_mut().rev() {
        *slot = ChairId((index % m as u64) as usize);
        index /= m as u64;
    }
    Sample::new(m, initial).expect("digits are below m")
}

/// All `m^n` samples in lexicographic order of their encodings.
pub fn all_samples(n: usize, m: usize, budget: u128) -> Result<impl Iterator<Item = Sample>> {
    if m == 0 {
        return Err(Error::InvalidParameters("need at least one chair".into()));
    }
    let size = check_budget(n, m, budget)?;
    Ok((0..size).map(move |i| sample_at(n, m, i)))
}

/// Every `j`-pattern for `n` players on `m` chairs, each exactly once.
pub fn all_patterns(n: usize, m: usize, j: usize) -> Result<impl Iterator<Item = Pattern>> {
    if j < 2 || j > n || j - 1 > m {
        return Err(Error::InvalidParameters(format!(
            "pattern size {j} out of range for n={n}, m={m}"
        )));
    }
    Ok((0..m).flat_map(move |c| {
        (0..n).tuple_combinations().flat_map(move |(x, y)| {
            let rest: Vec<usize> = (0..n).filter(|p| *p != x && *p != y).collect();
            rest.into_iter().permutations(j - 2).map(move |singles| {
                Pattern::new(
                    m,
                    ChairId(c),
                    (PlayerId(x), PlayerId(y)),
                    singles.into_iter().map(PlayerId).collect(),
                )
                .expect("generated patterns are well formed")
            })
        })
    }))
}

/// Whether every pattern player sits at its pattern chair in `s`.
pub fn matches(s: &Sample, p: &Pattern) -> bool {
    s.chairs() == p.chairs()
        && p.placements()
            .all(|(player, chair)| player.0 < s.players() && s.initial(player) == chair)
}

/// Every pattern that `s` matches: a pair from some block, followed by one
/// member from each of the next consecutive non-empty blocks.
pub fn patterns_matched_by(s: &Sample) -> Vec<Pattern> {
    let m = s.chairs();
    let blocks = s.block_view();
    let mut out = Vec::new();
    for c in 0..m {
        for (x, y) in blocks[c].iter().tuple_combinations() {
            extend_singles(&blocks, m, ChairId(c), (*x, *y), &mut Vec::new(), &mut out);
        }
    }
    out
}

fn extend_singles(
    blocks: &[Vec<PlayerId>],
    m: usize,
    start: ChairId,
    pair: (PlayerId, PlayerId),
    singles: &mut Vec<PlayerId>,
    out: &mut Vec<Pattern>,
) {
    out.push(Pattern::new(m, start, pair, singles.clone()).expect("distinct blocks"));
    if singles.len() + 1 >= m {
        return;
    }
    let next = start.advance(singles.len() + 1, m);
    for &p in &blocks[next.0] {
        singles.push(p);
        extend_singles(blocks, m, start, pair, singles, out);
        singles.pop();
    }
}

/// Number of samples matching each pattern, counted over every sample.
pub fn pattern_match_counts(n: usize, m: usize, budget: u128) -> Result<HashMap<Pattern, u64>> {
    let size = check_budget(n, m, budget)?;
    Ok(chunks(size)
        .into_par_iter()
        .map(|range| {
            let mut counts: HashMap<Pattern, u64> = HashMap::new();
            for i in range {
                for p in patterns_matched_by(&sample_at(n, m, i)) {
                    *counts.entry(p).or_default() += 1;
                }
            }
            counts
        })
        .reduce(HashMap::new, |mut a, b| {
            for (p, c) in b {
                *a.entry(p).or_default() += c;
            }
            a
        }))
}

/// Total number of (sample, pattern) matches with pattern size at least 2,
/// found by enumeration and cross-checked against the closed form.
pub fn count_all_matches(n: usize, m: usize, budget: u128) -> Result<ExactCount> {
    let size = check_budget(n, m, budget)?;
    let counted: u64 = chunks(size)
        .into_par_iter()
        .map(|range| range.map(|i| patterns_matched_by(&sample_at(n, m, i)).len() as u64).sum::<u64>())
        .sum();
    let expected = closed_form_total(n as u64, m as u64)?;
    let counted = ExactCount::from(counted);
    if counted != expected {
        return Err(Error::InvariantViolation(format!(
            "enumerated {counted} matches, closed form gives {expected}"
        )));
    }
    Ok(counted)
}

/// `n^(j) m / 2`, the number of `j`-patterns.
pub fn expected_pattern_count(n: usize, m: usize, j: usize) -> BigUint {
    falling_factorial(n as u64, j as u64).0 * BigUint::from(m) / 2u32
}

fn chunks(size: u64) -> Vec<std::ops::Range<u64>> {
    (0..size.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(size))
        .collect()
}

/// The claims `verify_all` can check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Enumerated rejection total equals the closed form.
    Formula,
    /// Both processes agree per sample on occupancy and rejection totals.
    Processes,
    /// The forward map is a bijection onto all matches.
    Bijection,
    /// Structural properties of every chain.
    Lemmas,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Formula, Check::Processes, Check::Bijection, Check::Lemmas];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Formula => "formula",
            Check::Processes => "processes",
            Check::Bijection => "bijection",
            Check::Lemmas => "lemmas",
        }
    }

    pub fn parse(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// First counterexample in sample order, when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

fn as_decimal<S: Serializer>(v: &ExactCount, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportCounts {
    pub samples: u64,
    pub rejections_sequential: u64,
    pub rejections_blocks: u64,
    #[serde(serialize_with = "as_decimal")]
    pub expected_total: ExactCount,
    pub patterns: u64,
    pub matches: u64,
    pub images: u64,
    pub chains: u64,
    pub max_chain_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub m: usize,
    pub counts: ReportCounts,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Per-partition tallies; merged in index order so reports do not depend
/// on the worker count.
#[derive(Default)]
struct Partial {
    rejections_seq: u64,
    rejections_blocks: u64,
    process_failure: Option<String>,
    chain_failure: Option<String>,
    forward_failure: Option<String>,
    inverse_failure: Option<String>,
    lemma_failures: Vec<(&'static str, String)>,
    images: Vec<MatchRecord>,
    chains: u64,
    max_chain_len: usize,
}

impl Partial {
    /// `later` must cover samples after `self`.
    fn merge(mut self, later: Partial) -> Partial {
        self.rejections_seq += later.rejections_seq;
        self.rejections_blocks += later.rejections_blocks;
        self.process_failure = self.process_failure.or(later.process_failure);
        self.chain_failure = self.chain_failure.or(later.chain_failure);
        self.forward_failure = self.forward_failure.or(later.forward_failure);
        self.inverse_failure = self.inverse_failure.or(later.inverse_failure);
        for (name, detail) in later.lemma_failures {
            if !self.lemma_failures.iter().any(|(n, _)| *n == name) {
                self.lemma_failures.push((name, detail));
            }
        }
        self.images.extend(later.images);
        self.chains += later.chains;
        self.max_chain_len = self.max_chain_len.max(later.max_chain_len);
        self
    }
}

const PROPERTY_NAMES: [&str; 7] = [
    "sets-disjoint",
    "no-early-sit",
    "blocks-non-empty",
    "loss-chair-range",
    "prefix-no-sit",
    "next-origin-range",
    "halts-within-n",
];

fn property_flags(p: &ChainProperties) -> [bool; 7] {
    [
        p.sets_disjoint,
        p.no_early_sit,
        p.blocks_non_empty,
        p.loss_chair_range,
        p.prefix_no_sit,
        p.next_origin_range,
        p.halts_within_n,
    ]
}

fn want_chains(checks: &HashSet<Check>) -> bool {
    checks.contains(&Check::Bijection) || checks.contains(&Check::Lemmas)
}

fn scan_range(
    n: usize,
    m: usize,
    range: std::ops::Range<u64>,
    checks: &HashSet<Check>,
) -> Result<Partial> {
    let mut part = Partial::default();
    let want_chains = want_chains(checks);
    let mut lemma_seen = [false; 7];
    for i in range {
        let s = sample_at(n, m, i);
        let blocks = simulate_blocks(&s)?;
        part.rejections_blocks += blocks.rejections.len() as u64;
        if checks.contains(&Check::Formula) || checks.contains(&Check::Processes) {
            let seq = simulate_sequential(&s)?;
            part.rejections_seq += seq.rejections.len() as u64;
            if part.process_failure.is_none()
                && (seq.occupied() != blocks.occupied()
                    || seq.rejections.len() != blocks.rejections.len())
            {
                part.process_failure = Some(format!(
                    "sample {s}: sequential {} rejections, blocks {}",
                    seq.rejections.len(),
                    blocks.rejections.len()
                ));
            }
        }
        if !want_chains {
            continue;
        }
        for r in &blocks.rejections {
            let (record, chain) = match forward_map_traced(&blocks, r) {
                Ok(v) => v,
                Err(e) => {
                    part.chain_failure.get_or_insert_with(|| format!("sample {s}, {r:?}: {e}"));
                    continue;
                }
            };
            part.chains += 1;
            part.max_chain_len = part.max_chain_len.max(chain.len());
            if checks.contains(&Check::Lemmas) {
                let flags = property_flags(&check_chain(&blocks, &chain));
                for (idx, ok) in flags.into_iter().enumerate() {
                    if !ok && !lemma_seen[idx] {
                        lemma_seen[idx] = true;
                        part.lemma_failures.push((PROPERTY_NAMES[idx], format!("sample {s}, {r:?}")));
                    }
                }
            }
            if checks.contains(&Check::Bijection) {
                if part.forward_failure.is_none() && !matches(&record.sample, &record.pattern) {
                    part.forward_failure = Some(format!("sample {s}, {r:?}: image is not a match"));
                }
                match inverse_map(&record.sample, &record.pattern) {
                    Ok((back, back_r)) if back == s && back_r == *r => {}
                    other => {
                        part.inverse_failure.get_or_insert_with(|| {
                            format!("sample {s}, {r:?}: inverse gave {other:?}")
                        });
                    }
                }
                part.images.push(record);
            }
        }
    }
    Ok(part)
}

/// Runs every selected check over all `m^n` samples.
pub fn verify_all(n: usize, m: usize, budget: u128, checks: &[Check]) -> Result<VerificationReport> {
    let began = Instant::now();
    if n > m {
        return Err(Error::Infeasible { players: n, chairs: m });
    }
    if m == 0 {
        return Err(Error::InvalidParameters("need at least one chair".into()));
    }
    let size = check_budget(n, m, budget)?;
    let checks: HashSet<Check> = checks.iter().copied().collect();
    // the closed form needs n >= 1; with no players nothing is ever rejected
    let expected_total = if n == 0 {
        ExactCount::from(0)
    } else {
        closed_form_total(n as u64, m as u64)?
    };

    let partials = chunks(size)
        .into_par_iter()
        .map(|range| scan_range(n, m, range, &checks))
        .collect::<Result<Vec<_>>>()?;
    let part = partials.into_iter().fold(Partial::default(), Partial::merge);

    let mut outcomes = Vec::new();
    let mut push = |name: &str, failure: Option<String>| {
        outcomes.push(CheckOutcome { name: name.to_string(), passed: failure.is_none(), detail: failure });
    };

    if checks.contains(&Check::Formula) {
        let got = ExactCount::from(part.rejections_seq);
        push(
            "formula-total",
            (got != expected_total).then(|| format!("enumerated {got}, closed form {expected_total}")),
        );
    }
    if checks.contains(&Check::Processes) {
        push("process-equivalence", part.process_failure.clone());
    }

    if want_chains(&checks) {
        push("chain-construction", part.chain_failure.clone());
    }

    let mut pattern_total = 0u64;
    let mut match_total = 0u64;
    let images = part.images.len() as u64;
    if checks.contains(&Check::Bijection) {
        for j in 2..=n.min(m + 1) {
            pattern_total += all_patterns(n, m, j)?.count() as u64;
        }
        let all_matches: Vec<MatchRecord> = chunks(size)
            .into_par_iter()
            .flat_map_iter(|range| {
                range.flat_map(move |i| {
                    let s = sample_at(n, m, i);
                    patterns_matched_by(&s)
                        .into_iter()
                        .map(move |pattern| MatchRecord { sample: s.clone(), pattern })
                })
            })
            .collect();
        match_total = all_matches.len() as u64;

        let image_set: HashSet<&MatchRecord> = part.images.iter().collect();
        let injective = image_set.len() == part.images.len();
        push(
            "forward-injective",
            (!injective).then(|| {
                format!("{} rejections but {} distinct images", part.images.len(), image_set.len())
            }),
        );

        let match_set: HashSet<&MatchRecord> = all_matches.iter().collect();
        let onto = image_set == match_set && part.forward_failure.is_none();
        push(
            "image-equals-matches",
            (!onto).then(|| {
                part.forward_failure.clone().unwrap_or_else(|| {
                    format!("{} distinct images, {} matches", image_set.len(), match_set.len())
                })
            }),
        );

        let expected = expected_total.to_u128();
        let counts_ok = expected == Some(images as u128) && expected == Some(match_total as u128);
        push(
            "counts-equal-closed-form",
            (!counts_ok).then(|| {
                format!("images {images}, matches {match_total}, closed form {expected_total}")
            }),
        );

        push("inverse-after-forward", part.inverse_failure.clone());

        let forward_after_inverse = all_matches
            .par_iter()
            .find_map_first(|rec| {
                let ok = inverse_map(&rec.sample, &rec.pattern).and_then(|(s, r)| {
                    let trace = simulate_blocks(&s)?;
                    forward_map_traced(&trace, &r).map(|(image, _)| image == *rec)
                });
                match ok {
                    Ok(true) => None,
                    Ok(false) => Some(format!("{} / {:?}: round trip differs", rec.sample, rec.pattern)),
                    Err(e) => Some(format!("{} / {:?}: {e}", rec.sample, rec.pattern)),
                }
            });
        push("forward-after-inverse", forward_after_inverse);
    }

    if checks.contains(&Check::Lemmas) {
        for name in PROPERTY_NAMES {
            let failure = part.lemma_failures.iter().find(|(n, _)| *n == name).map(|(_, d)| d.clone());
            push(name, failure);
        }
    }

    let passed = outcomes.iter().all(|c| c.passed);
    Ok(VerificationReport {
        n,
        m,
        counts: ReportCounts {
            samples: size,
            rejections_sequential: part.rejections_seq,
            rejections_blocks: part.rejections_blocks,
            expected_total,
            patterns: pattern_total,
            matches: match_total,
            images,
            chains: part.chains,
            max_chain_len: part.max_chain_len,
        },
        checks: outcomes,
        passed,
        elapsed: began.elapsed(),
    })
}

/// Identity of the pseudorandom stream used by [`monte_carlo_average`].
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.3): seed_from_u64(seed), set_stream(batch index), \
     batches of 4096 trials; chairs drawn with Rng::gen_range::<u32>(0..m) (rand 0.8)";

const MC_BATCH: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub n: usize,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    /// Mean rejections per player.
    pub mean: f64,
    pub std_error: f64,
    pub generator: &'static str,
}

/// Estimates the per-player average rejection count of the sequential
/// process from `trials` uniform samples.
pub fn monte_carlo_average(n: usize, m: usize, trials: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if n < 1 || n > m || trials < 1 {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= n <= m and trials >= 1, got n={n}, m={m}, trials={trials}"
        )));
    }
    let m32 = u32::try_from(m).map_err(|_| Error::InvalidParameters(format!("m={m} too large")))?;
    let batches = trials.div_ceil(MC_BATCH);
    // exact integer sums keep the result independent of scheduling
    let (sum, sum_sq) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let mut counter = RejectionCounter::new(m);
            let mut initial = vec![0u32; n];
            let count = MC_BATCH.min(trials - b * MC_BATCH);
            let mut acc = (0u128, 0u128);
            for _ in 0..count {
                initial.iter_mut().for_each(|c| *c = rng.gen_range(0..m32));
                let r = counter.count(&initial) as u128;
                acc.0 += r;
                acc.1 += r * r;
            }
            acc
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let t = trials as f64;
    let nf = n as f64;
    let mean_total = sum.to_f64().unwrap_or(f64::INFINITY) / t;
    let std_error = if trials > 1 {
        // (T * sum_sq - sum^2) is exact in integers
        let spread = trials as u128 * sum_sq - sum * sum;
        let var = spread.to_f64().unwrap_or(f64::INFINITY) / (t * (t - 1.0));
        (var / t).sqrt() / nf
    } else {
        0.0
    };
    Ok(MonteCarloEstimate { n, m, trials, seed, mean: mean_total / nf, std_error, generator: GENERATOR })
}
