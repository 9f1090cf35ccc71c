//! Domain types: chairs, players, samples, circular intervals, rejections
//! and patterns.
//!
//! Chairs are numbered clockwise `0..m`. Players are numbered `0..n` and a
//! lower id means a higher rank; the sequential process also admits players
//! in ascending id order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chair count representable by the single-character digit encoding.
pub const MAX_DIGIT_BASE: usize = 36;

/// A chair on the circle, `0 <= index < m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChairId(pub usize);

impl ChairId {
    /// `self + steps` clockwise on a circle of `m` chairs.
    #[inline]
    pub fn advance(self, steps: usize, m: usize) -> ChairId {
        ChairId((self.0 + steps % m) % m)
    }

    /// Clockwise distance from `origin` to `self`, in `[0, m)`.
    #[inline]
    pub fn offset_from(self, origin: ChairId, m: usize) -> usize {
        (self.0 + m - origin.0) % m
    }
}

impl fmt::Display for ChairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// A player; the id doubles as the rank (smaller is higher).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlayerId(pub usize);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// An assignment of `n` players to initial chairs on a circle of `m`.
///
/// Samples are plain values. `n <= m` is only required when seating.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sample {
    chairs: usize,
    initial: Vec<ChairId>,
}

impl Sample {
    pub fn new(chairs: usize, initial: Vec<ChairId>) -> Result<Sample> {
        if chairs == 0 {
            return Err(Error::InvalidParameters("a circle needs at least one chair".into()));
        }
        if let Some(c) = initial.iter().find(|c| c.0 >= chairs) {
            return Err(Error::InvalidParameters(format!(
                "initial chair {c} out of range for {chairs} chairs"
            )));
        }
        Ok(Sample { chairs, initial })
    }

    /// Builds a sample from per-chair blocks. Every player `0..n` must
    /// appear exactly once across the blocks.
    pub fn from_blocks(blocks: &[Vec<PlayerId>]) -> Result<Sample> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut initial = vec![None; n];
        for (chair, block) in blocks.iter().enumerate() {
            for p in block {
                match initial.get_mut(p.0) {
                    Some(slot @ None) => *slot = Some(ChairId(chair)),
                    _ => {
                        return Err(Error::InvalidParameters(format!(
                            "player {p} is duplicated or out of range"
                        )))
                    }
                }
            }
        }
        let initial = initial.into_iter().map(|c| c.expect("every slot filled")).collect();
        Sample::new(blocks.len(), initial)
    }

    /// Parses the canonical digit string: player `i`'s chair is the `i`-th
    /// character, `0-9` then `a-z`.
    pub fn from_digits(digits: &str, chairs: usize) -> Result<Sample> {
        if chairs == 0 || chairs > MAX_DIGIT_BASE {
            return Err(Error::InvalidEncoding(format!(
                "digit encoding supports 1..={MAX_DIGIT_BASE} chairs, got {chairs}"
            )));
        }
        let initial = digits
            .chars()
            .map(|ch| match ch.to_digit(36) {
                Some(d) if (d as usize) < chairs && !ch.is_ascii_uppercase() => {
                    Ok(ChairId(d as usize))
                }
                _ => Err(Error::InvalidEncoding(format!(
                    "'{ch}' is not a base-{chairs} digit"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Sample::new(chairs, initial)
    }

    /// Parses a comma-separated list of decimal chair numbers.
    pub fn from_list(list: &str, chairs: usize) -> Result<Sample> {
        let list = list.trim();
        let initial = if list.is_empty() {
            Vec::new()
        } else {
            list.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map(ChairId)
                        .map_err(|_| Error::InvalidEncoding(format!("'{tok}' is not a chair number")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Sample::new(chairs, initial).map_err(|e| match e {
            Error::InvalidParameters(msg) => Error::InvalidEncoding(msg),
            other => other,
        })
    }

    /// Canonical digit string, or `None` when `m` exceeds the digit range.
    pub fn to_digits(&self) -> Option<String> {
        if self.chairs > MAX_DIGIT_BASE {
            return None;
        }
        Some(
            self.initial
                .iter()
                .map(|c| std::char::from_digit(c.0 as u32, 36).expect("chair below base"))
                .collect(),
        )
    }

    /// Comma-separated decimal list; works for any `m`.
    pub fn to_list(&self) -> String {
        self.initial.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Digit string when available, decimal list otherwise.
    pub fn encode(&self) -> String {
        self.to_digits().unwrap_or_else(|| self.to_list())
    }

    pub fn chairs(&self) -> usize {
        self.chairs
    }

    pub fn players(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self, p: PlayerId) -> ChairId {
        self.initial[p.0]
    }

    pub fn initial_chairs(&self) -> &[ChairId] {
        &self.initial
    }

    /// Players grouped by initial chair, each block in rank order.
    pub fn block_view(&self) -> Vec<Vec<PlayerId>> {
        let mut blocks = vec![Vec::new(); self.chairs];
        for (p, c) in self.initial.iter().enumerate() {
            blocks[c.0].push(PlayerId(p));
        }
        blocks
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// A set of consecutive chairs `[a, b]`, `(a, b]`, `[a, b)` or `(a, b)`,
/// walking clockwise from `a` to `b`.
///
/// When `start == end` only the closed singleton `[a, a]` can be built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CircularInterval {
    chairs: usize,
    start: ChairId,
    end: ChairId,
    closed_start: bool,
    closed_end: bool,
}

impl CircularInterval {
    pub fn new(
        chairs: usize,
        start: ChairId,
        end: ChairId,
        closed_start: bool,
        closed_end: bool,
    ) -> Result<CircularInterval> {
        if chairs == 0 || start.0 >= chairs || end.0 >= chairs {
            return Err(Error::InvalidInterval(format!(
                "endpoints {start}, {end} outside a circle of {chairs}"
            )));
        }
        if start == end && !(closed_start && closed_end) {
            return Err(Error::InvalidInterval(format!(
                "interval with equal endpoints {start} must be closed on both ends"
            )));
        }
        Ok(CircularInterval { chairs, start, end, closed_start, closed_end })
    }

    /// `[a, b]`
    pub fn closed(chairs: usize, a: ChairId, b: ChairId) -> Result<Self> {
        Self::new(chairs, a, b, true, true)
    }

    /// `(a, b]`
    pub fn open_closed(chairs: usize, a: ChairId, b: ChairId) -> Result<Self> {
        Self::new(chairs, a, b, false, true)
    }

    /// `[a, b)`
    pub fn closed_open(chairs: usize, a: ChairId, b: ChairId) -> Result<Self> {
        Self::new(chairs, a, b, true, false)
    }

    /// `(a, b)`
    pub fn open(chairs: usize, a: ChairId, b: ChairId) -> Result<Self> {
        Self::new(chairs, a, b, false, false)
    }

    pub fn start(&self) -> ChairId {
        self.start
    }

    pub fn end(&self) -> ChairId {
        self.end
    }

    pub fn contains(&self, c: ChairId) -> bool {
        if c.0 >= self.chairs {
            return false;
        }
        let span = self.end.offset_from(self.start, self.chairs);
        let off = c.offset_from(self.start, self.chairs);
        if off > span {
            return false;
        }
        (off != 0 || self.closed_start) && (off != span || self.closed_end)
    }

    /// Member chairs in clockwise order from the start.
    pub fn chairs_iter(&self) -> impl Iterator<Item = ChairId> + '_ {
        let span = self.end.offset_from(self.start, self.chairs);
        (0..=span)
            .map(move |off| self.start.advance(off, self.chairs))
            .filter(move |c| self.contains(*c))
    }

    pub fn is_empty(&self) -> bool {
        self.chairs_iter().next().is_none()
    }
}

/// Membership test; see [`CircularInterval::contains`].
pub fn interval_contains(iv: &CircularInterval, c: ChairId) -> bool {
    iv.contains(c)
}

/// Player `player` found chair `chair` occupied by `occupant` during the
/// clockwise search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rejection {
    pub player: PlayerId,
    pub chair: ChairId,
    pub occupant: PlayerId,
}

/// A `j`-pattern: an unordered pair at `start` followed by `j - 2`
/// singletons on the next consecutive chairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    chairs: usize,
    start: ChairId,
    /// Stored with the higher-ranked (smaller id) player first.
    pair: (PlayerId, PlayerId),
    singles: Vec<PlayerId>,
}

impl Pattern {
    pub fn new(
        chairs: usize,
        start: ChairId,
        pair: (PlayerId, PlayerId),
        singles: Vec<PlayerId>,
    ) -> Result<Pattern> {
        if start.0 >= chairs {
            return Err(Error::InvalidPattern(format!("start chair {start} out of range")));
        }
        if singles.len() + 1 > chairs {
            return Err(Error::InvalidPattern(format!(
                "{} occupied chairs do not fit on a circle of {chairs}",
                singles.len() + 1
            )));
        }
        let mut all: Vec<PlayerId> = vec![pair.0, pair.1];
        all.extend_from_slice(&singles);
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::InvalidPattern("pattern players must be distinct".into()));
        }
        let pair = if pair.0 < pair.1 { pair } else { (pair.1, pair.0) };
        Ok(Pattern { chairs, start, pair, singles })
    }

    /// Number of players, `j`.
    pub fn size(&self) -> usize {
        self.singles.len() + 2
    }

    pub fn chairs(&self) -> usize {
        self.chairs
    }

    pub fn start(&self) -> ChairId {
        self.start
    }

    pub fn pair(&self) -> (PlayerId, PlayerId) {
        self.pair
    }

    pub fn singles(&self) -> &[PlayerId] {
        &self.singles
    }

    /// Every pattern player with the chair the pattern assigns it.
    pub fn placements(&self) -> impl Iterator<Item = (PlayerId, ChairId)> + '_ {
        [(self.pair.0, self.start), (self.pair.1, self.start)].into_iter().chain(
            self.singles
                .iter()
                .enumerate()
                .map(|(i, p)| (*p, self.start.advance(i + 1, self.chairs))),
        )
    }
}

/// A sample together with a pattern it matches.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchRecord {
    pub sample: Sample,
    pub pattern: Pattern,
}
