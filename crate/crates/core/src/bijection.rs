//! The correspondence between rejections and sample/pattern matches.
//!
//! A rejection of player `a` at the chair of player `z` is traced back
//! through a chain of distinguished blocks `b_1, ..., b_k`: `b_1` is `a`'s
//! block; while `b_i` does not contain `z`, `d_i` is the last chair at which
//! `b_i` seated a member (`p_i`) before reaching `z`'s final chair, and
//! `b_{i+1}` is the block whose origin is `d_i + 1`. Sliding the chain's
//! blocks together yields a sample `T` that matches the `(k+1)`-pattern
//! `{a, p_1}, p_2, ..., p_k`. The inverse spreads the chain back out using
//! as few undistinguished blocks as possible between consecutive links.

use serde::Serialize;

use crate::enumeration::matches;
use crate::error::{Error, Result};
use crate::model::{ChairId, CircularInterval, MatchRecord, Pattern, PlayerId, Rejection, Sample};
use crate::seating::{last_loss_before, simulate_blocks, Process, SeatingTrace};

/// One link of a chain: block origin, and for all but the last link the
/// chair where the block lost `lost_player`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub origin: ChairId,
    pub loss_chair: Option<ChairId>,
    pub lost_player: PlayerId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinguishedChain {
    pub rejected: PlayerId,
    /// Origin of the first block, the initial chair of the rejected player.
    pub start: ChairId,
    pub z: PlayerId,
    pub z_final: ChairId,
    pub links: Vec<ChainLink>,
}

impl DistinguishedChain {
    /// Number of distinguished blocks, `k`.
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn origins(&self) -> impl Iterator<Item = ChairId> + '_ {
        self.links.iter().map(|l| l.origin)
    }

    pub fn last_origin(&self) -> ChairId {
        self.links.last().expect("chains have at least one link").origin
    }
}

/// Who is asked to sit somewhere.
#[derive(Clone, Copy, Debug)]
pub enum Who {
    Player(PlayerId),
    /// The block whose initial chair is given.
    Block(ChairId),
    /// Every block whose initial chair lies in the interval.
    Chairs(CircularInterval),
}

/// Groups of players for the universal form.
#[derive(Clone, Copy, Debug)]
pub enum Group {
    Block(ChairId),
    Chairs(CircularInterval),
}

fn block_members(trace: &SeatingTrace, origin: ChairId) -> impl Iterator<Item = PlayerId> + '_ {
    trace
        .sample
        .initial_chairs()
        .iter()
        .enumerate()
        .filter(move |(_, c)| **c == origin)
        .map(|(p, _)| PlayerId(p))
}

fn origins_in<'a>(
    trace: &'a SeatingTrace,
    iv: &'a CircularInterval,
) -> impl Iterator<Item = ChairId> + 'a {
    (0..trace.chairs()).map(ChairId).filter(|c| iv.contains(*c))
}

/// Existential seating: some player of `who` has a final chair in `place`.
pub fn sits(trace: &SeatingTrace, who: Who, place: &CircularInterval) -> bool {
    match who {
        Who::Player(p) => place.contains(trace.final_chair(p)),
        Who::Block(origin) => block_members(trace, origin).any(|p| place.contains(trace.final_chair(p))),
        Who::Chairs(iv) => origins_in(trace, &iv).any(|o| sits(trace, Who::Block(o), place)),
    }
}

/// Universal seating: every player of `group` has a final chair in `place`.
pub fn sits_only(trace: &SeatingTrace, group: Group, place: &CircularInterval) -> bool {
    match group {
        Group::Block(origin) => block_members(trace, origin).all(|p| place.contains(trace.final_chair(p))),
        Group::Chairs(iv) => origins_in(trace, &iv).all(|o| sits_only(trace, Group::Block(o), place)),
    }
}

fn require_block_trace(trace: &SeatingTrace) -> Result<()> {
    if trace.process != Process::Blocks {
        return Err(Error::InvalidParameters("the chain is defined on block-process traces".into()));
    }
    Ok(())
}

/// Follows the distinguished-block procedure from rejection `r`.
pub fn build_chain(trace: &SeatingTrace, r: &Rejection) -> Result<DistinguishedChain> {
    require_block_trace(trace)?;
    if !trace.is_rejection(r) {
        return Err(Error::NotARejection(format!("{r:?}")));
    }
    let m = trace.chairs();
    let n = trace.sample.players();
    let z = r.occupant;
    let z_final = trace.final_chair(z);
    let start = trace.sample.initial(r.player);
    let mut links = Vec::new();
    let mut origin = start;
    loop {
        if trace.sample.initial(z) == origin {
            links.push(ChainLink { origin, loss_chair: None, lost_player: z });
            break;
        }
        let Some((d, p)) = last_loss_before(trace, origin, z_final) else {
            return Err(Error::InvariantViolation(format!(
                "block at chair {origin} lost nobody before chair {z_final}"
            )));
        };
        links.push(ChainLink { origin, loss_chair: Some(d), lost_player: p });
        if links.len() >= n {
            return Err(Error::InvariantViolation(format!("chain exceeds {n} blocks")));
        }
        origin = d.advance(1, m);
    }
    Ok(DistinguishedChain { rejected: r.player, start, z, z_final, links })
}

/// Blocks of the chain moved to `start, start+1, ...`; every other block
/// keeps its clockwise order, beginning right after the chain.
fn gather_blocks(sample: &Sample, chain: &DistinguishedChain) -> Result<Sample> {
    let m = sample.chairs();
    let blocks = sample.block_view();
    let k = chain.len();
    let mut distinguished = vec![false; m];
    for o in chain.origins() {
        if std::mem::replace(&mut distinguished[o.0], true) {
            return Err(Error::InvariantViolation(format!("chain revisits chair {o}")));
        }
    }
    let mut arranged: Vec<Vec<PlayerId>> = vec![Vec::new(); m];
    for (i, o) in chain.origins().enumerate() {
        arranged[chain.start.advance(i, m).0] = blocks[o.0].clone();
    }
    let rest = (0..m)
        .map(|t| chain.start.advance(t, m))
        .filter(|c| !distinguished[c.0]);
    for (i, c) in rest.enumerate() {
        arranged[chain.start.advance(k + i, m).0] = blocks[c.0].clone();
    }
    Sample::from_blocks(&arranged)
}

fn chain_pattern(chain: &DistinguishedChain, m: usize) -> Result<Pattern> {
    let lost: Vec<PlayerId> = chain.links.iter().map(|l| l.lost_player).collect();
    Pattern::new(m, chain.start, (chain.rejected, lost[0]), lost[1..].to_vec())
}

/// Maps a rejection of the traced sample to its match.
pub fn forward_map_traced(
    trace: &SeatingTrace,
    r: &Rejection,
) -> Result<(MatchRecord, DistinguishedChain)> {
    let chain = build_chain(trace, r)?;
    let sample = gather_blocks(&trace.sample, &chain)?;
    let pattern = chain_pattern(&chain, trace.chairs())?;
    Ok((MatchRecord { sample, pattern }, chain))
}

/// Maps rejection `r` of `s` (block process) to the match `(T, P)`.
pub fn forward_map(s: &Sample, r: &Rejection) -> Result<MatchRecord> {
    let trace = simulate_blocks(s)?;
    forward_map_traced(&trace, r).map(|(record, _)| record)
}

/// Undistinguished blocks spliced between distinguished ones.
struct Spread<'a> {
    start: ChairId,
    chairs: usize,
    distinguished: &'a [Vec<PlayerId>],
    queue: &'a [Vec<PlayerId>],
}

impl Spread<'_> {
    /// Lays out `b_1, gap_1 blocks, b_2, ..., b_k` from `start`, then the
    /// unused queue in order.
    fn arrange(&self, gaps: &[usize]) -> Result<Sample> {
        let mut order: Vec<&Vec<PlayerId>> = Vec::with_capacity(self.chairs);
        let mut queue = self.queue.iter();
        for (i, block) in self.distinguished.iter().enumerate() {
            order.push(block);
            if let Some(&g) = gaps.get(i) {
                order.extend(queue.by_ref().take(g));
            }
        }
        order.extend(queue);
        let mut blocks = vec![Vec::new(); self.chairs];
        for (i, b) in order.into_iter().enumerate() {
            blocks[self.start.advance(i, self.chairs).0] = b.clone();
        }
        Sample::from_blocks(&blocks)
    }

    fn origin(&self, i: usize, gaps: &[usize]) -> ChairId {
        self.start.advance(i + gaps[..i].iter().sum::<usize>(), self.chairs)
    }
}

/// Reconstructs the sample and rejection that `forward_map` sends to
/// `(t, p)`.
pub fn inverse_map(t: &Sample, p: &Pattern) -> Result<(Sample, Rejection)> {
    if !matches(t, p) {
        return Err(Error::NotAMatch);
    }
    let m = t.chairs();
    if t.players() > m {
        return Err(Error::Infeasible { players: t.players(), chairs: m });
    }
    let k = p.size() - 1;
    let (p1, a) = p.pair();
    let lost: Vec<PlayerId> = std::iter::once(p1).chain(p.singles().iter().copied()).collect();
    let z = lost[k - 1];

    let blocks = t.block_view();
    let distinguished: Vec<Vec<PlayerId>> =
        (0..k).map(|i| blocks[p.start().advance(i, m).0].clone()).collect();
    let queue: Vec<Vec<PlayerId>> =
        (k..m).map(|i| blocks[p.start().advance(i, m).0].clone()).collect();
    let spread = Spread { start: p.start(), chairs: m, distinguished: &distinguished, queue: &queue };

    let mut gaps: Vec<usize> = Vec::with_capacity(k.saturating_sub(1));
    for (i, &player) in lost.iter().enumerate().take(k - 1) {
        let available = queue.len() - gaps.iter().sum::<usize>();
        let mut chosen = None;
        for g in 0..=available {
            gaps.push(g);
            let trace = simulate_blocks(&spread.arrange(&gaps)?)?;
            let here = spread.origin(i, &gaps);
            let next = spread.origin(i + 1, &gaps);
            let seated_at = trace.final_chair(player).offset_from(here, m);
            gaps.pop();
            if seated_at < next.offset_from(here, m) {
                chosen = Some(g);
                break;
            }
        }
        let Some(g) = chosen else {
            return Err(Error::NoPreimage(format!(
                "ran out of undistinguished blocks while separating link {}",
                i + 1
            )));
        };
        gaps.push(g);
    }

    let s = spread.arrange(&gaps)?;
    let trace = simulate_blocks(&s)?;
    let r = Rejection { player: a, chair: trace.final_chair(z), occupant: z };
    if !trace.is_rejection(&r) {
        return Err(Error::NoPreimage(format!("reconstructed sample {s} does not reject {r:?}")));
    }
    let (image, _) = forward_map_traced(&trace, &r)?;
    if image.sample != *t || image.pattern != *p {
        return Err(Error::NoPreimage(format!(
            "reconstructed sample {s} maps to {} rather than {t}",
            image.sample
        )));
    }
    Ok((s, r))
}

/// Outcome of every structural property on one chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChainProperties {
    pub sets_disjoint: bool,
    pub no_early_sit: bool,
    pub blocks_non_empty: bool,
    pub loss_chair_range: bool,
    pub prefix_no_sit: bool,
    pub next_origin_range: bool,
    pub halts_within_n: bool,
}

impl ChainProperties {
    pub fn all(&self) -> bool {
        self.sets_disjoint
            && self.no_early_sit
            && self.blocks_non_empty
            && self.loss_chair_range
            && self.prefix_no_sit
            && self.next_origin_range
            && self.halts_within_n
    }
}

/// Checks the chain against the structural lemmas. Intervals of the form
/// `[x, x)` occur only for single-block chains and are treated as empty.
pub fn check_chain(trace: &SeatingTrace, chain: &DistinguishedChain) -> ChainProperties {
    let m = trace.chairs();
    let b1 = chain.start;
    let bk = chain.last_origin();
    let k = chain.len();
    let single = k == 1;

    // [b_1, b_k), None when empty
    let head = (!single).then(|| CircularInterval::closed_open(m, b1, bk));
    let tail = CircularInterval::closed(m, bk, chain.z_final);

    let sets_disjoint = match (&head, &tail) {
        (None, _) => true,
        (Some(Ok(h)), Ok(t)) => h.chairs_iter().all(|c| !t.contains(c)),
        _ => false,
    };
    let no_early_sit = match (&head, &tail) {
        (None, _) => true,
        (Some(Ok(h)), Ok(t)) => !sits(trace, Who::Chairs(*h), t),
        _ => false,
    };
    let blocks_non_empty = chain.origins().all(|o| block_members(trace, o).next().is_some());

    let mut loss_chair_range = true;
    let mut prefix_no_sit = true;
    let mut next_origin_range = true;
    for (i, link) in chain.links.iter().enumerate().take(k - 1) {
        let Some(d) = link.loss_chair else {
            loss_chair_range = false;
            continue;
        };
        loss_chair_range &= CircularInterval::closed_open(m, link.origin, bk)
            .map(|iv| iv.contains(d))
            .unwrap_or(false);
        prefix_no_sit &= match (
            CircularInterval::closed(m, b1, d),
            CircularInterval::open_closed(m, d, bk),
        ) {
            (Ok(prefix), Ok(after)) => !sits(trace, Who::Chairs(prefix), &after),
            _ => false,
        };
        let next = chain.links[i + 1].origin;
        next_origin_range &= CircularInterval::open_closed(m, link.origin, bk)
            .map(|iv| iv.contains(next))
            .unwrap_or(false);
    }

    ChainProperties {
        sets_disjoint,
        no_early_sit,
        blocks_non_empty,
        loss_chair_range,
        prefix_no_sit,
        next_origin_range,
        halts_within_n: k <= trace.sample.players(),
    }
}
