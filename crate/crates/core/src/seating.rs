//! The two versions of the seating process.
//!
//! In the sequential version players arrive one at a time in rank order and
//! walk clockwise to the first vacant chair. In the block version every
//! player arrives first; the blocks then travel clockwise in lockstep and
//! each block leaves its highest-ranked remaining member at every vacant
//! chair it reaches.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ChairId, PlayerId, Rejection, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Sequential,
    Blocks,
}

/// One block member seated at one vacant chair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LossEvent {
    pub block_origin: ChairId,
    pub chair: ChairId,
    pub player: PlayerId,
    /// Clockwise distance travelled by the block, `(chair - origin) mod m`.
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeatingTrace {
    pub sample: Sample,
    pub process: Process,
    /// Final chair per player.
    pub finals: Vec<ChairId>,
    /// Final occupant per chair.
    pub occupants: Vec<Option<PlayerId>>,
    pub losses: Vec<LossEvent>,
    pub rejections: Vec<Rejection>,
}

impl SeatingTrace {
    pub fn final_chair(&self, p: PlayerId) -> ChairId {
        self.finals[p.0]
    }

    pub fn occupant(&self, c: ChairId) -> Option<PlayerId> {
        self.occupants[c.0]
    }

    pub fn chairs(&self) -> usize {
        self.sample.chairs()
    }

    /// Occupancy as a bitmap over chairs.
    pub fn occupied(&self) -> Vec<bool> {
        self.occupants.iter().map(Option::is_some).collect()
    }

    /// Loss events of the block starting at `origin`, in step order.
    pub fn block_losses(&self, origin: ChairId) -> impl Iterator<Item = &LossEvent> + '_ {
        self.losses.iter().filter(move |e| e.block_origin == origin)
    }

    pub fn is_rejection(&self, r: &Rejection) -> bool {
        let m = self.chairs();
        let Some(&start) = self.sample.initial_chairs().get(r.player.0) else {
            return false;
        };
        let end = self.finals[r.player.0];
        r.chair.0 < m
            && r.chair.offset_from(start, m) < end.offset_from(start, m)
            && self.occupants[r.chair.0] == Some(r.occupant)
    }
}

fn check_feasible(s: &Sample) -> Result<()> {
    if s.players() > s.chairs() {
        return Err(Error::Infeasible { players: s.players(), chairs: s.chairs() });
    }
    Ok(())
}

/// Players arrive in rank order; each takes the first vacant chair at or
/// after its initial chair.
pub fn simulate_sequential(s: &Sample) -> Result<SeatingTrace> {
    check_feasible(s)?;
    let m = s.chairs();
    let mut occupants: Vec<Option<PlayerId>> = vec![None; m];
    let mut finals = Vec::with_capacity(s.players());
    let mut losses = Vec::with_capacity(s.players());
    let mut rejections = Vec::new();
    for (id, &start) in s.initial_chairs().iter().enumerate() {
        let player = PlayerId(id);
        let mut chair = start;
        let mut step = 0;
        while let Some(occupant) = occupants[chair.0] {
            rejections.push(Rejection { player, chair, occupant });
            chair = chair.advance(1, m);
            step += 1;
            assert!(step < m, "a vacant chair always exists when n <= m");
        }
        occupants[chair.0] = Some(player);
        finals.push(chair);
        losses.push(LossEvent { block_origin: start, chair, player, step });
    }
    Ok(SeatingTrace {
        sample: s.clone(),
        process: Process::Sequential,
        finals,
        occupants,
        losses,
        rejections,
    })
}

/// Lockstep block process. At step `t` the block from chair `c` stands at
/// `c + t`; a non-empty block standing at a vacant chair seats its
/// highest-ranked remaining member there.
pub fn simulate_blocks(s: &Sample) -> Result<SeatingTrace> {
    check_feasible(s)?;
    let m = s.chairs();
    let n = s.players();
    let blocks = s.block_view();
    let mut next = vec![0usize; m];
    let mut occupants: Vec<Option<PlayerId>> = vec![None; m];
    let mut finals = vec![ChairId(0); n];
    let mut losses = Vec::with_capacity(n);
    let mut seated = 0;
    let mut step = 0;
    while seated < n {
        assert!(step < m, "block process must finish within m steps");
        for (origin, block) in blocks.iter().enumerate() {
            if next[origin] == block.len() {
                continue;
            }
            let chair = ChairId(origin).advance(step, m);
            if occupants[chair.0].is_none() {
                let player = block[next[origin]];
                next[origin] += 1;
                occupants[chair.0] = Some(player);
                finals[player.0] = chair;
                losses.push(LossEvent { block_origin: ChairId(origin), chair, player, step });
                seated += 1;
            }
        }
        step += 1;
    }
    let rejections = displacement_rejections(s, &finals, &occupants);
    Ok(SeatingTrace { sample: s.clone(), process: Process::Blocks, finals, occupants, losses, rejections })
}

pub fn simulate(s: &Sample, process: Process) -> Result<SeatingTrace> {
    match process {
        Process::Sequential => simulate_sequential(s),
        Process::Blocks => simulate_blocks(s),
    }
}

/// One rejection per chair in `[initial(p), final(p))`, naming the chair's
/// final occupant.
fn displacement_rejections(
    s: &Sample,
    finals: &[ChairId],
    occupants: &[Option<PlayerId>],
) -> Vec<Rejection> {
    let m = s.chairs();
    let mut out = Vec::new();
    for (id, (&start, &end)) in s.initial_chairs().iter().zip(finals).enumerate() {
        let mut chair = start;
        while chair != end {
            let occupant = occupants[chair.0].expect("chairs passed are occupied");
            out.push(Rejection { player: PlayerId(id), chair, occupant });
            chair = chair.advance(1, m);
        }
    }
    out
}

/// Last member the block at `origin` lost strictly before reaching `limit`:
/// the loss with the largest offset below `(limit - origin) mod m`.
pub fn last_loss_before(
    trace: &SeatingTrace,
    origin: ChairId,
    limit: ChairId,
) -> Option<(ChairId, PlayerId)> {
    let m = trace.chairs();
    let bound = limit.offset_from(origin, m);
    trace
        .block_losses(origin)
        .filter(|e| e.chair.offset_from(origin, m) < bound)
        .max_by_key(|e| e.chair.offset_from(origin, m))
        .map(|e| (e.chair, e.player))
}

/// Counts sequential-process rejections without building a trace. Reuses
/// its occupancy buffer across calls.
#[derive(Debug, Default)]
pub struct RejectionCounter {
    occupied: Vec<bool>,
}

impl RejectionCounter {
    pub fn new(chairs: usize) -> Self {
        RejectionCounter { occupied: vec![false; chairs] }
    }

    /// `initial` must hold at most `m` chairs, each below `m`.
    pub fn count(&mut self, initial: &[u32]) -> u64 {
        let m = self.occupied.len();
        assert!(initial.len() <= m, "cannot seat more players than chairs");
        self.occupied.iter_mut().for_each(|o| *o = false);
        let mut total = 0u64;
        for &start in initial {
            let mut chair = start as usize;
            while self.occupied[chair] {
                total += 1;
                chair += 1;
                if chair == m {
                    chair = 0;
                }
            }
            self.occupied[chair] = true;
        }
        total
    }
}
