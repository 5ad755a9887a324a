//! Split–distribute–merge execution of an until-stability pixel rule.
//!
//! Phase A scans the zones of a [`ZonePlan`] in two waves: every leading
//! sub-band at once, a barrier, then every trailing sub-band. Bands scanned
//! together are at least three rows apart, so their pixel flips cannot
//! interact. A flip re-queues its eight neighbors: inside the band they go
//! back into the worker's own priority queue, into a later band's inbox when
//! that band has not been scanned yet, and otherwise into a shared FIFO
//! merge queue. Each merge queue has at most two owners.
//!
//! Phase B drains the merge queues. Workers pair up in the order they
//! finished; a fused worker takes over both parents' zones and queues and
//! keeps draining, re-queueing neighbors, until a single worker is left and
//! every queue is empty. Flips in phase B happen under row locks covering
//! the pixel's 3x3 block, so each one is re-tested against the current image.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Mutex, MutexGuard};

use thiserror::Error;

use super::sched::{Pool, Task};
use super::zones::{SubBand, ZonePlan};
use crate::grid::{BinaryImage, NeighborhoodPattern, OFFSETS_8};

/// Image shared by all workers of a run.
pub struct SharedGrid {
    width: usize,
    height: usize,
    cells: Vec<AtomicBool>,
}

impl SharedGrid {
    pub fn from_image(img: &BinaryImage) -> Self {
        SharedGrid {
            width: img.width(),
            height: img.height(),
            cells: img.cells().iter().map(|&b| AtomicBool::new(b)).collect(),
        }
    }

    pub fn to_image(&self) -> BinaryImage {
        BinaryImage::from_cells(
            self.width,
            self.height,
            self.cells.iter().map(|c| c.load(Ordering::Relaxed)).collect(),
        )
        .expect("grid dimensions are positive")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn value(&self, idx: usize) -> bool {
        self.cells[idx].load(Ordering::Relaxed)
    }

    #[inline]
    pub fn set(&self, idx: usize, value: bool) {
        self.cells[idx].store(value, Ordering::Relaxed);
    }

    #[inline]
    pub fn get(&self, row: isize, col: isize) -> bool {
        if row < 0 || col < 0 || row as usize >= self.height || col as usize >= self.width {
            return false;
        }
        self.value(row as usize * self.width + col as usize)
    }

    #[inline]
    pub fn pattern(&self, idx: usize) -> NeighborhoodPattern {
        let (r, c) = ((idx / self.width) as isize, (idx % self.width) as isize);
        NeighborhoodPattern::from_reader(r, c, |rr, cc| self.get(rr, cc))
    }
}

/// A single-pixel until-stability rule.
///
/// `eligible` must be monotone: once a pixel stops being eligible it never
/// becomes eligible again. Flipping a pixel makes it ineligible.
pub trait PixelRule: Sync {
    /// Could this pixel ever be acted on?
    fn eligible(&self, grid: &SharedGrid, idx: usize) -> bool;
    /// Should this pixel be acted on now? Implies `eligible`.
    fn characterize(&self, grid: &SharedGrid, idx: usize) -> bool;
    fn act(&self, grid: &SharedGrid, idx: usize);
    /// Scan order inside a band, lowest first; ties in raster order.
    fn priority(&self, _idx: usize) -> u64 {
        0
    }
    /// Round limit per band scan and per drain.
    fn max_rounds(&self) -> Option<usize> {
        None
    }
}

pub type WorkerId = usize;

/// FIFO of pixels to recheck, shared by at most two workers.
#[derive(Debug, Clone, Default)]
pub struct MergeQueue {
    pub entries: VecDeque<usize>,
    pub owners: Vec<WorkerId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Wave { wave: u8, zone: usize },
    Drain { worker: WorkerId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    QueueCreated {
        queue: usize,
        owner: WorkerId,
    },
    OwnerJoined {
        queue: usize,
        owner: WorkerId,
    },
    Inserted {
        queue: usize,
        pixel: usize,
    },
    Removed {
        queue: usize,
        pixel: usize,
    },
    Fused {
        left: WorkerId,
        right: WorkerId,
        child: WorkerId,
    },
    Flipped {
        pixel: usize,
        stage: Stage,
    },
    Finished {
        worker: WorkerId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolViolation {
    #[error("queue {queue} would have {owners} owners")]
    TooManyOwners { queue: usize, owners: usize },
    #[error("pixel {pixel} inserted twice (queue {queue})")]
    DuplicateEntry { queue: usize, pixel: usize },
    #[error("pixel {pixel} removed from queue {queue} without being in it")]
    PhantomRemoval { queue: usize, pixel: usize },
    #[error("event refers to unknown queue {0}")]
    UnknownQueue(usize),
    #[error("wave {wave}: zones {a} and {b} flipped pixels {distance} rows apart")]
    WaveConflict {
        wave: u8,
        a: usize,
        b: usize,
        distance: usize,
    },
    #[error("run did not terminate cleanly: {0} entries left queued")]
    NotTerminated(usize),
}

/// Ordered log of one [`merge_run`].
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TraceSummary {
    pub queues: usize,
    pub max_owners: usize,
    pub insertions: usize,
    pub fusions: usize,
    pub flips: usize,
}

impl Trace {
    /// Replays the log and checks the queue discipline, wave separation and
    /// clean termination. `width` is the image width (pixels are indices).
    pub fn check(&self, width: usize) -> Result<TraceSummary, ProtocolViolation> {
        let mut owners: Vec<HashSet<WorkerId>> = Vec::new();
        let mut members: Vec<HashSet<usize>> = Vec::new();
        let mut pending: HashSet<usize> = HashSet::new();
        let mut wave_rows: HashMap<u8, Vec<(usize, usize)>> = HashMap::new();
        let mut summary = TraceSummary::default();
        let mut finished = false;

        for event in &self.events {
            match *event {
                TraceEvent::QueueCreated { queue, owner } => {
                    if queue != owners.len() {
                        return Err(ProtocolViolation::UnknownQueue(queue));
                    }
                    owners.push(HashSet::from([owner]));
                    members.push(HashSet::new());
                    summary.queues += 1;
                    summary.max_owners = summary.max_owners.max(1);
                }
                TraceEvent::OwnerJoined { queue, owner } => {
                    let set = owners.get_mut(queue).ok_or(ProtocolViolation::UnknownQueue(queue))?;
                    set.insert(owner);
                    if set.len() > 2 {
                        return Err(ProtocolViolation::TooManyOwners {
                            queue,
                            owners: set.len(),
                        });
                    }
                    summary.max_owners = summary.max_owners.max(set.len());
                }
                TraceEvent::Inserted { queue, pixel } => {
                    let set = members.get_mut(queue).ok_or(ProtocolViolation::UnknownQueue(queue))?;
                    if !set.insert(pixel) || !pending.insert(pixel) {
                        return Err(ProtocolViolation::DuplicateEntry { queue, pixel });
                    }
                    summary.insertions += 1;
                }
                TraceEvent::Removed { queue, pixel } => {
                    let set = members.get_mut(queue).ok_or(ProtocolViolation::UnknownQueue(queue))?;
                    if !set.remove(&pixel) {
                        return Err(ProtocolViolation::PhantomRemoval { queue, pixel });
                    }
                    pending.remove(&pixel);
                }
                TraceEvent::Fused { left, right, child } => {
                    for (queue, set) in owners.iter_mut().enumerate() {
                        let had = set.remove(&left) | set.remove(&right);
                        if had {
                            set.insert(child);
                        }
                        if set.len() > 2 {
                            return Err(ProtocolViolation::TooManyOwners {
                                queue,
                                owners: set.len(),
                            });
                        }
                    }
                    summary.fusions += 1;
                }
                TraceEvent::Flipped { pixel, stage } => {
                    summary.flips += 1;
                    if let Stage::Wave { wave, zone } = stage {
                        wave_rows.entry(wave).or_default().push((pixel / width.max(1), zone));
                    }
                }
                TraceEvent::Finished { .. } => finished = true,
            }
        }

        for (wave, mut rows) in wave_rows {
            rows.sort_unstable();
            rows.dedup();
            for (i, &(row_a, zone_a)) in rows.iter().enumerate() {
                for &(row_b, zone_b) in &rows[i + 1..] {
                    if row_b - row_a > 2 {
                        break;
                    }
                    if zone_a != zone_b {
                        return Err(ProtocolViolation::WaveConflict {
                            wave,
                            a: zone_a,
                            b: zone_b,
                            distance: row_b - row_a,
                        });
                    }
                }
            }
        }

        let left: usize = members.iter().map(HashSet::len).sum();
        if !finished || left > 0 {
            return Err(ProtocolViolation::NotTerminated(left));
        }
        Ok(summary)
    }
}

/// Outcome of a [`merge_run`].
#[derive(Debug, Clone, Default)]
pub struct MergeReport {
    pub zones: usize,
    /// Zones in the order their phase A scans finished.
    pub completion_order: Vec<usize>,
    pub queues_created: usize,
    pub fusions: usize,
    pub trace: Option<Trace>,
}

struct Registry {
    queues: Vec<MergeQueue>,
    fusions: usize,
    trace: Option<Vec<TraceEvent>>,
}

impl Registry {
    fn record(&mut self, event: TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(event);
        }
    }

    /// Queue a worker pushes into: its current one while it still owns it,
    /// otherwise the lowest-index queue with a single owner, otherwise a new
    /// queue.
    fn queue_for(&mut self, me: WorkerId, current: &mut Option<usize>) -> usize {
        if let Some(q) = *current {
            if self.queues[q].owners.contains(&me) {
                return q;
            }
        }
        let q = match self.queues.iter().position(|q| q.owners.len() == 1) {
            Some(q) => {
                if !self.queues[q].owners.contains(&me) {
                    self.queues[q].owners.push(me);
                    assert!(self.queues[q].owners.len() <= 2, "merge queue {q} has three owners");
                    self.record(TraceEvent::OwnerJoined { queue: q, owner: me });
                }
                q
            }
            None => {
                let q = self.queues.len();
                self.queues.push(MergeQueue {
                    entries: VecDeque::new(),
                    owners: vec![me],
                });
                self.record(TraceEvent::QueueCreated { queue: q, owner: me });
                q
            }
        };
        *current = Some(q);
        q
    }

    fn push(&mut self, me: WorkerId, current: &mut Option<usize>, pixel: usize) {
        let q = self.queue_for(me, current);
        debug_assert!(!self.queues[q].entries.contains(&pixel), "duplicate merge queue entry");
        self.queues[q].entries.push_back(pixel);
        self.record(TraceEvent::Inserted { queue: q, pixel });
    }

    fn pop_owned(&mut self, me: WorkerId) -> Option<usize> {
        let q = self
            .queues
            .iter()
            .position(|q| !q.entries.is_empty() && q.owners.contains(&me))?;
        let pixel = self.queues[q].entries.pop_front()?;
        self.record(TraceEvent::Removed { queue: q, pixel });
        Some(pixel)
    }

    fn owned_len(&self, me: WorkerId) -> usize {
        self.queues
            .iter()
            .filter(|q| q.owners.contains(&me))
            .map(|q| q.entries.len())
            .sum()
    }

    fn discard_owned(&mut self, me: WorkerId) -> Vec<usize> {
        let mut dropped = Vec::new();
        for q in 0..self.queues.len() {
            if !self.queues[q].owners.contains(&me) {
                continue;
            }
            while let Some(pixel) = self.queues[q].entries.pop_front() {
                dropped.push(pixel);
                self.record(TraceEvent::Removed { queue: q, pixel });
            }
        }
        dropped
    }

    /// Replaces both parents by `child` in every owner list.
    fn fuse(&mut self, left: WorkerId, right: WorkerId, child: WorkerId) {
        for q in &mut self.queues {
            let before = q.owners.len();
            q.owners.retain(|&o| o != left && o != right);
            if q.owners.len() != before {
                q.owners.push(child);
            }
            assert!(q.owners.len() <= 2, "fusion left a queue with three owners");
        }
        self.fusions += 1;
        self.record(TraceEvent::Fused { left, right, child });
    }
}

struct LogicalWorker {
    id: WorkerId,
    current: Option<usize>,
    rounds: usize,
}

struct Slot {
    waiting: Option<LogicalWorker>,
    live: usize,
    next_id: WorkerId,
}

#[derive(Default)]
struct ZoneState {
    current: Option<usize>,
    flips: Vec<TraceEvent>,
}

struct Run<'a, R> {
    grid: &'a SharedGrid,
    rule: &'a R,
    plan: &'a ZonePlan,
    pending: Vec<AtomicBool>,
    registry: Mutex<Registry>,
    inboxes: Vec<Mutex<Vec<usize>>>,
    row_locks: Vec<Mutex<()>>,
    completion: Mutex<Vec<usize>>,
    slot: Mutex<Slot>,
}

impl<R: PixelRule> Run<'_, R> {
    #[inline]
    fn claim(&self, idx: usize) -> bool {
        !self.pending[idx].swap(true, Ordering::AcqRel)
    }

    #[inline]
    fn release(&self, idx: usize) {
        self.pending[idx].store(false, Ordering::Release);
    }

    fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let w = self.grid.width;
        let h = self.grid.height;
        let (r, c) = ((idx / w) as isize, (idx % w) as isize);
        OFFSETS_8.iter().filter_map(move |&(dr, dc)| {
            let (nr, nc) = (r + dr, c + dc);
            (nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w).then(|| nr as usize * w + nc as usize)
        })
    }

    fn registry(&self) -> MutexGuard<'_, Registry> {
        self.registry.lock().expect("registry poisoned")
    }

    fn tracing(&self) -> bool {
        self.registry().trace.is_some()
    }

    fn scan_band(&self, zone: usize, wave: u8, rows: Range<usize>, state: &mut ZoneState) {
        let w = self.grid.width;
        let tracing = self.tracing();
        let mut heap = BinaryHeap::new();
        for idx in rows.start * w..rows.end * w {
            if self.rule.characterize(self.grid, idx) && self.claim(idx) {
                heap.push(Reverse((self.rule.priority(idx), idx)));
            }
        }
        // Inboxes hold trailing-band pixels handed over during wave 0.
        if wave == 1 {
            let inbox = std::mem::take(&mut *self.inboxes[zone].lock().expect("inbox poisoned"));
            for idx in inbox {
                heap.push(Reverse((self.rule.priority(idx), idx)));
            }
        }

        let mut rounds = 0;
        let mut flipped = Vec::new();
        while !heap.is_empty() && self.rule.max_rounds().is_none_or(|m| rounds < m) {
            while let Some(Reverse((_, idx))) = heap.pop() {
                self.release(idx);
                if self.rule.characterize(self.grid, idx) {
                    self.rule.act(self.grid, idx);
                    flipped.push(idx);
                    if tracing {
                        state.flips.push(TraceEvent::Flipped {
                            pixel: idx,
                            stage: Stage::Wave { wave, zone },
                        });
                    }
                }
            }
            for idx in flipped.drain(..) {
                for nb in self.neighbors(idx) {
                    if !self.rule.eligible(self.grid, nb) || !self.claim(nb) {
                        continue;
                    }
                    let row = nb / w;
                    if rows.contains(&row) {
                        heap.push(Reverse((self.rule.priority(nb), nb)));
                    } else if wave == 0 && self.plan.band_of(row).1 == SubBand::Trailing {
                        let owner = self.plan.zone_of(row);
                        self.inboxes[owner].lock().expect("inbox poisoned").push(nb);
                    } else {
                        self.registry().push(zone, &mut state.current, nb);
                    }
                }
            }
            rounds += 1;
        }
        for Reverse((_, idx)) in heap {
            self.release(idx);
        }
    }

    /// Locks the rows of the 3x3 block around `row`, in ascending order.
    fn lock_rows(&self, row: usize) -> Vec<MutexGuard<'_, ()>> {
        let lo = row.saturating_sub(1);
        let hi = (row + 1).min(self.grid.height - 1);
        (lo..=hi)
            .map(|r| self.row_locks[r].lock().expect("row lock poisoned"))
            .collect()
    }

    fn drain(&self, worker: &mut LogicalWorker) {
        let w = self.grid.width;
        loop {
            let batch = self.registry().owned_len(worker.id);
            if batch == 0 {
                return;
            }
            if self.rule.max_rounds().is_some_and(|m| worker.rounds >= m) {
                let dropped = self.registry().discard_owned(worker.id);
                for idx in dropped {
                    self.release(idx);
                }
                return;
            }
            for _ in 0..batch {
                let Some(idx) = self.registry().pop_owned(worker.id) else {
                    break;
                };
                self.release(idx);
                let acted = {
                    let _rows = self.lock_rows(idx / w);
                    let hit = self.rule.characterize(self.grid, idx);
                    if hit {
                        self.rule.act(self.grid, idx);
                    }
                    hit
                };
                if !acted {
                    continue;
                }
                let mut reg = self.registry();
                reg.record(TraceEvent::Flipped {
                    pixel: idx,
                    stage: Stage::Drain { worker: worker.id },
                });
                for nb in self.neighbors(idx) {
                    if self.rule.eligible(self.grid, nb) && self.claim(nb) {
                        reg.push(worker.id, &mut worker.current, nb);
                    }
                }
            }
            worker.rounds += 1;
        }
    }

    fn fuse(&self, slot: &mut Slot, a: LogicalWorker, b: LogicalWorker) -> LogicalWorker {
        let child = slot.next_id;
        slot.next_id += 1;
        self.registry().fuse(a.id, b.id, child);
        LogicalWorker {
            id: child,
            current: None,
            rounds: a.rounds.max(b.rounds),
        }
    }

    /// Called when `worker` has nothing left to drain. Returns the worker to
    /// continue as, or `None` when this thread is done.
    fn finish(&self, worker: LogicalWorker) -> Option<LogicalWorker> {
        let mut slot = self.slot.lock().expect("slot poisoned");
        if slot.live == 1 {
            if self.registry().owned_len(worker.id) > 0 {
                return Some(worker);
            }
            self.registry().record(TraceEvent::Finished { worker: worker.id });
            return None;
        }
        match slot.waiting.take() {
            Some(other) => {
                let fused = self.fuse(&mut slot, other, worker);
                slot.live -= 1;
                Some(fused)
            }
            None => {
                slot.waiting = Some(worker);
                None
            }
        }
    }

    fn run_logical(&self, mut worker: LogicalWorker) {
        loop {
            self.drain(&mut worker);
            match self.finish(worker) {
                Some(next) => worker = next,
                None => return,
            }
        }
    }
}

/// Runs `rule` to stability over `grid` with one worker per zone of `plan`.
pub fn merge_run<R: PixelRule>(
    pool: &Pool,
    plan: &ZonePlan,
    grid: &SharedGrid,
    rule: &R,
    tracing: bool,
) -> MergeReport {
    assert_eq!(plan.height, grid.height(), "zone plan does not match the image");
    let k = plan.len();
    let run = Run {
        grid,
        rule,
        plan,
        pending: (0..grid.width() * grid.height())
            .map(|_| AtomicBool::new(false))
            .collect(),
        registry: Mutex::new(Registry {
            queues: Vec::new(),
            fusions: 0,
            trace: tracing.then(Vec::new),
        }),
        inboxes: (0..k).map(|_| Mutex::new(Vec::new())).collect(),
        row_locks: (0..grid.height()).map(|_| Mutex::new(())).collect(),
        completion: Mutex::new(Vec::with_capacity(k)),
        slot: Mutex::new(Slot {
            waiting: None,
            live: 0,
            next_id: k,
        }),
    };

    let mut states: Vec<ZoneState> = (0..k).map(|_| ZoneState::default()).collect();
    for (wave, band) in [(0u8, SubBand::Leading), (1u8, SubBand::Trailing)] {
        let run = &run;
        let tasks: Vec<Task<'_>> = states
            .iter_mut()
            .enumerate()
            .map(|(zone, state)| -> Task<'_> {
                Box::new(move || {
                    run.scan_band(zone, wave, plan.band(zone, band), state);
                    if wave == 1 {
                        run.completion.lock().expect("completion poisoned").push(zone);
                    }
                })
            })
            .collect();
        pool.execute(tasks);
        let mut reg = run.registry();
        for state in &mut states {
            for event in state.flips.drain(..) {
                reg.record(event);
            }
        }
    }

    let order = run.completion.lock().expect("completion poisoned").clone();
    let mut roots = Vec::new();
    {
        let mut slot = run.slot.lock().expect("slot poisoned");
        let mut it = order.iter().map(|&zone| LogicalWorker {
            id: zone,
            current: states[zone].current,
            rounds: 0,
        });
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => roots.push(run.fuse(&mut slot, a, b)),
                None => slot.waiting = Some(a),
            }
        }
        slot.live = roots.len() + usize::from(slot.waiting.is_some());
    }
    if roots.is_empty() {
        // Single zone: it drains alone.
        let worker = run.slot.lock().expect("slot poisoned").waiting.take();
        if let Some(worker) = worker {
            run.run_logical(worker);
        }
    } else {
        let run = &run;
        let tasks: Vec<Task<'_>> = roots
            .into_iter()
            .map(|w| -> Task<'_> { Box::new(move || run.run_logical(w)) })
            .collect();
        pool.execute(tasks);
    }

    let reg = run.registry.into_inner().expect("registry poisoned");
    debug_assert!(reg.queues.iter().all(|q| q.entries.is_empty()));
    MergeReport {
        zones: k,
        completion_order: order,
        queues_created: reg.queues.len(),
        fusions: reg.fusions,
        trace: reg.trace.map(|events| Trace { events }),
    }
}
