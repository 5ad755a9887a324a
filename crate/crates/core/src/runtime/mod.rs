//! Parallel runtime: a fixed worker pool, the zone split of an image, the
//! merge protocol that stitches zone results together, and an [`Engine`]
//! built on them.
//!
//! [`Engine`]: crate::homotopy::Engine

mod merge;
mod parallel;
mod sched;
mod zones;

pub use merge::{
    merge_run, MergeQueue, MergeReport, PixelRule, ProtocolViolation, SharedGrid, Stage, Trace, TraceEvent,
    TraceSummary, WorkerId,
};
pub use parallel::{parallel_smooth, parallel_thicken, parallel_thin, ParallelEngine, StabilityRule};
pub use sched::{distribute, partition, Assignment, ExecutionReport, Pool, Task, TaskSet, TaskState};
pub use zones::{split, SubBand, Zone, ZonePlan, MIN_ZONE_ROWS};
