use std::sync::Mutex;

use super::merge::{merge_run, MergeReport, PixelRule, SharedGrid};
use super::sched::Pool;
use super::zones::split;
use crate::edt::{meijster_with, SquaredDistanceMap, Target};
use crate::error::{Error, Result};
use crate::grid::{is_simple_pattern, BinaryImage, ConnectivityPair};
use crate::homotopy::engine::{run_sequential, StabilityProblem};
use crate::homotopy::{hasf_with, Engine, Polarity, SmoothingParams};

/// Simple-point deletion (or addition) as a [`PixelRule`].
pub struct StabilityRule<'a> {
    pub polarity: Polarity,
    pub frozen: &'a [bool],
    pub priority: &'a SquaredDistanceMap,
    pub conn: ConnectivityPair,
    pub max_iter: Option<usize>,
}

impl PixelRule for StabilityRule<'_> {
    #[inline]
    fn eligible(&self, grid: &SharedGrid, idx: usize) -> bool {
        grid.value(idx) == self.polarity.object_value() && !self.frozen[idx]
    }

    #[inline]
    fn characterize(&self, grid: &SharedGrid, idx: usize) -> bool {
        self.eligible(grid, idx) && is_simple_pattern(grid.pattern(idx), self.conn)
    }

    #[inline]
    fn act(&self, grid: &SharedGrid, idx: usize) {
        grid.set(idx, !self.polarity.object_value());
    }

    fn priority(&self, idx: usize) -> u64 {
        self.priority.values()[idx]
    }

    fn max_rounds(&self) -> Option<usize> {
        self.max_iter
    }
}

/// Engine that runs distance maps and stability loops on a worker pool.
///
/// With one worker, or an image too short for two zones, it runs the
/// sequential loops and gives bit-identical results.
#[derive(Debug)]
pub struct ParallelEngine {
    pool: Pool,
    tracing: bool,
    reports: Mutex<Vec<MergeReport>>,
}

impl ParallelEngine {
    pub fn new(workers: usize) -> Self {
        ParallelEngine {
            pool: Pool::new(workers),
            tracing: false,
            reports: Mutex::new(Vec::new()),
        }
    }

    /// Keep a [`MergeReport`] with a full event trace for every parallel loop.
    pub fn with_tracing(mut self) -> Self {
        self.tracing = true;
        self
    }

    pub fn workers(&self) -> usize {
        self.pool.workers()
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    pub fn take_reports(&self) -> Vec<MergeReport> {
        std::mem::take(&mut *self.reports.lock().expect("reports poisoned"))
    }

    fn stabilize(
        &self,
        img: &BinaryImage,
        frozen: &[bool],
        priority: &SquaredDistanceMap,
        conn: ConnectivityPair,
        polarity: Polarity,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        let plan = split(img.height(), self.pool.workers());
        if self.pool.workers() <= 1 || plan.len() <= 1 {
            let mut out = img.clone();
            run_sequential(
                &mut out,
                &StabilityProblem {
                    polarity,
                    frozen,
                    priority,
                    conn,
                    max_iter,
                },
            );
            return out;
        }
        let grid = SharedGrid::from_image(img);
        let rule = StabilityRule {
            polarity,
            frozen,
            priority,
            conn,
            max_iter,
        };
        let report = merge_run(&self.pool, &plan, &grid, &rule, self.tracing);
        if self.tracing {
            self.reports.lock().expect("reports poisoned").push(report);
        }
        grid.to_image()
    }
}

impl Engine for ParallelEngine {
    fn distance_map(&self, img: &BinaryImage, target: Target) -> SquaredDistanceMap {
        meijster_with(&self.pool, img, target)
    }

    fn thin(
        &self,
        z: &BinaryImage,
        w: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        self.stabilize(z, w.cells(), dmap, conn, Polarity::Remove, max_iter)
    }

    fn thicken(
        &self,
        y: &BinaryImage,
        v: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        let outside = v.complement();
        self.stabilize(y, outside.cells(), dmap, conn, Polarity::Add, max_iter)
    }
}

fn check_map(img: &BinaryImage, dmap: &SquaredDistanceMap) -> Result<()> {
    if (img.width(), img.height()) != (dmap.width(), dmap.height()) {
        return Err(Error::DimensionMismatch(
            img.width(),
            img.height(),
            dmap.width(),
            dmap.height(),
        ));
    }
    Ok(())
}

/// Parallel constrained thinning. Same contract as [`crate::homotopy::thin`].
pub fn parallel_thin(
    z: &BinaryImage,
    w: &BinaryImage,
    dmap: &SquaredDistanceMap,
    conn: ConnectivityPair,
    workers: usize,
    max_iter: Option<usize>,
) -> Result<BinaryImage> {
    check_map(z, dmap)?;
    if !w.is_subset_of(z)? {
        return Err(Error::Constraint("thinning constraint W must be a subset of Z"));
    }
    Ok(ParallelEngine::new(workers).thin(z, w, dmap, conn, max_iter))
}

/// Parallel homotopic thickening. Same contract as [`crate::homotopy::thicken`].
pub fn parallel_thicken(
    y: &BinaryImage,
    v: &BinaryImage,
    conn: ConnectivityPair,
    workers: usize,
    max_iter: Option<usize>,
) -> Result<BinaryImage> {
    if !y.is_subset_of(v)? {
        return Err(Error::Constraint("thickening input Y must be a subset of V"));
    }
    let engine = ParallelEngine::new(workers);
    let dmap = engine.distance_map(y, Target::Foreground);
    Ok(engine.thicken(y, v, &dmap, conn, max_iter))
}

/// [`crate::homotopy::hasf`] on `params.workers` workers.
pub fn parallel_smooth(x: &BinaryImage, params: &SmoothingParams) -> Result<BinaryImage> {
    if params.workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    hasf_with(&ParallelEngine::new(params.workers), x, params)
}
