use std::sync::Mutex;
use std::time::{Duration, Instant};

use hasf::edt::{SquaredDistanceMap, Target};
use hasf::grid::{BinaryImage, ConnectivityPair};
use hasf::homotopy::Engine;

#[derive(Debug, Default, Clone, Copy)]
pub struct StageTimes {
    pub distance: Duration,
    pub thinning: Duration,
    pub thickening: Duration,
    pub distance_calls: usize,
    pub thin_calls: usize,
    pub thicken_calls: usize,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.distance + self.thinning + self.thickening
    }
}

/// Wraps an engine and accumulates wall time per kind of stage.
pub struct TimedEngine<E> {
    inner: E,
    times: Mutex<StageTimes>,
}

impl<E: Engine> TimedEngine<E> {
    pub fn new(inner: E) -> Self {
        TimedEngine {
            inner,
            times: Mutex::new(StageTimes::default()),
        }
    }

    pub fn times(&self) -> StageTimes {
        *self.times.lock().unwrap()
    }

    fn timed<T>(&self, f: impl FnOnce() -> T, add: impl FnOnce(&mut StageTimes, Duration)) -> T {
        let start = Instant::now();
        let out = f();
        add(&mut self.times.lock().unwrap(), start.elapsed());
        out
    }
}

impl<E: Engine> Engine for TimedEngine<E> {
    fn distance_map(&self, img: &BinaryImage, target: Target) -> SquaredDistanceMap {
        self.timed(
            || self.inner.distance_map(img, target),
            |t, d| {
                t.distance += d;
                t.distance_calls += 1;
            },
        )
    }

    fn thin(
        &self,
        z: &BinaryImage,
        w: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        self.timed(
            || self.inner.thin(z, w, dmap, conn, max_iter),
            |t, d| {
                t.thinning += d;
                t.thin_calls += 1;
            },
        )
    }

    fn thicken(
        &self,
        y: &BinaryImage,
        v: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        self.timed(
            || self.inner.thicken(y, v, dmap, conn, max_iter),
            |t, d| {
                t.thickening += d;
                t.thicken_calls += 1;
            },
        )
    }
}

/// Minimum wall time of `repetitions` runs of `f`, with the last result.
pub fn min_time<T>(repetitions: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut last = None;
    for _ in 0..repetitions.max(1) {
        let start = Instant::now();
        let out = f();
        best = best.min(start.elapsed());
        last = Some(out);
    }
    (best, last.expect("at least one repetition"))
}
