//! Balanced non-preemptive distribution of tasks over a fixed worker pool.

use std::ops::Range;
use std::sync::atomic::{AtomicU8, Ordering};

/// A unit of work. Runs once, to completion, on one worker.
pub type Task<'a> = Box<dyn FnOnce() + Send + 'a>;

/// Splits `0..len` into at most `parts` contiguous non-empty ranges whose
/// sizes differ by at most one.
pub fn partition(len: usize, parts: usize) -> Vec<Range<usize>> {
    let parts = parts.max(1).min(len);
    if parts == 0 {
        return Vec::new();
    }
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for k in 0..parts {
        let size = base + usize::from(k < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}

/// Which tasks each worker runs, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub per_worker: Vec<Vec<usize>>,
}

impl Assignment {
    pub fn max_load(&self) -> usize {
        self.per_worker.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn idle_workers(&self) -> usize {
        self.per_worker.iter().filter(|t| t.is_empty()).count()
    }

    pub fn task_count(&self) -> usize {
        self.per_worker.iter().map(Vec::len).sum()
    }
}

/// Assigns `task_count` tasks, in order, to `workers` workers.
///
/// Every task lands on exactly one worker and no worker gets more than
/// ⌈tasks / workers⌉. With fewer tasks than workers each task gets its own
/// worker and the rest stay idle. The plan only depends on the two counts.
pub fn distribute(task_count: usize, workers: usize) -> Assignment {
    let workers = workers.max(1);
    let mut per_worker: Vec<Vec<usize>> = partition(task_count, workers)
        .into_iter()
        .map(|r| r.collect())
        .collect();
    per_worker.resize(workers, Vec::new());
    Assignment { per_worker }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum TaskState {
    Pending = 0,
    Running = 1,
    Done = 2,
}

/// Lifecycle tracker: a task moves pending → running → done exactly once.
#[derive(Debug)]
pub struct TaskSet {
    states: Vec<AtomicU8>,
}

impl TaskSet {
    pub fn new(len: usize) -> Self {
        TaskSet {
            states: (0..len).map(|_| AtomicU8::new(TaskState::Pending as u8)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn transition(&self, task: usize, from: TaskState, to: TaskState) {
        let swapped = self.states[task]
            .compare_exchange(from as u8, to as u8, Ordering::AcqRel, Ordering::Acquire)
            .is_ok();
        assert!(swapped, "task {task} is not {from:?}");
    }

    pub fn start(&self, task: usize) {
        self.transition(task, TaskState::Pending, TaskState::Running);
    }

    pub fn finish(&self, task: usize) {
        self.transition(task, TaskState::Running, TaskState::Done);
    }

    pub fn state(&self, task: usize) -> TaskState {
        match self.states[task].load(Ordering::Acquire) {
            0 => TaskState::Pending,
            1 => TaskState::Running,
            _ => TaskState::Done,
        }
    }

    pub fn all_done(&self) -> bool {
        (0..self.len()).all(|t| self.state(t) == TaskState::Done)
    }
}

/// What a call to [`Pool::execute`] did.
#[derive(Debug, Clone)]
pub struct ExecutionReport {
    pub assignment: Assignment,
}

/// Fixed-size worker pool. Each [`Pool::execute`] call is one wave: tasks are
/// distributed up front, every worker runs its share in order without
/// preemption or stealing, and the call returns once all of them are done.
pub struct Pool {
    workers: usize,
    threads: Option<rayon::ThreadPool>,
}

impl std::fmt::Debug for Pool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pool").field("workers", &self.workers).finish()
    }
}

impl Pool {
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        let threads = (workers > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .thread_name(|i| format!("hasf-worker-{i}"))
                .build()
                .expect("failed to start worker threads")
        });
        Pool { workers, threads }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs every task once and waits for all of them.
    pub fn execute<'a>(&self, tasks: Vec<Task<'a>>) -> ExecutionReport {
        let assignment = distribute(tasks.len(), self.workers);
        let set = TaskSet::new(tasks.len());
        let mut slots: Vec<Option<Task<'a>>> = tasks.into_iter().map(Some).collect();
        let shares: Vec<Vec<(usize, Task<'a>)>> = assignment
            .per_worker
            .iter()
            .map(|ids| {
                ids.iter()
                    .map(|&i| (i, slots[i].take().expect("task assigned twice")))
                    .collect()
            })
            .collect();

        let run_share = |share: Vec<(usize, Task<'a>)>, set: &TaskSet| {
            for (id, task) in share {
                set.start(id);
                task();
                set.finish(id);
            }
        };

        match &self.threads {
            None => {
                for share in shares {
                    run_share(share, &set);
                }
            }
            Some(threads) => {
                let set = &set;
                threads.scope(|s| {
                    for share in shares.into_iter().filter(|s| !s.is_empty()) {
                        s.spawn(move |_| run_share(share, set));
                    }
                });
            }
        }
        assert!(set.all_done(), "a task did not run to completion");
        ExecutionReport { assignment }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicUsize;

    #[test]
    fn distribute_examples() {
        let a = distribute(0, 4);
        assert_eq!(a.task_count(), 0);
        assert_eq!(a.per_worker.len(), 4);

        let a = distribute(10, 4);
        assert_eq!(a.max_load(), 3);
        assert_eq!(a.task_count(), 10);

        let a = distribute(3, 8);
        assert_eq!(a.max_load(), 1);
        assert_eq!(a.idle_workers(), 5);
    }

    #[test]
    fn partition_is_contiguous_and_balanced() {
        let p = partition(10, 4);
        assert_eq!(p, vec![0..3, 3..6, 6..8, 8..10]);
        assert!(partition(0, 3).is_empty());
        assert_eq!(partition(2, 5), vec![0..1, 1..2]);
    }

    #[test]
    fn every_task_runs_once() {
        for workers in [1, 3, 8] {
            let pool = Pool::new(workers);
            let hits: Vec<AtomicUsize> = (0..17).map(|_| AtomicUsize::new(0)).collect();
            let tasks: Vec<Task<'_>> = hits
                .iter()
                .map(|h| -> Task<'_> {
                    Box::new(move || {
                        h.fetch_add(1, Ordering::Relaxed);
                    })
                })
                .collect();
            let report = pool.execute(tasks);
            assert!(report.assignment.max_load() <= 17usize.div_ceil(workers));
            assert!(hits.iter().all(|h| h.load(Ordering::Relaxed) == 1));
        }
    }

    #[test]
    #[should_panic(expected = "is not Pending")]
    fn restarting_a_task_is_rejected() {
        let set = TaskSet::new(1);
        set.start(0);
        set.finish(0);
        set.start(0);
    }
}
