//! Acceptance suite. Prints one PASS, FAIL or SKIP line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use hasf::edt::{edt_brute, meijster, Target};
use hasf::grid::{is_simple, is_simple_pattern, BinaryImage, ConnectivityPair, NeighborhoodPattern, Point};
use hasf::homotopy::{hasf_with, Sequential, SmoothingParams};
use hasf::netpbm;
use hasf::runtime::{distribute, parallel_smooth, MergeReport, ParallelEngine, Pool, Task};
use hasf::verify::{AuditedEngine, StageAudit};
use hasf_oracles::{brute_simple_pattern, crenellated, random_image, random_shapes, recount_simple, rng, signature};
use rand::Rng;

const PAIRS: [ConnectivityPair; 2] = [ConnectivityPair::Fg8Bg4, ConnectivityPair::Fg4Bg8];
const TARGETS: [Target; 2] = [Target::Foreground, Target::Background];

/// Criteria 4, 5 and 8 share one batch of smoothing runs.
const RADII: [u32; 4] = [1, 2, 3, 5];
const SMOOTH_IMAGES: usize = 200;
const SMOOTH_WORKERS: [usize; 3] = [1, 4, 8];

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

fn outcome(check: Check) -> Outcome {
    match check {
        Ok(detail) => Outcome::Pass(detail),
        Err(detail) => Outcome::Fail(detail),
    }
}

/// Either a few shapes with noise or independent pixels at a random density.
fn any_image(rng: &mut impl Rng, max_side: usize) -> BinaryImage {
    let w = rng.gen_range(1..=max_side);
    let h = rng.gen_range(1..=max_side);
    if rng.gen_bool(0.5) && w >= 4 && h >= 4 {
        random_shapes(rng, w, h)
    } else {
        let density = match rng.gen_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        };
        random_image(rng, w, h, density)
    }
}

fn edt_exactness() -> Check {
    let mut rng = rng(0xA1);
    let mut pixels = 0usize;
    for i in 0..500 {
        let img = any_image(&mut rng, 128);
        for target in TARGETS {
            let fast = meijster(&img, target, 1);
            let slow = edt_brute(&img, target);
            if fast != slow {
                return Err(format!(
                    "image {i} ({}x{}, {target:?}): max |diff| {:?}",
                    img.width(),
                    img.height(),
                    fast.max_abs_diff(&slow)
                ));
            }
        }
        pixels += img.len();
    }
    Ok(format!("500 images, {pixels} pixels, both targets, tolerance 0"))
}

fn edt_determinism() -> Check {
    let mut rng = rng(0xA2);
    for i in 0..20 {
        let density = rng.gen_range(0.001..0.6);
        let img = random_image(&mut rng, 512, 512, density);
        for target in TARGETS {
            let reference = meijster(&img, target, 1);
            for workers in [2, 3, 4, 8, 16] {
                if meijster(&img, target, workers).values() != reference.values() {
                    return Err(format!("image {i}, {target:?}: {workers} workers differ from 1"));
                }
            }
        }
    }
    Ok("20 images 512x512, workers {1,2,3,4,8,16}, bit-identical".into())
}

fn simpleness() -> Check {
    for conn in PAIRS {
        for bits in 0..=255u8 {
            if is_simple_pattern(NeighborhoodPattern(bits), conn) != brute_simple_pattern(bits, conn) {
                return Err(format!("pattern {bits:#010b} under {conn:?}"));
            }
        }
    }
    let mut rng = rng(0xA3);
    let mut checked = 0usize;
    for i in 0..100 {
        let density = rng.gen_range(0.2..0.8);
        let img = random_image(&mut rng, 32, 32, density);
        for conn in PAIRS {
            for p in img.foreground() {
                let (r, c) = (p.row as usize, p.col as usize);
                let lut = is_simple(&img, Point::new(p.row, p.col), conn).map_err(|e| e.to_string())?;
                if lut != recount_simple(&img, r, c, conn) {
                    return Err(format!("image {i}, pixel ({r},{c}) under {conn:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("512 patterns and {checked} pixels, tolerance 0"))
}

#[derive(Default)]
struct SmoothingBatch {
    runs: usize,
    topology_failures: Vec<String>,
    stages: usize,
    unstable: Vec<String>,
    traces: usize,
    max_owners: usize,
    insertions: usize,
    fusions: usize,
    trace_failures: Vec<String>,
}

impl SmoothingBatch {
    fn audit(&mut self, label: &str, audits: Vec<StageAudit>) {
        for (k, a) in audits.into_iter().enumerate() {
            self.stages += 1;
            if !a.ok() {
                self.unstable.push(format!("{label} stage {k}: {a:?}"));
            }
        }
    }

    fn traces(&mut self, label: &str, width: usize, reports: Vec<MergeReport>) {
        for report in reports {
            let Some(trace) = report.trace else {
                self.trace_failures.push(format!("{label}: no trace recorded"));
                continue;
            };
            self.traces += 1;
            match trace.check(width) {
                Ok(s) => {
                    self.max_owners = self.max_owners.max(s.max_owners);
                    self.insertions += s.insertions;
                    self.fusions += s.fusions;
                }
                Err(e) => self.trace_failures.push(format!("{label}: {e}")),
            }
        }
    }
}

fn smoothing_batch() -> SmoothingBatch {
    let mut batch = SmoothingBatch::default();
    let mut rng = rng(0xA4);
    for i in 0..SMOOTH_IMAGES {
        let x = any_image(&mut rng, 128);
        for conn in PAIRS {
            let expected = signature(&x, conn);
            for radius in RADII {
                let params = SmoothingParams::new(radius).with_conn(conn);
                let check = |label: String, out: hasf::Result<BinaryImage>, batch: &mut SmoothingBatch| {
                    batch.runs += 1;
                    match out {
                        Ok(out) if signature(&out, conn) == expected => {}
                        Ok(out) => batch.topology_failures.push(format!(
                            "{label}: {:?} became {:?}",
                            expected,
                            signature(&out, conn)
                        )),
                        Err(e) => batch.topology_failures.push(format!("{label}: {e}")),
                    }
                };

                let label = format!("image {i} {conn:?} r={radius} sequential");
                let engine = AuditedEngine::new(Sequential);
                check(label.clone(), hasf_with(&engine, &x, &params), &mut batch);
                batch.audit(&label, engine.take_audits());

                for workers in SMOOTH_WORKERS {
                    let label = format!("image {i} {conn:?} r={radius} workers={workers}");
                    let engine = AuditedEngine::new(ParallelEngine::new(workers).with_tracing());
                    let params = params.clone().with_workers(workers);
                    check(label.clone(), hasf_with(&engine, &x, &params), &mut batch);
                    batch.audit(&label, engine.take_audits());
                    batch.traces(&label, x.width(), engine.inner().take_reports());
                }
            }
        }
        // the public entry point, once per image
        let params = SmoothingParams::new(2).with_workers(4);
        check_public(&mut batch, i, &x, &params);
    }
    batch
}

fn check_public(batch: &mut SmoothingBatch, i: usize, x: &BinaryImage, params: &SmoothingParams) {
    batch.runs += 1;
    match parallel_smooth(x, params) {
        Ok(out) if signature(&out, params.conn) == signature(x, params.conn) => {}
        Ok(_) => batch
            .topology_failures
            .push(format!("image {i}: parallel_smooth changed topology")),
        Err(e) => batch.topology_failures.push(format!("image {i}: {e}")),
    }
}

fn first_few(list: &[String]) -> String {
    let shown: Vec<&str> = list.iter().take(3).map(String::as_str).collect();
    format!("{} failures, first: {}", list.len(), shown.join("; "))
}

fn topology(batch: &SmoothingBatch) -> Check {
    if batch.topology_failures.is_empty() {
        Ok(format!(
            "{} runs over {SMOOTH_IMAGES} images, r_max {RADII:?}, both pairs, sequential and workers {SMOOTH_WORKERS:?}",
            batch.runs
        ))
    } else {
        Err(first_few(&batch.topology_failures))
    }
}

fn stability(batch: &SmoothingBatch) -> Check {
    if batch.unstable.is_empty() && batch.stages > 0 {
        Ok(format!(
            "{} thin/thicken stages rescanned, 0 flippable pixels left",
            batch.stages
        ))
    } else {
        Err(first_few(&batch.unstable))
    }
}

fn merge_discipline(batch: &SmoothingBatch) -> Check {
    if !batch.trace_failures.is_empty() {
        return Err(first_few(&batch.trace_failures));
    }
    if batch.traces == 0 {
        return Err("no parallel trace was recorded".into());
    }
    Ok(format!(
        "{} traces, max owners {}, {} insertions, {} fusions, no duplicates, all terminated",
        batch.traces, batch.max_owners, batch.insertions, batch.fusions
    ))
}

fn smoothing_effect() -> Check {
    let x = crenellated(&mut rng(0xA6), 200, 6);
    let before = x.boundary_length();
    let mut details = Vec::new();
    for conn in PAIRS {
        let out = hasf_with(&Sequential, &x, &SmoothingParams::new(5).with_conn(conn)).map_err(|e| e.to_string())?;
        let after = out.boundary_length();
        if signature(&out, conn) != signature(&x, conn) {
            return Err(format!("{conn:?}: topology changed"));
        }
        if after >= before {
            return Err(format!("{conn:?}: boundary {before} -> {after}"));
        }
        details.push(format!("{conn:?} {before} -> {after}"));
    }
    Ok(format!("boundary length {}", details.join(", ")))
}

fn scheduler_bound() -> Check {
    let mut rng = rng(0xA7);
    for i in 0..10_000 {
        let tasks = rng.gen_range(0..=1000usize);
        let workers = rng.gen_range(1..=64usize);
        let a = distribute(tasks, workers);
        let bound = tasks.div_ceil(workers);
        if a.max_load() > bound || a.per_worker.len() != workers {
            return Err(format!(
                "instance {i}: {tasks} tasks on {workers} workers, max load {}",
                a.max_load()
            ));
        }
        let mut seen = vec![0u8; tasks];
        for &t in a.per_worker.iter().flatten() {
            seen[t] += 1;
        }
        if seen.iter().any(|&n| n != 1) {
            return Err(format!("instance {i}: a task was not assigned exactly once"));
        }
    }
    // a sample of real executions: every task runs once
    for i in 0..50 {
        let tasks = rng.gen_range(0..=1000usize);
        let workers = rng.gen_range(1..=64usize);
        let runs: Vec<AtomicUsize> = (0..tasks).map(|_| AtomicUsize::new(0)).collect();
        let jobs: Vec<Task> = (0..tasks)
            .map(|t| {
                let runs = &runs;
                Box::new(move || {
                    runs[t].fetch_add(1, Ordering::Relaxed);
                }) as Task
            })
            .collect();
        let report = Pool::new(workers).execute(jobs);
        if report.assignment.max_load() > tasks.div_ceil(workers) || runs.iter().any(|n| n.load(Ordering::Relaxed) != 1)
        {
            return Err(format!("execution {i}: {tasks} tasks on {workers} workers"));
        }
    }
    Ok("10000 instances, |T| <= 1000, |P| <= 64, 0 violations; 50 pool executions".into())
}

fn min_of<T>(reps: usize, mut f: impl FnMut() -> T) -> Duration {
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .min()
        .unwrap()
}

fn performance() -> Outcome {
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let x = random_shapes(&mut rng(0xA9), 512, 512);
    let params = SmoothingParams::new(5);
    let mut smooth = Vec::new();
    let mut edt = Vec::new();
    println!("  operation,width,height,r_max,workers,seconds,speedup,efficiency");
    for workers in [1, 2, 4, 8, 16] {
        let e = min_of(3, || meijster(&x, Target::Background, workers)).as_secs_f64();
        let s = min_of(3, || parallel_smooth(&x, &params.clone().with_workers(workers))).as_secs_f64();
        edt.push((workers, e));
        smooth.push((workers, s));
    }
    let speedup = |table: &[(usize, f64)], w: usize| {
        let base = table[0].1;
        base / table.iter().find(|t| t.0 == w).unwrap().1.max(f64::MIN_POSITIVE)
    };
    for (op, table) in [("edt", &edt), ("smooth", &smooth)] {
        for &(w, t) in table.iter() {
            let sp = speedup(table, w);
            println!("  {op},512,512,5,{w},{t:.6},{sp:.3},{:.3}", sp / w as f64);
        }
    }
    let (s8, e8) = (speedup(&smooth, 8), speedup(&edt, 8));
    let detail =
        format!("{cores} cores; smooth speedup {s8:.2} (>= 2.0), meijster speedup {e8:.2} (>= 1.3) at 8 workers");
    if cores < 4 {
        Outcome::Skip(format!("{detail}; at least 4 cores needed, table is informational"))
    } else if s8 >= 2.0 && e8 >= 1.3 {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn sed4_ordering() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = rng(0xAA);
    let mut sed4_wrong = 0usize;
    let mut worst = 0u64;
    let mut times = [0f64; 3];
    for i in 0..100 {
        let (w, h) = (rng.gen_range(8..=64), rng.gen_range(8..=64));
        let density = rng.gen_range(0.002..0.1);
        let img = random_image(&mut rng, w, h, density);
        let path = dir.path().join(format!("{i}.pbm"));
        fs::write(&path, netpbm::encode_pbm(&img, false)).map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_hasf"))
            .args(["edt", path.to_str().unwrap(), "--compare"])
            .env_remove("THREADS")
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("image {i}: exit {:?}", out.status.code()));
        }
        let text = String::from_utf8_lossy(&out.stdout);
        for (k, line) in text.lines().skip(1).enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            let max: u64 = fields[1].parse().map_err(|_| format!("image {i}: bad row {line}"))?;
            times[k] += fields[3].parse::<f64>().unwrap_or(0.0);
            match fields[0] {
                "meijster" if max != 0 => return Err(format!("image {i}: meijster max error {max}")),
                "sed4" if max > 0 => {
                    sed4_wrong += 1;
                    worst = worst.max(max);
                }
                _ => {}
            }
        }
    }
    if sed4_wrong == 0 {
        return Err("sed4 was exact on all 100 images".into());
    }
    Ok(format!(
        "meijster exact on 100/100; sed4 inexact on {sed4_wrong}/100 (worst squared error {worst}); \
         total seconds brute {:.4}, sed4 {:.4}, meijster {:.4}",
        times[0], times[1], times[2]
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let (tag, detail) = match &o {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => ("FAIL", d),
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!(
            "{tag} criterion {n:>2} {name}: {detail} [{:.1}s]",
            t.elapsed().as_secs_f64()
        );
        results.push((n, name, o));
    };

    run(1, "edt-exactness", &mut || outcome(edt_exactness()));
    run(2, "edt-parallel-determinism", &mut || outcome(edt_determinism()));
    run(3, "simpleness-lut", &mut || outcome(simpleness()));
    let mut batch = SmoothingBatch::default();
    run(4, "topology-preservation", &mut || {
        batch = smoothing_batch();
        outcome(topology(&batch))
    });
    run(5, "stability-fixed-point", &mut || outcome(stability(&batch)));
    run(6, "smoothing-effect", &mut || outcome(smoothing_effect()));
    run(7, "scheduler-bound", &mut || outcome(scheduler_bound()));
    run(8, "merge-discipline", &mut || outcome(merge_discipline(&batch)));
    run(9, "directional-performance", &mut performance);
    run(10, "sed4-vs-meijster", &mut || outcome(sed4_ordering()));

    let failed: Vec<u32> = results
        .iter()
        .filter(|r| matches!(r.2, Outcome::Fail(_)))
        .map(|r| r.0)
        .collect();
    println!(
        "acceptance: {} passed, {} failed, {} skipped in {:.1}s",
        results.iter().filter(|r| matches!(r.2, Outcome::Pass(_))).count(),
        failed.len(),
        results.iter().filter(|r| matches!(r.2, Outcome::Skip(_))).count(),
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
