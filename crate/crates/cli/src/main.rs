//! `hasf`: smooth binary images without changing their topology, compute
//! distance transforms, benchmark the parallel engine and check invariants.

mod io;
mod timing;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hasf::edt::{edt_brute, meijster, sed4, SquaredDistanceMap, Target};
use hasf::grid::{BinaryImage, ConnectivityPair};
use hasf::homotopy::{hasf_with, ConstraintSets, SmoothingParams};
use hasf::runtime::ParallelEngine;
use hasf::verify::run_verify;

use timing::{min_time, TimedEngine};

#[derive(Parser)]
#[command(name = "hasf", version, about = "Topology-preserving smoothing of binary images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smooth an image with the homotopic alternating sequential filter.
    Smooth(SmoothArgs),
    /// Compute a squared Euclidean distance map.
    Edt(EdtArgs),
    /// Time smoothing and the distance transform over several worker counts (CSV).
    Bench(BenchArgs),
    /// Smooth an image and check every invariant on the way.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// PBM (P1/P4) or PGM (P2/P5) image.
    input: PathBuf,
    /// Graymap samples above this value are foreground.
    #[arg(long, default_value_t = 0)]
    threshold: u16,
}

#[derive(Args, Clone)]
struct FilterArgs {
    /// Largest ball radius (filter order); 0 leaves the image unchanged.
    #[arg(long, short, default_value_t = 1)]
    radius: u32,
    /// Foreground-background adjacency pair.
    #[arg(long, default_value = "8-4", value_parser = parse_conn)]
    connectivity: ConnectivityPair,
    #[arg(long, short, env = "THREADS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    /// Pixels cutting must keep (subset of the input).
    #[arg(long)]
    constraint_c: Option<PathBuf>,
    /// Pixels filling must not add (disjoint from the input).
    #[arg(long)]
    constraint_d: Option<PathBuf>,
    /// Round limit for every thinning and thickening loop.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct SmoothArgs {
    #[command(flatten)]
    input: InputArgs,
    output: PathBuf,
    #[command(flatten)]
    filter: FilterArgs,
    /// Print wall time spent in distance maps and in thinning/thickening.
    #[arg(long)]
    report: bool,
    /// Write plain (ASCII) PBM instead of raw.
    #[arg(long)]
    plain: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Brute,
    Sed4,
    Meijster,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    /// Distance to the nearest foreground pixel.
    Foreground,
    /// Distance to the nearest background pixel.
    Background,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Foreground => Target::Foreground,
            TargetArg::Background => Target::Background,
        }
    }
}

#[derive(Args)]
struct EdtArgs {
    #[command(flatten)]
    input: InputArgs,
    /// `.csv` for exact squared distances, anything else for a 16-bit PGM.
    #[arg(required_unless_present = "compare")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Algorithm::Meijster)]
    algorithm: Algorithm,
    #[arg(long, value_enum, default_value_t = TargetArg::Foreground)]
    target: TargetArg,
    #[arg(long, short, env = "THREADS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    /// Print the error of sed4 and meijster against the brute-force map (CSV).
    #[arg(long)]
    compare: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, short, default_value_t = 5)]
    radius: u32,
    #[arg(long, default_value = "8-4", value_parser = parse_conn)]
    connectivity: ConnectivityPair,
    /// Worker counts to time.
    #[arg(long, short, value_delimiter = ',', default_value = "1,2,4,8,16")]
    workers: Vec<u32>,
    /// Runs per configuration; the minimum time is reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    repetitions: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Run the plain morphological filter instead, which must fail the checks.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn parse_conn(s: &str) -> Result<ConnectivityPair, String> {
    s.parse().map_err(|e: hasf::Error| e.to_string())
}

/// Failure classes, each with its own exit code.
enum Failure {
    Io(anyhow::Error),
    Validation(anyhow::Error),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Validation(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }
}

impl From<hasf::Error> for Failure {
    fn from(e: hasf::Error) -> Self {
        Failure::Validation(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Smooth(args) => smooth(args),
        Command::Edt(args) => edt(args),
        Command::Bench(args) => bench(args),
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Io(e) | Failure::Validation(e) => eprintln!("error: {e:#}"),
                Failure::Invariant(msg) => eprintln!("invariant violated: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn load(input: &InputArgs) -> Result<BinaryImage, Failure> {
    io::read_image(&input.input, input.threshold).map_err(Failure::Io)
}

fn params_for(x: &BinaryImage, args: &FilterArgs, threshold: u16) -> Result<SmoothingParams, Failure> {
    let mut params = SmoothingParams::new(args.radius)
        .with_conn(args.connectivity)
        .with_workers(args.workers as usize);
    params.max_iter = args.max_iter;
    if args.constraint_c.is_some() || args.constraint_d.is_some() {
        let mut sets = ConstraintSets::empty(x.width(), x.height())?;
        for (path, slot) in [
            (&args.constraint_c, &mut sets.keep),
            (&args.constraint_d, &mut sets.exclude),
        ] {
            if let Some(path) = path {
                let img = io::read_image(path, threshold).map_err(Failure::Io)?;
                x.same_shape(&img)?;
                *slot = img;
            }
        }
        sets.validate(x)?;
        params = params.with_constraints(sets);
    }
    Ok(params)
}

fn smooth(args: SmoothArgs) -> Outcome {
    let x = load(&args.input)?;
    let params = params_for(&x, &args.filter, args.input.threshold)?;
    let engine = TimedEngine::new(ParallelEngine::new(params.workers));
    let start = Instant::now();
    let out = hasf_with(&engine, &x, &params)?;
    let wall = start.elapsed();
    io::write_image(&out, &args.output, args.plain).map_err(Failure::Io)?;

    if args.report {
        let t = engine.times();
        let total = t.total().as_secs_f64().max(f64::MIN_POSITIVE);
        println!("stage,calls,seconds,share");
        for (name, calls, d) in [
            ("distance-map", t.distance_calls, t.distance),
            ("thinning", t.thin_calls, t.thinning),
            ("thickening", t.thicken_calls, t.thickening),
        ] {
            let s = d.as_secs_f64();
            println!("{name},{calls},{s:.6},{:.3}", s / total);
        }
        println!("total,,{:.6},1.000", wall.as_secs_f64());
    }
    Ok(())
}

fn error_stats(map: &SquaredDistanceMap, exact: &SquaredDistanceMap) -> (u64, f64) {
    let mut max = 0u64;
    let mut sum = 0f64;
    for (a, b) in map.values().iter().zip(exact.values()) {
        let d = a.abs_diff(*b);
        max = max.max(d);
        sum += d as f64;
    }
    (max, sum / exact.values().len() as f64)
}

fn edt(args: EdtArgs) -> Outcome {
    let x = load(&args.input)?;
    let target = Target::from(args.target);
    let workers = args.workers as usize;

    let compute = |alg: Algorithm| match alg {
        Algorithm::Brute => edt_brute(&x, target),
        Algorithm::Sed4 => sed4(&x, target),
        Algorithm::Meijster => meijster(&x, target, workers),
    };

    if args.compare {
        let (t_brute, exact) = min_time(1, || compute(Algorithm::Brute));
        println!("algorithm,max_sq_error,mean_sq_error,seconds");
        println!("brute,0,0,{:.6}", t_brute.as_secs_f64());
        for (name, alg) in [("sed4", Algorithm::Sed4), ("meijster", Algorithm::Meijster)] {
            let (t, map) = min_time(1, || compute(alg));
            let (max, mean) = error_stats(&map, &exact);
            println!("{name},{max},{mean:.6},{:.6}", t.as_secs_f64());
        }
        if exact.all_inf() {
            eprintln!("note: the image has no target pixel; every distance is INF");
        }
    }

    if let Some(output) = &args.output {
        let map = compute(args.algorithm);
        if map.all_inf() {
            eprintln!("note: the image has no target pixel; every distance is INF");
        }
        io::write_distance_map(&map, output).map_err(Failure::Io)?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Outcome {
    let x = load(&args.input)?;
    if args.workers.contains(&0) {
        return Err(Failure::Validation(anyhow!("worker counts must be at least 1")));
    }
    let reps = args.repetitions as usize;
    let params = SmoothingParams::new(args.radius).with_conn(args.connectivity);

    let time_edt = |workers: usize| min_time(reps, || meijster(&x, Target::Background, workers)).0;
    let time_smooth = |workers: usize| -> Result<f64, Failure> {
        let engine = ParallelEngine::new(workers);
        let mut failure = None;
        let (t, _) = min_time(reps, || {
            if let Err(e) = hasf_with(&engine, &x, &params) {
                failure = Some(e);
            }
        });
        match failure {
            Some(e) => Err(e.into()),
            None => Ok(t.as_secs_f64()),
        }
    };

    println!("operation,width,height,r_max,workers,seconds,speedup,efficiency");
    let base_edt = time_edt(1).as_secs_f64();
    let base_smooth = time_smooth(1)?;
    for &w in &args.workers {
        let w = w as usize;
        let e = if w == 1 { base_edt } else { time_edt(w).as_secs_f64() };
        let s = if w == 1 { base_smooth } else { time_smooth(w)? };
        for (op, base, t) in [("edt", base_edt, e), ("smooth", base_smooth, s)] {
            let speedup = base / t.max(f64::MIN_POSITIVE);
            println!(
                "{op},{},{},{},{w},{t:.6},{speedup:.3},{:.3}",
                x.width(),
                x.height(),
                args.radius,
                speedup / w as f64
            );
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Outcome {
    let x = load(&args.input)?;
    let params = params_for(&x, &args.filter, args.input.threshold)?;
    let report = run_verify(&x, &params, args.inject_fault)?;
    for v in &report.verdicts {
        println!("{} {}: {}", if v.ok { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    let failed = report.failures().next().map(|v| v.name.to_string());
    match failed {
        None => Ok(()),
        Some(name) => Err(Failure::Invariant(name)),
    }
}
