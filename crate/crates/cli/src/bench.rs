use std::fs::File;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use projip::engine::{solve, EngineKind};
use projip::unknown_w::{solve_unknown_w, UnknownWOptions};
use projip::verify::{random_compressed_sensing, random_instance, Family, Profile};
use projip::{Error, Result};

use crate::solve::engine_options;
use crate::{BenchArgs, EngineChoice, EXIT_OK};

pub const CSV_HEADER: &str =
    "n,m,delta,rep,seed,family,engine,status,guesses,dp_states,targets,oracle_calls,radius_used,wall_ms";

/// One CSV line. Field order is the header order.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub delta: i64,
    pub rep: u64,
    pub seed: u64,
    pub family: String,
    pub engine: String,
    pub status: String,
    pub guesses: u64,
    pub dp_states: u64,
    pub targets: u64,
    pub oracle_calls: u64,
    pub radius_used: u64,
    pub wall_ms: f64,
}

fn engine_name(e: EngineChoice) -> &'static str {
    match e {
        EngineChoice::Auto => "auto",
        EngineChoice::Nonneg => "nonneg",
        EngineChoice::Bounded => "bounded",
        EngineChoice::UnknownW => "unknown-w",
    }
}

fn millis(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn measure(n: usize, m: usize, delta: i64, rep: u64, args: &BenchArgs) -> Result<BenchRow> {
    let seed = args.engine.seed + rep;
    let mut row = BenchRow {
        n,
        m,
        delta,
        rep,
        seed,
        family: String::new(),
        engine: engine_name(args.engine.engine).into(),
        status: String::new(),
        guesses: 0,
        dp_states: 0,
        targets: 0,
        oracle_calls: 0,
        radius_used: 0,
        wall_ms: 0.0,
    };
    if args.engine.engine == EngineChoice::UnknownW {
        let (oracle, inst, z) = random_compressed_sensing(seed, n, m, delta);
        let budget = args.engine.radius_cap.unwrap_or(n as u64);
        let start = Instant::now();
        let r = solve_unknown_w(&oracle, &z, &UnknownWOptions { budget, jobs: args.engine.jobs.max(1) })?;
        row.wall_ms = millis(start);
        row.family = inst.objective.family().into();
        row.status = r.solution.status.as_str().into();
        row.guesses = r.passes as u64;
        row.oracle_calls = r.evaluations;
        row.targets = r.last_map_size as u64;
        row.radius_used = budget;
        return Ok(row);
    }
    let mut profile = Profile::new(n, m, delta, Family::Any);
    let kind = match args.engine.engine {
        EngineChoice::Nonneg => {
            profile.box_lo = 0;
            profile.lower_at_min = true;
            EngineKind::Nonneg
        }
        EngineChoice::Bounded => EngineKind::Bounded,
        _ => EngineKind::Auto,
    };
    let inst = random_instance(seed, &profile);
    let start = Instant::now();
    let r = solve(&inst, kind, &engine_options(&args.engine))?;
    row.wall_ms = millis(start);
    row.family = inst.objective.family().into();
    row.status = r.solution.status.as_str().into();
    row.guesses = r.stats.guesses_explored;
    row.dp_states = r.stats.dp_states;
    row.targets = r.stats.targets_explored;
    row.oracle_calls = r.stats.oracle_calls;
    row.radius_used = r.stats.radius_used;
    Ok(row)
}

pub(crate) fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let csv_err = |e: csv::Error| Error::Internal(e.to_string());
    let sink: Box<dyn Write + '_> = match &args.output {
        Some(path) => Box::new(File::create(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?),
        None => Box::new(out),
    };
    let mut w = csv::Writer::from_writer(sink);
    for &n in &args.n {
        for &m in &args.m {
            for &delta in &args.delta {
                for rep in 0..args.repetitions {
                    w.serialize(measure(n, m, delta, rep, args)?).map_err(csv_err)?;
                }
            }
        }
    }
    w.flush().map_err(|e| Error::Internal(e.to_string()))?;
    Ok(EXIT_OK)
}
