use std::io::Write;

use projip::io::{Document, SolveOutput};
use projip::model::ObjValue;
use projip::numeric::rat;
use projip::verify::{brute_force_solve, random_compressed_sensing, random_instance, BruteForceOptions, Family, Profile};
use projip::{Error, Result, Solution};

use crate::solve::run_engine;
use crate::{read_document, EngineChoice, VerifyArgs, EXIT_MISMATCH, EXIT_OK};

fn io_err(e: std::io::Error) -> Error {
    Error::Internal(e.to_string())
}

fn corrupt(solution: &mut Solution) {
    solution.value = match &solution.value {
        ObjValue::Finite(v) => ObjValue::Finite(v + rat(1)),
        ObjValue::Infinite => ObjValue::Finite(rat(0)),
    };
}

/// Engine and brute-force solutions for one document.
fn compare(doc: &Document, args: &VerifyArgs) -> Result<(Solution, Solution)> {
    let mut engine = run_engine(doc, &args.engine)?.solution;
    if args.inject_fault {
        corrupt(&mut engine);
    }
    let brute = brute_force_solve(
        &doc.instance,
        &BruteForceOptions {
            cap_infinite: args.engine.cap_infinite,
            ..BruteForceOptions::default()
        },
    )?;
    Ok((engine, brute))
}

fn describe(s: &Solution) -> String {
    let full = SolveOutput::new(s, 0, 0, 0);
    serde_json::json!({"status": full.status, "x": full.x, "value": full.value}).to_string()
}

fn batch_document(seed: u64, args: &VerifyArgs) -> Document {
    if args.engine.engine == EngineChoice::UnknownW {
        let (_, instance, z) = random_compressed_sensing(seed, args.n, args.m, args.delta);
        return Document {
            instance,
            relaxed: Some(z),
            application: Some("compressed_sensing".into()),
        };
    }
    let mut profile = Profile::new(args.n, args.m, args.delta, Family::Any);
    if args.engine.engine == EngineChoice::Nonneg {
        profile.box_lo = 0;
        profile.lower_at_min = true;
    }
    Document {
        instance: random_instance(seed, &profile),
        relaxed: None,
        application: None,
    }
}

pub(crate) fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(path) = &args.path {
        let doc = read_document(path)?;
        let (engine, brute) = compare(&doc, args)?;
        writeln!(out, "engine: {}", describe(&engine)).map_err(io_err)?;
        writeln!(out, "brute:  {}", describe(&brute)).map_err(io_err)?;
        let ok = engine.value == brute.value;
        writeln!(out, "{}", if ok { "MATCH" } else { "MISMATCH" }).map_err(io_err)?;
        return Ok(if ok { EXIT_OK } else { EXIT_MISMATCH });
    }

    writeln!(out, "{:>8}  {:<22}  {:>12}  {:>12}  result", "seed", "family", "engine", "brute").map_err(io_err)?;
    let mut matches = 0;
    for seed in args.engine.seed..args.engine.seed + args.count {
        let doc = batch_document(seed, args);
        let (engine, brute) = compare(&doc, args)?;
        let ok = engine.value == brute.value;
        matches += ok as u64;
        writeln!(
            out,
            "{seed:>8}  {:<22}  {:>12}  {:>12}  {}",
            doc.instance.objective.family(),
            engine.value.to_string(),
            brute.value.to_string(),
            if ok { "MATCH" } else { "MISMATCH" }
        )
        .map_err(io_err)?;
    }
    writeln!(out, "summary: {matches}/{} MATCH", args.count).map_err(io_err)?;
    Ok(if matches == args.count { EXIT_OK } else { EXIT_MISMATCH })
}
