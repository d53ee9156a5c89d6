use std::io::Write;
use std::path::Path;

use projip::engine::{solve, EngineKind, EngineOptions};
use projip::io::{Document, SolveOutput};
use projip::numeric::rat;
use projip::unknown_w::{solve_unknown_w, InstanceOracle, UnknownWOptions};
use projip::{Error, Instance, Result, Solution};

use crate::{read_document, EngineArgs, EngineChoice, Switch, EXIT_OK};

pub(crate) struct Outcome {
    pub solution: Solution,
    pub output: SolveOutput,
}

pub(crate) fn engine_options(args: &EngineArgs) -> EngineOptions {
    EngineOptions {
        radius_cap: args.radius_cap,
        deepening: args.deepening == Switch::On,
        jobs: args.jobs.max(1),
        ..EngineOptions::default()
    }
}

pub(crate) fn cap_bounds(inst: &Instance, cap: Option<i64>) -> Instance {
    let Some(cap) = cap else {
        return inst.clone();
    };
    Instance {
        lower: inst.lower.iter().map(|l| Some(l.unwrap_or(-cap))).collect(),
        upper: inst.upper.iter().map(|u| Some(u.unwrap_or(cap))).collect(),
        ..inst.clone()
    }
}

fn run_unknown_w(doc: &Document, args: &EngineArgs) -> Result<Outcome> {
    let inst = &doc.instance;
    if (0..inst.n()).any(|i| inst.lower[i] != Some(0) || inst.upper[i] != Some(1)) {
        return Err(Error::Precondition("the unknown-w engine works on 0/1 variables".into()));
    }
    let oracle = InstanceOracle::new(inst.clone())?;
    let z = doc.relaxed.clone().unwrap_or_else(|| vec![rat(0); inst.n()]);
    let budget = args.radius_cap.unwrap_or(inst.n() as u64);
    let r = solve_unknown_w(&oracle, &z, &UnknownWOptions { budget, jobs: args.jobs.max(1) })?;
    Ok(Outcome {
        output: SolveOutput::new(&r.solution, r.passes as u64, r.evaluations, budget),
        solution: r.solution,
    })
}

/// Runs the selected engine on a parsed document.
pub(crate) fn run_engine(doc: &Document, args: &EngineArgs) -> Result<Outcome> {
    let kind = match args.engine {
        EngineChoice::UnknownW => return run_unknown_w(doc, args),
        EngineChoice::Auto => EngineKind::Auto,
        EngineChoice::Nonneg => EngineKind::Nonneg,
        EngineChoice::Bounded => EngineKind::Bounded,
    };
    let inst = cap_bounds(&doc.instance, args.cap_infinite);
    let r = solve(&inst, kind, &engine_options(args))?;
    Ok(Outcome {
        output: SolveOutput::new(&r.solution, r.stats.guesses_explored, r.stats.oracle_calls, r.stats.radius_used),
        solution: r.solution,
    })
}

pub(crate) fn cmd_solve(path: &Path, args: &EngineArgs, out: &mut dyn Write) -> Result<i32> {
    let doc = read_document(path)?;
    let outcome = run_engine(&doc, args)?;
    writeln!(out, "{}", outcome.output.to_json()).map_err(|e| Error::Internal(e.to_string()))?;
    Ok(EXIT_OK)
}
