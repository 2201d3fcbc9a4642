use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use pairguess::Complex64;
use pairguess::certify::{counts_from_reader, report_from_counts, QuantumnessVerdict, WitnessReport};
use pairguess::classical::{
    balanced_partition_optimum_exact, brute_force_optimum, ratio_to_f64, ENUMERATION_LIMIT,
};
use pairguess::game::{average_success, min_cell, success_matrix, wins, GameSpec, Strategy};
use pairguess::quantum::{
    maximize_delta, optimize_ensemble, polygon, qrac_reference, tetrad, trine, DeltaProblem,
};
use pairguess::record::write_record;
use pairguess::sim::{Simulation, GENERATOR};
use pairguess::{Ensemble, QubitState};
use serde_json::{json, Value};

use crate::{BuiltinStrategy, Format, Mode, StrategyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 2;
pub const EXIT_NOT_CERTIFIED: u8 = 3;

const SIM_BATCH: u64 = 1 << 16;

fn prob(p: f64) -> String {
    format!("{p:.7}")
}

fn fraction(numer: u64, denom: u64) -> String {
    let g = gcd(numer, denom);
    format!("{}/{}", numer / g, denom / g)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

fn read_ensemble(path: &Path, d: usize) -> Result<Ensemble> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut states = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{} line {}: expected four real numbers", path.display(), k + 1))?;
        if nums.len() != 4 {
            bail!("{} line {}: expected 4 numbers, found {}", path.display(), k + 1, nums.len());
        }
        let state = QubitState::new(Complex64::new(nums[0], nums[1]), Complex64::new(nums[2], nums[3]))
            .with_context(|| format!("{} line {}", path.display(), k + 1))?;
        states.push(state);
    }
    if states.len() != d {
        bail!("{} holds {} states, expected d = {d}", path.display(), states.len());
    }
    Ok(Ensemble::new(states)?)
}

/// Best classical encoding with `levels` symbols: exhaustive when feasible,
/// otherwise the balanced assignment `k mod levels`.
fn classical_optimum_encoding(d: usize, levels: usize) -> Result<Vec<usize>> {
    let feasible = (levels as u64)
        .checked_pow(d as u32)
        .is_some_and(|t| t <= ENUMERATION_LIMIT);
    if feasible {
        Ok(brute_force_optimum(d, levels)?.encoding)
    } else {
        Ok((0..d).map(|k| k % levels).collect())
    }
}

struct Resolved {
    strategy: Strategy,
    name: String,
}

fn resolve(args: &StrategyArgs) -> Result<Resolved> {
    let d = args.d;
    if let Some(path) = &args.ensemble_file {
        return Ok(Resolved {
            strategy: Strategy::quantum(read_ensemble(path, d)?, args.noise)?,
            name: format!("file:{}", path.display()),
        });
    }
    let builtin = args.strategy.expect("clap enforces strategy or file");
    let (strategy, name) = match builtin {
        BuiltinStrategy::Trine => {
            if d != 3 {
                bail!("trine is defined for d = 3, got d = {d}");
            }
            (Strategy::quantum(trine(), args.noise)?, "trine".to_string())
        }
        BuiltinStrategy::Tetrad => {
            if d != 4 {
                bail!("tetrad is defined for d = 4, got d = {d}");
            }
            (Strategy::quantum(tetrad(), args.noise)?, "tetrad".to_string())
        }
        BuiltinStrategy::Polygon => (
            Strategy::quantum(polygon(d)?, args.noise)?,
            format!("polygon({d})"),
        ),
        BuiltinStrategy::ClassicalOptimum => {
            if args.noise != 0.0 {
                bail!("--noise applies to qubit strategies only");
            }
            GameSpec::canonical(d)?;
            if args.levels == 0 {
                bail!("--levels must be at least 1");
            }
            let enc = classical_optimum_encoding(d, args.levels)?;
            (
                Strategy::classical(enc, args.levels)?,
                format!("classical-optimum({} levels)", args.levels),
            )
        }
    };
    Ok(Resolved { strategy, name })
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

pub fn evaluate(args: &StrategyArgs, format: Format) -> Result<u8> {
    let spec = GameSpec::canonical(args.d)?;
    let Resolved { strategy, name } = resolve(args)?;
    let m = success_matrix(&strategy, &spec)?;
    let avg = average_success(&m, &spec);
    let min = min_cell(&m);
    let won = wins(&m);
    let bound = balanced_partition_optimum_exact(args.d, 2)?;
    let qrac = qrac_reference();

    // Classical cells are 1/2 or 1 and the average is (P + separated) / 2P.
    let exact = match &strategy {
        Strategy::Classical { encoding, .. } => {
            let r = pairguess::classical::exact_average(encoding);
            Some(fraction(*r.numer(), *r.denom()))
        }
        Strategy::Quantum { .. } => None,
    };
    let cell_fraction = |p: f64| -> Option<String> {
        exact.as_ref().map(|_| if p == 1.0 { "1".into() } else { "1/2".into() })
    };

    match format {
        Format::Structured => {
            let cells: Vec<Value> = m
                .iter()
                .map(|(i, j, p)| {
                    let mut c = json!({ "i": i, "j": j, "p": p });
                    if let Some(f) = cell_fraction(p) {
                        c["fraction"] = json!(f);
                    }
                    c
                })
                .collect();
            let mut doc = json!({
                "command": "evaluate",
                "d": args.d,
                "strategy": name,
                "noise": args.noise,
                "cells": cells,
                "average": avg,
                "min_cell": min,
                "wins": won,
                "classical_bound": ratio_to_f64(bound),
                "classical_bound_fraction": fraction(*bound.numer(), *bound.denom()),
                "qrac_reference": qrac,
                "version": pairguess::VERSION,
            });
            if let Some(f) = &exact {
                doc["average_fraction"] = json!(f);
            }
            print_json(&doc)?;
        }
        Format::Text => {
            println!("strategy: {name}  d = {}  noise = {}", args.d, args.noise);
            println!("{:>4} {:>4}  {:>10}", "i", "j", "p(i|x_i,j)");
            for (i, j, p) in m.iter() {
                match cell_fraction(p) {
                    Some(f) => println!("{i:>4} {j:>4}  {}  ({f})", prob(p)),
                    None => println!("{i:>4} {j:>4}  {}", prob(p)),
                }
            }
            match &exact {
                Some(f) => println!("average          {}  ({f})", prob(avg)),
                None => println!("average          {}", prob(avg)),
            }
            println!("min cell         {}", prob(min));
            println!("wins             {won}");
            println!(
                "classical bound  {}  ({}, best 1-cbit strategy)",
                prob(ratio_to_f64(bound)),
                fraction(*bound.numer(), *bound.denom())
            );
            println!("qrac reference   {}", prob(qrac));
        }
    }
    Ok(EXIT_OK)
}

fn best_known(d: usize) -> Result<(String, f64)> {
    let spec = GameSpec::canonical(d)?;
    let (name, e) = match d {
        3 => ("trine".to_string(), trine()),
        4 => ("tetrad".to_string(), tetrad()),
        _ => (format!("polygon({d})"), polygon(d)?),
    };
    let m = success_matrix(&Strategy::quantum(e, 0.0)?, &spec)?;
    Ok((name, average_success(&m, &spec)))
}

fn state_json(s: &QubitState) -> Value {
    json!([s.amp0().re, s.amp0().im, s.amp1().re, s.amp1().im])
}

pub fn optimize(
    d: usize,
    mode: Mode,
    levels: usize,
    restarts: usize,
    seed: u64,
    grid_step: f64,
    format: Format,
) -> Result<u8> {
    match mode {
        Mode::Classical => {
            let opt = brute_force_optimum(d, levels)?;
            let closed = balanced_partition_optimum_exact(d, levels)?;
            let avg = fraction(*opt.average.numer(), *opt.average.denom());
            match format {
                Format::Structured => print_json(&json!({
                    "command": "optimize",
                    "mode": "classical",
                    "d": d,
                    "levels": levels,
                    "encoding": opt.encoding,
                    "value": opt.average_f64(),
                    "value_fraction": avg,
                    "closed_form": ratio_to_f64(closed),
                    "can_win": opt.can_win,
                }))?,
                Format::Text => {
                    let enc: Vec<String> = opt.encoding.iter().map(|m| m.to_string()).collect();
                    println!("classical optimum  d = {d}  levels = {levels}");
                    println!("encoding (x_1..x_d)  {}", enc.join(" "));
                    println!("value               {}  ({avg})", prob(opt.average_f64()));
                    println!("closed form         {}", prob(ratio_to_f64(closed)));
                    println!("can win             {}", opt.can_win);
                }
            }
        }
        Mode::Quantum => {
            let opt = optimize_ensemble(d, restarts, seed)?;
            let (known_name, known) = best_known(d)?;
            let gap = known - opt.average;
            match format {
                Format::Structured => print_json(&json!({
                    "command": "optimize",
                    "mode": "quantum",
                    "d": d,
                    "restarts": restarts,
                    "seed": seed,
                    "value": opt.average,
                    "best_restart": opt.best_restart,
                    "states": opt.ensemble.states().iter().map(state_json).collect::<Vec<_>>(),
                    "reference": known_name,
                    "reference_value": known,
                    "gap_to_reference": gap,
                }))?,
                Format::Text => {
                    println!("qubit ensemble search  d = {d}  restarts = {restarts}  seed = {seed}");
                    println!("value               {}", prob(opt.average));
                    println!("{known_name:<19} {}", prob(known));
                    println!("gap (ref - found)   {gap:.3e}");
                    println!("states (Re a0, Im a0, Re a1, Im a1):");
                    for s in opt.ensemble.states() {
                        println!(
                            "  {:+.7} {:+.7} {:+.7} {:+.7}",
                            s.amp0().re,
                            s.amp0().im,
                            s.amp1().re,
                            s.amp1().im
                        );
                    }
                }
            }
        }
        Mode::Delta => {
            let which = match d {
                3 => DeltaProblem::D3,
                4 => DeltaProblem::D4,
                _ => bail!("delta mode supports d = 3 or d = 4, got d = {d}"),
            };
            let max = maximize_delta(which, grid_step)?;
            match format {
                Format::Structured => print_json(&json!({
                    "command": "optimize",
                    "mode": "delta",
                    "d": d,
                    "grid_step": grid_step,
                    "argmax": max.argmax,
                    "value": max.value,
                }))?,
                Format::Text => {
                    let arg: Vec<String> = max.argmax.iter().map(|v| prob(*v)).collect();
                    println!("distinguishability bound  d = {d}  grid step = {grid_step}");
                    println!("argmax magnitudes   {}", arg.join(" "));
                    println!("max value           {}", prob(max.value));
                    println!("(an upper bound on the summed pair distinguishability, not an achievable average)");
                }
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn simulate(args: &StrategyArgs, rounds: u64, seed: u64, out: &Path, format: Format) -> Result<u8> {
    let spec = GameSpec::canonical(args.d)?;
    let Resolved { strategy, name } = resolve(args)?;
    let sim = Simulation::new(&strategy, &spec, rounds, seed)?;
    let file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut w = BufWriter::new(file);
    let mut hits = 0u64;
    for batch in sim.par_batches(SIM_BATCH) {
        for rec in &batch {
            hits += u64::from(rec.correct());
            write_record(&mut w, rec)?;
        }
    }
    w.flush()?;
    let avg = (rounds > 0).then(|| hits as f64 / rounds as f64);
    match format {
        Format::Structured => print_json(&json!({
            "command": "simulate",
            "d": args.d,
            "strategy": name,
            "noise": args.noise,
            "rounds": rounds,
            "seed": seed,
            "generator": GENERATOR,
            "empirical_average": avg,
            "out": out.display().to_string(),
        }))?,
        Format::Text => {
            println!("wrote {rounds} rounds to {}", out.display());
            println!("strategy           {name}  (noise {})", args.noise);
            println!("seed               {seed}  ({GENERATOR})");
            match avg {
                Some(a) => println!("empirical average  {}", prob(a)),
                None => println!("empirical average  n/a (no rounds)"),
            }
        }
    }
    Ok(EXIT_OK)
}

fn print_report_text(r: &WitnessReport) {
    println!("rounds             {}  (d = {})", r.total_rounds, r.d);
    println!("{:>4} {:>4} {:>8} {:>8}  {:>9}  {:>9}", "i", "j", "n", "s", "freq", "lower");
    for c in &r.cells {
        println!(
            "{:>4} {:>4} {:>8} {:>8}  {}  {}",
            c.i,
            c.j,
            c.n,
            c.s,
            prob(c.frequency),
            prob(c.lower_bound)
        );
    }
    println!("witness            {}", prob(r.witness_value));
    println!("classical bound    {}", prob(r.classical_bound));
    println!("confidence radius  {}  ({}, alpha = {})", prob(r.confidence_radius), r.bound, r.alpha);
    println!("quantumness        {}", r.quantumness_verdict);
    println!("coherence          {}", r.coherence_verdict);
    println!(
        "design check       {}  (max deviation {:.2} sd, limit {})",
        r.design_check.status, r.design_check.max_deviation_sigma, r.design_check.sigma_limit
    );
    println!("version            {}", r.version);
}

pub fn certify(input: &Path, d: usize, alpha: f64, format: Format) -> Result<u8> {
    let file = File::open(input).with_context(|| format!("cannot open {}", input.display()))?;
    let counts = counts_from_reader(BufReader::new(file), d)
        .with_context(|| format!("reading {}", input.display()))?;
    let report = report_from_counts(&counts, alpha)?;
    match format {
        Format::Structured => {
            let mut doc = serde_json::to_value(&report)?;
            doc["command"] = json!("certify");
            print_json(&doc)?;
        }
        Format::Text => print_report_text(&report),
    }
    Ok(match report.quantumness_verdict {
        QuantumnessVerdict::Quantum => EXIT_OK,
        QuantumnessVerdict::NotCertified => EXIT_NOT_CERTIFIED,
    })
}
