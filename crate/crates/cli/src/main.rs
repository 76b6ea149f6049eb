//! `pillowcase`: representation varieties, shears, splices and the surgery
//! calculus from the command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on domain errors
//! (including an empty result under `--expect-nonempty`).

mod args;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde::Serialize;

use pillowcase_core::charvar::{self, RepRecord, TraceConfig};
use pillowcase_core::knot_groups::{splice, torus_knot, trefoil, unknot, KnotPresentation};
use pillowcase_core::pillowcase::{straight_path, PillowCurve, PillowPoint};
use pillowcase_core::shear::{self, ShearError, ShearProgram};
use pillowcase_core::splice_solver::{self, SpliceError, SpliceRecord};
use pillowcase_core::surgery_calculus::{self, AxiomSet};
use pillowcase_core::svg::{emit_svg, Mark};

use args::{Cli, Command, Global, ShearCommand, TriangleCommand};
use output::Sink;

/// A failure that maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct DomainError(String);

fn domain(msg: impl Into<String>) -> anyhow::Error {
    DomainError(msg.into()).into()
}

fn parse_knot(name: &str) -> Result<KnotPresentation> {
    match name {
        "trefoil" => return Ok(trefoil()),
        "unknot" => return Ok(unknot()),
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("torus:") {
        let (p, q) = rest.split_once(',').with_context(|| format!("expected torus:p,q, got {name:?}"))?;
        let (p, q) = (p.trim().parse()?, q.trim().parse()?);
        return torus_knot(p, q).map_err(|e| domain(e.to_string()));
    }
    let text = std::fs::read_to_string(name).with_context(|| format!("reading knot file {name}"))?;
    KnotPresentation::from_json(&text).map_err(|e| domain(e.to_string()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn read_curve(path: &std::path::Path) -> Result<PillowCurve> {
    let c: PillowCurve = read_json(path)?;
    c.validate().map_err(|e| domain(e.to_string()))?;
    Ok(c)
}

fn trace_config(g: &Global, restarts: usize) -> Result<TraceConfig> {
    let cfg = TraceConfig { step: g.step, newton_tol: g.tol, rng_seed: g.seed, restarts, ..TraceConfig::default() };
    cfg.validate().map_err(|e| domain(e.to_string()))?;
    Ok(cfg)
}

#[derive(Serialize)]
struct CharvarReport<'a> {
    knot: &'a str,
    config: &'a TraceConfig,
    curves: &'a [PillowCurve],
    min_distance_to_cut_lines: Option<f64>,
}

fn run_charvar(g: &Global, sink: &Sink, knot: &str, restarts: usize) -> Result<()> {
    let k = parse_knot(knot)?;
    let cfg = trace_config(g, restarts)?;
    let t = charvar::trace(&k, &cfg).map_err(|e| domain(e.to_string()))?;
    let cut = charvar::min_distance_to_cut_lines(&t.curves).ok();
    sink.json("curves.json", &CharvarReport { knot: &k.label, config: &cfg, curves: &t.curves, min_distance_to_cut_lines: cut })?;
    let records: Vec<RepRecord> = t.records(&k);
    sink.json("reps.json", &records)?;
    sink.svg("charvar.svg", &emit_svg(&t.curves, &[]))?;
    println!("{}: {} irreducible arc(s)", k.label, t.branches.len());
    Ok(())
}

#[derive(Serialize)]
struct FitOutput<'a> {
    converged: bool,
    distance: f64,
    steps: usize,
    program: &'a ShearProgram,
}

fn run_shear(g: &Global, sink: &Sink, cmd: &ShearCommand) -> Result<()> {
    match cmd {
        ShearCommand::Fit { target, budget, distance } => {
            let target = read_curve(target)?;
            let (program, dist, converged) = match shear::fit_program_to_path(&target, *budget, *distance) {
                Ok(r) => (r.program, r.distance, true),
                Err(ShearError::BudgetExceeded { best, distance }) => (best, distance, false),
                Err(e) => return Err(domain(e.to_string())),
            };
            sink.json("program.json", &program)?;
            sink.json("fit.json", &FitOutput { converged, distance: dist, steps: program.steps.len(), program: &program })?;
            let mut image = shear::apply_program(&program, &straight_path());
            image.label = "image".into();
            sink.svg("fit.svg", &emit_svg(&[target, image], &[]))?;
            println!("fit: {} step(s), distance {dist:.3e}", program.steps.len());
            if !converged {
                bail!(domain(format!("budget {budget} exhausted at distance {dist:.3e}")));
            }
            Ok(())
        }
        ShearCommand::Apply { program, curve } => {
            let prog: ShearProgram = read_json(program)?;
            let c = read_curve(curve)?;
            let img = shear::apply_program(&prog, &c);
            sink.json("curve.json", &img)?;
            sink.svg("apply.svg", &emit_svg(&[c, img.clone()], &[]))?;
            println!("apply: {} vertices", img.len());
            Ok(())
        }
        ShearCommand::Critical { knot, program, restarts, expect_nonempty } => {
            let k = parse_knot(knot)?;
            let prog: ShearProgram = match program {
                Some(p) => read_json(p)?,
                None => ShearProgram::empty(),
            };
            let cfg = trace_config(g, *restarts)?;
            let t = charvar::trace(&k, &cfg).map_err(|e| domain(e.to_string()))?;
            let cs = shear::perturbed_critical_set_in(&k, &t, &prog, &cfg).map_err(|e| domain(e.to_string()))?;
            #[derive(Serialize)]
            struct Point {
                rep: RepRecord,
                multiplicity: u32,
                source: String,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                knot: &'a str,
                curve: &'a PillowCurve,
                points: Vec<Point>,
            }
            let points: Vec<Point> = cs
                .points
                .iter()
                .map(|p| Point { rep: p.rep.record(&k), multiplicity: p.multiplicity, source: p.source.clone() })
                .collect();
            sink.json("critical.json", &Out { knot: &k.label, curve: &cs.curve, points })?;
            let mut curves = t.curves.clone();
            let mut c = cs.curve.clone();
            c.label = "c'".into();
            curves.push(c);
            let marks: Vec<Mark> = cs
                .points
                .iter()
                .map(|p| Mark { point: PillowPoint { alpha: p.rep.alpha, beta: p.rep.beta }, label: "x2".into() })
                .collect();
            sink.svg("critical.svg", &emit_svg(&curves, &marks))?;
            println!("critical: {} point(s), each double-covered", cs.points.len());
            if *expect_nonempty && cs.points.is_empty() {
                bail!(domain("critical set is empty"));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpliceOutput<'a> {
    label: String,
    casson_note: &'a str,
    witnesses: Vec<SpliceRecord>,
}

fn run_splice(g: &Global, sink: &Sink, left: &str, right: &str, restarts: usize, expect_nonempty: bool) -> Result<()> {
    let p = splice(parse_knot(left)?, parse_knot(right)?).map_err(|e| domain(e.to_string()))?;
    let cfg = trace_config(g, restarts)?;
    let s = splice_solver::search(&p, &cfg).map_err(|e| domain(e.to_string()))?;
    let reps = match splice_solver::reps_from_search(&p, &s, &cfg) {
        Ok(r) => r,
        Err(SpliceError::NoIntersections) => vec![],
        Err(e) => return Err(domain(e.to_string())),
    };
    let note = splice_solver::casson_note(&p);
    sink.json("splice.json", &SpliceOutput { label: p.label(), casson_note: &note, witnesses: reps.iter().map(|r| r.record(&p)).collect() })?;
    let mut curves: Vec<PillowCurve> = s.left.irreducible_curves().map(|c| relabel(c, "left")).collect();
    curves.extend(s.right_transposed.iter().map(|c| relabel(c, "right")));
    let marks: Vec<Mark> = reps.iter().map(|r| Mark { point: r.point, label: format!("residual {:.1e}", r.residual) }).collect();
    sink.svg("splice.svg", &emit_svg(&curves, &marks))?;
    println!("{}: {} witness(es)", p.label(), reps.len());
    if !note.is_empty() {
        println!("{note}");
    }
    if reps.is_empty() && expect_nonempty {
        bail!(domain("no splice witnesses away from the abelian loci"));
    }
    Ok(())
}

fn relabel(c: &PillowCurve, side: &str) -> PillowCurve {
    let mut c = c.clone();
    c.label = format!("{side}-{}", c.label);
    c
}

fn run_triangle(sink: &Sink, cmd: &TriangleCommand) -> Result<()> {
    let TriangleCommand::Run { axioms, window } = cmd;
    let text = std::fs::read_to_string(axioms).with_context(|| format!("reading {}", axioms.display()))?;
    let a = AxiomSet::from_json(&text).map_err(|e| domain(e.to_string()))?;
    let r = surgery_calculus::run(&a, *window).map_err(|e| domain(e.to_string()))?;
    let transcript = match &r.contradiction {
        Some(c) => surgery_calculus::explain(&r.store, c).map_err(|e| domain(e.to_string()))?,
        None => {
            let mut s = String::new();
            for (f, d) in r.store.facts() {
                s.push_str(&format!("{f}   {}\n", d.rule));
            }
            s.push_str("SATURATED without contradiction\n");
            s
        }
    };
    sink.text("derivation.txt", &transcript)?;
    if let Some(c) = &r.contradiction {
        sink.json("derivation.json", &surgery_calculus::explain_tree(&r.store, c).map_err(|e| domain(e.to_string()))?)?;
    }
    print!("{transcript}");
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let sink = Sink::new(&cli.global.out, cli.global.format)?;
    match &cli.command {
        Command::Charvar { knot, restarts } => run_charvar(&cli.global, &sink, knot, *restarts),
        Command::Shear(cmd) => run_shear(&cli.global, &sink, cmd),
        Command::Splice { left, right, restarts, expect_nonempty } => {
            run_splice(&cli.global, &sink, left, right, *restarts, *expect_nonempty)
        }
        Command::Triangle(cmd) => run_triangle(&sink, cmd),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<DomainError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
