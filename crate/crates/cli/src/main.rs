use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use affine_cells::cache::KlCache;
use affine_cells::cells::{CellAnalysis, CellKind};
use affine_cells::convalg::{ConvAlgebra, ConvTarget};
use affine_cells::hecke::KlTable;
use affine_cells::jring::{self, TripleSelection, WitnessOutcome};
use affine_cells::verify::{conjecture_harness, CellSelector, SearchLimits};
use affine_cells::weyl::{Ball, RootDatum, CONVENTION_ID};
use affine_cells::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

/// Kazhdan–Lusztig cells and asymptotic rings of affine Weyl groups.
#[derive(Parser)]
#[command(name = "affcells", version)]
struct Cli {
    /// Root of the KL cache; no cache when unset.
    #[arg(long, global = true, env = "AFFCELLS_CACHE")]
    cache_dir: Option<PathBuf>,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for table builds (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BallArgs {
    /// Root datum, e.g. `A1:sc`, `A2:ad`, `C2:sc`.
    #[arg(long)]
    datum: String,
    #[arg(long)]
    radius: usize,
    /// Include the length-zero elements.
    #[arg(long)]
    extended: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the ball of the given radius.
    Ball(BallArgs),
    /// KL polynomials: one pair `y,w`, or the whole table.
    Klpoly {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long)]
        pair: Option<String>,
    },
    /// Left, right and two-sided cells with their stabilization flags.
    Cells(BallArgs),
    /// The a-function on elements and cells.
    Afn(BallArgs),
    /// γ-constants and distinguished involutions.
    Gamma(BallArgs),
    /// Checks of the ring axioms of `J`, lemma witnesses and a cell table.
    Jring {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value = "lowest")]
        cell: String,
    },
    /// Convolution algebra of a target description.
    Convalg {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: u64,
    },
    /// Compare a truncated `J_c` with the convolution algebra of a target.
    Verify {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, default_value = "lowest")]
        cell: String,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: u64,
        #[arg(long, default_value_t = SearchLimits::default().max_nodes)]
        max_nodes: u64,
    },
}

fn kl_table(args: &BallArgs, cache_dir: Option<&Path>) -> Result<(Arc<KlTable>, String)> {
    let datum = Arc::new(RootDatum::from_spec(&args.datum)?);
    let ball = Arc::new(Ball::new(datum.clone(), args.radius, args.extended)?);
    let (kl, note) = match cache_dir {
        Some(dir) => {
            let mut cache = KlCache::open(dir, &datum.spec_string())?;
            let kl = KlTable::build_with_cache(ball, &mut cache)?;
            let note = format!("cache {}: {} columns replayed", cache.path().display(), kl.loaded_from_cache());
            (kl, note)
        }
        None => (KlTable::build(ball)?, "no cache".to_string()),
    };
    Ok((Arc::new(kl), note))
}

fn analysis(args: &BallArgs, cache_dir: Option<&Path>) -> Result<(CellAnalysis, String)> {
    let (kl, note) = kl_table(args, cache_dir)?;
    Ok((CellAnalysis::build(kl)?, note))
}

fn ball_config(args: &BallArgs) -> Value {
    json!({ "datum": args.datum, "radius": args.radius, "extended": args.extended })
}

fn read_target(path: &Path) -> Result<ConvTarget> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn cells_json(an: &CellAnalysis) -> Value {
    let ball = an.ball();
    let kinds = [("left", CellKind::Left), ("right", CellKind::Right), ("two_sided", CellKind::TwoSided)];
    let mut out = serde_json::Map::new();
    for (name, kind) in kinds {
        let cells: Vec<Value> = an
            .cells
            .cells(kind)
            .iter()
            .map(|c| {
                let mut v = json!({
                    "id": c.id,
                    "stabilized": c.stabilized,
                    "size": c.members.len(),
                    "members": c.members.iter().map(|&w| ball.word(w)).collect::<Vec<_>>(),
                });
                if kind == CellKind::TwoSided {
                    v["a"] = json!(an.afn.cell(c.id).map(|a| a.value));
                    v["a_stabilized"] = json!(an.afn.cell(c.id).is_some_and(|a| a.stabilized));
                }
                v
            })
            .collect();
        out.insert(name.to_string(), Value::Array(cells));
    }
    Value::Object(out)
}

fn run(cli: &Cli) -> Result<(Value, String)> {
    let cache = cli.cache_dir.as_deref();
    match &cli.command {
        Command::Ball(args) => {
            let datum = Arc::new(RootDatum::from_spec(&args.datum)?);
            let ball = Ball::new(datum, args.radius, args.extended)?;
            let summary = format!("{} elements of length at most {}", ball.len(), args.radius);
            Ok((json!({ "command": "ball", "config": ball_config(args), "size": ball.len(), "elements": ball.records() }), summary))
        }
        Command::Klpoly { ball: args, pair } => {
            let (kl, note) = kl_table(args, cache)?;
            let ball = kl.ball();
            match pair {
                Some(p) => {
                    let (y, w) = p.split_once(',').ok_or_else(|| Error::Config(format!("pair {p:?} is not y,w")))?;
                    let (yi, wi) = (ball.id_of_word(y)?, ball.id_of_word(w)?);
                    let poly = kl.p(yi, wi);
                    let summary = format!("p({}, {}) = {poly}\n{note}", ball.word(yi), ball.word(wi));
                    Ok((
                        json!({
                            "command": "klpoly",
                            "config": ball_config(args),
                            "y": ball.word(yi),
                            "w": ball.word(wi),
                            "p": poly,
                            "display": poly.to_string(),
                            "mu": kl.mu(yi, wi),
                        }),
                        summary,
                    ))
                }
                None => {
                    let columns: Vec<Value> = (0..ball.len())
                        .map(|w| {
                            let entries: Vec<Value> = kl.column(w).iter().map(|(y, p)| json!([ball.word(*y), p])).collect();
                            json!({ "w": ball.word(w), "entries": entries })
                        })
                        .collect();
                    let summary = format!("{} columns\n{note}", columns.len());
                    Ok((json!({ "command": "klpoly", "config": ball_config(args), "columns": columns }), summary))
                }
            }
        }
        Command::Cells(args) => {
            let (an, note) = analysis(args, cache)?;
            let stable = an.cells.stabilized(CellKind::TwoSided).len();
            let total = an.cells.cells(CellKind::TwoSided).len();
            let summary = format!("{stable} stabilized two-sided cells ({total} found in the ball)\n{note}");
            let mut v = json!({ "command": "cells", "config": ball_config(args), "stabilized_two_sided": stable });
            v["cells"] = cells_json(&an);
            Ok((v, summary))
        }
        Command::Afn(args) => {
            let (an, note) = analysis(args, cache)?;
            let ball = an.ball();
            let elements: Vec<Value> = (0..ball.len())
                .map(|z| {
                    let a = an.afn.element(z);
                    json!({ "w": ball.word(z), "a": a.map(|a| a.value), "stabilized": a.is_some_and(|a| a.stabilized) })
                })
                .collect();
            let cells: Vec<Value> = an
                .cells
                .cells(CellKind::TwoSided)
                .iter()
                .map(|c| {
                    let a = an.afn.cell(c.id);
                    json!({ "cell": c.id, "a": a.map(|a| a.value), "stabilized": a.is_some_and(|a| a.stabilized) })
                })
                .collect();
            let mut values: Vec<String> = an
                .cells
                .stabilized(CellKind::TwoSided)
                .iter()
                .filter_map(|c| an.afn.stable_cell_value(c.id).ok().map(|a| format!("{a} on {}", ball.word(c.members[0]))))
                .collect();
            values.sort();
            let summary = format!("stabilized a-values: {}\n{note}", values.join(", "));
            Ok((json!({ "command": "afn", "config": ball_config(args), "elements": elements, "cells": cells }), summary))
        }
        Command::Gamma(args) => {
            let (an, note) = analysis(args, cache)?;
            let ball = an.ball();
            let triples: Vec<Value> = an
                .gamma
                .triples()
                .into_iter()
                .map(|(x, y, z, g)| json!([ball.word(x), ball.word(y), ball.word(z), g]))
                .collect();
            let distinguished: Vec<&str> = an.gamma.distinguished().iter().map(|&d| ball.word(d)).collect();
            let summary = format!("{} nonzero γ, distinguished: {}\n{note}", triples.len(), distinguished.join(" "));
            Ok((
                json!({ "command": "gamma", "config": ball_config(args), "triples": triples, "distinguished": distinguished }),
                summary,
            ))
        }
        Command::Jring { ball: args, cell } => {
            let (an, note) = analysis(args, cache)?;
            let ball = an.ball();
            let c = cell.parse::<CellSelector>()?.resolve(&an)?;
            let unit = jring::unit_check(&an)?;
            let orth = jring::cell_orthogonality_check(&an)?;
            let assoc = jring::associativity_check(&an, TripleSelection::All)?;
            let left: Vec<usize> =
                an.cells.left_cells_in(c).iter().filter(|l| l.stabilized).map(|l| l.id).collect();
            let mut witnesses = Vec::new();
            let mut found = 0;
            for &g1 in &left {
                for &g2 in &left {
                    let outcome = jring::lemma_witness(&an, g1, g2)?;
                    let w = match &outcome {
                        WitnessOutcome::Found(w) => {
                            found += 1;
                            json!({
                                "outcome": "found",
                                "element": ball.word(w.element),
                                "w": ball.word(w.w),
                                "y": ball.word(w.y),
                                "w_prime": ball.word(w.w_prime),
                            })
                        }
                        WitnessOutcome::Inconclusive { searched } => json!({ "outcome": "inconclusive", "searched": searched }),
                    };
                    witnesses.push(json!({ "from": g1, "to": g2, "witness": w }));
                }
            }
            let table: Vec<Value> = jring::cell_table(&an, c)?
                .into_iter()
                .filter(|(_, _, terms, _)| !terms.is_empty())
                .map(|(x, y, terms, complete)| {
                    let t: Vec<Value> = terms.iter().map(|&(w, k)| json!([ball.word(w), k])).collect();
                    json!({ "x": ball.word(x), "y": ball.word(y), "terms": t, "complete": complete })
                })
                .collect();
            let summary = format!(
                "unit law on {unit} elements, orthogonality on {orth} pairs, associativity on {assoc} triples\n\
                 lemma witnesses found for {found} of {} pairs of left cells in cell {c}\n{note}",
                left.len() * left.len()
            );
            Ok((
                json!({
                    "command": "jring",
                    "config": ball_config(args),
                    "cell": c,
                    "unit_checked": unit,
                    "orthogonality_checked": orth,
                    "associativity_checked": assoc,
                    "witnesses": witnesses,
                    "cell_table": table,
                }),
                summary,
            ))
        }
        Command::Convalg { target, bound } => {
            let t = read_target(target)?;
            let alg = ConvAlgebra::build(&t.group, &t.set, *bound)?;
            let based = alg.to_based()?;
            let (assoc, bad) = based.associativity();
            if let Some(&[x, y, z]) = bad.first() {
                return Err(Error::Invariant(format!(
                    "convolution is not associative on ({}, {}, {})",
                    based.labels[x], based.labels[y], based.labels[z]
                )));
            }
            let unit = based.unit_check()?;
            let mut oracle_checked = 0;
            if !alg.ring().is_connected() {
                for i in 0..alg.len() {
                    for j in 0..alg.len() {
                        if alg.convolve_oracle(i, j)? != *based.product(i, j) {
                            return Err(Error::Invariant(format!(
                                "Mackey product {} * {} disagrees with the oracle",
                                based.labels[i], based.labels[j]
                            )));
                        }
                        oracle_checked += 1;
                    }
                }
            }
            let summary = format!(
                "{} basis elements over {} orbits; unit law on {unit}, associativity on {assoc} triples, oracle on {oracle_checked} products",
                alg.len(),
                alg.orbits().len()
            );
            Ok((
                json!({
                    "command": "convalg",
                    "config": { "target": t, "bound": bound },
                    "orbits": alg.orbits(),
                    "basis": alg.basis(),
                    "algebra": based,
                    "associativity_checked": assoc,
                    "oracle_checked": oracle_checked,
                }),
                summary,
            ))
        }
        Command::Verify { ball: args, cell, target, bound, max_nodes } => {
            let (an, note) = analysis(args, cache)?;
            let t = read_target(target)?;
            let report = conjecture_harness(&an, cell.parse()?, &t, *bound, SearchLimits { max_nodes: *max_nodes })?;
            let summary = format!(
                "verdict {:?} ({} convention), {} basis pairs, {} triples compared, {} mismatches\n{note}",
                report.verdict,
                report.convention,
                report.bijection.len(),
                report.checked_triples,
                report.mismatches.len()
            );
            let mut config = ball_config(args);
            config["cell"] = json!(cell);
            config["target"] = json!(t);
            config["bound"] = json!(bound);
            Ok((json!({ "command": "verify", "config": config, "report": report }), summary))
        }
    }
}

fn emit(cli: &Cli, mut value: Value) -> std::io::Result<()> {
    value["convention"] = json!(CONVENTION_ID);
    let text = serde_json::to_string_pretty(&value).expect("json values serialize") + "\n";
    match &cli.out {
        Some(path) => fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(&cli) {
        Ok((value, summary)) => {
            if let Err(e) = emit(&cli, value) {
                eprintln!("cannot write output: {e}");
                return ExitCode::from(3);
            }
            if cli.out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let record = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            if cli.out.is_some() {
                println!("{record}");
            }
            let _ = emit(&cli, record);
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
