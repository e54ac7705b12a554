//! `cantor-dyn`: generate witness maps, run certificate suites, compute
//! exact Prohorov distances and summarise reports.

mod config;
mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cantor_dynamics::maps::{MapFile, MapTower};
use cantor_dynamics::measures::{prohorov_with, AtomicMeasure, Backend};
use cantor_dynamics::rational;
use clap::{Parser, Subcommand};
use serde_json::json;

use config::ExperimentConfig;
use report::Report;
use suites::{Context, Runner, SUITES};

const EXIT_FAIL: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cantor-dyn",
    version,
    about = "Exact dynamics of induced maps on Cantor-space measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a witness map and write `map.json` and `tower.json`.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run certificate suites and write `report.json` and `summary.csv`.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// liyorke, entropy, chains, shadowing, recurrence or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact Prohorov distance between two measure files.
    Prohorov {
        first: PathBuf,
        second: PathBuf,
        /// enumeration, flow, auto or both.
        #[arg(long, default_value = "auto")]
        backend: String,
    },
    /// Summarise a report written by `analyze`.
    Report {
        /// A `report.json` or the directory holding it.
        path: PathBuf,
    },
}

/// A failure with the exit code it maps to.
struct Failure(u8, String);

fn config_error(message: impl Into<String>) -> Failure {
    Failure(EXIT_CONFIG, message.into())
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure(1, format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate { config, out } => generate(&config, &out),
        Command::Analyze {
            config,
            suite,
            out,
            seed,
        } => analyze(&config, &suite, &out, seed),
        Command::Prohorov {
            first,
            second,
            backend,
        } => prohorov(&first, &second, &backend),
        Command::Report { path } => summarize(&path),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn load_tower(config: &ExperimentConfig) -> Result<MapTower, Failure> {
    let tower = match &config.map.file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let file: MapFile = serde_json::from_str(&text)
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            MapTower::from_file(&file)
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?
        }
        None => MapTower::generate(config.map.kind, &config.level_specs())
            .map_err(|e| config_error(e.to_string()))?,
    };
    if tower.kind != config.map.kind {
        return Err(config_error(format!(
            "map file holds a {:?} tower but the config asks for {:?}",
            tower.kind, config.map.kind
        )));
    }
    Ok(tower)
}

fn tower_metadata(tower: &MapTower) -> serde_json::Value {
    let levels: Vec<_> = tower
        .levels
        .iter()
        .map(|l| {
            json!({
                "q": l.q,
                "loop_length": l.loop_len,
                "cells": l.partition.card(),
                "mesh": rational::format(&l.partition.mesh()),
                "separation": rational::format(&l.partition.separation()),
                "shapes": l.components.iter().map(|c| c.kind()).collect::<Vec<_>>(),
                "components": l.components,
                "strictness": l.strictness,
                "loops": l.loops,
            })
        })
        .collect();
    json!({
        "kind": tower.kind,
        "rules": tower.map.rules().len(),
        "invertible": tower.inverse.is_some(),
        "levels": levels,
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("values serialize") + "\n";
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn generate(config_path: &Path, out: &Path) -> Result<bool, Failure> {
    let config = ExperimentConfig::load(config_path).map_err(config_error)?;
    let tower = load_tower(&config)?;
    // the written file must certify again on its own
    let file = tower.to_file();
    let again = MapTower::from_file(&file)
        .map_err(|e| Failure(EXIT_FAIL, format!("re-verification failed: {e}")))?;
    let same = again
        .levels
        .iter()
        .zip(&tower.levels)
        .all(|(a, b)| a.components == b.components);
    if !same {
        return Err(Failure(
            EXIT_FAIL,
            "re-verification classified different shapes".into(),
        ));
    }
    std::fs::create_dir_all(out).map_err(|e| io_error(out, e))?;
    write_json(&out.join("map.json"), &file)?;
    write_json(&out.join("tower.json"), &tower_metadata(&tower))?;
    for (i, l) in tower.levels.iter().enumerate() {
        let shapes: Vec<String> = l
            .components
            .iter()
            .map(|c| format!("{:?}", c.kind()))
            .collect();
        println!(
            "level {i}: {} cells, {}",
            l.partition.card(),
            shapes.join(", ")
        );
    }
    println!("wrote {}", out.join("map.json").display());
    Ok(true)
}

fn analyze(
    config_path: &Path,
    suite: &str,
    out: &Path,
    seed: Option<u64>,
) -> Result<bool, Failure> {
    let mut config = ExperimentConfig::load(config_path).map_err(config_error)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let selected: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(config_error(format!(
                "unknown suite {s:?}; expected one of {SUITES:?} or all"
            )))
        }
    };
    let tower = load_tower(&config)?;
    let grid = suites::grid_for(&config, &tower).map_err(config_error)?;
    let ctx = Context {
        config: &config,
        tower: &tower,
        grid,
    };
    let mut runner = Runner::new();
    for s in selected {
        ctx.run(s, &mut runner);
    }
    let report = Report {
        config: config.clone(),
        items: runner.items,
        timings_ms: runner.timings_ms,
    };
    report.write(out).map_err(|e| io_error(out, e))?;
    let value = serde_json::to_value(&report).expect("reports serialize");
    let (text, _) = report::describe(&value).map_err(|e| Failure(1, e))?;
    print!("{text}");
    Ok(report.all_passed())
}

fn read_measure(path: &Path) -> Result<AtomicMeasure, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    AtomicMeasure::from_text(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn prohorov(first: &Path, second: &Path, backend: &str) -> Result<bool, Failure> {
    let (mu, nu) = (read_measure(first)?, read_measure(second)?);
    let backends = match backend {
        "both" => vec![Backend::Enumeration, Backend::Flow],
        b => vec![b
            .parse::<Backend>()
            .map_err(|e| config_error(e.to_string()))?],
    };
    let mut values = Vec::new();
    for b in backends {
        let result = prohorov_with(&mu, &nu, b).map_err(|e| Failure(1, e.to_string()))?;
        let witness: Vec<String> = result.witness.iter().map(|w| w.to_string()).collect();
        if values.is_empty() {
            println!("{}", rational::format(&result.value));
        }
        println!(
            "{:?}: {} witness {{{}}}",
            result.backend,
            rational::format(&result.value),
            witness.join(", ")
        );
        values.push(result.value);
    }
    let agree = values.windows(2).all(|w| w[0] == w[1]);
    if !agree {
        eprintln!("backends disagree");
    }
    Ok(agree)
}

fn summarize(path: &Path) -> Result<bool, Failure> {
    let file = if path.is_dir() {
        path.join("report.json")
    } else {
        path.to_path_buf()
    };
    let text = std::fs::read_to_string(&file).map_err(|e| io_error(&file, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| config_error(format!("{}: {e}", file.display())))?;
    let (text, ok) = report::describe(&value).map_err(config_error)?;
    print!("{text}");
    Ok(ok)
}
