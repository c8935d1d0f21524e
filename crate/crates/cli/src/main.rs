use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use announce_core::bisim::{distinguishing_formula, levels_on, stable_on};
use announce_core::mcheck::DEFAULT_BUDGET;
use announce_core::suite::{self, CriterionResult};
use announce_core::tiling::{gen_cb, gen_grid_model, gen_local, gen_sat, search_tiling, CbKind};
use announce_core::{
    CheckContext, CheckError, CheckOptions, Formula, FormulaError, Model, ModelError, PropId, TileGrid, TileSet,
    TilingError,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

const CB_BUDGET: u64 = 1 << 22;

#[derive(Debug, Parser)]
#[command(name = "announce", version, about = "Model checker for epistemic logics with quantified announcements")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula at a state of a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        formula: String,
        #[arg(long, env = "ANNOUNCE_BUDGET", default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        /// Read coalition boxes literally instead of the dual reading.
        #[arg(long)]
        cal_literal: bool,
    },
    /// Dump the n-bisimulation partition, or a distinguishing formula.
    Bisim {
        #[arg(long)]
        model: PathBuf,
        #[arg(short = 'n')]
        n: Option<usize>,
        /// Use the stable (largest) bisimulation instead of level n.
        #[arg(long, conflicts_with = "n")]
        stable: bool,
        #[arg(long)]
        distinguish: Option<String>,
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
    },
    /// Write a gadget formula or a checkerboard model.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        tiles: Option<PathBuf>,
        /// A tiling to encode; searched for when absent.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find the least valid W×H tiling for a tile set.
    TileSearch {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
    },
    /// Run the property suites and the acceptance criteria.
    Suite {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// State caps for the random-model property sweep.
        #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
        sizes: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Sat,
    Local,
    CbApal,
    CbGal,
    CbCal,
    Grid,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serialisable"));
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --kind {kind}")))
}

fn load_model(path: &Path) -> Result<Model> {
    Ok(Model::from_json(&read(path)?)?.0)
}

fn cmd_check(pretty: bool, model: &Path, point: &str, text: &str, budget: u64, cal_literal: bool) -> Result<bool> {
    let m = load_model(model)?;
    let f = Formula::parse(text)?;
    let opts = CheckOptions {
        budget,
        cal_literal,
        ..CheckOptions::default()
    };
    let mut ctx = CheckContext::with_options(&m, opts);
    let report = ctx.report(point, &f)?;
    if pretty {
        println!("{} ⊨ {} : {}", report.point, report.formula, report.value);
        println!("candidates enumerated: {}", report.candidates_enumerated);
        println!("elapsed: {} ms", report.elapsed_ms);
        if let Some(r) = &report.refutation {
            println!("refuted at {} by announcing {{{}}}", r.state, r.announcement.join(", "));
        }
    } else {
        emit(&report);
    }
    Ok(report.value)
}

#[derive(Serialize)]
struct Distinguished<'a> {
    state: &'a str,
    n: usize,
    formula: String,
}

fn cmd_bisim(
    pretty: bool,
    model: &Path,
    n: Option<usize>,
    stable: bool,
    distinguish: Option<&str>,
    atoms: Option<Vec<String>>,
) -> Result<()> {
    let m = load_model(model)?;
    let pi: Vec<PropId> = match atoms {
        Some(names) => names.iter().map(|a| PropId::new(a.trim())).collect(),
        None => m.atoms().to_vec(),
    };
    if let Some(state) = distinguish {
        let n = n.ok_or_else(|| CliError::Usage("--distinguish needs -n".into()))?;
        let f = distinguishing_formula(&m, &pi, n, state)?;
        if pretty {
            println!("{f}");
        } else {
            emit(&Distinguished {
                state,
                n,
                formula: f.to_string(),
            });
        }
        return Ok(());
    }
    let part = match (n, stable) {
        (Some(n), _) => levels_on(&m, &m.full_set(), &pi, n).pop().expect("levels 0..=n"),
        (None, true) => stable_on(&m, &m.full_set(), &pi),
        (None, false) => return Err(CliError::Usage("give -n N or --stable".into())),
    };
    let blocks = part.names(&m);
    if pretty {
        for b in &blocks {
            println!("{{{}}}", b.join(", "));
        }
    } else {
        emit(&blocks);
    }
    Ok(())
}

#[derive(Serialize)]
struct Written<'a> {
    kind: &'a str,
    out: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<String>,
}

fn load_tiles(tiles: Option<&Path>, kind: &str) -> Result<TileSet> {
    let path = require(tiles, "tiles", kind)?;
    Ok(TileSet::from_json(&read(path)?)?)
}

fn cmd_gen(
    pretty: bool,
    kind: GenKind,
    tiles: Option<&Path>,
    grid: Option<&Path>,
    width: Option<usize>,
    height: Option<usize>,
    out: &Path,
) -> Result<()> {
    let name = kind.to_possible_value().expect("named").get_name().to_string();
    let formula = match kind {
        GenKind::Sat => Some(gen_sat(&load_tiles(tiles, &name)?)?),
        GenKind::Local => Some(gen_local()),
        GenKind::CbApal => Some(gen_cb(CbKind::Apal)),
        GenKind::CbGal => Some(gen_cb(CbKind::Gal)),
        GenKind::CbCal => Some(gen_cb(CbKind::Cal)),
        GenKind::Grid => None,
    };
    let report = if let Some(f) = formula {
        write(out, &format!("{f}\n"))?;
        Written {
            kind: &name,
            out: out.display().to_string(),
            states: None,
            point: None,
        }
    } else {
        let ts = load_tiles(tiles, &name)?;
        let g = match grid {
            Some(path) => TileGrid::from_json(&read(path)?)?,
            None => {
                let (w, h) = (require(width, "width", &name)?, require(height, "height", &name)?);
                search_tiling(&ts, w, h).ok_or(TilingError::InvalidTiling)?
            }
        };
        let pm = gen_grid_model(&ts, &g)?;
        let file = pm.model.to_file(Some(pm.point_name()));
        write(out, &(serde_json::to_string_pretty(&file).expect("serialisable") + "\n"))?;
        Written {
            kind: &name,
            out: out.display().to_string(),
            states: Some(pm.model.len()),
            point: Some(pm.point_name().to_string()),
        }
    };
    if pretty {
        match report.states {
            Some(n) => println!("wrote {}-state model to {}", n, report.out),
            None => println!("wrote {} formula to {}", name, report.out),
        }
    } else {
        emit(&report);
    }
    Ok(())
}

fn cmd_tile_search(pretty: bool, tiles: &Path, width: usize, height: usize) -> Result<bool> {
    let ts = TileSet::from_json(&read(tiles)?)?;
    let found = search_tiling(&ts, width, height);
    if pretty {
        match &found {
            Some(g) => {
                for row in g.rows().iter().rev() {
                    println!("{}", row.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "));
                }
            }
            None => println!("no {width}x{height} tiling"),
        }
    } else {
        emit(&found);
    }
    Ok(found.is_some())
}

#[derive(Serialize)]
struct SuiteReport {
    seed: u64,
    sizes: Vec<usize>,
    passed: bool,
    warnings: Vec<String>,
    criteria: Vec<CriterionResult>,
}

fn cmd_suite(pretty: bool, seed: u64, sizes: &[String]) -> Result<bool> {
    let sizes: Vec<usize> = sizes
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad size `{s}`"))))
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    let mut criteria = Vec::new();
    if sizes.is_empty() {
        warnings.push("no sizes given; nothing was run".to_string());
    } else {
        criteria.extend(suite::properties(seed, &sizes));
        criteria.extend(suite::acceptance(seed, Some(CB_BUDGET)));
    }
    let passed = criteria.iter().all(|c| c.passed || !c.asserted);
    if pretty {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        for c in &criteria {
            println!("{}", c.line());
        }
        println!("{}", if passed { "suite passed" } else { "suite FAILED" });
    } else {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        emit(&SuiteReport {
            seed,
            sizes,
            passed,
            warnings,
            criteria,
        });
    }
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Check {
            model,
            point,
            formula,
            budget,
            cal_literal,
        } => cmd_check(pretty, &model, &point, &formula, budget, cal_literal),
        Command::Bisim {
            model,
            n,
            stable,
            distinguish,
            atoms,
        } => cmd_bisim(pretty, &model, n, stable, distinguish.as_deref(), atoms).map(|()| true),
        Command::Gen {
            kind,
            tiles,
            grid,
            width,
            height,
            out,
        } => cmd_gen(pretty, kind, tiles.as_deref(), grid.as_deref(), width, height, &out).map(|()| true),
        Command::TileSearch { tiles, width, height } => cmd_tile_search(pretty, &tiles, width, height),
        Command::Suite { seed, sizes } => cmd_suite(pretty, seed, &sizes),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
