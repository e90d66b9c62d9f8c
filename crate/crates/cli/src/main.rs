//! Command-line front end for the orbit census pipeline.
//!
//! Subcommands: `validate` a model file, `census` a model into an orbit-table
//! CSV, compute `thermo` constants, build a measured-vs-predicted `report`,
//! and tabulate `clt` box statistics. Orbit tables produced elsewhere can be
//! analyzed by passing `--table` (with `--summary` for the constants) in
//! place of `--model`.
//!
//! Exit codes: 0 success, 2 usage/input error, 3 resource budget exceeded,
//! 4 numeric failure. Failures print one machine-parsable line to stderr:
//! `error: <kind>: <message>`.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orbitpair::asymptotics::{default_delta, BoxRegion};
use orbitpair::census::{enumerate_prime_orbits, CensusOptions, OrbitTable};
use orbitpair::model::{validate_model, HomologyClass, MarkovFlowModel};
use orbitpair::report::convergence_report;
use orbitpair::thermo::ThermoSummary;
use orbitpair::Error;

#[derive(Parser)]
#[command(
    name = "orbitpair",
    about = "Census and verification tool for periodic-orbit pair statistics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file: strong connectivity and the lattice-length heuristic.
    Validate {
        /// Model file (TOML).
        #[arg(long)]
        model: PathBuf,
    },
    /// Enumerate prime orbits up to --tmax and write the orbit-table CSV.
    Census {
        #[arg(long)]
        model: PathBuf,
        /// Length cutoff.
        #[arg(long)]
        tmax: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compute the thermodynamic constants of a model.
    Thermo {
        #[arg(long)]
        model: PathBuf,
        /// Output directory for thermo.txt (the machine-readable record).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured-vs-predicted convergence report over a time grid.
    Report {
        #[command(flatten)]
        source: SourceArgs,
        /// Time grid start:stop:step.
        #[arg(long)]
        tgrid: String,
        /// Class difference to compare (comma-separated integers, repeatable).
        #[arg(long = "beta", allow_hyphen_values = true)]
        betas: Vec<String>,
        /// Window offset to compare (comma-separated integers, repeatable).
        #[arg(long = "alpha", allow_hyphen_values = true)]
        alphas: Vec<String>,
        /// Box for the rescaled-class statistics, per axis lo:hi (repeatable).
        #[arg(long = "box", allow_hyphen_values = true)]
        boxes: Vec<String>,
        /// Truncation radius for lattice Gaussian sums (default: tail < 0.01).
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Empirical-vs-Gaussian box table over a time grid.
    Clt {
        #[command(flatten)]
        source: SourceArgs,
        /// Time grid start:stop:step.
        #[arg(long)]
        tgrid: String,
        /// Box per axis lo:hi (repeatable; defaults: [-1,1]^k and [0,inf)^k).
        #[arg(long = "box", allow_hyphen_values = true)]
        boxes: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
}

/// Where the orbit data comes from: a model to enumerate, or a prebuilt table.
#[derive(Args)]
struct SourceArgs {
    /// Model file (TOML); requires --tmax.
    #[arg(long, conflicts_with = "table")]
    model: Option<PathBuf>,
    /// Length cutoff for enumeration (with --model).
    #[arg(long)]
    tmax: Option<f64>,
    /// Ingest an orbit-table CSV instead of enumerating a model.
    #[arg(long, requires = "summary")]
    table: Option<PathBuf>,
    /// Thermo record file (as written by `thermo`), required with --table.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Worker threads for enumeration.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Orbit budget for enumeration.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Seed for quasi-Monte Carlo box masses.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Resource(_) => (3, "resource"),
            Error::Numeric(_) => (4, "numeric"),
            _ => (2, "usage"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.kind, f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { model } => {
            let model = MarkovFlowModel::from_path(&model)?;
            let report = validate_model(&model);
            println!("strongly_connected: {}", report.strongly_connected);
            println!("lattice_warning:    {}", report.lattice_warning);
            println!("k:                  {}", report.k);
            println!("edge_count:         {}", report.edge_count);
            if report.lattice_warning {
                eprintln!(
                    "notice: edge-length ratios look rational; the census stays exact but the \
                     Gaussian asymptotics assume non-arithmetic lengths"
                );
            }
            if !report.strongly_connected {
                return Err(Failure::usage(
                    "model is not strongly connected; downstream operations would reject it",
                ));
            }
            Ok(())
        }
        Command::Census { model, tmax, run } => {
            let model = load_model(&model)?;
            let table = enumerate_prime_orbits(
                &model,
                tmax,
                &CensusOptions {
                    workers: run.workers.max(1),
                    max_orbits: run.budget,
                },
            )?;
            let path = write_atomic(&run.out, "census.csv", &table.to_csv())?;
            eprintln!(
                "census: {} orbits in {} entries, wrote {}",
                table.count_orbits(tmax).unwrap_or(0),
                table.entries().len(),
                path.display()
            );
            Ok(())
        }
        Command::Thermo { model, out } => {
            let model = load_model(&model)?;
            let summary = ThermoSummary::compute(&model)?;
            print!("{}", summary.to_display());
            println!("record: {}", summary.to_record());
            if let Some(out) = out {
                let path = write_atomic(&out, "thermo.txt", &(summary.to_record() + "\n"))?;
                eprintln!("thermo: wrote {}", path.display());
            }
            Ok(())
        }
        Command::Report {
            source,
            tgrid,
            betas,
            alphas,
            boxes,
            delta,
            run,
        } => {
            let (table, summary, hash) = load_source(&source, &run)?;
            let k = table.betti_number();
            check_dims(k, &summary)?;
            let t_grid = parse_grid(&tgrid, table.t_max())?;
            let betas = parse_classes(&betas, k, "beta")?;
            let alphas = parse_classes(&alphas, k, "alpha")?;
            let boxes = parse_boxes(&boxes, k, false)?;
            let delta = delta.unwrap_or_else(|| default_delta(k, 0.01));
            let report = convergence_report(
                &table, &summary, &betas, &alphas, &boxes, &t_grid, delta, hash, run.seed,
            )?;
            let path = write_atomic(&run.out, "report.csv", &report.to_csv())?;
            eprintln!(
                "report: {} rows, wrote {}",
                report.rows.len(),
                path.display()
            );
            Ok(())
        }
        Command::Clt {
            source,
            tgrid,
            boxes,
            run,
        } => {
            let (table, summary, hash) = load_source(&source, &run)?;
            let k = table.betti_number();
            check_dims(k, &summary)?;
            let t_grid = parse_grid(&tgrid, table.t_max())?;
            let boxes = parse_boxes(&boxes, k, true)?;
            let delta = default_delta(k, 0.01);
            let report = convergence_report(
                &table,
                &summary,
                &[],
                &[],
                &boxes,
                &t_grid,
                delta,
                hash,
                run.seed,
            )?;
            let path = write_atomic(&run.out, "clt.csv", &report.to_csv())?;
            eprintln!("clt: {} rows, wrote {}", report.rows.len(), path.display());
            Ok(())
        }
    }
}

/// Load and validate a model file; a lattice warning is a notice, a failed
/// connectivity check is fatal.
fn load_model(path: &Path) -> Result<MarkovFlowModel, Failure> {
    let model = MarkovFlowModel::from_path(path)?;
    let report = validate_model(&model);
    if report.lattice_warning {
        eprintln!(
            "notice: edge-length ratios look rational; the census stays exact but the Gaussian \
             asymptotics assume non-arithmetic lengths"
        );
    }
    if !report.strongly_connected {
        return Err(Failure::usage("model is not strongly connected"));
    }
    Ok(model)
}

/// Resolve the orbit table and thermo constants from either a model
/// (enumerate + compute) or an ingested table with a summary record file.
fn load_source(
    source: &SourceArgs,
    run: &RunArgs,
) -> Result<(OrbitTable, ThermoSummary, Option<u64>), Failure> {
    match (&source.model, &source.table) {
        (Some(model_path), None) => {
            let tmax = source
                .tmax
                .ok_or_else(|| Failure::usage("--model needs --tmax to bound the enumeration"))?;
            let model = load_model(model_path)?;
            let table = enumerate_prime_orbits(
                &model,
                tmax,
                &CensusOptions {
                    workers: run.workers.max(1),
                    max_orbits: run.budget,
                },
            )?;
            let summary = ThermoSummary::compute(&model)?;
            Ok((table, summary, Some(model.content_hash())))
        }
        (None, Some(table_path)) => {
            let text = std::fs::read_to_string(table_path).map_err(Error::from)?;
            let table = OrbitTable::from_csv_str(&text)?;
            let summary_path = source
                .summary
                .as_ref()
                .ok_or_else(|| Failure::usage("--table needs --summary for the constants"))?;
            let record = std::fs::read_to_string(summary_path).map_err(Error::from)?;
            let summary = ThermoSummary::from_record(record.trim())?;
            Ok((table, summary, None))
        }
        _ => Err(Failure::usage(
            "exactly one of --model or --table must be given",
        )),
    }
}

fn check_dims(k: usize, summary: &ThermoSummary) -> Result<(), Failure> {
    if summary.k() != k {
        return Err(Failure::usage(format!(
            "summary is for k={}, table has k={k}",
            summary.k()
        )));
    }
    Ok(())
}

/// Parse `start:stop:step` into an inclusive grid.
fn parse_grid(spec: &str, t_max: f64) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::usage(format!(
            "time grid {spec:?} is not of the form start:stop:step"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Failure::usage(format!("unparsable grid number {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start > 0.0 && stop >= start && step > 0.0) {
        return Err(Failure::usage(format!(
            "time grid needs 0 < start <= stop and step > 0, got {spec:?}"
        )));
    }
    if stop > t_max {
        return Err(Failure::usage(format!(
            "grid stop {stop} exceeds the table cutoff T_max={t_max}"
        )));
    }
    let mut grid = Vec::new();
    let mut t = start;
    while t <= stop + 1e-12 * step {
        grid.push(t.min(stop));
        t += step;
    }
    Ok(grid)
}

fn parse_classes(specs: &[String], k: usize, what: &str) -> Result<Vec<HomologyClass>, Failure> {
    let mut out = Vec::new();
    for spec in specs {
        let coords: Vec<i64> = spec
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|_| Failure::usage(format!("unparsable {what} entry {p:?}")))
            })
            .collect::<Result<_, _>>()?;
        if coords.len() != k {
            return Err(Failure::usage(format!(
                "{what} {spec:?} has dimension {}, model has k={k}",
                coords.len()
            )));
        }
        out.push(HomologyClass::new(coords));
    }
    if out.is_empty() {
        out.push(HomologyClass::zero(k));
    }
    Ok(out)
}

fn parse_boxes(specs: &[String], k: usize, default_pair: bool) -> Result<Vec<BoxRegion>, Failure> {
    let mut out = Vec::new();
    for spec in specs {
        let region = BoxRegion::parse(spec)?;
        if region.dim() != k {
            return Err(Failure::usage(format!(
                "box {spec:?} has dimension {}, model has k={k}",
                region.dim()
            )));
        }
        out.push(region);
    }
    if out.is_empty() && default_pair {
        out.push(BoxRegion::cube(k, -1.0, 1.0));
        out.push(BoxRegion::new(vec![0.0; k], vec![f64::INFINITY; k]).unwrap());
    }
    Ok(out)
}

/// Write through a temp file and rename, so a failed run never leaves a
/// partial output behind.
fn write_atomic(dir: &Path, name: &str, content: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(Error::from)?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp).map_err(Error::from)?;
        f.write_all(content.as_bytes()).map_err(Error::from)?;
        f.sync_all().map_err(Error::from)?;
    }
    std::fs::rename(&tmp, &target).map_err(Error::from)?;
    Ok(target)
}
