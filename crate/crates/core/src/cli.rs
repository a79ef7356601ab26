//! The `qcarnot` command line: `solve`, `cycle`, `sweep` and `verify`.
//!
//! Single objects go to stdout as JSON; tables go to files as CSV (or
//! JSON for `sweep --format json`). Exit codes: 0 on success, 1 on a
//! computational or feasibility failure, 2 on a usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cycle::{run_cycle, ClausiusDiagnostic, CycleReport, CycleSpec, StrokeSample};
use crate::error::Error;
use crate::maxent::{equilibrium_state, slope_from_beta, MaxEntState, DEFAULT_TOL};
use crate::spectrum::SpectrumModel;
use crate::verify::{run_verification, Equilibrium, Level};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    SquareWell,
    Harmonic,
}

impl From<ModelArg> for SpectrumModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::SquareWell => SpectrumModel::SquareWell,
            ModelArg::Harmonic => SpectrumModel::Harmonic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Parser)]
#[command(name = "qcarnot", version, about = "Maximum-entropy states and reversible cycles of a quantum Carnot engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the equilibrium state at one effective width.
    Solve {
        #[arg(long, value_enum, default_value = "square-well")]
        model: ModelArg,
        /// Effective width λ = V·√E.
        #[arg(long, allow_negative_numbers = true, conflicts_with = "width")]
        lambda: Option<f64>,
        /// Well width; combined with --energy into λ.
        #[arg(long, requires = "energy")]
        width: Option<f64>,
        /// Bath energy, used with --width.
        #[arg(long)]
        energy: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Display multiplier for temperatures.
        #[arg(long, default_value_t = 1.0)]
        energy_scale: f64,
    },
    /// Run a reversible cycle and write its stroke samples.
    Cycle {
        #[arg(long, value_enum, default_value = "square-well")]
        model: ModelArg,
        #[arg(long)]
        v1: f64,
        #[arg(long)]
        v2: f64,
        #[arg(long)]
        v3: f64,
        /// Hot bath energy.
        #[arg(long = "e-h", default_value_t = 1.0)]
        e_h: f64,
        /// Override the closing width V4 (makes the cycle irreversible).
        #[arg(long)]
        v4: Option<f64>,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        /// Stroke samples CSV.
        #[arg(long, default_value = "strokes.csv")]
        output: PathBuf,
        /// Display multiplier for E, P, T and heat/work.
        #[arg(long, default_value_t = 1.0)]
        energy_scale: f64,
    },
    /// Tabulate the equilibrium state over a grid of effective widths.
    Sweep {
        #[arg(long, value_enum, default_value = "square-well")]
        model: ModelArg,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        end: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file; stdout when omitted or `-`.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Display multiplier for temperatures.
        #[arg(long, default_value_t = 1.0)]
        energy_scale: f64,
    },
    /// Run the oracle suites and print a JSON summary.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
    },
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    model: SpectrumModel,
    lambda: f64,
    alpha: f64,
    #[serde(rename = "S")]
    entropy: f64,
    #[serde(rename = "T")]
    temperature: f64,
    #[serde(rename = "N")]
    levels: usize,
    #[serde(rename = "dS_dlambda")]
    slope: f64,
    boundary: bool,
    normalization_residual: f64,
    constraint_residual: f64,
}

/// One row of a sweep, in output column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub alpha: f64,
    #[serde(rename = "S")]
    pub entropy: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "dS_dlambda")]
    pub slope: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
struct StrokeRow {
    stroke: &'static str,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "P")]
    p: f64,
    #[serde(rename = "E")]
    e: f64,
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "T")]
    t: f64,
}

/// Column names of the stroke samples file.
pub const STROKE_COLUMNS: [&str; 6] = ["stroke", "V", "P", "E", "S", "T"];

/// Column names of a sweep table.
pub const SWEEP_COLUMNS: [&str; 6] = ["lambda", "alpha", "S", "T", "dS_dlambda", "residual"];

fn check_scale(scale: f64) -> Result<(), CliError> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--energy-scale must be positive, got {scale}")))
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out).map_err(io_err(Path::new("<stdout>")))
}

fn sweep_row(state: &MaxEntState, scale: f64) -> SweepRow {
    SweepRow {
        lambda: state.lambda_eff,
        alpha: state.alpha,
        entropy: state.entropy,
        temperature: scale * state.temperature,
        slope: slope_from_beta(state.lambda_eff, -state.ln_alpha).value,
        residual: state.constraint_residual(),
    }
}

/// Evaluates a sweep on `points` equally spaced effective widths.
pub fn sweep(model: SpectrumModel, start: f64, end: f64, points: usize, tol: f64) -> Result<Vec<SweepRow>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(CliError::Usage(format!("need --end > --start, got {start} and {end}")));
    }
    let boundary = model.ground_coefficient().sqrt();
    if start < boundary {
        return Err(CliError::Usage(format!("--start {start} is below the feasible boundary {boundary}")));
    }
    let last = (points - 1) as f64;
    (0..points)
        .into_par_iter()
        .map(|i| {
            let lambda = if i + 1 == points { end } else { start + (end - start) * (i as f64 / last) };
            equilibrium_state(model, lambda, tol).map(|s| sweep_row(&s, 1.0)).map_err(CliError::from)
        })
        .collect()
}

fn cmd_solve(out: &mut dyn Write, model: SpectrumModel, lambda: f64, tol: f64, scale: f64) -> Result<(), CliError> {
    check_scale(scale)?;
    let state = equilibrium_state(model, lambda, tol)?;
    let slope = slope_from_beta(lambda, -state.ln_alpha);
    print_json(
        out,
        &SolveOutput {
            model,
            lambda,
            alpha: state.alpha,
            entropy: state.entropy,
            temperature: scale * state.temperature,
            levels: state.levels(),
            slope: slope.value,
            boundary: slope.boundary,
            normalization_residual: state.normalization_residual(),
            constraint_residual: state.constraint_residual(),
        },
    )
}

fn write_strokes(path: &Path, samples: &[StrokeSample], scale: f64) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for s in samples {
        w.serialize(StrokeRow { stroke: s.stroke.label(), v: s.v, p: scale * s.p, e: scale * s.e, s: s.s, t: scale * s.t })?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Debug, Serialize)]
struct CycleOutput {
    #[serde(flatten)]
    report: CycleReport,
    clausius: ClausiusDiagnostic,
}

fn scaled_report(r: &CycleReport, scale: f64) -> CycleOutput {
    CycleOutput {
        report: CycleReport { e_c: scale * r.e_c, q_h: scale * r.q_h, q_c: scale * r.q_c, w_net: scale * r.w_net, ..*r },
        clausius: r.clausius_diagnostic(),
    }
}

fn write_sweep(out: &mut dyn Write, rows: &[SweepRow], format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            if rows.is_empty() {
                w.write_record(SWEEP_COLUMNS)?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(io_err(Path::new("<output>")))?;
            Ok(())
        }
        Format::Json => print_json(out, &rows),
    }
}

/// Runs one parsed command, writing JSON to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve { model, lambda, width, energy, tol, energy_scale } => {
            let lambda = match (lambda, width, energy) {
                (Some(l), None, _) => l,
                (None, Some(v), Some(e)) => {
                    if !(v > 0.0 && e > 0.0) {
                        return Err(CliError::Usage("--width and --energy must be positive".into()));
                    }
                    v * e.sqrt()
                }
                _ => return Err(CliError::Usage("give either --lambda or --width with --energy".into())),
            };
            cmd_solve(out, model.into(), lambda, tol, energy_scale)
        }
        Command::Cycle { model, v1, v2, v3, e_h, v4, samples, output, energy_scale } => {
            check_scale(energy_scale)?;
            if samples < 2 {
                return Err(CliError::Usage(format!("--samples must be at least 2, got {samples}")));
            }
            let spec = CycleSpec { v1, v2, v3, e_h, v4_override: v4 };
            let (report, strokes) = run_cycle(model.into(), &spec, samples)?;
            write_strokes(&output, &strokes, energy_scale)?;
            print_json(out, &scaled_report(&report, energy_scale))
        }
        Command::Sweep { model, start, end, points, format, output, tol, energy_scale } => {
            check_scale(energy_scale)?;
            let mut rows = sweep(model.into(), start, end, points, tol)?;
            rows.iter_mut().for_each(|r| r.temperature *= energy_scale);
            match output {
                Some(path) if path.as_os_str() != "-" => {
                    let file = File::create(&path).map_err(io_err(&path))?;
                    let mut w = BufWriter::new(file);
                    write_sweep(&mut w, &rows, format)?;
                    w.flush().map_err(io_err(&path))
                }
                _ => write_sweep(out, &rows, format),
            }
        }
        Command::Verify { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = run_verification(level, &Equilibrium);
            print_json(out, &report)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Verification(report.failed.join(", ")))
            }
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
