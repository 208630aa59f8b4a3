//! `offsetshape`: local shape of generalized offsets from the command line.

mod analyze;
mod config;
mod ingest;
mod plot;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use offsetshape::verifier::{random_suite, CheckConfig, SuiteBounds, SuiteFlags};
use offsetshape::Tolerance;

use config::{SessionConfig, TOL_ENV};

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_GEOMETRY: i32 = 2;
pub const EXIT_TRUNC: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
    /// Exact ingest hit branches with irrational coefficients.
    pub irrational: bool,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
            irrational: false,
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }

    pub fn geometry(message: impl Into<String>) -> Self {
        Self::new(EXIT_GEOMETRY, message)
    }

    pub fn trunc(message: impl Into<String>) -> Self {
        Self::new(EXIT_TRUNC, message)
    }

    /// Output failures share the geometry code: the run itself was invalid.
    pub fn io(message: impl Into<String>) -> Self {
        Self::new(EXIT_GEOMETRY, message)
    }

    pub fn irrational(count: usize) -> Self {
        Self {
            irrational: true,
            ..Self::geometry(format!(
                "{count} real branch(es) need irrational coefficients"
            ))
        }
    }
}

#[derive(Parser)]
#[command(
    name = "offsetshape",
    version,
    about = "Local shape of generalized offsets to algebraic plane curves"
)]
struct Cli {
    /// JSON session config; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Places, signatures, predictions and series verdicts as JSON.
    Analyze {
        #[command(flatten)]
        geom: GeomArgs,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample the source and its offsets to CSV and SVG.
    Plot {
        #[command(flatten)]
        geom: GeomArgs,
        /// CSV path; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Random cross-check of predictor, series and numerics.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GeomArgs {
    /// Polynomial in x, y, e.g. "x^3 - y^2".
    #[arg(long)]
    curve: Option<String>,
    /// Explicit place "x(h), y(h)".
    #[arg(long, allow_hyphen_values = true)]
    place: Option<String>,
    /// Center "x,y" (rational).
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    /// Offset distance, nonzero (rational or float).
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    /// Rotation angle in radians (float mode).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Exact "cos,sin" pair (exact mode).
    #[arg(long, allow_hyphen_values = true)]
    cosab: Option<String>,
    /// +, - or both.
    #[arg(long, allow_hyphen_values = true)]
    branch: Option<String>,
    /// Series truncation cap (default 64).
    #[arg(long)]
    trunc: Option<usize>,
    /// Float zero tolerance; also OFFSETSHAPE_TOL.
    #[arg(long)]
    tol: Option<f64>,
    /// Half-width of the sampled parameter range (default 0.5).
    #[arg(long)]
    h_max: Option<f64>,
    /// Samples per branch (default 401).
    #[arg(long)]
    samples: Option<usize>,
    /// Write the effective config here.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

impl GeomArgs {
    fn to_config(&self) -> SessionConfig {
        SessionConfig {
            curve: self.curve.clone(),
            place: self.place.clone(),
            point: self.point.clone(),
            d: self.d.clone(),
            theta: self.theta,
            cosab: self.cosab.clone(),
            branches: self.branch.clone(),
            trunc: self.trunc,
            tol: self.tol,
            h_max: self.h_max,
            samples: self.samples,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// RNG seed; equal seeds give identical reports.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of random source places.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Only sources with q = p + 1, p >= 2.
    #[arg(long)]
    force_smoothing: bool,
    /// Only sources with odd p and odd q.
    #[arg(long)]
    force_flex: bool,
    /// Largest p drawn.
    #[arg(long)]
    p_max: Option<u32>,
    /// Largest q drawn.
    #[arg(long)]
    q_max: Option<u32>,
    /// Largest r drawn.
    #[arg(long)]
    r_max: Option<u32>,
    /// Float zero tolerance; also OFFSETSHAPE_TOL.
    #[arg(long)]
    tol: Option<f64>,
    /// Skip the sampled-offset estimates.
    #[arg(long)]
    no_numeric: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => plot::write_file(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::io(format!("stdout: {e}")))
        }
    }
}

fn session(
    cli_config: Option<&PathBuf>,
    flags: SessionConfig,
    save: Option<&PathBuf>,
) -> Result<SessionConfig, CliError> {
    let cfg = SessionConfig::layered(
        cli_config.map(PathBuf::as_path),
        std::env::var(TOL_ENV).ok(),
        &flags,
    )?;
    if let Some(p) = save {
        cfg.save(p)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze { geom, output } => {
            let mut flags = geom.to_config();
            flags.output = output;
            let cfg = session(cli.config.as_ref(), flags, geom.save_config.as_ref())?;
            let report = analyze::analyze(&cfg)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            emit(&text, cfg.output.as_ref())?;
            Ok(report.summary.exit_code)
        }
        Command::Plot { geom, csv, svg } => {
            let mut flags = geom.to_config();
            flags.csv = csv;
            flags.svg = svg;
            let cfg = session(cli.config.as_ref(), flags, geom.save_config.as_ref())?;
            let out = plot::plot(&cfg)?;
            let summary =
                serde_json::to_string_pretty(&out.summary).expect("summary serializes") + "\n";
            match &cfg.csv {
                Some(p) => {
                    let mut buf = Vec::new();
                    plot::write_csv(&out.traces, &mut buf)?;
                    plot::write_file(p, &buf)?;
                    emit(&summary, None)?;
                }
                None => {
                    plot::write_csv(&out.traces, std::io::stdout().lock())?;
                    eprint!("{summary}");
                }
            }
            if let Some(p) = &cfg.svg {
                plot::write_file(p, plot::render_svg(&out.traces).as_bytes())?;
            }
            Ok(0)
        }
        Command::Verify(v) => {
            let flags = SessionConfig {
                tol: v.tol,
                ..Default::default()
            };
            let cfg = session(cli.config.as_ref(), flags, None)?;
            let defaults = SuiteBounds::default();
            let bounds = SuiteBounds {
                p_max: v.p_max.unwrap_or(defaults.p_max),
                q_max: v.q_max.unwrap_or(defaults.q_max),
                r_max: v.r_max.unwrap_or(defaults.r_max),
            };
            if bounds.p_max == 0 || bounds.q_max <= bounds.p_max || bounds.r_max <= bounds.q_max {
                return Err(CliError::parse(
                    "suite bounds need 0 < p_max < q_max < r_max",
                ));
            }
            let flags = SuiteFlags {
                force_smoothing: v.force_smoothing,
                force_flex: v.force_flex,
            };
            if flags.force_smoothing && flags.force_flex {
                return Err(CliError::parse(
                    "--force-smoothing and --force-flex exclude each other",
                ));
            }
            let check = CheckConfig {
                tol: Tolerance(cfg.tol.unwrap_or(Tolerance::DEFAULT.0)),
                numeric: !v.no_numeric,
                ..CheckConfig::default()
            };
            let report = random_suite(v.seed, v.n, bounds, flags, &check);
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            emit(&text, v.report.as_ref())?;
            if report.passed() {
                Ok(0)
            } else {
                for d in &report.disagreements {
                    eprintln!("disagreement at item {} ({}): {}", d.index, d.case, d.repro);
                }
                Ok(EXIT_DISAGREEMENT)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
