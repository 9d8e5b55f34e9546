//! `metastable` — predict exponentially small eigenvalues of metastable
//! operators from the topology of the potential landscape, and verify
//! the predictions against assembled grid operators.
//!
//! Exit codes: 0 success, 2 hypothesis-validation failure, 3 resolution
//! failure, 4 spectral window count mismatch, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use metastable::operator::{dump_matrix, OperatorKind};
use metastable::report::{
    analyze_pipeline, build_operator, run_analyze, run_predict, run_sweep, run_verify,
    to_json_string, write_json, write_rows_csv, ReportError, RunConfig,
};

#[derive(Parser)]
#[command(name = "metastable", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    /// Ball-walk Markov operator (rho = 1/(2d+4)).
    Walk,
    /// Twisted (Witten-type) Laplacian (rho = 1).
    Witten,
}

impl From<KindArg> for OperatorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Walk => OperatorKind::RandomWalk,
            KindArg::Witten => OperatorKind::Witten,
        }
    }
}

#[derive(Args)]
struct CommonOut {
    /// Write the JSON report here (falls back to the config's
    /// `output.json`, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Label the landscape: critical points, levels, depths, classes.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Predict the small eigenvalues at a given h without assembling an
    /// operator.
    Predict {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        h: f64,
        /// `walk`, `witten`, or an explicit positive real.
        #[arg(long)]
        rho: String,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Assemble the operator, compute its small spectrum, and compare
    /// with the prediction.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        h: f64,
        #[arg(long, value_enum)]
        operator: KindArg,
        /// Override the operator grid size.
        #[arg(long)]
        nodes: Option<usize>,
        /// Spectral window is [0, C*h]; defaults from the landscape.
        #[arg(long = "window-c")]
        window_c: Option<f64>,
        /// Also dump the assembled matrix (binary CSR) to this path.
        #[arg(long = "dump-matrix")]
        dump_matrix: Option<PathBuf>,
        #[command(flatten)]
        out: CommonOut,
    },
    /// Verify over several h values, optionally extrapolating the
    /// prefactor to h = 0.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated, strictly increasing (falls back to the
        /// config's `operator.h_list`).
        #[arg(long = "h-list", value_delimiter = ',')]
        h_list: Vec<f64>,
        #[arg(long, value_enum)]
        operator: KindArg,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long = "window-c")]
        window_c: Option<f64>,
        /// Fit ratio = C0 + C1*h per level and report C0.
        #[arg(long)]
        fit: bool,
        #[command(flatten)]
        out: CommonOut,
    },
}

fn parse_rho(s: &str, dim: usize) -> Result<f64, ReportError> {
    match s {
        "walk" => Ok(OperatorKind::RandomWalk.rho(dim)),
        "witten" => Ok(OperatorKind::Witten.rho(dim)),
        other => {
            let v: f64 = other
                .parse()
                .map_err(|_| ReportError::Config(format!("--rho '{other}': expected walk, witten, or a positive real")))?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(ReportError::Config(format!("--rho {v} must be positive")));
            }
            Ok(v)
        }
    }
}

fn emit<T: serde::Serialize>(
    report: &T,
    cfg: &RunConfig,
    out: &CommonOut,
) -> Result<(), ReportError> {
    match out.out.as_ref().or(cfg.output.json.as_ref()) {
        Some(path) => write_json(report, path),
        None => {
            use std::io::Write;
            let s = to_json_string(report)?;
            // tolerate a closed pipe (e.g. `| head`)
            match writeln!(std::io::stdout(), "{s}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(ReportError::from),
            }
        }
    }
}

fn run() -> Result<(), ReportError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let report = run_analyze(&cfg)?;
            emit(&report, &cfg, &out)
        }
        Command::Predict { config, h, rho, out } => {
            let cfg = RunConfig::load(&config)?;
            let rho = parse_rho(&rho, cfg.potential.dimension)?;
            let report = run_predict(&cfg, h, rho)?;
            emit(&report, &cfg, &out)
        }
        Command::Verify {
            config,
            h,
            operator,
            nodes,
            window_c,
            dump_matrix: dump,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            let kind: OperatorKind = operator.into();
            let report = run_verify(&cfg, kind, h, nodes, window_c)?;
            if let Some(path) = dump {
                let art = analyze_pipeline(&cfg)?;
                let op = build_operator(&art.potential, kind, report.nodes, h)?;
                let file = std::fs::File::create(path)?;
                dump_matrix(&op, std::io::BufWriter::new(file))?;
            }
            if let Some(csv_path) = &cfg.output.csv {
                write_rows_csv(&report.rows, csv_path)?;
            }
            emit(&report, &cfg, &out)
        }
        Command::Sweep {
            config,
            h_list,
            operator,
            nodes,
            window_c,
            fit,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            let h_list = if h_list.is_empty() {
                cfg.operator
                    .as_ref()
                    .and_then(|o| o.h_list.clone())
                    .ok_or_else(|| {
                        ReportError::Config("no --h-list given and no operator.h_list in config".into())
                    })?
            } else {
                h_list
            };
            let report = run_sweep(&cfg, operator.into(), &h_list, nodes, window_c, fit)?;
            if let Some(csv_path) = &cfg.output.csv {
                write_rows_csv(&report.rows, csv_path)?;
            }
            emit(&report, &cfg, &out)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
