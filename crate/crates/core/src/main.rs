use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rotent::cli::{self, OutputFormat, SweepMode, SweepSpec};
use rotent::entropies::QuadratureSpec;
use rotent::measures::WqPath;
use rotent::Error;

#[derive(Parser)]
#[command(
    name = "rotent",
    about = "Entropy and complexity measures of hyperspherical-harmonic densities",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "fs_vs_m")]
    FsVsM,
    #[value(name = "fs_vs_l")]
    FsVsL,
    #[value(name = "fs_diag")]
    FsDiag,
    #[value(name = "fr_vs_m")]
    FrVsM,
    #[value(name = "fr_vs_l")]
    FrVsL,
    #[value(name = "fr_diag")]
    FrDiag,
    #[value(name = "lmc_vs_m")]
    LmcVsM,
    #[value(name = "lmc_vs_l")]
    LmcVsL,
    #[value(name = "lmc_diag")]
    LmcDiag,
    #[value(name = "custom")]
    Custom,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> SweepMode {
        match m {
            ModeArg::FsVsM => SweepMode::FsVsM,
            ModeArg::FsVsL => SweepMode::FsVsL,
            ModeArg::FsDiag => SweepMode::FsDiag,
            ModeArg::FrVsM => SweepMode::FrVsM,
            ModeArg::FrVsL => SweepMode::FrVsL,
            ModeArg::FrDiag => SweepMode::FrDiag,
            ModeArg::LmcVsM => SweepMode::LmcVsM,
            ModeArg::LmcVsL => SweepMode::LmcVsL,
            ModeArg::LmcDiag => SweepMode::LmcDiag,
            ModeArg::Custom => SweepMode::Custom,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Exact,
    Quadrature,
}

impl From<PathArg> for WqPath {
    fn from(p: PathArg) -> WqPath {
        match p {
            PathArg::Exact => WqPath::Exact,
            PathArg::Quadrature => WqPath::Quadrature,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Full measure report for one state, as JSON.
    Report {
        /// State literal "D:mu1,...,m", e.g. "3:2,1".
        #[arg(long)]
        state: String,
        /// Moment orders (repeatable or comma separated); q = 1 redirects
        /// to the Shannon entropy.
        #[arg(long = "q", value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        max_nodes: Option<usize>,
        /// Override the moment path (exact needs integer q).
        #[arg(long, value_enum)]
        force_path: Option<PathArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Figure-reproduction sweeps with deterministic CSV/JSON output.
    Sweep {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Override the l values of vs-m modes (custom: the l grid).
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<i64>>,
        /// Override the m values of vs-l modes (custom: the m grid).
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<i64>>,
        /// Override the offsets of diagonal modes (m = l - a).
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<i64>>,
        /// Upper end of the l range in vs-l and diagonal modes.
        #[arg(long)]
        l_max: Option<i64>,
        /// Moment order for the Fisher-Renyi modes.
        #[arg(long = "q", value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        max_nodes: Option<usize>,
        #[arg(long, value_enum)]
        force_path: Option<PathArg>,
    },
    /// Cross-checks: catalog audit, dual-path agreement, normalization and
    /// the Fisher oracle. Exit code 4 when any check fails.
    Validate {
        #[arg(long, default_value_t = 6)]
        l_max: i64,
        /// Dimensions to cover.
        #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 4, 5])]
        dims: Vec<usize>,
        /// Moment-order grid (integer entries drive the dual-path check).
        #[arg(long = "q", value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        rel_tol: Option<f64>,
        #[arg(long)]
        max_nodes: Option<usize>,
    },
}

fn quad_spec(rel_tol: Option<f64>, max_nodes: Option<usize>) -> Result<QuadratureSpec, Error> {
    let default = QuadratureSpec::default();
    QuadratureSpec::new(
        default.initial_nodes,
        max_nodes.unwrap_or(default.max_nodes),
        rel_tol.unwrap_or(default.rel_tol),
    )
}

fn write_or_print(out: Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn run() -> Result<bool, Error> {
    match Cli::parse().command {
        Command::Report {
            state,
            q,
            rel_tol,
            max_nodes,
            force_path,
            out,
        } => {
            let quad = quad_spec(rel_tol, max_nodes)?;
            let orders = if q.is_empty() { vec![2.0] } else { q };
            let (json, notices) =
                cli::cmd_report(&state, &orders, &quad, force_path.map(WqPath::from))?;
            for notice in notices {
                eprintln!("warning: {notice}");
            }
            write_or_print(out, &json)?;
            Ok(true)
        }
        Command::Sweep {
            mode,
            l,
            m,
            a,
            l_max,
            q,
            out,
            format,
            rel_tol,
            max_nodes,
            force_path,
        } => {
            let spec = SweepSpec {
                mode: mode.into(),
                l_values: l,
                m_values: m,
                a_values: a,
                l_max,
                q: q.first().copied().unwrap_or(2.0),
                out,
                format: match format {
                    FormatArg::Csv => OutputFormat::Csv,
                    FormatArg::Json => OutputFormat::Json,
                },
                quad: quad_spec(rel_tol, max_nodes)?,
                force_path: force_path.map(WqPath::from),
            };
            cli::cmd_sweep(&spec)?;
            Ok(true)
        }
        Command::Validate {
            l_max,
            dims,
            q,
            out,
            rel_tol,
            max_nodes,
        } => {
            let quad = quad_spec(rel_tol, max_nodes)?;
            let grid = if q.is_empty() { vec![1.0, 2.0, 3.0] } else { q };
            let (json, pass) = cli::cmd_validate(l_max, &dims, &grid, &quad)?;
            write_or_print(out, &json)?;
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Io(_) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}
