//! Command-line front end: constants tables, counterexample campaigns,
//! the fixed-horizon demonstration and the tilted-martingale check.
//!
//! Every flag can also be supplied through an environment variable with the
//! `NOVIKOV_` prefix (e.g. `NOVIKOV_SEED=7`). Exit codes: 0 = all verdicts
//! as expected, 2 = an analytic certificate check failed, 3 = the Monte
//! Carlo verdict contradicts the analytic prediction.

use clap::{Args, Parser, Subcommand, ValueEnum};
use novikov::certificate::Variant;
use novikov::report::{
    self, CommandKind, Format, Report, RunConfig,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "novikov", version, about = "Optimal exponential-martingale constants: evaluation, certificates and Monte Carlo witnesses")]
struct Cli {
    /// Number of worker threads for Monte Carlo (estimates are bit-identical
    /// for any value).
    #[arg(long, global = true, env = "NOVIKOV_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Alpha,
    Beta,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonArgs {
    /// Number of Monte Carlo paths.
    #[arg(long, default_value_t = 1_000_000, env = "NOVIKOV_N_PATHS")]
    n_paths: u64,

    /// Master seed for the splittable counter-based generator.
    #[arg(long, default_value_t = 42, env = "NOVIKOV_SEED")]
    seed: u64,

    /// Censoring cap on jumps scanned per path.
    #[arg(long, default_value_t = 10_000_000, env = "NOVIKOV_MAX_JUMPS")]
    max_jumps: u64,

    /// Two-sided confidence level for reported intervals.
    #[arg(long, default_value_t = 0.99, env = "NOVIKOV_CI_LEVEL")]
    ci_level: f64,

    /// Write the report here instead of stdout.
    #[arg(long, env = "NOVIKOV_OUT")]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value = "json", env = "NOVIKOV_FORMAT")]
    format: FormatArg,

    /// Also dump the first N paths' consumed jump times as CSV next to the
    /// report (or to stdout when no --out is given).
    #[arg(long, value_name = "N", env = "NOVIKOV_DUMP_PATHS")]
    dump_paths: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the constant functions on a grid of jump floors.
    Constants {
        /// Lower end of the grid (at least -1).
        #[arg(long, allow_hyphen_values = true, default_value_t = -1.0, env = "NOVIKOV_A_LO")]
        a_lo: f64,
        /// Upper end of the grid.
        #[arg(long, allow_hyphen_values = true, default_value_t = 20.0, env = "NOVIKOV_A_HI")]
        a_hi: f64,
        /// Number of grid points.
        #[arg(long, default_value_t = 211, env = "NOVIKOV_POINTS")]
        points: usize,
        #[arg(long, env = "NOVIKOV_OUT")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json", env = "NOVIKOV_FORMAT")]
        format: FormatArg,
    },
    /// Solve a counterexample certificate, verify it analytically and run
    /// the Monte Carlo witness campaign.
    Counterexample {
        /// Jump floor of the local martingale class, in [-1, infinity).
        #[arg(long, allow_hyphen_values = true, env = "NOVIKOV_A")]
        a: f64,
        /// Relative shaving of the optimal constant, in (0, 1).
        #[arg(long, default_value_t = 0.2, env = "NOVIKOV_EPS")]
        eps: f64,
        /// Which optimal constant to undercut.
        #[arg(long, value_enum, default_value = "alpha", env = "NOVIKOV_VARIANT")]
        variant: VariantArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fixed-horizon demonstration that the classical one-half criterion
    /// holds for nonnegative jumps.
    NovikovDemo {
        /// Jump scale (must be nonnegative here).
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0, env = "NOVIKOV_A")]
        a: f64,
        /// Fixed time horizon.
        #[arg(long, default_value_t = 1.0, env = "NOVIKOV_T0")]
        t0: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check that the tilted family has constant unit mean over time.
    LbMartingale {
        /// Tilt parameter b (must exceed -1).
        #[arg(long, allow_hyphen_values = true, env = "NOVIKOV_B")]
        b: f64,
        /// Exponential tilt rate lambda.
        #[arg(long, allow_hyphen_values = true, env = "NOVIKOV_LAMBDA")]
        lambda: f64,
        /// Evaluation times (repeatable).
        #[arg(long = "time", required = true, env = "NOVIKOV_TIMES", value_delimiter = ',')]
        times: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: could not configure {workers} workers: {err}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> novikov::Result<ExitCode> {
    match command {
        Command::Constants { a_lo, a_hi, points, out, format } => {
            let table = report::constants_table(a_lo, a_hi, points)?;
            let rendered = match format {
                FormatArg::Json => table.to_json(),
                FormatArg::Csv => table.to_csv(),
            };
            emit(&rendered, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample { a, eps, variant, common } => {
            let mut config = base_config(CommandKind::Counterexample, &common);
            config.a = a;
            config.eps = eps;
            config.variant = match variant {
                VariantArg::Alpha => Variant::Alpha,
                VariantArg::Beta => Variant::Beta,
            };
            let report = report::run_counterexample(&config)?;
            finish(report, &common)
        }
        Command::NovikovDemo { a, t0, common } => {
            let mut config = base_config(CommandKind::NovikovDemo, &common);
            config.a = a;
            config.t0 = Some(t0);
            let report = report::run_novikov_demo(&config)?;
            finish(report, &common)
        }
        Command::LbMartingale { b, lambda, times, common } => {
            let mut config = base_config(CommandKind::LbMartingale, &common);
            config.b = Some(b);
            config.lambda = Some(lambda);
            config.times = Some(times);
            let report = report::run_lb_martingale(&config)?;
            finish(report, &common)
        }
    }
}

fn base_config(command: CommandKind, common: &CommonArgs) -> RunConfig {
    let mut config = RunConfig::new(command);
    config.n_paths = common.n_paths;
    config.master_seed = common.seed;
    config.max_jumps = common.max_jumps;
    config.ci_level = common.ci_level;
    config.output_path = common.out.as_ref().map(|p| p.display().to_string());
    config.format = match common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    config
}

fn finish(report: Report, common: &CommonArgs) -> novikov::Result<ExitCode> {
    let rendered = match report.config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(&rendered, common.out.as_deref())?;
    if let Some(n_dump) = common.dump_paths {
        let csv = report::dump_paths_csv(&report.config, n_dump)?;
        match common.out.as_deref() {
            Some(path) => {
                let dump_path = path.with_extension("paths.csv");
                std::fs::write(&dump_path, csv).map_err(|e| {
                    novikov::Error::Config(format!("cannot write {}: {e}", dump_path.display()))
                })?;
                eprintln!("path dump written to {}", dump_path.display());
            }
            None => print!("{csv}"),
        }
    }
    eprintln!("verdict: {}", report.final_verdict);
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn emit(rendered: &str, out: Option<&Path>) -> novikov::Result<()> {
    match out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| {
            novikov::Error::Config(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            println!("{rendered}");
            Ok(())
        }
    }
}
