//! Command-line front end: `point`, `sweep` and `figure`.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical
//! convergence failure, 4 sweep finished with failed cells.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peaky::analytic::Method;
use peaky::channel::FadingSpec;
use peaky::modem::Scheme;
use peaky::montecarlo::Reception;
use peaky::numerics::QuadratureSpec;
use peaky::sweep::{
    check_methods, evaluate_cell, run_sweep, write_report, CellSpec, Figure, OutputFormat, SnrAxis,
    SweepConfig, SweepReport,
};
use peaky::Error;

#[derive(Parser)]
#[command(
    name = "peaky",
    version,
    about = "Symbol error probability of on-off PSK over fading channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Threads used for Monte Carlo and sweep cells.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one (nu, SNR) cell.
    Point {
        #[arg(long)]
        scheme: Scheme,
        #[arg(long)]
        nu: f64,
        /// rayleigh:<E|h|^2>, rician:k=<K>[:ms=<E|h|^2>] or rician:m=<|m|>:var=<variance>.
        #[arg(long)]
        channel: FadingSpec,
        #[arg(long)]
        reception: Reception,
        /// P/N0 in dB.
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "ebn0_db",
            required_unless_present = "ebn0_db"
        )]
        snr_db: Option<f64>,
        /// Eb/N0 in dB, with Eb = P / entropy in bits.
        #[arg(long, allow_hyphen_values = true)]
        ebn0_db: Option<f64>,
        /// analytic, mc, region-quadrature; comma separated.
        #[arg(long, value_delimiter = ',', default_value = "analytic")]
        method: Vec<Method>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        /// Relative quadrature tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the grid described by a JSON config file.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Run a figure preset: fig1, fig2 or fig3.
    Figure {
        name: Figure,
        /// Methods to evaluate; analytic when omitted.
        #[arg(long, value_delimiter = ',')]
        method: Vec<Method>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn io_failure(e: io::Error) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn emit(report: &SweepReport, output: &Output) -> Result<(), Failure> {
    let format = output.format.unwrap_or(report.config.output_format);
    let sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path).map_err(|e| {
            io_failure(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    write_report(report, format, &mut sink)?;
    sink.flush().map_err(io_failure)
}

fn finish_sweep(report: SweepReport, output: &Output) -> Result<(), Failure> {
    emit(&report, output)?;
    match report.failures() {
        0 => Ok(()),
        n => Err(Failure {
            code: 4,
            message: format!("{n} of {} cells failed", report.rows.len()),
        }),
    }
}

fn tolerance(tol: Option<f64>) -> Result<f64, Failure> {
    let tol = tol.unwrap_or(QuadratureSpec::default().rel_tol);
    QuadratureSpec::with_rel_tol(tol)?;
    Ok(tol)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Point {
            scheme,
            nu,
            channel,
            reception,
            snr_db,
            ebn0_db,
            method,
            seed,
            trials,
            tol,
            output,
        } => {
            let tol = tolerance(tol)?;
            check_methods(scheme, reception, &channel, &method)?;
            let axis = match (snr_db, ebn0_db) {
                (Some(x), None) => SnrAxis::SnrDb(x),
                (None, Some(x)) => SnrAxis::EbN0Db(x),
                _ => unreachable!("clap enforces exactly one SNR flag"),
            };
            let cell = CellSpec {
                scheme,
                reception,
                channel,
                nu,
                axis,
                methods: method.clone(),
                trials,
                seed,
                workers: output.workers.max(1),
                quad: QuadratureSpec::with_rel_tol(tol)?,
            };
            let (row, error) = evaluate_cell(&cell);
            if let Some(e) = error {
                return Err(e.into());
            }
            let config = SweepConfig {
                scheme,
                reception,
                channel,
                nu_list: vec![nu],
                ebn0_db_list: vec![row.ebn0_db],
                methods: method,
                trials,
                seed,
                tol,
                output_format: OutputFormat::Csv,
            };
            emit(
                &SweepReport {
                    config,
                    rows: vec![row],
                },
                &output,
            )
        }
        Command::Sweep { config, output } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                io_failure(io::Error::new(
                    e.kind(),
                    format!("{}: {e}", config.display()),
                ))
            })?;
            let cfg = SweepConfig::from_json(&text)?;
            finish_sweep(run_sweep(&cfg, output.workers)?, &output)
        }
        Command::Figure {
            name,
            method,
            seed,
            trials,
            tol,
            output,
        } => {
            let cfg = name.config(method, trials, seed, tolerance(tol)?)?;
            finish_sweep(run_sweep(&cfg, output.workers)?, &output)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("peaky: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
