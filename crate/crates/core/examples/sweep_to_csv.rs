//! A small grid sweep written as CSV to standard output.

use peaky::analytic::Method;
use peaky::modem::Scheme;
use peaky::montecarlo::Reception;
use peaky::sweep::{run_sweep, write_csv, OutputFormat, SweepConfig};

fn main() -> peaky::Result<()> {
    let cfg = SweepConfig {
        scheme: Scheme::Ooqpsk,
        reception: Reception::Noncoherent,
        channel: "rician:k=5".parse()?,
        nu_list: vec![1.0, 0.5, 0.1],
        ebn0_db_list: vec![0.0, 10.0, 20.0],
        methods: vec![Method::Analytic, Method::MonteCarlo],
        trials: 200_000,
        seed: 42,
        tol: 1e-10,
        output_format: OutputFormat::Csv,
    };
    let report = run_sweep(&cfg, 4)?;
    write_csv(&report.rows, std::io::stdout().lock())
}
