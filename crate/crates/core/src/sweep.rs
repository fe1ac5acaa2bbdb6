//! Grid sweeps over `(nu, Eb/N0)` cells, figure presets and CSV/JSON output.
//!
//! The transmit power is fixed at 1 and the noise level is set from the
//! requested SNR per bit, so every row also carries the raw `P/N0` in dB.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::analytic::{
    pe_noncoherent_region_quadrature, pe_oobpsk_coherent_avg, pe_ooqpsk_coherent_avg,
    pe_ooqpsk_noncoherent, ErrorEstimate, Method,
};
use crate::channel::FadingSpec;
use crate::modem::{build_constellation, eb_n0_db, snr_from_eb_n0_db, Scheme};
use crate::montecarlo::{simulate, Reception, SimConfig};
use crate::numerics::QuadratureSpec;
use crate::{Error, Result};

/// Transmit power used for every cell.
pub const POWER: f64 = 1.0;

/// Column header of the CSV output.
pub const CSV_HEADER: [&str; 12] = [
    "scheme",
    "reception",
    "channel",
    "nu",
    "ebn0_db",
    "snr_db",
    "pe_analytic",
    "pe_mc",
    "ci_low",
    "ci_high",
    "trials",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::param(format!(
                "unknown output format '{s}' (expected csv or json)"
            ))),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(Method::Analytic),
            "mc" => Ok(Method::MonteCarlo),
            "region-quadrature" => Ok(Method::RegionQuadrature),
            _ => Err(Error::param(format!(
                "unknown method '{s}' (expected analytic, mc or region-quadrature)"
            ))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "mc",
            Method::RegionQuadrature => "region-quadrature",
        })
    }
}

fn channel_to_string<S: Serializer>(
    spec: &FadingSpec,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(spec)
}

fn channel_from_string<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<FadingSpec, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

fn default_trials() -> u64 {
    1_000_000
}

fn default_tol() -> f64 {
    QuadratureSpec::default().rel_tol
}

/// A sweep description, read from and echoed as JSON.
///
/// `channel` uses the textual form accepted by [`FadingSpec`]'s parser
/// (`rayleigh:1`, `rician:k=5`, `rician:m=0.9:var=0.2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub reception: Reception,
    #[serde(
        serialize_with = "channel_to_string",
        deserialize_with = "channel_from_string"
    )]
    pub channel: FadingSpec,
    pub nu_list: Vec<f64>,
    pub ebn0_db_list: Vec<f64>,
    pub methods: Vec<Method>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Relative quadrature tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub output_format: OutputFormat,
}

const REQUIRED_KEYS: [&str; 6] = [
    "scheme",
    "reception",
    "channel",
    "nu_list",
    "ebn0_db_list",
    "methods",
];
const OPTIONAL_KEYS: [&str; 4] = ["trials", "seed", "tol", "output_format"];

/// Checks a method list against a scheme/reception/channel combination.
pub fn check_methods(
    scheme: Scheme,
    reception: Reception,
    channel: &FadingSpec,
    methods: &[Method],
) -> Result<()> {
    if methods.is_empty() {
        return Err(Error::param("at least one method is required"));
    }
    let distinct: BTreeSet<_> = methods.iter().map(|m| m.to_string()).collect();
    if distinct.len() != methods.len() {
        return Err(Error::param("methods contain duplicates"));
    }
    if methods.contains(&Method::Analytic) && methods.contains(&Method::RegionQuadrature) {
        return Err(Error::param(
            "analytic and region-quadrature both fill pe_analytic; request one of them",
        ));
    }
    for m in methods {
        match (m, reception) {
            (Method::Analytic, Reception::Coherent)
                if !matches!(channel, FadingSpec::Rayleigh { .. }) =>
            {
                return Err(Error::Unsupported(
                    "analytic coherent reception is available for Rayleigh fading only".into(),
                ))
            }
            (Method::Analytic, Reception::Noncoherent) if scheme == Scheme::Oobpsk => {
                return Err(Error::Unsupported(
                    "analytic noncoherent OOBPSK is not available; use region-quadrature".into(),
                ))
            }
            (Method::RegionQuadrature, Reception::Coherent) => {
                return Err(Error::Unsupported(
                    "region-quadrature needs noncoherent reception".into(),
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

impl SweepConfig {
    /// Parses a JSON document, reporting every unknown or missing key at once.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::param(format!("config is not JSON: {e}")))?;
        let Value::Object(map) = &value else {
            return Err(Error::param("config must be a JSON object"));
        };
        let unknown: Vec<&str> = map
            .keys()
            .map(String::as_str)
            .filter(|k| !REQUIRED_KEYS.contains(k) && !OPTIONAL_KEYS.contains(k))
            .collect();
        let missing: Vec<&str> = REQUIRED_KEYS
            .iter()
            .copied()
            .filter(|k| !map.contains_key(*k))
            .collect();
        if !unknown.is_empty() || !missing.is_empty() {
            let mut parts = Vec::new();
            if !unknown.is_empty() {
                parts.push(format!("unknown keys: {}", unknown.join(", ")));
            }
            if !missing.is_empty() {
                parts.push(format!("missing keys: {}", missing.join(", ")));
            }
            return Err(Error::param(format!("config: {}", parts.join("; "))));
        }
        let cfg: SweepConfig =
            serde_json::from_value(value).map_err(|e| Error::param(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu_list.is_empty() || self.ebn0_db_list.is_empty() {
            return Err(Error::param("nu_list and ebn0_db_list must be nonempty"));
        }
        if let Some(nu) = self.nu_list.iter().find(|&&nu| !(nu > 0.0 && nu <= 1.0)) {
            return Err(Error::param(format!(
                "duty factor nu = {nu} is outside (0, 1]"
            )));
        }
        if let Some(x) = self.ebn0_db_list.iter().find(|x| !x.is_finite()) {
            return Err(Error::param(format!("Eb/N0 = {x} dB is not finite")));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        self.quadrature()?;
        check_methods(self.scheme, self.reception, &self.channel, &self.methods)
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        QuadratureSpec::with_rel_tol(self.tol)
    }

    /// Number of `(nu, Eb/N0)` cells.
    pub fn cells(&self) -> usize {
        self.nu_list.len() * self.ebn0_db_list.len()
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scheme: Scheme,
    pub reception: Reception,
    pub channel: String,
    pub nu: f64,
    pub ebn0_db: f64,
    /// `P/N0` in dB.
    pub snr_db: f64,
    pub pe_analytic: Option<f64>,
    pub pe_mc: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub trials: Option<u64>,
    pub error: Option<String>,
}

/// Position of a cell on the SNR axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrAxis {
    /// SNR per bit in dB.
    EbN0Db(f64),
    /// `P/N0` in dB.
    SnrDb(f64),
}

/// Everything needed to evaluate one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSpec {
    pub scheme: Scheme,
    pub reception: Reception,
    pub channel: FadingSpec,
    pub nu: f64,
    pub axis: SnrAxis,
    pub methods: Vec<Method>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub quad: QuadratureSpec,
}

fn deterministic(
    method: Method,
    scheme: Scheme,
    reception: Reception,
    channel: &FadingSpec,
    nu: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    match (method, reception, scheme) {
        (Method::Analytic, Reception::Coherent, Scheme::Oobpsk) => {
            pe_oobpsk_coherent_avg(channel, nu, POWER, n0, quad)
        }
        (Method::Analytic, Reception::Coherent, Scheme::Ooqpsk) => {
            pe_ooqpsk_coherent_avg(channel, nu, POWER, n0, quad)
        }
        (Method::Analytic, Reception::Noncoherent, Scheme::Ooqpsk) => {
            pe_ooqpsk_noncoherent(&channel.as_rician(), nu, POWER, n0, quad)
        }
        (Method::RegionQuadrature, Reception::Noncoherent, _) => {
            pe_noncoherent_region_quadrature(scheme, &channel.as_rician(), nu, POWER, n0, quad)
        }
        _ => Err(Error::Unsupported(format!(
            "{method} for {reception} {scheme}"
        ))),
    }
}

/// Evaluates the requested methods at one cell.
///
/// The row is filled with whatever succeeded; the first failure, if any, is
/// returned alongside it (and also written to the row's `error` field).
pub fn evaluate_cell(cell: &CellSpec) -> (CurvePoint, Option<Error>) {
    let mut row = CurvePoint {
        scheme: cell.scheme,
        reception: cell.reception,
        channel: cell.channel.to_string(),
        nu: cell.nu,
        ebn0_db: f64::NAN,
        snr_db: f64::NAN,
        pe_analytic: None,
        pe_mc: None,
        ci_low: None,
        ci_high: None,
        trials: None,
        error: None,
    };
    let mut first_error = None;
    let mut fail = |row: &mut CurvePoint, e: Error| {
        if first_error.is_none() {
            row.error = Some(e.to_string());
            first_error = Some(e);
        }
    };

    let c = match build_constellation(cell.scheme, cell.nu, POWER) {
        Ok(c) => c,
        Err(e) => {
            fail(&mut row, e);
            return (row, first_error);
        }
    };
    let n0 = match cell.axis {
        SnrAxis::EbN0Db(x) => {
            row.ebn0_db = x;
            snr_from_eb_n0_db(x, &c).map(|snr| POWER / snr)
        }
        SnrAxis::SnrDb(x) => {
            let n0 = POWER / 10f64.powf(x / 10.0);
            eb_n0_db(POWER, n0, &c).map(|eb| {
                row.ebn0_db = eb;
                n0
            })
        }
    };
    let n0 = match n0 {
        Ok(n0) if n0 > 0.0 && n0.is_finite() => n0,
        Ok(n0) => {
            fail(
                &mut row,
                Error::param(format!("SNR gives unusable N0 = {n0}")),
            );
            return (row, first_error);
        }
        Err(e) => {
            fail(&mut row, e);
            return (row, first_error);
        }
    };
    row.snr_db = 10.0 * (POWER / n0).log10();

    for &method in &cell.methods {
        match method {
            Method::MonteCarlo => {
                let sim = SimConfig {
                    scheme: cell.scheme,
                    nu: cell.nu,
                    power: POWER,
                    channel: cell.channel,
                    n0,
                    reception: cell.reception,
                    trials: cell.trials,
                    seed: cell.seed,
                    workers: cell.workers,
                };
                match simulate(&sim) {
                    Ok(est) => {
                        row.pe_mc = Some(est.value);
                        row.ci_low = Some(est.ci_low);
                        row.ci_high = Some(est.ci_high);
                        row.trials = Some(est.trials);
                    }
                    Err(e) => fail(&mut row, e),
                }
            }
            _ => match deterministic(
                method,
                cell.scheme,
                cell.reception,
                &cell.channel,
                cell.nu,
                n0,
                &cell.quad,
            ) {
                Ok(est) => row.pe_analytic = Some(est.value),
                Err(e) => fail(&mut row, e),
            },
        }
    }
    (row, first_error)
}

/// SplitMix64 output for `x`; decorrelates the per-cell Monte Carlo seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Result of a sweep: the configuration echo and one row per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<CurvePoint>,
}

impl SweepReport {
    /// Number of rows that carry an error.
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Runs every cell, `nu_list` outer and `ebn0_db_list` inner.
///
/// Cells are spread over `workers` threads. Cell `i` simulates with seed
/// `splitmix64(seed + i)`, so the rows do not depend on `workers`.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<SweepReport> {
    cfg.validate()?;
    if workers == 0 {
        return Err(Error::param("workers must be at least 1"));
    }
    let quad = cfg.quadrature()?;
    let cells: Vec<CellSpec> = cfg
        .nu_list
        .iter()
        .flat_map(|&nu| cfg.ebn0_db_list.iter().map(move |&eb| (nu, eb)))
        .enumerate()
        .map(|(i, (nu, eb))| CellSpec {
            scheme: cfg.scheme,
            reception: cfg.reception,
            channel: cfg.channel,
            nu,
            axis: SnrAxis::EbN0Db(eb),
            methods: cfg.methods.clone(),
            trials: cfg.trials,
            seed: splitmix64(cfg.seed.wrapping_add(i as u64)),
            workers: 1,
            quad,
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param(format!("cannot start {workers} workers: {e}")))?;
    let rows = pool.install(|| cells.par_iter().map(|c| evaluate_cell(c).0).collect());
    Ok(SweepReport {
        config: cfg.clone(),
        rows,
    })
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

/// Writes the header and one line per row.
pub fn write_csv<W: Write>(rows: &[CurvePoint], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::param(format!("cannot write CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            r.reception.to_string(),
            r.channel.clone(),
            r.nu.to_string(),
            r.ebn0_db.to_string(),
            sci(r.snr_db),
            opt(r.pe_analytic),
            opt(r.pe_mc),
            opt(r.ci_low),
            opt(r.ci_high),
            r.trials.map(|t| t.to_string()).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::param(format!("cannot write CSV: {e}")))
}

/// Writes the report as pretty-printed JSON: `{"config": .., "rows": [..]}`.
pub fn write_json<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)
        .map_err(|e| Error::param(format!("cannot write JSON: {e}")))?;
    writeln!(out).map_err(|e| Error::param(format!("cannot write JSON: {e}")))
}

/// Writes the report in its configured format.
pub fn write_report<W: Write>(report: &SweepReport, format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(&report.rows, out),
        OutputFormat::Json => write_json(report, out),
    }
}

/// Figure-reproduction presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Coherent OOBPSK over Rayleigh fading.
    Fig1,
    /// Coherent OOQPSK over Rayleigh fading.
    Fig2,
    /// Noncoherent OOQPSK over Rician fading with `K = 5`.
    Fig3,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            _ => Err(Error::param(format!(
                "unknown figure '{s}' (expected fig1, fig2 or fig3)"
            ))),
        }
    }
}

impl Figure {
    /// The preset sweep. `methods` defaults to analytic when empty.
    pub fn config(
        self,
        methods: Vec<Method>,
        trials: u64,
        seed: u64,
        tol: f64,
    ) -> Result<SweepConfig> {
        let methods = if methods.is_empty() {
            vec![Method::Analytic]
        } else {
            methods
        };
        let (scheme, reception, channel, nu_list, last_db) = match self {
            Figure::Fig1 => (
                Scheme::Oobpsk,
                Reception::Coherent,
                FadingSpec::rayleigh(1.0)?,
                vec![1.0, 0.5, 0.2, 0.1, 0.05],
                40,
            ),
            Figure::Fig2 => (
                Scheme::Ooqpsk,
                Reception::Coherent,
                FadingSpec::rayleigh(1.0)?,
                vec![1.0, 0.8, 0.5, 0.2, 0.1],
                40,
            ),
            Figure::Fig3 => (
                Scheme::Ooqpsk,
                Reception::Noncoherent,
                "rician:k=5".parse()?,
                vec![1.0, 0.8, 0.5, 0.2, 0.1],
                60,
            ),
        };
        let cfg = SweepConfig {
            scheme,
            reception,
            channel,
            nu_list,
            ebn0_db_list: (-5..=last_db).map(f64::from).collect(),
            methods,
            trials,
            seed,
            tol,
            output_format: OutputFormat::Csv,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
