//! `sepalt`: counting, enumeration, sampling, exact moments, identity
//! checks and asymptotics for separable permutations.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing identity,
//! 2 on usage or input errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use sepalt::exact::{format_decimal, format_ratio, DEFAULT_SIG_DIGITS};
use sepalt::las::{verify_structure, IdentityCheck};
use sepalt::perm::enumerate_separable;
use sepalt::sampler::{mc_stats, sample_stream, Ensemble, McEstimate};
use sepalt::schroder::{asymptotic_table, schroder_numbers, AsymptoticRow, RealContext, DEFAULT_PRECISION_BITS};
use sepalt::series::{build_catalog, exact_moments, verify_identities, IdentityReport, SeriesName};

/// Working precision in bits for asymptotic evaluation.
const PRECISION_ENV: &str = "SEPALT_PRECISION";

#[derive(Parser, Debug)]
#[command(name = "sepalt", version, about = "Longest alternating subsequences of separable permutations")]
struct Cli {
    #[command(flatten)]
    out: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Separable,
    Uniform,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Separable => Ensemble::Separable,
            EnsembleArg::Uniform => Ensemble::Uniform,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print s_1..s_N.
    Count { n: usize },
    /// Stream every separable permutation of size n.
    Enum { n: usize },
    /// Stream uniformly random permutations.
    Sample {
        n: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = EnsembleArg::Separable)]
        ensemble: EnsembleArg,
    },
    /// Monte Carlo estimates of all five alternating lengths.
    Stats {
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = EnsembleArg::Separable)]
        ensemble: EnsembleArg,
    },
    /// Exact moments at size n, read off the generating functions.
    Moments {
        n: usize,
        /// Series order; defaults to the smallest that reaches n.
        #[arg(long)]
        order: Option<usize>,
        /// One row for every size 1..=n.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_SIG_DIGITS)]
        digits: usize,
    },
    /// Dump the coefficients of one generating function.
    Series {
        /// One of X, Xinv, s, G_pm, G_mm, H_pm, H_mm.
        name: String,
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Check the first-block recursions and the series identities.
    Verify {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Exact coefficients against their asymptotic formulas.
    Asymptotics {
        #[arg(long, value_delimiter = ',', default_values_t = [250usize, 500, 1000, 2000])]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_SIG_DIGITS)]
        digits: usize,
    },
}

/// Failures that map onto exit status 1.
#[derive(Debug, thiserror::Error)]
#[error("verification failed: {}", .0.join("; "))]
struct VerificationFailed(Vec<String>);

struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    fn open(path: Option<&PathBuf>) -> Result<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { inner })
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.inner, "{s}")?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<()> {
        serde_json::to_writer_pretty(&mut self.inner, value)?;
        writeln!(self.inner)?;
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, rows: &[T]) -> Result<()> {
        let mut w = csv::Writer::from_writer(&mut self.inner);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    mean_pm: String,
    mean_pm_decimal: String,
    var_pm: String,
    var_pm_decimal: String,
    c_mm: String,
    c_mm_decimal: String,
    secmom_pm: String,
    #[serde(rename = "C_mm")]
    big_c_mm: String,
}

fn moment_row(n: usize, m: &sepalt::series::ExactMoments, digits: usize) -> MomentRow {
    let dec = |r: &BigRational| format_decimal(r, digits);
    MomentRow {
        n,
        mean_pm: format_ratio(&m.mean_pm),
        mean_pm_decimal: dec(&m.mean_pm),
        var_pm: format_ratio(&m.var_pm),
        var_pm_decimal: dec(&m.var_pm),
        c_mm: format_ratio(&m.c_mm),
        c_mm_decimal: dec(&m.c_mm),
        secmom_pm: format_ratio(&m.secmom_pm),
        big_c_mm: format_ratio(&m.big_c_mm),
    }
}

#[derive(Serialize)]
struct CoefficientRow {
    n: usize,
    numerator: String,
    denominator: String,
}

#[derive(Serialize)]
struct SeriesDump {
    series: String,
    order: usize,
    coefficients: Vec<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    structure: Vec<IdentityCheck>,
    series: Vec<IdentityReport>,
}

#[derive(Serialize)]
struct VerifyRow<'a> {
    section: &'static str,
    identity: &'a str,
    n: Option<usize>,
    order: Option<usize>,
    status: &'static str,
    informational: bool,
    first_mismatch: Option<usize>,
    lhs: &'a str,
    rhs: &'a str,
}

#[derive(Serialize)]
struct AsymptoticCsvRow<'a> {
    sequence: &'a str,
    n: usize,
    lead_formula: &'a str,
    refined_formula: &'a str,
    ratio: &'a str,
    scaled_residual: &'a str,
}

#[derive(Serialize)]
struct EstimateRow {
    flavor: &'static str,
    mean: f64,
    variance: f64,
    std_error: f64,
    sum: String,
    sum_sq: String,
}

fn status_name(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

fn precision_bits() -> Result<usize> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{PRECISION_ENV} must be a number of bits, got {v:?}")),
        Err(_) => Ok(DEFAULT_PRECISION_BITS),
    }
}

fn run(cli: Cli) -> Result<()> {
    let format = cli.out.format;
    let mut out = Sink::open(cli.out.output.as_ref())?;
    match cli.command {
        Command::Count { n } => {
            let s = schroder_numbers(n);
            match format {
                None => {
                    let parts: Vec<String> = s.iter().map(ToString::to_string).collect();
                    out.line(&parts.join(" "))?;
                }
                Some(Format::Csv) => {
                    #[derive(Serialize)]
                    struct Row {
                        n: usize,
                        s_n: String,
                    }
                    let rows: Vec<Row> = s.iter().enumerate().map(|(i, v)| Row { n: i + 1, s_n: v.to_string() }).collect();
                    out.csv(&rows)?;
                }
                Some(Format::Json) => out.json(&s.iter().map(ToString::to_string).collect::<Vec<_>>())?,
            }
        }
        Command::Enum { n } => {
            let perms = enumerate_separable(n)?;
            if format == Some(Format::Json) {
                out.json(&perms.collect::<Vec<_>>())?;
            } else {
                for p in perms {
                    out.line(&p.to_string())?;
                }
            }
        }
        Command::Sample { n, samples, seed, ensemble } => {
            let stream = sample_stream(n, seed, ensemble.into())?.take(samples);
            if format == Some(Format::Json) {
                out.json(&stream.collect::<Vec<_>>())?;
            } else {
                for p in stream {
                    out.line(&p.to_string())?;
                }
            }
        }
        Command::Stats { n, samples, seed, workers, ensemble } => {
            let est: McEstimate = mc_stats(n, samples, seed, workers, ensemble.into())?;
            if format == Some(Format::Csv) {
                let rows: Vec<EstimateRow> = est
                    .flavors
                    .iter()
                    .map(|f| EstimateRow {
                        flavor: f.flavor.name(),
                        mean: f.mean,
                        variance: f.variance,
                        std_error: f.std_error,
                        sum: f.sum.clone(),
                        sum_sq: f.sum_sq.clone(),
                    })
                    .collect();
                out.csv(&rows)?;
            } else {
                out.json(&est)?;
            }
        }
        Command::Moments { n, order, all, digits } => {
            let cat = build_catalog(order.unwrap_or(n).max(4))?;
            let sizes = if all { 1..=n } else { n..=n };
            let rows = sizes
                .map(|k| Ok(moment_row(k, &exact_moments(k, &cat)?, digits)))
                .collect::<Result<Vec<_>>>()?;
            if format == Some(Format::Json) {
                out.json(&rows)?;
            } else {
                out.csv(&rows)?;
            }
        }
        Command::Series { name, order } => {
            let which: SeriesName = name.parse()?;
            let cat = build_catalog(order)?;
            let series = cat.get(which);
            if format == Some(Format::Json) {
                out.json(&SeriesDump {
                    series: which.name().to_string(),
                    order,
                    coefficients: series.coeffs().iter().map(format_ratio).collect(),
                })?;
            } else {
                let rows: Vec<CoefficientRow> = series
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(n, c)| CoefficientRow { n, numerator: c.numer().to_string(), denominator: c.denom().to_string() })
                    .collect();
                out.csv(&rows)?;
            }
        }
        Command::Verify { max_n, order } => {
            let mut structure = Vec::new();
            for n in 3..=max_n {
                structure.extend(verify_structure(n)?);
            }
            let series = verify_identities(order)?;
            let mut failed: Vec<String> = structure
                .iter()
                .filter(|c| !c.status.passed())
                .map(|c| format!("{} (n={})", c.identity, c.n))
                .collect();
            failed.extend(
                series
                    .iter()
                    .filter(|r| !r.informational && !r.status.passed())
                    .map(|r| format!("{} (first mismatch at t^{})", r.identity, r.first_mismatch.unwrap_or(0))),
            );
            let report = VerifyReport { passed: failed.is_empty(), structure, series };
            if format == Some(Format::Json) {
                out.json(&report)?;
            } else {
                let mut rows: Vec<VerifyRow> = report
                    .structure
                    .iter()
                    .map(|c| VerifyRow {
                        section: "structure",
                        identity: &c.identity,
                        n: Some(c.n),
                        order: None,
                        status: status_name(c.status.passed()),
                        informational: false,
                        first_mismatch: None,
                        lhs: &c.lhs,
                        rhs: &c.rhs,
                    })
                    .collect();
                rows.extend(report.series.iter().map(|r| VerifyRow {
                    section: "series",
                    identity: &r.identity,
                    n: None,
                    order: Some(r.order),
                    status: status_name(r.status.passed()),
                    informational: r.informational,
                    first_mismatch: r.first_mismatch,
                    lhs: "",
                    rhs: "",
                }));
                out.csv(&rows)?;
            }
            out.finish()?;
            if !failed.is_empty() {
                return Err(VerificationFailed(failed).into());
            }
            return Ok(());
        }
        Command::Asymptotics { n_list, digits } => {
            let mut ctx = RealContext::new(precision_bits()?)?;
            let table: Vec<AsymptoticRow> = asymptotic_table(&n_list, &mut ctx, digits)?.into_iter().map(|(row, _)| row).collect();
            if format == Some(Format::Json) {
                out.json(&table)?;
            } else {
                let rows: Vec<AsymptoticCsvRow> = table
                    .iter()
                    .map(|r| AsymptoticCsvRow {
                        sequence: &r.sequence,
                        n: r.n,
                        lead_formula: &r.lead_formula,
                        refined_formula: &r.refined_formula,
                        ratio: &r.ratio,
                        scaled_residual: &r.scaled_residual,
                    })
                    .collect();
                out.csv(&rows)?;
            }
        }
    }
    out.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<VerificationFailed>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
