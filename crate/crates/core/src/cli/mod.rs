//! Command-line front end. `run` parses arguments and returns the process exit code.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::chsh::{self, LOCAL_BOUND};
use crate::delayed::{self, ExperimentConfig, VictorMode};
use crate::error::{Error, Result};
use crate::estimator::{self, Estimator, FidelityResult, ViolationReport};
use crate::infometrics::{self, Method};
use crate::output::sig12;
use crate::qstate::{haar_random_state, Direction};
use crate::rng::RngStream;
use crate::swapkit::{self, OUTCOME_NAMES, PSI_MINUS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "swapsim",
    version,
    about = "Delayed-choice entanglement swapping toolkit"
)]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (directory for `delayed`); standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Information measures, CHSH maximum and fidelity across a grid of α.
    Sweep(SweepArgs),
    /// Simulated delayed-choice run: event log plus summary.
    Delayed(DelayedArgs),
    /// Maximal Bell parameter of the conditional states, or of Haar-random states.
    Chsh(ChshArgs),
    /// Analytic and Monte-Carlo classical-teleportation fidelity.
    Fidelity(FidelityArgs),
    /// Consequences of a measured Bell parameter.
    PaperNumbers(PaperArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u32).range(2..))]
    pub alpha_steps: u32,
    /// Also evaluate α = 1/√2 exactly.
    #[arg(long)]
    pub include_special: bool,
}

#[derive(Debug, Args)]
pub struct DelayedArgs {
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    /// `x`, `-y`, `z`, ... or `theta,phi` in degrees.
    #[arg(long, default_value = "z")]
    pub alice_dir: Direction,
    #[arg(long, default_value = "z")]
    pub bob_dir: Direction,
    #[arg(long, default_value = "generalized-basis")]
    pub victor_mode: VictorMode,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub alpha: f64,
    /// Evaluate this many Haar-random two-qubit states instead.
    #[arg(long)]
    pub haar: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[arg(long, value_delimiter = ',', default_values_t = default_fidelity_alphas())]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::NormalizedElement)]
    pub estimator: EstimatorArg,
}

fn default_fidelity_alphas() -> Vec<f64> {
    vec![0.0, 0.25, std::f64::consts::FRAC_1_SQRT_2, 0.9, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    NormalizedElement,
    MaxEigenvector,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::NormalizedElement => Estimator::NormalizedElement,
            EstimatorArg::MaxEigenvector => Estimator::MaxEigenvector,
        }
    }
}

#[derive(Debug, Args)]
pub struct PaperArgs {
    #[arg(long, default_value_t = 2.421)]
    pub s: f64,
    #[arg(long, default_value_t = 0.091)]
    pub s_error: f64,
}

/// A table row written as CSV with 12 significant digits.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub i_zz: f64,
    pub i_xx: f64,
    pub i_ind: f64,
    pub i_corr: f64,
    pub s_max: f64,
    pub fidelity: f64,
    pub complementarity_sum: f64,
}

impl Row for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "alpha",
        "i_zz",
        "i_xx",
        "i_ind",
        "i_corr",
        "s_max",
        "fidelity",
        "complementarity_sum",
    ];

    fn fields(&self) -> Vec<String> {
        [
            self.alpha,
            self.i_zz,
            self.i_xx,
            self.i_ind,
            self.i_corr,
            self.s_max,
            self.fidelity,
            self.complementarity_sum,
        ]
        .map(sig12)
        .to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshRow {
    pub state: String,
    pub i_corr: f64,
    pub s_analytic: f64,
    pub s_numeric: f64,
}

impl Row for ChshRow {
    const HEADER: &'static [&'static str] = &["state", "i_corr", "s_analytic", "s_numeric"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.state.clone(),
            sig12(self.i_corr),
            sig12(self.s_analytic),
            sig12(self.s_numeric),
        ]
    }
}

impl Row for FidelityResult {
    const HEADER: &'static [&'static str] =
        &["alpha", "f_analytic", "f_montecarlo", "stderr", "samples"];

    fn fields(&self) -> Vec<String> {
        vec![
            sig12(self.alpha),
            sig12(self.f_analytic),
            sig12(self.f_montecarlo),
            sig12(self.stderr),
            self.samples.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityRow {
    pub quantity: String,
    pub value: f64,
}

impl Row for QuantityRow {
    const HEADER: &'static [&'static str] = &["quantity", "value"];

    fn fields(&self) -> Vec<String> {
        vec![self.quantity.clone(), sig12(self.value)]
    }
}

pub fn write_rows<R: Row, W: Write>(rows: &[R], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(R::HEADER)?;
            for r in rows {
                w.write_record(r.fields())?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses a table written by [`write_rows`].
pub fn read_rows<R, I>(input: I, format: Format) -> Result<Vec<R>>
where
    R: Row + for<'de> Deserialize<'de>,
    I: io::Read,
{
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
            if header != R::HEADER {
                return Err(Error::InvalidParameter(format!(
                    "unexpected header {header:?}"
                )));
            }
            r.deserialize()
                .map(|row| row.map_err(Error::from))
                .collect()
        }
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}

pub fn sweep_row(alpha: f64) -> Result<SweepRow> {
    let comp = infometrics::complementarity(alpha)?;
    let state = swapkit::conditional_state(alpha, PSI_MINUS)?;
    let lab = infometrics::i_corr(&state, Method::Analytic)?;
    let s_max = chsh::chsh_max(&state, Method::Numeric)?.s_value;
    Ok(SweepRow {
        alpha,
        i_zz: lab.i_zz,
        i_xx: lab.i_xx,
        i_ind: comp.i_ind1,
        i_corr: comp.i_corr03,
        s_max,
        fidelity: estimator::analytic_fidelity(alpha, Estimator::NormalizedElement)?,
        complementarity_sum: comp.sum,
    })
}

pub fn sweep_grid(steps: u32, include_special: bool) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..steps)
        .map(|i| f64::from(i) / f64::from(steps - 1))
        .collect();
    if include_special {
        let special = std::f64::consts::FRAC_1_SQRT_2;
        let at = grid.partition_point(|&a| a < special);
        grid.insert(at, special);
    }
    grid
}

/// Failure of a relation the computation itself guarantees.
#[derive(Debug)]
struct Internal(String);

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::InvalidParameter(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<Internal> for Failure {
    fn from(e: Internal) -> Self {
        Failure::Internal(e.0)
    }
}

fn open_out(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> std::result::Result<(), Failure> {
    let grid = sweep_grid(args.alpha_steps, args.include_special);
    let rows: Vec<SweepRow> = grid.into_iter().map(sweep_row).collect::<Result<_>>()?;
    for r in &rows {
        if (r.complementarity_sum - 2.0).abs() > 1e-10 {
            return Err(Internal(format!(
                "complementarity sum {} at alpha {}",
                r.complementarity_sum, r.alpha
            ))
            .into());
        }
        if (r.s_max * r.s_max / 4.0 - r.i_corr).abs() > 1e-6 {
            return Err(Internal(format!(
                "s_max {} disagrees with i_corr {} at alpha {}",
                r.s_max, r.i_corr, r.alpha
            ))
            .into());
        }
    }
    write_rows(&rows, cli.format, open_out(cli.out.as_deref())?)?;
    Ok(())
}

fn cmd_delayed(cli: &Cli, args: &DelayedArgs) -> std::result::Result<(), Failure> {
    let config = ExperimentConfig::new(args.alpha, args.shots, cli.seed)
        .with_directions(args.alice_dir, args.bob_dir)
        .with_mode(args.victor_mode);
    let log = delayed::run_experiment(&config)?;
    let mut summary = log.summary()?;
    summary.chsh = delayed::chsh_per_outcome(&config)?;
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))?;
            log.write_csv(open_out(Some(&dir.join("runlog.csv")))?)?;
            let mut w = open_out(Some(&dir.join("summary.json")))?;
            serde_json::to_writer_pretty(&mut w, &summary).map_err(Error::from)?;
            writeln!(w).map_err(Error::from)?;
            w.flush().map_err(Error::from)?;
        }
        None => {
            let mut w = open_out(None)?;
            serde_json::to_writer_pretty(&mut w, &summary).map_err(Error::from)?;
            writeln!(w).map_err(Error::from)?;
            w.flush().map_err(Error::from)?;
        }
    }
    Ok(())
}

fn chsh_row(state: &crate::qstate::PureState, name: String) -> Result<ChshRow> {
    Ok(ChshRow {
        state: name,
        i_corr: infometrics::i_corr(state, Method::Analytic)?.i_corr,
        s_analytic: chsh::chsh_max(state, Method::Analytic)?.s_value,
        s_numeric: chsh::chsh_max(state, Method::Numeric)?.s_value,
    })
}

fn cmd_chsh(cli: &Cli, args: &ChshArgs) -> std::result::Result<(), Failure> {
    let rows: Vec<ChshRow> = match args.haar {
        Some(n) => {
            let mut rng = RngStream::new(cli.seed, 0);
            (0..n)
                .map(|i| {
                    chsh_row(
                        &haar_random_state(&mut rng, vec![0, 1])?,
                        format!("haar-{i}"),
                    )
                })
                .collect::<Result<_>>()?
        }
        None => (0..4)
            .map(|k| {
                chsh_row(
                    &swapkit::conditional_state(args.alpha, k)?,
                    OUTCOME_NAMES[k].to_string(),
                )
            })
            .collect::<Result<_>>()?,
    };
    for r in &rows {
        if (r.s_numeric * r.s_numeric / 4.0 - r.i_corr).abs() > 1e-6
            || ((r.i_corr > 1.0) != (r.s_numeric > LOCAL_BOUND))
        {
            return Err(Internal(format!(
                "state {}: S {} vs i_corr {}",
                r.state, r.s_numeric, r.i_corr
            ))
            .into());
        }
    }
    write_rows(&rows, cli.format, open_out(cli.out.as_deref())?)?;
    Ok(())
}

fn cmd_fidelity(cli: &Cli, args: &FidelityArgs) -> std::result::Result<(), Failure> {
    let rows: Vec<FidelityResult> = args
        .alphas
        .iter()
        .map(|&a| {
            estimator::average_fidelity_with(a, args.samples, cli.seed, args.estimator.into())
        })
        .collect::<Result<_>>()?;
    write_rows(&rows, cli.format, open_out(cli.out.as_deref())?)?;
    Ok(())
}

pub fn paper_rows(s: f64, s_error: f64) -> Result<Vec<QuantityRow>> {
    let r = ViolationReport::from_measurement(s, s_error)?;
    let q = |name: &str, value: f64| QuantityRow {
        quantity: name.to_string(),
        value,
    };
    Ok(vec![
        q("s", r.s),
        q("s_error", r.s_error),
        q("sigmas_above_local_bound", r.sigmas_above_local_bound),
        q("i_corr", r.i_corr),
        q("i_ind_bound", r.i_ind_bound),
        q("f_bound", r.f_bound),
        q("f_cl", r.f_classical),
        q(
            "below_classical_limit",
            if r.below_classical_limit { 1.0 } else { 0.0 },
        ),
    ])
}

fn cmd_paper_numbers(cli: &Cli, args: &PaperArgs) -> std::result::Result<(), Failure> {
    let rows = paper_rows(args.s, args.s_error)?;
    write_rows(&rows, cli.format, open_out(cli.out.as_deref())?)?;
    Ok(())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Sweep(a) => cmd_sweep(&cli, a),
        Command::Delayed(a) => cmd_delayed(&cli, a),
        Command::Chsh(a) => cmd_chsh(&cli, a),
        Command::Fidelity(a) => cmd_fidelity(&cli, a),
        Command::PaperNumbers(a) => cmd_paper_numbers(&cli, a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            EXIT_INTERNAL
        }
    }
}

#[cfg(test)]
mod tests;
