//! Command-line auditor for hiring-market games. Subcommands run a
//! scenario file end to end (audit), list equilibria (enumerate), scan an
//! equilibrium set for blatant unfairness (detect-blatant), check one
//! profile's self-confirming claim (check-sce), build certified-unfair
//! classifiers (construct), or rebuild the canonical two-group example and
//! diff every verdict against its pinned expectations
//! (reproduce-corollary).
//!
//! Exit codes: 0 when the run completed (whatever the verdicts say), 1 when
//! reproduce-corollary deviates, 2 for configuration errors, 3 when a
//! search budget is exhausted.

mod error;
mod report;
mod runner;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;
use report::ReportFormat;
use runner::Overrides;
use scenario::{ConceptKind, Scenario};

#[derive(Parser)]
#[command(
    name = "hiring-games",
    version,
    about = "Audits hiring-market games in exact rational arithmetic: equilibrium checks, fairness checks, blatant-unfairness detection, and unfair-classifier construction."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConceptArg {
    Nash,
    Sce,
}

impl From<ConceptArg> for ConceptKind {
    fn from(c: ConceptArg) -> Self {
        match c {
            ConceptArg::Nash => ConceptKind::Nash,
            ConceptArg::Sce => ConceptKind::Sce,
        }
    }
}

#[derive(Args)]
struct CommonOpts {
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Override the scenario's solution concept.
    #[arg(long, value_enum)]
    concept: Option<ConceptArg>,
    /// Override the scenario's enumeration budget.
    #[arg(long)]
    budget: Option<usize>,
    /// Accepted for interface stability; every check is deterministic, so
    /// the seed changes nothing.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every check the scenario requests.
    Audit(CommonOpts),
    /// List equilibria under the scenario's solution concept.
    Enumerate(CommonOpts),
    /// Enumerate equilibria and report blatant-unfairness findings.
    DetectBlatant(CommonOpts),
    /// Check the scenario's profile and beliefs for self-confirmation.
    CheckSce(CommonOpts),
    /// Build a classifier from the constructor section and verify it.
    Construct(CommonOpts),
    /// Rebuild the canonical two-group example and compare every verdict
    /// against its pinned expectations; exits 1 on any deviation.
    ReproduceCorollary {
        /// Offer-grid step; must generate the witness offer 3/2.
        #[arg(long, default_value = "1/4")]
        grid_step: String,
        /// Number of sensitive groups the six candidates are split into.
        #[arg(long, default_value_t = 2)]
        groups: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Accepted for interface stability; the reproduction is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run_scenario(
    opts: &CommonOpts,
    run: impl FnOnce(&Scenario, String, &Overrides) -> Result<report::Report, CliError>,
) -> Result<(), CliError> {
    let started = Instant::now();
    let (scenario, bytes) = Scenario::load(&opts.config)?;
    let digest = runner::digest_of(&bytes);
    let overrides = Overrides { concept: opts.concept.map(Into::into), budget: opts.budget };
    let mut report = run(&scenario, digest, &overrides)?;
    report.elapsed = Some(started.elapsed());
    report.emit(opts.out.as_deref(), opts.format.into())?;
    eprintln!("{} completed in {:?}", report.command, started.elapsed());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Cmd::Audit(opts) => run_scenario(opts, |s, d, o| runner::audit("audit", s, d, o)),
        Cmd::Enumerate(opts) => run_scenario(opts, runner::enumerate),
        Cmd::DetectBlatant(opts) => run_scenario(opts, runner::detect_blatant),
        Cmd::CheckSce(opts) => run_scenario(opts, |s, d, _| runner::check_sce_command(s, d)),
        Cmd::Construct(opts) => run_scenario(opts, runner::construct),
        Cmd::ReproduceCorollary { grid_step, groups, out, format, seed: _ } => {
            let started = Instant::now();
            let step = grid_step
                .parse()
                .map_err(|e| CliError::Config(format!("--grid-step {grid_step}: {e}")))?;
            let (mut report, deviations) = runner::reproduce_corollary(step, *groups)?;
            report.elapsed = Some(started.elapsed());
            report.emit(out.as_deref(), (*format).into())?;
            eprintln!("reproduce-corollary completed in {:?}", started.elapsed());
            if deviations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Deviation(deviations.join("; ")))
            }
        }
    }
}
