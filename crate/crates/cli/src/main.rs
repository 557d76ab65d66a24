//! `fppcm`: command-line driver for the experiments.
//!
//! Exit status is 0 on success, 1 on configuration or I/O errors and 2 when
//! a checked invariant or acceptance band fails.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fppcm::bp::{explosion_probe, write_probe_csv};
use fppcm::distributions::{explosiveness_check, size_biased, DegreeLaw, ExcessWeightLaw, Verdict};
use fppcm::harness::config::{format_weight_spec, parse_weight_spec, ExperimentConfig, LayerParams};
use fppcm::harness::equivalence::{matching_law_check, percolation_equivalence};
use fppcm::harness::experiment::{run_dichotomy_comparison, run_fluctuation_experiment, write_records_csv};
use fppcm::layers::{attachment_failure_bound, dump_schedule, excess_budget, gamma_p_for_alpha, make_schedule};
use fppcm::percolation::policy_from_excess_law;
use fppcm::{Error, WeightMode};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Parser)]
#[command(
    name = "fppcm",
    version,
    about = "First-passage percolation on power-law configuration models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fluctuation experiment: D, H, W and their centred residuals as CSV.
    Simulate(SimulateArgs),
    /// Explosive vs conservative residual_W over a shared grid, as JSON.
    Dichotomy(DichotomyArgs),
    /// Numerical verdict of the explosiveness integral, at C and 2C.
    CheckExplosive(CheckArgs),
    /// Exact comparison of half-edge and edge percolation on small sequences.
    PercolationEquiv(EquivArgs),
    /// The layer schedule y_i with thresholds and attachment bounds.
    Schedule(ScheduleArgs),
    /// Cap-hit frequencies of the branching process at several horizons.
    BpProbe(ProbeArgs),
}

/// Flags shared by the experiment subcommands.
#[derive(Args, Clone, Debug)]
struct Common {
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [10_000u64])]
    n: Vec<u64>,
    #[arg(long, default_value_t = 2.5)]
    tau: f64,
    /// Exponent of the slowly varying degree band.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Constant of the slowly varying degree band.
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    /// Excess-weight law, `family[:params]`.
    #[arg(long, default_value = "uniform01")]
    weight: String,
    #[arg(long, default_value = "edge")]
    mode: WeightMode,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file whose keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
struct LayerFlags {
    /// Base threshold of the layer schedule; enables layer diagnostics.
    #[arg(long)]
    k: Option<u64>,
    #[arg(long = "B", default_value_t = 0.1)]
    b: f64,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    cp: f64,
    /// Schedule exponent.
    #[arg(long, default_value_t = 0.5)]
    schedule_gamma: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    layers: LayerFlags,
}

#[derive(Args)]
struct DichotomyArgs {
    #[command(flatten)]
    common: Common,
    /// Law of the conservative arm; `--weight` gives the explosive arm.
    #[arg(long, default_value = "double-exponential")]
    conservative_weight: String,
    /// Largest/smallest explosive IQR allowed across the grid.
    #[arg(long, default_value_t = 1.5)]
    max_iqr_ratio: f64,
    /// Allowed spread of the explosive medians across the grid.
    #[arg(long, default_value_t = f64::INFINITY)]
    max_median_range: f64,
    /// Exit with status 2 when the summary falls outside the bands.
    #[arg(long)]
    strict: bool,
    /// Also write per-record CSVs next to the summary.
    #[arg(long)]
    records: bool,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckArgs {
    #[arg(long, default_value = "uniform01")]
    weight: String,
    /// Constant C in exp(-C u).
    #[arg(long = "C", default_value_t = 1.0)]
    #[serde(rename = "C")]
    c: f64,
    /// Lower limit of integration is 1/eps.
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 1e6)]
    tail_cut: f64,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivArgs {
    /// Largest total degree enumerated.
    #[arg(long, default_value_t = 8)]
    max_total: usize,
    /// Retention probabilities, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 1.0])]
    p: Vec<f64>,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 16)]
    k: u64,
    #[arg(long, default_value_t = 2.5)]
    tau: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long = "B", default_value_t = 0.1)]
    #[serde(rename = "B")]
    b: f64,
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    cp: f64,
    /// Excess law providing the thresholds xi.
    #[arg(long, default_value = "uniform01")]
    weight: String,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeArgs {
    #[arg(long, default_value_t = 2.5)]
    tau: f64,
    /// Lifetime law.
    #[arg(long, default_value = "uniform01")]
    weight: String,
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0])]
    horizons: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Size-biased law tabulated up to this degree, exact tail beyond.
    #[arg(long, default_value_t = 100_000)]
    truncation: u64,
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

/// Failure with its exit status.
enum Failure {
    Config(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("I/O error: {e}"))
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn config_err(msg: impl std::fmt::Display) -> Failure {
    Failure::Config(msg.to_string())
}

fn read_config(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))
}

/// `args` with every key of the TOML file at `path` replacing the flag value.
fn overlay<T: Serialize + DeserializeOwned>(args: T, path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(args);
    };
    let text = read_config(path)?;
    let mut table = toml::Table::try_from(&args).map_err(config_err)?;
    let file: toml::Table = toml::from_str(&text).map_err(config_err)?;
    table.extend(file);
    table.try_into().map_err(config_err)
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(config_err)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn weight_law(spec: &str) -> CliResult<ExcessWeightLaw<f64>> {
    Ok(parse_weight_spec(spec)?)
}

/// Flags first, then the `--config` file through the experiment-config
/// overlay, which accepts the full TOML schema.
fn experiment_config(common: &Common, weight: &str, layers: Option<&LayerFlags>) -> CliResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(
        common.n.clone(),
        common.reps,
        common.tau,
        weight_law(weight)?,
        common.seed,
    );
    cfg.degree = DegreeLaw::PurePower {
        tau: common.tau,
        gamma: common.gamma,
        c: common.c,
        min_degree: 2,
    };
    cfg.mode = common.mode;
    cfg.out = common.out.clone();
    cfg.layers = layers.and_then(|l| {
        l.k.map(|k| LayerParams {
            k,
            b: l.b,
            alpha: l.alpha,
            cp: l.cp,
            gamma: l.schedule_gamma,
        })
    });
    let cfg = match &common.config {
        Some(path) => cfg.overridden_by(&read_config(path)?)?,
        None => cfg.validated()?,
    };
    Ok(cfg)
}

fn simulate(args: SimulateArgs) -> CliResult {
    let cfg = experiment_config(&args.common, &args.common.weight, Some(&args.layers))?;
    let records = run_fluctuation_experiment(&cfg)?;
    let mut out = output(cfg.out.as_deref())?;
    write_records_csv(&records, &mut out)?;
    out.flush()?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "dichotomy".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn dichotomy(args: DichotomyArgs) -> CliResult {
    let explosive = experiment_config(&args.common, &args.common.weight, None)?;
    let mut conservative = explosive.clone();
    conservative.weight = weight_law(&args.conservative_weight)?;
    let run = run_dichotomy_comparison(&explosive, &conservative)?;
    let out = explosive.out.as_deref();
    write_json(&run.summary, out)?;
    if args.records {
        let base = out.ok_or_else(|| config_err("--records needs --out"))?;
        for (suffix, recs) in [
            ("explosive", &run.explosive_records),
            ("conservative", &run.conservative_records),
        ] {
            let mut w = BufWriter::new(File::create(sibling(base, suffix))?);
            write_records_csv(recs, &mut w)?;
            w.flush()?;
        }
    }
    if args.strict && !run.summary.passes(args.max_iqr_ratio, args.max_median_range) {
        return Err(Failure::Invariant(
            "dichotomy summary outside the configured bands".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckReport {
    weight: String,
    c: f64,
    eps: f64,
    tail_cut: f64,
    verdict: Verdict,
    integral: f64,
    error_bound: Option<f64>,
    verdict_at_2c: Verdict,
    stable: bool,
}

fn check_explosive(args: CheckArgs) -> CliResult {
    let args = overlay(args.clone(), args.config.as_deref())?;
    let law = weight_law(&args.weight)?;
    let v = explosiveness_check(&law, args.c, args.eps, args.tail_cut)?;
    let v2 = explosiveness_check(&law, 2.0 * args.c, args.eps, args.tail_cut)?;
    let report = CheckReport {
        weight: format_weight_spec(&law),
        c: args.c,
        eps: args.eps,
        tail_cut: args.tail_cut,
        verdict: v.verdict,
        integral: v.integral,
        error_bound: v.error_bound.is_finite().then_some(v.error_bound),
        verdict_at_2c: v2.verdict,
        stable: v.verdict == v2.verdict,
    };
    write_json(&report, args.out.as_deref())?;
    if !report.stable {
        return Err(Failure::Invariant("verdict changes between C and 2C".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct EquivSummary {
    max_total: usize,
    p: Vec<f64>,
    cases: usize,
    max_tv_f64: f64,
    max_tv_exact: f64,
    matching_law: fppcm::harness::MatchingLawReport,
    denominator: &'static str,
    passed: bool,
}

fn percolation_equiv(args: EquivArgs) -> CliResult {
    let args = overlay(args.clone(), args.config.as_deref())?;
    let eq = percolation_equivalence(args.max_total, &args.p)?;
    let ml = matching_law_check(args.max_total)?;
    let passed = eq.passes(args.tolerance) && ml.passes(1e-12);
    let summary = EquivSummary {
        max_total: args.max_total,
        p: args.p.clone(),
        cases: eq.cases.len(),
        max_tv_f64: eq.max_tv_f64,
        max_tv_exact: eq.max_tv_exact,
        denominator: "L - 2i + 1",
        matching_law: ml,
        passed,
    };
    write_json(&summary, args.out.as_deref())?;
    if !passed {
        return Err(Failure::Invariant(
            "percolation laws or matching formula disagree".into(),
        ));
    }
    Ok(())
}

fn schedule(args: ScheduleArgs) -> CliResult {
    let args = overlay(args.clone(), args.config.as_deref())?;
    let s = make_schedule(args.k, args.tau, args.gamma, args.b, args.n, args.alpha)?;
    let law = weight_law(&args.weight)?;
    let policy = policy_from_excess_law(&law, args.cp, gamma_p_for_alpha(args.alpha, args.tau))?;
    let degree = DegreeLaw::pure_power(args.tau)?;
    // beta = E[D]: the typical value of L_n / n
    let failure = attachment_failure_bound(&s, &degree, degree.mean())?;
    let budget = excess_budget(&s, &policy)?;
    let mut out = output(args.out.as_deref())?;
    write!(out, "{}", dump_schedule(&s, Some(&policy), Some(&failure)))?;
    writeln!(
        out,
        "# b_n={} core={:.6e} budget={:.6e} last_share={:.6e}",
        s.b_n(),
        s.core_degree(),
        budget.total,
        budget.last_share()
    )?;
    out.flush()?;
    Ok(())
}

fn bp_probe(args: ProbeArgs) -> CliResult {
    let args = overlay(args.clone(), args.config.as_deref())?;
    let law = weight_law(&args.weight)?;
    let offspring = size_biased(&DegreeLaw::pure_power(args.tau)?, args.truncation)?;
    let rows = explosion_probe(&offspring, &law, &args.horizons, args.cap, args.reps, args.seed)?;
    let mut out = output(args.out.as_deref())?;
    write_probe_csv(&rows, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Dichotomy(a) => dichotomy(a),
        Command::CheckExplosive(a) => check_explosive(a),
        Command::PercolationEquiv(a) => percolation_equiv(a),
        Command::Schedule(a) => schedule(a),
        Command::BpProbe(a) => bp_probe(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("fppcm: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("fppcm: {msg}");
            ExitCode::from(2)
        }
    }
}
