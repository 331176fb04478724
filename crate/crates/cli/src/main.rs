//! `concomp`: trade-off curves, verification campaigns, reductions and RDP
//! reports from the command line.
//!
//! Exit codes: 0 when everything checked holds, 1 on a property violation,
//! 2 on bad usage or input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use concomp_core::campaign::{run_campaign, Campaign, CampaignConfig};
use concomp_core::interactive::Mechanism;
use concomp_core::rdp::verify_rdp_concurrent;
use concomp_core::reduction::{reduce, verify_reduction};
use concomp_core::tradeoff::{chain_rule, np_tradeoff};
use concomp_core::{tol, FiniteDistribution, Outcome, TradeoffFunction};

const GUARD_VAR: &str = "CONCOMP_GUARD";

#[derive(Parser)]
#[command(name = "concomp", version, about = "Verification tools for concurrent composition of interactive DP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a trade-off curve.
    Tradeoff {
        #[arg(long, requires = "delta", conflicts_with_all = ["dist_file", "chain"])]
        eps: Option<f64>,
        #[arg(long, requires = "eps")]
        delta: Option<f64>,
        /// Two distribution files, P then Q.
        #[arg(long, num_args = 2, value_names = ["P", "Q"], conflicts_with = "chain")]
        dist_file: Option<Vec<PathBuf>>,
        /// A two-stage chain-rule instance.
        #[arg(long, value_name = "FILE")]
        chain: Option<PathBuf>,
        /// Add a uniform grid of this many points to the CSV rows.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded verification campaign.
    Verify {
        campaign: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = tol::EQ)]
        tol: f64,
        #[arg(long, default_value_t = 4)]
        max_support: usize,
        #[arg(long, default_value_t = 2)]
        max_depth: usize,
        #[arg(long, default_value_t = 2)]
        max_alphabet: usize,
        /// Worker threads; 0 picks the machine default.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce an interactive mechanism to a non-interactive pair and verify it.
    Reduce {
        mechanism: PathBuf,
        #[arg(long, num_args = 2, value_names = ["X", "X_PRIME"], required = true)]
        pair: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check concurrent RDP composition of several mechanisms.
    Rdp {
        #[arg(required = true)]
        mechanisms: Vec<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["X", "X_PRIME"], required = true)]
        pair: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Why a command stopped: bad input (exit 2) or a failed check (exit 1).
enum Failure {
    Input(String),
    Violation(String),
}

impl From<concomp_core::Error> for Failure {
    fn from(e: concomp_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult<T> = Result<T, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn guard() -> CmdResult<u64> {
    match std::env::var(GUARD_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| input(format!("{GUARD_VAR}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(tol::DEFAULT_GUARD),
    }
}

fn read(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> CmdResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Conditional {
    Curve { outcome: Outcome, curve: TradeoffFunction },
    Pair { outcome: Outcome, y: FiniteDistribution, y_prime: FiniteDistribution },
}

#[derive(Deserialize)]
struct ChainSpec {
    x: FiniteDistribution,
    x_prime: FiniteDistribution,
    conditionals: Vec<Conditional>,
}

fn chain_curve(spec: ChainSpec) -> CmdResult<TradeoffFunction> {
    let mut branches = BTreeMap::new();
    for c in spec.conditionals {
        let (o, f) = match c {
            Conditional::Curve { outcome, curve } => (outcome, curve),
            Conditional::Pair { outcome, y, y_prime } => (outcome, np_tradeoff(&y, &y_prime)),
        };
        if branches.insert(o.clone(), f).is_some() {
            return Err(input(format!("conditional for {o} given twice")));
        }
    }
    Ok(chain_rule(&spec.x, &spec.x_prime, &branches)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_tradeoff(
    eps: Option<f64>,
    delta: Option<f64>,
    dist_file: Option<Vec<PathBuf>>,
    chain: Option<PathBuf>,
    grid: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
) -> CmdResult<()> {
    let curve = match (eps, delta, dist_file, chain) {
        (Some(e), Some(d), None, None) => TradeoffFunction::eps_delta(e, d)?,
        (None, None, Some(files), None) => {
            let p: FiniteDistribution = parse(&files[0])?;
            let q: FiniteDistribution = parse(&files[1])?;
            np_tradeoff(&p, &q)
        }
        (None, None, None, Some(path)) => chain_curve(parse(&path)?)?,
        _ => return Err(input("give one of --eps/--delta, --dist-file P Q or --chain FILE")),
    };
    let text = match format {
        Format::Csv => curve.to_csv(grid),
        Format::Json => pretty(&curve),
    };
    emit(out.as_deref(), &text)?;
    let kinks: Vec<String> = curve.kinks().iter().map(|(a, b)| format!("({a:.6}, {b:.6})")).collect();
    eprintln!(
        "{} breakpoints; kinks: {}",
        curve.breakpoints().len(),
        if kinks.is_empty() { "none".into() } else { kinks.join(" ") }
    );
    Ok(())
}

fn cmd_verify(name: &str, cfg: CampaignConfig, format: Format, out: Option<PathBuf>) -> CmdResult<()> {
    let campaign: Campaign = name.parse()?;
    if format == Format::Csv {
        return Err(input("campaign reports are JSON only"));
    }
    let report = run_campaign(campaign, &cfg)?;
    emit(out.as_deref(), &pretty(&report))?;
    eprintln!(
        "{campaign}: {}/{} trials passed, worst deviation {:e}",
        report.passed, report.trials, report.worst_deviation
    );
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{campaign}: {} trials failed", report.failed)))
    }
}

fn cmd_reduce(path: &Path, pair: &[String], out: Option<PathBuf>) -> CmdResult<()> {
    let m = Mechanism::from_json(&read(path)?)?;
    let guard = guard()?;
    let result = reduce(&m, &pair[0], &pair[1], guard)?;
    let report = verify_reduction(&m, &pair[0], &pair[1], &result, guard)?;
    emit(out.as_deref(), &pretty(&json!({ "result": result, "report": report })))?;
    eprintln!(
        "reduction over {} adversaries: max view deviation {:e}, curve gap {:e}",
        report.adversaries,
        report.max_view_deviation.max(report.max_view_deviation_prime),
        report.curve_gap
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Violation("reduction does not reproduce the views".into()))
    }
}

fn cmd_rdp(paths: &[PathBuf], pair: &[String], alpha: f64, out: Option<PathBuf>) -> CmdResult<()> {
    let ms = paths
        .iter()
        .map(|p| Ok(Mechanism::from_json(&read(p)?)?))
        .collect::<CmdResult<Vec<_>>>()?;
    let report = verify_rdp_concurrent(&ms, &pair[0], &pair[1], alpha, guard()?)?;
    emit(out.as_deref(), &pretty(&report))?;
    eprintln!(
        "alpha {alpha}: concurrent {} vs sum {}",
        report.concurrent_optimum, report.component_sum
    );
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Violation("concurrent optimum differs from the component sum".into()))
    }
}

fn run(cli: Cli) -> CmdResult<()> {
    match cli.command {
        Command::Tradeoff {
            eps,
            delta,
            dist_file,
            chain,
            grid,
            format,
            out,
        } => cmd_tradeoff(eps, delta, dist_file, chain, grid, format, out),
        Command::Verify {
            campaign,
            seed,
            trials,
            tol,
            max_support,
            max_depth,
            max_alphabet,
            threads,
            format,
            out,
        } => {
            let cfg = CampaignConfig {
                seed,
                trials,
                max_support,
                max_depth,
                max_alphabet,
                tol,
                guard: guard()?,
                threads,
            };
            cmd_verify(&campaign, cfg, format, out)
        }
        Command::Reduce { mechanism, pair, out } => cmd_reduce(&mechanism, &pair, out),
        Command::Rdp {
            mechanisms,
            pair,
            alpha,
            out,
        } => cmd_rdp(&mechanisms, &pair, alpha, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
