//! Command-line front end: analyze single inputs, run the bound-verification
//! suites, sweep input sizes for scaling studies, and run seeded Monte-Carlo
//! simulations. Everything is configured through explicit flags; seeded
//! commands render byte-identical documents on identical inputs.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{analyze, log_log_slope, sweep, AnalyzeOptions, EngineMode};
use crate::engine::{
    build_config_graph, expected_runtime, overall_acceptance, solve_absorption, BuildOptions,
};
use crate::error::{Error, Result};
use crate::format::load_machine;
use crate::machine::{validate_spec, StateKind};
use crate::prover::ProverStrategy;
use crate::protocols::ProtocolId;
use crate::report::{g12, sweep_csv, ReportBody, ReportDocument, SCHEMA_VERSION};
use crate::suites::{run_suite, SuiteId, SuiteLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qamfa",
    version,
    about = "Exact analysis and simulation of interactive proof systems with \
             semi-quantum two-way finite automaton verifiers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one input: honest prover on members, every adversary on
    /// non-members, with the applicable bound margins.
    Analyze(AnalyzeArgs),
    /// Run a named verification suite; exit status 1 if any check fails.
    Verify(VerifyArgs),
    /// Exact expected runtimes across input sizes, with a log-log slope fit.
    Sweep(SweepArgs),
    /// Seeded Monte-Carlo simulation cross-checked against the exact engine.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Doc,
    Csv,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Protocol to analyze: middle, mpal, knapsack, l1 or l2.
    #[arg(long, conflicts_with = "machine_file")]
    pub protocol: Option<String>,
    /// Analyze a machine-description file instead of a built-in protocol
    /// (non-interactive machines only).
    #[arg(long)]
    pub machine_file: Option<PathBuf>,
    /// Input string.
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    /// One-sided error bound in (0, 1/2).
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = EngineArg::Exact)]
    pub engine: EngineArg,
    /// Monte-Carlo trials (engine mc).
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Monte-Carlo seed (engine mc).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-trajectory step cap (engine mc).
    #[arg(long, default_value_t = crate::engine::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
    /// Configuration-graph node budget.
    #[arg(long, default_value_t = crate::engine::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Doc)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite: unitarity, middle, mpal, knapsack, l1l2, engine-selfcheck,
    /// sin2 or xy.
    #[arg(long)]
    pub suite: String,
    /// Exhaustive input-length limit for the protocol suites.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Scan limit for the sin2 suite.
    #[arg(long)]
    pub max_j: Option<u64>,
    /// Total-length limit for the xy suite.
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Trials per Monte-Carlo cross-check in the engine-selfcheck suite.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub protocol: String,
    /// Smallest input length (defaults to --max-n for a single row).
    #[arg(long)]
    pub min_n: Option<usize>,
    /// Largest input length.
    #[arg(long)]
    pub max_n: usize,
    /// Length increment between rows.
    #[arg(long, default_value_t = 10)]
    pub step: usize,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, default_value_t = crate::engine::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Doc)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub protocol: String,
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::engine::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
}

/// Run a parsed command; returns the rendered document and the process exit
/// code.
pub fn run(cli: &Cli) -> (String, i32) {
    let outcome = match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Verify(args) => run_verify(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match outcome {
        Ok((text, code)) => (text, code),
        Err(err) => {
            let code = match err {
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                _ => EXIT_USAGE,
            };
            (format!("error: {err}\n"), code)
        }
    }
}

fn parse_protocol(name: &str) -> Result<ProtocolId> {
    name.parse()
}

fn run_analyze(args: &AnalyzeArgs) -> Result<(String, i32)> {
    if let Some(path) = &args.machine_file {
        return analyze_machine_file(path, args);
    }
    let protocol = parse_protocol(args.protocol.as_deref().ok_or_else(|| {
        Error::InvalidArgument("analyze needs --protocol or --machine-file".into())
    })?)?;
    let opts = AnalyzeOptions {
        epsilon: args.epsilon,
        mode: match args.engine {
            EngineArg::Exact => EngineMode::Exact,
            EngineArg::Mc => EngineMode::MonteCarlo,
        },
        trials: args.trials,
        seed: args.seed,
        step_cap: args.step_cap,
        node_cap: args.node_cap,
    };
    let report = analyze(protocol, &args.input, &opts)?;
    let doc = ReportDocument {
        command: command_echo_analyze(args),
        body: ReportBody::Analysis(report),
    };
    let code = if doc.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((doc.render(), code))
}

fn command_echo_analyze(args: &AnalyzeArgs) -> String {
    let target = match (&args.protocol, &args.machine_file) {
        (Some(p), _) => format!("--protocol {p}"),
        (None, Some(f)) => format!("--machine-file {}", f.display()),
        (None, None) => String::new(),
    };
    let mut echo = format!(
        "analyze {target} --input {} --epsilon {} --engine {}",
        args.input,
        args.epsilon,
        match args.engine {
            EngineArg::Exact => "exact",
            EngineArg::Mc => "mc",
        }
    );
    if args.engine == EngineArg::Mc {
        echo.push_str(&format!(
            " --trials {} --seed {} --step-cap {}",
            args.trials, args.seed, args.step_cap
        ));
    }
    echo
}

/// External machines carry no prover strategy, so only non-interactive
/// machines (no communication states) are analyzable from a file.
fn analyze_machine_file(path: &PathBuf, args: &AnalyzeArgs) -> Result<(String, i32)> {
    let spec = load_machine(path)?;
    let violations = validate_spec(&spec);
    let mut out = String::new();
    out.push_str(&format!("schema: {SCHEMA_VERSION}\n"));
    out.push_str(&format!(
        "command: analyze --machine-file {} --input {}\n",
        path.display(),
        args.input
    ));
    out.push_str(&format!("machine: {}\n", spec.name));
    out.push_str(&format!("states: {}\n", spec.state_count()));
    out.push_str(&format!("quantum dimension: {}\n", spec.quantum_dim));
    if !violations.is_empty() {
        out.push_str(&format!("validation: {} violation(s)\n", violations.len()));
        for v in &violations {
            out.push_str(&format!("  {v}\n"));
        }
        return Ok((out, EXIT_CHECK_FAILED));
    }
    out.push_str("validation: ok\n");
    if (0..spec.state_count() as u16).any(|s| spec.state_kind(s) == StateKind::Communication) {
        return Err(Error::InvalidArgument(
            "machine-file analysis supports non-interactive machines only; \
             the built-in protocols supply their own provers"
                .into(),
        ));
    }
    let graph = build_config_graph(
        &spec,
        &args.input,
        &ProverStrategy::silent(),
        &BuildOptions {
            node_cap: args.node_cap,
            ..Default::default()
        },
    )?;
    let outcome = solve_absorption(&graph)?.outcome();
    out.push_str(&format!("input: {:?}\n", args.input));
    out.push_str(&format!("graph nodes: {}\n", graph.node_count()));
    out.push_str("iteration:\n");
    out.push_str(&format!("  p_accept       = {}\n", g12(outcome.p_accept)));
    out.push_str(&format!("  p_reject       = {}\n", g12(outcome.p_reject)));
    out.push_str(&format!("  p_restart      = {}\n", g12(outcome.p_restart)));
    out.push_str(&format!("  expected steps = {}\n", g12(outcome.expected_steps)));
    if outcome.halting_probability() > 0.0 {
        out.push_str(&format!(
            "overall acceptance   = {}\n",
            g12(overall_acceptance(&outcome)?)
        ));
        out.push_str(&format!(
            "expected total steps = {}\n",
            g12(expected_runtime(&outcome)?)
        ));
    } else {
        out.push_str("overall acceptance   = n/a (machine never halts)\n");
    }
    Ok((out, EXIT_OK))
}

fn run_verify(args: &VerifyArgs) -> Result<(String, i32)> {
    let suite: SuiteId = args.suite.parse()?;
    let mut limits = SuiteLimits::default();
    if let Some(n) = args.max_n {
        limits.soundness_max_n = n;
        limits.completeness_max_n = n;
        limits.pair_max_n = n;
        limits.sampled_n = n + 2;
    }
    if let Some(j) = args.max_j {
        limits.max_j = j;
    }
    if let Some(len) = args.max_len {
        limits.max_len = len;
    }
    if let Some(trials) = args.trials {
        limits.mc_trials = trials;
    }
    let report = run_suite(suite, &limits)?;
    let doc = ReportDocument {
        command: format!("verify --suite {suite}"),
        body: ReportBody::Suite(report),
    };
    let code = if doc.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((doc.render(), code))
}

fn run_sweep(args: &SweepArgs) -> Result<(String, i32)> {
    let protocol = parse_protocol(&args.protocol)?;
    if args.step == 0 {
        return Err(Error::InvalidArgument("--step must be positive".into()));
    }
    let min_n = args.min_n.unwrap_or(args.max_n);
    if min_n > args.max_n {
        return Err(Error::InvalidArgument(
            "--min-n must not exceed --max-n".into(),
        ));
    }
    let sizes: Vec<usize> = (min_n..=args.max_n).step_by(args.step).collect();
    let rows = sweep(protocol, &sizes, args.epsilon, args.node_cap)?;
    let slope = log_log_slope(&rows);
    match args.format {
        FormatArg::Csv => Ok((sweep_csv(&rows), EXIT_OK)),
        FormatArg::Doc => {
            let doc = ReportDocument {
                command: format!(
                    "sweep --protocol {protocol} --min-n {min_n} --max-n {} --step {} --epsilon {}",
                    args.max_n, args.step, args.epsilon
                ),
                body: ReportBody::Sweep { rows, slope },
            };
            Ok((doc.render(), EXIT_OK))
        }
    }
}

fn run_simulate(args: &SimulateArgs) -> Result<(String, i32)> {
    let protocol = parse_protocol(&args.protocol)?;
    let opts = AnalyzeOptions {
        epsilon: args.epsilon,
        mode: EngineMode::MonteCarlo,
        trials: args.trials,
        seed: args.seed,
        step_cap: args.step_cap,
        ..Default::default()
    };
    let report = analyze(protocol, &args.input, &opts)?;
    let doc = ReportDocument {
        command: format!(
            "simulate --protocol {protocol} --input {} --epsilon {} --trials {} --seed {} --step-cap {}",
            args.input, args.epsilon, args.trials, args.seed, args.step_cap
        ),
        body: ReportBody::Simulate { report },
    };
    let code = if doc.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((doc.render(), code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn run_line(line: &[&str]) -> (String, i32) {
        let cli = Cli::try_parse_from(line).expect("argument parse");
        run(&cli)
    }

    #[test]
    fn analyze_member_exits_zero() {
        let (text, code) = run_line(&[
            "qamfa", "analyze", "--protocol", "middle", "--input", "aaa",
        ]);
        assert_eq!(code, EXIT_OK, "{text}");
        assert!(text.contains("overall acceptance   = 1.00000000000e0"));
        assert!(text.contains("p_accept       = 7.81250000000e-3"));
    }

    #[test]
    fn analyze_rejects_bad_alphabet_with_usage_exit() {
        let (text, code) = run_line(&[
            "qamfa", "analyze", "--protocol", "middle", "--input", "abc",
        ]);
        assert_eq!(code, EXIT_USAGE, "{text}");
        assert!(text.starts_with("error:"));
    }

    #[test]
    fn oversized_subset_enumeration_exits_budget() {
        let input = format!("1{}", "#1".repeat(21));
        let (text, code) = run_line(&[
            "qamfa", "analyze", "--protocol", "knapsack", "--input", &input,
        ]);
        assert_eq!(code, EXIT_BUDGET, "{text}");
    }

    #[test]
    fn unknown_suite_is_usage_error() {
        let (text, code) = run_line(&["qamfa", "verify", "--suite", "nope"]);
        assert_eq!(code, EXIT_USAGE, "{text}");
    }

    #[test]
    fn single_point_sweep_has_no_fit() {
        let (text, code) = run_line(&[
            "qamfa", "sweep", "--protocol", "middle", "--max-n", "5", "--step", "2",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(text.contains("log-log slope: n/a"));
    }

    #[test]
    fn seeded_simulation_is_reproducible() {
        let line = [
            "qamfa", "simulate", "--protocol", "middle", "--input", "a", "--trials", "500",
            "--seed", "7",
        ];
        let (a, code_a) = run_line(&line);
        let (b, code_b) = run_line(&line);
        assert_eq!(code_a, EXIT_OK, "{a}");
        assert_eq!(code_b, EXIT_OK);
        assert_eq!(a, b);
    }
}
