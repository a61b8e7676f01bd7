//! Experiment runner: sweeps (policy, k, r, attack subset) cells over a
//! scenario config and emits one CSV row per metric, with analytical and
//! simulated columns depending on the mode. See docs/output.md for the
//! schema and docs/scenario-format.md for the config format.

use clap::{Args, Parser, Subcommand, ValueEnum};
use lncnet_core::analysis::{AnalysisError, Analyzer};
use lncnet_core::netmodel::{load_scenario, min_cut_check, EdgeId, Scenario};
use lncnet_core::sim::{run_experiment, SimError, SimReport, TrialConfig};
use lncnet_core::{PolicyKind, RndModel, SelectionPolicy};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "lncnet", about = "Exposure analysis of coded multipath optical transmission")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment sweep and write CSV results.
    Run(RunArgs),
    /// Check a scenario config against the model invariants.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// analyze: closed forms only; simulate: Monte Carlo only; compare: both.
    #[arg(long, value_enum, default_value_t = Mode::Compare)]
    mode: Mode,
    /// Path selection policies to sweep.
    #[arg(long, value_enum, default_value_t = Policy::Both)]
    policy: Policy,
    /// Generation sizes to sweep.
    #[arg(long, value_delimiter = ',', default_value = "4,8")]
    k: Vec<usize>,
    /// Redundancy values to sweep; xi = k + r.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    r: Vec<usize>,
    /// One attack subset per occurrence, e.g. --attack-edges 2-5,8-9.
    /// Defaults to every non-empty subset of the scenario's attack edges.
    #[arg(long = "attack-edges", value_name = "EDGES")]
    attack_edges: Vec<String>,
    /// Monte Carlo trials per cell.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Master seed; trial t draws from RNG stream t.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Scenario config file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Largest transmission width the scenario must support.
    #[arg(long, default_value_t = 11)]
    xi: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Analyze,
    Simulate,
    Compare,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Opt,
    Rnd,
    Both,
}

impl Policy {
    fn kinds(self) -> Vec<PolicyKind> {
        match self {
            Policy::Opt => vec![PolicyKind::Opt],
            Policy::Rnd => vec![PolicyKind::Rnd],
            Policy::Both => vec![PolicyKind::Opt, PolicyKind::Rnd],
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Runtime(format!("analysis failed: {e}"))
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Runtime(format!("simulation failed: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's rendering (including --help) but our exit codes.
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { ExitCode::SUCCESS } else { ExitCode::from(EXIT_USAGE) };
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(&args),
        Command::Validate(args) => validate(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lncnet: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load(path: &PathBuf) -> Result<Scenario, CliError> {
    load_scenario(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Every non-empty subset of the scenario's attacked edges, eavesdrop and
/// jam lists combined, in mask order.
fn default_subsets(scenario: &Scenario) -> Vec<Vec<EdgeId>> {
    let edges = scenario.attack.all_edges();
    let mut out = Vec::new();
    for mask in 1u32..1 << edges.len() {
        out.push(
            edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect(),
        );
    }
    out
}

fn parse_subsets(args: &RunArgs, scenario: &Scenario) -> Result<Vec<Vec<EdgeId>>, CliError> {
    if args.attack_edges.is_empty() {
        let subsets = default_subsets(scenario);
        if subsets.is_empty() {
            return Err(CliError::Validation(
                "scenario declares no attack edges; pass --attack-edges".into(),
            ));
        }
        return Ok(subsets);
    }
    args.attack_edges
        .iter()
        .map(|spec| {
            spec.split(',')
                .map(|name| {
                    let edge = EdgeId::parse(name)
                        .map_err(|e| CliError::Usage(format!("--attack-edges: {e}")))?;
                    if !scenario.topology.contains_edge(edge) {
                        return Err(CliError::Validation(format!(
                            "attack edge {edge} is not in the topology"
                        )));
                    }
                    Ok(edge)
                })
                .collect()
        })
        .collect()
}

fn edges_label(edges: &[EdgeId]) -> String {
    edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("+")
}

fn fmt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.9}"),
        None => String::new(),
    }
}

struct Row {
    policy: PolicyKind,
    k: usize,
    r: usize,
    attack: String,
    metric: &'static str,
    analytical: Option<f64>,
    analytical_alt: Option<f64>,
    sim_mean: Option<f64>,
    ci_halfwidth: Option<f64>,
}

/// Closed-form metric values for one cell; `alt` carries the verbatim
/// exactly-xi-available normalization for P-RND and is absent for P-OPT.
struct CellAnalysis {
    blocking: f64,
    lambda_fraction: f64,
    lambda_star: f64,
    theta_eavesdrop: f64,
    theta_jam: f64,
    alt: Option<Box<CellAnalysis>>,
}

fn analyze_cell(
    analyzer: &Analyzer,
    policy: SelectionPolicy,
    k: usize,
    r: usize,
    subset: &[EdgeId],
    model: RndModel,
) -> Result<CellAnalysis, CliError> {
    let y = analyzer.expected_wiretap_paths(policy, subset, model)?;
    let alt = if policy.kind == PolicyKind::Rnd && model == RndModel::Operational {
        Some(Box::new(analyze_cell(analyzer, policy, k, r, subset, RndModel::Formula)?))
    } else {
        None
    };
    Ok(CellAnalysis {
        blocking: analyzer.blocking(policy.xi)?,
        lambda_fraction: y / policy.xi as f64,
        lambda_star: y / k as f64,
        theta_eavesdrop: analyzer.catastrophic_threat(policy, k, subset, model)?,
        theta_jam: analyzer.catastrophic_threat(policy, r + 1, subset, model)?,
        alt,
    })
}

fn simulate_cell(
    scenario: &Scenario,
    policy: PolicyKind,
    k: usize,
    r: usize,
    subset: &[EdgeId],
    trials: u64,
    seed: u64,
) -> Result<SimReport, CliError> {
    // Measure the subset in both attack roles in a single run; the roles
    // only differ in which per-trial count each metric reads.
    let mut cell = scenario.clone();
    cell.attack.eavesdrop_edges = subset.to_vec();
    cell.attack.jam_edges = subset.to_vec();
    let mut config = TrialConfig::new(policy, k, r);
    config.trials = trials;
    config.seed = seed;
    Ok(run_experiment(&cell, &config)?)
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    if args.k.is_empty() || args.r.is_empty() {
        return Err(CliError::Usage("--k and --r sweeps must be non-empty".into()));
    }
    if args.k.contains(&0) {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    let scenario = load(&args.scenario)?;
    let subsets = parse_subsets(args, &scenario)?;
    let analyzer = Analyzer::new(&scenario)
        .map_err(|e| CliError::Validation(format!("scenario not analyzable: {e}")))?;

    let mut rows = Vec::new();
    for policy in args.policy.kinds() {
        for &k in &args.k {
            for &r in &args.r {
                let xi = k + r;
                if xi > scenario.paths.len() {
                    return Err(CliError::Validation(format!(
                        "k={k} r={r} needs xi={xi} paths, scenario has {}",
                        scenario.paths.len()
                    )));
                }
                let sel = SelectionPolicy { kind: policy, xi };
                for subset in &subsets {
                    let analysis = if args.mode != Mode::Simulate {
                        Some(analyze_cell(&analyzer, sel, k, r, subset, RndModel::Operational)?)
                    } else {
                        None
                    };
                    let report = if args.mode != Mode::Analyze {
                        Some(simulate_cell(
                            &scenario, policy, k, r, subset, args.trials, args.seed,
                        )?)
                    } else {
                        None
                    };
                    rows.extend(cell_rows(policy, k, r, subset, &analysis, &report));
                }
            }
        }
    }
    write_csv(&scenario.name, &rows, args.out.as_deref())
}

fn cell_rows(
    policy: PolicyKind,
    k: usize,
    r: usize,
    subset: &[EdgeId],
    analysis: &Option<CellAnalysis>,
    report: &Option<SimReport>,
) -> Vec<Row> {
    let a = analysis.as_ref();
    let alt = a.and_then(|c| c.alt.as_deref());
    let s = report.as_ref();
    let label = edges_label(subset);
    let metrics: [(&'static str, Option<f64>, Option<f64>, Option<(f64, f64)>); 5] = [
        (
            "blocking",
            a.map(|c| c.blocking),
            None,
            s.map(|r| (r.blocking.mean, r.blocking.ci_halfwidth)),
        ),
        (
            "lambda_fraction",
            a.map(|c| c.lambda_fraction),
            alt.map(|c| c.lambda_fraction),
            s.map(|r| (r.lambda_fraction.mean, r.lambda_fraction.ci_halfwidth)),
        ),
        (
            "lambda_star",
            a.map(|c| c.lambda_star),
            alt.map(|c| c.lambda_star),
            s.map(|r| (r.lambda_star.mean, r.lambda_star.ci_halfwidth)),
        ),
        (
            "theta_eavesdrop",
            a.map(|c| c.theta_eavesdrop),
            alt.map(|c| c.theta_eavesdrop),
            s.map(|r| (r.eavesdrop_success.mean, r.eavesdrop_success.ci_halfwidth)),
        ),
        (
            "theta_jam",
            a.map(|c| c.theta_jam),
            alt.map(|c| c.theta_jam),
            s.map(|r| (r.jam_success.mean, r.jam_success.ci_halfwidth)),
        ),
    ];
    metrics
        .into_iter()
        .map(|(metric, analytical, analytical_alt, sim)| Row {
            policy,
            k,
            r,
            attack: label.clone(),
            metric,
            analytical,
            analytical_alt,
            sim_mean: sim.map(|(m, _)| m),
            ci_halfwidth: sim.map(|(_, h)| h),
        })
        .collect()
}

fn write_csv(scenario: &str, rows: &[Row], out: Option<&std::path::Path>) -> Result<(), CliError> {
    let mut text = String::from(
        "scenario,policy,k,r,xi,attack_edges,metric,analytical,analytical_alt,sim_mean,ci_halfwidth\n",
    );
    for row in rows {
        let policy = match row.policy {
            PolicyKind::Opt => "opt",
            PolicyKind::Rnd => "rnd",
        };
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            scenario,
            policy,
            row.k,
            row.r,
            row.k + row.r,
            row.attack,
            row.metric,
            fmt(row.analytical),
            fmt(row.analytical_alt),
            fmt(row.sim_mean),
            fmt(row.ci_halfwidth),
        ));
    }
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::Runtime(format!("cannot write stdout: {e}")))
        }
    }
}

fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    // Structural invariants are enforced by the loader; reaching this
    // point with a Scenario means they hold.
    let scenario = load(&args.scenario)?;
    println!("scenario {:?}: structure ok", scenario.name);
    println!(
        "  {} nodes, {} edges, {} candidate paths, {} attacked edges",
        scenario.topology.node_count,
        scenario.topology.edges.len(),
        scenario.paths.len(),
        scenario.attack.all_edges().len(),
    );

    let mut failed = false;
    let mut report = |ok: bool, what: &str| {
        println!("  {}: {what}", if ok { "pass" } else { "FAIL" });
        failed |= !ok;
    };
    report(
        scenario.paths.len() as u32 >= args.xi,
        &format!("at least xi={} candidate paths", args.xi),
    );
    report(
        min_cut_check(&scenario.topology, args.xi),
        &format!("min-cut between source and destination >= {}", args.xi),
    );
    let sorted = scenario.paths.paths().windows(2).all(|w| w[0].delay <= w[1].delay);
    report(sorted, "path table sorted by delay");
    if failed {
        return Err(CliError::Validation("scenario failed validation".into()));
    }
    Ok(())
}
