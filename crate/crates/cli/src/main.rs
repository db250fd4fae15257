//! `zeris`: closed-form outage, N_min and energy-efficiency analysis of
//! zero-energy RIS links, with Monte Carlo cross-checks.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration or domain error,
//! 3 infeasible operating point, 4 element search exhausted.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zeris_core::experiment::config::{LoadedConfig, DEFAULT_TRIALS, PRESET_TABLE_1};
use zeris_core::experiment::run::scheme_at;
use zeris_core::experiment::{
    load_config, parse_config, provenance_path, provenance_record, run_experiment, write_table, Cell, ExperimentSpec,
    Scenario, Table, TableFormat,
};
use zeris_core::mc::{simulate_outage, with_workers, Estimate, SimulationMode, TrialPlan};
use zeris_core::outage::{DeliveredRatePerJoule, EfficiencyMetric, OperatingPoint};
use zeris_core::{Error, LinkAnalysis, MomentModel, Scheme, SchemeConfig};

const WORKERS_VAR: &str = "ZERIS_WORKERS";

#[derive(Parser)]
#[command(name = "zeris", version, about = "Outage and energy-efficiency analysis of zero-energy RIS links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment file; the table-1 preset when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Monte Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Output table; a provenance record is written next to it
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form outage at the configured operating point, or at the optimum
    Analyze,
    /// Closed-form outage next to a Monte Carlo estimate
    Simulate,
    /// Run the configured scenario over its grid
    Sweep,
    /// Smallest element count meeting the outage target
    Nmin,
    /// Energy efficiency at the optimum, over the grid when one is configured
    Ee,
    /// Check the configuration; with Monte Carlo settings, also check the closed form against simulation
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PaperFaithful,
    Physical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dat,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) | Error::Domain { .. } => 2,
        Error::Infeasible(_) => 3,
        Error::SearchExhausted { .. } => 4,
        _ => 1,
    }
}

fn workers() -> Result<usize, Error> {
    match std::env::var(WORKERS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w >= 1)
            .ok_or_else(|| Error::Config(format!("{WORKERS_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let workers = workers()?;
    let mut loaded = match &cli.common.config {
        Some(path) => load_config(path)?,
        None => parse_config(&format!("preset = \"{PRESET_TABLE_1}\""))?,
    };
    apply_overrides(&mut loaded, &cli.common, matches!(cli.command, Command::Simulate))?;
    let spec = &loaded.spec;
    with_workers(workers, || -> Result<ExitCode, Error> {
        let (table, code) = match cli.command {
            Command::Analyze => (analyze(spec)?, ExitCode::SUCCESS),
            Command::Simulate => (simulate(spec)?, ExitCode::SUCCESS),
            Command::Sweep => (run_experiment(spec)?, ExitCode::SUCCESS),
            Command::Nmin => (nmin(spec)?, ExitCode::SUCCESS),
            Command::Ee => (ee(spec)?, ExitCode::SUCCESS),
            Command::Validate => validate(&loaded)?,
        };
        emit(&table, &loaded)?;
        Ok(code)
    })?
}

fn apply_overrides(loaded: &mut LoadedConfig, c: &Common, needs_mc: bool) -> Result<(), Error> {
    let spec = &mut loaded.spec;
    if spec.mc.is_none() && (needs_mc || c.seed.is_some() || c.trials.is_some() || c.mode.is_some()) {
        spec.mc = Some(TrialPlan::new(DEFAULT_TRIALS, 0, SimulationMode::PaperFaithful)?);
        if c.trials.is_none() {
            loaded.defaulted.push(format!("mc.trials = {DEFAULT_TRIALS} (default)"));
        }
        if c.seed.is_none() {
            loaded.defaulted.push("mc.seed = 0 (default)".into());
        }
    }
    let overridden = [
        ("mc.seed", c.seed.is_some()),
        ("mc.trials", c.trials.is_some()),
        ("mc.mode", c.mode.is_some()),
        ("output.path", c.out.is_some()),
        ("output.format", c.format.is_some()),
    ];
    loaded.defaulted.retain(|d| !overridden.iter().any(|(key, set)| *set && d.starts_with(&format!("{key} = "))));
    if let Some(plan) = spec.mc.as_mut() {
        if let Some(seed) = c.seed {
            plan.seed = seed;
        }
        if let Some(trials) = c.trials {
            *plan = TrialPlan::new(trials, plan.seed, plan.mode)?;
        }
        if let Some(mode) = c.mode {
            plan.mode = match mode {
                Mode::PaperFaithful => SimulationMode::PaperFaithful,
                Mode::Physical => SimulationMode::Physical,
            };
        }
    }
    if let Some(out) = &c.out {
        spec.output.path = Some(out.clone());
    }
    if let Some(format) = c.format {
        spec.output.format = match format {
            Format::Dat => TableFormat::Dat,
            Format::Csv => TableFormat::Csv,
        };
    }
    Ok(())
}

/// Writes the table and its provenance record, or prints the table when no path is set.
fn emit(table: &Table, loaded: &LoadedConfig) -> Result<(), Error> {
    let spec = &loaded.spec;
    match &spec.output.path {
        Some(path) => {
            write_table(table, path, spec.output.format)?;
            let prov = provenance_path(path);
            std::fs::write(&prov, provenance_record(spec, &loaded.defaulted))
                .map_err(|source| Error::Io { path: prov, source })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(table.render(spec.output.format).as_bytes())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}

struct Pair {
    proposed: LinkAnalysis,
    benchmark: LinkAnalysis,
}

fn analyses(spec: &ExperimentSpec) -> Result<Pair, Error> {
    let sys = spec.system_config()?;
    let dep = spec.to_deployment()?;
    let qc = spec.quantizer_config()?;
    let l = spec.quantizer.truncation;
    Ok(Pair {
        proposed: LinkAnalysis::new(&sys, &dep, &qc, l, MomentModel::Proposed)?,
        benchmark: LinkAnalysis::new(&sys, &dep, &qc, l, MomentModel::Uniform)?,
    })
}

/// The configured operating point, else the proposed optimum.
fn operating_point(spec: &ExperimentSpec, a: &LinkAnalysis) -> Result<SchemeConfig, Error> {
    if let Some(sc) = spec.scheme.operating_point()? {
        return Ok(sc);
    }
    let n = spec.scheme.n;
    match a.optimal(spec.scheme.kind, n)?.point {
        Some(point) => scheme_at(point, n),
        None => Err(Error::Infeasible(format!(
            "no {} operating point covers the energy budget with N = {n}",
            spec.scheme.kind.label()
        ))),
    }
}

fn point_cells(sc: &SchemeConfig) -> Vec<Cell> {
    let n = Cell::Int(sc.n_total());
    match sc.scheme() {
        Scheme::TimeSwitching { tau } => vec![n, Cell::Num(tau), Cell::Text("-".into())],
        Scheme::ElementSplitting { n1, .. } => vec![n, Cell::Text("-".into()), Cell::Int(n1)],
    }
}

fn analyze(spec: &ExperimentSpec) -> Result<Table, Error> {
    let a = analyses(spec)?;
    let sc = operating_point(spec, &a.proposed)?;
    let p = a.proposed.outage(&sc)?;
    let b = a.benchmark.outage(&sc)?;
    let mut t = Table::new(["n", "tau", "n1", "proposed", "benchmark", "branch"]);
    let mut row = point_cells(&sc);
    row.extend([Cell::Num(p.probability), Cell::Num(b.probability), Cell::Text(format!("{:?}", p.branch))]);
    t.push(row);
    Ok(t)
}

fn simulate(spec: &ExperimentSpec) -> Result<Table, Error> {
    let plan = spec.mc.ok_or_else(|| Error::Config("simulation needs Monte Carlo settings".into()))?;
    let a = analyses(spec)?;
    let sc = operating_point(spec, &a.proposed)?;
    let p = a.proposed.outage(&sc)?.probability;
    let b = a.benchmark.outage(&sc)?.probability;
    let est = simulate_outage(&spec.system_config()?, &spec.to_deployment()?, &sc, &spec.quantizer_config()?, &plan)?;
    let mut t = Table::new(["n", "tau", "n1", "proposed", "benchmark", "mc", "mc_std_error", "mc_ci_lo", "mc_ci_hi"]);
    let mut row = point_cells(&sc);
    row.extend([Cell::Num(p), Cell::Num(b)]);
    row.extend(estimate_cells(&est));
    t.push(row);
    Ok(t)
}

fn estimate_cells(e: &Estimate) -> [Cell; 4] {
    [Cell::Num(e.value), Cell::Num(e.std_error), Cell::Num(e.ci95.0), Cell::Num(e.ci95.1)]
}

fn nmin(spec: &ExperimentSpec) -> Result<Table, Error> {
    if spec.scenario == Some(Scenario::NminVsDistance) {
        return run_experiment(spec);
    }
    let a = analyses(spec)?;
    let kind = spec.scheme.kind;
    let target = spec.search.target;
    let mut t = Table::new(["target", "nmin_proposed", "nmin_benchmark"]);
    t.push(vec![
        Cell::Num(target),
        Cell::Int(a.proposed.nmin_search(kind, target)?),
        Cell::Int(a.benchmark.nmin_search(kind, target)?),
    ]);
    Ok(t)
}

fn ee(spec: &ExperimentSpec) -> Result<Table, Error> {
    if spec.grid.is_some() {
        let mut s = spec.clone();
        s.scenario = Some(Scenario::EeVsN);
        return run_experiment(&s);
    }
    let a = analyses(spec)?;
    let sys = spec.system_config()?;
    let n = spec.scheme.n;
    let metric = DeliveredRatePerJoule;
    let p = a.proposed.optimal(spec.scheme.kind, n)?;
    let b = a.benchmark.optimal(spec.scheme.kind, n)?;
    let mut t = Table::new(["n", "ee_proposed", "ee_benchmark", "outage_proposed", "outage_benchmark", "point"]);
    let point = match p.point {
        Some(OperatingPoint::Tau(tau)) => format!("tau={}", zeris_core::experiment::format_number(tau)),
        Some(OperatingPoint::Split { n1, n2 }) => format!("n1={n1};n2={n2}"),
        None => "infeasible".into(),
    };
    t.push(vec![
        Cell::Int(n),
        Cell::Num(metric.efficiency(&sys, p.outage.probability)),
        Cell::Num(metric.efficiency(&sys, b.outage.probability)),
        Cell::Num(p.outage.probability),
        Cell::Num(b.outage.probability),
        Cell::Text(point),
    ]);
    Ok(t)
}

/// Agreement rule between a closed form and a simulated outage.
fn agrees(analytic: f64, est: &Estimate) -> bool {
    (analytic - est.value).abs() <= (3.0 * est.std_error).max(0.1 * est.value)
}

fn validate(loaded: &LoadedConfig) -> Result<(Table, ExitCode), Error> {
    let spec = &loaded.spec;
    spec.validate()?;
    for d in &loaded.defaulted {
        eprintln!("defaulted: {d}");
    }
    let Some(plan) = spec.mc else {
        let mut t = Table::new(["check", "result"]);
        t.push(vec![Cell::Text("config".into()), Cell::Text("pass".into())]);
        return Ok((t, ExitCode::SUCCESS));
    };
    if spec.scenario == Some(Scenario::MomentValidation) {
        let t = run_experiment(spec)?;
        let failed = t.column("check").is_some_and(|c| c.iter().any(|c| **c == Cell::Text("fail".into())));
        return Ok((t, if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS }));
    }
    let a = analyses(spec)?;
    let sc = operating_point(spec, &a.proposed)?;
    let analytic = a.proposed.outage(&sc)?.probability;
    let est = simulate_outage(&spec.system_config()?, &spec.to_deployment()?, &sc, &spec.quantizer_config()?, &plan)?;
    let pass = agrees(analytic, &est);
    let mut t = Table::new(["n", "tau", "n1", "proposed", "mc", "mc_std_error", "mc_ci_lo", "mc_ci_hi", "check"]);
    let mut row = point_cells(&sc);
    row.push(Cell::Num(analytic));
    row.extend(estimate_cells(&est));
    row.push(Cell::Text(if pass { "pass" } else { "fail" }.into()));
    t.push(row);
    Ok((t, if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE }))
}
