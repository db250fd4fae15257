//! Experiment scenarios: one table row per grid point.

use std::path::{Path, PathBuf};

use crate::cascade::{CascadeStats, MomentModel};
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentSpec, Scenario, TableFormat};
use crate::experiment::table::{write_table, Cell, Table};
use crate::mc::{simulate_cascade_moments, simulate_outage, Estimate, TrialPlan};
use crate::outage::{DeliveredRatePerJoule, EfficiencyMetric, LinkAnalysis, OperatingPoint, SchemeConfig};

/// Seed of the Monte Carlo run at grid point `index`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn plan_at(plan: &TrialPlan, index: usize) -> TrialPlan {
    TrialPlan { seed: point_seed(plan.seed, index), ..*plan }
}

fn mc_columns(columns: &mut Vec<&'static str>, plan: Option<&TrialPlan>) {
    if plan.is_some() {
        columns.extend(["mc", "mc_std_error", "mc_ci_lo", "mc_ci_hi"]);
    }
}

fn mc_cells(row: &mut Vec<Cell>, e: &Estimate) {
    row.extend([Cell::Num(e.value), Cell::Num(e.std_error), Cell::Num(e.ci95.0), Cell::Num(e.ci95.1)]);
}

/// Evaluates `f` at every grid point, in parallel when enabled, keeping grid order.
fn over_grid<T: Send>(values: &[f64], f: impl Fn(usize, f64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let annotate = |(i, &v): (usize, &f64)| f(i, v).map_err(|e| Error::GridPoint { index: i, source: Box::new(e) });
    #[cfg(feature = "parallel")]
    let results: Vec<Result<T>> = {
        use rayon::prelude::*;
        values.par_iter().enumerate().map(annotate).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<T>> = values.iter().enumerate().map(annotate).collect();
    results.into_iter().collect()
}

struct Analyses {
    proposed: LinkAnalysis,
    benchmark: LinkAnalysis,
}

fn analyses(spec: &ExperimentSpec, deployment_override: Option<crate::model::Deployment>) -> Result<Analyses> {
    let sys = spec.system_config()?;
    let dep = match deployment_override {
        Some(d) => d,
        None => spec.to_deployment()?,
    };
    let qc = spec.quantizer_config()?;
    let l = spec.quantizer.truncation;
    Ok(Analyses {
        proposed: LinkAnalysis::new(&sys, &dep, &qc, l, MomentModel::Proposed)?,
        benchmark: LinkAnalysis::new(&sys, &dep, &qc, l, MomentModel::Uniform)?,
    })
}

/// Runs the spec's scenario and returns its table, rows in grid order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table> {
    spec.validate()?;
    let scenario = spec.scenario.ok_or_else(|| Error::Config("no scenario configured".into()))?;
    let grid = spec.grid.as_ref().map(|g| g.values()).unwrap_or_default();
    match scenario {
        Scenario::OutageVsTau => outage_vs_tau(spec, &grid),
        Scenario::OutageVsSplit => outage_vs_split(spec, &grid),
        Scenario::NminVsDistance => nmin_vs_distance(spec, &grid),
        Scenario::EeVsN => ee_vs_n(spec, &grid),
        Scenario::MomentValidation => moment_validation(spec, &grid),
    }
}

fn outage_vs_tau(spec: &ExperimentSpec, grid: &[f64]) -> Result<Table> {
    let a = analyses(spec, None)?;
    let sys = spec.system_config()?;
    let dep = spec.to_deployment()?;
    let qc = spec.quantizer_config()?;
    let n = spec.scheme.n;
    let mut columns = vec!["tau", "proposed", "benchmark"];
    mc_columns(&mut columns, spec.mc.as_ref());
    let rows = over_grid(grid, |i, tau| {
        let sc = SchemeConfig::time_switching(n, tau)?;
        let mut row = vec![
            Cell::Num(tau),
            Cell::Num(a.proposed.outage(&sc)?.probability),
            Cell::Num(a.benchmark.outage(&sc)?.probability),
        ];
        if let Some(plan) = &spec.mc {
            mc_cells(&mut row, &simulate_outage(&sys, &dep, &sc, &qc, &plan_at(plan, i))?);
        }
        Ok(row)
    })?;
    Ok(table(columns, rows))
}

fn outage_vs_split(spec: &ExperimentSpec, grid: &[f64]) -> Result<Table> {
    let a = analyses(spec, None)?;
    let sys = spec.system_config()?;
    let dep = spec.to_deployment()?;
    let qc = spec.quantizer_config()?;
    let n = spec.scheme.n;
    let mut columns = vec!["n1_fraction", "n1", "proposed", "benchmark"];
    mc_columns(&mut columns, spec.mc.as_ref());
    let rows = over_grid(grid, |i, fraction| {
        let n1 = (fraction * n as f64).round() as u64;
        let sc = SchemeConfig::element_splitting_of(n, n1, n - n1)?;
        let mut row = vec![
            Cell::Num(fraction),
            Cell::Int(n1),
            Cell::Num(a.proposed.outage(&sc)?.probability),
            Cell::Num(a.benchmark.outage(&sc)?.probability),
        ];
        if let Some(plan) = &spec.mc {
            mc_cells(&mut row, &simulate_outage(&sys, &dep, &sc, &qc, &plan_at(plan, i))?);
        }
        Ok(row)
    })?;
    Ok(table(columns, rows))
}

fn nmin_vs_distance(spec: &ExperimentSpec, grid: &[f64]) -> Result<Table> {
    let total = spec.search.total_distance;
    let kind = spec.scheme.kind;
    let target = spec.search.target;
    let columns = vec!["d1", "d2", "nmin_proposed", "nmin_benchmark"];
    let rows = over_grid(grid, |_, d1| {
        let d2 = total - d1;
        let dep = spec.deployment.with_hops(d1, d2).to_deployment()?;
        let a = analyses(spec, Some(dep))?;
        Ok(vec![
            Cell::Num(d1),
            Cell::Num(d2),
            Cell::Int(a.proposed.nmin_search(kind, target)?),
            Cell::Int(a.benchmark.nmin_search(kind, target)?),
        ])
    })?;
    Ok(table(columns, rows))
}

/// Scheme configuration at an optimal operating point.
pub fn scheme_at(point: OperatingPoint, n: u64) -> Result<SchemeConfig> {
    match point {
        OperatingPoint::Tau(tau) => SchemeConfig::time_switching(n, tau.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)),
        OperatingPoint::Split { n1, n2 } => SchemeConfig::element_splitting(n1, n2),
    }
}

fn ee_vs_n(spec: &ExperimentSpec, grid: &[f64]) -> Result<Table> {
    let a = analyses(spec, None)?;
    let sys = spec.system_config()?;
    let dep = spec.to_deployment()?;
    let qc = spec.quantizer_config()?;
    let kind = spec.scheme.kind;
    let metric = DeliveredRatePerJoule;
    let mut columns = vec!["n", "ee_proposed", "ee_benchmark", "outage_proposed", "outage_benchmark"];
    if spec.mc.is_some() {
        columns.extend(["mc", "mc_std_error", "mc_ci_lo", "mc_ci_hi", "ee_mc"]);
    }
    let rows = over_grid(grid, |i, nf| {
        let n = nf as u64;
        let p = a.proposed.optimal(kind, n)?;
        let b = a.benchmark.optimal(kind, n)?;
        let mut row = vec![
            Cell::Int(n),
            Cell::Num(metric.efficiency(&sys, p.outage.probability)),
            Cell::Num(metric.efficiency(&sys, b.outage.probability)),
            Cell::Num(p.outage.probability),
            Cell::Num(b.outage.probability),
        ];
        if let Some(plan) = &spec.mc {
            let est = match p.point {
                Some(point) => simulate_outage(&sys, &dep, &scheme_at(point, n)?, &qc, &plan_at(plan, i))?,
                // no operating point covers the energy budget: every block is an outage
                None => Estimate::binomial(plan.n_trials, plan.n_trials),
            };
            mc_cells(&mut row, &est);
            row.push(Cell::Num(metric.efficiency(&sys, est.value)));
        }
        Ok(row)
    })?;
    Ok(table(columns, rows))
}

fn moment_validation(spec: &ExperimentSpec, grid: &[f64]) -> Result<Table> {
    let sys = spec.system_config()?;
    let dep = spec.to_deployment()?;
    let qc = spec.quantizer_config()?;
    let plan = spec.mc.ok_or_else(|| Error::Config("moment-validation needs an [mc] section".into()))?;
    let leg = *dep.fading_leg();
    let mix = leg.phase_mixture(sys.wavelength);
    let stats = CascadeStats::new(&leg, &mix, &qc, spec.quantizer.truncation, MomentModel::Proposed);
    let columns = vec!["n", "ex_closed", "ex_mc", "ex_std_error", "ex2_closed", "ex2_mc", "ex2_std_error", "check"];
    let rows = over_grid(grid, |i, nf| {
        let n = nf as u64;
        let (ex, ex2) = simulate_cascade_moments(n, &leg, &mix, &qc, &plan_at(&plan, i))?;
        let (c1, c2) = (stats.mean(n), stats.second_moment(n));
        let pass = ex.within(c1, 3.0) && ex2.within(c2, 3.0);
        Ok(vec![
            Cell::Int(n),
            Cell::Num(c1),
            Cell::Num(ex.value),
            Cell::Num(ex.std_error),
            Cell::Num(c2),
            Cell::Num(ex2.value),
            Cell::Num(ex2.std_error),
            Cell::Text(if pass { "pass" } else { "fail" }.into()),
        ])
    })?;
    Ok(table(columns, rows))
}

fn table(columns: Vec<&str>, rows: Vec<Vec<Cell>>) -> Table {
    let mut t = Table::new(columns);
    t.rows = rows;
    t
}

/// Path of the provenance record written next to `out`.
pub fn provenance_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".provenance.toml");
    out.with_file_name(name)
}

/// Everything needed to regenerate a table: resolved config, seed, tool version and notes.
pub fn provenance_record(spec: &ExperimentSpec, defaulted: &[String]) -> String {
    let mut doc = toml::Table::new();
    doc.insert("tool".into(), env!("CARGO_PKG_NAME").into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    if let Some(plan) = &spec.mc {
        doc.insert("seed".into(), toml::Value::Integer(plan.seed as i64));
        doc.insert("mode".into(), plan.mode.label().into());
        doc.insert("point_seeds".into(), "splitmix64(seed, grid index)".into());
    }
    doc.insert(
        "efficiency_metric".into(),
        format!("{}: R_thr (1 - P_out) / (P_t T)", DeliveredRatePerJoule.name()).into(),
    );
    doc.insert("defaulted".into(), toml::Value::Array(defaulted.iter().map(|d| d.as_str().into()).collect()));
    let config: toml::Table = toml::from_str(&spec.to_toml()).expect("spec serializes to a TOML table");
    doc.insert("config".into(), toml::Value::Table(config));
    toml::to_string(&doc).expect("plain data always serializes")
}

/// Runs the scenario, writes the table and its provenance record.
pub fn run_and_write(spec: &ExperimentSpec, defaulted: &[String], out: &Path, format: TableFormat) -> Result<Table> {
    let t = run_experiment(spec)?;
    write_table(&t, out, format)?;
    let prov = provenance_path(out);
    std::fs::write(&prov, provenance_record(spec, defaulted))
        .map_err(|source| Error::Io { path: prov.clone(), source })?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::config::{parse_config, Grid};
    use crate::model::Side;

    #[test]
    fn tau_sweep_rows_follow_grid() {
        let mut spec = ExperimentSpec::table_1(Side::TxSide);
        spec.scenario = Some(Scenario::OutageVsTau);
        spec.grid = Some(Grid::Range { start: 0.01, stop: 0.99, points: 101 });
        let t = run_experiment(&spec).unwrap();
        assert_eq!(t.rows.len(), 101);
        for row in &t.rows {
            let p = row[1].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
        // small tau cannot cover consumption at N = 250
        assert_eq!(t.rows[0][1], Cell::Num(1.0));
    }

    #[test]
    fn errors_carry_grid_index() {
        let mut spec = ExperimentSpec::table_1(Side::TxSide);
        spec.scenario = Some(Scenario::NminVsDistance);
        spec.search.target = 1e-300;
        spec.grid = Some(Grid::Values(vec![10.0, 20.0]));
        spec.system.transmit_power_w = 1e-6;
        let err = run_experiment(&spec).unwrap_err();
        assert!(matches!(err, Error::GridPoint { index: 0, .. }), "{err}");
        assert!(matches!(err.root(), Error::SearchExhausted { .. }));
    }

    #[test]
    fn provenance_round_trips_config() {
        let loaded = parse_config("preset = \"paper-table-1\"\n").unwrap();
        let record = provenance_record(&loaded.spec, &loaded.defaulted);
        let doc: toml::Table = toml::from_str(&record).unwrap();
        let config = toml::to_string(doc["config"].as_table().unwrap()).unwrap();
        assert_eq!(parse_config(&config).unwrap().spec, loaded.spec);
        assert!(record.contains("transmit_power_w"));
    }

    #[test]
    fn point_seeds_differ() {
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
        assert_ne!(point_seed(1, 0), point_seed(2, 0));
        assert_eq!(point_seed(7, 3), point_seed(7, 3));
    }
}
