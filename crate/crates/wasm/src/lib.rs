//! Browser bindings. Every curve comes back as a flat `Float64Array` of
//! rows, `stride` values per row; see `www/main.js` for the unpacking.

use wasm_bindgen::prelude::*;
use zeris_core::experiment::config::DeploymentParams;
use zeris_core::outage::{DeliveredRatePerJoule, EfficiencyMetric};
use zeris_core::phase::{error_pdf, DEFAULT_TRUNCATION};
use zeris_core::{
    Error, LinkAnalysis, MomentModel, PhaseMixture, QuantizerConfig, SchemeConfig, SchemeKind, Side, SystemConfig,
};

fn side(name: &str) -> Result<Side, Error> {
    match name {
        "tx" | "tx-side" => Ok(Side::TxSide),
        "ue" | "ue-side" => Ok(Side::UeSide),
        other => Err(Error::Config(format!("unknown side {other:?}"))),
    }
}

fn kind(name: &str) -> Result<SchemeKind, Error> {
    match name {
        "ts" => Ok(SchemeKind::TimeSwitching),
        "es" => Ok(SchemeKind::ElementSplitting),
        other => Err(Error::Config(format!("unknown scheme {other:?}"))),
    }
}

fn pair(side_name: &str, bits: u32, power_w: f64) -> Result<(SystemConfig, LinkAnalysis, LinkAnalysis), Error> {
    let sys = SystemConfig::reference(power_w);
    let dep = DeploymentParams::table_1(side(side_name)?).to_deployment()?;
    let qc = QuantizerConfig::new(bits)?;
    let proposed = LinkAnalysis::new(&sys, &dep, &qc, DEFAULT_TRUNCATION, MomentModel::Proposed)?;
    let benchmark = LinkAnalysis::new(&sys, &dep, &qc, DEFAULT_TRUNCATION, MomentModel::Uniform)?;
    Ok((sys, proposed, benchmark))
}

fn check_points(points: u32) -> Result<usize, Error> {
    if !(2..=10_000).contains(&points) {
        return Err(Error::Config(format!("points = {points} must lie in 2..=10000")));
    }
    Ok(points as usize)
}

/// Rows `(epsilon, density)` over `[-Δ/2, Δ/2]`, then one trailing row `(atom location, atom weight)`.
pub fn error_pdf_rows(kappa: f64, rice: f64, mean_phase: f64, bits: u32, points: u32) -> Result<Vec<f64>, Error> {
    let n = check_points(points)?;
    let qc = QuantizerConfig::new(bits)?;
    let mix = PhaseMixture::new(kappa, rice, mean_phase)?;
    let h = 0.5 * qc.step();
    let mut out = Vec::with_capacity(2 * n + 2);
    let mut atom = (0.0, 0.0);
    for i in 0..n {
        let e = -h + 2.0 * h * i as f64 / (n - 1) as f64;
        let d = error_pdf(e.clamp(-h, h), &mix, &qc)?;
        out.extend([e, d.continuous_density]);
        atom = (d.atom_location, d.atom_weight);
    }
    out.extend([atom.0, atom.1]);
    Ok(out)
}

/// Rows `(x, proposed, benchmark)`: `x` is τ for TS and `N₁/N` for ES.
pub fn outage_rows(
    side_name: &str,
    scheme: &str,
    bits: u32,
    n: u32,
    power_w: f64,
    points: u32,
) -> Result<Vec<f64>, Error> {
    let count = check_points(points)?;
    let (_, p, b) = pair(side_name, bits, power_w)?;
    let kind = kind(scheme)?;
    let n = u64::from(n);
    let mut out = Vec::with_capacity(3 * count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let (x, sc) = match kind {
            SchemeKind::TimeSwitching => {
                let tau = 0.005 + 0.99 * t;
                (tau, SchemeConfig::time_switching(n, tau)?)
            }
            SchemeKind::ElementSplitting => {
                let n1 = (t * n as f64).round() as u64;
                (n1 as f64 / n as f64, SchemeConfig::element_splitting_of(n, n1, n - n1)?)
            }
        };
        out.extend([x, p.outage(&sc)?.probability, b.outage(&sc)?.probability]);
    }
    Ok(out)
}

/// Rows `(N, EE proposed, EE benchmark)` at each model's optimal operating point.
pub fn ee_rows(
    side_name: &str,
    scheme: &str,
    bits: u32,
    n_start: u32,
    n_stop: u32,
    power_w: f64,
    points: u32,
) -> Result<Vec<f64>, Error> {
    let count = check_points(points)?;
    if !(n_start >= 1 && n_stop > n_start) {
        return Err(Error::Config(format!("need 1 <= n_start < n_stop, got {n_start}..{n_stop}")));
    }
    let (sys, p, b) = pair(side_name, bits, power_w)?;
    let kind = kind(scheme)?;
    let metric = DeliveredRatePerJoule;
    let mut out = Vec::with_capacity(3 * count);
    let mut last = 0;
    for i in 0..count {
        let n = (n_start as f64 + (n_stop - n_start) as f64 * i as f64 / (count - 1) as f64).round() as u64;
        if n == last {
            continue;
        }
        last = n;
        let ep = metric.efficiency(&sys, p.optimal(kind, n)?.outage.probability);
        let eb = metric.efficiency(&sys, b.optimal(kind, n)?.outage.probability);
        out.extend([n as f64, ep, eb]);
    }
    Ok(out)
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = errorPdf)]
pub fn error_pdf_js(kappa: f64, rice: f64, mean_phase: f64, bits: u32, points: u32) -> Result<Vec<f64>, JsError> {
    error_pdf_rows(kappa, rice, mean_phase, bits, points).map_err(js)
}

#[wasm_bindgen(js_name = outageCurve)]
pub fn outage_curve_js(
    side: &str,
    scheme: &str,
    bits: u32,
    n: u32,
    power_w: f64,
    points: u32,
) -> Result<Vec<f64>, JsError> {
    outage_rows(side, scheme, bits, n, power_w, points).map_err(js)
}

#[wasm_bindgen(js_name = efficiencyCurve)]
pub fn ee_curve_js(
    side: &str,
    scheme: &str,
    bits: u32,
    n_start: u32,
    n_stop: u32,
    power_w: f64,
    points: u32,
) -> Result<Vec<f64>, JsError> {
    ee_rows(side, scheme, bits, n_start, n_stop, power_w, points).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_rows_integrate_to_one() {
        let rows = error_pdf_rows(3.0, 4.45, 1.0, 2, 2001).unwrap();
        let (body, atom) = rows.split_at(rows.len() - 2);
        let xs: Vec<f64> = body.iter().step_by(2).copied().collect();
        let ys: Vec<f64> = body.iter().skip(1).step_by(2).copied().collect();
        let h = xs[1] - xs[0];
        let trapezoid: f64 = ys.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
        assert!((trapezoid + atom[1] - 1.0).abs() < 1e-5, "{}", trapezoid + atom[1]);
    }

    #[test]
    fn outage_rows_have_three_columns() {
        let rows = outage_rows("tx", "ts", 1, 250, 0.4, 50).unwrap();
        assert_eq!(rows.len(), 150);
        for r in rows.chunks(3) {
            assert!((0.0..=1.0).contains(&r[1]) && (0.0..=1.0).contains(&r[2]));
        }
        // small τ cannot cover the consumption
        assert_eq!(rows[1], 1.0);
    }

    #[test]
    fn ee_rows_skip_repeated_n() {
        let rows = ee_rows("ue", "es", 1, 600, 605, 0.4, 20).unwrap();
        let ns: Vec<f64> = rows.iter().step_by(3).copied().collect();
        assert_eq!(ns, vec![600.0, 601.0, 602.0, 603.0, 604.0, 605.0]);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(outage_rows("rx", "ts", 1, 250, 0.4, 10).is_err());
        assert!(outage_rows("tx", "xs", 1, 250, 0.4, 10).is_err());
        assert!(error_pdf_rows(3.0, 0.0, 0.0, 0, 10).is_err());
        assert!(ee_rows("tx", "ts", 1, 300, 200, 0.4, 10).is_err());
        assert!(ee_rows("tx", "ts", 1, 200, 300, 0.4, 1).is_err());
    }
}
