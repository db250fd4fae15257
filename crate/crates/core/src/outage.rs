//! Joint energy / data-rate outage of a surface-assisted link, the operating
//! points that minimise it, the minimum element count for an outage target,
//! and energy efficiency.
//!
//! Tx-side surfaces harvest from a deterministic LoS leg, so the energy
//! condition is a hard cutoff on the element count and only the rate event is
//! random. UE-side surfaces harvest from the fading leg; both events are then
//! driven by the same cascade power `X`.

use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeStats, GammaMatch, MomentModel};
use crate::error::{Error, Result};
use crate::model::{path_loss, Deployment, Side, SystemConfig};
use crate::phase::QuantizerConfig;

/// Largest element count `nmin_search` will try.
pub const NMIN_SEARCH_LIMIT: u64 = 1_000_000;

/// Harvest-and-reflect discipline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Fraction `tau` of the block harvests, the rest transmits.
    TimeSwitching { tau: f64 },
    /// `n1` elements harvest while `n2` reflect.
    ElementSplitting { n1: u64, n2: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "ts")]
    TimeSwitching,
    #[serde(rename = "es")]
    ElementSplitting,
}

impl SchemeKind {
    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::TimeSwitching => "ts",
            SchemeKind::ElementSplitting => "es",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    scheme: Scheme,
    n_total: u64,
}

impl SchemeConfig {
    pub fn time_switching(n_total: u64, tau: f64) -> Result<Self> {
        check_tau(tau)?;
        if n_total < 1 {
            return Err(Error::domain("n", n_total as f64, "N >= 1"));
        }
        Ok(Self { scheme: Scheme::TimeSwitching { tau }, n_total })
    }

    /// Split with `n1 + n2` elements in total. Either side may be empty.
    pub fn element_splitting(n1: u64, n2: u64) -> Result<Self> {
        if n1 + n2 < 1 {
            return Err(Error::domain("n", 0.0, "N >= 1"));
        }
        Ok(Self { scheme: Scheme::ElementSplitting { n1, n2 }, n_total: n1 + n2 })
    }

    /// Checked constructor for a split that must add up to `n_total`.
    pub fn element_splitting_of(n_total: u64, n1: u64, n2: u64) -> Result<Self> {
        if n1 + n2 != n_total {
            return Err(Error::domain("n1", n1 as f64, "n1 + n2 must equal N"));
        }
        Self::element_splitting(n1, n2)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn kind(&self) -> SchemeKind {
        match self.scheme {
            Scheme::TimeSwitching { .. } => SchemeKind::TimeSwitching,
            Scheme::ElementSplitting { .. } => SchemeKind::ElementSplitting,
        }
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain("tau", tau, "0 < tau < 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Energy cannot be covered: outage is certain.
    HardCutoff,
    /// `Pr(X ≤ x)` under the matched Gamma law.
    GammaCdf,
    /// Union of two independent Gamma events.
    UnionFormula,
    /// `X` has (numerically) zero variance or no elements; step CDF.
    Degenerate,
}

/// Thresholds behind an outage value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Feasibility {
    /// Element-count threshold of the hard cutoff (Tx side).
    pub n_min: Option<f64>,
    /// Threshold on `X` set by the energy budget.
    pub energy_threshold: Option<f64>,
    /// Threshold on `X` set by the rate target.
    pub rate_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub probability: f64,
    pub branch: Branch,
    /// The active threshold on `X` (the energy one for the union formula's first event).
    pub threshold_x: f64,
    /// One match per Gamma event evaluated.
    pub matches: Vec<GammaMatch>,
    pub feasibility: Feasibility,
}

impl OutageResult {
    fn hard_cutoff(threshold_x: f64, feasibility: Feasibility) -> Self {
        Self { probability: 1.0, branch: Branch::HardCutoff, threshold_x, matches: Vec::new(), feasibility }
    }
}

/// Where a scheme operates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatingPoint {
    Tau(f64),
    Split { n1: u64, n2: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalPoint {
    /// `None` when no operating point covers the energy budget.
    pub point: Option<OperatingPoint>,
    pub outage: OutageResult,
}

/// Time-switching factor that balances the two UE-side thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauChoice {
    pub tau: f64,
    /// Set when the terms never cross and `tau` sits at an end of `(0, 1)`.
    pub at_boundary: bool,
}

/// Closed-form link analysis for one system, deployment and quantizer.
#[derive(Debug, Clone)]
pub struct LinkAnalysis {
    sys: SystemConfig,
    deployment: Deployment,
    quantizer: QuantizerConfig,
    truncation: u32,
    model: MomentModel,
    stats: CascadeStats,
    /// `ζ P_t G_t ℓ₁`: harvested power per unit of `X`.
    harvest_gain: f64,
    /// `γ_t G ℓ₁ ℓ₂`: receive SNR per unit of `X`.
    snr_gain: f64,
    element_power: f64,
}

impl LinkAnalysis {
    pub fn new(
        sys: &SystemConfig,
        deployment: &Deployment,
        quantizer: &QuantizerConfig,
        truncation: u32,
        model: MomentModel,
    ) -> Result<Self> {
        sys.validate()?;
        let l1 = path_loss(deployment.leg1(), sys.wavelength)?;
        let l2 = path_loss(deployment.leg2(), sys.wavelength)?;
        let fading = deployment.fading_leg();
        let mix = fading.phase_mixture(sys.wavelength);
        Ok(Self {
            sys: *sys,
            deployment: *deployment,
            quantizer: *quantizer,
            truncation,
            model,
            stats: CascadeStats::new(fading, &mix, quantizer, truncation, model),
            harvest_gain: sys.conversion_efficiency * sys.transmit_power * sys.tx_gain * l1,
            snr_gain: sys.transmit_snr() * sys.combined_gain() * l1 * l2,
            element_power: sys.element_power(quantizer.bits()),
        })
    }

    pub fn proposed(
        sys: &SystemConfig,
        deployment: &Deployment,
        quantizer: &QuantizerConfig,
        truncation: u32,
    ) -> Result<Self> {
        Self::new(sys, deployment, quantizer, truncation, MomentModel::Proposed)
    }

    pub fn system(&self) -> &SystemConfig {
        &self.sys
    }

    pub fn deployment(&self) -> &Deployment {
        &self.deployment
    }

    pub fn quantizer(&self) -> &QuantizerConfig {
        &self.quantizer
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn model(&self) -> MomentModel {
        self.model
    }

    pub fn stats(&self) -> &CascadeStats {
        &self.stats
    }

    pub fn harvest_gain(&self) -> f64 {
        self.harvest_gain
    }

    pub fn element_power(&self) -> f64 {
        self.element_power
    }

    pub fn outage(&self, sc: &SchemeConfig) -> Result<OutageResult> {
        match (self.deployment.side(), sc.scheme()) {
            (Side::TxSide, Scheme::TimeSwitching { tau }) => self.tx_ts(sc.n_total(), tau),
            (Side::TxSide, Scheme::ElementSplitting { n1, n2 }) => Ok(self.tx_es(n1, n2)),
            (Side::UeSide, Scheme::TimeSwitching { tau }) => self.ue_ts(sc.n_total(), tau),
            (Side::UeSide, Scheme::ElementSplitting { n1, n2 }) => Ok(self.ue_es(n1, n2)),
        }
    }

    /// `X` threshold of the rate event when a fraction `1 − tau` of the block transmits.
    pub fn rate_threshold(&self, tau: f64) -> f64 {
        ((self.sys.rate_threshold / (1.0 - tau)).exp2() - 1.0) / self.snr_gain
    }

    /// Element-count threshold below which a Tx-side TS surface cannot cover its consumption.
    pub fn n_min_ts(&self, tau: f64) -> f64 {
        let a = self.harvest_gain;
        let pe = (1.0 - tau) * self.element_power;
        (pe + (pe * pe + 4.0 * tau * a * self.sys.controller_power).sqrt()) / (2.0 * tau * a)
    }

    /// Harvesting-subset threshold of a Tx-side ES surface with `n2` reflecting elements.
    pub fn n_min_es(&self, n2: u64) -> f64 {
        ((n2 as f64 * self.element_power + self.sys.controller_power) / self.harvest_gain).sqrt()
    }

    /// The rate and energy thresholds on `X` for a UE-side TS surface.
    pub fn ue_ts_terms(&self, n: u64, tau: f64) -> (f64, f64) {
        let rate = self.rate_threshold(tau);
        let energy =
            (n as f64 * self.element_power * (1.0 - tau) + self.sys.controller_power) / (tau * self.harvest_gain);
        (rate, energy)
    }

    fn gamma_event(&self, n: u64, x: f64) -> (f64, Option<GammaMatch>) {
        let v = self.stats.cdf(n, x);
        (v.probability, v.matched)
    }

    fn single_event(&self, n: u64, x: f64, feasibility: Feasibility) -> OutageResult {
        let (probability, matched) = self.gamma_event(n, x);
        OutageResult {
            probability,
            branch: if matched.is_some() { Branch::GammaCdf } else { Branch::Degenerate },
            threshold_x: x,
            matches: matched.into_iter().collect(),
            feasibility,
        }
    }

    fn tx_ts(&self, n: u64, tau: f64) -> Result<OutageResult> {
        check_tau(tau)?;
        let n_min = self.n_min_ts(tau);
        let x = self.rate_threshold(tau);
        let feasibility = Feasibility { n_min: Some(n_min), energy_threshold: None, rate_threshold: Some(x) };
        if n as f64 <= n_min {
            return Ok(OutageResult::hard_cutoff(x, feasibility));
        }
        Ok(self.single_event(n, x, feasibility))
    }

    /// Tx-side TS outage with the energy budget taken as met, i.e. at or beyond the cutoff.
    fn tx_ts_rate_only(&self, n: u64, tau: f64) -> OutageResult {
        let x = self.rate_threshold(tau);
        let feasibility =
            Feasibility { n_min: Some(self.n_min_ts(tau)), energy_threshold: None, rate_threshold: Some(x) };
        self.single_event(n, x, feasibility)
    }

    fn tx_es(&self, n1: u64, n2: u64) -> OutageResult {
        let n_min = self.n_min_es(n2);
        let x = self.rate_threshold(0.0);
        let feasibility = Feasibility { n_min: Some(n_min), energy_threshold: None, rate_threshold: Some(x) };
        if n1 as f64 <= n_min {
            return OutageResult::hard_cutoff(x, feasibility);
        }
        self.single_event(n2, x, feasibility)
    }

    fn ue_ts(&self, n: u64, tau: f64) -> Result<OutageResult> {
        check_tau(tau)?;
        let (rate, energy) = self.ue_ts_terms(n, tau);
        let feasibility = Feasibility { n_min: None, energy_threshold: Some(energy), rate_threshold: Some(rate) };
        Ok(self.single_event(n, rate.max(energy), feasibility))
    }

    fn ue_es(&self, n1: u64, n2: u64) -> OutageResult {
        let x_energy = (n2 as f64 * self.element_power + self.sys.controller_power) / self.harvest_gain;
        let x_rate = self.rate_threshold(0.0);
        let (p1, m1) = self.gamma_event(n1, x_energy);
        let (p2, m2) = self.gamma_event(n2, x_rate);
        OutageResult {
            probability: (p1 + p2 - p1 * p2).clamp(0.0, 1.0),
            branch: Branch::UnionFormula,
            threshold_x: x_energy,
            matches: m1.into_iter().chain(m2).collect(),
            feasibility: Feasibility { n_min: None, energy_threshold: Some(x_energy), rate_threshold: Some(x_rate) },
        }
    }

    /// Smallest harvesting fraction that covers consumption at the Tx side.
    pub fn opt_tau_tx(&self, n: u64) -> Result<f64> {
        let nf = n as f64;
        let demand = nf * self.element_power + self.sys.controller_power;
        let tau = demand / (nf * self.element_power + nf * nf * self.harvest_gain);
        if !(tau < 1.0) {
            return Err(Error::Infeasible(format!("tau* = {tau} >= 1 for N = {n}")));
        }
        Ok(tau)
    }

    /// Real-valued root of `a N₁² + P_elem N₁ − (N P_elem + P_ctrl) = 0`.
    pub fn opt_n1_tx_real(&self, n: u64) -> f64 {
        let a = self.harvest_gain;
        let pe = self.element_power;
        let c = n as f64 * pe + self.sys.controller_power;
        (-pe + (pe * pe + 4.0 * a * c).sqrt()) / (2.0 * a)
    }

    /// Smallest integer harvesting subset at or above the real optimum.
    pub fn opt_n1_tx(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(Error::domain("n", n as f64, "N >= 2 for element splitting"));
        }
        let n1 = self.opt_n1_tx_real(n).ceil().max(1.0);
        if n1 >= n as f64 {
            return Err(Error::Infeasible(format!("N1* = {n1} leaves no reflecting element out of {n}")));
        }
        Ok(n1 as u64)
    }

    /// `tau` at which the UE-side rate and energy thresholds coincide.
    pub fn opt_tau_ue(&self, n: u64) -> TauChoice {
        let gap = |tau: f64| {
            let (rate, energy) = self.ue_ts_terms(n, tau);
            rate - energy
        };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let eps = 1e-15;
        if gap(eps) >= 0.0 {
            return TauChoice { tau: eps, at_boundary: true };
        }
        if gap(1.0 - eps) <= 0.0 {
            return TauChoice { tau: 1.0 - eps, at_boundary: true };
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        TauChoice { tau: 0.5 * (lo + hi), at_boundary: false }
    }

    /// Outage at the operating point that minimises it for `n` elements.
    pub fn optimal(&self, kind: SchemeKind, n: u64) -> Result<OptimalPoint> {
        let infeasible =
            || OptimalPoint { point: None, outage: OutageResult::hard_cutoff(f64::INFINITY, Feasibility::default()) };
        if n == 0 {
            return Ok(infeasible());
        }
        match (self.deployment.side(), kind) {
            (Side::TxSide, SchemeKind::TimeSwitching) => match self.opt_tau_tx(n) {
                // τ* sits exactly on the cutoff; step to the first float strictly past it
                // nothing to power: any positive fraction covers the budget
                Ok(0.0) => {
                    let tau = f64::MIN_POSITIVE;
                    Ok(OptimalPoint { point: Some(OperatingPoint::Tau(tau)), outage: self.tx_ts_rate_only(n, tau) })
                }
                Ok(mut tau) => {
                    for _ in 0..64 {
                        if n as f64 > self.n_min_ts(tau) {
                            break;
                        }
                        tau = tau.next_up();
                    }
                    if !(n as f64 > self.n_min_ts(tau) && tau < 1.0) {
                        return Ok(infeasible());
                    }
                    Ok(OptimalPoint { point: Some(OperatingPoint::Tau(tau)), outage: self.tx_ts_rate_only(n, tau) })
                }
                Err(Error::Infeasible(_)) => Ok(infeasible()),
                Err(e) => Err(e),
            },
            (Side::TxSide, SchemeKind::ElementSplitting) => {
                if n < 2 {
                    return Ok(infeasible());
                }
                let real = self.opt_n1_tx_real(n);
                let mut best: Option<OptimalPoint> = None;
                let lo = real.floor().max(1.0) as u64;
                for n1 in lo..=lo + 2 {
                    if n1 >= n {
                        break;
                    }
                    let outage = self.tx_es(n1, n - n1);
                    if best.as_ref().is_none_or(|b| outage.probability < b.outage.probability) {
                        best = Some(OptimalPoint { point: Some(OperatingPoint::Split { n1, n2: n - n1 }), outage });
                    }
                }
                Ok(match best {
                    Some(b) if b.outage.branch != Branch::HardCutoff => b,
                    _ => infeasible(),
                })
            }
            (Side::UeSide, SchemeKind::TimeSwitching) => {
                let choice = self.opt_tau_ue(n);
                let outage = self.ue_ts(n, choice.tau)?;
                Ok(OptimalPoint { point: Some(OperatingPoint::Tau(choice.tau)), outage })
            }
            (Side::UeSide, SchemeKind::ElementSplitting) => {
                if n < 2 {
                    return Ok(infeasible());
                }
                let (n1, outage) = self.best_ue_split(n);
                Ok(OptimalPoint { point: Some(OperatingPoint::Split { n1, n2: n - n1 }), outage })
            }
        }
    }

    /// Coarse scan over `N₁ ∈ [1, N−1]` followed by a unit-stride refinement.
    fn best_ue_split(&self, n: u64) -> (u64, OutageResult) {
        let stride = (n / 256).max(1);
        let mut best_n1 = 1;
        let mut best = self.ue_es(1, n - 1);
        let consider = |n1: u64, best_n1: &mut u64, best: &mut OutageResult| {
            let r = self.ue_es(n1, n - n1);
            if r.probability < best.probability {
                *best_n1 = n1;
                *best = r;
            }
        };
        let mut n1 = 1 + stride;
        while n1 < n {
            consider(n1, &mut best_n1, &mut best);
            n1 += stride;
        }
        let lo = best_n1.saturating_sub(stride).max(1);
        let hi = (best_n1 + stride).min(n - 1);
        for n1 in lo..=hi {
            consider(n1, &mut best_n1, &mut best);
        }
        (best_n1, best)
    }

    /// Smallest `N` whose optimal-point outage is at most `target`.
    pub fn nmin_search(&self, kind: SchemeKind, target: f64) -> Result<u64> {
        if !(target > 0.0 && target <= 1.0) {
            return Err(Error::domain("target", target, "0 < target <= 1"));
        }
        let meets = |n: u64| -> Result<bool> { Ok(self.optimal(kind, n)?.outage.probability <= target) };
        if meets(1)? {
            return Ok(1);
        }
        let mut lo = 1u64;
        let mut hi = 2u64;
        while !meets(hi)? {
            if hi >= NMIN_SEARCH_LIMIT {
                return Err(Error::SearchExhausted { limit: NMIN_SEARCH_LIMIT, target });
            }
            lo = hi;
            hi = (hi * 2).min(NMIN_SEARCH_LIMIT);
        }
        // invariant: !meets(lo), meets(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if meets(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut found = hi;
        for candidate in (hi.saturating_sub(2).max(1)..hi).rev() {
            if meets(candidate)? {
                found = candidate;
            }
        }
        Ok(found)
    }

    /// Efficiency at the optimal operating point for `n` elements.
    pub fn optimal_energy_efficiency(&self, kind: SchemeKind, n: u64, metric: &dyn EfficiencyMetric) -> Result<f64> {
        let outage = self.optimal(kind, n)?.outage.probability;
        Ok(metric.efficiency(&self.sys, outage))
    }
}

/// How outage translates into an energy-efficiency figure.
pub trait EfficiencyMetric: Send + Sync {
    fn name(&self) -> &'static str;
    fn efficiency(&self, sys: &SystemConfig, outage: f64) -> f64;
}

/// Successfully delivered spectral efficiency per unit of transmit energy,
/// `R_thr (1 − P_out) / (P_t T)`, in bit/J per Hz of bandwidth.
#[derive(Debug, Clone, Copy, Default)]
pub struct DeliveredRatePerJoule;

impl EfficiencyMetric for DeliveredRatePerJoule {
    fn name(&self) -> &'static str {
        "delivered-rate-per-joule"
    }

    fn efficiency(&self, sys: &SystemConfig, outage: f64) -> f64 {
        sys.rate_threshold * (1.0 - outage) / (sys.transmit_power * sys.block_duration)
    }
}

fn expect_side(dep: &Deployment, side: Side) -> Result<()> {
    if dep.side() != side {
        return Err(Error::Config(format!("expected a {} deployment", side.label())));
    }
    Ok(())
}

fn expect_kind(sc: &SchemeConfig, kind: SchemeKind) -> Result<()> {
    if sc.kind() != kind {
        return Err(Error::Config(format!("expected the {} scheme", kind.label())));
    }
    Ok(())
}

fn proposed(sys: &SystemConfig, dep: &Deployment, qc: &QuantizerConfig, truncation: u32) -> Result<LinkAnalysis> {
    LinkAnalysis::proposed(sys, dep, qc, truncation)
}

pub fn outage_tx_ts(
    sys: &SystemConfig,
    dep: &Deployment,
    sc: &SchemeConfig,
    qc: &QuantizerConfig,
    truncation: u32,
) -> Result<OutageResult> {
    expect_side(dep, Side::TxSide)?;
    expect_kind(sc, SchemeKind::TimeSwitching)?;
    proposed(sys, dep, qc, truncation)?.outage(sc)
}

pub fn outage_tx_es(
    sys: &SystemConfig,
    dep: &Deployment,
    sc: &SchemeConfig,
    qc: &QuantizerConfig,
    truncation: u32,
) -> Result<OutageResult> {
    expect_side(dep, Side::TxSide)?;
    expect_kind(sc, SchemeKind::ElementSplitting)?;
    proposed(sys, dep, qc, truncation)?.outage(sc)
}

pub fn outage_ue_ts(
    sys: &SystemConfig,
    dep: &Deployment,
    sc: &SchemeConfig,
    qc: &QuantizerConfig,
    truncation: u32,
) -> Result<OutageResult> {
    expect_side(dep, Side::UeSide)?;
    expect_kind(sc, SchemeKind::TimeSwitching)?;
    proposed(sys, dep, qc, truncation)?.outage(sc)
}

pub fn outage_ue_es(
    sys: &SystemConfig,
    dep: &Deployment,
    sc: &SchemeConfig,
    qc: &QuantizerConfig,
    truncation: u32,
) -> Result<OutageResult> {
    expect_side(dep, Side::UeSide)?;
    expect_kind(sc, SchemeKind::ElementSplitting)?;
    proposed(sys, dep, qc, truncation)?.outage(sc)
}

pub fn opt_tau_tx(n: u64, sys: &SystemConfig, dep: &Deployment, qc: &QuantizerConfig) -> Result<f64> {
    expect_side(dep, Side::TxSide)?;
    proposed(sys, dep, qc, 1)?.opt_tau_tx(n)
}

pub fn opt_n1_tx(n: u64, sys: &SystemConfig, dep: &Deployment, qc: &QuantizerConfig) -> Result<u64> {
    expect_side(dep, Side::TxSide)?;
    proposed(sys, dep, qc, 1)?.opt_n1_tx(n)
}

pub fn opt_tau_ue(n: u64, sys: &SystemConfig, dep: &Deployment, qc: &QuantizerConfig) -> Result<TauChoice> {
    expect_side(dep, Side::UeSide)?;
    Ok(proposed(sys, dep, qc, 1)?.opt_tau_ue(n))
}

pub fn nmin_search(
    sys: &SystemConfig,
    dep: &Deployment,
    kind: SchemeKind,
    qc: &QuantizerConfig,
    truncation: u32,
    target: f64,
) -> Result<u64> {
    proposed(sys, dep, qc, truncation)?.nmin_search(kind, target)
}

/// Energy efficiency at the optimal operating point of the scheme in `sc`,
/// for `sc.n_total()` elements.
pub fn energy_efficiency(
    sys: &SystemConfig,
    dep: &Deployment,
    sc: &SchemeConfig,
    qc: &QuantizerConfig,
    truncation: u32,
) -> Result<f64> {
    proposed(sys, dep, qc, truncation)?.optimal_energy_efficiency(sc.kind(), sc.n_total(), &DeliveredRatePerJoule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChannelLeg;
    use crate::phase::DEFAULT_TRUNCATION;
    use approx::assert_relative_eq;

    fn tx_side() -> Deployment {
        Deployment::new(
            Side::TxSide,
            ChannelLeg::los(15.0, 2.0).unwrap(),
            ChannelLeg::fading(45.0, 2.2, 3.0, 1.0, 3.0).unwrap(),
        )
        .unwrap()
    }

    fn ue_side() -> Deployment {
        Deployment::new(
            Side::UeSide,
            ChannelLeg::fading(45.0, 2.2, 3.0, 1.0, 3.0).unwrap(),
            ChannelLeg::los(15.0, 2.0).unwrap(),
        )
        .unwrap()
    }

    fn analysis(dep: Deployment, bits: u32) -> LinkAnalysis {
        LinkAnalysis::proposed(
            &SystemConfig::reference(0.4),
            &dep,
            &QuantizerConfig::new(bits).unwrap(),
            DEFAULT_TRUNCATION,
        )
        .unwrap()
    }

    #[test]
    fn optimal_point_reproduces_its_outage() {
        for bits in [1, 2] {
            let a = analysis(tx_side(), bits);
            for n in [230, 250, 400, 1000] {
                for kind in [SchemeKind::TimeSwitching, SchemeKind::ElementSplitting] {
                    let opt = a.optimal(kind, n).unwrap();
                    let sc = match opt.point.unwrap() {
                        OperatingPoint::Tau(tau) => SchemeConfig::time_switching(n, tau).unwrap(),
                        OperatingPoint::Split { n1, n2 } => SchemeConfig::element_splitting(n1, n2).unwrap(),
                    };
                    assert_eq!(a.outage(&sc).unwrap(), opt.outage, "q={bits} N={n} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn tau_domain_is_checked() {
        assert!(SchemeConfig::time_switching(10, 0.0).is_err());
        assert!(SchemeConfig::time_switching(10, 1.0).is_err());
        assert!(SchemeConfig::time_switching(10, 1.2).is_err());
        assert!(SchemeConfig::element_splitting_of(10, 3, 6).is_err());
    }

    #[test]
    fn tx_ts_below_cutoff_is_certain_outage() {
        let a = analysis(tx_side(), 1);
        let tau = 0.5;
        let n_min = a.n_min_ts(tau);
        let n = n_min.floor() as u64;
        let r = a.outage(&SchemeConfig::time_switching(n, tau).unwrap()).unwrap();
        assert_eq!(r.branch, Branch::HardCutoff);
        assert_eq!(r.probability, 1.0);
    }

    #[test]
    fn tx_ts_zero_rate_threshold_never_fails() {
        let sys = SystemConfig { rate_threshold: 0.0, ..SystemConfig::reference(0.4) };
        let qc = QuantizerConfig::new(1).unwrap();
        let r = outage_tx_ts(&sys, &tx_side(), &SchemeConfig::time_switching(400, 0.5).unwrap(), &qc, 10).unwrap();
        assert_eq!(r.branch, Branch::GammaCdf);
        assert_eq!(r.probability, 0.0);
    }

    #[test]
    fn wrong_deployment_is_rejected() {
        let sys = SystemConfig::reference(0.4);
        let qc = QuantizerConfig::new(1).unwrap();
        let sc = SchemeConfig::time_switching(250, 0.5).unwrap();
        assert!(outage_ue_ts(&sys, &tx_side(), &sc, &qc, 10).is_err());
        assert!(outage_tx_es(&sys, &tx_side(), &sc, &qc, 10).is_err());
    }

    #[test]
    fn opt_tau_tx_balances_energy() {
        let a = analysis(tx_side(), 1);
        let sys = SystemConfig::reference(0.4);
        let n = 250u64;
        let tau = a.opt_tau_tx(n).unwrap();
        assert!(tau > 0.0 && tau < 1.0);
        let nf = n as f64;
        let harvested = tau * a.harvest_gain() * nf * nf;
        let consumed = (1.0 - tau) * nf * a.element_power() + sys.controller_power;
        assert_relative_eq!(harvested, consumed, max_relative = 1e-9);
        assert_relative_eq!(a.n_min_ts(tau), nf, max_relative = 1e-9);
    }

    #[test]
    fn opt_tau_tx_zero_consumption() {
        let sys = SystemConfig { pin_power: 0.0, controller_power: 0.0, ..SystemConfig::reference(0.4) };
        let qc = QuantizerConfig::new(1).unwrap();
        assert_eq!(opt_tau_tx(100, &sys, &tx_side(), &qc).unwrap(), 0.0);
        assert!(matches!(opt_tau_tx(3, &SystemConfig::reference(0.4), &tx_side(), &qc), Err(Error::Infeasible(_))));
    }

    #[test]
    fn opt_n1_tx_balances_energy() {
        let a = analysis(tx_side(), 1);
        let n = 250u64;
        let n1 = a.opt_n1_tx_real(n);
        let lhs = a.harvest_gain() * n1 * n1;
        let rhs = (n as f64 - n1) * a.element_power() + a.system().controller_power;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        let int = a.opt_n1_tx(n).unwrap();
        assert!((1..250).contains(&int));
        assert!(int as f64 >= n1);
    }

    #[test]
    fn opt_n1_tx_without_element_power() {
        let sys = SystemConfig { pin_power: 0.0, ..SystemConfig::reference(0.4) };
        let a = LinkAnalysis::proposed(&sys, &tx_side(), &QuantizerConfig::new(1).unwrap(), 10).unwrap();
        let expected = (sys.controller_power / a.harvest_gain()).sqrt();
        assert_relative_eq!(a.opt_n1_tx_real(500), expected, max_relative = 1e-12);
    }

    #[test]
    fn ue_ts_limits() {
        let a = analysis(ue_side(), 1);
        let lo = a.outage(&SchemeConfig::time_switching(1500, 1e-9).unwrap()).unwrap();
        let hi = a.outage(&SchemeConfig::time_switching(1500, 1.0 - 1e-9).unwrap()).unwrap();
        assert_eq!(lo.probability, 1.0);
        assert_eq!(hi.probability, 1.0);
    }

    #[test]
    fn opt_tau_ue_equalises_terms() {
        for bits in [1, 2] {
            let a = analysis(ue_side(), bits);
            let choice = a.opt_tau_ue(1500);
            assert!(!choice.at_boundary);
            let (rate, energy) = a.ue_ts_terms(1500, choice.tau);
            assert!((rate - energy).abs() / rate.max(energy) <= 1e-8);
        }
    }

    #[test]
    fn opt_tau_ue_without_consumption_hits_boundary() {
        let sys = SystemConfig { pin_power: 0.0, controller_power: 0.0, ..SystemConfig::reference(0.4) };
        let a = LinkAnalysis::proposed(&sys, &ue_side(), &QuantizerConfig::new(1).unwrap(), 10).unwrap();
        let choice = a.opt_tau_ue(1500);
        assert!(choice.at_boundary);
        assert!(choice.tau < 1e-9);
    }

    #[test]
    fn ue_es_union_bounds_and_limits() {
        let a = analysis(ue_side(), 1);
        for n1 in (50..1500).step_by(50) {
            let r = a.outage(&SchemeConfig::element_splitting(n1, 1500 - n1).unwrap()).unwrap();
            assert_eq!(r.branch, Branch::UnionFormula);
            let p1 = a.stats().cdf(n1, r.feasibility.energy_threshold.unwrap()).probability;
            let p2 = a.stats().cdf(1500 - n1, r.feasibility.rate_threshold.unwrap()).probability;
            assert!(r.probability >= p1.max(p2) - 1e-15);
            assert!(r.probability <= (p1 + p2).min(1.0) + 1e-15);
        }
        let tiny = a.outage(&SchemeConfig::element_splitting(1, 1499).unwrap()).unwrap();
        assert_eq!(tiny.probability, 1.0);
        // degenerate splits are legal
        assert_eq!(a.outage(&SchemeConfig::element_splitting(0, 1500).unwrap()).unwrap().probability, 1.0);
        assert_eq!(a.outage(&SchemeConfig::element_splitting(1500, 0).unwrap()).unwrap().probability, 1.0);
    }

    #[test]
    fn tx_es_degenerate_splits() {
        let a = analysis(tx_side(), 2);
        let no_reflect = a.outage(&SchemeConfig::element_splitting(250, 0).unwrap()).unwrap();
        assert_eq!(no_reflect.probability, 1.0);
        let no_harvest = a.outage(&SchemeConfig::element_splitting(0, 250).unwrap()).unwrap();
        assert_eq!(no_harvest.branch, Branch::HardCutoff);
        let below = a.outage(&SchemeConfig::element_splitting(100, 150).unwrap()).unwrap();
        assert_eq!(below.branch, Branch::HardCutoff);
    }

    #[test]
    fn tx_ts_monotone_in_power_and_elements() {
        let dep = tx_side();
        let qc = QuantizerConfig::new(1).unwrap();
        let tau = 0.56;
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let sys = SystemConfig::reference(0.38 + 0.002 * i as f64);
            let p = outage_tx_ts(&sys, &dep, &SchemeConfig::time_switching(250, tau).unwrap(), &qc, 10)
                .unwrap()
                .probability;
            assert!(p <= prev + 1e-15);
            prev = p;
        }
        let a = analysis(dep, 1);
        let mut prev = f64::INFINITY;
        for n in 240..300 {
            let r = a.outage(&SchemeConfig::time_switching(n, tau).unwrap()).unwrap();
            if r.branch == Branch::GammaCdf {
                assert!(r.probability <= prev + 1e-15);
                prev = r.probability;
            }
        }
    }

    #[test]
    fn tx_cutoffs_ignore_phase_statistics() {
        let sys = SystemConfig::reference(0.4);
        let dep = tx_side();
        let qc = QuantizerConfig::new(2).unwrap();
        let proposed = LinkAnalysis::new(&sys, &dep, &qc, 10, MomentModel::Proposed).unwrap();
        let benchmark = LinkAnalysis::new(&sys, &dep, &qc, 10, MomentModel::Uniform).unwrap();
        for tau in [0.2, 0.5, 0.8] {
            assert_eq!(proposed.n_min_ts(tau), benchmark.n_min_ts(tau));
        }
        assert_eq!(proposed.n_min_es(40), benchmark.n_min_es(40));
        // q only enters through the element power
        let q1 = analysis(dep, 1);
        let sys_double = SystemConfig { pin_power: 2.0 * sys.pin_power, ..sys };
        let q1_double = LinkAnalysis::proposed(&sys_double, &dep, &QuantizerConfig::new(1).unwrap(), 10).unwrap();
        assert_relative_eq!(q1_double.n_min_ts(0.4), proposed.n_min_ts(0.4), max_relative = 1e-14);
        assert!(q1.n_min_ts(0.4) < proposed.n_min_ts(0.4));
    }

    #[test]
    fn common_scaling_of_power_and_noise_is_neutral() {
        let dep = ue_side();
        let qc = QuantizerConfig::new(1).unwrap();
        let base = SystemConfig::reference(0.4);
        let scaled =
            SystemConfig { transmit_power: base.transmit_power * 3.0, noise_power: base.noise_power * 3.0, ..base };
        let sc = SchemeConfig::time_switching(1500, 0.48).unwrap();
        let a = LinkAnalysis::proposed(&base, &dep, &qc, 10).unwrap();
        let b = LinkAnalysis::proposed(&scaled, &dep, &qc, 10).unwrap();
        // only the rate term is shared; compare the rate-only threshold
        assert_relative_eq!(a.rate_threshold(0.48), b.rate_threshold(0.48), max_relative = 1e-12);
        let _ = (a.outage(&sc).unwrap(), b.outage(&sc).unwrap());
    }

    #[test]
    fn energy_efficiency_examples() {
        let sys = SystemConfig::reference(0.4);
        assert_eq!(DeliveredRatePerJoule.efficiency(&sys, 1.0), 0.0);
        let ee = DeliveredRatePerJoule.efficiency(&sys, 0.0);
        assert_relative_eq!(ee, 11f64.log2() / 0.4, max_relative = 1e-15);
        assert!((ee - 8.648).abs() < 1e-3);
    }

    #[test]
    fn nmin_trivial_target() {
        let a = analysis(tx_side(), 1);
        assert_eq!(a.nmin_search(SchemeKind::TimeSwitching, 1.0).unwrap(), 1);
        assert!(a.nmin_search(SchemeKind::TimeSwitching, 0.0).is_err());
    }
}
