//! First and second moments of the coherently combined cascade power
//! `X = |Σᵢ |hᵢ| e^{jεᵢ}|²` and the Gamma law matched to them.
//!
//! `X²` expands into `N⁴` index tuples. Grouping them by index pattern gives
//! six classes: all equal, 3+1, the two 2+2 arrangements (one of which picks
//! up `μ₂`), 2+1+1, and all distinct.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{nakagami_abs_moment, ChannelLeg};
use crate::numerics::gamma_p;
use crate::phase::{circular_moment, circular_moment_uniform, PhaseMixture, QuantizerConfig};

/// Which phase-error statistics feed the cascade moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MomentModel {
    /// Full mixture law of the residual error.
    Proposed,
    /// Uniform residual error, as if the channel phase were uniform.
    Uniform,
}

impl MomentModel {
    pub fn label(self) -> &'static str {
        match self {
            MomentModel::Proposed => "proposed",
            MomentModel::Uniform => "benchmark",
        }
    }
}

/// `E[|h|]` through `E[|h|⁴]` of a Nakagami amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeMoments {
    pub first: f64,
    pub second: f64,
    pub third: f64,
    pub fourth: f64,
}

impl AmplitudeMoments {
    pub fn nakagami(shape: f64, spread: f64) -> Self {
        Self {
            first: nakagami_abs_moment(shape, spread, 1.0),
            second: nakagami_abs_moment(shape, spread, 2.0),
            third: nakagami_abs_moment(shape, spread, 3.0),
            fourth: nakagami_abs_moment(shape, spread, 4.0),
        }
    }

    pub fn of_leg(leg: &ChannelLeg) -> Self {
        Self::nakagami(leg.nakagami_shape, leg.nakagami_spread)
    }
}

/// First two circular moments of the residual phase error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMoments {
    pub mu1: Complex64,
    pub mu2: Complex64,
}

impl PhaseMoments {
    pub fn proposed(mix: &PhaseMixture, qc: &QuantizerConfig, truncation: u32) -> Self {
        Self { mu1: circular_moment(1, mix, qc, truncation).value, mu2: circular_moment(2, mix, qc, truncation).value }
    }

    pub fn uniform(qc: &QuantizerConfig) -> Self {
        Self {
            mu1: Complex64::new(circular_moment_uniform(1, qc), 0.0),
            mu2: Complex64::new(circular_moment_uniform(2, qc), 0.0),
        }
    }

    pub fn for_model(model: MomentModel, mix: &PhaseMixture, qc: &QuantizerConfig, truncation: u32) -> Self {
        match model {
            MomentModel::Proposed => Self::proposed(mix, qc, truncation),
            MomentModel::Uniform => Self::uniform(qc),
        }
    }
}

/// Everything needed to evaluate `E[X]` and `E[X²]` for any element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeStats {
    pub amplitude: AmplitudeMoments,
    pub phase: PhaseMoments,
}

impl CascadeStats {
    pub fn new(
        leg: &ChannelLeg,
        mix: &PhaseMixture,
        qc: &QuantizerConfig,
        truncation: u32,
        model: MomentModel,
    ) -> Self {
        Self { amplitude: AmplitudeMoments::of_leg(leg), phase: PhaseMoments::for_model(model, mix, qc, truncation) }
    }

    /// `E[X]` over `n` elements.
    pub fn mean(&self, n: u64) -> f64 {
        let n = n as f64;
        let a = &self.amplitude;
        let m1 = self.phase.mu1.norm_sqr();
        n * a.second + n * (n - 1.0) * a.first * a.first * m1
    }

    /// `E[X²]` over `n` elements.
    pub fn second_moment(&self, n: u64) -> f64 {
        let n = n as f64;
        let AmplitudeMoments { first, second, third, fourth } = self.amplitude;
        let PhaseMoments { mu1, mu2 } = self.phase;
        let m1 = mu1.norm_sqr();
        let m2 = mu2.norm_sqr();
        let first_sq = first * first;
        let cross = 2.0 * (mu2 * mu1.conj() * mu1.conj()).re + 4.0 * m1;

        let pairs = n * (n - 1.0);
        let triples = pairs * (n - 2.0);
        let quads = triples * (n - 3.0);

        // the 3+1 class is |h_i|³|h_k|, so its amplitude factor is E[|h|³]E[|h|]
        n * fourth
            + 4.0 * pairs * third * first * m1
            + pairs * second * second * m2
            + 2.0 * pairs * second * second
            + triples * second * first_sq * cross
            + quads * first_sq * first_sq * m1 * m1
    }

    pub fn gamma_match(&self, n: u64) -> Result<GammaMatch> {
        gamma_match(self.mean(n), self.second_moment(n))
    }

    /// `Pr(X ≤ x)` under the matched Gamma law, or under a point mass when the
    /// variance vanishes. Zero elements means `X ≡ 0`.
    pub fn cdf(&self, n: u64, x: f64) -> CdfValue {
        if n == 0 {
            return CdfValue { probability: if x >= 0.0 { 1.0 } else { 0.0 }, matched: None };
        }
        match self.gamma_match(n) {
            Ok(m) => CdfValue { probability: m.cdf(x), matched: Some(m) },
            Err(_) => {
                let mean = self.mean(n);
                CdfValue { probability: if mean <= x { 1.0 } else { 0.0 }, matched: None }
            }
        }
    }
}

/// A CDF evaluation and the Gamma match behind it, if one was possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub probability: f64,
    pub matched: Option<GammaMatch>,
}

pub fn moment_e_x(n: u64, leg: &ChannelLeg, mix: &PhaseMixture, qc: &QuantizerConfig, truncation: u32) -> f64 {
    CascadeStats::new(leg, mix, qc, truncation, MomentModel::Proposed).mean(n)
}

pub fn moment_e_x2(n: u64, leg: &ChannelLeg, mix: &PhaseMixture, qc: &QuantizerConfig, truncation: u32) -> f64 {
    CascadeStats::new(leg, mix, qc, truncation, MomentModel::Proposed).second_moment(n)
}

/// Gamma law with a given mean and second moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMatch {
    pub shape: f64,
    pub scale: f64,
    pub source_mean: f64,
    pub source_second_moment: f64,
}

impl GammaMatch {
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        gamma_p(self.shape, x / self.scale).expect("shape validated by gamma_match")
    }
}

/// Matches `k = E[X]²/Var[X]`, `θ = Var[X]/E[X]`.
pub fn gamma_match(mean: f64, second_moment: f64) -> Result<GammaMatch> {
    if !(mean > 0.0) || !mean.is_finite() || !second_moment.is_finite() {
        return Err(Error::domain("mean", mean, "finite mean > 0"));
    }
    let mean_sq = mean * mean;
    if !(second_moment > mean_sq * (1.0 + 1e-12)) {
        return Err(Error::DegenerateVariance { mean, second_moment });
    }
    let variance = second_moment - mean_sq;
    Ok(GammaMatch {
        shape: mean_sq / variance,
        scale: variance / mean,
        source_mean: mean,
        source_second_moment: second_moment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::DEFAULT_TRUNCATION;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn rayleigh_leg(m: f64) -> ChannelLeg {
        ChannelLeg::fading_with_rice(45.0, 2.2, m, 1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn single_element_moments() {
        let leg = ChannelLeg::fading(45.0, 2.2, 3.0, 1.0, 3.0).unwrap();
        let mix = leg.phase_mixture(0.3331);
        let qc = QuantizerConfig::new(2).unwrap();
        assert_relative_eq!(moment_e_x(1, &leg, &mix, &qc, 10), 1.0, max_relative = 1e-13);
        assert_relative_eq!(moment_e_x2(1, &leg, &mix, &qc, 10), 4.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn uniform_phase_mean_example() {
        // N=5, m=3, Ω=1, q=1: 5 + 20 E[|h|]² (2/π)²
        let leg = rayleigh_leg(3.0);
        let qc = QuantizerConfig::new(1).unwrap();
        let first = nakagami_abs_moment(3.0, 1.0, 1.0);
        let expected = 5.0 + 20.0 * first * first * (2.0 / PI).powi(2);
        let got = moment_e_x(5, &leg, &PhaseMixture::uniform(), &qc, 10);
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert!((got - 12.460).abs() < 1e-3);
    }

    #[test]
    fn rayleigh_two_elements_example() {
        let leg = rayleigh_leg(1.0);
        let qc = QuantizerConfig::new(3).unwrap();
        let mu = (PI / 8.0).sin() / (PI / 8.0);
        let expected = 2.0 + 2.0 * (PI / 4.0) * mu * mu;
        let got = moment_e_x(2, &leg, &PhaseMixture::uniform(), &qc, DEFAULT_TRUNCATION);
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert!((got - 3.4916).abs() < 1e-4);
    }

    #[test]
    fn coherent_limit() {
        // μ₁ = μ₂ = 1 collapses E[X²] to E[(Σ|h|)⁴] with all phases aligned.
        let stats = CascadeStats {
            amplitude: AmplitudeMoments { first: 1.0, second: 1.0, third: 1.0, fourth: 1.0 },
            phase: PhaseMoments { mu1: Complex64::new(1.0, 0.0), mu2: Complex64::new(1.0, 0.0) },
        };
        for n in 1..20u64 {
            let nf = n as f64;
            assert_relative_eq!(stats.mean(n), nf * nf, max_relative = 1e-14);
            assert_relative_eq!(stats.second_moment(n), nf.powi(4), max_relative = 1e-12);
            assert!(stats.gamma_match(n).is_err());
        }
    }

    #[test]
    fn gamma_match_examples() {
        let g = gamma_match(2.0, 6.0).unwrap();
        assert_relative_eq!(g.shape, 2.0, max_relative = 1e-14);
        assert_relative_eq!(g.scale, 1.0, max_relative = 1e-14);
        let (k, theta) = (7.3, 0.21);
        let g = gamma_match(k * theta, k * theta * theta + k * k * theta * theta).unwrap();
        assert_relative_eq!(g.shape, k, max_relative = 1e-12);
        assert_relative_eq!(g.scale, theta, max_relative = 1e-12);
        assert!(matches!(gamma_match(2.0, 4.0), Err(Error::DegenerateVariance { .. })));
        assert!(gamma_match(0.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_variance_falls_back_to_step() {
        let stats = CascadeStats {
            amplitude: AmplitudeMoments { first: 1.0, second: 1.0, third: 1.0, fourth: 1.0 },
            phase: PhaseMoments { mu1: Complex64::new(1.0, 0.0), mu2: Complex64::new(1.0, 0.0) },
        };
        assert_eq!(stats.cdf(4, 15.9).probability, 0.0);
        assert_eq!(stats.cdf(4, 16.0).probability, 1.0);
        assert_eq!(stats.cdf(0, 0.0).probability, 1.0);
    }
}
