//! Phase quantization and the statistics of the residual phase error.
//!
//! A fading leg's phase follows a mixture of a von Mises law (concentration
//! `κ`) and an atom at the LoS phase with weight `K/(K+1)`. The surface applies
//! the quantized version of the desired compensating phase, which leaves a
//! residual error `ε = Q(φ) − φ` in `[−Δ/2, Δ/2]`. This module gives the law of
//! `ε` and its circular moments `E[e^{jnε}]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bessel_i, sinc_like};

/// Truncation order of the Bessel series used unless a caller asks otherwise.
pub const DEFAULT_TRUNCATION: u32 = 10;

/// Largest concentration accepted; `I₀(κ)` overflows shortly after 700.
pub const MAX_CONCENTRATION: f64 = 700.0;

const MAX_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// A phase exactly between two levels maps to the lower one.
    #[default]
    LowerLevel,
}

/// `q`-bit phase quantizer over the levels `{0, Δ, …, (2^q−1)Δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizerConfig {
    bits: u32,
    tie_break: TieBreak,
}

impl QuantizerConfig {
    pub fn new(bits: u32) -> Result<Self> {
        if !(1..=MAX_BITS).contains(&bits) {
            return Err(Error::domain("bits", bits as f64, "1 <= q <= 16"));
        }
        Ok(Self { bits, tie_break: TieBreak::LowerLevel })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    #[inline]
    pub fn level_count(&self) -> u32 {
        1 << self.bits
    }

    /// Quantization step `Δ = 2π/2^q`.
    #[inline]
    pub fn step(&self) -> f64 {
        2.0 * PI / self.level_count() as f64
    }

    pub fn levels(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.step();
        (0..self.level_count()).map(move |m| m as f64 * step)
    }

    fn level_index(&self, phase: f64) -> u32 {
        let step = self.step();
        let x = phase.rem_euclid(2.0 * PI);
        let lower = (x / step).floor();
        let offset = x - lower * step;
        let idx = if offset > 0.5 * step { lower + 1.0 } else { lower };
        (idx as u32) % self.level_count()
    }

    /// Nearest level to `phase` on the circle.
    pub fn quantize(&self, phase: f64) -> f64 {
        self.level_index(phase) as f64 * self.step()
    }

    /// `Q(φ) − φ`, wrapped into `[−Δ/2, Δ/2]`.
    #[inline]
    pub fn residual_error(&self, phase: f64) -> f64 {
        // the levels are a lattice in Δ, so the wrap to [0, 2π) can be skipped
        let step = self.step();
        let half = 0.5 * step;
        let offset = phase - floor(phase / step) * step;
        let eps = if offset > half { step - offset } else { -offset };
        eps.clamp(-half, half)
    }
}

// `f64::floor` is a libm call on baseline x86-64; the residual sits in the Monte Carlo hot loop.
#[inline]
fn floor(y: f64) -> f64 {
    if y.abs() < 4.0e15 {
        let t = y as i64 as f64;
        if t > y {
            t - 1.0
        } else {
            t
        }
    } else {
        y.floor()
    }
}

/// `mod(x + Δ/2, Δ) − Δ/2`.
pub fn centered_mod(x: f64, step: f64) -> f64 {
    (x + 0.5 * step).rem_euclid(step) - 0.5 * step
}

pub fn quantize(phase: f64, qc: &QuantizerConfig) -> f64 {
    qc.quantize(phase)
}

pub fn residual_error(phase: f64, qc: &QuantizerConfig) -> f64 {
    qc.residual_error(phase)
}

/// Residual error left when compensating the deterministic phase `2πd/λ`.
pub fn epsilon_d(distance: f64, wavelength: f64, qc: &QuantizerConfig) -> f64 {
    let c = 2.0 * PI * distance / wavelength;
    centered_mod(qc.quantize(-c) + c, qc.step())
}

/// Phase law of a fading leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMixture {
    concentration: f64,
    rice_factor: f64,
    mean_phase: f64,
}

impl PhaseMixture {
    pub fn new(concentration: f64, rice_factor: f64, mean_phase: f64) -> Result<Self> {
        if !(0.0..=MAX_CONCENTRATION).contains(&concentration) {
            return Err(Error::domain("concentration", concentration, "0 <= kappa <= 700"));
        }
        if !(rice_factor >= 0.0) {
            return Err(Error::domain("rice_factor", rice_factor, "K >= 0"));
        }
        if !mean_phase.is_finite() {
            return Err(Error::domain("mean_phase", mean_phase, "finite"));
        }
        Ok(Self { concentration, rice_factor, mean_phase: mean_phase.rem_euclid(2.0 * PI) })
    }

    /// Mixture for a leg of length `distance`, centred on `2πd/λ`.
    pub fn for_distance(concentration: f64, rice_factor: f64, distance: f64, wavelength: f64) -> Result<Self> {
        Self::new(concentration, rice_factor, 2.0 * PI * distance / wavelength)
    }

    /// Uniform phase (`κ = 0`, `K = 0`).
    pub fn uniform() -> Self {
        Self { concentration: 0.0, rice_factor: 0.0, mean_phase: 0.0 }
    }

    /// A pure atom at `mean_phase` (`K → ∞`).
    pub fn deterministic(mean_phase: f64) -> Self {
        Self { concentration: 0.0, rice_factor: f64::INFINITY, mean_phase: mean_phase.rem_euclid(2.0 * PI) }
    }

    pub fn concentration(&self) -> f64 {
        self.concentration
    }

    pub fn rice_factor(&self) -> f64 {
        self.rice_factor
    }

    pub fn mean_phase(&self) -> f64 {
        self.mean_phase
    }

    /// Probability mass of the LoS atom, `K/(K+1)`.
    pub fn atom_weight(&self) -> f64 {
        if self.rice_factor.is_infinite() {
            1.0
        } else {
            self.rice_factor / (self.rice_factor + 1.0)
        }
    }

    /// Weight of the von Mises component, `1/(K+1)`.
    pub fn continuous_weight(&self) -> f64 {
        if self.rice_factor.is_infinite() {
            0.0
        } else {
            1.0 / (self.rice_factor + 1.0)
        }
    }

    /// Where the atom lands after quantization: `ε_d`.
    pub fn atom_location(&self, qc: &QuantizerConfig) -> f64 {
        let c = self.mean_phase;
        centered_mod(qc.quantize(-c) + c, qc.step())
    }
}

/// Law of `ε` at one point: a density for the continuous part plus the atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDensity {
    pub continuous_density: f64,
    pub atom_weight: f64,
    pub atom_location: f64,
}

/// Density of the residual phase error at `epsilon`.
pub fn error_pdf(epsilon: f64, mix: &PhaseMixture, qc: &QuantizerConfig) -> Result<ErrorDensity> {
    let step = qc.step();
    if !(epsilon.abs() <= 0.5 * step * (1.0 + 1e-12)) {
        return Err(Error::domain("epsilon", epsilon, "|epsilon| <= Delta/2"));
    }
    let weight = mix.continuous_weight();
    let continuous_density = if weight == 0.0 {
        0.0
    } else {
        let kappa = mix.concentration;
        let i0 = bessel_i(0, kappa)?;
        let sum: f64 = qc.levels().map(|level| (kappa * (level - epsilon + mix.mean_phase).cos()).exp()).sum();
        weight * sum / (2.0 * PI * i0)
    };
    Ok(ErrorDensity { continuous_density, atom_weight: mix.atom_weight(), atom_location: mix.atom_location(qc) })
}

/// A truncated circular moment together with its truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularMoment {
    pub order: u32,
    pub value: Complex64,
    pub truncation_order: u32,
    pub error_bound: f64,
}

/// `E[e^{jnε}]` from the Bessel-series expansion truncated after `truncation` terms.
pub fn circular_moment(order: u32, mix: &PhaseMixture, qc: &QuantizerConfig, truncation: u32) -> CircularMoment {
    assert!(order >= 1, "circular moment order starts at 1");
    let n = order as f64;
    let step = qc.step();
    let mut value = Complex64::new(0.0, 0.0);

    let weight = mix.continuous_weight();
    if weight > 0.0 {
        let kappa = mix.concentration;
        let ratios = bessel_ratios(kappa, truncation);
        let mut sum = Complex64::new(0.0, 0.0);
        for level in qc.levels() {
            let mut cell = Complex64::new(sinc_like(n, step), 0.0);
            for (l, &ratio) in ratios.iter().enumerate().map(|(i, r)| (i + 1, r)) {
                if ratio == 0.0 {
                    break;
                }
                let l = l as f64;
                let rot = Complex64::from_polar(1.0, l * (level + mix.mean_phase));
                cell += ratio * (rot * sinc_like(n - l, step) + rot.conj() * sinc_like(n + l, step));
            }
            sum += cell;
        }
        value += sum * (weight / (2.0 * PI));
    }
    let atom = mix.atom_weight();
    if atom > 0.0 {
        value += Complex64::from_polar(atom, n * mix.atom_location(qc));
    }

    CircularMoment {
        order,
        value,
        truncation_order: truncation,
        error_bound: truncation_bound(truncation, mix.concentration, mix.rice_factor),
    }
}

fn bessel_ratios(kappa: f64, truncation: u32) -> Vec<f64> {
    if kappa == 0.0 {
        return vec![0.0; truncation as usize];
    }
    let i0 = bessel_i(0, kappa).expect("kappa validated");
    (1..=truncation).map(|l| bessel_i(l, kappa).expect("kappa validated") / i0).collect()
}

/// Circular moment of a uniform residual error, `sin(nΔ/2)/(nΔ/2)`.
pub fn circular_moment_uniform(order: u32, qc: &QuantizerConfig) -> f64 {
    let half = 0.5 * order as f64 * qc.step();
    half.sin() / half
}

/// Upper bound on the error of truncating the Bessel series after `truncation` terms.
pub fn truncation_bound(truncation: u32, concentration: f64, rice_factor: f64) -> f64 {
    if concentration == 0.0 || rice_factor.is_infinite() {
        return 0.0;
    }
    // tail Σ_{ℓ>L} (κ/2)^ℓ/ℓ! summed directly rather than as e^{κ/2} minus a partial sum
    let half = 0.5 * concentration;
    let mut term = 1.0;
    for l in 1..=truncation + 1 {
        term *= half / l as f64;
    }
    let mut tail = 0.0;
    let mut l = truncation as f64 + 1.0;
    while term > tail * 1e-18 && term > 0.0 {
        tail += term;
        l += 1.0;
        term *= half / l;
    }
    let i0 = bessel_i(0, concentration).expect("kappa validated");
    (2.0 * tail / ((rice_factor + 1.0) * i0)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(bits: u32) -> QuantizerConfig {
        QuantizerConfig::new(bits).unwrap()
    }

    #[test]
    fn step_and_levels() {
        for bits in 1..=6 {
            let qc = q(bits);
            assert_relative_eq!(qc.step() * qc.level_count() as f64, 2.0 * PI, max_relative = 1e-15);
            assert_eq!(qc.levels().count() as u32, 1 << bits);
        }
        assert!(QuantizerConfig::new(0).is_err());
    }

    #[test]
    fn quantize_examples() {
        let qc = q(1);
        assert_eq!(qc.quantize(0.1), 0.0);
        assert_eq!(qc.quantize(3.0), PI);
        assert_eq!(qc.quantize(PI / 2.0), 0.0);
        // wraps around the circle
        assert_eq!(qc.quantize(2.0 * PI - 0.1), 0.0);
        assert_eq!(q(2).quantize(-0.1), 0.0);
    }

    #[test]
    fn residual_error_examples() {
        let qc = q(1);
        assert_eq!(qc.residual_error(PI), 0.0);
        assert_relative_eq!(qc.residual_error(0.1), -0.1, max_relative = 1e-15);
        assert_relative_eq!(qc.residual_error(3.0), PI - 3.0, max_relative = 1e-12);
        let q3 = q(3);
        for level in q3.levels() {
            assert!(q3.residual_error(level).abs() < 1e-15);
        }
    }

    #[test]
    fn epsilon_d_matches_residual_error() {
        let lambda = crate::model::wavelength(9e8);
        for bits in 1..=4 {
            let qc = q(bits);
            for &d in &[1.0, 15.0, 45.0, 60.0, 123.456] {
                let direct = qc.residual_error(-2.0 * PI * d / lambda);
                assert!((epsilon_d(d, lambda, &qc) - direct).abs() < 1e-9, "q={bits} d={d}");
            }
        }
        // 2πd/λ an exact multiple of Δ
        let qc = q(2);
        let lambda = 1.0;
        let d = 3.0 * qc.step() / (2.0 * PI);
        assert!(epsilon_d(d, lambda, &qc).abs() < 1e-12);
        // 2πd/λ = Δ/4 past a level leaves +Δ/4 under ε = Q(φ) − φ, φ = −2πd/λ
        let d = (2.0 * qc.step() + 0.25 * qc.step()) / (2.0 * PI);
        let eps = epsilon_d(d, lambda, &qc);
        assert_relative_eq!(eps, 0.25 * qc.step(), max_relative = 1e-9);
        assert_relative_eq!(eps, qc.residual_error(-2.0 * PI * d), max_relative = 1e-9);
    }

    #[test]
    fn uniform_density_is_flat() {
        let mix = PhaseMixture::uniform();
        for bits in 1..=4 {
            let qc = q(bits);
            for i in 0..=10 {
                let eps = (i as f64 / 10.0 - 0.5) * qc.step();
                let d = error_pdf(eps, &mix, &qc).unwrap();
                assert_relative_eq!(d.continuous_density, 1.0 / qc.step(), max_relative = 1e-12);
                assert_eq!(d.atom_weight, 0.0);
            }
        }
    }

    #[test]
    fn deterministic_limit_is_all_atom() {
        let mix = PhaseMixture::deterministic(1.234);
        let d = error_pdf(0.0, &mix, &q(2)).unwrap();
        assert_eq!(d.continuous_density, 0.0);
        assert_eq!(d.atom_weight, 1.0);
        let big = PhaseMixture::new(3.0, 1e12, 1.234).unwrap();
        let d = error_pdf(0.0, &big, &q(2)).unwrap();
        assert!(d.continuous_density < 1e-11);
        assert!((d.atom_weight - 1.0).abs() < 1e-11);
    }

    #[test]
    fn error_pdf_rejects_outside_support() {
        let qc = q(2);
        assert!(error_pdf(qc.step(), &PhaseMixture::uniform(), &qc).is_err());
    }

    #[test]
    fn uniform_moments() {
        assert_relative_eq!(circular_moment_uniform(1, &q(1)), 2.0 / PI, max_relative = 1e-15);
        assert!(circular_moment_uniform(4, &q(2)).abs() < 1e-15);
        assert!((circular_moment_uniform(1, &q(16)) - 1.0).abs() < 1e-8);
        let m = circular_moment(1, &PhaseMixture::uniform(), &q(1), 10);
        assert_relative_eq!(m.value.re, 0.636_619_772_367_581_3, max_relative = 1e-12);
        assert!(m.value.im.abs() < 1e-15);
        let m2 = circular_moment(2, &PhaseMixture::uniform(), &q(1), 10);
        assert!(m2.value.norm() < 1e-15);
    }

    #[test]
    fn truncation_bound_examples() {
        for l in 0..30 {
            assert_eq!(truncation_bound(l, 0.0, 2.0), 0.0);
        }
        // 2 Σ_{ℓ≥11} 1.5^ℓ/ℓ! / I0(3), summed independently to 30 digits
        approx::assert_relative_eq!(truncation_bound(10, 3.0, 0.0), 1.013272497454746e-6, max_relative = 1e-10);
        approx::assert_relative_eq!(truncation_bound(10, 3.0, 4.0), 1.013272497454746e-6 / 5.0, max_relative = 1e-10);
        let mut prev = f64::INFINITY;
        for l in 1..=20 {
            let b = truncation_bound(l, 3.0, 0.0);
            assert!(b < prev, "L={l}");
            prev = b;
        }
    }

    #[test]
    fn truncation_bound_matches_exponential_form() {
        // 2[e^{κ/2} − Σ_{ℓ≤L}(κ/2)^ℓ/ℓ!] / ((K+1) I₀(κ)) at a point where cancellation is harmless
        let kappa: f64 = 3.0;
        let mut partial = 0.0;
        let mut term = 1.0;
        for l in 0..=3 {
            if l > 0 {
                term *= 0.5 * kappa / l as f64;
            }
            partial += term;
        }
        let expected = 2.0 * ((0.5 * kappa).exp() - partial) / (2.0 * bessel_i(0, kappa).unwrap());
        assert_relative_eq!(truncation_bound(3, kappa, 1.0), expected, max_relative = 1e-12);
    }
}
