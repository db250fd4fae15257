//! Physical parameters and the deterministic link-budget formulas.
//!
//! Gains, powers and noise are linear quantities here. Decibel values are
//! converted once, when a configuration is ingested.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ln_gamma_unchecked;
use crate::phase::PhaseMixture;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// One hop of the cascaded Tx → surface → UE channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelLeg {
    pub distance: f64,
    pub path_loss_exponent: f64,
    pub nakagami_shape: f64,
    pub nakagami_spread: f64,
    pub phase_concentration: f64,
    pub rice_factor: f64,
    /// True when `rice_factor` came from the shape parameter rather than an override.
    pub rice_factor_derived: bool,
    pub is_los: bool,
}

impl ChannelLeg {
    /// Deterministic line-of-sight leg: unit amplitude, phase `2πd/λ`.
    pub fn los(distance: f64, path_loss_exponent: f64) -> Result<Self> {
        check_distance(distance)?;
        check_exponent(path_loss_exponent)?;
        Ok(Self {
            distance,
            path_loss_exponent,
            nakagami_shape: f64::INFINITY,
            nakagami_spread: 1.0,
            phase_concentration: 0.0,
            rice_factor: 0.0,
            rice_factor_derived: false,
            is_los: true,
        })
    }

    /// Nakagami-m fading leg whose Rice factor is derived from `shape`.
    pub fn fading(distance: f64, path_loss_exponent: f64, shape: f64, spread: f64, concentration: f64) -> Result<Self> {
        let k = rice_k_from_m(shape)?;
        let mut leg = Self::fading_with_rice(distance, path_loss_exponent, shape, spread, concentration, k)?;
        leg.rice_factor_derived = true;
        Ok(leg)
    }

    /// Nakagami-m fading leg with an explicit Rice factor.
    pub fn fading_with_rice(
        distance: f64,
        path_loss_exponent: f64,
        shape: f64,
        spread: f64,
        concentration: f64,
        rice_factor: f64,
    ) -> Result<Self> {
        check_distance(distance)?;
        check_exponent(path_loss_exponent)?;
        if !(shape >= 0.5) || !shape.is_finite() {
            return Err(Error::domain("nakagami_shape", shape, "m >= 0.5"));
        }
        if !(spread > 0.0) || !spread.is_finite() {
            return Err(Error::domain("nakagami_spread", spread, "omega > 0"));
        }
        if !(concentration >= 0.0) || !concentration.is_finite() {
            return Err(Error::domain("concentration", concentration, "kappa >= 0"));
        }
        if !(rice_factor >= 0.0) {
            return Err(Error::domain("rice_factor", rice_factor, "K >= 0"));
        }
        Ok(Self {
            distance,
            path_loss_exponent,
            nakagami_shape: shape,
            nakagami_spread: spread,
            phase_concentration: concentration,
            rice_factor,
            rice_factor_derived: false,
            is_los: false,
        })
    }

    /// Mean phase `mod(2πd/λ, 2π)` of this leg.
    pub fn mean_phase(&self, wavelength: f64) -> f64 {
        (2.0 * PI * self.distance / wavelength).rem_euclid(2.0 * PI)
    }

    /// Phase law of the leg. For a LoS leg this is a pure atom at the mean phase.
    pub fn phase_mixture(&self, wavelength: f64) -> PhaseMixture {
        if self.is_los {
            PhaseMixture::deterministic(self.mean_phase(wavelength))
        } else {
            PhaseMixture::new(self.phase_concentration, self.rice_factor, self.mean_phase(wavelength))
                .expect("leg parameters validated at construction")
        }
    }
}

fn check_distance(d: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain("distance", d, "d > 0"));
    }
    Ok(())
}

fn check_exponent(a: f64) -> Result<()> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::domain("path_loss_exponent", a, "a >= 0"));
    }
    Ok(())
}

/// `C₀ d^{-a}` with `C₀ = λ²/(16π²)`.
pub fn path_loss(leg: &ChannelLeg, wavelength: f64) -> Result<f64> {
    check_distance(leg.distance)?;
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength", wavelength, "lambda > 0"));
    }
    let c0 = wavelength * wavelength / (16.0 * PI * PI);
    Ok(c0 * leg.distance.powf(-leg.path_loss_exponent))
}

/// Rice factor implied by a Nakagami shape parameter, `√(m²−m)/(m−√(m²−m))`.
pub fn rice_k_from_m(m: f64) -> Result<f64> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(Error::domain("nakagami_shape", m, "m >= 1 to derive K; pass K explicitly"));
    }
    let root = (m * m - m).sqrt();
    Ok(root / (m - root))
}

/// `E[|h|^k] = Γ(m + k/2)/Γ(m) · (Ω/m)^{k/2}` for a Nakagami-m amplitude.
pub fn nakagami_abs_moment(shape: f64, spread: f64, order: f64) -> f64 {
    let log_ratio = ln_gamma_unchecked(shape + 0.5 * order) - ln_gamma_unchecked(shape);
    (log_ratio + 0.5 * order * (spread / shape).ln()).exp()
}

/// System-wide constants, all linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub transmit_power: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub noise_power: f64,
    pub wavelength: f64,
    pub conversion_efficiency: f64,
    pub pin_power: f64,
    pub controller_power: f64,
    pub block_duration: f64,
    pub rate_threshold: f64,
}

impl SystemConfig {
    /// Table-1 style parameters at the given transmit power.
    pub fn reference(transmit_power: f64) -> Self {
        Self {
            transmit_power,
            tx_gain: db_to_linear(4.0),
            rx_gain: db_to_linear(0.0),
            noise_power: db_to_linear(-100.0),
            wavelength: wavelength(900e6),
            conversion_efficiency: 0.65,
            pin_power: 0.06e-3,
            controller_power: 50e-3,
            block_duration: 1.0,
            rate_threshold: 11f64.log2(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("transmit_power", self.transmit_power),
            ("tx_gain", self.tx_gain),
            ("rx_gain", self.rx_gain),
            ("noise_power", self.noise_power),
            ("wavelength", self.wavelength),
            ("block_duration", self.block_duration),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "must be > 0"));
            }
        }
        let non_negative = [
            ("pin_power", self.pin_power),
            ("controller_power", self.controller_power),
            ("rate_threshold", self.rate_threshold),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "must be >= 0"));
            }
        }
        let zeta = self.conversion_efficiency;
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(Error::domain("conversion_efficiency", zeta, "0 < zeta <= 1"));
        }
        Ok(())
    }

    /// Transmit SNR `γ_t = P_t/σ²`.
    pub fn transmit_snr(&self) -> f64 {
        self.transmit_power / self.noise_power
    }

    pub fn combined_gain(&self) -> f64 {
        self.tx_gain * self.rx_gain
    }

    /// Power drawn per element at `bits` of phase resolution.
    pub fn element_power(&self, bits: u32) -> f64 {
        bits as f64 * self.pin_power
    }
}

/// `q · P_PIN`.
pub fn element_power(bits: u32, cfg: &SystemConfig) -> Result<f64> {
    if bits < 1 {
        return Err(Error::domain("bits", bits as f64, "q >= 1"));
    }
    Ok(cfg.element_power(bits))
}

/// Which side of the link the surface sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    TxSide,
    UeSide,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::TxSide => "tx-side",
            Side::UeSide => "ue-side",
        }
    }
}

/// Tx → surface (`leg1`) and surface → UE (`leg2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    side: Side,
    leg1: ChannelLeg,
    leg2: ChannelLeg,
}

impl Deployment {
    pub fn new(side: Side, leg1: ChannelLeg, leg2: ChannelLeg) -> Result<Self> {
        let ok = match side {
            Side::TxSide => leg1.is_los && !leg2.is_los,
            Side::UeSide => !leg1.is_los && leg2.is_los,
        };
        if !ok {
            return Err(Error::Config(format!(
                "{} deployment needs the leg next to the surface to be LoS and the other to fade",
                side.label()
            )));
        }
        Ok(Self { side, leg1, leg2 })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn leg1(&self) -> &ChannelLeg {
        &self.leg1
    }

    pub fn leg2(&self) -> &ChannelLeg {
        &self.leg2
    }

    /// The leg carrying small-scale fading.
    pub fn fading_leg(&self) -> &ChannelLeg {
        match self.side {
            Side::TxSide => &self.leg2,
            Side::UeSide => &self.leg1,
        }
    }

    /// The deterministic LoS leg.
    pub fn los_leg(&self) -> &ChannelLeg {
        match self.side {
            Side::TxSide => &self.leg1,
            Side::UeSide => &self.leg2,
        }
    }
}
