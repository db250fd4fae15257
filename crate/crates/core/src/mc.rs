//! Monte Carlo simulation of the surface-assisted link.
//!
//! Every trial draws its own per-element channels from a ChaCha stream keyed
//! by `(seed, trial index)`, so estimates do not depend on how trials are
//! spread over workers. Trials are grouped into fixed-size chunks whose partial
//! sums are combined in chunk order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{path_loss, ChannelLeg, Deployment, Side, SystemConfig};
use crate::outage::{Scheme, SchemeConfig};
use crate::phase::{PhaseMixture, QuantizerConfig};

const CHUNK: u64 = 1024;
const Z95: f64 = 1.959963984540054;

/// Below this concentration the von Mises law is sampled as uniform.
const UNIFORM_CONCENTRATION: f64 = 1e-8;

/// Largest resolution the simulator's level table covers.
const MAX_TABLE_BITS: u32 = 8;

/// How reflection residuals relate to the harvesting residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimulationMode {
    /// Reflection residuals use the fading leg's phase only, and UE-side
    /// harvesting and reflection share one residual per element. This is the
    /// model the closed forms describe.
    #[default]
    PaperFaithful,
    /// Reflection residuals come from quantizing the full cascade phase.
    Physical,
}

impl SimulationMode {
    pub fn label(self) -> &'static str {
        match self {
            SimulationMode::PaperFaithful => "paper-faithful",
            SimulationMode::Physical => "physical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub n_trials: u64,
    pub seed: u64,
    pub mode: SimulationMode,
}

impl TrialPlan {
    pub fn new(n_trials: u64, seed: u64, mode: SimulationMode) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::domain("trials", 0.0, "trials >= 1"));
        }
        Ok(Self { n_trials, seed, mode })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub n_trials: u64,
}

impl Estimate {
    /// Outage frequency with a Wilson score interval.
    pub fn binomial(successes: u64, n: u64) -> Self {
        let nf = n as f64;
        let p = successes as f64 / nf;
        let std_error = (p * (1.0 - p) / nf).sqrt();
        let z2 = Z95 * Z95;
        let centre = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
        let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf);
        let lo = (centre - half).clamp(0.0, p);
        let hi = (centre + half).clamp(p, 1.0);
        Self { value: p, std_error, ci95: (lo, hi), n_trials: n }
    }

    fn sample_mean(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 { ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
        let std_error = (var / nf).sqrt();
        Self { value: mean, std_error, ci95: (mean - Z95 * std_error, mean + Z95 * std_error), n_trials: n }
    }

    /// True when `x` is within `k` standard errors of the estimate.
    pub fn within(&self, x: f64, k: f64) -> bool {
        (self.value - x).abs() <= k * self.std_error
    }
}

/// Nakagami-m amplitude sampler: `√g` with `g ~ Gamma(m, Ω/m)`.
#[derive(Debug, Clone, Copy)]
pub struct NakagamiSampler {
    power: Gamma<f64>,
}

impl NakagamiSampler {
    pub fn new(shape: f64, spread: f64) -> Result<Self> {
        if !(shape >= 0.5) || !shape.is_finite() {
            return Err(Error::domain("nakagami_shape", shape, "m >= 0.5"));
        }
        if !(spread > 0.0) || !spread.is_finite() {
            return Err(Error::domain("nakagami_spread", spread, "omega > 0"));
        }
        let power = Gamma::new(shape, spread / shape).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self { power })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng).sqrt()
    }
}

pub fn sample_nakagami_amplitude<R: Rng + ?Sized>(shape: f64, spread: f64, rng: &mut R) -> Result<f64> {
    Ok(NakagamiSampler::new(shape, spread)?.sample(rng))
}

/// Von Mises sampler (Best and Fisher's wrapped-Cauchy envelope).
#[derive(Debug, Clone, Copy)]
pub struct VonMises {
    mean: f64,
    mean_phasor: Complex64,
    kappa: f64,
    r: f64,
}

impl VonMises {
    pub fn new(mean: f64, kappa: f64) -> Self {
        let r = if kappa < UNIFORM_CONCENTRATION {
            0.0
        } else {
            let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
            let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
            (1.0 + rho * rho) / (2.0 * rho)
        };
        Self { mean, mean_phasor: Complex64::from_polar(1.0, mean), kappa, r }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with_phasor(rng).0
    }

    /// A draw `θ` together with `e^{jθ}`.
    pub fn sample_with_phasor<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, Complex64) {
        if self.kappa < UNIFORM_CONCENTRATION {
            let theta = rng.random::<f64>() * 2.0 * PI;
            return (theta, Complex64::from_polar(1.0, theta));
        }
        loop {
            let z = cos_of_uniform_angle(rng);
            let f = (1.0 + self.r * z) / (self.r + z);
            let c = self.kappa * (self.r - f);
            let u2: f64 = rng.random();
            if c * (2.0 - c) > u2 || (c / u2).ln() + 1.0 - c >= 0.0 {
                let f = f.clamp(-1.0, 1.0);
                let offset = f.acos();
                let s = (1.0 - f * f).sqrt();
                let mean = self.mean_phasor;
                return if rng.random::<f64>() < 0.5 {
                    (self.mean - offset, mean * Complex64::new(f, -s))
                } else {
                    (self.mean + offset, mean * Complex64::new(f, s))
                };
            }
        }
    }
}

/// `cos φ` for `φ` uniform on the circle, as `(x² − y²)/(x² + y²)` of a point uniform in the disk.
#[inline]
fn cos_of_uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = 2.0 * rng.random::<f64>() - 1.0;
        let r2 = x * x + y * y;
        if r2 <= 1.0 && r2 > 0.0 {
            return (x * x - y * y) / r2;
        }
    }
}

/// Draws from a [`PhaseMixture`]: the atom with probability `K/(K+1)`, else von Mises.
#[derive(Debug, Clone, Copy)]
pub struct PhaseSampler {
    atom_weight: f64,
    continuous_weight: f64,
    mean: f64,
    von_mises: VonMises,
}

impl PhaseSampler {
    pub fn new(mix: &PhaseMixture) -> Self {
        Self {
            atom_weight: mix.atom_weight(),
            continuous_weight: mix.continuous_weight(),
            mean: mix.mean_phase(),
            von_mises: VonMises::new(mix.mean_phase(), mix.concentration()),
        }
    }

    /// `None` for the atom, otherwise a continuous draw and its phasor.
    pub fn sample_split<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(f64, Complex64)> {
        if self.atom_weight >= 1.0 || (self.atom_weight > 0.0 && rng.random::<f64>() < self.atom_weight) {
            None
        } else {
            Some(self.von_mises.sample_with_phasor(rng))
        }
    }

    pub fn continuous_weight(&self) -> f64 {
        self.continuous_weight
    }

    /// A draw from the von Mises component alone.
    pub fn sample_continuous<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, Complex64) {
        self.von_mises.sample_with_phasor(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_split(rng).map_or(self.mean, |(theta, _)| theta)
    }
}

pub fn sample_channel_phase<R: Rng + ?Sized>(mix: &PhaseMixture, rng: &mut R) -> f64 {
    PhaseSampler::new(mix).sample(rng)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `f` with `workers` threads available to the simulation routines.
#[cfg(feature = "parallel")]
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
pub fn with_workers<T: Send>(_workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(f())
}

/// Maps every chunk of trials through `f`, returning per-chunk results in order.
fn map_chunks<T: Send>(n_trials: u64, f: impl Fn(u64, u64) -> T + Sync + Send) -> Vec<T> {
    let chunks = n_trials.div_ceil(CHUNK);
    let run = |c: u64| {
        let start = c * CHUNK;
        f(start, (start + CHUNK).min(n_trials))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(run).collect()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Per-element sampler for a fading leg, with the quantized atom phasors precomputed.
#[derive(Debug, Clone, Copy)]
struct ElementSampler {
    amplitude: NakagamiSampler,
    phase: PhaseSampler,
    quantizer: QuantizerConfig,
    /// Phase added to the channel phase before compensation on the reflect path.
    reflect_offset: f64,
    reflect_offset_phasor: Complex64,
    level_phasors: [Complex64; 1 << MAX_TABLE_BITS],
    atom_harvest: Complex64,
    atom_reflect: Complex64,
}

impl ElementSampler {
    fn new(leg: &ChannelLeg, mix: &PhaseMixture, qc: &QuantizerConfig, reflect_offset: f64) -> Result<Self> {
        let mean = mix.mean_phase();
        if qc.bits() > MAX_TABLE_BITS {
            return Err(Error::domain("bits", qc.bits() as f64, "q <= 8 for simulation"));
        }
        let mut level_phasors = [Complex64::new(0.0, 0.0); 1 << MAX_TABLE_BITS];
        for (slot, level) in level_phasors.iter_mut().zip(qc.levels()) {
            *slot = Complex64::from_polar(1.0, level);
        }
        Ok(Self {
            amplitude: NakagamiSampler::new(leg.nakagami_shape, leg.nakagami_spread)?,
            phase: PhaseSampler::new(mix),
            quantizer: *qc,
            reflect_offset,
            reflect_offset_phasor: Complex64::from_polar(1.0, reflect_offset),
            level_phasors,
            atom_harvest: Complex64::from_polar(1.0, qc.residual_error(-mean)),
            atom_reflect: Complex64::from_polar(1.0, qc.residual_error(-mean - reflect_offset)),
        })
    }

    /// `e^{jε}` for `ε = residual(−θ − offset)`, as `e^{jL} e^{jθ} e^{j offset}` with `L` the chosen level.
    #[inline]
    fn residual_phasor(&self, theta: f64, phasor: Complex64, offset: f64, offset_phasor: Complex64) -> Complex64 {
        let desired = -theta - offset;
        let eps = self.quantizer.residual_error(desired);
        let level = ((eps + desired) / self.quantizer.step()).round() as i64;
        let idx = level.rem_euclid(self.quantizer.level_count() as i64) as usize;
        self.level_phasors[idx] * phasor * offset_phasor
    }

    /// Harvesting and reflecting phasor sums `Σ aᵢ e^{jεᵢ}` over `n` elements.
    ///
    /// Elements are exchangeable, so the number that leave the atom is drawn
    /// first and the atom amplitudes are summed before a single rotation.
    fn sums<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<(Complex64, Complex64)> {
        let p = self.phase.continuous_weight();
        let continuous = if p <= 0.0 {
            0
        } else if p >= 1.0 {
            n
        } else {
            Binomial::new(n, p).map_err(|e| Error::Config(e.to_string()))?.sample(rng)
        };
        let mut atom = 0.0;
        for _ in continuous..n {
            atom += self.amplitude.sample(rng);
        }
        let mut sh = atom * self.atom_harvest;
        let mut sc = atom * self.atom_reflect;
        let one = Complex64::new(1.0, 0.0);
        for _ in 0..continuous {
            let a = self.amplitude.sample(rng);
            let (theta, phasor) = self.phase.sample_continuous(rng);
            let h = self.residual_phasor(theta, phasor, 0.0, one);
            sh += a * h;
            if self.reflect_offset == 0.0 {
                sc += a * h;
            } else {
                sc += a * self.residual_phasor(theta, phasor, self.reflect_offset, self.reflect_offset_phasor);
            }
        }
        Ok((sh, sc))
    }

    /// `|Σ aᵢ e^{jεᵢ}|²` over `n` reflecting elements.
    fn reflect_power<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<f64> {
        Ok(self.sums(n, rng)?.1.norm_sqr())
    }

    /// `|Σ aᵢ e^{jεᵢ}|²` over `n` harvesting elements.
    fn harvest_power<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<f64> {
        Ok(self.sums(n, rng)?.0.norm_sqr())
    }

    /// Harvest and reflect powers of the same `n` elements.
    fn joint_power<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<(f64, f64)> {
        let (h, c) = self.sums(n, rng)?;
        Ok((h.norm_sqr(), c.norm_sqr()))
    }
}

/// One configured outage experiment.
struct OutageTrial {
    side: Side,
    scheme: Scheme,
    n_total: u64,
    elements: ElementSampler,
    harvest_gain: f64,
    snr_gain: f64,
    element_power: f64,
    controller_power: f64,
    rate_threshold: f64,
}

impl OutageTrial {
    fn rate_fails(&self, fraction: f64, x: f64) -> bool {
        fraction * (self.snr_gain * x).ln_1p() / std::f64::consts::LN_2 <= self.rate_threshold
    }

    fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<bool> {
        let (pe, pc, a) = (self.element_power, self.controller_power, self.harvest_gain);
        Ok(match (self.side, self.scheme) {
            (Side::TxSide, Scheme::TimeSwitching { tau }) => {
                // every element harvests the same quantized LoS phasor: |Σ|² = N²
                let n = self.n_total as f64;
                if tau * a * n * n <= (1.0 - tau) * n * pe + pc {
                    return Ok(true);
                }
                self.rate_fails(1.0 - tau, self.elements.reflect_power(self.n_total, rng)?)
            }
            (Side::TxSide, Scheme::ElementSplitting { n1, n2 }) => {
                let n1 = n1 as f64;
                if a * n1 * n1 <= n2 as f64 * pe + pc {
                    return Ok(true);
                }
                self.rate_fails(1.0, self.elements.reflect_power(n2, rng)?)
            }
            (Side::UeSide, Scheme::TimeSwitching { tau }) => {
                let (harvest, reflect) = self.elements.joint_power(self.n_total, rng)?;
                let n = self.n_total as f64;
                tau * a * harvest <= (1.0 - tau) * n * pe + pc || self.rate_fails(1.0 - tau, reflect)
            }
            (Side::UeSide, Scheme::ElementSplitting { n1, n2 }) => {
                let harvest = self.elements.harvest_power(n1, rng)?;
                let reflect = self.elements.reflect_power(n2, rng)?;
                a * harvest <= n2 as f64 * pe + pc || self.rate_fails(1.0, reflect)
            }
        })
    }
}

/// Outage frequency of the configured link over `plan.n_trials` independent blocks.
pub fn simulate_outage(
    sys: &SystemConfig,
    dep: &Deployment,
    sc: &SchemeConfig,
    qc: &QuantizerConfig,
    plan: &TrialPlan,
) -> Result<Estimate> {
    if plan.n_trials == 0 {
        return Err(Error::domain("trials", 0.0, "trials >= 1"));
    }
    sys.validate()?;
    let lambda = sys.wavelength;
    let fading = dep.fading_leg();
    let mix = fading.phase_mixture(lambda);
    let reflect_offset = match plan.mode {
        SimulationMode::PaperFaithful => 0.0,
        SimulationMode::Physical => dep.los_leg().mean_phase(lambda),
    };
    let l1 = path_loss(dep.leg1(), lambda)?;
    let l2 = path_loss(dep.leg2(), lambda)?;
    let trial = OutageTrial {
        side: dep.side(),
        scheme: sc.scheme(),
        n_total: sc.n_total(),
        elements: ElementSampler::new(fading, &mix, qc, reflect_offset)?,
        harvest_gain: sys.conversion_efficiency * sys.transmit_power * sys.tx_gain * l1,
        snr_gain: sys.transmit_snr() * sys.combined_gain() * l1 * l2,
        element_power: sys.element_power(qc.bits()),
        controller_power: sys.controller_power,
        rate_threshold: sys.rate_threshold,
    };
    let seed = plan.seed;
    let counts = map_chunks(plan.n_trials, |start, end| -> Result<u64> {
        let mut k = 0;
        for t in start..end {
            k += u64::from(trial.run(&mut trial_rng(seed, t))?);
        }
        Ok(k)
    });
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(Estimate::binomial(total, plan.n_trials))
}

/// Sample estimates of `E[X]` and `E[X²]` for `X = |Σᵢ |hᵢ| e^{jεᵢ}|²` over `n_elements`.
pub fn simulate_cascade_moments(
    n_elements: u64,
    leg: &ChannelLeg,
    mix: &PhaseMixture,
    qc: &QuantizerConfig,
    plan: &TrialPlan,
) -> Result<(Estimate, Estimate)> {
    if n_elements == 0 {
        return Err(Error::domain("n", 0.0, "N >= 1"));
    }
    if plan.n_trials == 0 {
        return Err(Error::domain("trials", 0.0, "trials >= 1"));
    }
    let elements = ElementSampler::new(leg, mix, qc, 0.0)?;
    let seed = plan.seed;
    let partials = map_chunks(plan.n_trials, |start, end| -> Result<[f64; 3]> {
        let mut sums = [CompensatedSum::default(); 3];
        for t in start..end {
            let x = elements.reflect_power(n_elements, &mut trial_rng(seed, t))?;
            let x2 = x * x;
            sums[0].add(x);
            sums[1].add(x2);
            sums[2].add(x2 * x2);
        }
        Ok(sums.map(|s| s.value()))
    });
    let mut totals = [CompensatedSum::default(); 3];
    for p in partials {
        for (t, v) in totals.iter_mut().zip(p?) {
            t.add(v);
        }
    }
    let [s1, s2, s4] = totals.map(|s| s.value());
    Ok((Estimate::sample_mean(s1, s2, plan.n_trials), Estimate::sample_mean(s2, s4, plan.n_trials)))
}
