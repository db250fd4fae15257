//! Experiment configuration files.
//!
//! Files are TOML. Every section rejects unknown keys. With
//! `preset = "paper-table-1"` any missing key takes its table value; without a
//! preset the system, deployment, quantizer and scheme keys are all required.
//! Decibel quantities are kept as written and converted only when a
//! [`SystemConfig`] is built.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{SimulationMode, TrialPlan};
use crate::model::{db_to_linear, wavelength, ChannelLeg, Deployment, Side, SystemConfig};
use crate::outage::{SchemeConfig, SchemeKind};
use crate::phase::{QuantizerConfig, DEFAULT_TRUNCATION};

pub const PRESET_TABLE_1: &str = "paper-table-1";

/// Trials used when an `[mc]` section leaves `trials` out.
pub const DEFAULT_TRIALS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    OutageVsTau,
    OutageVsSplit,
    NminVsDistance,
    EeVsN,
    MomentValidation,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::OutageVsTau => "outage-vs-tau",
            Scenario::OutageVsSplit => "outage-vs-split",
            Scenario::NminVsDistance => "nmin-vs-distance",
            Scenario::EeVsN => "ee-vs-n",
            Scenario::MomentValidation => "moment-validation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Dat,
    Csv,
}

impl TableFormat {
    pub fn label(self) -> &'static str {
        match self {
            TableFormat::Dat => "dat",
            TableFormat::Csv => "csv",
        }
    }
}

/// System constants in file units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub frequency_hz: f64,
    pub transmit_power_w: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    /// Noise power in dBW.
    pub noise_power_db: f64,
    pub conversion_efficiency: f64,
    pub pin_power_mw: f64,
    pub controller_power_mw: f64,
    pub block_duration_s: f64,
    /// Rate target in bit/s/Hz.
    pub rate_threshold: f64,
}

impl SystemParams {
    pub fn table_1() -> Self {
        Self {
            frequency_hz: 900e6,
            transmit_power_w: 0.4,
            tx_gain_db: 4.0,
            rx_gain_db: 0.0,
            noise_power_db: -100.0,
            conversion_efficiency: 0.65,
            pin_power_mw: 0.06,
            controller_power_mw: 50.0,
            block_duration_s: 1.0,
            rate_threshold: 11f64.log2(),
        }
    }

    pub fn to_config(&self) -> Result<SystemConfig> {
        if !(self.frequency_hz > 0.0) || !self.frequency_hz.is_finite() {
            return Err(Error::domain("frequency_hz", self.frequency_hz, "must be > 0"));
        }
        let cfg = SystemConfig {
            transmit_power: self.transmit_power_w,
            tx_gain: db_to_linear(self.tx_gain_db),
            rx_gain: db_to_linear(self.rx_gain_db),
            noise_power: db_to_linear(self.noise_power_db),
            wavelength: wavelength(self.frequency_hz),
            conversion_efficiency: self.conversion_efficiency,
            pin_power: self.pin_power_mw * 1e-3,
            controller_power: self.controller_power_mw * 1e-3,
            block_duration: self.block_duration_s,
            rate_threshold: self.rate_threshold,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Surface placement. The LoS leg is the short hop next to the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentParams {
    pub side: Side,
    pub los_distance: f64,
    pub los_exponent: f64,
    pub fading_distance: f64,
    pub fading_exponent: f64,
    pub nakagami_shape: f64,
    pub nakagami_spread: f64,
    pub concentration: f64,
    /// Derived from the shape parameter when absent.
    pub rice_factor: Option<f64>,
}

impl DeploymentParams {
    pub fn table_1(side: Side) -> Self {
        Self {
            side,
            los_distance: 15.0,
            los_exponent: 2.0,
            fading_distance: 45.0,
            fading_exponent: 2.2,
            nakagami_shape: 3.0,
            nakagami_spread: 1.0,
            concentration: 3.0,
            rice_factor: None,
        }
    }

    pub fn to_deployment(&self) -> Result<Deployment> {
        let los = ChannelLeg::los(self.los_distance, self.los_exponent)?;
        let fading = match self.rice_factor {
            Some(k) => ChannelLeg::fading_with_rice(
                self.fading_distance,
                self.fading_exponent,
                self.nakagami_shape,
                self.nakagami_spread,
                self.concentration,
                k,
            )?,
            None => ChannelLeg::fading(
                self.fading_distance,
                self.fading_exponent,
                self.nakagami_shape,
                self.nakagami_spread,
                self.concentration,
            )?,
        };
        match self.side {
            Side::TxSide => Deployment::new(Side::TxSide, los, fading),
            Side::UeSide => Deployment::new(Side::UeSide, fading, los),
        }
    }

    /// Same placement with Tx–surface distance `d1` and surface–UE distance `d2`.
    pub fn with_hops(&self, d1: f64, d2: f64) -> Self {
        let mut p = *self;
        match self.side {
            Side::TxSide => {
                p.los_distance = d1;
                p.fading_distance = d2;
            }
            Side::UeSide => {
                p.fading_distance = d1;
                p.los_distance = d2;
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    pub kind: SchemeKind,
    pub n: u64,
    /// Operating point for single-point commands; the optimum when absent.
    pub tau: Option<f64>,
    pub n1: Option<u64>,
}

impl SchemeParams {
    /// The explicit operating point, if one is configured.
    pub fn operating_point(&self) -> Result<Option<SchemeConfig>> {
        match self.kind {
            SchemeKind::TimeSwitching => self.tau.map(|tau| SchemeConfig::time_switching(self.n, tau)).transpose(),
            SchemeKind::ElementSplitting => {
                self.n1.map(|n1| SchemeConfig::element_splitting_of(self.n, n1, self.n - n1)).transpose()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerParams {
    pub bits: u32,
    pub truncation: u32,
}

impl QuantizerParams {
    pub fn to_quantizer(&self) -> Result<QuantizerConfig> {
        QuantizerConfig::new(self.bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range { start: f64, stop: f64, points: u32 },
    Values(Vec<f64>),
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Range { start, stop, points } => {
                let n = *points as usize;
                (0..n)
                    .map(|i| if i + 1 == n { *stop } else { start + (stop - start) * i as f64 / (n - 1) as f64 })
                    .collect()
            }
            Grid::Values(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub target: f64,
    /// `d1 + d2` held fixed by the distance sweep.
    pub total_distance: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self { target: 1e-6, total_distance: 60.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputParams {
    pub path: Option<PathBuf>,
    pub format: TableFormat,
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Option<Scenario>,
    pub system: SystemParams,
    pub deployment: DeploymentParams,
    pub scheme: SchemeParams,
    pub quantizer: QuantizerParams,
    pub grid: Option<Grid>,
    pub mc: Option<TrialPlan>,
    pub search: SearchParams,
    pub output: OutputParams,
}

/// A spec together with the list of keys that were filled in by default.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub spec: ExperimentSpec,
    pub defaulted: Vec<String>,
}

impl ExperimentSpec {
    /// The table-1 preset for one side, at its reference element count.
    pub fn table_1(side: Side) -> Self {
        Self {
            scenario: None,
            system: SystemParams::table_1(),
            deployment: DeploymentParams::table_1(side),
            scheme: SchemeParams { kind: SchemeKind::TimeSwitching, n: default_elements(side), tau: None, n1: None },
            quantizer: QuantizerParams { bits: 1, truncation: DEFAULT_TRUNCATION },
            grid: None,
            mc: None,
            search: SearchParams::default(),
            output: OutputParams::default(),
        }
    }

    pub fn system_config(&self) -> Result<SystemConfig> {
        self.system.to_config()
    }

    pub fn to_deployment(&self) -> Result<Deployment> {
        self.deployment.to_deployment()
    }

    pub fn quantizer_config(&self) -> Result<QuantizerConfig> {
        self.quantizer.to_quantizer()
    }

    /// Serializes every field explicitly, without a preset.
    pub fn to_toml(&self) -> String {
        toml::to_string(&RawFile::from_spec(self)).expect("plain data always serializes")
    }

    /// Checks cross-field constraints and parameter domains.
    pub fn validate(&self) -> Result<()> {
        self.system_config()?;
        self.to_deployment()?;
        self.quantizer_config()?;
        if self.scheme.n < 1 {
            return Err(Error::domain("n", self.scheme.n as f64, "N >= 1"));
        }
        if let Some(tau) = self.scheme.tau {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::domain("tau", tau, "0 < tau < 1"));
            }
        }
        if let Some(n1) = self.scheme.n1 {
            if n1 > self.scheme.n {
                return Err(Error::domain("n1", n1 as f64, "n1 <= n"));
            }
        }
        if !(self.search.target > 0.0 && self.search.target <= 1.0) {
            return Err(Error::domain("target", self.search.target, "0 < target <= 1"));
        }
        if !(self.search.total_distance > 0.0) || !self.search.total_distance.is_finite() {
            return Err(Error::domain("total_distance", self.search.total_distance, "must be > 0"));
        }
        if let Some(grid) = &self.grid {
            if let Grid::Range { start, stop, points } = grid {
                if *points < 2 {
                    return Err(Error::domain("points", *points as f64, "points >= 2"));
                }
                if !start.is_finite() || !stop.is_finite() {
                    return Err(Error::Config("grid bounds must be finite".into()));
                }
            }
            if grid.values().len() < 2 {
                return Err(Error::domain("points", grid.values().len() as f64, "points >= 2"));
            }
        }
        if let Some(scenario) = self.scenario {
            self.validate_scenario(scenario)?;
        }
        Ok(())
    }

    fn validate_scenario(&self, scenario: Scenario) -> Result<()> {
        let grid = self
            .grid
            .as_ref()
            .ok_or_else(|| Error::Config(format!("scenario {} needs a [grid] section", scenario.label())))?
            .values();
        let need_kind = |kind: SchemeKind| {
            if self.scheme.kind != kind {
                return Err(Error::Config(format!(
                    "scenario {} needs scheme.kind = \"{}\"",
                    scenario.label(),
                    kind.label()
                )));
            }
            Ok(())
        };
        let within = |name: &'static str, ok: &dyn Fn(f64) -> bool, bound: &'static str| {
            grid.iter().find(|&&v| !ok(v)).map_or(Ok(()), |&v| Err(Error::domain(name, v, bound)))
        };
        match scenario {
            Scenario::OutageVsTau => {
                need_kind(SchemeKind::TimeSwitching)?;
                within("tau", &|v| v > 0.0 && v < 1.0, "0 < tau < 1")
            }
            Scenario::OutageVsSplit => {
                need_kind(SchemeKind::ElementSplitting)?;
                within("n1_fraction", &|v| (0.0..=1.0).contains(&v), "0 <= n1/N <= 1")
            }
            Scenario::NminVsDistance => {
                let total = self.search.total_distance;
                within("d1", &|v| v > 0.0 && v < total, "0 < d1 < total_distance")
            }
            Scenario::EeVsN | Scenario::MomentValidation => {
                if scenario == Scenario::MomentValidation && self.mc.is_none() {
                    return Err(Error::Config("scenario moment-validation needs an [mc] section".into()));
                }
                within("n", &|v| v >= 1.0 && v.fract() == 0.0 && v <= 1e9, "integer N >= 1")
            }
        }
    }
}

fn default_elements(side: Side) -> u64 {
    match side {
        Side::TxSide => 250,
        Side::UeSide => 1500,
    }
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let loaded = raw.resolve()?;
    loaded.spec.validate()?;
    Ok(loaded)
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

// File layout. Every field is optional so that missing keys can be reported together.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenario: Option<Scenario>,
    #[serde(default)]
    system: RawSystem,
    #[serde(default)]
    deployment: RawDeployment,
    #[serde(default)]
    scheme: RawScheme,
    #[serde(default)]
    quantizer: RawQuantizer,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<RawGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<RawMc>,
    #[serde(default)]
    search: RawSearch,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    frequency_hz: Option<f64>,
    transmit_power_w: Option<f64>,
    tx_gain_db: Option<f64>,
    rx_gain_db: Option<f64>,
    noise_power_db: Option<f64>,
    conversion_efficiency: Option<f64>,
    pin_power_mw: Option<f64>,
    controller_power_mw: Option<f64>,
    block_duration_s: Option<f64>,
    rate_threshold: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDeployment {
    side: Option<Side>,
    los_distance: Option<f64>,
    los_exponent: Option<f64>,
    fading_distance: Option<f64>,
    fading_exponent: Option<f64>,
    nakagami_shape: Option<f64>,
    nakagami_spread: Option<f64>,
    concentration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rice_factor: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    kind: Option<SchemeKind>,
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n1: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuantizer {
    bits: Option<u32>,
    truncation: Option<u32>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    trials: Option<u64>,
    seed: Option<u64>,
    mode: Option<SimulationMode>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearch {
    target: Option<f64>,
    total_distance: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
    format: Option<TableFormat>,
}

/// Collects missing keys and defaulted keys while resolving.
struct Resolver {
    preset: bool,
    missing: Vec<String>,
    defaulted: Vec<String>,
}

impl Resolver {
    /// A key the preset can supply; required otherwise.
    fn required<T: std::fmt::Debug + Copy>(&mut self, key: &str, value: Option<T>, preset: T) -> T {
        match value {
            Some(v) => v,
            None if self.preset => {
                self.defaulted.push(format!("{key} = {preset:?} ({PRESET_TABLE_1})"));
                preset
            }
            None => {
                self.missing.push(key.to_string());
                preset
            }
        }
    }

    /// A key with a documented default regardless of preset.
    fn optional<T: std::fmt::Debug + Copy>(&mut self, key: &str, value: Option<T>, default: T) -> T {
        value.unwrap_or_else(|| {
            self.defaulted.push(format!("{key} = {default:?} (default)"));
            default
        })
    }
}

impl RawFile {
    fn resolve(self) -> Result<LoadedConfig> {
        let preset = match self.preset.as_deref() {
            None => false,
            Some(PRESET_TABLE_1) => true,
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown preset \"{other}\"; the only preset is \"{PRESET_TABLE_1}\""
                )))
            }
        };
        let mut r = Resolver { preset, missing: Vec::new(), defaulted: Vec::new() };

        let t1 = SystemParams::table_1();
        let s = &self.system;
        let system = SystemParams {
            frequency_hz: r.required("system.frequency_hz", s.frequency_hz, t1.frequency_hz),
            transmit_power_w: r.required("system.transmit_power_w", s.transmit_power_w, t1.transmit_power_w),
            tx_gain_db: r.required("system.tx_gain_db", s.tx_gain_db, t1.tx_gain_db),
            rx_gain_db: r.required("system.rx_gain_db", s.rx_gain_db, t1.rx_gain_db),
            noise_power_db: r.required("system.noise_power_db", s.noise_power_db, t1.noise_power_db),
            conversion_efficiency: r.required(
                "system.conversion_efficiency",
                s.conversion_efficiency,
                t1.conversion_efficiency,
            ),
            pin_power_mw: r.required("system.pin_power_mw", s.pin_power_mw, t1.pin_power_mw),
            controller_power_mw: r.required(
                "system.controller_power_mw",
                s.controller_power_mw,
                t1.controller_power_mw,
            ),
            block_duration_s: r.required("system.block_duration_s", s.block_duration_s, t1.block_duration_s),
            rate_threshold: r.required("system.rate_threshold", s.rate_threshold, t1.rate_threshold),
        };

        let d = &self.deployment;
        let side = r.required("deployment.side", d.side, Side::TxSide);
        let td = DeploymentParams::table_1(side);
        let deployment = DeploymentParams {
            side,
            los_distance: r.required("deployment.los_distance", d.los_distance, td.los_distance),
            los_exponent: r.required("deployment.los_exponent", d.los_exponent, td.los_exponent),
            fading_distance: r.required("deployment.fading_distance", d.fading_distance, td.fading_distance),
            fading_exponent: r.required("deployment.fading_exponent", d.fading_exponent, td.fading_exponent),
            nakagami_shape: r.required("deployment.nakagami_shape", d.nakagami_shape, td.nakagami_shape),
            nakagami_spread: r.required("deployment.nakagami_spread", d.nakagami_spread, td.nakagami_spread),
            concentration: r.required("deployment.concentration", d.concentration, td.concentration),
            rice_factor: d.rice_factor,
        };

        let sc = &self.scheme;
        let scheme = SchemeParams {
            kind: r.required("scheme.kind", sc.kind, SchemeKind::TimeSwitching),
            n: r.required("scheme.n", sc.n, default_elements(side)),
            tau: sc.tau,
            n1: sc.n1,
        };

        let quantizer = QuantizerParams {
            bits: r.required("quantizer.bits", self.quantizer.bits, 1),
            truncation: r.optional("quantizer.truncation", self.quantizer.truncation, DEFAULT_TRUNCATION),
        };

        let grid = match self.grid {
            None => None,
            Some(RawGrid { values: Some(v), start: None, stop: None, points: None }) => Some(Grid::Values(v)),
            Some(RawGrid { values: None, start, stop, points }) => {
                for (key, present) in
                    [("grid.start", start.is_some()), ("grid.stop", stop.is_some()), ("grid.points", points.is_some())]
                {
                    if !present {
                        r.missing.push(key.to_string());
                    }
                }
                Some(Grid::Range {
                    start: start.unwrap_or(0.0),
                    stop: stop.unwrap_or(0.0),
                    points: points.unwrap_or(0),
                })
            }
            Some(_) => {
                return Err(Error::Config("grid takes either `values` or `start`/`stop`/`points`, not both".into()))
            }
        };

        let mc = match self.mc {
            None => None,
            Some(m) => {
                let trials = r.optional("mc.trials", m.trials, DEFAULT_TRIALS);
                let seed = r.optional("mc.seed", m.seed, 1);
                let mode = r.optional("mc.mode", m.mode, SimulationMode::PaperFaithful);
                Some(TrialPlan::new(trials, seed, mode)?)
            }
        };

        let sd = SearchParams::default();
        let search = SearchParams {
            target: r.optional("search.target", self.search.target, sd.target),
            total_distance: r.optional("search.total_distance", self.search.total_distance, sd.total_distance),
        };
        let output = OutputParams {
            path: self.output.path,
            format: r.optional("output.format", self.output.format, TableFormat::Dat),
        };

        if !r.missing.is_empty() {
            return Err(Error::Config(format!(
                "missing required keys (or set preset = \"{PRESET_TABLE_1}\"): {}",
                r.missing.join(", ")
            )));
        }
        Ok(LoadedConfig {
            spec: ExperimentSpec {
                scenario: self.scenario,
                system,
                deployment,
                scheme,
                quantizer,
                grid,
                mc,
                search,
                output,
            },
            defaulted: r.defaulted,
        })
    }

    fn from_spec(spec: &ExperimentSpec) -> Self {
        let s = &spec.system;
        let d = &spec.deployment;
        Self {
            preset: None,
            scenario: spec.scenario,
            system: RawSystem {
                frequency_hz: Some(s.frequency_hz),
                transmit_power_w: Some(s.transmit_power_w),
                tx_gain_db: Some(s.tx_gain_db),
                rx_gain_db: Some(s.rx_gain_db),
                noise_power_db: Some(s.noise_power_db),
                conversion_efficiency: Some(s.conversion_efficiency),
                pin_power_mw: Some(s.pin_power_mw),
                controller_power_mw: Some(s.controller_power_mw),
                block_duration_s: Some(s.block_duration_s),
                rate_threshold: Some(s.rate_threshold),
            },
            deployment: RawDeployment {
                side: Some(d.side),
                los_distance: Some(d.los_distance),
                los_exponent: Some(d.los_exponent),
                fading_distance: Some(d.fading_distance),
                fading_exponent: Some(d.fading_exponent),
                nakagami_shape: Some(d.nakagami_shape),
                nakagami_spread: Some(d.nakagami_spread),
                concentration: Some(d.concentration),
                rice_factor: d.rice_factor,
            },
            scheme: RawScheme {
                kind: Some(spec.scheme.kind),
                n: Some(spec.scheme.n),
                tau: spec.scheme.tau,
                n1: spec.scheme.n1,
            },
            quantizer: RawQuantizer { bits: Some(spec.quantizer.bits), truncation: Some(spec.quantizer.truncation) },
            grid: spec.grid.as_ref().map(|g| match g {
                Grid::Range { start, stop, points } => {
                    RawGrid { start: Some(*start), stop: Some(*stop), points: Some(*points), values: None }
                }
                Grid::Values(v) => RawGrid { values: Some(v.clone()), ..RawGrid::default() },
            }),
            mc: spec.mc.map(|p| RawMc { trials: Some(p.n_trials), seed: Some(p.seed), mode: Some(p.mode) }),
            search: RawSearch { target: Some(spec.search.target), total_distance: Some(spec.search.total_distance) },
            output: RawOutput { path: spec.output.path.clone(), format: Some(spec.output.format) },
        }
    }
}
