//! Outage and energy-efficiency analysis of zero-energy reconfigurable
//! surfaces driven by quantized phase control.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod error;
pub mod experiment;
pub mod mc;
pub mod model;
pub mod numerics;
pub mod outage;
pub mod phase;

pub use cascade::{CascadeStats, GammaMatch, MomentModel};
pub use error::{Error, Result};
pub use model::{ChannelLeg, Deployment, Side, SystemConfig};
pub use outage::{LinkAnalysis, OutageResult, Scheme, SchemeConfig, SchemeKind};
pub use phase::{PhaseMixture, QuantizerConfig};
