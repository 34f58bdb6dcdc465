//! Leggett-Garg violations for the quantum harmonic oscillator with gaussian
//! initial states, computed along three independent routes: eigenfunction
//! sums, chopped-current integration and Wigner phase-space integration.
//!
//! All quantities are dimensionless (x in units of √(ħ/mω), θ = ωt).
//! The numerics are generic over [`Real`] (`f32`, `f64`); the `*64`
//! aliases below fix the common double-precision instantiation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bohm;
pub mod currents;
pub mod eigen;
pub mod error;
pub mod lg;
pub mod ode;
pub mod optimize;
pub mod quad;
pub mod scalar;
pub mod scan;
pub mod special;
pub mod state;
pub mod variants;
pub mod wigner;

pub use bohm::{BohmSource, TrajectoryBundle};
pub use currents::{ChoppedState, CurrentSample};
pub use error::{Error, Result};
pub use lg::{LgReport, Order, QpValue, Schedule, Truncation};
pub use scalar::Real;
pub use scan::{ScanGrid, ScanResult};
pub use state::{classical_trajectory, CoherentState, Phase, SignChoice};
pub use variants::{GammaPair, ProjectorBranch, SqueezeParams, ThermalParams};
pub use wigner::{GaussianState, GridSpec, PhaseField};

pub type CoherentState64 = CoherentState<f64>;
pub type Phase64 = Phase<f64>;
pub type QpValue64 = QpValue<f64>;
pub type LgReport64 = LgReport<f64>;
pub type Truncation64 = Truncation<f64>;
