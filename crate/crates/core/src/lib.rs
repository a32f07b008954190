//! Simulation and analysis of a collective superabsorption/superradiance engine
//! built from N two-level emitters.
//!
//! Exact dynamics run in the symmetric Dicke subspace (dimension N+1) under a
//! Lindblad master equation with collective jump operators. A closed-form
//! mean-field model supplies pulse parameters and sech² pulse shapes, and the
//! cycle driver chains pumped absorption and free emission strokes to measure
//! work, leakage, efficiency and power.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case. Time is measured in
//! units of 1/ω₀ throughout.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod cycle;
pub mod dicke;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod mean_field;
pub mod pulse;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CMatrix64 = linalg::CMatrix<f64>;
pub type Operator64 = dicke::Operator<f64>;
pub type DensityMatrix64 = dicke::DensityMatrix<f64>;
pub type DensityMatrix32 = dicke::DensityMatrix<f32>;
pub type RateSchedule64 = lindblad::RateSchedule<f64>;
pub type SwitchingProfile64 = lindblad::SwitchingProfile<f64>;
pub type IntegratorConfig64 = lindblad::IntegratorConfig<f64>;
pub type Trajectory64 = lindblad::Trajectory<f64>;
pub type MeanFieldParams64 = mean_field::MeanFieldParams<f64>;
pub type MeanFieldParams32 = mean_field::MeanFieldParams<f32>;
pub type PulseSpec64 = pulse::PulseSpec<f64>;
pub type CyclePlan64 = cycle::CyclePlan<f64>;
pub type CycleRecord64 = cycle::CycleRecord<f64>;
pub type EngineReport64 = cycle::EngineReport<f64>;
pub type PulseFit64 = analysis::PulseFit<f64>;
pub type ScalingFit64 = analysis::ScalingFit<f64>;
pub type SweepResult64 = analysis::SweepResult<f64>;
