//! Pulse fitting, N-scaling, mean-field/exact comparison and parameter sweeps.

mod compare;
mod fit;
mod scaling;
mod sweep;

pub use compare::{compare_mf_exact, Curve, CurveComparison};
pub use fit::{fit_sech2, PulseFit, FIT_MAX_ITERATIONS, FIT_RELATIVE_TOL};
pub use scaling::{scaling_exponent, ScalingFit};
pub use sweep::{sweep, SweepAxis, SweepResult};
