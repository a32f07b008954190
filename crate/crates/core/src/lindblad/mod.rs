//! Time-dependent Lindblad dynamics with collective jump operators.
//!
//! Rate convention: a channel with rate γ contributes γ·D[c]ρ with
//! D[c]ρ = cρc† − ½(c†cρ + ρc†c), no extra factor of two.

mod generator;
mod integrate;
mod rates;
mod schedule;
mod trajectory;

pub use integrate::{default_dt, integrate, rate_bound, IntegratorConfig, Method, MAX_STEPS, STEPS_PER_PULSE_WIDTH};
pub use rates::{effective_rates, steady_state_tls, EffectiveRates};
pub use schedule::{switching_value, PumpEnvelope, RateSchedule, SwitchingProfile};
pub use trajectory::{fmt12, IntegrationDiagnostics, ObservableSample, Trajectory, TRAJECTORY_CSV_HEADER};

use crate::dicke::{DensityMatrix, Operator};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

use generator::Generator;

/// dρ/dt = −i[H,ρ] + Σ_j γ_j D[c_j]ρ for rates already evaluated at `t`.
///
/// `t` only labels a negative-rate error.
pub fn lindblad_rhs<T: Real>(
    rho: &DensityMatrix<T>,
    h: &Operator<T>,
    channels: &[(&Operator<T>, T)],
    t: T,
) -> Result<CMatrix<T>> {
    let basis = rho.basis();
    for op in std::iter::once(h).chain(channels.iter().map(|(c, _)| *c)) {
        if op.basis() != basis {
            return Err(Error::BasisMismatch {
                left: op.basis().n_emitters(),
                right: basis.n_emitters(),
            });
        }
    }
    let labels: Vec<&str> = channels.iter().map(|(c, _)| c.label()).collect();
    let rates: Vec<T> = channels.iter().map(|&(_, r)| r).collect();
    integrate::check_rates(&labels, &rates, t)?;

    let ops: Vec<&CMatrix<T>> = channels.iter().map(|(c, _)| c.elements()).collect();
    let gen = Generator::new(h.elements(), &ops);
    let d = basis.dim();
    let mut out = CMatrix::zeros(d);
    let mut scratch = CMatrix::zeros(d);
    gen.apply(rho.elements(), &rates, &mut out, &mut scratch);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{build_collective_operators, build_hamiltonian, thermal_state, DickeBasis};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex;

    fn setup(n: usize) -> (DickeBasis, crate::dicke::CollectiveOperators<f64>, Operator<f64>) {
        let b = DickeBasis::new(n).unwrap();
        (b, build_collective_operators(b), build_hamiltonian(b, 1.0).unwrap())
    }

    #[test]
    fn rhs_is_traceless_on_mixed_state() {
        let (b, o, h) = setup(5);
        let rho = DensityMatrix::maximally_mixed(b);
        let d = lindblad_rhs(&rho, &h, &[(&o.jm, 0.3)], 0.0).unwrap();
        assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn single_spin_decay_rate_has_no_factor_two() {
        let (b, o, h) = setup(1);
        let rho = DensityMatrix::fully_inverted(b);
        let gamma = 0.7;
        let d = lindblad_rhs(&rho, &h, &[(&o.jm, gamma)], 0.0).unwrap();
        // σ₊σ₋ projects on the excited state, the last basis index.
        assert_abs_diff_eq!(d[(1, 1)].re, -gamma, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(0, 0)].re, gamma, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_fast_path_matches_general_path() {
        let (b, o, h) = setup(4);
        // A non-diagonal H forces the general sparse path.
        let h_general = Operator::new(b, &h.elements().clone() + o.jx.elements(), "H'").unwrap();
        let amps: Vec<Complex<f64>> = (0..5).map(|k| Complex::new(1.0 + k as f64, 0.3 * k as f64)).collect();
        let rho = DensityMatrix::pure(b, &amps).unwrap();
        let chans = [(&o.jm, 0.2), (&o.jp, 0.05), (&o.jz, 0.01)];
        let fast = lindblad_rhs(&rho, &h, &chans, 0.0).unwrap();
        let general = lindblad_rhs(&rho, &h_general, &chans, 0.0).unwrap();
        // Difference must be exactly the extra −i[Jx, ρ] term.
        let extra =
            o.jx.elements()
                .commutator(rho.elements())
                .scale(Complex::new(0.0, -1.0));
        assert!((&(&general - &fast) - &extra).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_rate() {
        let (b, o, h) = setup(2);
        let rho = thermal_state(b, 1.0, 0.5).unwrap();
        let err = lindblad_rhs(&rho, &h, &[(&o.jm, -0.1)], 2.5).unwrap_err();
        assert!(matches!(err, Error::NegativeRate { t, .. } if t == 2.5));
    }
}
