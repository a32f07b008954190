//! Closed-form rate relations for an emitter coupled to an attenuating and an
//! amplifying reservoir.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveRates<T> {
    pub gamma_down: T,
    pub gamma_up: T,
    /// γ_down − γ_up; negative when the amplifier dominates.
    pub gamma_eff: T,
    /// Effective occupation; `None` when γ_eff = 0.
    pub n_bar_eff: Option<T>,
}

/// Rates from the reservoir couplings Γ₁ (attenuator), Γ₂ (amplifier) and
/// their thermal occupations n₁, n₂.
///
/// γ_down = Γ₁(n₁+1) + Γ₂n₂, γ_up = Γ₁n₁ + Γ₂(n₂+1),
/// n̄_eff = (γ_down·n₁ + γ_up·(n₂+1)) / γ_eff.
pub fn effective_rates<T: Real>(gamma1: T, gamma2: T, n1: T, n2: T) -> Result<EffectiveRates<T>> {
    for (name, v) in [("gamma1", gamma1), ("gamma2", gamma2), ("n1", n1), ("n2", n2)] {
        if !(v >= T::zero()) || !v.is_finite() {
            return Err(Error::invalid(
                name,
                format!("must be finite and non-negative, got {v}"),
            ));
        }
    }
    let one = T::one();
    let gamma_down = gamma1 * (n1 + one) + gamma2 * n2;
    let gamma_up = gamma1 * n1 + gamma2 * (n2 + one);
    let gamma_eff = gamma_down - gamma_up;
    let n_bar_eff = (!gamma_eff.is_zero()).then(|| (gamma_down * n1 + gamma_up * (n2 + one)) / gamma_eff);
    Ok(EffectiveRates {
        gamma_down,
        gamma_up,
        gamma_eff,
        n_bar_eff,
    })
}

/// Long-time excited population γ_up / (γ_up + γ_down) of a single emitter.
pub fn steady_state_tls<T: Real>(gamma_up: T, gamma_down: T) -> Result<T> {
    if !(gamma_up >= T::zero()) || !(gamma_down >= T::zero()) {
        return Err(Error::invalid("gamma", "rates must be non-negative"));
    }
    let total = gamma_up + gamma_down;
    if total.is_zero() {
        return Err(Error::invalid("gamma", "γ_up + γ_down must be positive"));
    }
    Ok(gamma_up / total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_decay() {
        let r = effective_rates(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((r.gamma_down, r.gamma_up, r.gamma_eff), (1.0, 0.0, 1.0));
        assert_eq!(r.n_bar_eff, Some(0.0));
    }

    #[test]
    fn pure_amplifier() {
        let r = effective_rates(0.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!((r.gamma_down, r.gamma_up, r.gamma_eff), (0.0, 1.0, -1.0));
    }

    #[test]
    fn balanced_reservoirs_have_no_effective_occupation() {
        for n in [0.0, 0.3, 2.0] {
            let r = effective_rates(1.0, 1.0, n, n).unwrap();
            assert_eq!(r.gamma_eff, 0.0);
            assert_eq!(r.n_bar_eff, None);
        }
    }

    #[test]
    fn rejects_negative_coupling() {
        assert!(effective_rates(-1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tls_steady_state() {
        assert_eq!(steady_state_tls(0.01, 0.03).unwrap(), 0.25);
        assert_eq!(steady_state_tls(0.2, 0.2).unwrap(), 0.5);
        assert_eq!(steady_state_tls(0.2, 0.0).unwrap(), 1.0);
        assert!(steady_state_tls(0.0, 0.0).is_err());
        assert!(steady_state_tls(0.7, 0.3).unwrap() > 0.5);
        assert!(steady_state_tls(0.3, 0.7).unwrap() < 0.5);
    }
}
