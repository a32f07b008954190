use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smooth pump window built from two tanh steps centred at `t_on` and `t_off`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchingProfile<T> {
    t_on: T,
    t_off: T,
    tau_switch: T,
    x: T,
}

impl<T: Real> SwitchingProfile<T> {
    pub fn new(t_on: T, t_off: T, tau_switch: T, x: T) -> Result<Self> {
        if !(t_on < t_off) {
            return Err(Error::invalid("t_off", format!("must exceed t_on ({t_on} >= {t_off})")));
        }
        if !(tau_switch > T::zero()) {
            return Err(Error::invalid("tau_switch", "must be positive"));
        }
        if !(x > T::zero()) {
            return Err(Error::invalid("x", "pump strength must be positive"));
        }
        Ok(Self {
            t_on,
            t_off,
            tau_switch,
            x,
        })
    }

    pub fn t_on(&self) -> T {
        self.t_on
    }

    pub fn t_off(&self) -> T {
        self.t_off
    }

    pub fn tau_switch(&self) -> T {
        self.tau_switch
    }

    pub fn x(&self) -> T {
        self.x
    }
}

/// S(t) = S_on(t)·(1 − S_off(t)), each step being ½[1 + tanh((t − t₀)/τ)].
pub fn switching_value<T: Real>(profile: &SwitchingProfile<T>, t: T) -> T {
    let half = T::of(0.5);
    let s_on = half * (T::one() + ((t - profile.t_on) / profile.tau_switch).tanh());
    // 1 − S_off written directly to avoid cancellation before t_off.
    let s_off_c = half * (T::one() - ((t - profile.t_off) / profile.tau_switch).tanh());
    s_on * s_off_c
}

/// Time dependence of the collective pump rate γ_pump(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PumpEnvelope<T> {
    /// x·S(t)·γ_down with the smooth tanh window.
    Smooth(SwitchingProfile<T>),
    /// x·γ_down on the closed interval [t_on, t_off], zero elsewhere.
    Hard { t_on: T, t_off: T, x: T },
    /// Time-independent absolute rate.
    Constant(T),
}

impl<T: Real> PumpEnvelope<T> {
    pub fn rate(&self, t: T, gamma_down: T) -> T {
        match *self {
            PumpEnvelope::Smooth(ref p) => p.x * switching_value(p, t) * gamma_down,
            PumpEnvelope::Hard { t_on, t_off, x } => {
                if t >= t_on && t <= t_off {
                    x * gamma_down
                } else {
                    T::zero()
                }
            }
            PumpEnvelope::Constant(r) => r,
        }
    }

    /// Upper bound of [`rate`](Self::rate) over all times.
    pub fn peak_rate(&self, gamma_down: T) -> T {
        match *self {
            PumpEnvelope::Smooth(ref p) => p.x * gamma_down,
            PumpEnvelope::Hard { x, .. } => x * gamma_down,
            PumpEnvelope::Constant(r) => r,
        }
    }
}

/// Rates of the three collective channels: decay √γ_down·J₋, pump √γ_pump(t)·J₊
/// and optional dephasing √γ_φ·J_z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSchedule<T> {
    pub gamma_down: T,
    pub pump: Option<PumpEnvelope<T>>,
    pub gamma_phi: T,
}

impl<T: Real> RateSchedule<T> {
    pub fn new(gamma_down: T) -> Result<Self> {
        if !(gamma_down >= T::zero()) || !gamma_down.is_finite() {
            return Err(Error::invalid("gamma_down", "must be finite and non-negative"));
        }
        Ok(Self {
            gamma_down,
            pump: None,
            gamma_phi: T::zero(),
        })
    }

    pub fn with_pump(mut self, pump: PumpEnvelope<T>) -> Result<Self> {
        if let PumpEnvelope::Constant(r) = pump {
            if !(r >= T::zero()) {
                return Err(Error::invalid("gamma_up", "constant pump rate must be non-negative"));
            }
        }
        if let PumpEnvelope::Hard { t_on, t_off, x } = pump {
            if !(t_on <= t_off) || !(x >= T::zero()) {
                return Err(Error::invalid("pump", "hard window needs t_on <= t_off and x >= 0"));
            }
        }
        self.pump = Some(pump);
        Ok(self)
    }

    pub fn with_dephasing(mut self, gamma_phi: T) -> Result<Self> {
        if !(gamma_phi >= T::zero()) {
            return Err(Error::invalid("gamma_phi", "must be non-negative"));
        }
        self.gamma_phi = gamma_phi;
        Ok(self)
    }

    pub fn pump_rate(&self, t: T) -> T {
        self.pump.as_ref().map_or(T::zero(), |p| p.rate(t, self.gamma_down))
    }

    pub fn peak_pump_rate(&self) -> T {
        self.pump.as_ref().map_or(T::zero(), |p| p.peak_rate(self.gamma_down))
    }
}
