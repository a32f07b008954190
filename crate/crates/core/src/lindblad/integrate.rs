use serde::Serialize;

use super::generator::Generator;
use super::schedule::RateSchedule;
use super::trajectory::{IntegrationDiagnostics, ObservableSample, ObservableSet, Trajectory};
use crate::dicke::{build_collective_operators, CollectiveOperators, DensityMatrix, DickeBasis, Operator};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Hard cap on the number of fixed steps in one call.
pub const MAX_STEPS: usize = 20_000_000;

/// Steps per pulse width in the default step-size policy.
pub const STEPS_PER_PULSE_WIDTH: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig<T> {
    pub dt: T,
    pub method: Method,
    pub renormalize_trace: bool,
    pub sample_stride: usize,
    /// Keep a copy of ρ at every sample.
    pub store_states: bool,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(dt: T) -> Result<Self> {
        let cfg = Self {
            dt,
            method: Method::Rk4,
            renormalize_trace: true,
            sample_stride: 1,
            store_states: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// dt = min(pulse_width/200, 1/rate_bound).
    ///
    /// `rate_bound` is a bound on the generator's spectral radius (see
    /// [`rate_bound`]); capping by it keeps RK4 inside its stability region for
    /// large N, where the collective rates grow like γN²/4.
    pub fn for_pulse(pulse_width: T, rate_bound: T) -> Result<Self> {
        Self::new(default_dt(pulse_width, rate_bound))
    }

    pub fn with_stride(mut self, sample_stride: usize) -> Result<Self> {
        self.sample_stride = sample_stride;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        if self.sample_stride == 0 {
            return Err(Error::invalid("sample_stride", "must be at least 1"));
        }
        Ok(())
    }
}

pub fn default_dt<T: Real>(pulse_width: T, rate_bound: T) -> T {
    let by_width = pulse_width / T::of(STEPS_PER_PULSE_WIDTH);
    if rate_bound > T::zero() {
        by_width.min(rate_bound.recip())
    } else {
        by_width
    }
}

/// Upper bound on the spectral radius of the generator for `schedule`:
/// the spread of H plus Σ γ_max‖c†c‖.
pub fn rate_bound<T: Real>(h: &Operator<T>, schedule: &RateSchedule<T>) -> T {
    let ops = build_collective_operators::<T>(h.basis());
    let obs = ObservableSet::new(&ops, h);
    let hd = h.elements();
    let spread = if hd.is_diagonal() {
        let d = hd.diagonal();
        let hi = d.iter().fold(T::neg_infinity(), |m, z| m.max(z.re));
        let lo = d.iter().fold(T::infinity(), |m, z| m.min(z.re));
        hi - lo
    } else {
        T::of(2.0) * crate::linalg::SparseMatrix::from_dense(hd).row_sum_bound()
    };
    let j: T = h.basis().j();
    spread
        + schedule.gamma_down * obs.jpjm_bound()
        + schedule.peak_pump_rate() * obs.jmjp_bound()
        + schedule.gamma_phi * j * j
}

/// Channel list in generator order with the schedule's time-dependent rates.
pub(crate) struct ChannelSet<T> {
    has_pump: bool,
    has_dephasing: bool,
    labels: Vec<&'static str>,
    schedule: RateSchedule<T>,
}

impl<T: Real> ChannelSet<T> {
    pub(crate) fn new(schedule: &RateSchedule<T>) -> Self {
        let has_pump = schedule.pump.is_some();
        let has_dephasing = schedule.gamma_phi > T::zero();
        let mut labels = vec!["emission"];
        if has_pump {
            labels.push("pump");
        }
        if has_dephasing {
            labels.push("dephasing");
        }
        Self {
            has_pump,
            has_dephasing,
            labels,
            schedule: *schedule,
        }
    }

    pub(crate) fn operators<'a>(&self, ops: &'a CollectiveOperators<T>) -> Vec<&'a CMatrix<T>> {
        let mut v = vec![ops.jm.elements()];
        if self.has_pump {
            v.push(ops.jp.elements());
        }
        if self.has_dephasing {
            v.push(ops.jz.elements());
        }
        v
    }

    pub(crate) fn rates_at(&self, t: T, out: &mut Vec<T>) -> Result<()> {
        out.clear();
        out.push(self.schedule.gamma_down);
        if self.has_pump {
            out.push(self.schedule.pump_rate(t));
        }
        if self.has_dephasing {
            out.push(self.schedule.gamma_phi);
        }
        check_rates(&self.labels, out, t)
    }
}

pub(crate) fn check_rates<T: Real>(labels: &[&str], rates: &[T], t: T) -> Result<()> {
    for (label, &r) in labels.iter().zip(rates) {
        if !(r >= T::zero()) {
            return Err(Error::NegativeRate {
                channel: (*label).to_owned(),
                rate: r.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Fixed-step RK4 integration of the collective master equation over `t_span`.
///
/// Channels are √γ_down·J₋ (always), √γ_pump(t)·J₊ when the schedule has a
/// pump, and √γ_φ·J_z when dephasing is on. After every step ρ is
/// re-symmetrized and, if configured, trace-renormalized. Positivity is
/// checked at each sample with an eigenvalue floor of −1e−6.
///
/// A diagonal ρ₀ under a diagonal H with J±/J_z-type channels stays exactly
/// diagonal; that case steps the populations alone, with identical results
/// at O(N) cost per step.
pub fn integrate<T: Real>(
    rho0: &DensityMatrix<T>,
    h: &Operator<T>,
    schedule: &RateSchedule<T>,
    t_span: (T, T),
    config: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    config.validate()?;
    let (ta, tb) = t_span;
    if !(ta < tb) || !ta.is_finite() || !tb.is_finite() {
        return Err(Error::invalid("t_span", format!("need t_a < t_b, got ({ta}, {tb})")));
    }
    if h.basis() != rho0.basis() {
        return Err(Error::BasisMismatch {
            left: h.basis().n_emitters(),
            right: rho0.basis().n_emitters(),
        });
    }

    let span = tb - ta;
    let raw_steps = (span / config.dt).to_f64_lossy();
    // Shave off rounding so an exact multiple of dt is not bumped by one.
    let n = (raw_steps * (1.0 - 1e-12)).ceil().max(1.0);
    if !(n <= MAX_STEPS as f64) {
        return Err(Error::StepOverflow {
            steps: n,
            limit: MAX_STEPS,
        });
    }
    let n = n as usize;
    let dt = span / T::of_usize(n);
    let half_dt = dt * T::of(0.5);

    let basis = rho0.basis();
    let ops = build_collective_operators::<T>(basis);
    let observables = ObservableSet::new(&ops, h);
    let channels = ChannelSet::new(schedule);
    let generator = Generator::new(h.elements(), &channels.operators(&ops));

    let d = basis.dim();
    let expected_samples = n / config.sample_stride + 2;
    let mut run = Run {
        times: Vec::with_capacity(expected_samples),
        samples: Vec::with_capacity(expected_samples),
        states: Vec::new(),
        floor: -T::tol(1e-6),
        max_drift: T::zero(),
        max_herm: T::zero(),
    };
    let grid = Grid { ta, tb, dt, n };

    let final_elements = match generator.populations() {
        Some(pops) if rho0.elements().is_diagonal() => {
            let mut p: Vec<T> = rho0.elements().diagonal().iter().map(|z| z.re).collect();
            let mut k = [
                vec![T::zero(); d],
                vec![T::zero(); d],
                vec![T::zero(); d],
                vec![T::zero(); d],
            ];
            let mut stage = vec![T::zero(); d];
            let (mut r0, mut r_half, mut r1) = (Vec::new(), Vec::new(), Vec::new());
            let sixth = dt / T::of(6.0);
            let two = T::of(2.0);
            run.record_populations(ta, &p, &observables, basis, config)?;
            for step in 0..n {
                let t = grid.time(step);
                channels.rates_at(t, &mut r0)?;
                channels.rates_at(t + half_dt, &mut r_half)?;
                channels.rates_at(t + dt, &mut r1)?;
                let tr_before: T = p.iter().copied().sum();
                let [k1, k2, k3, k4] = &mut k;
                pops.apply(&p, &r0, k1);
                stage
                    .iter_mut()
                    .zip(&p)
                    .zip(k1.iter())
                    .for_each(|((s, &x), &a)| *s = x + half_dt * a);
                pops.apply(&stage, &r_half, k2);
                stage
                    .iter_mut()
                    .zip(&p)
                    .zip(k2.iter())
                    .for_each(|((s, &x), &a)| *s = x + half_dt * a);
                pops.apply(&stage, &r_half, k3);
                stage
                    .iter_mut()
                    .zip(&p)
                    .zip(k3.iter())
                    .for_each(|((s, &x), &a)| *s = x + dt * a);
                pops.apply(&stage, &r1, k4);
                for i in 0..d {
                    p[i] = p[i] + (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * sixth;
                }
                let tr: T = p.iter().copied().sum();
                run.max_drift = run.max_drift.max((tr - tr_before).abs() / dt);
                if config.renormalize_trace {
                    let inv = tr.recip();
                    p.iter_mut().for_each(|x| *x = *x * inv);
                }
                if let Some(t_next) = grid.sample_time(step, config.sample_stride) {
                    run.record_populations(t_next, &p, &observables, basis, config)?;
                }
            }
            CMatrix::from_real_diag(&p)
        }
        _ => {
            let mut rho = rho0.elements().clone();
            let mut stage = CMatrix::zeros(d);
            let mut scratch = CMatrix::zeros(d);
            let mut k1 = CMatrix::zeros(d);
            let mut k2 = CMatrix::zeros(d);
            let mut k3 = CMatrix::zeros(d);
            let mut k4 = CMatrix::zeros(d);
            let (mut r0, mut r_half, mut r1) = (Vec::new(), Vec::new(), Vec::new());
            let sixth = dt / T::of(6.0);
            let two = T::of(2.0);
            run.record(ta, &rho, &observables, basis, config)?;
            for step in 0..n {
                let t = grid.time(step);
                channels.rates_at(t, &mut r0)?;
                channels.rates_at(t + half_dt, &mut r_half)?;
                channels.rates_at(t + dt, &mut r1)?;
                let tr_before = rho.trace().re;

                generator.apply(&rho, &r0, &mut k1, &mut scratch);
                stage.clone_from(&rho);
                stage.axpy(half_dt, &k1);
                generator.apply(&stage, &r_half, &mut k2, &mut scratch);
                stage.clone_from(&rho);
                stage.axpy(half_dt, &k2);
                generator.apply(&stage, &r_half, &mut k3, &mut scratch);
                stage.clone_from(&rho);
                stage.axpy(dt, &k3);
                generator.apply(&stage, &r1, &mut k4, &mut scratch);

                for ((((x, a), b), c), e) in rho
                    .as_mut_slice()
                    .iter_mut()
                    .zip(k1.as_slice())
                    .zip(k2.as_slice())
                    .zip(k3.as_slice())
                    .zip(k4.as_slice())
                {
                    *x = *x + (*a + (*b + *c) * two + *e) * sixth;
                }

                run.max_herm = run.max_herm.max(rho.hermiticity_defect());
                rho.hermitize();
                let tr = rho.trace().re;
                run.max_drift = run.max_drift.max((tr - tr_before).abs() / dt);
                if config.renormalize_trace {
                    let inv = tr.recip();
                    rho.as_mut_slice().iter_mut().for_each(|z| *z = *z * inv);
                }
                if let Some(t_next) = grid.sample_time(step, config.sample_stride) {
                    run.record(t_next, &rho, &observables, basis, config)?;
                }
            }
            rho
        }
    };

    Ok(Trajectory {
        times: run.times,
        samples: run.samples,
        states: run.states,
        final_state: DensityMatrix::new_unchecked(basis, final_elements),
        diagnostics: IntegrationDiagnostics {
            steps: n,
            dt,
            max_trace_drift_rate: run.max_drift,
            max_hermiticity_defect: run.max_herm,
        },
    })
}

struct Grid<T> {
    ta: T,
    tb: T,
    dt: T,
    n: usize,
}

impl<T: Real> Grid<T> {
    fn time(&self, step: usize) -> T {
        self.ta + T::of_usize(step) * self.dt
    }

    /// Sample time after `step`, if that step ends on a sample.
    fn sample_time(&self, step: usize, stride: usize) -> Option<T> {
        let done = step + 1;
        if done == self.n {
            Some(self.tb)
        } else if done.is_multiple_of(stride) {
            Some(self.time(done))
        } else {
            None
        }
    }
}

struct Run<T> {
    times: Vec<T>,
    samples: Vec<ObservableSample<T>>,
    states: Vec<DensityMatrix<T>>,
    floor: T,
    max_drift: T,
    max_herm: T,
}

impl<T: Real> Run<T> {
    fn positivity_error(&self, t: T) -> Error {
        Error::PositivityViolation {
            t: t.to_f64_lossy(),
            floor: self.floor.to_f64_lossy(),
        }
    }

    fn record(
        &mut self,
        t: T,
        rho: &CMatrix<T>,
        obs: &ObservableSet<T>,
        basis: DickeBasis,
        config: &IntegratorConfig<T>,
    ) -> Result<()> {
        if !rho.eigenvalues_at_least(self.floor) {
            return Err(self.positivity_error(t));
        }
        self.times.push(t);
        self.samples.push(obs.sample(rho));
        if config.store_states {
            self.states.push(DensityMatrix::new_unchecked(basis, rho.clone()));
        }
        Ok(())
    }

    fn record_populations(
        &mut self,
        t: T,
        p: &[T],
        obs: &ObservableSet<T>,
        basis: DickeBasis,
        config: &IntegratorConfig<T>,
    ) -> Result<()> {
        if p.iter().any(|&x| !(x >= self.floor)) {
            return Err(self.positivity_error(t));
        }
        self.times.push(t);
        self.samples.push(obs.sample_populations(p));
        if config.store_states {
            self.states
                .push(DensityMatrix::new_unchecked(basis, CMatrix::from_real_diag(p)));
        }
        Ok(())
    }
}
