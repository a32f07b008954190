//! Three-stroke engine cycle: thermal ignition, pumped superabsorption and
//! free superradiant emission, chained over k cycles.

use serde::{Serialize, Serializer};

use crate::dicke::{build_hamiltonian, thermal_state, DensityMatrix, DickeBasis, Operator};
use crate::error::{Error, Result};
use crate::lindblad::{
    default_dt, integrate, rate_bound, IntegratorConfig, PumpEnvelope, RateSchedule, SwitchingProfile, Trajectory,
};
use crate::mean_field::{derive_params, Branch, MeanFieldParams};
use crate::scalar::Real;

/// Pump strength times γ_down above which the collective model is outside its
/// validity range, in units of ω₀.
pub const VALIDITY_LIMIT: f64 = 0.1;

/// Stroke length in pulse widths past the delay: t_d + 5τ.
pub const STROKE_TAIL_WIDTHS: f64 = 5.0;

/// Default switching time as a fraction of the absorption stroke.
pub const DEFAULT_SWITCH_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpShape {
    /// tanh on/off ramps of width τ_switch.
    Smooth,
    /// Indicator window with the same on/off times.
    Hard,
}

/// Optional reservoir contact inserted after each emission stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalContact<T> {
    pub duration: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclePlan<T> {
    pub n_emitters: usize,
    pub omega0: T,
    pub t_c: T,
    pub gamma_down: T,
    pub x: T,
    /// Overrides both half-stroke lengths.
    pub stroke_duration: Option<T>,
    pub tau_switch: Option<T>,
    pub pump_shape: PumpShape,
    pub n_cycles: usize,
    pub dt: Option<T>,
    pub sample_stride: usize,
    pub thermal_contact: Option<ThermalContact<T>>,
}

impl<T: Real> CyclePlan<T> {
    pub fn new(n_emitters: usize, omega0: T, t_c: T, gamma_down: T, x: T) -> Self {
        Self {
            n_emitters,
            omega0,
            t_c,
            gamma_down,
            x,
            stroke_duration: None,
            tau_switch: None,
            pump_shape: PumpShape::Smooth,
            n_cycles: 5,
            dt: None,
            sample_stride: 1,
            thermal_contact: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_emitters == 0 {
            return Err(Error::invalid("n_emitters", "need at least one emitter"));
        }
        if self.n_cycles == 0 {
            return Err(Error::invalid("n_cycles", "need at least one cycle"));
        }
        if !(self.omega0 > T::zero()) || !self.omega0.is_finite() {
            return Err(Error::invalid("omega0", "must be positive and finite"));
        }
        if !(self.gamma_down > T::zero()) || !self.gamma_down.is_finite() {
            return Err(Error::invalid("gamma_down", "must be positive and finite"));
        }
        if !(self.x >= T::zero()) || !self.x.is_finite() {
            return Err(Error::invalid("x", "must be finite and non-negative"));
        }
        if !(self.t_c > T::zero()) || !self.t_c.is_finite() {
            return Err(Error::invalid(
                "temperature",
                "cold reservoir temperature must be positive and finite",
            ));
        }
        for (name, v) in [
            ("stroke_duration", self.stroke_duration),
            ("tau_switch", self.tau_switch),
            ("dt", self.dt),
        ] {
            if let Some(v) = v {
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(Error::invalid(name, "must be positive and finite"));
                }
            }
        }
        if let Some(c) = self.thermal_contact {
            if !(c.duration > T::zero()) {
                return Err(Error::invalid("thermal_contact.duration", "must be positive"));
            }
        }
        if self.sample_stride == 0 {
            return Err(Error::invalid("sample_stride", "must be at least 1"));
        }
        Ok(())
    }

    /// True when x·γ_down exceeds 0.1·ω₀.
    pub fn outside_validity(&self) -> bool {
        self.x * self.gamma_down > T::of(VALIDITY_LIMIT) * self.omega0
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.outside_validity() {
            w.push(format!(
                "x*gamma_down = {} exceeds {}*omega0; collective model outside its validity range",
                self.x * self.gamma_down,
                VALIDITY_LIMIT
            ));
        }
        w
    }

    /// Fills every default and checks the result.
    pub fn resolve(&self) -> Result<ResolvedPlan<T>> {
        self.validate()?;
        let absorption = derive_params(
            self.n_emitters,
            self.omega0,
            self.t_c,
            self.x * self.gamma_down,
            self.gamma_down,
            Branch::Absorption,
        );
        // The emission stroke starts from the inverted image of the ignition state.
        let emission = derive_params(
            self.n_emitters,
            self.omega0,
            -self.t_c,
            T::zero(),
            self.gamma_down,
            Branch::Emission,
        )?;
        let tail = T::of(STROKE_TAIL_WIDTHS);
        let stroke = |p: &MeanFieldParams<T>| p.t_d.max(T::zero()) + tail * p.tau;
        let (absorption_duration, absorption) = match (self.stroke_duration, absorption) {
            (Some(d), a) => (d, a.ok()),
            (None, Ok(a)) => (stroke(&a), Some(a)),
            (None, Err(e)) => return Err(e),
        };
        let emission_duration = self.stroke_duration.unwrap_or_else(|| stroke(&emission));
        let tau_switch = self
            .tau_switch
            .unwrap_or(absorption_duration * T::of(DEFAULT_SWITCH_FRACTION));
        let margin = (T::of(4.0) * tau_switch).min(absorption_duration * T::of(0.25));

        let basis = DickeBasis::new(self.n_emitters)?;
        let h = build_hamiltonian(basis, self.omega0)?;
        let mut probe = RateSchedule::new(self.gamma_down)?;
        if self.x > T::zero() {
            probe = probe.with_pump(PumpEnvelope::Constant(self.x * self.gamma_down))?;
        }
        let bound = rate_bound(&h, &probe);
        let width = match absorption {
            Some(a) => a.tau.min(emission.tau),
            None => emission.tau,
        }
        .min(absorption_duration);
        let dt = self.dt.unwrap_or_else(|| default_dt(width, bound));

        Ok(ResolvedPlan {
            plan: self.clone(),
            absorption_params: absorption,
            emission_params: emission,
            absorption_duration,
            emission_duration,
            contact_duration: self.thermal_contact.map_or(T::zero(), |c| c.duration),
            tau_switch,
            switch_margin: margin,
            dt,
            rate_bound: bound,
        })
    }
}

/// A plan with stroke lengths, switching time and step size fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedPlan<T> {
    pub plan: CyclePlan<T>,
    pub absorption_params: Option<MeanFieldParams<T>>,
    pub emission_params: MeanFieldParams<T>,
    pub absorption_duration: T,
    pub emission_duration: T,
    pub contact_duration: T,
    pub tau_switch: T,
    /// Distance of the pump on/off centres from the stroke edges.
    pub switch_margin: T,
    pub dt: T,
    pub rate_bound: T,
}

impl<T: Real> ResolvedPlan<T> {
    pub fn cycle_duration(&self) -> T {
        self.absorption_duration + self.emission_duration + self.contact_duration
    }

    /// Start time of cycle `k` (1-based).
    pub fn cycle_start(&self, k: usize) -> T {
        T::of_usize(k.saturating_sub(1)) * self.cycle_duration()
    }

    pub fn windows(&self, k: usize) -> [StrokeWindow<T>; 2] {
        let t0 = self.cycle_start(k);
        let t1 = t0 + self.absorption_duration;
        [
            StrokeWindow {
                kind: StrokeKind::Absorption,
                t_start: t0,
                t_end: t1,
            },
            StrokeWindow {
                kind: StrokeKind::Emission,
                t_start: t1,
                t_end: t1 + self.emission_duration,
            },
        ]
    }

    /// Rates during the absorption stroke of cycle `k`.
    pub fn absorption_schedule(&self, k: usize) -> Result<RateSchedule<T>> {
        let p = &self.plan;
        let s = RateSchedule::new(p.gamma_down)?;
        if !(p.x > T::zero()) {
            return Ok(s);
        }
        let t0 = self.cycle_start(k);
        let t_on = t0 + self.switch_margin;
        let t_off = t0 + self.absorption_duration - self.switch_margin;
        let env = match p.pump_shape {
            PumpShape::Smooth => PumpEnvelope::Smooth(SwitchingProfile::new(t_on, t_off, self.tau_switch, p.x)?),
            PumpShape::Hard => PumpEnvelope::Hard { t_on, t_off, x: p.x },
        };
        s.with_pump(env)
    }

    fn integrator(&self) -> Result<IntegratorConfig<T>> {
        IntegratorConfig::new(self.dt)?.with_stride(self.plan.sample_stride)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeKind {
    Absorption,
    Emission,
}

impl StrokeKind {
    /// Short tag used in file names.
    pub fn tag(self) -> &'static str {
        match self {
            StrokeKind::Absorption => "abs",
            StrokeKind::Emission => "em",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrokeWindow<T> {
    pub kind: StrokeKind,
    pub t_start: T,
    pub t_end: T,
}

impl<T: Real> StrokeWindow<T> {
    /// A window with `t_start <= t_end`; equal bounds give zero integrals.
    pub fn new(kind: StrokeKind, t_start: T, t_end: T) -> Result<Self> {
        if !(t_start <= t_end) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::invalid(
                "window",
                format!("need t_start <= t_end, got [{t_start}, {t_end}]"),
            ));
        }
        Ok(Self { kind, t_start, t_end })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct WorkIntegrals<T> {
    #[serde(rename = "W_pump")]
    pub w_pump: T,
    #[serde(rename = "W_em")]
    pub w_em: T,
    #[serde(rename = "W_leak")]
    pub w_leak: T,
}

/// ∫_a^b of the piecewise-linear interpolant through (times, values).
pub fn window_integral<T: Real>(times: &[T], values: &[T], a: T, b: T) -> Result<T> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: times.len(),
        });
    }
    if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneTimes { index: i + 1 });
    }
    let (lo, hi) = (times[0], times[times.len() - 1]);
    let slack = T::tol(1e-12) * (hi - lo).abs().max(hi.abs()).max(T::one());
    if !(a <= b) || a < lo - slack || b > hi + slack {
        return Err(Error::WindowOutOfRange {
            start: a.to_f64_lossy(),
            end: b.to_f64_lossy(),
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let (a, b) = (a.max(lo), b.min(hi));
    if a == b {
        return Ok(T::zero());
    }
    let half = T::of(0.5);
    let start = times.partition_point(|&t| t <= a).saturating_sub(1);
    let mut acc = T::zero();
    for i in start..times.len() - 1 {
        let (t0, t1) = (times[i], times[i + 1]);
        if t0 >= b {
            break;
        }
        let s0 = a.max(t0);
        let s1 = b.min(t1);
        if s1 <= s0 {
            continue;
        }
        let slope = (values[i + 1] - values[i]) / (t1 - t0);
        let f0 = values[i] + slope * (s0 - t0);
        let f1 = values[i] + slope * (s1 - t0);
        acc = acc + (s1 - s0) * (f0 + f1) * half;
    }
    Ok(acc)
}

/// Pump work, emitted work and leakage from one trajectory.
///
/// W_pump = ∫ ω₀γ_pump(t)⟨J₋J₊⟩ and W_leak = ∫ ω₀γ_down⟨J₊J₋⟩ over absorption
/// windows; W_em = ∫ ω₀γ_down⟨J₊J₋⟩ over emission windows. Trapezoid rule
/// with linear interpolation at the window edges.
pub fn work_integrals<T: Real>(
    traj: &Trajectory<T>,
    windows: &[StrokeWindow<T>],
    schedule: &RateSchedule<T>,
    omega0: T,
) -> Result<WorkIntegrals<T>> {
    if windows.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let times = traj.times();
    let i_em: Vec<T> = traj
        .samples()
        .iter()
        .map(|s| omega0 * schedule.gamma_down * s.jpjm)
        .collect();
    let i_pump: Vec<T> = times
        .iter()
        .zip(traj.samples())
        .map(|(&t, s)| omega0 * schedule.pump_rate(t) * s.jmjp)
        .collect();
    let mut w = WorkIntegrals::default();
    for win in windows {
        match win.kind {
            StrokeKind::Absorption => {
                w.w_pump = w.w_pump + window_integral(times, &i_pump, win.t_start, win.t_end)?;
                w.w_leak = w.w_leak + window_integral(times, &i_em, win.t_start, win.t_end)?;
            }
            StrokeKind::Emission => {
                w.w_em = w.w_em + window_integral(times, &i_em, win.t_start, win.t_end)?;
            }
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleFlag {
    /// W_pump is zero, η undefined.
    NoSuppliedEnergy,
    /// η > 1: emission drew on inversion not supplied by this cycle's pump.
    EtaAboveUnity,
}

/// η = W_em / W_pump.
pub fn efficiency_of<T: Real>(w_em: T, w_pump: T) -> Result<T> {
    if !(w_pump > T::zero()) {
        return Err(Error::NoSuppliedEnergy);
    }
    Ok(w_em / w_pump)
}

pub fn efficiency<T: Real>(record: &CycleRecord<T>) -> Result<T> {
    efficiency_of(record.work.w_em, record.work.w_pump)
}

#[derive(Debug, Clone)]
pub struct CycleRecord<T> {
    pub k: usize,
    pub work: WorkIntegrals<T>,
    pub eta: Option<T>,
    pub duration: T,
    pub windows: [StrokeWindow<T>; 2],
    pub flags: Vec<CycleFlag>,
    /// |ΔE − (W_pump − W_em − W_leak)| / W_pump over the two work strokes.
    pub audit_residual: T,
    /// ‖ρ_end^(k) − ρ_end^(k−1)‖_max, absent for the first cycle.
    pub state_change: Option<T>,
    pub absorption: Trajectory<T>,
    pub emission: Trajectory<T>,
    pub absorption_schedule: RateSchedule<T>,
    pub omega0: T,
}

impl<T: Real> CycleRecord<T> {
    pub fn w_pump(&self) -> T {
        self.work.w_pump
    }

    pub fn w_em(&self) -> T {
        self.work.w_em
    }

    pub fn w_leak(&self) -> T {
        self.work.w_leak
    }

    /// (t, I_pump − I_em) on the absorption then emission samples.
    pub fn net_intensity(&self) -> Vec<(T, T)> {
        let g = self.absorption_schedule.gamma_down;
        let abs = self
            .absorption
            .times()
            .iter()
            .zip(self.absorption.samples())
            .map(|(&t, s)| {
                (
                    t,
                    self.omega0 * (self.absorption_schedule.pump_rate(t) * s.jmjp - g * s.jpjm),
                )
            });
        let em = self
            .emission
            .times()
            .iter()
            .zip(self.emission.samples())
            .skip(1)
            .map(|(&t, s)| (t, -self.omega0 * g * s.jpjm));
        abs.chain(em).collect()
    }

    pub fn summary(&self) -> CycleSummary<T> {
        CycleSummary {
            k: self.k,
            w_pump: self.work.w_pump,
            w_em: self.work.w_em,
            w_leak: self.work.w_leak,
            eta: self.eta,
            duration: self.duration,
            flags: self.flags.clone(),
            audit_residual: self.audit_residual,
            state_change: self.state_change,
        }
    }
}

/// Serializable per-cycle figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleSummary<T> {
    pub k: usize,
    #[serde(rename = "W_pump")]
    pub w_pump: T,
    #[serde(rename = "W_em")]
    pub w_em: T,
    #[serde(rename = "W_leak")]
    pub w_leak: T,
    pub eta: Option<T>,
    pub duration: T,
    pub flags: Vec<CycleFlag>,
    pub audit_residual: T,
    pub state_change: Option<T>,
}

impl<T: Real + Serialize> Serialize for CycleRecord<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.summary().serialize(s)
    }
}

/// Gibbs state of the cold reservoir; no work is done here.
pub fn run_ignition<T: Real>(plan: &CyclePlan<T>) -> Result<DensityMatrix<T>> {
    plan.validate()?;
    thermal_state(DickeBasis::new(plan.n_emitters)?, plan.omega0, plan.t_c)
}

/// One absorption and one emission half-stroke (plus the optional contact
/// stroke) starting from `rho_in`. Errors carry the cycle index.
pub fn run_cycle<T: Real>(
    rho_in: &DensityMatrix<T>,
    plan: &CyclePlan<T>,
    k: usize,
) -> Result<(DensityMatrix<T>, CycleRecord<T>)> {
    let resolved = plan.resolve().map_err(|e| wrap(k, e))?;
    run_resolved_cycle(rho_in, &resolved, k, None)
}

fn wrap(k: usize, e: Error) -> Error {
    Error::Cycle { k, source: Box::new(e) }
}

fn run_resolved_cycle<T: Real>(
    rho_in: &DensityMatrix<T>,
    rp: &ResolvedPlan<T>,
    k: usize,
    previous_end: Option<&DensityMatrix<T>>,
) -> Result<(DensityMatrix<T>, CycleRecord<T>)> {
    let inner = || -> Result<(DensityMatrix<T>, CycleRecord<T>)> {
        let plan = &rp.plan;
        let h: Operator<T> = build_hamiltonian(rho_in.basis(), plan.omega0)?;
        let cfg = rp.integrator()?;
        let [w_abs, w_em] = rp.windows(k);

        let abs_schedule = rp.absorption_schedule(k)?;
        let abs = integrate(rho_in, &h, &abs_schedule, (w_abs.t_start, w_abs.t_end), &cfg)?;
        let em_schedule = RateSchedule::new(plan.gamma_down)?;
        let em = integrate(abs.final_state(), &h, &em_schedule, (w_em.t_start, w_em.t_end), &cfg)?;

        let a = work_integrals(&abs, &[w_abs], &abs_schedule, plan.omega0)?;
        let e = work_integrals(&em, &[w_em], &em_schedule, plan.omega0)?;
        let work = WorkIntegrals {
            w_pump: a.w_pump,
            w_em: e.w_em,
            w_leak: a.w_leak,
        };

        let e_start = abs.samples()[0].energy;
        let e_end = em.samples()[em.len() - 1].energy;
        let balance = work.w_pump - work.w_em - work.w_leak;
        let denom = work.w_pump.max(work.w_em).max(T::min_positive_value());
        let audit_residual = ((e_end - e_start) - balance).abs() / denom;

        let mut end = em.final_state().clone();
        if rp.contact_duration > T::zero() {
            let n_bar = ((plan.omega0 / plan.t_c).exp() - T::one()).recip();
            let contact = RateSchedule::new(plan.gamma_down * (n_bar + T::one()))?
                .with_pump(PumpEnvelope::Constant(plan.gamma_down * n_bar))?;
            let t0 = w_em.t_end;
            let c = integrate(&end, &h, &contact, (t0, t0 + rp.contact_duration), &cfg)?;
            end = c.final_state().clone();
        }

        let mut flags = Vec::new();
        let eta = match efficiency_of(work.w_em, work.w_pump) {
            Ok(eta) => {
                if eta > T::one() {
                    flags.push(CycleFlag::EtaAboveUnity);
                }
                Some(eta)
            }
            Err(_) => {
                flags.push(CycleFlag::NoSuppliedEnergy);
                None
            }
        };
        let state_change = previous_end.map(|p| p.max_abs_diff(&end));

        let record = CycleRecord {
            k,
            work,
            eta,
            duration: rp.cycle_duration(),
            windows: [w_abs, w_em],
            flags,
            audit_residual,
            state_change,
            absorption: abs,
            emission: em,
            absorption_schedule: abs_schedule,
            omega0: plan.omega0,
        };
        Ok((end, record))
    };
    inner().map_err(|e| wrap(k, e))
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct EngineReport<T> {
    pub plan: ResolvedPlan<T>,
    pub records: Vec<CycleRecord<T>>,
    /// Σ W_em / total elapsed time.
    pub average_power: T,
    /// η of the last cycle.
    pub converged_eta: Option<T>,
    pub total_time: T,
    pub warnings: Vec<String>,
}

impl<T: Real> EngineReport<T> {
    pub fn etas(&self) -> Vec<Option<T>> {
        self.records.iter().map(|r| r.eta).collect()
    }
}

/// Ignition followed by `n_cycles` chained cycles.
pub fn run_engine<T: Real>(plan: &CyclePlan<T>) -> Result<EngineReport<T>> {
    let resolved = plan.resolve()?;
    let mut rho = run_ignition(plan)?;
    let mut records = Vec::with_capacity(plan.n_cycles);
    let mut prev_end: Option<DensityMatrix<T>> = None;
    for k in 1..=plan.n_cycles {
        let (next, rec) = run_resolved_cycle(&rho, &resolved, k, prev_end.as_ref())?;
        prev_end = Some(next.clone());
        rho = next;
        records.push(rec);
    }
    let total_time = resolved.cycle_duration() * T::of_usize(plan.n_cycles);
    let emitted: T = records.iter().map(|r| r.work.w_em).sum();
    let mut warnings = plan.warnings();
    for r in &records {
        if r.flags.contains(&CycleFlag::EtaAboveUnity) {
            warnings.push(format!("cycle {}: eta above 1, emission drew on stored inversion", r.k));
        }
        if r.flags.contains(&CycleFlag::NoSuppliedEnergy) {
            warnings.push(format!("cycle {}: no supplied energy, eta undefined", r.k));
        }
    }
    Ok(EngineReport {
        converged_eta: records.last().and_then(|r| r.eta),
        average_power: emitted / total_time,
        total_time,
        records,
        plan: resolved,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_plan() -> CyclePlan<f64> {
        let mut p = CyclePlan::new(6, 1.0, 0.5, 0.05, 3.5);
        p.n_cycles = 2;
        p
    }

    #[test]
    fn resolve_fills_defaults() {
        let rp = small_plan().resolve().unwrap();
        let a = rp.absorption_params.unwrap();
        assert_abs_diff_eq!(rp.absorption_duration, a.t_d + 5.0 * a.tau, epsilon = 1e-12);
        assert_abs_diff_eq!(rp.tau_switch, rp.absorption_duration / 100.0, epsilon = 1e-12);
        assert!(rp.dt <= a.tau / 200.0);
        let [wa, we] = rp.windows(2);
        assert_abs_diff_eq!(wa.t_start, rp.cycle_duration(), epsilon = 1e-12);
        assert_eq!(wa.t_end, we.t_start);
    }

    #[test]
    fn validity_warning_threshold() {
        let mut p = small_plan();
        p.gamma_down = 0.01;
        p.x = 10.0;
        assert!(p.warnings().is_empty());
        p.x = 20.0;
        assert_eq!(p.warnings().len(), 1);
    }

    #[test]
    fn rejects_invalid_plans() {
        let mut p = small_plan();
        p.n_cycles = 0;
        assert!(p.validate().is_err());
        let mut p = small_plan();
        p.t_c = 0.0;
        assert!(p.resolve().is_err());
        let mut p = small_plan();
        p.x = 1.0;
        assert!(p.resolve().is_err());
        p.stroke_duration = Some(10.0);
        assert!(p.resolve().is_ok());
    }

    #[test]
    fn window_integral_constant_and_partial() {
        let t: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let c = vec![2.5; 11];
        assert_abs_diff_eq!(
            window_integral(&t, &c, 0.13, 0.77).unwrap(),
            2.5 * 0.64,
            epsilon = 1e-14
        );
        let lin: Vec<f64> = t.iter().map(|&x| 3.0 * x).collect();
        assert_abs_diff_eq!(
            window_integral(&t, &lin, 0.05, 0.95).unwrap(),
            1.5 * (0.95f64.powi(2) - 0.0025),
            epsilon = 1e-13
        );
        assert_eq!(window_integral(&t, &c, 0.4, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn window_integral_errors() {
        let t = [0.0, 1.0, 1.0];
        assert!(matches!(
            window_integral(&t, &[1.0; 3], 0.0, 0.5),
            Err(Error::NonMonotoneTimes { index: 2 })
        ));
        let t = [0.0, 1.0];
        assert!(matches!(
            window_integral(&t, &[1.0; 2], 0.0, 1.5),
            Err(Error::WindowOutOfRange { .. })
        ));
        assert!(matches!(
            window_integral(&t, &[1.0; 3], 0.0, 0.5),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_pump_flags_no_supplied_energy() {
        let mut p = small_plan();
        p.x = 0.0;
        p.n_cycles = 1;
        let rep = run_engine(&p).unwrap();
        let r = &rep.records[0];
        assert_eq!(r.work.w_pump, 0.0);
        assert!(r.eta.is_none());
        assert!(r.flags.contains(&CycleFlag::NoSuppliedEnergy));
        assert!(matches!(efficiency(r), Err(Error::NoSuppliedEnergy)));
    }

    #[test]
    fn small_engine_closes_energy_audit() {
        let rep = run_engine(&small_plan()).unwrap();
        assert_eq!(rep.records.len(), 2);
        for r in &rep.records {
            assert!(r.work.w_pump > 0.0 && r.work.w_em >= 0.0 && r.work.w_leak >= 0.0);
            assert!(r.audit_residual < 1e-3, "audit {}", r.audit_residual);
            assert_abs_diff_eq!(r.eta.unwrap(), r.work.w_em / r.work.w_pump, epsilon = 1e-15);
        }
        assert!(rep.records[0].state_change.is_none());
        assert!(rep.records[1].state_change.is_some());
    }

    #[test]
    fn single_cycle_engine_matches_run_cycle() {
        let mut p = small_plan();
        p.n_cycles = 1;
        let rep = run_engine(&p).unwrap();
        let rho = run_ignition(&p).unwrap();
        let (_, rec) = run_cycle(&rho, &p, 1).unwrap();
        assert_eq!(rec.summary(), rep.records[0].summary());
    }

    #[test]
    fn report_serializes_with_work_keys() {
        let mut p = small_plan();
        p.n_cycles = 1;
        let json = serde_json::to_value(run_engine(&p).unwrap()).unwrap();
        let rec = &json["records"][0];
        for key in ["k", "W_pump", "W_em", "W_leak", "eta", "duration"] {
            assert!(rec.get(key).is_some(), "missing {key}");
        }
        assert!(json.get("average_power").is_some());
    }

    #[test]
    fn thermal_contact_extends_cycle() {
        let mut p = small_plan();
        p.thermal_contact = Some(ThermalContact { duration: 3.0 });
        let rp = p.resolve().unwrap();
        assert_abs_diff_eq!(
            rp.cycle_duration(),
            rp.absorption_duration + rp.emission_duration + 3.0,
            epsilon = 1e-12
        );
        let rep = run_engine(&p).unwrap();
        assert!(rep.records[1].eta.is_some());
    }
}
