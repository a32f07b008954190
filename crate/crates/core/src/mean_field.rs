//! Closed-form mean-field pulses: Bloch trajectories, sech² intensity and the
//! single-spin mean-field Hamiltonian.

use std::io::{self, Write};

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{sech, Real};

/// Which cooperative process a pulse describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Superradiant decay: ⟨σ_z⟩ falls through the pulse.
    Emission,
    /// Superabsorption: ⟨σ_z⟩ rises through the pulse.
    Absorption,
}

impl Branch {
    /// Sign s in ⟨σ_z⟩ = s·r·tanh((t − t_d)/τ).
    pub fn sz_sign<T: Real>(self) -> T {
        match self {
            Branch::Emission => -T::one(),
            Branch::Absorption => T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldParams<T> {
    pub omega0: T,
    pub n_emitters: usize,
    pub gamma_up: T,
    pub gamma_down: T,
    pub r: T,
    pub theta0: T,
    pub phi0: T,
    pub tau: T,
    pub t_d: T,
    pub branch: Branch,
}

impl<T: Real> MeanFieldParams<T> {
    /// Builds parameters from an explicit Bloch radius and initial angle.
    ///
    /// τ = 2/(r·N·|γ_down − γ_up|) and t_d = τ·ln(cot(θ₀/2)).
    #[allow(clippy::too_many_arguments)]
    pub fn from_angle(
        n_emitters: usize,
        omega0: T,
        gamma_up: T,
        gamma_down: T,
        r: T,
        theta0: T,
        phi0: T,
        branch: Branch,
    ) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::invalid("n_emitters", "need at least one emitter"));
        }
        if !(omega0 > T::zero()) || !omega0.is_finite() {
            return Err(Error::invalid("omega0", "must be positive and finite"));
        }
        for (name, g) in [("gamma_up", gamma_up), ("gamma_down", gamma_down)] {
            if !(g >= T::zero()) || !g.is_finite() {
                return Err(Error::invalid(name, "must be finite and non-negative"));
            }
        }
        if gamma_up == gamma_down {
            return Err(Error::invalid("gamma_up", "equal to gamma_down, pulse width diverges"));
        }
        if !(r > T::zero() && r <= T::one()) {
            return Err(Error::invalid("r", format!("must lie in (0, 1], got {r}")));
        }
        if !(theta0 > T::zero() && theta0 < T::PI()) {
            return Err(Error::invalid("theta0", format!("must lie in (0, π), got {theta0}")));
        }
        if !phi0.is_finite() {
            return Err(Error::invalid("phi0", "must be finite"));
        }
        let n = T::of_usize(n_emitters);
        let tau = T::of(2.0) / (r * n * (gamma_down - gamma_up).abs());
        let half = theta0 * T::of(0.5);
        let t_d = tau * (half.cos() / half.sin()).ln();
        Ok(Self {
            omega0,
            n_emitters,
            gamma_up,
            gamma_down,
            r,
            theta0,
            phi0,
            tau,
            t_d,
            branch,
        })
    }

    /// γ_down − γ_up.
    pub fn gamma_eff(&self) -> T {
        self.gamma_down - self.gamma_up
    }

    /// I₀ = (N/2)²·r·|γ_eff|·ω₀.
    pub fn peak_intensity(&self) -> T {
        let half_n = T::of_usize(self.n_emitters) * T::of(0.5);
        half_n * half_n * self.r * self.gamma_eff().abs() * self.omega0
    }

    /// ∫ I dt over the whole line, 2τ·I₀ = N·ω₀.
    pub fn pulse_area(&self) -> T {
        T::of(2.0) * self.tau * self.peak_intensity()
    }

    /// Full width at half maximum, 2τ·arccosh(√2).
    pub fn fwhm(&self) -> T {
        T::of(2.0) * self.tau * T::SQRT_2().acosh()
    }
}

/// Mean-field parameters for a thermal ignition state at temperature `t_c`.
///
/// n_z = tanh(ω₀/(2T_c)) and r = |n_z|. For absorption θ₀ = arccos(n_z); for
/// emission θ₀ = arccos(−n_z) is measured from the inverted pole, so an
/// inverted state (T_c < 0) gives a small angle and a long delay. φ₀ = 0.
pub fn derive_params<T: Real>(
    n_emitters: usize,
    omega0: T,
    t_c: T,
    gamma_up: T,
    gamma_down: T,
    branch: Branch,
) -> Result<MeanFieldParams<T>> {
    if t_c.is_zero() || !t_c.is_finite() {
        return Err(Error::invalid("temperature", "must be finite and non-zero"));
    }
    if !(omega0 > T::zero()) || !omega0.is_finite() {
        return Err(Error::invalid("omega0", "must be positive and finite"));
    }
    let n_z = (omega0 / (T::of(2.0) * t_c)).tanh();
    let r = n_z.abs();
    let theta0 = match branch {
        Branch::Absorption => n_z.acos(),
        Branch::Emission => (-n_z).acos(),
    };
    MeanFieldParams::from_angle(n_emitters, omega0, gamma_up, gamma_down, r, theta0, T::zero(), branch)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochSample<T> {
    pub t: T,
    pub sx: T,
    pub sy: T,
    pub sz: T,
}

impl<T: Real> BlochSample<T> {
    pub fn norm_sqr(&self) -> T {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }

    /// ½(I + s·σ) in the (|↓⟩, |↑⟩) ordering used by the Dicke basis.
    pub fn density_matrix(&self) -> CMatrix<T> {
        let half = T::of(0.5);
        let c = |re: T, im: T| Complex::new(re, im);
        CMatrix::from_row_major(
            2,
            vec![
                c(half * (T::one() - self.sz), T::zero()),
                c(half * self.sx, half * self.sy),
                c(half * self.sx, -half * self.sy),
                c(half * (T::one() + self.sz), T::zero()),
            ],
        )
        .expect("2×2 data")
    }
}

/// sx = r·sech(u)·cos(φ₀+ω₀t), sy = r·sech(u)·sin(φ₀+ω₀t), sz = s·r·tanh(u),
/// u = (t − t_d)/τ.
pub fn bloch_trajectory<T: Real>(params: &MeanFieldParams<T>, t: T) -> BlochSample<T> {
    let u = (t - params.t_d) / params.tau;
    let transverse = params.r * sech(u);
    let phase = params.phi0 + params.omega0 * t;
    BlochSample {
        t,
        sx: transverse * phase.cos(),
        sy: transverse * phase.sin(),
        sz: params.branch.sz_sign::<T>() * params.r * u.tanh(),
    }
}

/// Pulse power with a positive sign; `branch` tells whether it flows out
/// (emission) or in (absorption).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseIntensity<T> {
    pub value: T,
    pub branch: Branch,
}

/// I(t) = (N/2)²·r·|γ_down − γ_up|·ω₀·sech²((t − t_d)/τ).
pub fn intensity<T: Real>(params: &MeanFieldParams<T>, t: T) -> PulseIntensity<T> {
    let s = sech((t - params.t_d) / params.tau);
    PulseIntensity {
        value: params.peak_intensity() * s * s,
        branch: params.branch,
    }
}

fn pauli<T: Real>() -> [CMatrix<T>; 3] {
    let (o, l, i) = (
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::one(), T::zero()),
        Complex::new(T::zero(), T::one()),
    );
    [
        CMatrix::from_row_major(2, vec![o, l, l, o]).expect("2×2"),
        CMatrix::from_row_major(2, vec![o, i, -i, o]).expect("2×2"),
        CMatrix::from_row_major(2, vec![-l, o, o, l]).expect("2×2"),
    ]
}

/// H = (ω₀/2)σ_z + κ(⟨σ_x⟩σ_y − ⟨σ_y⟩σ_x) with κ = (N/4)(γ_down − γ_up).
///
/// κ is the coupling for which the closed-form trajectories solve
/// dρ/dt = −i[H,ρ] when each rate multiplies a single D[c] dissipator.
pub fn h_mf<T: Real>(params: &MeanFieldParams<T>, sample: &BlochSample<T>) -> CMatrix<T> {
    let [sx, sy, sz] = pauli::<T>();
    let kappa = T::of_usize(params.n_emitters) * T::of(0.25) * params.gamma_eff();
    let mut h = sz.scale_real(params.omega0 * T::of(0.5));
    h.axpy(kappa * sample.sx, &sy);
    h.axpy(-kappa * sample.sy, &sx);
    h
}

/// Largest finite-difference step allowed, as a fraction of the fastest time scale.
pub const MF_RESIDUAL_MAX_STEP: f64 = 0.05;

/// Max over `t_grid` of ‖dρ/dt − (−i[H_MF,ρ])‖_max relative to (N/2)|γ_eff|·r.
///
/// dρ/dt is a central difference with step equal to the smallest spacing of
/// `t_grid`, so the residual falls off quadratically with grid refinement.
pub fn mf_residual<T: Real>(params: &MeanFieldParams<T>, t_grid: &[T]) -> Result<T> {
    if t_grid.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: t_grid.len(),
        });
    }
    let mut h = T::infinity();
    for (i, w) in t_grid.windows(2).enumerate() {
        let d = w[1] - w[0];
        if !(d > T::zero()) {
            return Err(Error::NonMonotoneTimes { index: i + 1 });
        }
        h = h.min(d);
    }
    let fastest = params.tau.recip().max(params.omega0);
    let limit = T::of(MF_RESIDUAL_MAX_STEP);
    if h * fastest > limit {
        return Err(Error::GridTooCoarse {
            spacing: h.to_f64_lossy(),
            limit: (limit / fastest).to_f64_lossy(),
        });
    }

    let scale = T::of_usize(params.n_emitters) * T::of(0.5) * params.gamma_eff().abs() * params.r;
    let minus_i = Complex::new(T::zero(), -T::one());
    let inv_2h = (T::of(2.0) * h).recip();
    let mut worst = T::zero();
    for &t in t_grid {
        let plus = bloch_trajectory(params, t + h).density_matrix();
        let minus = bloch_trajectory(params, t - h).density_matrix();
        let mut fd = &plus - &minus;
        fd = fd.scale_real(inv_2h);
        let s = bloch_trajectory(params, t);
        let rhs = h_mf(params, &s).commutator(&s.density_matrix()).scale(minus_i);
        worst = worst.max((&fd - &rhs).max_abs());
    }
    Ok(worst / scale)
}

pub const PULSE_CSV_HEADER: &str = "t,intensity,sx,sy,sz";

/// Writes `t,intensity,sx,sy,sz` rows for each time in `times`.
pub fn write_pulse_csv<T: Real, W: Write>(params: &MeanFieldParams<T>, times: &[T], mut w: W) -> io::Result<()> {
    use crate::lindblad::fmt12;
    writeln!(w, "{PULSE_CSV_HEADER}")?;
    for &t in times {
        let b = bloch_trajectory(params, t);
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt12(t),
            fmt12(intensity(params, t).value),
            fmt12(b.sx),
            fmt12(b.sy),
            fmt12(b.sz)
        )?;
    }
    Ok(())
}

/// `n` equally spaced times covering t_d ± `half_widths`·τ, clipped at `t_min`.
pub fn pulse_grid<T: Real>(params: &MeanFieldParams<T>, half_widths: T, n: usize, t_min: T) -> Vec<T> {
    let a = (params.t_d - half_widths * params.tau).max(t_min);
    let b = params.t_d + half_widths * params.tau;
    let steps = T::of_usize(n.max(2) - 1);
    (0..n.max(2)).map(|k| a + (b - a) * T::of_usize(k) / steps).collect()
}
