use std::io::{self, Write};

use serde::Serialize;

use crate::dicke::{CollectiveOperators, DensityMatrix, Operator};
use crate::linalg::{CMatrix, SparseMatrix};
use crate::scalar::Real;

/// Expectation values recorded at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSample<T> {
    pub jz: T,
    /// ⟨J₊J₋⟩, the emission intensity up to γ_down·ω₀.
    pub jpjm: T,
    /// ⟨J₋J₊⟩, the absorption intensity up to γ_pump·ω₀.
    pub jmjp: T,
    pub trace: T,
    /// ⟨H⟩ = ω₀⟨J_z⟩.
    pub energy: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationDiagnostics<T> {
    pub steps: usize,
    pub dt: T,
    /// Largest |Δ trace| / dt over a step, measured before renormalization.
    pub max_trace_drift_rate: T,
    /// Largest ‖ρ − ρ†‖_max after a step, measured before re-symmetrization.
    pub max_hermiticity_defect: T,
}

/// Sampled observables of one integration run.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub(crate) times: Vec<T>,
    pub(crate) samples: Vec<ObservableSample<T>>,
    pub(crate) states: Vec<DensityMatrix<T>>,
    pub(crate) final_state: DensityMatrix<T>,
    pub(crate) diagnostics: IntegrationDiagnostics<T>,
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,jz,jpjm,jmjp,trace,energy";

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn samples(&self) -> &[ObservableSample<T>] {
        &self.samples
    }

    /// States at the sample times, when the run stored them.
    pub fn states(&self) -> &[DensityMatrix<T>] {
        &self.states
    }

    pub fn final_state(&self) -> &DensityMatrix<T> {
        &self.final_state
    }

    pub fn diagnostics(&self) -> &IntegrationDiagnostics<T> {
        &self.diagnostics
    }

    pub fn jz(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.jz).collect()
    }

    pub fn jpjm(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.jpjm).collect()
    }

    pub fn jmjp(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.jmjp).collect()
    }

    pub fn energy(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    /// Appends `next`, dropping its first sample when it repeats our last time.
    pub fn append(&mut self, next: &Trajectory<T>) {
        let skip = match (self.times.last(), next.times.first()) {
            (Some(&a), Some(&b)) if b <= a => 1,
            _ => 0,
        };
        self.times.extend_from_slice(&next.times[skip..]);
        self.samples.extend_from_slice(&next.samples[skip..]);
        if !self.states.is_empty() || !next.states.is_empty() {
            self.states.extend(next.states.iter().skip(skip).cloned());
        }
        self.final_state = next.final_state.clone();
        let (a, b) = (&mut self.diagnostics, &next.diagnostics);
        a.steps += b.steps;
        a.dt = a.dt.min(b.dt);
        a.max_trace_drift_rate = a.max_trace_drift_rate.max(b.max_trace_drift_rate);
        a.max_hermiticity_defect = a.max_hermiticity_defect.max(b.max_hermiticity_defect);
    }

    /// Writes `t,jz,jpjm,jmjp,trace,energy` rows with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
        for (t, s) in self.times.iter().zip(&self.samples) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt12(*t),
                fmt12(s.jz),
                fmt12(s.jpjm),
                fmt12(s.jmjp),
                fmt12(s.trace),
                fmt12(s.energy)
            )?;
        }
        Ok(())
    }
}

/// Scientific notation with 12 significant digits.
pub fn fmt12<T: Real>(v: T) -> String {
    format!("{:.11e}", v.to_f64_lossy())
}

/// Sparse observables evaluated at every sample.
pub(crate) struct ObservableSet<T> {
    jz: SparseMatrix<T>,
    jpjm: SparseMatrix<T>,
    jmjp: SparseMatrix<T>,
    h: SparseMatrix<T>,
}

impl<T: Real> ObservableSet<T> {
    pub(crate) fn new(ops: &CollectiveOperators<T>, h: &Operator<T>) -> Self {
        let (jp, jm) = (ops.jp.elements(), ops.jm.elements());
        Self {
            jz: SparseMatrix::from_dense(ops.jz.elements()),
            jpjm: SparseMatrix::from_dense(&jp.matmul(jm)),
            jmjp: SparseMatrix::from_dense(&jm.matmul(jp)),
            h: SparseMatrix::from_dense(h.elements()),
        }
    }

    pub(crate) fn sample(&self, rho: &CMatrix<T>) -> ObservableSample<T> {
        ObservableSample {
            jz: self.jz.trace_product(rho).re,
            jpjm: self.jpjm.trace_product(rho).re,
            jmjp: self.jmjp.trace_product(rho).re,
            trace: rho.trace().re,
            energy: self.h.trace_product(rho).re,
        }
    }

    /// Same as [`sample`](Self::sample) for the diagonal state diag(p).
    pub(crate) fn sample_populations(&self, p: &[T]) -> ObservableSample<T> {
        let diag = |m: &SparseMatrix<T>| -> T {
            m.entries()
                .iter()
                .filter(|&&(i, k, _)| i == k)
                .map(|&(i, _, v)| v.re * p[i])
                .sum()
        };
        ObservableSample {
            jz: diag(&self.jz),
            jpjm: diag(&self.jpjm),
            jmjp: diag(&self.jmjp),
            trace: p.iter().copied().sum(),
            energy: diag(&self.h),
        }
    }

    pub(crate) fn jpjm_bound(&self) -> T {
        self.jpjm.row_sum_bound()
    }

    pub(crate) fn jmjp_bound(&self) -> T {
        self.jmjp.row_sum_bound()
    }
}
