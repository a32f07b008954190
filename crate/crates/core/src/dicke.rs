//! Collective-spin algebra on the symmetric (J = N/2) Dicke subspace.
//!
//! Basis vectors |J,m⟩ are ordered by ascending m, so index `i` carries
//! `m = i − J` and the raising operator J₊ occupies the first sub-diagonal.

use std::fmt::Write as _;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Symmetric subspace of `n_emitters` spin-½ systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DickeBasis {
    n_emitters: usize,
}

impl DickeBasis {
    pub fn new(n_emitters: usize) -> Result<Self> {
        if n_emitters == 0 {
            return Err(Error::invalid("n_emitters", "must be at least 1"));
        }
        Ok(Self { n_emitters })
    }

    #[inline]
    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n_emitters + 1
    }

    /// Total angular momentum J = N/2.
    pub fn j<T: Real>(&self) -> T {
        T::of_usize(self.n_emitters) * T::of(0.5)
    }

    /// Magnetic quantum number of basis index `i`.
    pub fn m<T: Real>(&self, i: usize) -> T {
        T::of_usize(i) - self.j::<T>()
    }

    /// m = −J, −J+1, …, +J.
    pub fn m_values<T: Real>(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.m(i)).collect()
    }
}

/// Matrix acting on a Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T> {
    basis: DickeBasis,
    elements: CMatrix<T>,
    label: String,
}

impl<T: Real> Operator<T> {
    pub fn new(basis: DickeBasis, elements: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if elements.dim() != basis.dim() {
            return Err(Error::invalid(
                "elements",
                format!(
                    "{0}x{0} matrix for a basis of dimension {1}",
                    elements.dim(),
                    basis.dim()
                ),
            ));
        }
        Ok(Self {
            basis,
            elements,
            label: label.into(),
        })
    }

    pub fn basis(&self) -> DickeBasis {
        self.basis
    }

    pub fn elements(&self) -> &CMatrix<T> {
        &self.elements
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            elements: self.elements.adjoint(),
            label: format!("{}†", self.label),
        }
    }

    /// Operator product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        check_basis(self.basis, rhs.basis)?;
        Ok(Self {
            basis: self.basis,
            elements: self.elements.matmul(&rhs.elements),
            label: format!("{}{}", self.label, rhs.label),
        })
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.elements.hermiticity_defect() <= tol
    }

    /// Row-major "re,im" dump, one matrix row per line.
    pub fn to_csv_dump(&self) -> String {
        csv_dump(&self.elements)
    }

    pub fn to_dump(&self) -> MatrixDump {
        MatrixDump::new(Some(self.label.clone()), self.basis, &self.elements)
    }
}

fn check_basis(a: DickeBasis, b: DickeBasis) -> Result<()> {
    if a != b {
        return Err(Error::BasisMismatch {
            left: a.n_emitters,
            right: b.n_emitters,
        });
    }
    Ok(())
}

/// J_x, J_y, J_z, J₊, J₋ on one basis.
#[derive(Debug, Clone)]
pub struct CollectiveOperators<T> {
    pub jx: Operator<T>,
    pub jy: Operator<T>,
    pub jz: Operator<T>,
    pub jp: Operator<T>,
    pub jm: Operator<T>,
}

pub fn build_collective_operators<T: Real>(basis: DickeBasis) -> CollectiveOperators<T> {
    let d = basis.dim();
    let j: T = basis.j();
    let jz = CMatrix::from_real_diag(&basis.m_values::<T>());

    let mut jp = CMatrix::zeros(d);
    for i in 0..d - 1 {
        let m: T = basis.m(i);
        let amp = (j * (j + T::one()) - m * (m + T::one())).max(T::zero()).sqrt();
        jp[(i + 1, i)] = Complex::new(amp, T::zero());
    }
    let jm = jp.adjoint();

    let half = T::of(0.5);
    let jx = (&jp + &jm).scale_real(half);
    // (J₊ − J₋)/(2i) = −i/2 · (J₊ − J₋)
    let jy = (&jp - &jm).scale(Complex::new(T::zero(), -half));

    let op = |m: CMatrix<T>, label: &str| Operator {
        basis,
        elements: m,
        label: label.to_owned(),
    };
    CollectiveOperators {
        jx: op(jx, "Jx"),
        jy: op(jy, "Jy"),
        jz: op(jz, "Jz"),
        jp: op(jp, "J+"),
        jm: op(jm, "J-"),
    }
}

/// H = ω₀ J_z.
pub fn build_hamiltonian<T: Real>(basis: DickeBasis, omega0: T) -> Result<Operator<T>> {
    check_omega0(omega0)?;
    let diag: Vec<T> = basis.m_values::<T>().into_iter().map(|m| omega0 * m).collect();
    Ok(Operator {
        basis,
        elements: CMatrix::from_real_diag(&diag),
        label: "H".to_owned(),
    })
}

fn check_omega0<T: Real>(omega0: T) -> Result<()> {
    if !(omega0 > T::zero()) || !omega0.is_finite() {
        return Err(Error::invalid(
            "omega0",
            format!("must be positive and finite, got {omega0}"),
        ));
    }
    Ok(())
}

/// Density matrix on a Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    basis: DickeBasis,
    elements: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e−12), unit trace (1e−10) and eigenvalues ≥ −1e−9.
    pub fn new(basis: DickeBasis, elements: CMatrix<T>) -> Result<Self> {
        if elements.dim() != basis.dim() {
            return Err(Error::InvalidState(format!(
                "{0}x{0} matrix for a basis of dimension {1}",
                elements.dim(),
                basis.dim()
            )));
        }
        let herm = elements.hermiticity_defect();
        if herm > T::tol(1e-12) {
            return Err(Error::InvalidState(format!("Hermiticity defect {herm:e}")));
        }
        let tr = elements.trace();
        if (tr - Complex::new(T::one(), T::zero())).norm() > T::tol(1e-10) {
            return Err(Error::InvalidState(format!("trace {} + {}i", tr.re, tr.im)));
        }
        if !elements.eigenvalues_at_least(-T::tol(1e-9)) {
            return Err(Error::InvalidState("negative eigenvalue below −1e−9".to_owned()));
        }
        Ok(Self { basis, elements })
    }

    pub(crate) fn new_unchecked(basis: DickeBasis, elements: CMatrix<T>) -> Self {
        debug_assert_eq!(basis.dim(), elements.dim());
        Self { basis, elements }
    }

    /// Projector onto |J, m_index − J⟩.
    pub fn dicke_state(basis: DickeBasis, m_index: usize) -> Result<Self> {
        if m_index >= basis.dim() {
            return Err(Error::invalid(
                "m_index",
                format!("{m_index} outside 0..{}", basis.dim()),
            ));
        }
        let mut m = CMatrix::zeros(basis.dim());
        m[(m_index, m_index)] = Complex::new(T::one(), T::zero());
        Ok(Self::new_unchecked(basis, m))
    }

    /// |J, −J⟩: all emitters in the ground state.
    pub fn ground(basis: DickeBasis) -> Self {
        Self::dicke_state(basis, 0).expect("index 0 always valid")
    }

    /// |J, +J⟩: fully inverted.
    pub fn fully_inverted(basis: DickeBasis) -> Self {
        Self::dicke_state(basis, basis.dim() - 1).expect("top index always valid")
    }

    /// |ψ⟩⟨ψ| from (unnormalized) amplitudes over the ascending-m basis.
    pub fn pure(basis: DickeBasis, amplitudes: &[Complex<T>]) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::invalid(
                "amplitudes",
                format!("{} amplitudes for dimension {}", amplitudes.len(), basis.dim()),
            ));
        }
        let norm2: T = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm2 > T::zero()) {
            return Err(Error::invalid("amplitudes", "zero vector"));
        }
        let m = CMatrix::from_fn(basis.dim(), |i, j| amplitudes[i] * amplitudes[j].conj() / norm2);
        Ok(Self::new_unchecked(basis, m))
    }

    /// Identity / (N+1).
    pub fn maximally_mixed(basis: DickeBasis) -> Self {
        let d = basis.dim();
        let p = T::one() / T::of_usize(d);
        Self::new_unchecked(basis, CMatrix::from_real_diag(&vec![p; d]))
    }

    pub fn basis(&self) -> DickeBasis {
        self.basis
    }

    pub fn elements(&self) -> &CMatrix<T> {
        &self.elements
    }

    pub fn into_elements(self) -> CMatrix<T> {
        self.elements
    }

    /// Diagonal populations p_m in ascending-m order.
    pub fn populations(&self) -> Vec<T> {
        self.elements.diagonal().into_iter().map(|z| z.re).collect()
    }

    /// Largest element-wise difference to another state.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (&self.elements - &other.elements).max_abs()
    }

    pub fn to_csv_dump(&self) -> String {
        csv_dump(&self.elements)
    }

    pub fn to_dump(&self) -> MatrixDump {
        MatrixDump::new(None, self.basis, &self.elements)
    }
}

/// Gibbs state ρ ∝ Σ_m e^{−ω₀m/T} |J,m⟩⟨J,m| restricted to the symmetric subspace.
///
/// Negative temperatures give inverted populations. Weights are formed in log
/// space with the maximum subtracted, so large |ω₀J/T| cannot overflow.
pub fn thermal_state<T: Real>(basis: DickeBasis, omega0: T, temperature: T) -> Result<DensityMatrix<T>> {
    check_omega0(omega0)?;
    if temperature.is_zero() || !temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            "must be finite and non-zero; use DensityMatrix::ground or ::fully_inverted for T = 0",
        ));
    }
    let log_w: Vec<T> = basis
        .m_values::<T>()
        .into_iter()
        .map(|m| -omega0 * m / temperature)
        .collect();
    let max = log_w.iter().copied().fold(T::neg_infinity(), T::max);
    let w: Vec<T> = log_w.iter().map(|&l| (l - max).exp()).collect();
    let z: T = w.iter().copied().sum();
    let p: Vec<T> = w.into_iter().map(|x| x / z).collect();
    Ok(DensityMatrix::new_unchecked(basis, CMatrix::from_real_diag(&p)))
}

/// Tr(op · ρ).
pub fn expectation<T: Real>(op: &Operator<T>, rho: &DensityMatrix<T>) -> Result<Complex<T>> {
    check_basis(op.basis, rho.basis)?;
    let d = op.basis.dim();
    let a = &op.elements;
    let r = &rho.elements;
    let mut acc = Complex::zero();
    for i in 0..d {
        for k in 0..d {
            acc = acc + a[(i, k)] * r[(k, i)];
        }
    }
    Ok(acc)
}

/// Serializable snapshot of a matrix; not a stable interchange format.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixDump {
    pub label: Option<String>,
    pub n_emitters: usize,
    pub dim: usize,
    /// Row-major `[re, im]` pairs.
    pub data: Vec<[f64; 2]>,
}

impl MatrixDump {
    fn new<T: Real>(label: Option<String>, basis: DickeBasis, m: &CMatrix<T>) -> Self {
        Self {
            label,
            n_emitters: basis.n_emitters(),
            dim: m.dim(),
            data: m
                .as_slice()
                .iter()
                .map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                .collect(),
        }
    }
}

fn csv_dump<T: Real>(m: &CMatrix<T>) -> String {
    let mut s = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| format!("{:.11e},{:.11e}", z.re.to_f64_lossy(), z.im.to_f64_lossy()))
            .collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}
