//! Dense square complex matrices plus a coordinate-format sparse companion.
//!
//! Dimensions here are at most a few hundred (N+1 for the Dicke subspace), so
//! dense storage is fine for states. Collective operators are banded, and the
//! sparse form lets the Lindblad generator run in O(nnz·d) instead of O(d³).

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds from row-major data; `None` if the length is not a square.
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Option<Self> {
        (data.len() == dim * dim).then_some(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex<T>] {
        let d = self.dim;
        &mut self.data[i * d..(i + 1) * d]
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|z| *z = Complex::zero());
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s · other`
    pub fn axpy(&mut self, s: T, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let orow = &mut out.data[i * d..(i + 1) * d];
                let brow = &other.data[k * d..(k + 1) * d];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest element-wise modulus of `self − self†`.
    pub fn hermiticity_defect(&self) -> T {
        let d = self.dim;
        let mut worst = T::zero();
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Replaces `self` by `(self + self†)/2`.
    pub fn hermitize(&mut self) {
        let d = self.dim;
        let half = T::of(0.5);
        for i in 0..d {
            let ii = i * d + i;
            self.data[ii] = Complex::new(self.data[ii].re, T::zero());
            for j in (i + 1)..d {
                let a = self.data[i * d + j];
                let b = self.data[j * d + i];
                let avg = (a + b.conj()) * half;
                self.data[i * d + j] = avg;
                self.data[j * d + i] = avg.conj();
            }
        }
    }

    /// Whether every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let d = self.dim;
        self.data
            .iter()
            .enumerate()
            .all(|(idx, z)| idx / d == idx % d || z.is_zero())
    }

    /// Tests that every eigenvalue of the Hermitian part is `≥ floor`.
    ///
    /// Uses an LDL†-style Cholesky attempt on `A − floor·I`: the factorization
    /// succeeds with non-negative pivots iff the shifted matrix is positive
    /// semidefinite. Exactly diagonal inputs skip the factorization.
    pub fn eigenvalues_at_least(&self, floor: T) -> bool {
        let d = self.dim;
        if self.is_diagonal() {
            return (0..d).all(|i| self[(i, i)].re >= floor);
        }
        let mut a = self.clone();
        a.hermitize();
        for i in 0..d {
            a[(i, i)] = a[(i, i)] - Complex::new(floor, T::zero());
        }
        // Pivots at or below this are treated as zero eigen-directions.
        let tiny = T::epsilon() * T::of_usize(d.max(1)) * self.max_abs().max(T::one());
        let mut l = Self::zeros(d);
        for j in 0..d {
            let mut diag = a[(j, j)].re;
            for k in 0..j {
                diag = diag - l[(j, k)].norm_sqr();
            }
            if diag < -tiny {
                return false;
            }
            if diag <= tiny {
                // Semidefinite direction: the rest of the column must vanish.
                for i in (j + 1)..d {
                    let mut s = a[(i, j)];
                    for k in 0..j {
                        s = s - l[(i, k)] * l[(j, k)].conj();
                    }
                    if s.norm() > tiny.sqrt() {
                        return false;
                    }
                }
                continue;
            }
            let ljj = diag.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in (j + 1)..d {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        true
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&a| -a).collect(),
        }
    }
}

impl<T: Real> AddAssign<&CMatrix<T>> for CMatrix<T> {
    fn add_assign(&mut self, rhs: &CMatrix<T>) {
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + b;
        }
    }
}

impl<T: Real> SubAssign<&CMatrix<T>> for CMatrix<T> {
    fn sub_assign(&mut self, rhs: &CMatrix<T>) {
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - b;
        }
    }
}

/// Coordinate-format sparse square matrix (exact zeros dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn from_dense(m: &CMatrix<T>) -> Self {
        let d = m.dim();
        let mut entries = Vec::new();
        for i in 0..d {
            for j in 0..d {
                let v = m[(i, j)];
                if !v.is_zero() {
                    entries.push((i, j, v));
                }
            }
        }
        Self { dim: d, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries.iter().all(|&(i, j, _)| i == j)
    }

    /// Dense diagonal (zeros where no entry is stored).
    pub fn diagonal(&self) -> Vec<Complex<T>> {
        let mut diag = vec![Complex::zero(); self.dim];
        for &(i, j, v) in &self.entries {
            if i == j {
                diag[i] = diag[i] + v;
            }
        }
        diag
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect(),
        }
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = m[(i, j)] + v;
        }
        m
    }

    /// `out += s · (self · a)`
    pub fn left_mul_acc(&self, a: &CMatrix<T>, s: Complex<T>, out: &mut CMatrix<T>) {
        let d = self.dim;
        for &(i, k, v) in &self.entries {
            let coeff = v * s;
            let (src, dst) = (k * d, i * d);
            for col in 0..d {
                let x = a.data[src + col];
                out.data[dst + col] = out.data[dst + col] + coeff * x;
            }
        }
    }

    /// `out += s · (a · self)`
    pub fn right_mul_acc(&self, a: &CMatrix<T>, s: Complex<T>, out: &mut CMatrix<T>) {
        let d = self.dim;
        for row in 0..d {
            let base = row * d;
            for &(k, j, v) in &self.entries {
                out.data[base + j] = out.data[base + j] + a.data[base + k] * v * s;
            }
        }
    }

    /// `out += s · (a · self†)`
    pub fn right_mul_adjoint_acc(&self, a: &CMatrix<T>, s: T, out: &mut CMatrix<T>) {
        let d = self.dim;
        for row in 0..d {
            let base = row * d;
            for &(j, l, v) in &self.entries {
                // (a·c†)_{row,j} = Σ_l a_{row,l} conj(c_{j,l})
                out.data[base + j] = out.data[base + j] + a.data[base + l] * v.conj() * s;
            }
        }
    }

    /// `Tr(self · a)`
    pub fn trace_product(&self, a: &CMatrix<T>) -> Complex<T> {
        self.entries.iter().map(|&(i, k, v)| v * a[(k, i)]).sum()
    }

    /// Infinity-norm bound: largest absolute row sum.
    pub fn row_sum_bound(&self) -> T {
        let mut rows = vec![T::zero(); self.dim];
        for &(i, _, v) in &self.entries {
            rows[i] = rows[i] + v.norm();
        }
        rows.into_iter().fold(T::zero(), T::max)
    }
}
