use num_complex::Complex;
use num_traits::Zero;

use crate::linalg::{CMatrix, SparseMatrix};
use crate::scalar::Real;

struct PreparedChannel<T> {
    c: SparseMatrix<T>,
    cdc: SparseMatrix<T>,
}

/// Rate-equation form of the generator on diagonal states.
///
/// Valid when H is diagonal and every collapse operator has at most one
/// non-zero per row and per column: then cρc† and {c†c, ρ} stay diagonal for
/// diagonal ρ, and the populations obey
/// dp_i/dt = Σ_j γ_j (Σ_k |c_ik|² p_k − (c†c)_ii p_i).
pub(crate) struct PopulationGenerator<T> {
    /// Per channel: (to, from, |c_to,from|²).
    transfers: Vec<Vec<(usize, usize, T)>>,
    /// Per channel: diag(c†c).
    loss: Vec<Vec<T>>,
}

impl<T: Real> PopulationGenerator<T> {
    pub(crate) fn apply(&self, p: &[T], rates: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|x| *x = T::zero());
        for ((gamma, moves), loss) in rates.iter().zip(&self.transfers).zip(&self.loss) {
            if gamma.is_zero() {
                continue;
            }
            for &(to, from, w) in moves {
                out[to] = out[to] + *gamma * w * p[from];
            }
            for (o, (&l, &pk)) in out.iter_mut().zip(loss.iter().zip(p)) {
                *o = *o - *gamma * l * pk;
            }
        }
    }
}

/// Diagonal of H and of every c†c.
type DiagonalForm<T> = (Vec<Complex<T>>, Vec<Vec<Complex<T>>>);

/// Lindblad generator ρ ↦ −i[H,ρ] + Σ γ_j D[c_j]ρ with pre-factored channels.
///
/// D[c]ρ = cρc† − ½{c†c, ρ}. When H and every c†c are diagonal (true for
/// H = ω₀J_z with J±, J_z channels) the commutator and anticommutator parts
/// collapse into a single element-wise pass.
pub(crate) struct Generator<T> {
    h: SparseMatrix<T>,
    channels: Vec<PreparedChannel<T>>,
    diagonal: Option<DiagonalForm<T>>,
}

impl<T: Real> Generator<T> {
    pub(crate) fn new(h: &CMatrix<T>, collapse: &[&CMatrix<T>]) -> Self {
        let h = SparseMatrix::from_dense(h);
        let channels: Vec<PreparedChannel<T>> = collapse
            .iter()
            .map(|&c| PreparedChannel {
                c: SparseMatrix::from_dense(c),
                cdc: SparseMatrix::from_dense(&c.adjoint().matmul(c)),
            })
            .collect();
        let diagonal = (h.is_diagonal() && channels.iter().all(|ch| ch.cdc.is_diagonal()))
            .then(|| (h.diagonal(), channels.iter().map(|ch| ch.cdc.diagonal()).collect()));
        Self { h, channels, diagonal }
    }

    /// The rate-equation form, when the generator preserves diagonal states.
    pub(crate) fn populations(&self) -> Option<PopulationGenerator<T>> {
        let (_, cdc_diags) = self.diagonal.as_ref()?;
        let d = self.dim();
        let mut transfers = Vec::with_capacity(self.channels.len());
        for ch in &self.channels {
            let (mut rows, mut cols) = (vec![false; d], vec![false; d]);
            let mut moves = Vec::with_capacity(ch.c.nnz());
            for &(i, k, v) in ch.c.entries() {
                if rows[i] || cols[k] {
                    return None;
                }
                rows[i] = true;
                cols[k] = true;
                moves.push((i, k, v.norm_sqr()));
            }
            transfers.push(moves);
        }
        let loss = cdc_diags.iter().map(|g| g.iter().map(|z| z.re).collect()).collect();
        Some(PopulationGenerator { transfers, loss })
    }

    pub(crate) fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Writes the generator applied to `rho` into `out`. `rates[j]` pairs with
    /// the j-th collapse operator; `scratch` is overwritten.
    pub(crate) fn apply(&self, rho: &CMatrix<T>, rates: &[T], out: &mut CMatrix<T>, scratch: &mut CMatrix<T>) {
        debug_assert_eq!(rates.len(), self.channels.len());
        let d = self.dim();
        let half = T::of(0.5);
        let i = Complex::new(T::zero(), T::one());
        out.fill_zero();

        match &self.diagonal {
            Some((h_diag, cdc_diags)) => {
                // out_ij = ρ_ij (a_i + b_j), a = −ih − ½G, b = ih − ½G, G = Σγ diag(c†c)
                let mut g = vec![Complex::<T>::zero(); d];
                for (gamma, cdc) in rates.iter().zip(cdc_diags) {
                    if gamma.is_zero() {
                        continue;
                    }
                    for (gk, &v) in g.iter_mut().zip(cdc) {
                        *gk = *gk + v * *gamma;
                    }
                }
                let a: Vec<Complex<T>> = (0..d).map(|k| -i * h_diag[k] - g[k] * half).collect();
                let b: Vec<Complex<T>> = (0..d).map(|k| i * h_diag[k] - g[k] * half).collect();
                for r in 0..d {
                    let src = rho.row(r);
                    let dst = out.row_mut(r);
                    let ar = a[r];
                    for c in 0..d {
                        dst[c] = src[c] * (ar + b[c]);
                    }
                }
            }
            None => {
                self.h.left_mul_acc(rho, -i, out);
                self.h.right_mul_acc(rho, i, out);
                for (gamma, ch) in rates.iter().zip(&self.channels) {
                    if gamma.is_zero() {
                        continue;
                    }
                    let s = Complex::new(-*gamma * half, T::zero());
                    ch.cdc.left_mul_acc(rho, s, out);
                    ch.cdc.right_mul_acc(rho, s, out);
                }
            }
        }

        let one = Complex::new(T::one(), T::zero());
        for (gamma, ch) in rates.iter().zip(&self.channels) {
            if gamma.is_zero() {
                continue;
            }
            scratch.fill_zero();
            ch.c.left_mul_acc(rho, one, scratch);
            ch.c.right_mul_adjoint_acc(scratch, *gamma, out);
        }
    }
}
