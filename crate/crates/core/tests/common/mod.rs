//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use superengine::dicke::{build_collective_operators, DickeBasis};
use superengine::linalg::CMatrix;

pub fn to_na(m: &CMatrix<f64>) -> DMatrix<Complex64> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |i, j| m[(i, j)])
}

/// Column-stacked vec(ρ).
pub fn vec_rho(m: &DMatrix<Complex64>) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &nalgebra::DVector<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(d, d, v.as_slice())
}

/// Dense superoperator of −i[H,·] + Σ γ D[c] acting on column-stacked ρ,
/// built from the Kronecker identities vec(AXB) = (Bᵀ ⊗ A) vec(X).
pub fn liouvillian(h: &DMatrix<Complex64>, channels: &[(DMatrix<Complex64>, f64)]) -> DMatrix<Complex64> {
    let d = h.nrows();
    let id = DMatrix::<Complex64>::identity(d, d);
    let i = Complex64::new(0.0, 1.0);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-i);
    for (c, g) in channels {
        let cd = c.adjoint();
        let cdc = &cd * c;
        let jump = c.conjugate().kronecker(c);
        let anti = id.kronecker(&cdc) + cdc.transpose().kronecker(&id);
        l += (jump - anti * Complex64::new(0.5, 0.0)) * Complex64::new(*g, 0.0);
    }
    l
}

/// Brute-force Gibbs populations from explicit Boltzmann weights over m = −J..J.
pub fn gibbs_populations(n: usize, omega0: f64, t: f64) -> Vec<f64> {
    let j = n as f64 / 2.0;
    let w: Vec<f64> = (0..=n).map(|k| (-(omega0 * (k as f64 - j)) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// Collective operators as nalgebra matrices: (Jx, Jy, Jz, J+, J-).
pub fn na_ops(n: usize) -> [DMatrix<Complex64>; 5] {
    let o = build_collective_operators::<f64>(DickeBasis::new(n).unwrap());
    [
        to_na(o.jx.elements()),
        to_na(o.jy.elements()),
        to_na(o.jz.elements()),
        to_na(o.jp.elements()),
        to_na(o.jm.elements()),
    ]
}
