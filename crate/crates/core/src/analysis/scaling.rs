use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::fmt12;
use crate::scalar::Real;

/// Power law peak ≈ e^a·N^b from a log-log regression.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit<T> {
    pub exponent: T,
    pub log_prefactor: T,
    pub r_squared: T,
    pub n_values: Vec<T>,
    pub peaks: Vec<T>,
}

impl<T: Real> ScalingFit<T> {
    pub fn predict(&self, n: T) -> T {
        (self.log_prefactor + self.exponent * n.ln()).exp()
    }

    /// `n,peak,fitted` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,peak,fitted")?;
        for (&n, &p) in self.n_values.iter().zip(&self.peaks) {
            writeln!(w, "{},{},{}", fmt12(n), fmt12(p), fmt12(self.predict(n)))?;
        }
        Ok(())
    }
}

/// Least-squares line through (ln N, ln peak).
pub fn scaling_exponent<T: Real>(n_values: &[T], peaks: &[T]) -> Result<ScalingFit<T>> {
    if n_values.len() != peaks.len() {
        return Err(Error::LengthMismatch {
            left: n_values.len(),
            right: peaks.len(),
        });
    }
    for (index, &v) in n_values.iter().enumerate() {
        if !(v > T::zero()) {
            return Err(Error::invalid("n_values", format!("entry {index} is not positive")));
        }
    }
    for (index, &v) in peaks.iter().enumerate() {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::NonPositivePeak {
                index,
                value: v.to_f64_lossy(),
            });
        }
    }
    let mut distinct: Vec<T> = n_values.to_vec();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewSamples {
            needed: 3,
            got: distinct.len(),
        });
    }
    let x: Vec<T> = n_values.iter().map(|v| v.ln()).collect();
    let y: Vec<T> = peaks.iter().map(|v| v.ln()).collect();
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let sxx: T = x.iter().map(|&a| (a - mx) * (a - mx)).sum();
    let sxy: T = x.iter().zip(&y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let syy: T = y.iter().map(|&b| (b - my) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: T = x.iter().zip(&y).map(|(&xi, &yi)| (yi - a - b * xi).powi(2)).sum();
    let r2 = if syy > T::zero() {
        T::one() - ss_res / syy
    } else {
        T::one()
    };
    Ok(ScalingFit {
        exponent: b,
        log_prefactor: a,
        r_squared: r2.max(T::zero()).min(T::one()),
        n_values: n_values.to_vec(),
        peaks: peaks.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_laws() {
        let n = [50.0, 100.0, 200.0, 400.0];
        let quad: Vec<f64> = n.iter().map(|v| 0.3 * v * v).collect();
        let f = scaling_exponent(&n, &quad).unwrap();
        assert_abs_diff_eq!(f.exponent, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.r_squared, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.predict(80.0), 0.3 * 6400.0, epsilon = 1e-8);
        let lin: Vec<f64> = n.iter().map(|v| 7.0 * v).collect();
        assert_abs_diff_eq!(scaling_exponent(&n, &lin).unwrap().exponent, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            scaling_exponent(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0]),
            Err(Error::NonPositivePeak { index: 1, .. })
        ));
        assert!(matches!(
            scaling_exponent(&[1.0, 1.0, 2.0], &[1.0, 1.0, 2.0]),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
