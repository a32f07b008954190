use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{sech, Real};

/// Iteration cap for [`fit_sech2`].
pub const FIT_MAX_ITERATIONS: usize = 200;
/// Relative parameter change below which the fit is converged.
pub const FIT_RELATIVE_TOL: f64 = 1e-8;

/// I₀·sech²((t − t_d)/τ) fitted to samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseFit<T> {
    #[serde(rename = "I0")]
    pub i0: T,
    #[serde(rename = "t_d_fit")]
    pub t_d: T,
    #[serde(rename = "tau_fit")]
    pub tau: T,
    /// RMS residual relative to I₀.
    pub rms_residual: T,
    pub iterations: usize,
    /// False when the iteration cap was hit; the parameters are the best found.
    pub converged: bool,
}

impl<T: Real> PulseFit<T> {
    pub fn eval(&self, t: T) -> T {
        let s = sech((t - self.t_d) / self.tau);
        self.i0 * s * s
    }
}

pub(crate) fn check_series<T: Real>(times: &[T], values: &[T], needed: usize) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    if times.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: times.len(),
        });
    }
    if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonMonotoneTimes { index: i + 1 });
    }
    Ok(())
}

/// Index of the largest sample, required to be positive and not at either end.
pub(crate) fn interior_argmax<T: Real>(values: &[T]) -> Result<usize> {
    let (idx, &max) = values
        .iter()
        .enumerate()
        .fold((0, &values[0]), |best, (i, v)| if *v > *best.1 { (i, v) } else { best });
    if !(max > T::zero()) || idx == 0 || idx + 1 == values.len() {
        return Err(Error::NoInteriorMaximum);
    }
    Ok(idx)
}

/// Time where the linear interpolant first drops to `level` walking away from
/// `peak`, forward or backward in time.
fn half_crossing<T: Real>(times: &[T], values: &[T], peak: usize, level: T, forward: bool) -> Option<T> {
    let mut i = peak;
    loop {
        let j = if forward {
            if i + 1 >= values.len() {
                return None;
            }
            i + 1
        } else {
            if i == 0 {
                return None;
            }
            i - 1
        };
        if values[j] <= level {
            let f = (values[i] - level) / (values[i] - values[j]);
            return Some(times[i] + (times[j] - times[i]) * f);
        }
        i = j;
    }
}

/// Initial (I₀, t_d, τ) from the sample maximum and the half-maximum width.
pub(crate) fn initial_guess<T: Real>(times: &[T], values: &[T]) -> Result<(T, T, T)> {
    let k = interior_argmax(values)?;
    let i0 = values[k];
    let half = i0 * T::of(0.5);
    let left = half_crossing(times, values, k, half, false);
    let right = half_crossing(times, values, k, half, true);
    let fwhm = match (left, right) {
        (Some(l), Some(r)) => r - l,
        (Some(l), None) => T::of(2.0) * (times[k] - l),
        (None, Some(r)) => T::of(2.0) * (r - times[k]),
        (None, None) => times[times.len() - 1] - times[0],
    };
    let tau = fwhm / (T::of(2.0) * T::SQRT_2().acosh());
    Ok((i0, times[k], tau))
}

fn cost<T: Real>(times: &[T], values: &[T], p: [T; 3]) -> T {
    times
        .iter()
        .zip(values)
        .map(|(&t, &y)| {
            let s = sech((t - p[1]) / p[2]);
            let r = p[0] * s * s - y;
            r * r
        })
        .sum()
}

/// Solves the 3×3 system by Gaussian elimination with partial pivoting.
fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| {
            a[i][c]
                .abs()
                .partial_cmp(&a[j][c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(a[p][c].abs() > T::zero()) {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] = a[r][k] - f * a[c][k];
            }
            b[r] = b[r] - f * b[c];
        }
    }
    let mut x = [T::zero(); 3];
    for r in (0..3).rev() {
        let mut s = b[r];
        for k in r + 1..3 {
            s = s - a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Levenberg-Marquardt fit of I₀·sech²((t − t_d)/τ).
///
/// Starts from the sample maximum and FWHM/(2·arccosh√2). Converged when every
/// parameter moves by less than 1e−8 relative, or after 200 iterations with
/// `converged = false`.
pub fn fit_sech2<T: Real>(times: &[T], intensities: &[T]) -> Result<PulseFit<T>> {
    check_series(times, intensities, 10)?;
    let (i0, td, tau) = initial_guess(times, intensities)?;
    let mut p = [i0, td, tau];
    let mut c = cost(times, intensities, p);
    let mut lambda = T::of(1e-3);
    let tol = T::of(FIT_RELATIVE_TOL);
    let two = T::of(2.0);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for (&t, &y) in times.iter().zip(intensities) {
            let u = (t - p[1]) / p[2];
            let s = sech(u);
            let s2 = s * s;
            let th = u.tanh();
            let r = p[0] * s2 - y;
            let g = [s2, p[0] * two * s2 * th / p[2], p[0] * two * s2 * th * u / p[2]];
            for a in 0..3 {
                jtr[a] = jtr[a] + g[a] * r;
                for b in 0..3 {
                    jtj[a][b] = jtj[a][b] + g[a] * g[b];
                }
            }
        }
        let mut accepted = false;
        while lambda < T::of(1e12) {
            let mut m = jtj;
            for a in 0..3 {
                m[a][a] = m[a][a] * (T::one() + lambda);
            }
            let Some(delta) = solve3(m, [-jtr[0], -jtr[1], -jtr[2]]) else {
                lambda = lambda * T::of(10.0);
                continue;
            };
            let trial = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]];
            if !(trial[0] > T::zero() && trial[2] > T::zero()) {
                lambda = lambda * T::of(10.0);
                continue;
            }
            let tc = cost(times, intensities, trial);
            if tc <= c {
                let rel = (0..3)
                    .map(|k| {
                        (delta[k]
                            / trial[k]
                                .abs()
                                .max(if k == 1 { trial[2] } else { T::min_positive_value() }))
                        .abs()
                    })
                    .fold(T::zero(), T::max);
                p = trial;
                c = tc;
                lambda = (lambda / T::of(10.0)).max(T::of(1e-12));
                accepted = true;
                if rel < tol {
                    converged = true;
                }
                break;
            }
            lambda = lambda * T::of(10.0);
        }
        // No downhill step at any damping: already at the minimum to working precision.
        if !accepted {
            converged = true;
        }
        if converged {
            break;
        }
    }

    let n = T::of_usize(times.len());
    Ok(PulseFit {
        i0: p[0],
        t_d: p[1],
        tau: p[2],
        rms_residual: (c / n).sqrt() / p[0],
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synth(i0: f64, td: f64, tau: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n)
            .map(|k| td - 6.0 * tau + 12.0 * tau * k as f64 / (n - 1) as f64 + 0.013 * tau)
            .collect();
        let y = t.iter().map(|&x| i0 * sech((x - td) / tau).powi(2)).collect();
        (t, y)
    }

    #[test]
    fn recovers_exact_pulse() {
        let (t, y) = synth(171.36, 0.8754, 0.8754, 400);
        let f = fit_sech2(&t, &y).unwrap();
        assert!(f.converged);
        assert_relative_eq!(f.i0, 171.36, max_relative = 1e-6);
        assert_relative_eq!(f.t_d, 0.8754, max_relative = 1e-6);
        assert_relative_eq!(f.tau, 0.8754, max_relative = 1e-6);
        assert!(f.rms_residual < 1e-8);
    }

    #[test]
    fn recovers_from_distorted_start() {
        // Sparse sampling makes the FWHM guess poor.
        let (t, y) = synth(3.0, -2.0, 0.4, 12);
        let f = fit_sech2(&t, &y).unwrap();
        assert_relative_eq!(f.tau, 0.4, max_relative = 1e-6);
    }

    #[test]
    fn flat_input_has_no_interior_maximum() {
        let t: Vec<f64> = (0..20).map(f64::from).collect();
        assert!(matches!(fit_sech2(&t, &[0.0; 20]), Err(Error::NoInteriorMaximum)));
        let rising: Vec<f64> = t.clone();
        assert!(matches!(fit_sech2(&t, &rising), Err(Error::NoInteriorMaximum)));
    }

    #[test]
    fn too_few_samples() {
        let (t, y) = synth(1.0, 0.0, 1.0, 9);
        assert!(matches!(fit_sech2(&t, &y), Err(Error::TooFewSamples { .. })));
    }
}
