use serde::Serialize;

use super::fit::{check_series, initial_guess, interior_argmax};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A sampled curve on strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve<T> {
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> Curve<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_series(&times, &values, 3)?;
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Linear interpolation, `None` outside the sampled range.
    pub fn at(&self, t: T) -> Option<T> {
        let (lo, hi) = (self.times[0], self.times[self.times.len() - 1]);
        if t < lo || t > hi {
            return None;
        }
        let j = self.times.partition_point(|&x| x < t);
        if j == 0 {
            return Some(self.values[0]);
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let f = (t - t0) / (t1 - t0);
        Some(self.values[j - 1] + (self.values[j] - self.values[j - 1]) * f)
    }

    /// Peak time and value refined by a parabola through the top three samples.
    pub fn refined_peak(&self) -> Result<(T, T)> {
        let k = interior_argmax(&self.values)?;
        let (t0, t1, t2) = (self.times[k - 1], self.times[k], self.times[k + 1]);
        let (y0, y1, y2) = (self.values[k - 1], self.values[k], self.values[k + 1]);
        // Vertex of the interpolating parabola in Newton form.
        let d01 = (y1 - y0) / (t1 - t0);
        let d12 = (y2 - y1) / (t2 - t1);
        let c = (d12 - d01) / (t2 - t0);
        if !(c < T::zero()) {
            return Ok((t1, y1));
        }
        let tv = (t0 + t1) * T::of(0.5) - d01 / (T::of(2.0) * c);
        let yv = y0 + d01 * (tv - t0) + c * (tv - t0) * (tv - t1);
        Ok((tv, yv))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveComparison<T> {
    /// |peak_exact − peak_mf| / peak_mf.
    pub peak_rel_err: T,
    /// Peak time of the exact curve minus that of the mean-field curve.
    pub t_d_offset: T,
    /// ‖exact − mf‖₂ / ‖mf‖₂ over t_d ± 3τ of the mean-field pulse.
    pub rel_l2: T,
}

/// Compares a mean-field pulse with an exact one.
///
/// The L2 window is t_d ± 3τ where t_d and τ come from the mean-field curve's
/// refined peak and half-maximum width. Both curves are evaluated on the
/// mean-field sample times inside the window and the overlap, with the exact
/// curve linearly interpolated.
pub fn compare_mf_exact<T: Real>(mf: &Curve<T>, exact: &Curve<T>) -> Result<CurveComparison<T>> {
    let lo = mf.times[0].max(exact.times[0]);
    let hi = mf.times[mf.times.len() - 1].min(exact.times[exact.times.len() - 1]);
    if !(lo < hi) {
        return Err(Error::DisjointRanges);
    }
    let (t_mf, p_mf) = mf.refined_peak()?;
    let (t_ex, p_ex) = exact.refined_peak()?;
    let (_, _, tau) = initial_guess(&mf.times, &mf.values)?;
    let a = lo.max(t_mf - T::of(3.0) * tau);
    let b = hi.min(t_mf + T::of(3.0) * tau);

    let mut grid: Vec<T> = vec![a];
    grid.extend(mf.times.iter().copied().filter(|&t| t > a && t < b));
    grid.push(b);
    let mut num = T::zero();
    let mut den = T::zero();
    let half = T::of(0.5);
    let mut prev: Option<(T, T, T)> = None;
    for &t in &grid {
        let m = mf.at(t).ok_or(Error::DisjointRanges)?;
        let e = exact.at(t).ok_or(Error::DisjointRanges)?;
        let d2 = (e - m) * (e - m);
        let m2 = m * m;
        if let Some((tp, dp, mp)) = prev {
            num = num + (t - tp) * (d2 + dp) * half;
            den = den + (t - tp) * (m2 + mp) * half;
        }
        prev = Some((t, d2, m2));
    }
    let rel_l2 = if den > T::zero() { (num / den).sqrt() } else { T::zero() };
    Ok(CurveComparison {
        peak_rel_err: (p_ex - p_mf).abs() / p_mf,
        t_d_offset: t_ex - t_mf,
        rel_l2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::sech;
    use approx::assert_abs_diff_eq;

    fn pulse(shift: f64) -> Curve<f64> {
        let t: Vec<f64> = (0..301).map(|k| k as f64 * 0.02 + shift).collect();
        let v = t.iter().map(|&x| 5.0 * sech((x - 3.0 - shift) / 0.7).powi(2)).collect();
        Curve::new(t, v).unwrap()
    }

    #[test]
    fn identical_curves_compare_to_zero() {
        let c = pulse(0.0);
        let r = compare_mf_exact(&c, &c).unwrap();
        assert_eq!((r.peak_rel_err, r.t_d_offset, r.rel_l2), (0.0, 0.0, 0.0));
    }

    #[test]
    fn shifted_curve_reports_offset() {
        let r = compare_mf_exact(&pulse(0.0), &pulse(0.25)).unwrap();
        assert_abs_diff_eq!(r.t_d_offset, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(r.peak_rel_err, 0.0, epsilon = 1e-12);
        assert!(r.rel_l2 > 0.1);
    }

    #[test]
    fn refined_peak_beats_grid() {
        let c = pulse(0.0);
        let (t, v) = c.refined_peak().unwrap();
        assert_abs_diff_eq!(t, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, 5.0, epsilon = 1e-12);
        let t: Vec<f64> = (0..100).map(|k| k as f64 * 0.037).collect();
        let v: Vec<f64> = t.iter().map(|&x| 5.0 * sech((x - 1.8) / 0.7).powi(2)).collect();
        let (tp, vp) = Curve::new(t, v).unwrap().refined_peak().unwrap();
        assert_abs_diff_eq!(tp, 1.8, epsilon = 2e-4);
        assert_abs_diff_eq!(vp, 5.0, epsilon = 2e-3);
    }

    #[test]
    fn disjoint_ranges() {
        let a = pulse(0.0);
        let b = pulse(100.0);
        assert!(matches!(compare_mf_exact(&a, &b), Err(Error::DisjointRanges)));
    }
}
