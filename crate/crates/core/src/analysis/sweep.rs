use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cycle::{run_engine, CyclePlan};
use crate::error::{Error, Result};
use crate::lindblad::fmt12;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SweepAxis {
    #[serde(rename = "tau_switch")]
    TauSwitch,
    #[serde(rename = "stroke_duration")]
    StrokeDuration,
    #[serde(rename = "x")]
    X,
    #[serde(rename = "T_c")]
    TC,
    #[serde(rename = "N")]
    N,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::TauSwitch,
        SweepAxis::StrokeDuration,
        SweepAxis::X,
        SweepAxis::TC,
        SweepAxis::N,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TauSwitch => "tau_switch",
            SweepAxis::StrokeDuration => "stroke_duration",
            SweepAxis::X => "x",
            SweepAxis::TC => "T_c",
            SweepAxis::N => "N",
        }
    }

    /// `template` with this axis set to `value`.
    ///
    /// Along N, explicit stroke durations and step sizes are rescaled by
    /// N_template/N so pulses stay inside their windows.
    pub fn apply<T: Real>(self, template: &CyclePlan<T>, value: T) -> Result<CyclePlan<T>> {
        let mut p = template.clone();
        match self {
            SweepAxis::TauSwitch => p.tau_switch = Some(value),
            SweepAxis::StrokeDuration => p.stroke_duration = Some(value),
            SweepAxis::X => p.x = value,
            SweepAxis::TC => p.t_c = value,
            SweepAxis::N => {
                let n = value.round();
                if !(n >= T::one()) || (n - value).abs() > T::of(1e-9) {
                    return Err(Error::invalid(
                        "N",
                        format!("sweep value {value} is not a positive integer"),
                    ));
                }
                let n = n.to_usize().ok_or_else(|| Error::invalid("N", "out of range"))?;
                let ratio = T::of_usize(template.n_emitters) / T::of_usize(n);
                p.n_emitters = n;
                p.stroke_duration = p.stroke_duration.map(|d| d * ratio);
                p.dt = p.dt.map(|d| d * ratio);
            }
        }
        Ok(p)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::invalid(
                    "axis",
                    format!("unknown sweep axis `{s}`, expected one of tau_switch, stroke_duration, x, T_c, N"),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult<T> {
    pub axis: SweepAxis,
    pub grid: Vec<T>,
    /// Last-cycle η per point.
    pub eta: Vec<Option<T>>,
    pub power: Vec<Option<T>>,
    /// False where x·γ_down exceeds 0.1·ω₀.
    pub valid: Vec<bool>,
    pub errors: Vec<Option<String>>,
}

impl<T: Real> SweepResult<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the largest η when it is neither the first nor the last point.
    pub fn interior_eta_maximum(&self) -> Option<usize> {
        let (k, _) = self
            .eta
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|v| (i, v)))
            .fold(None, |best: Option<(usize, T)>, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })?;
        (k > 0 && k + 1 < self.len()).then_some(k)
    }

    /// `<axis>,eta,power,valid,error` rows; missing values are empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([self.axis.name(), "eta", "power", "valid", "error"])?;
        let opt = |v: Option<T>| v.map(fmt12).unwrap_or_default();
        for i in 0..self.len() {
            wtr.write_record([
                fmt12(self.grid[i]),
                opt(self.eta[i]),
                opt(self.power[i]),
                self.valid[i].to_string(),
                self.errors[i].clone().unwrap_or_default(),
            ])?;
        }
        wtr.flush()
    }
}

/// η, power, validity and error of one grid point.
type Point<T> = (Option<T>, Option<T>, bool, Option<String>);

/// Runs the engine at every grid value of `axis` in parallel.
///
/// A failing point records its error and leaves η and power empty; the rest of
/// the sweep continues. Results are in grid order.
pub fn sweep<T: Real>(template: &CyclePlan<T>, axis: SweepAxis, grid: &[T]) -> Result<SweepResult<T>> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "sweep grid is empty"));
    }
    let points: Vec<Point<T>> = grid
        .par_iter()
        .map(|&v| {
            let plan = match axis.apply(template, v) {
                Ok(p) => p,
                Err(e) => return (None, None, !template.outside_validity(), Some(e.to_string())),
            };
            let valid = !plan.outside_validity();
            match run_engine(&plan) {
                Ok(rep) => (rep.converged_eta, Some(rep.average_power), valid, None),
                Err(e) => (None, None, valid, Some(e.to_string())),
            }
        })
        .collect();
    let mut out = SweepResult {
        axis,
        grid: grid.to_vec(),
        eta: Vec::with_capacity(grid.len()),
        power: Vec::with_capacity(grid.len()),
        valid: Vec::with_capacity(grid.len()),
        errors: Vec::with_capacity(grid.len()),
    };
    for (eta, power, valid, err) in points {
        out.eta.push(eta);
        out.power.push(power);
        out.valid.push(valid);
        out.errors.push(err);
    }
    Ok(out)
}
