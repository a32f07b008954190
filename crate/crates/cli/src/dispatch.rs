//! Subcommand execution. Every artifact goes under the output directory;
//! JSON is pretty-printed with sorted keys.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use superengine::analysis::{compare_mf_exact, fit_sech2, scaling_exponent, sweep, Curve, SweepAxis};
use superengine::cycle::{run_engine, StrokeKind};
use superengine::lindblad::fmt12;
use superengine::mean_field::{intensity, write_pulse_csv, Branch};
use superengine::pulse::run_pulse;
use toml::Value;

use crate::cli::Command;
use crate::config::{parse_config, RunConfig};
use crate::error::{CliError, Result};

/// Trajectory columns followed by the pulse intensity.
pub const EXACT_CSV_HEADER: &str = "t,jz,jpjm,jmjp,trace,energy,intensity";

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub summary: Vec<String>,
}

pub fn dispatch(
    command: &Command,
    config: Option<&Path>,
    overrides: &[(String, Value)],
    out: &Path,
) -> Result<Outcome> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    match command {
        Command::Fit {
            input,
            time_column,
            column,
        } => run_fit(input, time_column, column, out),
        _ => {
            let cfg = parse_config(config, overrides)?;
            let mut o = Outcome {
                warnings: cfg.warnings(),
                ..Outcome::default()
            };
            o.files.push(write_text(out, "config.toml", &cfg.emit())?);
            match command {
                Command::Pulse => run_pulse_cmd(&cfg, out, &mut o)?,
                Command::Cycle => run_cycle_cmd(&cfg, out, &mut o)?,
                Command::Sweep => run_sweep_cmd(&cfg, out, &mut o)?,
                Command::Fit { .. } => unreachable!(),
            }
            Ok(o)
        }
    }
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Pretty JSON; keys come out sorted because `serde_json::Map` is ordered.
pub fn to_sorted_json<S: Serialize>(value: &S) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn write_json<S: Serialize>(dir: &Path, name: &str, value: &S) -> Result<PathBuf> {
    write_text(dir, name, &to_sorted_json(value)?)
}

fn write_with<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn run_pulse_cmd(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let spec = cfg.pulse_spec();
    if spec.branch == Branch::Absorption && !(spec.gamma_up > spec.gamma_down) {
        return Err(CliError::invalid(
            "gamma_up",
            "must exceed gamma_down for an absorption pulse",
        ));
    }
    let run = run_pulse(&spec)?;
    let times = run.trajectory.times();
    o.files.push(write_with(out, "exact.csv", |w| {
        writeln!(w, "{EXACT_CSV_HEADER}")?;
        for ((t, s), i) in times.iter().zip(run.trajectory.samples()).zip(&run.intensity) {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt12(*t),
                fmt12(s.jz),
                fmt12(s.jpjm),
                fmt12(s.jmjp),
                fmt12(s.trace),
                fmt12(s.energy),
                fmt12(*i)
            )?;
        }
        Ok(())
    })?);
    o.files.push(write_with(out, "mean_field.csv", |w| {
        write_pulse_csv(&run.params, times, w)
    })?);

    let mf: Vec<f64> = times.iter().map(|&t| intensity(&run.params, t).value).collect();
    let comparison = compare_mf_exact(
        &Curve::new(times.to_vec(), mf)?,
        &Curve::new(times.to_vec(), run.intensity.clone())?,
    )?;
    let fit = fit_sech2(times, &run.intensity);
    let report = serde_json::json!({
        "spec": spec,
        "mean_field": {
            "params": run.params,
            "peak_intensity": run.params.peak_intensity(),
            "pulse_area": run.params.pulse_area(),
            "fwhm": run.params.fwhm(),
        },
        "comparison": comparison,
        "fit": fit.as_ref().ok(),
        "fit_error": fit.as_ref().err().map(ToString::to_string),
        "diagnostics": run.trajectory.diagnostics(),
        "warnings": o.warnings,
    });
    o.files.push(write_json(out, "comparison.json", &report)?);
    o.summary.push(format!(
        "tau={:.6} t_d={:.6} peak_mf={:.6} peak_rel_err={:.4} rel_l2={:.4}",
        run.params.tau,
        run.params.t_d,
        run.params.peak_intensity(),
        comparison.peak_rel_err,
        comparison.rel_l2
    ));
    Ok(())
}

fn run_cycle_cmd(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let report = run_engine(&cfg.cycle_plan())?;
    o.files.push(write_json(out, "report.json", &report)?);
    for r in &report.records {
        for (kind, traj) in [
            (StrokeKind::Absorption, &r.absorption),
            (StrokeKind::Emission, &r.emission),
        ] {
            let name = format!("cycle{}_{}.csv", r.k, kind.tag());
            o.files.push(write_with(out, &name, |w| traj.write_csv(w))?);
        }
    }
    o.files.push(write_with(out, "cycles.csv", |w| {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["k", "W_pump", "W_em", "W_leak", "eta", "audit_residual", "state_change"])?;
        let opt = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
        for r in &report.records {
            wtr.write_record([
                r.k.to_string(),
                fmt12(r.work.w_pump),
                fmt12(r.work.w_em),
                fmt12(r.work.w_leak),
                opt(r.eta),
                fmt12(r.audit_residual),
                opt(r.state_change),
            ])?;
        }
        wtr.flush()
    })?);
    o.files.push(write_with(out, "intensity.csv", |w| {
        writeln!(w, "k,t,net_intensity")?;
        for r in &report.records {
            for (t, v) in r.net_intensity() {
                writeln!(w, "{},{},{}", r.k, fmt12(t), fmt12(v))?;
            }
        }
        Ok(())
    })?);
    o.warnings.extend(
        report
            .warnings
            .iter()
            .filter(|w| !o.warnings.contains(w))
            .cloned()
            .collect::<Vec<_>>(),
    );
    let etas: Vec<String> = report
        .etas()
        .iter()
        .map(|e| e.map_or_else(|| "-".to_string(), |v| format!("{v:.5}")))
        .collect();
    o.summary.push(format!("eta per cycle: {}", etas.join(" ")));
    o.summary.push(format!("average power: {:.6}", report.average_power));
    Ok(())
}

fn run_sweep_cmd(cfg: &RunConfig, out: &Path, o: &mut Outcome) -> Result<()> {
    let axis = cfg.sweep_axis()?;
    if cfg.sweep_grid.is_empty() {
        return Err(CliError::invalid("sweep_grid", "required for `sweep`"));
    }
    let result = sweep(&cfg.cycle_plan(), axis, &cfg.sweep_grid)?;
    o.files.push(write_json(out, "sweep.json", &result)?);
    o.files.push(write_with(out, "sweep.csv", |w| result.write_csv(w))?);
    if axis == SweepAxis::N {
        let (n, p): (Vec<f64>, Vec<f64>) = result
            .grid
            .iter()
            .zip(&result.power)
            .filter_map(|(&n, p)| p.map(|p| (n, p)))
            .unzip();
        match scaling_exponent(&n, &p) {
            Ok(fit) => {
                o.summary
                    .push(format!("power exponent: {:.4} (r²={:.6})", fit.exponent, fit.r_squared));
                o.files.push(write_json(out, "scaling.json", &fit)?);
                o.files.push(write_with(out, "scaling.csv", |w| fit.write_csv(w))?);
            }
            Err(e) => o.warnings.push(format!("no power-law fit: {e}")),
        }
    }
    match result.interior_eta_maximum() {
        Some(k) => o
            .summary
            .push(format!("interior eta maximum at {} = {}", axis, result.grid[k])),
        None => o.summary.push("no interior eta maximum on this grid".to_string()),
    }
    let failed = result.errors.iter().filter(|e| e.is_some()).count();
    if failed > 0 {
        o.warnings
            .push(format!("{failed} of {} sweep points failed", result.len()));
    }
    Ok(())
}

/// Reads two named numeric columns from a headed CSV.
pub fn read_columns(path: &Path, time_column: &str, column: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Input(format!("column `{name}` not found in {}", path.display())))
    };
    let (it, iv) = (find(time_column)?, find(column)?);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Input(format!("row {}: column {i} is not a number", row + 2)))
        };
        times.push(parse(it)?);
        values.push(parse(iv)?);
    }
    Ok((times, values))
}

fn run_fit(input: &Path, time_column: &str, column: &str, out: &Path) -> Result<Outcome> {
    let (t, v) = read_columns(input, time_column, column)?;
    let fit = fit_sech2(&t, &v)?;
    let mut o = Outcome::default();
    let report = serde_json::json!({
        "fit": fit,
        "input": input.display().to_string(),
        "column": column,
        "n_samples": t.len(),
    });
    o.files.push(write_json(out, "fit.json", &report)?);
    if !fit.converged {
        o.warnings.push(format!(
            "fit did not converge in {} iterations; best estimate reported",
            fit.iterations
        ));
    }
    o.summary
        .push(format!("I0={:.6} t_d={:.6} tau={:.6}", fit.i0, fit.t_d, fit.tau));
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
        }
        let s = to_sorted_json(&S { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }

    #[test]
    fn missing_column_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        fs::write(&p, "t,y\n0,1\n").unwrap();
        let err = read_columns(&p, "t", "intensity").unwrap_err();
        assert_eq!(err.kind(), "invalid_input");
    }
}
