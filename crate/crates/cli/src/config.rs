//! Run configuration in TOML.
//!
//! Keys are flat. `N`, `T` and `T_c` are accepted as aliases of
//! `n_emitters` and `temperature`; `--set key=value` overrides are applied on
//! top of the file before validation. Times are in units of 1/ω₀.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use superengine::analysis::SweepAxis;
use superengine::cycle::{CyclePlan, PumpShape, ThermalContact, VALIDITY_LIMIT};
use superengine::mean_field::Branch;
use superengine::pulse::PulseSpec;
use toml::{Table, Value};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const REQUIRED_FIELDS: [&str; 3] = ["n_emitters", "gamma_down", "temperature"];

const ALIASES: [(&str, &str); 3] = [("N", "n_emitters"), ("T", "temperature"), ("T_c", "temperature")];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchName {
    Emission,
    Absorption,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    Smooth,
    Hard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub n_emitters: usize,
    pub gamma_down: f64,
    /// Initial Gibbs temperature for `pulse`; cold-bath temperature T_c for
    /// `cycle` and `sweep`.
    pub temperature: f64,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    /// Constant pump rate of a `pulse` run.
    #[serde(default)]
    pub gamma_up: f64,
    /// Pulse branch; inferred from the sign of `temperature` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default = "default_x")]
    pub x: f64,
    #[serde(default = "default_cycles")]
    pub n_cycles: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stroke_duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_switch: Option<f64>,
    #[serde(default = "default_shape")]
    pub pump_shape: ShapeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_axis: Option<String>,
    #[serde(default)]
    pub sweep_grid: Vec<f64>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_omega0() -> f64 {
    1.0
}
fn default_stride() -> usize {
    1
}
fn default_x() -> f64 {
    3.5
}
fn default_cycles() -> usize {
    5
}
fn default_shape() -> ShapeName {
    ShapeName::Smooth
}

impl RunConfig {
    /// Required fields set, everything else at its default.
    pub fn new(n_emitters: usize, gamma_down: f64, temperature: f64) -> Self {
        let mut t = Table::new();
        t.insert("n_emitters".into(), Value::Integer(n_emitters as i64));
        t.insert("gamma_down".into(), Value::Float(gamma_down));
        t.insert("temperature".into(), Value::Float(temperature));
        t.try_into().expect("defaults deserialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.n_emitters == 0 {
            return Err(CliError::invalid("n_emitters", "must be at least 1"));
        }
        positive("gamma_down", self.gamma_down)?;
        positive("omega0", self.omega0)?;
        positive("x", self.x)?;
        if !self.temperature.is_finite() || self.temperature == 0.0 {
            return Err(CliError::invalid("temperature", "must be finite and non-zero"));
        }
        if !(self.gamma_up >= 0.0) || !self.gamma_up.is_finite() {
            return Err(CliError::invalid("gamma_up", "must be non-negative"));
        }
        for (name, v) in [
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("stroke_duration", self.stroke_duration),
            ("tau_switch", self.tau_switch),
            ("contact_duration", self.contact_duration),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        if self.sample_stride == 0 {
            return Err(CliError::invalid("sample_stride", "must be at least 1"));
        }
        if self.n_cycles == 0 {
            return Err(CliError::invalid("n_cycles", "must be at least 1"));
        }
        if let Some(axis) = &self.sweep_axis {
            SweepAxis::from_str(axis).map_err(|e| CliError::invalid("sweep_axis", e.to_string()))?;
        }
        if self.sweep_grid.iter().any(|v| !v.is_finite()) {
            return Err(CliError::invalid("sweep_grid", "values must be finite"));
        }
        Ok(())
    }

    /// Validity warnings; x·γ_down above 0.1·ω₀ leaves the mean-field regime.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.x * self.gamma_down > VALIDITY_LIMIT * self.omega0 {
            out.push(format!(
                "x·gamma_down = {:.4} exceeds {VALIDITY_LIMIT}·omega0; results are outside the validated regime",
                self.x * self.gamma_down
            ));
        }
        out
    }

    pub fn branch(&self) -> Branch {
        match self.branch {
            Some(BranchName::Emission) => Branch::Emission,
            Some(BranchName::Absorption) => Branch::Absorption,
            None if self.temperature < 0.0 => Branch::Emission,
            None => Branch::Absorption,
        }
    }

    pub fn pulse_spec(&self) -> PulseSpec<f64> {
        let mut spec = match self.branch() {
            Branch::Emission => PulseSpec::emission(self.n_emitters, self.omega0, self.temperature, self.gamma_down),
            Branch::Absorption => PulseSpec::absorption(
                self.n_emitters,
                self.omega0,
                self.temperature,
                self.gamma_up,
                self.gamma_down,
            ),
        };
        spec.gamma_up = self.gamma_up;
        spec.t_end = self.t_end;
        spec.dt = self.dt;
        spec.sample_stride = self.sample_stride;
        spec
    }

    pub fn cycle_plan(&self) -> CyclePlan<f64> {
        let mut p = CyclePlan::new(self.n_emitters, self.omega0, self.temperature, self.gamma_down, self.x);
        p.stroke_duration = self.stroke_duration;
        p.tau_switch = self.tau_switch;
        p.pump_shape = match self.pump_shape {
            ShapeName::Smooth => PumpShape::Smooth,
            ShapeName::Hard => PumpShape::Hard,
        };
        p.n_cycles = self.n_cycles;
        p.dt = self.dt;
        p.sample_stride = self.sample_stride;
        p.thermal_contact = self.contact_duration.map(|duration| ThermalContact { duration });
        p
    }

    pub fn sweep_axis(&self) -> Result<SweepAxis> {
        let name = self
            .sweep_axis
            .as_deref()
            .ok_or_else(|| CliError::invalid("sweep_axis", "required for `sweep`"))?;
        SweepAxis::from_str(name).map_err(|e| CliError::invalid("sweep_axis", e.to_string()))
    }

    /// TOML text that parses back to the same configuration.
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// Parses `key=value`; the value is read as a TOML literal, falling back to a
/// bare string.
pub fn parse_override(s: &str) -> Result<(String, Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| CliError::invalid(s, "override must have the form key=value"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::invalid(s, "override key is empty"));
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("single key"),
        Err(_) => Value::String(raw.to_string()),
    };
    Ok((key.to_string(), value))
}

fn canonicalize(table: &mut Table) -> Result<()> {
    for (alias, canon) in ALIASES {
        if let Some(v) = table.remove(alias) {
            if table.contains_key(canon) {
                return Err(CliError::invalid(alias, format!("given together with `{canon}`")));
            }
            table.insert(canon.to_string(), v);
        }
    }
    Ok(())
}

/// Builds a configuration from TOML text plus overrides.
pub fn parse_str(text: &str, origin: &str, overrides: &[(String, Value)]) -> Result<RunConfig> {
    let mut table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    canonicalize(&mut table)?;
    for (k, v) in overrides {
        let key = ALIASES.iter().find(|(a, _)| a == k).map_or(k.as_str(), |(_, c)| c);
        table.insert(key.to_string(), v.clone());
    }
    let missing: Vec<&'static str> = REQUIRED_FIELDS
        .into_iter()
        .filter(|f| !table.contains_key(*f))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::MissingFields(missing));
    }
    let cfg: RunConfig = table.try_into().map_err(|e: toml::de::Error| CliError::Parse {
        origin: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads `path` (when given) and applies the overrides.
pub fn parse_config(path: Option<&Path>, overrides: &[(String, Value)]) -> Result<RunConfig> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_str(&text, &p.display().to_string(), overrides)
        }
        None => parse_str("", "overrides", overrides),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gives_superradiance_run() {
        let cfg = parse_str("N = 300\ngamma_down = 0.01\nT = -0.5\n", "test", &[]).unwrap();
        assert_eq!(cfg, RunConfig::new(300, 0.01, -0.5));
        assert_eq!(cfg.pulse_spec(), PulseSpec::emission(300, 1.0, -0.5, 0.01));
        assert!(cfg.warnings().is_empty());
    }

    #[test]
    fn empty_file_lists_required_fields() {
        let err = parse_str("", "test", &[]).unwrap_err();
        assert_eq!(err.kind(), "missing_fields");
        let msg = err.to_string();
        for f in REQUIRED_FIELDS {
            assert!(msg.contains(f), "{msg}");
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_str("N = 3\ngamma_down = 0.1\nT = 1\ngama_up = 2\n", "test", &[]).unwrap_err();
        assert_eq!(err.kind(), "config_parse");
        assert!(err.to_string().contains("gama_up"));
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_str("N = 3\ngamma_down = \n", "test", &[]).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn large_pump_accepted_with_warning() {
        let cfg = parse_str("N = 80\ngamma_down = 0.01\nT = 0.5\nx = 20\n", "test", &[]).unwrap();
        assert_eq!(cfg.warnings().len(), 1);
    }

    #[test]
    fn validation_names_field() {
        let err = parse_str("N = 3\ngamma_down = -0.1\nT = 1\n", "test", &[]).unwrap_err();
        assert!(matches!(err, CliError::InvalidConfig { ref field, .. } if field == "gamma_down"));
        let err = parse_str("N = 3\ngamma_down = 0.1\nT = 1\nschema_version = 2\n", "test", &[]).unwrap_err();
        assert!(err.to_string().contains("schema_version"));
        let err = parse_str("N = 3\ngamma_down = 0.1\nT = 1\nsweep_axis = \"y\"\n", "test", &[]).unwrap_err();
        assert!(err.to_string().contains("sweep_axis"));
    }

    #[test]
    fn overrides_and_aliases() {
        let ov: Vec<_> = ["T=0.25", "x=2", "pump_shape=hard", "sweep_grid=[1, 2.5]", "N=12"]
            .iter()
            .map(|s| parse_override(s).unwrap())
            .collect();
        let cfg = parse_str("n_emitters = 3\ngamma_down = 0.1\ntemperature = 1\n", "test", &ov).unwrap();
        assert_eq!(cfg.temperature, 0.25);
        assert_eq!(cfg.n_emitters, 12);
        assert_eq!(cfg.pump_shape, ShapeName::Hard);
        assert_eq!(cfg.sweep_grid, vec![1.0, 2.5]);
        assert!(parse_override("novalue").is_err());
        assert!(parse_str("N = 3\nn_emitters = 4\ngamma_down = 0.1\nT = 1\n", "test", &[]).is_err());
    }

    #[test]
    fn emit_round_trips() {
        let mut cfg = RunConfig::new(80, 0.01, 0.5);
        cfg.tau_switch = Some(0.125);
        cfg.sweep_axis = Some("tau_switch".into());
        cfg.sweep_grid = vec![0.01, 0.1];
        cfg.branch = Some(BranchName::Absorption);
        assert_eq!(parse_str(&cfg.emit(), "emit", &[]).unwrap(), cfg);
    }
}
