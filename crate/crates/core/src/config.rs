//! Flat dotted-key configuration (`scene.M = 16`) layered over the built-in
//! defaults. Files and `key=value` overrides share one key namespace; unknown
//! keys are rejected.

use toml::{Table, Value};

use crate::error::{config, Result};
use crate::harness::{linear_grid, log_pfa_grid, ExperimentConfig};
use crate::scene::Position;

/// Every accepted key, for error messages and documentation.
pub const KEYS: &[&str] = &[
    "seed",
    "scene.pan_a",
    "scene.pan_b",
    "scene.bsd",
    "scene.M",
    "scene.N",
    "scene.element_spacing",
    "scene.wavelength",
    "phase.J_p",
    "phase.J_d",
    "phase.tau_p",
    "phase.tau_d",
    "phase.symbol_length",
    "phase.gamma_schedule",
    "snr.snr_p_db",
    "snr.snr_d_db",
    "proj.K",
    "roc.trials",
    "roc.pfa_min",
    "roc.pfa_count",
    "roc.pfa_grid",
    "roc.estimated",
    "dynrange.trials",
    "dynrange.y_max",
    "dynrange.y_count",
    "dynrange.y_grid",
    "dynrange.snr_p_db",
];

/// Settings before grids are materialised.
#[derive(Debug, Clone)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    pfa_min: f64,
    pfa_count: usize,
    pfa_grid: Option<Vec<f64>>,
    y_max: f64,
    y_count: usize,
    y_grid: Option<Vec<f64>>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            experiment: ExperimentConfig::default(),
            pfa_min: 1e-3,
            pfa_count: 50,
            pfa_grid: None,
            y_max: 20.0,
            y_count: 21,
            y_grid: None,
        }
    }
}

fn flatten(prefix: &str, table: &Table, out: &mut Vec<(String, Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(config(format!("{key}: expected a number"))),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(config(format!("{key}: expected a non-negative integer"))),
    }
}

fn as_u64(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(config(format!("{key}: expected a non-negative integer"))),
    }
}

fn as_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(a) => a.iter().map(|x| as_f64(key, x)).collect(),
        _ => Err(config(format!("{key}: expected a list of numbers"))),
    }
}

fn as_position(key: &str, v: &Value) -> Result<Position> {
    match as_list(key, v)?.as_slice() {
        [x, y] => Ok(Position::new(*x, *y)),
        _ => Err(config(format!("{key}: expected [x, y]"))),
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, v: &Value) -> Result<()> {
        let e = &mut self.experiment;
        match key {
            "seed" => e.seed = as_u64(key, v)?,
            "scene.pan_a" => e.scene.pan_a_center = as_position(key, v)?,
            "scene.pan_b" => e.scene.pan_b_center = as_position(key, v)?,
            "scene.bsd" => e.scene.bsd_pos = as_position(key, v)?,
            "scene.M" => e.scene.pan_a_antennas = as_usize(key, v)?,
            "scene.N" => e.scene.pan_b_antennas = as_usize(key, v)?,
            "scene.element_spacing" => e.scene.element_spacing = as_f64(key, v)?,
            "scene.wavelength" => e.scene.wavelength = as_f64(key, v)?,
            "phase.J_p" => e.phase.pilot_slots = as_usize(key, v)?,
            "phase.J_d" => e.phase.probe_slots = as_usize(key, v)?,
            "phase.tau_p" => e.phase.pilot_len = as_usize(key, v)?,
            "phase.tau_d" => e.phase.probe_len = as_usize(key, v)?,
            "phase.symbol_length" => e.phase.symbol_length = as_f64(key, v)?,
            "phase.gamma_schedule" => {
                e.phase.gamma_schedule = match v {
                    Value::Array(a) => a
                        .iter()
                        .map(|g| match g {
                            Value::Integer(0) => Ok(false),
                            Value::Integer(1) => Ok(true),
                            _ => Err(config(format!("{key}: entries must be 0 or 1"))),
                        })
                        .collect::<Result<_>>()?,
                    _ => return Err(config(format!("{key}: expected a list of 0/1"))),
                }
            }
            "snr.snr_p_db" => e.snr.snr_p_db = as_f64(key, v)?,
            "snr.snr_d_db" => e.snr.snr_d_db = as_f64(key, v)?,
            "proj.K" => e.removed_directions = as_usize(key, v)?,
            "roc.trials" => e.roc_trials = as_u64(key, v)?,
            "roc.pfa_min" => self.pfa_min = as_f64(key, v)?,
            "roc.pfa_count" => self.pfa_count = as_usize(key, v)?,
            "roc.pfa_grid" => self.pfa_grid = Some(as_list(key, v)?),
            "roc.estimated" => {
                e.roc_estimated = v.as_bool().ok_or_else(|| config(format!("{key}: expected true/false")))?
            }
            "dynrange.trials" => e.dynrange_trials = as_u64(key, v)?,
            "dynrange.y_max" => self.y_max = as_f64(key, v)?,
            "dynrange.y_count" => self.y_count = as_usize(key, v)?,
            "dynrange.y_grid" => self.y_grid = Some(as_list(key, v)?),
            "dynrange.snr_p_db" => e.dynrange_snr_p_db = as_list(key, v)?,
            _ => return Err(config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every key of a config file body.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        let table: Table =
            text.parse().map_err(|e: toml::de::Error| config(format!("config file: {}", e.message())))?;
        let mut entries = Vec::new();
        flatten("", &table, &mut entries);
        for (k, v) in entries {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (key, raw) = spec
            .split_once('=')
            .ok_or_else(|| config(format!("override `{spec}` is not of the form key=value")))?;
        let key = key.trim();
        let doc: Table = format!("v = {}", raw.trim())
            .parse()
            .map_err(|_| config(format!("override `{spec}`: value is not a number, boolean or list")))?;
        self.set(key, &doc["v"])
    }

    /// Materialises grids and validates.
    pub fn build(mut self) -> Result<ExperimentConfig> {
        if !(self.pfa_min > 0.0 && self.pfa_min < 1.0) {
            return Err(config("roc.pfa_min must lie in (0, 1)"));
        }
        self.experiment.pfa_grid =
            self.pfa_grid.unwrap_or_else(|| log_pfa_grid(self.pfa_min, self.pfa_count));
        self.experiment.y_grid = self.y_grid.unwrap_or_else(|| linear_grid(self.y_max, self.y_count));
        self.experiment.validate()?;
        Ok(self.experiment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::SimError;

    #[test]
    fn defaults_build_to_default_experiment() {
        let cfg = Settings::default().build().unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn file_then_overrides() {
        let mut s = Settings::default();
        s.apply_file("seed = 3\nscene.M = 8\n[phase]\ntau_d = 8\ngamma_schedule = [0, 1]\n").unwrap();
        s.apply_override("scene.bsd=[3, 10]").unwrap();
        s.apply_override("seed = 9").unwrap();
        s.apply_override("roc.pfa_grid=[0.05, 0.1]").unwrap();
        let cfg = s.build().unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.scene.pan_a_antennas, 8);
        assert_eq!(cfg.phase.gamma_schedule, vec![false, true]);
        assert_eq!(cfg.scene.bsd_pos, Position::new(3.0, 10.0));
        assert_eq!(cfg.pfa_grid, vec![0.05, 0.1]);
    }

    #[test]
    fn unknown_and_malformed_rejected() {
        let mut s = Settings::default();
        assert!(matches!(s.apply_override("scene.Q=1"), Err(SimError::Config(_))));
        assert!(s.apply_override("scene.M").is_err());
        assert!(s.apply_override("scene.M=abc").is_err());
        assert!(s.apply_override("scene.M=-1").is_err());
        assert!(s.apply_override("phase.gamma_schedule=[2]").is_err());
        assert!(s.apply_file("[scene]\nbogus = 1").is_err());
        assert!(s.apply_file("not toml ===").is_err());
    }

    #[test]
    fn infeasible_values_fail_validation() {
        let mut s = Settings::default();
        s.apply_override("phase.tau_p=8").unwrap();
        assert!(s.build().is_err());
    }

    #[test]
    fn every_documented_key_is_accepted() {
        // A representative value of the right type for each key.
        for key in KEYS {
            let value = match *key {
                "scene.pan_a" | "scene.pan_b" | "scene.bsd" => "[1.0, 2.0]",
                "phase.gamma_schedule" => "[1, 0]",
                "roc.pfa_grid" | "dynrange.y_grid" | "dynrange.snr_p_db" => "[0.1, 0.2]",
                "roc.estimated" => "false",
                "scene.element_spacing"
                | "scene.wavelength"
                | "phase.symbol_length"
                | "snr.snr_p_db"
                | "snr.snr_d_db"
                | "roc.pfa_min"
                | "dynrange.y_max" => "0.5",
                _ => "4",
            };
            Settings::default().apply_override(&format!("{key}={value}")).unwrap();
        }
    }
}
