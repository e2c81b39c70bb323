//! Flat `key = value` configuration files. Keys mirror the command-line
//! flags; `-` and `_` are interchangeable.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

use super::{ExperimentId, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: k + 1 })?;
        let key = key.trim().replace('_', "-").to_ascii_lowercase();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: k + 1 });
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

/// `1e6` and `1000000` both parse as counts.
fn parse_count(key: &str, value: &str) -> Result<u64, ConfigError> {
    if let Ok(v) = value.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = parse(key, value)?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
        })
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError> {
    value.split(',').map(|s| parse(key, s.trim())).collect()
}

/// Keys that belong to the runner rather than to the experiment.
pub const RUNNER_KEYS: [&str; 2] = ["threads", "out"];

impl ExperimentSpec {
    /// Applies one setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.replace('_', "-").to_ascii_lowercase();
        let k = key.as_str();
        match k {
            "id" => {
                self.id = value
                    .parse::<ExperimentId>()
                    .map_err(|_| ConfigError::BadValue {
                        key: key.clone(),
                        value: value.into(),
                    })?
            }
            "p" => self.p = parse(k, value)?,
            "n" => self.n_grid = parse_list(k, value)?,
            "zeta" => self.zeta_grid = parse_list(k, value)?,
            "eps" => self.eps_grid = parse_list(k, value)?,
            "m" => self.m = parse(k, value)?,
            "replicas" => self.replicas = parse_count(k, value)?,
            "samples" => self.samples = parse_count(k, value)?,
            "seed" => self.seed = parse(k, value)?,
            "dt" => self.dt = parse(k, value)?,
            "delta" => self.delta = parse(k, value)?,
            "cap-c" => self.cap_c = parse(k, value)?,
            "max-trials" => self.max_trials = parse_count(k, value)?,
            "max-steps" => self.max_steps = parse_count(k, value)?,
            "min-hits" => self.min_hits = parse_count(k, value)?,
            "t-max" => self.t_max = parse(k, value)?,
            "target-ess" => self.target_ess = parse(k, value)?,
            "tol" => self.tol = parse(k, value)?,
            _ if RUNNER_KEYS.contains(&k) => {}
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Builds a spec from a parsed config; `id` must be present there or be
    /// supplied as `default_id`.
    pub fn from_config(
        map: &BTreeMap<String, String>,
        default_id: Option<ExperimentId>,
    ) -> Result<Self, ConfigError> {
        let id = match map.get("id") {
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: "id".into(),
                value: v.clone(),
            })?,
            None => default_id.ok_or(ConfigError::UnknownKey("id (missing)".into()))?,
        };
        let mut spec = ExperimentSpec::new(id);
        for (k, v) in map {
            if k != "id" {
                spec.set(k, v)?;
            }
        }
        Ok(spec)
    }
}
