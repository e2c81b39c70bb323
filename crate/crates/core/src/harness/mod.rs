//! Experiment catalog: exponent regressions, distributional comparisons
//! between the discrete model and the Brownian reference, and an invariant
//! sweep. Every experiment produces an [`ExperimentReport`].

mod config;
mod continuum;
mod exponents;
mod sweep;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::bm::BmError;
use crate::sampler::SamplerError;

pub use config::{parse_config, ConfigError};
pub use continuum::{run_e5, run_e6, run_e7, run_e8, WedgePartition};
pub use exponents::{run_e1, run_e2, run_e3, run_e4};
pub use sweep::{run_e9, sweep_conditioned, sweep_iid, sweep_word, SweepSummary};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("not enough hits: {0}")]
    InsufficientHits(String),
    #[error("invalid experiment parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Bm(#[from] BmError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ExperimentId {
    #[serde(rename = "E1_mu_from_I")]
    E1,
    #[serde(rename = "E2_empty_exponent")]
    E2,
    #[serde(rename = "E3_flex_count")]
    E3,
    #[serde(rename = "E4_burger_race")]
    E4,
    #[serde(rename = "E5_cone_hit_ratio")]
    E5,
    #[serde(rename = "E6_endpoint_density")]
    E6,
    #[serde(rename = "E7_excursion_reweight")]
    E7,
    #[serde(rename = "E8_midpoint_law")]
    E8,
    #[serde(rename = "E9_property_sweep")]
    E9,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::E1,
        ExperimentId::E2,
        ExperimentId::E3,
        ExperimentId::E4,
        ExperimentId::E5,
        ExperimentId::E6,
        ExperimentId::E7,
        ExperimentId::E8,
        ExperimentId::E9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::E1 => "E1_mu_from_I",
            ExperimentId::E2 => "E2_empty_exponent",
            ExperimentId::E3 => "E3_flex_count",
            ExperimentId::E4 => "E4_burger_race",
            ExperimentId::E5 => "E5_cone_hit_ratio",
            ExperimentId::E6 => "E6_endpoint_density",
            ExperimentId::E7 => "E7_excursion_reweight",
            ExperimentId::E8 => "E8_midpoint_law",
            ExperimentId::E9 => "E9_property_sweep",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    /// Accepts the short form (`E4`) or the full name.
    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| {
                let name = id.name();
                s.eq_ignore_ascii_case(name) || s.eq_ignore_ascii_case(&name[..2])
            })
            .ok_or_else(|| format!("unknown experiment id {s:?}"))
    }
}

/// Parameters of one experiment run. Fields an experiment does not use are
/// ignored by it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub zeta_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub m: usize,
    pub replicas: u64,
    /// Secondary sample count: excursions for E7 and E8, conditioned words
    /// for the iid half of E9.
    pub samples: u64,
    pub seed: u64,
    pub dt: f64,
    pub delta: f64,
    pub cap_c: f64,
    pub max_trials: u64,
    /// Symbols read per replica before a backward race is censored.
    pub max_steps: u64,
    pub min_hits: u64,
    pub t_max: f64,
    pub target_ess: f64,
    pub tol: f64,
}

impl ExperimentSpec {
    /// Defaults reproduce the acceptance settings for each experiment.
    pub fn new(id: ExperimentId) -> Self {
        let base = ExperimentSpec {
            id,
            p: 1.0 / 3.0,
            n_grid: vec![],
            zeta_grid: vec![],
            eps_grid: vec![],
            m: 200,
            replicas: 0,
            samples: 0,
            seed: 1,
            dt: 1e-3,
            delta: 0.02,
            cap_c: 4.0,
            max_trials: 1 << 40,
            max_steps: 10_000_000,
            min_hits: 200,
            t_max: 10.0,
            target_ess: 2e4,
            tol: 0.0,
        };
        match id {
            ExperimentId::E1 => ExperimentSpec {
                n_grid: vec![16, 32, 64, 128, 256, 512, 1024],
                replicas: 1_000_000,
                tol: 0.10,
                ..base
            },
            ExperimentId::E2 => ExperimentSpec {
                n_grid: vec![5, 10, 20, 40, 80],
                replicas: 10_000_000,
                tol: 0.40,
                ..base
            },
            ExperimentId::E3 => ExperimentSpec {
                n_grid: vec![64, 128, 256, 512, 1024, 2048, 4096],
                replicas: 20_000,
                tol: 0.10,
                ..base
            },
            ExperimentId::E4 => ExperimentSpec {
                eps_grid: vec![0.4, 0.2, 0.1, 0.05],
                replicas: 10_000,
                samples: 4_000,
                tol: 0.35,
                ..base
            },
            ExperimentId::E5 => ExperimentSpec {
                zeta_grid: vec![0.2, 0.1, 0.05],
                replicas: 100_000,
                dt: 1e-4,
                tol: 2.0,
                ..base
            },
            ExperimentId::E6 => ExperimentSpec {
                replicas: 50_000,
                tol: 0.999,
                ..base
            },
            ExperimentId::E7 => ExperimentSpec {
                replicas: 20_000,
                samples: 20_000,
                tol: 0.05,
                ..base
            },
            ExperimentId::E8 => ExperimentSpec {
                n_grid: vec![50],
                replicas: 500,
                samples: 10_000,
                tol: 0.15,
                ..base
            },
            ExperimentId::E9 => ExperimentSpec {
                n_grid: vec![20, 1000],
                replicas: 10_000,
                samples: 10_000,
                ..base
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expected {
    pub value: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub id: ExperimentId,
    pub params: ExperimentSpec,
    pub estimates: BTreeMap<String, Estimate>,
    pub expected: BTreeMap<String, Expected>,
    pub pass: bool,
    pub runtime_seconds: f64,
    pub replica_count: u64,
}

impl ExperimentReport {
    pub(crate) fn new(spec: &ExperimentSpec) -> Self {
        ExperimentReport {
            id: spec.id,
            params: spec.clone(),
            estimates: BTreeMap::new(),
            expected: BTreeMap::new(),
            pass: false,
            runtime_seconds: 0.0,
            replica_count: 0,
        }
    }

    pub(crate) fn estimate(&mut self, name: impl Into<String>, value: f64, stderr: f64) {
        self.estimates
            .insert(name.into(), Estimate { value, stderr });
    }

    pub(crate) fn expect(&mut self, name: impl Into<String>, value: f64, provenance: &str) {
        self.expected.insert(
            name.into(),
            Expected {
                value,
                provenance: provenance.to_string(),
            },
        );
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.estimates.get(name).map(|e| e.value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// Runs the experiment named by `spec.id`.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let start = Instant::now();
    let mut report = match spec.id {
        ExperimentId::E1 => run_e1(spec),
        ExperimentId::E2 => run_e2(spec),
        ExperimentId::E3 => run_e3(spec),
        ExperimentId::E4 => run_e4(spec),
        ExperimentId::E5 => run_e5(spec),
        ExperimentId::E6 => run_e6(spec),
        ExperimentId::E7 => run_e7(spec),
        ExperimentId::E8 => run_e8(spec),
        ExperimentId::E9 => run_e9(spec),
    }?;
    report.runtime_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse_both_forms() {
        assert_eq!("E4".parse::<ExperimentId>(), Ok(ExperimentId::E4));
        assert_eq!("e9".parse::<ExperimentId>(), Ok(ExperimentId::E9));
        assert_eq!(
            "E2_empty_exponent".parse::<ExperimentId>(),
            Ok(ExperimentId::E2)
        );
        assert!("E10".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn report_schema() {
        let spec = ExperimentSpec::new(ExperimentId::E1);
        let mut r = ExperimentReport::new(&spec);
        r.estimate("slope", -0.7, 0.01);
        r.expect("slope", -0.75, "theory");
        let j = r.to_json();
        assert_eq!(j["id"], "E1_mu_from_I");
        assert_eq!(j["estimates"]["slope"]["stderr"], 0.01);
        assert_eq!(j["expected"]["slope"]["provenance"], "theory");
        for key in ["params", "pass", "runtime_seconds"] {
            assert!(j.get(key).is_some());
        }
    }
}
