//! Correlated planar Brownian motion with `Var U = Var V = (1-p)/2` and
//! `Cov(U, V) = p/2` per unit time, the map `A` straightening the first
//! quadrant, the endpoint density of the quadrant meander, and grid
//! samplers for the conditioned processes.

mod density;
mod sample;
mod survival;

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::path::Samples;
use crate::sampler::cone_exponent;

pub use density::{endpoint_density, endpoint_density_csv, g_density, wedge_angle};
pub use sample::{
    first_passage_pair, sample_bridge, sample_correlated_bm, sample_excursion, sample_meander,
    Excursion, FirstPassage, HitFirst, Meander,
};
pub use survival::{SurvivalGrid, SurvivalTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BmError {
    #[error("p = {0} outside (0, 1/2)")]
    OutOfRange(f64),
    #[error("dt must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("point ({0}, {1}) lies outside the closed first quadrant")]
    OutOfCone(f64, f64),
    /// `rate` is the fraction of trials that passed the cheap first stage
    /// of the rejection, where there is one.
    #[error("no acceptance within {max_trials} trials (first-stage rate {rate:.3e})")]
    Exhausted { max_trials: u64, rate: f64 },
    #[error("survival estimate {estimate:.3e} at ({u}, {v}) is below the floor")]
    DegenerateSurvival { u: f64, v: f64, estimate: f64 },
    #[error("survival table horizon {table} does not match {wanted}")]
    HorizonMismatch { table: f64, wanted: f64 },
    #[error("no passage before t = {t_max}")]
    Censored { t_max: f64 },
    #[error("excursion window needs 0 < delta < 1 and C > 1")]
    BadWindow,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BmConfig {
    pub p: f64,
    pub var: f64,
    pub cov: f64,
    pub a: [[f64; 2]; 2],
    pub mu: f64,
    pub dt: f64,
    pub seed: u64,
}

impl BmConfig {
    pub fn new(p: f64, dt: f64, seed: u64) -> Result<Self, BmError> {
        if !(p > 0.0 && p < 0.5) {
            return Err(BmError::OutOfRange(p));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(BmError::BadStep(dt));
        }
        let k = (2.0 * (1.0 - p) / (1.0 - 2.0 * p)).sqrt();
        let a = [
            [k, -k * p / (1.0 - p)],
            [0.0, k * (1.0 - 2.0 * p).sqrt() / (1.0 - p)],
        ];
        Ok(BmConfig {
            p,
            var: (1.0 - p) / 2.0,
            cov: p / 2.0,
            a,
            mu: cone_exponent(p),
            dt,
            seed,
        })
    }

    pub fn with_dt(self, dt: f64) -> Result<Self, BmError> {
        BmConfig::new(self.p, dt, self.seed)
    }

    pub fn sigma(&self) -> [[f64; 2]; 2] {
        [[self.var, self.cov], [self.cov, self.var]]
    }

    pub fn det_a(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    pub fn apply_a(&self, z: [f64; 2]) -> [f64; 2] {
        [
            self.a[0][0] * z[0] + self.a[0][1] * z[1],
            self.a[1][0] * z[0] + self.a[1][1] * z[1],
        ]
    }

    pub fn apply_a_inv(&self, w: [f64; 2]) -> [f64; 2] {
        let d = self.det_a();
        [
            (self.a[1][1] * w[0] - self.a[0][1] * w[1]) / d,
            (-self.a[1][0] * w[0] + self.a[0][0] * w[1]) / d,
        ]
    }

    /// Lower Cholesky factor of the per-unit-time covariance.
    pub(crate) fn chol(&self) -> [f64; 3] {
        let s = self.var.sqrt();
        let rho = self.cov / self.var;
        [s, rho * s, s * (1.0 - rho * rho).sqrt()]
    }

    pub fn steps(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }
}

/// Path sampled at `t0, t0 + dt, ...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPath {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<[f64; 2]>,
}

impl GridPath {
    pub fn samples(&self) -> Samples<'_> {
        Samples {
            t0: self.t0,
            dt: self.dt,
            values: &self.values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.values.len().saturating_sub(1))
    }

    pub fn endpoint(&self) -> [f64; 2] {
        *self.values.last().unwrap()
    }

    /// Value at the grid point nearest to `t`.
    pub fn at(&self, t: f64) -> Option<[f64; 2]> {
        let k = ((t - self.t0) / self.dt).round();
        if k < 0.0 {
            return None;
        }
        self.values.get(k as usize).copied()
    }

    pub fn in_quadrant(&self) -> bool {
        self.values.iter().all(|z| z[0] >= 0.0 && z[1] >= 0.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u,v\n");
        for (k, z) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.time(k), z[0], z[1]);
        }
        out
    }
}

/// Endpoint box `[δ^{1/2}/C, C δ^{1/2}]²` at time `1 - δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExcursionWindow {
    pub delta: f64,
    pub c: f64,
}

impl ExcursionWindow {
    pub fn new(delta: f64, c: f64) -> Result<Self, BmError> {
        if !(delta > 0.0 && delta < 1.0 && c > 1.0) {
            return Err(BmError::BadWindow);
        }
        Ok(ExcursionWindow { delta, c })
    }

    pub fn bounds(&self) -> (f64, f64) {
        let s = self.delta.sqrt();
        (s / self.c, s * self.c)
    }

    pub fn contains(&self, z: [f64; 2]) -> bool {
        let (lo, hi) = self.bounds();
        z.iter().all(|&x| (lo..=hi).contains(&x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_whitens_sigma() {
        for k in 1..10 {
            let p = k as f64 * 0.049;
            let cfg = BmConfig::new(p, 1e-3, 0).unwrap();
            let (a, s) = (cfg.a, cfg.sigma());
            for i in 0..2 {
                for j in 0..2 {
                    let mut x = 0.0;
                    for k in 0..2 {
                        for l in 0..2 {
                            x += a[i][k] * s[k][l] * a[j][l];
                        }
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((x - want).abs() < 1e-12, "p={p} ({i},{j}) {x}");
                }
            }
        }
    }

    #[test]
    fn a_maps_quadrant_to_wedge() {
        for k in 1..=10 {
            let p = k as f64 * 0.0495;
            let cfg = BmConfig::new(p, 1e-3, 0).unwrap();
            let w = cfg.apply_a([1.0, 0.0]);
            assert!(w[1].abs() < 1e-15 && w[0] > 0.0);
            let w = cfg.apply_a([0.0, 1.0]);
            let angle = w[1].atan2(w[0]);
            assert!((angle - std::f64::consts::PI / (2.0 * cfg.mu)).abs() < 1e-12);
            let z = cfg.apply_a_inv(cfg.apply_a([0.3, 0.7]));
            assert!((z[0] - 0.3).abs() < 1e-12 && (z[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn det_a_closed_form() {
        let cfg = BmConfig::new(0.2, 1e-3, 0).unwrap();
        assert!((cfg.det_a() - 2.0 / (0.6f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(BmConfig::new(0.5, 1e-3, 0), Err(BmError::OutOfRange(0.5)));
        assert_eq!(BmConfig::new(0.3, 0.0, 0), Err(BmError::BadStep(0.0)));
        assert_eq!(ExcursionWindow::new(0.02, 1.0), Err(BmError::BadWindow));
    }

    #[test]
    fn window_box() {
        let w = ExcursionWindow::new(0.04, 4.0).unwrap();
        assert_eq!(w.bounds(), (0.05, 0.8));
        assert!(w.contains([0.05, 0.8]));
        assert!(!w.contains([0.04, 0.5]));
    }
}
