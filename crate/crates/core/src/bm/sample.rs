use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{BmConfig, BmError, ExcursionWindow, GridPath};

/// Increments with covariance `Σ dt`.
#[derive(Clone, Copy)]
struct Stepper {
    l: [f64; 3],
    h: f64,
}

impl Stepper {
    fn new(cfg: &BmConfig, var_scale: f64) -> Self {
        Stepper {
            l: cfg.chol(),
            h: (cfg.dt * var_scale).sqrt(),
        }
    }

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        [
            self.h * self.l[0] * g1,
            self.h * (self.l[1] * g1 + self.l[2] * g2),
        ]
    }
}

fn inside(z: [f64; 2]) -> bool {
    z[0] >= 0.0 && z[1] >= 0.0
}

pub fn sample_correlated_bm<R: Rng + ?Sized>(
    cfg: &BmConfig,
    t: f64,
    start: [f64; 2],
    rng: &mut R,
) -> GridPath {
    let st = Stepper::new(cfg, 1.0);
    let n = cfg.steps(t);
    let mut values = Vec::with_capacity(n + 1);
    let mut z = start;
    values.push(z);
    for _ in 0..n {
        let d = st.draw(rng);
        z = [z[0] + d[0], z[1] + d[1]];
        values.push(z);
    }
    GridPath {
        t0: 0.0,
        dt: cfg.dt,
        values,
    }
}

/// Discrete Brownian bridge: each step adds the conditional mean drift
/// toward `end` and noise with the conditional covariance.
pub fn sample_bridge<R: Rng + ?Sized>(
    cfg: &BmConfig,
    t: f64,
    start: [f64; 2],
    end: [f64; 2],
    rng: &mut R,
) -> GridPath {
    let n = cfg.steps(t).max(1);
    let mut values = Vec::with_capacity(n + 1);
    values.push(start);
    bridge_into(cfg, n, start, end, rng, &mut values, false);
    GridPath {
        t0: 0.0,
        dt: cfg.dt,
        values,
    }
}

/// Appends `n` bridge steps to `out`; with `stop_on_exit`, returns false as
/// soon as a value leaves the quadrant.
fn bridge_into<R: Rng + ?Sized>(
    cfg: &BmConfig,
    n: usize,
    start: [f64; 2],
    end: [f64; 2],
    rng: &mut R,
    out: &mut Vec<[f64; 2]>,
    stop_on_exit: bool,
) -> bool {
    let st = Stepper::new(cfg, 1.0);
    let mut z = start;
    for k in 0..n {
        let m = (n - k) as f64;
        if m == 1.0 {
            z = end;
        } else {
            let d = st.draw(rng);
            let s = ((m - 1.0) / m).sqrt();
            z = [
                z[0] + (end[0] - z[0]) / m + s * d[0],
                z[1] + (end[1] - z[1]) / m + s * d[1],
            ];
        }
        out.push(z);
        if stop_on_exit && !inside(z) {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct Meander {
    pub path: GridPath,
    pub trials: u64,
    /// Both coordinates of the start point, `sqrt(dt)`.
    pub start_offset: f64,
}

/// Rejection sample of the motion started at `(sqrt(dt), sqrt(dt))` and
/// conditioned to stay in the closed quadrant at every grid time up to `t`.
pub fn sample_meander<R: Rng + ?Sized>(
    cfg: &BmConfig,
    t: f64,
    rng: &mut R,
    max_trials: u64,
) -> Result<Meander, BmError> {
    let st = Stepper::new(cfg, 1.0);
    let n = cfg.steps(t);
    let off = cfg.dt.sqrt();
    let mut values = Vec::with_capacity(n + 1);
    'trial: for trial in 1..=max_trials {
        values.clear();
        let mut z = [off, off];
        values.push(z);
        for _ in 0..n {
            let d = st.draw(rng);
            z = [z[0] + d[0], z[1] + d[1]];
            if !inside(z) {
                continue 'trial;
            }
            values.push(z);
        }
        return Ok(Meander {
            path: GridPath {
                t0: 0.0,
                dt: cfg.dt,
                values,
            },
            trials: trial,
            start_offset: off,
        });
    }
    Err(BmError::Exhausted {
        max_trials,
        rate: 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Excursion {
    pub path: GridPath,
    pub window: ExcursionWindow,
    pub trials: u64,
}

/// Motion from `(sqrt(dt), sqrt(dt))` conditioned to stay in the quadrant
/// up to `1 - δ` and to lie in the window box at `1 - δ`, then closed to
/// the origin by a straight line over `[1 - δ, 1]`.
///
/// The endpoint at `1 - δ` is drawn first from its free Gaussian law and
/// rejected outside the box; the path is then filled in by a bridge that is
/// rejected at its first exit. This has the same law as rejecting whole
/// meanders, at a fraction of the cost.
pub fn sample_excursion<R: Rng + ?Sized>(
    cfg: &BmConfig,
    window: ExcursionWindow,
    rng: &mut R,
    max_trials: u64,
) -> Result<Excursion, BmError> {
    let n = cfg.steps(1.0);
    let k1 = cfg
        .steps(1.0 - window.delta)
        .clamp(1, n.saturating_sub(1).max(1));
    let off = cfg.dt.sqrt();
    let start = [off, off];
    let far = Stepper::new(cfg, k1 as f64);
    let mut values = Vec::with_capacity(n + 1);
    let mut in_box = 0u64;
    for trial in 1..=max_trials {
        let d = far.draw(rng);
        let end = [start[0] + d[0], start[1] + d[1]];
        if !window.contains(end) {
            continue;
        }
        in_box += 1;
        values.clear();
        values.push(start);
        if !bridge_into(cfg, k1, start, end, rng, &mut values, true) {
            continue;
        }
        let ramp = n - k1;
        for j in 1..=ramp {
            let s = 1.0 - j as f64 / ramp as f64;
            values.push([end[0] * s, end[1] * s]);
        }
        *values.last_mut().unwrap() = [0.0, 0.0];
        return Ok(Excursion {
            path: GridPath {
                t0: 0.0,
                dt: cfg.dt,
                values,
            },
            window,
            trials: trial,
        });
    }
    Err(BmError::Exhausted {
        max_trials,
        rate: in_box as f64 / max_trials as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HitFirst {
    U,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstPassage {
    pub tau: f64,
    /// `V` at the passage time.
    pub v_at_tau: f64,
    pub first: HitFirst,
}

/// Runs the motion from the origin until `U` reaches `b` or `V` reaches
/// `ζ`, whichever comes first on the grid.
pub fn first_passage_pair<R: Rng + ?Sized>(
    cfg: &BmConfig,
    b: f64,
    zeta: f64,
    t_max: f64,
    rng: &mut R,
) -> Result<FirstPassage, BmError> {
    let st = Stepper::new(cfg, 1.0);
    let n = cfg.steps(t_max);
    let (mut u, mut v) = (0.0, 0.0);
    for k in 1..=n {
        let d = st.draw(rng);
        u += d[0];
        v += d[1];
        let tau = k as f64 * cfg.dt;
        if u >= b {
            return Ok(FirstPassage {
                tau,
                v_at_tau: v,
                first: HitFirst::U,
            });
        }
        if v >= zeta {
            return Ok(FirstPassage {
                tau,
                v_at_tau: v,
                first: HitFirst::V,
            });
        }
    }
    Err(BmError::Censored { t_max })
}
