//! π/2-cone times on sampled paths and on words.
//!
//! A time `t` is a (weak) cone time if both coordinates stay at or above
//! their time-`t` values on some `[t', t]` with `t' < t`. On a sampled path
//! the entrance time `v(t)` is one step after the last sample where either
//! coordinate was strictly below its time-`t` value. For integer walks with
//! unit steps this is exact for the interpolated path as well.

use std::collections::VecDeque;

use serde::Serialize;

use super::{lattice_path, PathError};
use crate::burger::{resolve_flex_partial, BurgerError, MatchTable, Symbol, Word};

/// Regularly sampled planar path: `values[k]` is the value at `t0 + k dt`.
#[derive(Clone, Copy, Debug)]
pub struct Samples<'a> {
    pub t0: f64,
    pub dt: f64,
    pub values: &'a [[f64; 2]],
}

impl Samples<'_> {
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// First sample index at or after time `t`.
    pub fn index_at_or_after(&self, t: f64) -> usize {
        let x = (t - self.t0) / self.dt;
        (x - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    /// Both coordinates sit at their entrance values.
    Degenerate,
    /// The cone interval runs into the start of the path.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeRecord {
    /// Index of the flexible order, for records read off a word.
    pub index: Option<i64>,
    pub t: f64,
    pub v: f64,
    pub u: f64,
    /// `u` was cut off by the start of the path.
    pub u_truncated: bool,
    pub direction: Direction,
    pub spacing: f64,
}

fn prev_smaller(xs: impl Iterator<Item = f64>) -> Vec<Option<usize>> {
    let mut stack: Vec<(usize, f64)> = Vec::new();
    xs.enumerate()
        .map(|(k, x)| {
            while stack.last().is_some_and(|&(_, y)| y >= x) {
                stack.pop();
            }
            let r = stack.last().map(|&(j, _)| j);
            stack.push((k, x));
            r
        })
        .collect()
}

fn prev_smaller_pair(values: &[[f64; 2]]) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    (
        prev_smaller(values.iter().map(|z| z[0])),
        prev_smaller(values.iter().map(|z| z[1])),
    )
}

/// Entrance index `v(k)` for every sample; `k` is a cone time iff
/// `v(k) < k`.
pub fn entrance_steps(values: &[[f64; 2]]) -> Vec<usize> {
    let (pu, pv) = prev_smaller_pair(values);
    pu.iter()
        .zip(&pv)
        .map(|(a, b)| a.map_or(0, |j| j + 1).max(b.map_or(0, |j| j + 1)))
        .collect()
}

/// Largest sample index `k* < k` such that both coordinates dip strictly
/// below their time-`k` values on `[k*, k]`.
pub fn crossing_steps(values: &[[f64; 2]]) -> Vec<Option<usize>> {
    let (pu, pv) = prev_smaller_pair(values);
    pu.iter()
        .zip(&pv)
        .map(|(a, b)| Some((*a)?.min((*b)?)))
        .collect()
}

fn grid_direction(pu: Option<usize>, pv: Option<usize>, v: usize) -> Direction {
    let u_binds = pu.is_some_and(|j| j + 1 == v);
    let v_binds = pv.is_some_and(|j| j + 1 == v);
    match (u_binds, v_binds) {
        (true, true) => Direction::Degenerate,
        (true, false) => Direction::Right,
        (false, true) => Direction::Left,
        (false, false) => Direction::Open,
    }
}

fn exact_direction(zt: [f64; 2], zv: [f64; 2]) -> Direction {
    match (zt[0] == zv[0], zt[1] == zv[1]) {
        (true, true) => Direction::Degenerate,
        (true, false) => Direction::Right,
        (false, true) => Direction::Left,
        (false, false) => Direction::Open,
    }
}

/// One record per flexible order `i`: `t = (i-1)/n`, `v = φ(i)/n`.
pub fn cone_times_from_word(
    w: &Word,
    m: &MatchTable,
    n_scale: u64,
) -> Result<Vec<ConeRecord>, PathError> {
    let y = resolve_flex_partial(w, m);
    if let Some((i, _)) = y.iter_indexed().find(|&(_, s)| s == Symbol::FlexibleO) {
        return Err(BurgerError::UnmatchedFlexible(i).into());
    }
    let path = lattice_path(&y)?;
    let values = path.values();
    let cross = crossing_steps(&values);
    let n = n_scale as f64;
    let t0 = path.start_time();
    let mut out = Vec::new();
    for (i, s) in w.iter_indexed() {
        if s != Symbol::FlexibleO {
            continue;
        }
        let phi = m.phi(i).expect("resolved above");
        let kt = (i - 1 - t0) as usize;
        let kv = (phi - t0) as usize;
        let (u, u_truncated) = match cross[kt] {
            Some(k) => (k as i64 + t0, false),
            None => (t0, true),
        };
        out.push(ConeRecord {
            index: Some(i),
            t: (i - 1) as f64 / n,
            v: phi as f64 / n,
            u: u as f64 / n,
            u_truncated,
            direction: exact_direction(values[kt], values[kv]),
            spacing: 1.0 / n,
        });
    }
    Ok(out)
}

/// All cone times of a sampled path (`v(k) < k`), with grid-based
/// direction.
pub fn cone_records(s: Samples<'_>) -> Vec<ConeRecord> {
    let (pu, pv) = prev_smaller_pair(s.values);
    let entr = entrance_steps(s.values);
    let cross = crossing_steps(s.values);
    (0..s.values.len())
        .filter(|&k| entr[k] < k)
        .map(|k| record_at(s, k, &pu, &pv, &entr, &cross))
        .collect()
}

fn record_at(
    s: Samples<'_>,
    k: usize,
    pu: &[Option<usize>],
    pv: &[Option<usize>],
    entr: &[usize],
    cross: &[Option<usize>],
) -> ConeRecord {
    ConeRecord {
        index: None,
        t: s.time(k),
        v: s.time(entr[k]),
        u: s.time(cross[k].unwrap_or(0)),
        u_truncated: cross[k].is_none(),
        direction: grid_direction(pu[k], pv[k], entr[k]),
        spacing: s.dt,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    Flexible(i64),
    Fallback(i64),
}

impl Selection {
    pub fn index(self) -> i64 {
        match self {
            Selection::Flexible(i) | Selection::Fallback(i) => i,
        }
    }
}

/// The maximal flexible order time `i` in `nI`, `I = (lo, hi)`, with
/// `an ∈ [φ(i), i]`; `⌊an⌋` when there is none.
pub fn maximal_flexible_time(
    w: &Word,
    m: &MatchTable,
    lo: f64,
    hi: f64,
    a: f64,
    n: u64,
) -> Selection {
    let n = n as f64;
    let (lo, hi, an) = (lo * n, hi * n, a * n);
    // Flexible intervals are laminar, so the candidates containing `an` are
    // nested and the outermost one has the smallest φ.
    w.iter_indexed()
        .filter(|&(_, s)| s == Symbol::FlexibleO)
        .filter_map(|(i, _)| Some((m.phi(i)?, i)))
        .filter(|&(b, i)| lo < b as f64 && (i as f64) < hi && b as f64 <= an && an <= i as f64)
        .min_by_key(|&(b, i)| (b, -i))
        .map_or(Selection::Fallback(an.floor() as i64), |(_, i)| {
            Selection::Flexible(i)
        })
}

/// The maximal cone interval inside the open interval `(lo, hi)` that
/// contains `a`, on a sampled path.
pub fn maximal_cone_selection(s: Samples<'_>, lo: f64, hi: f64, a: f64) -> Option<ConeRecord> {
    let (pu, pv) = prev_smaller_pair(s.values);
    let entr = entrance_steps(s.values);
    let cross = crossing_steps(s.values);
    // Cone intervals are laminar as well.
    (0..s.values.len())
        .filter(|&k| entr[k] < k)
        .filter(|&k| {
            let (t, v) = (s.time(k), s.time(entr[k]));
            lo < v && t < hi && v <= a && a <= t
        })
        .min_by_key(|&k| (entr[k], usize::MAX - k))
        .map(|k| record_at(s, k, &pu, &pv, &entr, &cross))
}

/// The smallest flexible order `i ≥ an` with `i - φ(i) ≥ rn - 1`.
pub fn iota_ar(w: &Word, m: &MatchTable, a: f64, r: f64, n: u64) -> Option<i64> {
    // Thresholds are meant to be integers; absorb rounding in `a n`, `r n`.
    let n = n as f64;
    let (lo, len) = (a * n - 1e-9, r * n - 1.0 - 1e-9);
    w.iter_indexed()
        .filter(|&(i, s)| s == Symbol::FlexibleO && i as f64 >= lo)
        .find(|&(i, _)| m.phi(i).is_some_and(|b| (i - b) as f64 >= len))
        .map(|(i, _)| i)
}

/// `Z̄_r(t) = Z(t) - (inf of Z over [t-r, t])`, coordinatewise, on the grid
/// times where the whole window lies inside the path.
#[derive(Clone, Debug)]
pub struct ConeDetector {
    pub window_steps: usize,
    pub t0: f64,
    pub dt: f64,
    /// `values[k]` is `Z̄_r` at sample `k + window_steps` of the path.
    pub values: Vec<[f64; 2]>,
}

impl ConeDetector {
    pub fn first_index(&self) -> usize {
        self.window_steps
    }

    /// `Z̄_r` at path sample `k`, if defined.
    pub fn at_step(&self, k: usize) -> Option<[f64; 2]> {
        k.checked_sub(self.window_steps)
            .and_then(|j| self.values.get(j).copied())
    }

    pub fn at(&self, t: f64) -> Option<[f64; 2]> {
        let x = ((t - self.t0) / self.dt).round();
        if x < 0.0 {
            return None;
        }
        self.at_step(x as usize)
    }

    pub fn is_zero_at(&self, k: usize) -> bool {
        self.at_step(k).is_some_and(|z| z == [0.0, 0.0])
    }

    /// Path sample indices where the detector vanishes.
    pub fn zeros(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, z)| **z == [0.0, 0.0])
            .map(|(j, _)| j + self.window_steps)
            .collect()
    }
}

/// Sliding-window minima over windows of `w + 1` samples ending at each
/// index `k ≥ w`.
fn window_minima(xs: impl Iterator<Item = f64>, w: usize) -> Vec<f64> {
    let xs: Vec<f64> = xs.collect();
    let mut q: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(xs.len().saturating_sub(w));
    for k in 0..xs.len() {
        while q.back().is_some_and(|&j| xs[j] >= xs[k]) {
            q.pop_back();
        }
        q.push_back(k);
        if q[0] + w < k {
            q.pop_front();
        }
        if k >= w {
            out.push(xs[q[0]]);
        }
    }
    out
}

/// Detector for a window of length `r`, rounded to whole grid steps.
pub fn cone_detector(s: Samples<'_>, r: f64) -> ConeDetector {
    let w = (r / s.dt).round().max(0.0) as usize;
    let mu = window_minima(s.values.iter().map(|z| z[0]), w);
    let mv = window_minima(s.values.iter().map(|z| z[1]), w);
    let values = mu
        .iter()
        .zip(&mv)
        .enumerate()
        .map(|(j, (a, b))| {
            let z = s.values[j + w];
            [z[0] - a, z[1] - b]
        })
        .collect();
    ConeDetector {
        window_steps: w,
        t0: s.t0,
        dt: s.dt,
        values,
    }
}

/// The smallest grid cone time `t ≥ a` with `t - v(t) ≥ r`, found as the
/// first detector zero.
pub fn tau_ar(s: Samples<'_>, a: f64, r: f64) -> Option<f64> {
    let det = cone_detector(s, r);
    let from = s.index_at_or_after(a).max(det.first_index());
    (from..s.values.len())
        .find(|&k| det.is_zero_at(k))
        .map(|k| s.time(k))
}
