//! The lattice walk `D = (d, d*)` of a word, its diffusive rescaling, and
//! π/2-cone times.

mod cone;

use std::fmt::Write as _;

use thiserror::Error;

use crate::burger::{match_indices, resolve_flex_partial, BurgerError, Symbol, Word};

pub use cone::{
    cone_detector, cone_records, cone_times_from_word, crossing_steps, entrance_steps, iota_ar,
    maximal_cone_selection, maximal_flexible_time, tau_ar, ConeDetector, ConeRecord, Direction,
    Samples, Selection,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("flexible order at index {0}; resolve the word first")]
    FlexiblePresent(i64),
    #[error(transparent)]
    Burger(#[from] BurgerError),
}

/// Integer walk with one point per integer time, piecewise linear between.
///
/// Point `k` sits at time `start_time + k`. A word indexed `a..=b` yields
/// times `a-1..=b`. The walk is anchored at time 0 when that time is in
/// range; a word lying entirely at negative indices is anchored at its right
/// end, so `D(j) = -D(Y(j+1, b))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePath {
    start_time: i64,
    points: Vec<(i64, i64)>,
    n_scale: u64,
}

impl LatticePath {
    pub fn start_time(&self) -> i64 {
        self.start_time
    }

    pub fn end_time(&self) -> i64 {
        self.start_time + self.points.len() as i64 - 1
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn n_scale(&self) -> u64 {
        self.n_scale
    }

    pub fn with_scale(mut self, n_scale: u64) -> Self {
        assert!(n_scale > 0);
        self.n_scale = n_scale;
        self
    }

    pub fn at(&self, j: i64) -> Option<(i64, i64)> {
        let k = j - self.start_time;
        (k >= 0)
            .then(|| self.points.get(k as usize).copied())
            .flatten()
    }

    pub fn endpoint(&self) -> (i64, i64) {
        *self.points.last().unwrap()
    }

    pub fn in_quadrant(&self) -> bool {
        self.points.iter().all(|&(d, e)| d >= 0 && e >= 0)
    }

    /// `Z^n(t) = n^{-1/2} D(nt)`, linearly interpolated. `None` outside the
    /// path's time range.
    pub fn scaled(&self, t: f64) -> Option<(f64, f64)> {
        let n = self.n_scale as f64;
        let x = t * n - self.start_time as f64;
        let last = (self.points.len() - 1) as f64;
        if !(-1e-9..=last + 1e-9).contains(&x) {
            return None;
        }
        let x = x.clamp(0.0, last);
        let k = (x.floor() as usize).min(self.points.len() - 1);
        let f = x - k as f64;
        let (a, b) = self.points[k];
        let (c, d) = self.points.get(k + 1).copied().unwrap_or((a, b));
        let s = n.sqrt();
        Some((
            (a as f64 + f * (c - a) as f64) / s,
            (b as f64 + f * (d - b) as f64) / s,
        ))
    }

    /// Unscaled values as floating point, one per integer time.
    pub fn values(&self) -> Vec<[f64; 2]> {
        self.points
            .iter()
            .map(|&(d, e)| [d as f64, e as f64])
            .collect()
    }

    /// Values of `Z^n` at the grid times `j / n`.
    pub fn scaled_values(&self) -> Vec<[f64; 2]> {
        let s = (self.n_scale as f64).sqrt();
        self.points
            .iter()
            .map(|&(d, e)| [d as f64 / s, e as f64 / s])
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,d,d_star\n");
        for (k, &(d, e)) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.start_time + k as i64, d, e);
        }
        out
    }

    pub fn to_scaled_csv(&self) -> String {
        let n = self.n_scale as f64;
        let mut out = String::from("t,u,v\n");
        for (k, [u, v]) in self.scaled_values().into_iter().enumerate() {
            let t = (self.start_time + k as i64) as f64 / n;
            let _ = writeln!(out, "{t},{u},{v}");
        }
        out
    }
}

/// The walk of a Y-word (no flexible orders).
pub fn lattice_path(y: &Word) -> Result<LatticePath, PathError> {
    if let Some((i, _)) = y.iter_indexed().find(|&(_, s)| s == Symbol::FlexibleO) {
        return Err(PathError::FlexiblePresent(i));
    }
    let start_time = y.origin() - 1;
    let mut points = Vec::with_capacity(y.len() + 1);
    let (mut d, mut e) = (0i64, 0i64);
    points.push((0, 0));
    for &s in y.symbols() {
        let (a, b) = s.step();
        d += a;
        e += b;
        points.push((d, e));
    }
    let anchor = if start_time <= 0 && 0 <= y.last_index() {
        (0 - start_time) as usize
    } else if y.last_index() < 0 {
        points.len() - 1
    } else {
        0
    };
    let (d0, e0) = points[anchor];
    for p in &mut points {
        p.0 -= d0;
        p.1 -= e0;
    }
    Ok(LatticePath {
        start_time,
        points,
        n_scale: 1,
    })
}

/// Path-side test for `{R(w) = ∅}`: the walk of the Y-word stays in the
/// closed quadrant and returns to the origin.
///
/// A flexible order with no partner inside `w` would eat a burger from
/// before the word, pushing a coordinate below zero, so such words fail.
pub fn quadrant_criterion(w: &Word) -> bool {
    let m = match_indices(w);
    let y = resolve_flex_partial(w, &m);
    match lattice_path(&y) {
        Ok(path) => path.in_quadrant() && path.endpoint() == (0, 0),
        Err(_) => false,
    }
}
