//! Structural invariants checked on many random words at once.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{ExperimentReport, ExperimentSpec, HarnessError};
use crate::burger::{match_indices, monoid_concat, reduce, resolve_flex, MatchTable, Symbol, Word};
use crate::loops::{edge_count_check, loop_forest, next_exit, surrounding_loops};
use crate::path::{
    cone_detector, cone_times_from_word, entrance_steps, iota_ar, lattice_path, quadrant_criterion,
    Samples,
};
use crate::rng::{mix, par_replicas};
use crate::sampler::{
    derive_params, iid_word_with, sample_empty_reduction_with, ModelParams, SamplerError,
};

/// Violation counts per invariant, plus how many words were checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub words: u64,
    pub checks: u64,
    pub violations: BTreeMap<String, u64>,
}

impl SweepSummary {
    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }

    pub fn merge(&mut self, other: &SweepSummary) {
        self.words += other.words;
        self.checks += other.checks;
        for (k, v) in &other.violations {
            *self.violations.entry(k.clone()).or_default() += v;
        }
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.checks += 1;
        let slot = self.violations.entry(name.to_string()).or_default();
        if !ok {
            *slot += 1;
        }
    }
}

const NAMES: [&str; 14] = [
    "match",
    "idempotent",
    "concat",
    "lengths",
    "quadrant",
    "cone_entrance",
    "cone_order",
    "detector",
    "iota",
    "laminar",
    "area_boundary",
    "next_exit",
    "surrounding",
    "edge_count",
];

fn match_ok(w: &Word, m: &MatchTable) -> bool {
    let pairs = m.pairs();
    pairs.iter().all(|&(b, o)| {
        b < o
            && m.phi(b) == Some(o)
            && m.phi(o) == Some(b)
            && w.get(o).zip(w.get(b)).is_some_and(|(o, b)| o.accepts(b))
    }) && pairs.len() * 2 + m.unmatched().len() == w.len()
}

/// Checks every invariant that applies to `w` and records the outcome.
/// Words with unmatched flexible orders are cut at them: an unmatched
/// flexible order sees an empty burger stack, so each piece reduces exactly
/// as it does inside the whole word.
pub fn sweep_word(w: &Word, summary: &mut SweepSummary) {
    summary.words += 1;
    let m = match_indices(w);
    let r = reduce(w);
    summary.check("match", match_ok(w, &m));
    summary.check("idempotent", reduce(&r.to_word(0)) == r);
    let mid = w.origin() + w.len() as i64 / 2;
    let (left, right) = (w.slice(w.origin(), mid - 1), w.slice(mid, w.last_index()));
    summary.check("concat", monoid_concat(reduce(&left), &reduce(&right)) == r);
    summary.check("lengths", r.len() + 2 * m.n_pairs() == w.len());
    summary.check("quadrant", r.is_empty() == quadrant_criterion(w));
    if r.is_empty() {
        summary.check(
            "edge_count",
            edge_count_check(w) == Ok((w.len() / 2, w.len())),
        );
    }

    let cuts: Vec<i64> = m
        .unmatched()
        .into_iter()
        .filter(|&i| w.get(i) == Some(Symbol::FlexibleO))
        .collect();
    let mut start = w.origin();
    for end in cuts
        .iter()
        .copied()
        .chain(std::iter::once(w.last_index() + 1))
    {
        if end > start {
            sweep_segment(&w.slice(start, end - 1), summary);
        }
        start = end + 1;
    }
}

fn sweep_segment(w: &Word, summary: &mut SweepSummary) {
    let m = match_indices(w);
    let y = match resolve_flex(w, &m) {
        Ok(y) => y,
        Err(_) => {
            summary.check("match", false);
            return;
        }
    };
    let path = lattice_path(&y).expect("resolved");
    let r = reduce(w);
    let disp = (
        r.count(Symbol::HamburgerB) as i64 - r.count(Symbol::HamburgerO) as i64,
        r.count(Symbol::CheeseburgerB) as i64 - r.count(Symbol::CheeseburgerO) as i64,
    );
    let (p0, p1) = (path.points()[0], *path.points().last().unwrap());
    summary.check("lengths", (p1.0 - p0.0, p1.1 - p0.1) == disp);

    let values = path.values();
    let t0 = path.start_time();
    let entrance = entrance_steps(&values);
    let records = cone_times_from_word(w, &m, 1).expect("segment is matched");
    for rec in &records {
        let i = rec.index.unwrap();
        let kt = (i - 1 - t0) as usize;
        summary.check(
            "cone_entrance",
            entrance[kt] as i64 + t0 == m.phi(i).unwrap(),
        );
        summary.check("cone_order", rec.u <= rec.v && rec.v <= rec.t);
    }
    let samples = Samples {
        t0: t0 as f64,
        dt: 1.0,
        values: &values,
    };
    for r_steps in [1usize, 3, 10] {
        let det = cone_detector(samples, r_steps as f64);
        let ok = (r_steps..values.len()).all(|k| det.is_zero_at(k) == (entrance[k] + r_steps <= k));
        summary.check("detector", ok);
    }

    let n = (w.len() as u64 / 2).max(1);
    for a_off in [0, w.len() as i64 * 3 / 10, w.len() as i64 * 7 / 10] {
        for r_steps in [2i64, 10] {
            let a_idx = w.origin() + a_off;
            let mut brute = None;
            for (i, s) in w.iter_indexed() {
                if s == Symbol::FlexibleO && i >= a_idx && i - m.phi(i).unwrap() >= r_steps - 1 {
                    brute = Some(i);
                    break;
                }
            }
            let (a, r) = (a_idx as f64 / n as f64, r_steps as f64 / n as f64);
            summary.check("iota", iota_ar(w, &m, a, r, n) == brute);
        }
    }

    let forest = loop_forest(w, &m).expect("segment is matched");
    let nodes = &forest.nodes;
    let mut laminar = true;
    for (x, a) in nodes.iter().enumerate() {
        for b in &nodes[x + 1..] {
            let disjoint = a.close < b.open || b.close < a.open;
            let nested = (a.open <= b.open && b.close <= a.close)
                || (b.open <= a.open && a.close <= b.close);
            laminar &= disjoint || nested;
        }
        if let Some(p) = a.parent {
            laminar &= nodes[p].open < a.open && a.close < nodes[p].close;
        }
    }
    summary.check("laminar", laminar);
    for node in nodes {
        let inside = (node.open + 1..node.close)
            .filter(|&k| w.get(k).unwrap().is_order() && m.phi(k).is_none_or(|b| b < node.open))
            .count() as u64;
        summary.check(
            "area_boundary",
            node.area == (node.close - node.open) as u64 && node.boundary_len == inside + 1,
        );
        let scan = next_exit(w, &m, node.close);
        summary.check(
            "next_exit",
            scan.map(|e| e.index) == node.next_exit && scan.map(|e| e.alternates) == node.component,
        );
    }

    let step = (w.len() / 8).max(1);
    for i in (w.origin()..=w.last_index()).step_by(step) {
        let s = surrounding_loops(w, &m, i, usize::MAX);
        let mut ok = s
            .thetas
            .iter()
            .all(|&(b, k)| b < i && i < k && w.get(k) == Some(Symbol::FlexibleO));
        ok &= s.thetas.iter().all(|&(b, k)| m.phi(k) == Some(b));
        for pair in s.thetas.windows(2) {
            let ((b0, k0), (b1, k1)) = (pair[0], pair[1]);
            ok &= b1 < b0 && k0 < k1 && w.get(b0) != w.get(b1);
        }
        summary.check("surrounding", ok);
    }
}

fn fresh() -> SweepSummary {
    let mut s = SweepSummary::default();
    for name in NAMES {
        s.violations.insert(name.to_string(), 0);
    }
    s
}

fn merge_all(parts: Vec<SweepSummary>) -> SweepSummary {
    let mut total = fresh();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Sweep over `count` words of length `2n` conditioned to reduce to nothing.
pub fn sweep_conditioned(
    params: &ModelParams,
    n: usize,
    count: u64,
    seed: u64,
    max_trials: u64,
) -> Result<SweepSummary, SamplerError> {
    let law = params.law();
    let parts: Result<Vec<SweepSummary>, SamplerError> = par_replicas(seed, count, |rng, _| {
        let (w, _) = sample_empty_reduction_with(&law, n, rng, max_trials)?;
        let mut s = SweepSummary::default();
        sweep_word(&w, &mut s);
        s.check("quadrant", quadrant_criterion(&w));
        Ok(s)
    })
    .into_iter()
    .collect();
    Ok(merge_all(parts?))
}

/// Sweep over `count` unconditioned words of length `len`.
pub fn sweep_iid(params: &ModelParams, len: usize, count: u64, seed: u64) -> SweepSummary {
    let law = params.law();
    merge_all(par_replicas(seed, count, |rng, _| {
        let mut s = SweepSummary::default();
        sweep_word(&iid_word_with(&law, len, 1, rng), &mut s);
        s
    }))
}

/// Conditioned words of half-length `n_grid[0]` (`replicas` of them) and
/// iid words of length `n_grid[1]` (`samples` of them); passes with zero
/// violations.
pub fn run_e9(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let params = derive_params(spec.p)?;
    let [n_cond, len_iid] = spec.n_grid[..] else {
        return Err(HarnessError::InvalidSpec(
            "n grid must be [half-length, iid length]".into(),
        ));
    };
    let cond = sweep_conditioned(
        &params,
        n_cond,
        spec.replicas,
        mix(spec.seed, 0),
        spec.max_trials,
    )?;
    let iid = sweep_iid(&params, len_iid, spec.samples, mix(spec.seed, 1));
    let mut report = ExperimentReport::new(spec);
    report.replica_count = cond.words + iid.words;
    for (label, s) in [("conditioned", &cond), ("iid", &iid)] {
        for (name, &v) in &s.violations {
            report.estimate(format!("{label}.{name}"), v as f64, 0.0);
        }
        report.estimate(format!("{label}.checks"), s.checks as f64, 0.0);
        report.expect(format!("{label}.violations"), 0.0, "structural identity");
    }
    report.pass = cond.total_violations() == 0 && iid.total_violations() == 0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps_are_clean() {
        let params = derive_params(1.0 / 3.0).unwrap();
        let cond = sweep_conditioned(&params, 10, 200, 3, 1 << 30).unwrap();
        assert_eq!(cond.total_violations(), 0, "{:?}", cond.violations);
        let iid = sweep_iid(&params, 300, 200, 4);
        assert_eq!(iid.total_violations(), 0, "{:?}", iid.violations);
        assert!(iid.checks > 200 * 10);
    }

    #[test]
    fn words_with_unmatched_orders_are_cut() {
        let mut s = fresh();
        sweep_word(&Word::parse("FHCFhFcHHFF", 1).unwrap(), &mut s);
        assert_eq!(s.total_violations(), 0, "{:?}", s.violations);
    }
}
