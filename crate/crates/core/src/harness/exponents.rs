//! Exponent regressions on the discrete model.

use rand::RngCore;
use rayon::prelude::*;

use super::{ExperimentReport, ExperimentSpec, HarnessError};
use crate::burger::{BackwardReducer, Fed, ReducedWord, Symbol};
use crate::rng::{mix, par_replicas, replica_rng};
use crate::sampler::{
    count_empty_reductions, derive_params, first_order_time_with, Censored, SymbolLaw,
};
use crate::stats::{mean_se, ols, proportion};

fn check_grid(name: &str, grid: &[f64], min_points: usize) -> Result<(), HarnessError> {
    if grid.len() < min_points {
        return Err(HarnessError::InsufficientHits(format!(
            "{name} grid has {} points, need at least {min_points}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|&x| !(x > 0.0)) {
        return Err(HarnessError::InvalidSpec(format!(
            "{name} grid must be positive and increasing"
        )));
    }
    Ok(())
}

fn log_fit(report: &mut ExperimentReport, x: &[f64], y: &[f64]) -> Result<f64, HarnessError> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let fit =
        ols(&lx, &ly).ok_or_else(|| HarnessError::InsufficientHits("cannot fit slope".into()))?;
    report.estimate("slope", fit.slope, fit.slope_se);
    report.estimate("intercept", fit.intercept, fit.intercept_se);
    Ok(fit.slope)
}

/// Tail of the first time an order finds nothing to eat: slope of
/// `ln P(I > n)` against `ln n`.
pub fn run_e1(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let params = derive_params(spec.p)?;
    let grid: Vec<f64> = spec.n_grid.iter().map(|&n| n as f64).collect();
    check_grid("n", &grid, 5)?;
    let cap = *spec.n_grid.last().unwrap() as u64;
    let law = params.law();
    let times = par_replicas(
        spec.seed,
        spec.replicas,
        |rng, _| match first_order_time_with(&law, rng, cap) {
            Censored::Hit(i) => i,
            Censored::Censored { .. } => cap + 1,
        },
    );
    let mut report = ExperimentReport::new(spec);
    report.replica_count = spec.replicas;
    let mut probs = Vec::with_capacity(grid.len());
    for &n in &spec.n_grid {
        let hits = times.iter().filter(|&&i| i > n as u64).count() as u64;
        if hits == 0 {
            return Err(HarnessError::InsufficientHits(format!(
                "no replica survived past n={n}"
            )));
        }
        let (pr, se) = proportion(hits, spec.replicas);
        report.estimate(format!("P(I>{n})"), pr, se);
        probs.push(pr);
    }
    let slope = log_fit(&mut report, &grid, &probs)?;
    report.expect(
        "slope",
        -params.mu,
        "theory: tail of I is regularly varying with index mu",
    );
    report.expect("mu", params.mu, "closed form in p");
    report.pass = (slope + params.mu).abs() <= spec.tol;
    Ok(report)
}

const E2_CHUNKS: u64 = 64;
const E2_CHUNK_TRIALS: u64 = 1 << 14;

/// Probability that a word of length `2n` reduces to nothing: slope of
/// `ln P` against `ln n`. Trials are added in rounds until every grid point
/// has `min_hits` hits (or `max_trials` is spent) and at least `replicas`
/// trials were run.
pub fn run_e2(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let params = derive_params(spec.p)?;
    let grid: Vec<f64> = spec.n_grid.iter().map(|&n| n as f64).collect();
    check_grid("n", &grid, 3)?;
    if spec.n_grid.iter().any(|&n| 2 * n > 200) {
        return Err(HarnessError::InvalidSpec(
            "word length 2n above 200 is out of reach for rejection".into(),
        ));
    }
    let law = params.law();
    let mut report = ExperimentReport::new(spec);
    let mut probs = Vec::with_capacity(grid.len());
    for &n in &spec.n_grid {
        let stream = mix(spec.seed, n as u64);
        let (mut hits, mut trials, mut chunk) = (0u64, 0u64, 0u64);
        while (hits < spec.min_hits || trials < spec.replicas) && trials < spec.max_trials {
            let round: u64 = (chunk..chunk + E2_CHUNKS)
                .into_par_iter()
                .map(|k| {
                    count_empty_reductions(&law, n, E2_CHUNK_TRIALS, &mut replica_rng(stream, k))
                })
                .sum();
            hits += round;
            trials += E2_CHUNKS * E2_CHUNK_TRIALS;
            chunk += E2_CHUNKS;
        }
        if hits < spec.min_hits {
            return Err(HarnessError::InsufficientHits(format!(
                "n={n}: {hits} hits in {trials} trials, need {}",
                spec.min_hits
            )));
        }
        report.replica_count += trials;
        let (pr, se) = proportion(hits, trials);
        report.estimate(format!("P(empty,n={n})"), pr, se);
        report.estimate(format!("trials(n={n})"), trials as f64, 0.0);
        probs.push(pr);
    }
    let slope = log_fit(&mut report, &grid, &probs)?;
    let target = -(1.0 + 2.0 * params.mu);
    report.expect(
        "slope",
        target,
        "theory: empty-word probability decays like n^-(1+2mu)",
    );
    report.pass = (slope - target).abs() <= spec.tol;
    Ok(report)
}

/// Unmatched flexible orders in `X(1,k)` for each `k` in `grid`. An order
/// that finds nothing to eat is never eaten later, so the counts are read
/// off one forward pass.
fn unmatched_flex_counts(symbols: impl Iterator<Item = Symbol>, grid: &[usize]) -> Vec<u64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut stack = ReducedWord::empty();
    let mut flex = 0u64;
    let mut next = 0;
    for (k, s) in symbols.enumerate() {
        if stack.push(s) == Fed::Unfilled && s == Symbol::FlexibleO {
            flex += 1;
        }
        while next < grid.len() && grid[next] == k + 1 {
            out.push(flex);
            next += 1;
        }
        if next == grid.len() {
            break;
        }
    }
    out
}

/// Growth of the number of flexible orders left in `reduce(X(1,n))`: slope
/// of `ln E[#F]` against `ln n`, compared with `1 - mu`.
pub fn run_e3(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let params = derive_params(spec.p)?;
    let grid: Vec<f64> = spec.n_grid.iter().map(|&n| n as f64).collect();
    check_grid("n", &grid, 3)?;
    let law = params.law();
    let len = *spec.n_grid.last().unwrap();
    let rows = par_replicas(spec.seed, spec.replicas, |rng, _| {
        unmatched_flex_counts((0..len).map(|_| law.sample(rng)), &spec.n_grid)
    });
    let mut report = ExperimentReport::new(spec);
    report.replica_count = spec.replicas;
    let mut means = Vec::with_capacity(grid.len());
    for (g, &n) in spec.n_grid.iter().enumerate() {
        let col: Vec<f64> = rows.iter().map(|r| r[g] as f64).collect();
        let (m, se) = mean_se(&col);
        if !(m > 0.0) {
            return Err(HarnessError::InsufficientHits(format!(
                "no unmatched flexible order by n={n}"
            )));
        }
        report.estimate(format!("E[#F](n={n})"), m, se);
        means.push(m);
    }
    let slope = log_fit(&mut report, &grid, &means)?;
    report.expect(
        "slope",
        1.0 - params.mu,
        "theory, read as the growth exponent 1-mu of the count",
    );
    report.pass = (slope - (1.0 - params.mu)).abs() <= spec.tol;
    Ok(report)
}

/// State of a backward race when it stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Race {
    cheese: usize,
    /// `m` hamburgers were reached.
    finished: bool,
}

impl Race {
    /// `Some(won)` once `{J_m^H < J_k^C}` is decided. Cheeseburger counts
    /// never decrease, so reaching `k` of them settles the race even when
    /// the run was cut short.
    fn outcome(self, k: usize) -> Option<bool> {
        if self.cheese >= k {
            Some(false)
        } else if self.finished {
            Some(true)
        } else {
            None
        }
    }
}

/// Reads symbols right to left until the reduction holds `m` hamburgers,
/// `cap` cheeseburgers, or `max_steps` symbols were read.
fn backward_race<R: RngCore>(
    law: &SymbolLaw,
    m: usize,
    cap: usize,
    max_steps: u64,
    rng: &mut R,
) -> Race {
    let mut r = BackwardReducer::new();
    let mut steps = 0;
    while r.hamburgers() < m && r.cheeseburgers() < cap && steps < max_steps {
        r.prepend(law.sample(rng));
        steps += 1;
    }
    Race {
        cheese: r.cheeseburgers(),
        finished: r.hamburgers() >= m,
    }
}

/// Wins and undecided races among `races` for threshold `k`.
fn tally(races: &[Race], k: usize) -> (u64, u64) {
    races.iter().fold((0, 0), |(w, u), r| match r.outcome(k) {
        Some(true) => (w + 1, u),
        Some(false) => (w, u),
        None => (w, u + 1),
    })
}

/// Backward burger race: `P(J_m^H < J_{floor(eps m)}^C)` over the eps grid,
/// slope of its logarithm against `ln eps`, plus the symmetric point
/// `eps = 1`.
///
/// Waiting times between burger arrivals have infinite mean, so each race is
/// cut after `max_steps` symbols. Races still undecided then are counted as
/// losses for the lower bound and as wins for the upper one, and the slope
/// has to be within tolerance for both.
pub fn run_e4(spec: &ExperimentSpec) -> Result<ExperimentReport, HarnessError> {
    let params = derive_params(spec.p)?;
    if spec.m < 10 {
        return Err(HarnessError::InvalidSpec(format!(
            "m={} is too small, need at least 10",
            spec.m
        )));
    }
    let mut eps = spec.eps_grid.clone();
    eps.sort_by(f64::total_cmp);
    check_grid("eps", &eps, 3)?;
    if eps
        .iter()
        .any(|&e| e > 1.0 || ((e * spec.m as f64).floor() as usize) < 1)
    {
        return Err(HarnessError::InvalidSpec(
            "eps must lie in (0,1] with floor(eps m) >= 1".into(),
        ));
    }
    let law = params.law();
    let ks: Vec<usize> = eps
        .iter()
        .map(|e| (e * spec.m as f64).floor() as usize)
        .collect();
    let cap = *ks.iter().max().unwrap();
    let races = par_replicas(spec.seed, spec.replicas, |rng, _| {
        backward_race(&law, spec.m, cap, spec.max_steps, rng)
    });

    let mut report = ExperimentReport::new(spec);
    report.replica_count = spec.replicas + spec.samples;
    let n = spec.replicas;
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for (&e, &k) in eps.iter().zip(&ks) {
        let (wins, undecided) = tally(&races, k);
        if wins == 0 {
            return Err(HarnessError::InsufficientHits(format!(
                "no race won at eps={e}"
            )));
        }
        let (pl, se) = proportion(wins, n);
        let (ph, _) = proportion(wins + undecided, n);
        report.estimate(format!("P(eps={e})"), pl, se);
        report.estimate(format!("P_upper(eps={e})"), ph, se);
        report.estimate(format!("undecided(eps={e})"), undecided as f64, 0.0);
        lo.push(pl);
        hi.push(ph);
    }
    let slope_lo = log_fit(&mut report, &eps, &lo)?;
    let mut upper = ExperimentReport::new(spec);
    let slope_hi = log_fit(&mut upper, &eps, &hi)?;
    report.estimate("slope_upper", slope_hi, upper.estimates["slope"].stderr);
    report.expect("slope", 1.0, "theory: race probability is eps^(1+o(1))");

    let sym_seed = mix(spec.seed, u64::MAX);
    let even = par_replicas(sym_seed, spec.samples, |rng, _| {
        backward_race(&law, spec.m, spec.m, spec.max_steps, rng)
    });
    let (wins, undecided) = tally(&even, spec.m);
    let (sym_lo, sym_se) = proportion(wins, spec.samples.max(1));
    let (sym_hi, _) = proportion(wins + undecided, spec.samples.max(1));
    report.estimate("P(eps=1)", sym_lo, sym_se);
    report.estimate("P_upper(eps=1)", sym_hi, sym_se);
    report.expect("P(eps=1)", 0.5, "symmetry between the two burger types");

    let sym_ok = spec.samples == 0 || (sym_lo >= 0.45 && sym_hi <= 0.55);
    report.pass =
        (slope_lo - 1.0).abs() <= spec.tol && (slope_hi - 1.0).abs() <= spec.tol && sym_ok;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ExperimentId;

    #[test]
    fn flex_counts_by_prefix() {
        let w = crate::burger::Word::parse("FHFFcF", 1).unwrap();
        assert_eq!(
            unmatched_flex_counts(w.symbols().iter().copied(), &[1, 3, 4, 6]),
            vec![1, 1, 2, 3]
        );
    }

    #[test]
    fn censored_races_settle_once_cheeseburgers_arrive() {
        let cut = Race {
            cheese: 3,
            finished: false,
        };
        assert_eq!(cut.outcome(3), Some(false));
        assert_eq!(cut.outcome(4), None);
        let done = Race {
            cheese: 3,
            finished: true,
        };
        assert_eq!(done.outcome(4), Some(true));
        assert_eq!(tally(&[cut, done], 4), (1, 1));
    }

    #[test]
    fn short_grids_are_refused() {
        let mut spec = ExperimentSpec::new(ExperimentId::E1);
        spec.n_grid = vec![16];
        assert!(matches!(
            run_e1(&spec),
            Err(HarnessError::InsufficientHits(_))
        ));
        let mut spec = ExperimentSpec::new(ExperimentId::E3);
        spec.n_grid = vec![64];
        assert!(matches!(
            run_e3(&spec),
            Err(HarnessError::InsufficientHits(_))
        ));
        let mut spec = ExperimentSpec::new(ExperimentId::E4);
        spec.m = 5;
        assert!(matches!(run_e4(&spec), Err(HarnessError::InvalidSpec(_))));
    }

    #[test]
    fn small_runs_are_deterministic() {
        let mut spec = ExperimentSpec::new(ExperimentId::E1);
        spec.replicas = 20_000;
        let a = run_e1(&spec).unwrap();
        let b = run_e1(&spec).unwrap();
        assert_eq!(a.estimates, b.estimates);
        assert!(a.value("slope").unwrap() < 0.0);
    }
}
