//! The i.i.d. symbol law and rejection samplers for the conditionings used
//! by the scaling-limit statements.

use std::f64::consts::PI;

use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::burger::{BackwardReducer, Fed, Prepended, ReducedWord, Symbol, Word};
use crate::rng::{rng_from_seed, SimRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplerError {
    #[error("p = {0} outside (0, 1/2]")]
    OutOfRange(f64),
    #[error("no acceptance within {max_trials} trials")]
    Exhausted { max_trials: u64 },
    #[error("length must be at least 1")]
    ZeroLength,
}

/// Model parameters derived from the flexible-order intensity `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub p: f64,
    /// FK cluster weight `4p²/(1-p)²`.
    pub q: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Cone exponent, `kappa / 8`.
    pub mu: f64,
}

impl ModelParams {
    /// Probabilities of `H, C, h, c, F`.
    pub fn probabilities(&self) -> [f64; 5] {
        let p = self.p;
        [0.25, 0.25, (1.0 - p) / 4.0, (1.0 - p) / 4.0, p / 2.0]
    }

    pub fn probability(&self, s: Symbol) -> f64 {
        let i = Symbol::ALL.iter().position(|&x| x == s).unwrap();
        self.probabilities()[i]
    }

    pub fn law(&self) -> SymbolLaw {
        SymbolLaw::new(self)
    }
}

/// `mu = pi / (2 (pi - atan(sqrt(1-2p)/p)))`.
pub fn cone_exponent(p: f64) -> f64 {
    PI / (2.0 * (PI - ((1.0 - 2.0 * p).sqrt() / p).atan()))
}

pub fn derive_params(p: f64) -> Result<ModelParams, SamplerError> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(SamplerError::OutOfRange(p));
    }
    let mu = cone_exponent(p);
    let kappa = 8.0 * mu;
    Ok(ModelParams {
        p,
        q: 4.0 * p * p / ((1.0 - p) * (1.0 - p)),
        kappa,
        gamma: 4.0 / kappa.sqrt(),
        mu,
    })
}

/// Inverse-CDF sampler over 64-bit integers.
#[derive(Clone, Copy, Debug)]
pub struct SymbolLaw {
    cuts: [u64; 4],
}

impl SymbolLaw {
    pub fn new(params: &ModelParams) -> Self {
        let probs = params.probabilities();
        let scale = 2f64.powi(64);
        let mut acc = 0.0;
        let mut cuts = [0u64; 4];
        for (cut, pr) in cuts.iter_mut().zip(probs) {
            acc += pr;
            *cut = if acc >= 1.0 {
                u64::MAX
            } else {
                (acc * scale) as u64
            };
        }
        SymbolLaw { cuts }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Symbol {
        let u = rng.next_u64();
        if u < self.cuts[0] {
            Symbol::HamburgerB
        } else if u < self.cuts[1] {
            Symbol::CheeseburgerB
        } else if u < self.cuts[2] {
            Symbol::HamburgerO
        } else if u < self.cuts[3] {
            Symbol::CheeseburgerO
        } else {
            Symbol::FlexibleO
        }
    }
}

pub fn iid_word(params: &ModelParams, n: usize, origin: i64, seed: u64) -> Word {
    let mut rng = rng_from_seed(seed);
    iid_word_with(&params.law(), n, origin, &mut rng)
}

pub fn iid_word_with<R: RngCore + ?Sized>(
    law: &SymbolLaw,
    n: usize,
    origin: i64,
    rng: &mut R,
) -> Word {
    Word::new((0..n).map(|_| law.sample(rng)).collect(), origin)
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplerReport {
    #[serde(serialize_with = "ser_word")]
    pub word: Word,
    pub trials: u64,
    pub seed: u64,
    pub acceptance_estimate: f64,
}

fn ser_word<S: serde::Serializer>(w: &Word, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_text())
}

/// One rejection trial for `{R(X_1 ... X_{2n}) = ∅}`. Aborts at the first
/// unfilled order or once the stack outgrows the remaining length. On
/// acceptance the word is left in `buf`.
pub fn empty_reduction_trial<R: RngCore + ?Sized>(
    law: &SymbolLaw,
    len: usize,
    rng: &mut R,
    stack: &mut ReducedWord,
    buf: &mut Vec<Symbol>,
) -> bool {
    *stack = ReducedWord::empty();
    buf.clear();
    for k in 0..len {
        let s = law.sample(rng);
        buf.push(s);
        if stack.push(s) == Fed::Unfilled || stack.n_burgers() > len - k - 1 {
            return false;
        }
    }
    stack.is_empty()
}

/// Counts accepted trials among `trials` attempts at length `2n`.
pub fn count_empty_reductions<R: RngCore + ?Sized>(
    law: &SymbolLaw,
    n: usize,
    trials: u64,
    rng: &mut R,
) -> u64 {
    let mut stack = ReducedWord::empty();
    let mut buf = Vec::with_capacity(2 * n);
    (0..trials)
        .filter(|_| empty_reduction_trial(law, 2 * n, rng, &mut stack, &mut buf))
        .count() as u64
}

/// Rejection sample of `X_1 ... X_{2n}` conditioned on reducing to the empty
/// word.
pub fn sample_empty_reduction(
    params: &ModelParams,
    n: usize,
    seed: u64,
    max_trials: u64,
) -> Result<SamplerReport, SamplerError> {
    let mut rng = rng_from_seed(seed);
    let (word, trials) = sample_empty_reduction_with(&params.law(), n, &mut rng, max_trials)?;
    Ok(SamplerReport {
        word,
        trials,
        seed,
        acceptance_estimate: 1.0 / trials as f64,
    })
}

pub fn sample_empty_reduction_with<R: RngCore + ?Sized>(
    law: &SymbolLaw,
    n: usize,
    rng: &mut R,
    max_trials: u64,
) -> Result<(Word, u64), SamplerError> {
    if n == 0 {
        return Err(SamplerError::ZeroLength);
    }
    let mut stack = ReducedWord::empty();
    let mut buf = Vec::with_capacity(2 * n);
    for trial in 1..=max_trials {
        if empty_reduction_trial(law, 2 * n, rng, &mut stack, &mut buf) {
            return Ok((Word::forward(buf), trial));
        }
    }
    Err(SamplerError::Exhausted { max_trials })
}

/// Rejection sample of `X_{-n} ... X_{-1}` conditioned on `{J > n}`: no
/// backward reduction contains a burger.
pub fn sample_no_burgers_backward(
    params: &ModelParams,
    n: usize,
    seed: u64,
    max_trials: u64,
) -> Result<SamplerReport, SamplerError> {
    if n == 0 {
        return Err(SamplerError::ZeroLength);
    }
    let law = params.law();
    let mut rng = rng_from_seed(seed);
    let mut rev = Vec::with_capacity(n);
    'trial: for trial in 1..=max_trials {
        rev.clear();
        let mut r = BackwardReducer::new();
        for _ in 0..n {
            let s = law.sample(&mut rng);
            rev.push(s);
            if let Prepended::BurgerAdded(_) = r.prepend(s) {
                continue 'trial;
            }
        }
        let symbols: Vec<Symbol> = rev.iter().rev().copied().collect();
        return Ok(SamplerReport {
            word: Word::backward(symbols),
            trials: trial,
            seed,
            acceptance_estimate: 1.0 / trial as f64,
        });
    }
    Err(SamplerError::Exhausted { max_trials })
}

/// Outcome of a forward search capped at a maximum length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Censored {
    Hit(u64),
    Censored { cap: u64 },
}

/// `I`: the first `i` such that `X(1,i)` contains an order.
pub fn first_order_time(params: &ModelParams, seed: u64, cap: u64) -> Censored {
    first_order_time_with(&params.law(), &mut rng_from_seed(seed), cap)
}

pub fn first_order_time_with<R: RngCore + ?Sized>(
    law: &SymbolLaw,
    rng: &mut R,
    cap: u64,
) -> Censored {
    let mut stack = ReducedWord::empty();
    for i in 1..=cap {
        if stack.push(law.sample(rng)) == Fed::Unfilled {
            return Censored::Hit(i);
        }
    }
    Censored::Censored { cap }
}

/// `I` for a given word: index of the first order with nothing to eat.
pub fn first_order_time_in(w: &Word) -> Option<i64> {
    let mut stack = ReducedWord::empty();
    w.iter_indexed()
        .find(|&(_, s)| stack.push(s) == Fed::Unfilled)
        .map(|(i, _)| i)
}

/// Runs a fresh rejection trial stream and returns the acceptance count
/// together with the number of trials, used for acceptance-rate estimates.
pub fn empty_reduction_rate(params: &ModelParams, n: usize, trials: u64, seed: u64) -> (u64, u64) {
    let mut rng: SimRng = rng_from_seed(seed);
    (
        count_empty_reductions(&params.law(), n, trials, &mut rng),
        trials,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burger::{backward_j, reduce};

    #[test]
    fn p_one_third_is_the_uniform_map_point() {
        let m = derive_params(1.0 / 3.0).unwrap();
        assert!((m.mu - 0.75).abs() < 1e-12);
        assert!((m.kappa - 6.0).abs() < 1e-12);
        assert!((m.q - 1.0).abs() < 1e-12);
        assert!((m.gamma - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn p_one_half_boundary() {
        let m = derive_params(0.5).unwrap();
        assert!((m.mu - 0.5).abs() < 1e-15);
        assert!((m.kappa - 4.0).abs() < 1e-14);
    }

    #[test]
    fn p_one_quarter_dictionary() {
        let m = derive_params(0.25).unwrap();
        assert!((m.q - 4.0 / 9.0).abs() < 1e-15);
        assert!((m.mu - 0.8221).abs() < 1e-4);
        assert!((m.kappa - 6.577).abs() < 1e-3);
        assert!((m.q - (2.0 + 2.0 * (8.0 * PI / m.kappa).cos())).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_p() {
        for p in [0.0, -0.1, 0.51, f64::NAN] {
            assert!(matches!(derive_params(p), Err(SamplerError::OutOfRange(_))));
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        for p in [0.1, 0.25, 1.0 / 3.0, 0.45] {
            let s: f64 = derive_params(p).unwrap().probabilities().iter().sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn iid_word_is_deterministic() {
        let m = derive_params(1.0 / 3.0).unwrap();
        assert!(iid_word(&m, 0, 1, 3).is_empty());
        assert_eq!(iid_word(&m, 500, 1, 3), iid_word(&m, 500, 1, 3));
        assert_ne!(iid_word(&m, 500, 1, 3), iid_word(&m, 500, 1, 4));
    }

    #[test]
    fn empirical_frequencies_match_law() {
        let m = derive_params(1.0 / 3.0).unwrap();
        let n = 1_000_000usize;
        let w = iid_word(&m, n, 1, 2024);
        for s in Symbol::ALL {
            let pr = m.probability(s);
            let se = (pr * (1.0 - pr) / n as f64).sqrt();
            let freq = w.count(s) as f64 / n as f64;
            assert!((freq - pr).abs() < 3.0 * se, "{s:?}: {freq} vs {pr}");
        }
    }

    #[test]
    fn empty_reduction_samples_reduce_to_nothing() {
        let m = derive_params(1.0 / 3.0).unwrap();
        for seed in 0..50 {
            let rep = sample_empty_reduction(&m, 4, seed, 1_000_000).unwrap();
            assert_eq!(rep.word.len(), 8);
            assert!(reduce(&rep.word).is_empty());
            assert_eq!(rep.acceptance_estimate, 1.0 / rep.trials as f64);
        }
        let one = sample_empty_reduction(&m, 1, 9, 1000).unwrap();
        assert!(one.word.symbols()[0].is_burger() && one.word.symbols()[1].is_order());
    }

    #[test]
    fn exhausted_when_trials_run_out() {
        let m = derive_params(1.0 / 3.0).unwrap();
        assert_eq!(
            sample_empty_reduction(&m, 200, 1, 3).unwrap_err(),
            SamplerError::Exhausted { max_trials: 3 }
        );
    }

    #[test]
    fn no_burger_samples_hold_only_orders() {
        let m = derive_params(1.0 / 3.0).unwrap();
        for seed in 0..50 {
            let rep = sample_no_burgers_backward(&m, 12, seed, 1_000_000).unwrap();
            assert_eq!(backward_j(&rep.word).unwrap(), None);
            assert!(reduce(&rep.word).burgers().is_empty());
        }
    }

    #[test]
    fn no_burger_acceptance_at_length_one_is_one_half() {
        let m = derive_params(1.0 / 3.0).unwrap();
        let law = m.law();
        let mut rng = rng_from_seed(5);
        let n = 200_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng).is_order()).count();
        let se = (0.25 / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 4.0 * se);
    }

    #[test]
    fn first_order_time_examples() {
        let w = Word::parse("HhcH", 1).unwrap();
        assert_eq!(first_order_time_in(&w), Some(3));
        let w = Word::parse("cH", 1).unwrap();
        assert_eq!(first_order_time_in(&w), Some(1));
        let m = derive_params(1.0 / 3.0).unwrap();
        let mut hits = 0;
        for seed in 0..1000 {
            match first_order_time(&m, seed, 4) {
                Censored::Hit(i) => {
                    assert!(i <= 4);
                    hits += 1;
                }
                Censored::Censored { cap } => assert_eq!(cap, 4),
            }
        }
        assert!(hits > 0);
    }
}
