mod common;

use common::*;
use hcburger::burger::{
    match_indices, monoid_concat, reduce, reduce_symbols, resolve_flex, Symbol, Word,
};
use hcburger::loops::{loop_forest, next_exit};
use hcburger::path::{lattice_path, quadrant_criterion};
use hcburger::rng::rng_from_seed;
use hcburger::sampler::{count_empty_reductions, derive_params, sample_empty_reduction_with};
use hcburger::stats::chi_square_quantile;
use proptest::prelude::*;

#[test]
fn reduction_matches_rewriting_up_to_six() {
    for k in 0..=6 {
        for w in all_words(k) {
            assert_eq!(
                reduce_symbols(&w).to_text(),
                rewrite_normal_form(&w),
                "{}",
                text(&w)
            );
        }
    }
}

#[test]
fn reduction_is_a_morphism_on_short_words() {
    for len in 0..=8 {
        for w in all_words(len) {
            let whole = reduce_symbols(&w);
            for cut in 0..=len {
                let joined = monoid_concat(reduce_symbols(&w[..cut]), &reduce_symbols(&w[cut..]));
                assert_eq!(joined, whole, "{} cut at {cut}", text(&w));
            }
        }
    }
}

#[test]
fn exhaustive_quadrant_equivalence_length_six() {
    for w in all_words(6) {
        let word = Word::forward(w.clone());
        let empty = reduce(&word).is_empty();
        assert_eq!(empty, brute_quadrant(&w), "{}", text(&w));
        assert_eq!(empty, quadrant_criterion(&word), "{}", text(&w));
    }
}

#[test]
fn empty_probability_is_nonincreasing_exactly() {
    let probs: Vec<f64> = (1..=4)
        .map(|n| exact_empty_probability(n, 1.0 / 3.0))
        .collect();
    for pair in probs.windows(2) {
        assert!(pair[1] <= pair[0], "{probs:?}");
    }
    // HF, CF, Hh, Cc.
    assert!((probs[0] - (2.0 * 0.25 / 6.0 + 2.0 * 0.25 / 6.0)).abs() < 1e-15);
}

#[test]
fn acceptance_rate_is_nonincreasing_in_n() {
    let law = derive_params(1.0 / 3.0).unwrap().law();
    let trials = 400_000;
    let rates: Vec<f64> = (1..=6)
        .map(|n| {
            count_empty_reductions(&law, n, trials, &mut rng_from_seed(n as u64)) as f64
                / trials as f64
        })
        .collect();
    for pair in rates.windows(2) {
        let se = (pair[0] / trials as f64).sqrt();
        assert!(pair[1] <= pair[0] + 3.0 * se, "{rates:?}");
    }
}

#[test]
fn conditioned_sampler_matches_exact_law() {
    let (n, p) = (3, 1.0 / 3.0);
    let exact = exact_conditional_law(n, p);
    let law = derive_params(p).unwrap().law();
    let mut rng = rng_from_seed(17);
    let draws = 100_000;
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..draws {
        let (w, _) = sample_empty_reduction_with(&law, n, &mut rng, 1 << 30).unwrap();
        *counts.entry(w.to_text()).or_insert(0u64) += 1;
    }
    for key in counts.keys() {
        assert!(
            exact.contains_key(key),
            "sampled {key} is not in the support"
        );
    }
    let stat: f64 = exact
        .iter()
        .map(|(k, &pr)| {
            let e = pr * draws as f64;
            let o = *counts.get(k).unwrap_or(&0) as f64;
            (o - e).powi(2) / e
        })
        .sum();
    let df = (exact.len() - 1) as f64;
    assert!(
        stat < chi_square_quantile(0.999, df),
        "chi2 {stat} with df {df}"
    );
}

/// The exit `i*'` of a component, by definition, compared with the scan.
#[test]
fn next_exit_agrees_with_definition_on_closed_words() {
    let mut non_alternating = 0;
    for len in [2, 4, 6, 8] {
        for w in all_words(len) {
            let mate = brute_match(&w);
            if mate.iter().any(Option::is_none) {
                continue;
            }
            let word = Word::forward(w.clone());
            let m = match_indices(&word);
            for i in 0..len {
                if w[i] != Symbol::FlexibleO {
                    continue;
                }
                let b = mate[i].unwrap();
                let expected =
                    (i + 1..len).find(|&k| w[k] == Symbol::FlexibleO && mate[k].unwrap() < b);
                let got = next_exit(&word, &m, i as i64 + 1);
                assert_eq!(
                    got.map(|e| e.index as usize - 1),
                    expected,
                    "{} at {i}",
                    text(&w)
                );
                if let (Some(e), Some(k)) = (got, expected) {
                    assert_eq!(e.alternates, w[mate[k].unwrap()] != w[b]);
                    non_alternating += usize::from(!e.alternates);
                }
            }
        }
    }
    // Exits need not alternate: in HHFF the second order consumes another
    // hamburger.
    assert!(non_alternating > 0);
    let word = Word::parse("HHFF", 1).unwrap();
    let e = next_exit(&word, &match_indices(&word), 3).unwrap();
    assert_eq!((e.index, e.alternates), (4, false));
}

#[test]
fn loop_areas_match_brute_boundary() {
    for w in all_words(8) {
        let mate = brute_match(&w);
        if mate.iter().any(Option::is_none) {
            continue;
        }
        let word = Word::forward(w.clone());
        let forest = loop_forest(&word, &match_indices(&word)).unwrap();
        for node in &forest.nodes {
            let (a, b) = (node.open as usize - 1, node.close as usize - 1);
            let inner = rewrite_normal_form(&w[a..=b]);
            assert_eq!(node.boundary_len as usize, inner.len() + 1, "{}", text(&w));
            assert_eq!(node.area as usize, b - a);
        }
    }
}

fn symbols(max: usize) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(prop::sample::select(ALPHABET.to_vec()), 0..max)
}

proptest! {
    #[test]
    fn matching_agrees_with_brute_force(w in symbols(200), origin in -20i64..20) {
        let word = Word::new(w.clone(), origin);
        let m = match_indices(&word);
        let brute = brute_match(&w);
        for (k, mate) in brute.iter().enumerate() {
            let i = origin + k as i64;
            prop_assert_eq!(m.phi(i), mate.map(|j| origin + j as i64));
        }
    }

    #[test]
    fn reduction_matches_rewriting_on_random_words(w in symbols(11)) {
        prop_assert_eq!(reduce_symbols(&w).to_text(), rewrite_normal_form(&w));
    }

    #[test]
    fn lattice_path_matches_brute_walk(w in symbols(120)) {
        let word = Word::forward(w.clone());
        let m = match_indices(&word);
        match (resolve_flex(&word, &m), brute_path(&w)) {
            (Ok(y), Some(walk)) => {
                let path = lattice_path(&y).unwrap();
                prop_assert_eq!(path.points(), &walk[..]);
            }
            (Err(_), None) => {}
            (a, b) => prop_assert!(false, "resolve {:?} vs brute {:?}", a.is_ok(), b.is_some()),
        }
        prop_assert_eq!(quadrant_criterion(&word), brute_quadrant(&w));
    }
}
