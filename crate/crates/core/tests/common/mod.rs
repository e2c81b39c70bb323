//! Independent oracles: string rewriting, quadratic matching, exhaustive
//! enumeration. None of these call into the library's reducer.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use hcburger::burger::Symbol::{self, *};

pub const ALPHABET: [Symbol; 5] = [
    HamburgerB,
    CheeseburgerB,
    HamburgerO,
    CheeseburgerO,
    FlexibleO,
];

fn ch(s: Symbol) -> u8 {
    match s {
        HamburgerB => b'H',
        CheeseburgerB => b'C',
        HamburgerO => b'h',
        CheeseburgerO => b'c',
        FlexibleO => b'F',
    }
}

pub fn text(w: &[Symbol]) -> String {
    w.iter().map(|&s| ch(s) as char).collect()
}

/// Every word reachable by the defining relations, applied anywhere and in
/// any order; returns the set of words where no relation applies.
pub fn rewrite_terminals(w: &[Symbol]) -> BTreeSet<String> {
    let start: Vec<u8> = w.iter().map(|&s| ch(s)).collect();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    let mut terminals = BTreeSet::new();
    while let Some(x) = queue.pop_front() {
        let mut moved = false;
        for k in 0..x.len().saturating_sub(1) {
            let next = match (x[k], x[k + 1]) {
                (b'H', b'h') | (b'C', b'c') | (b'H', b'F') | (b'C', b'F') => {
                    let mut y = x.clone();
                    y.drain(k..k + 2);
                    y
                }
                (b'H', b'c') | (b'C', b'h') => {
                    let mut y = x.clone();
                    y.swap(k, k + 1);
                    y
                }
                _ => continue,
            };
            moved = true;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
        if !moved {
            terminals.insert(String::from_utf8(x).unwrap());
        }
    }
    terminals
}

/// Unique normal form by rewriting; panics if two terminals disagree.
pub fn rewrite_normal_form(w: &[Symbol]) -> String {
    let t = rewrite_terminals(w);
    assert_eq!(t.len(), 1, "{} has terminals {t:?}", text(w));
    t.into_iter().next().unwrap()
}

fn accepts(order: Symbol, burger: Symbol) -> bool {
    matches!(
        (order, burger),
        (HamburgerO, HamburgerB)
            | (CheeseburgerO, CheeseburgerB)
            | (FlexibleO, HamburgerB)
            | (FlexibleO, CheeseburgerB)
    )
}

fn is_burger(s: Symbol) -> bool {
    matches!(s, HamburgerB | CheeseburgerB)
}

/// Quadratic matching: each order scans left for the nearest unconsumed
/// burger it accepts. Zero-based mates.
pub fn brute_match(w: &[Symbol]) -> Vec<Option<usize>> {
    let mut mate = vec![None; w.len()];
    for k in 0..w.len() {
        if is_burger(w[k]) {
            continue;
        }
        if let Some(j) = (0..k)
            .rev()
            .find(|&j| is_burger(w[j]) && mate[j].is_none() && accepts(w[k], w[j]))
        {
            mate[j] = Some(k);
            mate[k] = Some(j);
        }
    }
    mate
}

/// Walk of `(#H - #h, #C - #c)` with each flexible order counted as the type
/// it consumed; `None` if some flexible order found nothing.
pub fn brute_path(w: &[Symbol]) -> Option<Vec<(i64, i64)>> {
    let mate = brute_match(w);
    let mut pts = vec![(0, 0)];
    let (mut d, mut e) = (0, 0);
    for (k, &s) in w.iter().enumerate() {
        let s = match s {
            FlexibleO => match w[mate[k]?] {
                HamburgerB => HamburgerO,
                _ => CheeseburgerO,
            },
            s => s,
        };
        match s {
            HamburgerB => d += 1,
            HamburgerO => d -= 1,
            CheeseburgerB => e += 1,
            _ => e -= 1,
        }
        pts.push((d, e));
    }
    Some(pts)
}

/// Stays in the closed quadrant and returns to the origin.
pub fn brute_quadrant(w: &[Symbol]) -> bool {
    brute_path(w)
        .is_some_and(|p| p.iter().all(|&(a, b)| a >= 0 && b >= 0) && *p.last().unwrap() == (0, 0))
}

/// All words of length `k`, in lexicographic order of the alphabet.
pub fn all_words(k: usize) -> impl Iterator<Item = Vec<Symbol>> {
    (0..5usize.pow(k as u32)).map(move |mut code| {
        let mut w = Vec::with_capacity(k);
        for _ in 0..k {
            w.push(ALPHABET[code % 5]);
            code /= 5;
        }
        w
    })
}

pub fn word_probability(w: &[Symbol], p: f64) -> f64 {
    w.iter()
        .map(|s| match s {
            HamburgerB | CheeseburgerB => 0.25,
            HamburgerO | CheeseburgerO => (1.0 - p) / 4.0,
            FlexibleO => p / 2.0,
        })
        .product()
}

/// Exact law of length-`2n` words conditioned to rewrite to nothing.
pub fn exact_conditional_law(n: usize, p: f64) -> BTreeMap<String, f64> {
    let mut law = BTreeMap::new();
    let mut total = 0.0;
    for w in all_words(2 * n) {
        if brute_match(&w).iter().all(Option::is_some) {
            let pr = word_probability(&w, p);
            total += pr;
            law.insert(text(&w), pr);
        }
    }
    for v in law.values_mut() {
        *v /= total;
    }
    law
}

/// Exact `P(X(1, 2n) = ∅)`.
pub fn exact_empty_probability(n: usize, p: f64) -> f64 {
    all_words(2 * n)
        .filter(|w| brute_match(w).iter().all(Option::is_some))
        .map(|w| word_probability(&w, p))
        .sum()
}
