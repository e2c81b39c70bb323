//! Loop structure read off a word: the laminar family of flexible-order
//! intervals `[φ(i), i]`, their areas and boundary lengths, exits, and the
//! sequence of loops surrounding an index.

use serde::Serialize;
use thiserror::Error;

use crate::burger::{reduce, reduce_symbols, BurgerError, MatchTable, Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error(transparent)]
    Burger(#[from] BurgerError),
    #[error("word does not reduce to the empty word")]
    NotClosed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopComponent {
    /// `i*`, the flexible order.
    pub close: i64,
    /// `φ(i*)`.
    pub open: i64,
    pub area: u64,
    pub boundary_len: u64,
    pub burger_type: Symbol,
    /// The next exit `i*'`, if the word contains one.
    #[serde(skip)]
    pub next_exit: Option<i64>,
    /// Whether the interval is a complementary component, i.e. the next
    /// exit has the other burger type. `None` without a next exit.
    #[serde(skip)]
    pub component: Option<bool>,
    #[serde(skip)]
    pub parent: Option<usize>,
    #[serde(skip)]
    pub children: Vec<usize>,
}

/// All flexible intervals of a word, ordered by closing index, with parent
/// links given by interval containment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopForest {
    pub nodes: Vec<LoopComponent>,
}

impl LoopForest {
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&k| self.nodes[k].parent.is_none())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_by_close(&self, close: i64) -> Option<usize> {
        self.nodes.binary_search_by_key(&close, |n| n.close).ok()
    }

    /// Ancestors from the parent outward.
    pub fn ancestors(&self, k: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.nodes[k].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }

    /// Nested JSON tree of the roots.
    pub fn to_json(&self) -> serde_json::Value {
        let roots: Vec<_> = self.roots().map(|k| self.node_json(k)).collect();
        serde_json::Value::Array(roots)
    }

    fn node_json(&self, k: usize) -> serde_json::Value {
        let n = &self.nodes[k];
        serde_json::json!({
            "open": n.open,
            "close": n.close,
            "area": n.area,
            "boundary_len": n.boundary_len,
            "burger_type": n.burger_type.to_char().to_string(),
            "children": n.children.iter().map(|&c| self.node_json(c)).collect::<Vec<_>>(),
        })
    }
}

fn flexible_pairs(w: &Word, m: &MatchTable) -> Result<Vec<(i64, i64)>, LoopError> {
    w.iter_indexed()
        .filter(|&(_, s)| s == Symbol::FlexibleO)
        .map(|(i, _)| {
            m.phi(i)
                .map(|b| (b, i))
                .ok_or(BurgerError::UnmatchedFlexible(i).into())
        })
        .collect()
}

/// For each flexible order in index order, the smallest later flexible order
/// matched strictly before it.
fn next_smaller_phi(pairs: &[(i64, i64)]) -> Vec<Option<i64>> {
    let mut out = vec![None; pairs.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (k, &(b, i)) in pairs.iter().enumerate() {
        while stack.last().is_some_and(|&j| pairs[j].0 > b) {
            out[stack.pop().unwrap()] = Some(i);
        }
        stack.push(k);
    }
    out
}

pub fn loop_forest(w: &Word, m: &MatchTable) -> Result<LoopForest, LoopError> {
    let pairs = flexible_pairs(w, m)?;
    let exits = next_smaller_phi(&pairs);
    let mut nodes: Vec<LoopComponent> = pairs
        .iter()
        .zip(&exits)
        .map(|(&(b, i), &exit)| {
            let burger_type = w.get(b).unwrap();
            let inner = &w.symbols()[w.offset(b).unwrap()..=w.offset(i).unwrap()];
            LoopComponent {
                close: i,
                open: b,
                area: (i - b) as u64,
                boundary_len: reduce_symbols(inner).len() as u64 + 1,
                burger_type,
                next_exit: exit,
                component: exit.map(|e| w.get(m.phi(e).unwrap()).unwrap() != burger_type),
                parent: None,
                children: Vec::new(),
            }
        })
        .collect();
    let mut by_open: Vec<usize> = (0..nodes.len()).collect();
    by_open.sort_by_key(|&k| nodes[k].open);
    let mut stack: Vec<usize> = Vec::new();
    for k in by_open {
        while stack
            .last()
            .is_some_and(|&p| nodes[p].close < nodes[k].open)
        {
            stack.pop();
        }
        if let Some(&p) = stack.last() {
            nodes[k].parent = Some(p);
            nodes[p].children.push(k);
        }
        stack.push(k);
    }
    for n in &mut nodes {
        n.children.sort_by_key(|&c| c);
    }
    Ok(LoopForest { nodes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NextExit {
    pub index: i64,
    /// `X_{φ(i*')} ≠ X_{φ(i*)}`.
    pub alternates: bool,
}

/// The smallest `i > i*` with `X_i = F` and `φ(i) ≤ φ(i*) - 1`.
pub fn next_exit(w: &Word, m: &MatchTable, i_star: i64) -> Option<NextExit> {
    let b = m.phi(i_star)?;
    let ty = w.get(b)?;
    w.iter_indexed()
        .skip_while(|&(i, _)| i <= i_star)
        .filter(|&(_, s)| s == Symbol::FlexibleO)
        .find_map(|(i, _)| m.phi(i).filter(|&c| c < b).map(|c| (i, c)))
        .map(|(i, c)| NextExit {
            index: i,
            alternates: w.get(c) != Some(ty),
        })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurroundingLoops {
    pub base_index: i64,
    /// `(θ̃_{i,j}, θ_{i,j})` for `j = 1, 2, ...`.
    pub thetas: Vec<(i64, i64)>,
}

/// `θ_{i,j}` is the `j`th smallest `k > i` with `X_k = F`, `φ(k) < i`, and
/// `X_{φ(k)} ≠ X_{φ(k̃)}`, where `k̃` is the largest `k' ∈ [i, k)` with
/// `X_{k'} = F` and `φ(k') < i`. When there is no such `k'` the type
/// condition is vacuous.
pub fn surrounding_loops(w: &Word, m: &MatchTable, i: i64, j_max: usize) -> SurroundingLoops {
    let mut thetas = Vec::new();
    let mut prev: Option<Symbol> = None;
    for (k, s) in w.iter_indexed().skip_while(|&(k, _)| k < i) {
        if thetas.len() >= j_max {
            break;
        }
        if s != Symbol::FlexibleO {
            continue;
        }
        let Some(b) = m.phi(k).filter(|&b| b < i) else {
            continue;
        };
        let ty = w.get(b).unwrap();
        if k > i && prev != Some(ty) {
            thetas.push((b, k));
        }
        prev = Some(ty);
    }
    SurroundingLoops {
        base_index: i,
        thetas,
    }
}

/// `(n, 2n)` for a word of length `2n` reducing to the empty word.
pub fn edge_count_check(w: &Word) -> Result<(usize, usize), LoopError> {
    if !reduce(w).is_empty() {
        return Err(LoopError::NotClosed);
    }
    Ok((w.len() / 2, w.len()))
}
