use super::reduce::{Fed, ReducedWord};
use super::{BurgerError, Symbol, Word};

const NONE: usize = usize::MAX;

/// The match involution `φ` restricted to a finite word.
///
/// Indices are the word's own (origin-based) indices. Symbols with no partner
/// inside the word are exactly the survivors of the reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchTable {
    origin: i64,
    mate: Vec<usize>,
}

impl MatchTable {
    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.mate.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mate.is_empty()
    }

    /// `φ(i)`, or `None` if `i` is unmatched or outside the word.
    #[inline]
    pub fn phi(&self, i: i64) -> Option<i64> {
        let k = i - self.origin;
        if k < 0 || k as usize >= self.mate.len() {
            return None;
        }
        match self.mate[k as usize] {
            NONE => None,
            m => Some(self.origin + m as i64),
        }
    }

    /// Zero-based variant of [`MatchTable::phi`].
    #[inline]
    pub fn mate_offset(&self, k: usize) -> Option<usize> {
        match self.mate[k] {
            NONE => None,
            m => Some(m),
        }
    }

    /// `(burger index, order index)` for each cancelled pair, ordered by
    /// order index.
    pub fn pairs(&self) -> Vec<(i64, i64)> {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(k, &m)| m != NONE && m < k)
            .map(|(k, &m)| (self.origin + m as i64, self.origin + k as i64))
            .collect()
    }

    pub fn n_pairs(&self) -> usize {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(k, &m)| m != NONE && m < k)
            .count()
    }

    pub fn unmatched(&self) -> Vec<i64> {
        self.mate
            .iter()
            .enumerate()
            .filter(|&(_, &m)| m == NONE)
            .map(|(k, _)| self.origin + k as i64)
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.mate.iter().all(|&m| m != NONE)
    }
}

/// Records, for every cancellation performed by the reduction, which burger
/// each order consumed.
pub fn match_indices(w: &Word) -> MatchTable {
    let mut mate = vec![NONE; w.len()];
    let mut r = ReducedWord::empty();
    for (k, &s) in w.symbols().iter().enumerate() {
        if let Fed::Consumed { burger_key, .. } = r.push_keyed(s, k as u64) {
            let b = burger_key as usize;
            mate[k] = b;
            mate[b] = k;
        }
    }
    MatchTable {
        origin: w.origin(),
        mate,
    }
}

/// The Y-word: each flexible order replaced by the typed order matching the
/// burger it consumed.
pub fn resolve_flex(w: &Word, m: &MatchTable) -> Result<Word, BurgerError> {
    let mut out = Vec::with_capacity(w.len());
    for (i, s) in w.iter_indexed() {
        if s != Symbol::FlexibleO {
            out.push(s);
            continue;
        }
        let j = m.phi(i).ok_or(BurgerError::UnmatchedFlexible(i))?;
        let burger = w.get(j).ok_or(BurgerError::UnmatchedFlexible(i))?;
        out.push(
            burger
                .typed_order()
                .ok_or(BurgerError::UnmatchedFlexible(i))?,
        );
    }
    Ok(Word::new(out, w.origin()))
}

/// Y-word for a word whose flexible orders may be unmatched: unmatched ones
/// are left as `FlexibleO`.
pub fn resolve_flex_partial(w: &Word, m: &MatchTable) -> Word {
    let out = w
        .iter_indexed()
        .map(|(i, s)| match (s, m.phi(i).and_then(|j| w.get(j))) {
            (Symbol::FlexibleO, Some(b)) => b.typed_order().unwrap_or(s),
            _ => s,
        })
        .collect();
    Word::new(out, w.origin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burger::reduce;
    use proptest::prelude::*;
    use Symbol::*;

    fn w(text: &str) -> Word {
        Word::parse(text, 1).unwrap()
    }

    #[test]
    fn flexible_order_pairs_with_stack_top() {
        let m = match_indices(&w("HCFh"));
        assert_eq!(m.phi(3), Some(2));
        assert_eq!(m.phi(2), Some(3));
        assert_eq!(m.phi(4), Some(1));
        assert_eq!(m.phi(1), Some(4));
        assert!(m.unmatched().is_empty());
        assert_eq!(m.pairs(), vec![(2, 3), (1, 4)]);
    }

    #[test]
    fn lone_order_is_unmatched() {
        let m = match_indices(&Word::parse("h", 7).unwrap());
        assert!(m.pairs().is_empty());
        assert_eq!(m.unmatched(), vec![7]);
    }

    #[test]
    fn sequential_hamburger_pairs() {
        let m = match_indices(&w("HhHh"));
        assert_eq!(m.pairs(), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn resolve_examples() {
        let x = w("HCFh");
        assert_eq!(
            resolve_flex(&x, &match_indices(&x)).unwrap().to_text(),
            "HCch"
        );
        let x = w("HF");
        assert_eq!(
            resolve_flex(&x, &match_indices(&x)).unwrap().to_text(),
            "Hh"
        );
        let x = w("HCcChH");
        assert_eq!(resolve_flex(&x, &match_indices(&x)).unwrap(), x);
    }

    #[test]
    fn resolve_reports_unmatched_flexible() {
        let x = w("hFH");
        assert_eq!(
            resolve_flex(&x, &match_indices(&x)).unwrap_err(),
            BurgerError::UnmatchedFlexible(2)
        );
        assert_eq!(
            resolve_flex_partial(&x, &match_indices(&x)).to_text(),
            "hFH"
        );
    }

    fn word_strategy(max: usize) -> impl Strategy<Value = Vec<Symbol>> {
        prop::collection::vec(prop::sample::select(Symbol::ALL.to_vec()), 0..max)
    }

    proptest! {
        #[test]
        fn match_table_invariants(symbols in word_strategy(300), origin in -50i64..50) {
            let x = Word::new(symbols, origin);
            let m = match_indices(&x);
            for (b, o) in m.pairs() {
                prop_assert_eq!(m.phi(b), Some(o));
                prop_assert_eq!(m.phi(o), Some(b));
                prop_assert!(b < o);
                prop_assert!(x.get(o).unwrap().accepts(x.get(b).unwrap()));
            }
            let r = reduce(&x);
            prop_assert_eq!(x.len() - r.len(), 2 * m.n_pairs());
            let survivors: Vec<Symbol> = m.unmatched().iter().map(|&i| x.get(i).unwrap()).collect();
            let mut expected = r.orders().to_vec();
            expected.extend(r.burgers());
            let mut sorted_survivors = survivors.clone();
            sorted_survivors.sort_by_key(|s| s.is_burger());
            prop_assert_eq!(sorted_survivors, expected);
        }

        #[test]
        fn same_type_pairs_do_not_cross(symbols in word_strategy(300)) {
            let x = Word::forward(symbols);
            let m = match_indices(&x);
            let pairs = m.pairs();
            for burger in [HamburgerB, CheeseburgerB] {
                let typed: Vec<_> = pairs.iter().filter(|(b, _)| x.get(*b) == Some(burger)).collect();
                for (i, &&(a1, b1)) in typed.iter().enumerate() {
                    for &&(a2, b2) in &typed[i + 1..] {
                        let crossing = (a1 < a2 && a2 < b1 && b1 < b2) || (a2 < a1 && a1 < b2 && b2 < b1);
                        prop_assert!(!crossing);
                    }
                }
            }
        }
    }
}
