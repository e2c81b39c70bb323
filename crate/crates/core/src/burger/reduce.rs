//! Normal form of words under the burger/order cancellation relations.
//!
//! The normal form keeps unfulfilled orders in their original relative order,
//! followed by the unconsumed burgers bottom-to-top. Burgers live in two typed
//! stacks tagged with arrival keys so that typed orders and flexible orders
//! both resolve in O(1).

use std::fmt;

use super::{BurgerError, Symbol, Word};

/// Outcome of appending one symbol to a reduced word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fed {
    /// A burger was added to the stack.
    Stacked,
    /// An order consumed the burger that arrived with this key.
    Consumed { burger_key: u64, burger: Symbol },
    /// An order found nothing to eat and joins the order block.
    Unfilled,
}

#[derive(Clone, Default)]
pub struct ReducedWord {
    orders: Vec<Symbol>,
    ham: Vec<u64>,
    cheese: Vec<u64>,
    next_key: u64,
}

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord::default()
    }

    /// Builds a normal form from its two blocks, checking symbol kinds.
    pub fn from_parts(orders: Vec<Symbol>, burgers: &[Symbol]) -> Result<Self, BurgerError> {
        if orders.iter().any(|s| s.is_burger()) || burgers.iter().any(|s| s.is_order()) {
            return Err(BurgerError::NotNormalForm);
        }
        let mut r = ReducedWord {
            orders,
            ..Default::default()
        };
        for &b in burgers {
            r.push(b);
        }
        Ok(r)
    }

    /// Appends a symbol on the right.
    #[inline]
    pub fn push(&mut self, s: Symbol) -> Fed {
        let key = self.next_key;
        self.push_keyed(s, key)
    }

    /// Appends a symbol on the right, tagging a stacked burger with `key`.
    /// Keys must increase across calls.
    #[inline]
    pub(crate) fn push_keyed(&mut self, s: Symbol, key: u64) -> Fed {
        debug_assert!(key >= self.next_key);
        self.next_key = key + 1;
        match s {
            Symbol::HamburgerB => {
                self.ham.push(key);
                Fed::Stacked
            }
            Symbol::CheeseburgerB => {
                self.cheese.push(key);
                Fed::Stacked
            }
            Symbol::HamburgerO => self.take(Symbol::HamburgerB, s),
            Symbol::CheeseburgerO => self.take(Symbol::CheeseburgerB, s),
            Symbol::FlexibleO => {
                let burger = match (self.ham.last(), self.cheese.last()) {
                    (Some(h), Some(c)) if h > c => Symbol::HamburgerB,
                    (Some(_), None) => Symbol::HamburgerB,
                    (_, Some(_)) => Symbol::CheeseburgerB,
                    (None, None) => {
                        self.orders.push(s);
                        return Fed::Unfilled;
                    }
                };
                self.take(burger, s)
            }
        }
    }

    #[inline]
    fn take(&mut self, burger: Symbol, order: Symbol) -> Fed {
        let stack = if burger == Symbol::HamburgerB {
            &mut self.ham
        } else {
            &mut self.cheese
        };
        match stack.pop() {
            Some(burger_key) => Fed::Consumed { burger_key, burger },
            None => {
                self.orders.push(order);
                Fed::Unfilled
            }
        }
    }

    /// Monoid product `R(self ‖ other)`. Costs O(|other|): `other`'s orders
    /// eat from this word's stack, then its burgers are stacked on top.
    pub fn concat(mut self, other: &ReducedWord) -> ReducedWord {
        for &o in &other.orders {
            self.push(o);
        }
        for b in other.burger_iter() {
            self.push(b);
        }
        self
    }

    pub fn orders(&self) -> &[Symbol] {
        &self.orders
    }

    /// Unconsumed burgers, bottom of the stack first.
    pub fn burgers(&self) -> Vec<Symbol> {
        self.burger_iter().collect()
    }

    fn burger_iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        let (mut i, mut j) = (0, 0);
        std::iter::from_fn(move || {
            let h = self.ham.get(i);
            let c = self.cheese.get(j);
            match (h, c) {
                (Some(h), Some(c)) if h < c => {
                    i += 1;
                    Some(Symbol::HamburgerB)
                }
                (Some(_), None) => {
                    i += 1;
                    Some(Symbol::HamburgerB)
                }
                (_, Some(_)) => {
                    j += 1;
                    Some(Symbol::CheeseburgerB)
                }
                (None, None) => None,
            }
        })
    }

    pub fn n_burgers(&self) -> usize {
        self.ham.len() + self.cheese.len()
    }

    pub fn n_orders(&self) -> usize {
        self.orders.len()
    }

    pub fn len(&self) -> usize {
        self.n_orders() + self.n_burgers()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn count(&self, s: Symbol) -> usize {
        match s {
            Symbol::HamburgerB => self.ham.len(),
            Symbol::CheeseburgerB => self.cheese.len(),
            _ => self.orders.iter().filter(|&&o| o == s).count(),
        }
    }

    /// Orders followed by burgers as a plain word.
    pub fn to_word(&self, origin: i64) -> Word {
        let mut symbols = self.orders.clone();
        symbols.extend(self.burger_iter());
        Word::new(symbols, origin)
    }

    pub fn to_text(&self) -> String {
        self.to_word(0).to_text()
    }
}

impl PartialEq for ReducedWord {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
            && self.n_burgers() == other.n_burgers()
            && self.burger_iter().eq(other.burger_iter())
    }
}

impl Eq for ReducedWord {}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedWord")
            .field("orders", &self.orders)
            .field("burgers", &self.burgers())
            .finish()
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Reduces a word to its normal form.
pub fn reduce(w: &Word) -> ReducedWord {
    reduce_symbols(w.symbols())
}

pub fn reduce_symbols(symbols: &[Symbol]) -> ReducedWord {
    let mut r = ReducedWord::empty();
    for &s in symbols {
        r.push(s);
    }
    r
}

/// Monoid product of two normal forms.
pub fn monoid_concat(a: ReducedWord, b: &ReducedWord) -> ReducedWord {
    a.concat(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Symbol::*;

    fn red(text: &str) -> ReducedWord {
        reduce(&Word::parse(text, 1).unwrap())
    }

    fn parts(orders: &[Symbol], burgers: &[Symbol]) -> ReducedWord {
        ReducedWord::from_parts(orders.to_vec(), burgers).unwrap()
    }

    #[test]
    fn burger_then_matching_order_cancels() {
        assert!(red("Hh").is_empty());
        assert!(red("Cc").is_empty());
        assert!(red("HF").is_empty());
        assert!(red("CF").is_empty());
    }

    #[test]
    fn order_before_burger_survives() {
        assert_eq!(red("hH"), parts(&[HamburgerO], &[HamburgerB]));
    }

    #[test]
    fn typed_order_skips_other_burger_type() {
        assert_eq!(red("HCh"), parts(&[], &[CheeseburgerB]));
    }

    #[test]
    fn flexible_order_takes_freshest_burger() {
        assert_eq!(red("CHF"), parts(&[], &[CheeseburgerB]));
        assert_eq!(red("HCF"), parts(&[], &[HamburgerB]));
    }

    #[test]
    fn orders_keep_relative_order() {
        let r = red("cFhHC");
        assert_eq!(r.orders(), &[CheeseburgerO, FlexibleO, HamburgerO]);
        assert_eq!(r.burgers(), vec![HamburgerB, CheeseburgerB]);
        assert_eq!(r.to_text(), "cFhHC");
    }

    #[test]
    fn from_parts_validates_kinds() {
        assert_eq!(
            ReducedWord::from_parts(vec![HamburgerB], &[]).unwrap_err(),
            BurgerError::NotNormalForm
        );
        assert!(ReducedWord::from_parts(vec![], &[FlexibleO]).is_err());
    }

    #[test]
    fn concat_examples() {
        let r = red("cHC");
        assert_eq!(ReducedWord::empty().concat(&r), r);
        assert!(parts(&[], &[HamburgerB])
            .concat(&parts(&[FlexibleO], &[]))
            .is_empty());
        assert_eq!(
            parts(&[], &[HamburgerB, CheeseburgerB]).concat(&parts(&[HamburgerO], &[])),
            parts(&[], &[CheeseburgerB])
        );
    }

    fn word_strategy(max: usize) -> impl Strategy<Value = Vec<Symbol>> {
        prop::collection::vec(prop::sample::select(Symbol::ALL.to_vec()), 0..max)
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(w in word_strategy(200)) {
            let r = reduce_symbols(&w);
            let again = reduce(&r.to_word(1));
            prop_assert_eq!(&again, &r);
            prop_assert!(r.orders().iter().all(|s| s.is_order()));
        }

        #[test]
        fn reduction_is_a_morphism(x in word_strategy(100), y in word_strategy(100)) {
            let mut xy = x.clone();
            xy.extend_from_slice(&y);
            prop_assert_eq!(reduce_symbols(&xy), reduce_symbols(&x).concat(&reduce_symbols(&y)));
        }
    }
}
