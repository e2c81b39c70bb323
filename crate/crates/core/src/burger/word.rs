use std::fmt;
use std::ops::Range;

use super::{BurgerError, Symbol};

/// A finite run of consecutive symbols `X_origin, ..., X_{origin+len-1}`.
///
/// Forward words usually start at 1; backward words end at -1 so that the
/// last symbol is `X_{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<Symbol>,
    origin: i64,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>, origin: i64) -> Self {
        Word { symbols, origin }
    }

    /// Indexed `1..=len`.
    pub fn forward(symbols: Vec<Symbol>) -> Self {
        Word::new(symbols, 1)
    }

    /// Indexed `-len..=-1`.
    pub fn backward(symbols: Vec<Symbol>) -> Self {
        let origin = -(symbols.len() as i64);
        Word::new(symbols, origin)
    }

    pub fn empty() -> Self {
        Word::forward(Vec::new())
    }

    /// Decodes the one-character-per-symbol text form (`H C h c F`).
    /// ASCII whitespace is ignored.
    pub fn parse(text: &str, origin: i64) -> Result<Self, BurgerError> {
        let mut symbols = Vec::with_capacity(text.len());
        for (offset, c) in text.chars().enumerate() {
            if c.is_ascii_whitespace() {
                continue;
            }
            let s = Symbol::from_char(c).ok_or(BurgerError::BadSymbol { offset, found: c })?;
            symbols.push(s);
        }
        Ok(Word::new(symbols, origin))
    }

    pub fn to_text(&self) -> String {
        self.symbols.iter().map(|s| s.to_char()).collect()
    }

    #[inline]
    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// Index of the last symbol; `origin - 1` for an empty word.
    #[inline]
    pub fn last_index(&self) -> i64 {
        self.origin + self.symbols.len() as i64 - 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    pub fn indices(&self) -> Range<i64> {
        self.origin..self.origin + self.symbols.len() as i64
    }

    pub fn contains_index(&self, i: i64) -> bool {
        self.indices().contains(&i)
    }

    /// Zero-based storage offset of index `i`.
    #[inline]
    pub fn offset(&self, i: i64) -> Option<usize> {
        if self.contains_index(i) {
            Some((i - self.origin) as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn get(&self, i: i64) -> Option<Symbol> {
        self.offset(i).map(|k| self.symbols[k])
    }

    pub fn iter_indexed(&self) -> impl Iterator<Item = (i64, Symbol)> + '_ {
        let origin = self.origin;
        self.symbols
            .iter()
            .enumerate()
            .map(move |(k, &s)| (origin + k as i64, s))
    }

    /// The sub-word `X_a ... X_b` (inclusive), clipped to this word.
    pub fn slice(&self, a: i64, b: i64) -> Word {
        let lo = a.max(self.origin);
        let hi = b.min(self.last_index());
        if hi < lo {
            return Word::new(Vec::new(), lo);
        }
        let k0 = (lo - self.origin) as usize;
        let k1 = (hi - self.origin) as usize;
        Word::new(self.symbols[k0..=k1].to_vec(), lo)
    }

    /// Concatenation; the result keeps `self`'s origin.
    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word::new(symbols, self.origin)
    }

    pub fn count(&self, s: Symbol) -> usize {
        self.symbols.iter().filter(|&&x| x == s).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}
