use std::fmt;

use serde::{Deserialize, Serialize};

/// One letter of the five-symbol inventory alphabet.
///
/// Burgers are produced, orders consume them. A typed order eats the most
/// recent unconsumed burger of its own type; a flexible order eats the most
/// recent unconsumed burger of either type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    HamburgerB,
    CheeseburgerB,
    HamburgerO,
    CheeseburgerO,
    FlexibleO,
}

impl Symbol {
    pub const ALL: [Symbol; 5] = [
        Symbol::HamburgerB,
        Symbol::CheeseburgerB,
        Symbol::HamburgerO,
        Symbol::CheeseburgerO,
        Symbol::FlexibleO,
    ];

    #[inline]
    pub fn is_burger(self) -> bool {
        matches!(self, Symbol::HamburgerB | Symbol::CheeseburgerB)
    }

    #[inline]
    pub fn is_order(self) -> bool {
        !self.is_burger()
    }

    /// Whether this order may be fulfilled by `burger`.
    #[inline]
    pub fn accepts(self, burger: Symbol) -> bool {
        match self {
            Symbol::HamburgerO => burger == Symbol::HamburgerB,
            Symbol::CheeseburgerO => burger == Symbol::CheeseburgerB,
            Symbol::FlexibleO => burger.is_burger(),
            _ => false,
        }
    }

    /// The typed order that a burger of this kind turns a flexible order into.
    pub fn typed_order(self) -> Option<Symbol> {
        match self {
            Symbol::HamburgerB => Some(Symbol::HamburgerO),
            Symbol::CheeseburgerB => Some(Symbol::CheeseburgerO),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::HamburgerB => 'H',
            Symbol::CheeseburgerB => 'C',
            Symbol::HamburgerO => 'h',
            Symbol::CheeseburgerO => 'c',
            Symbol::FlexibleO => 'F',
        }
    }

    pub fn from_char(c: char) -> Option<Symbol> {
        match c {
            'H' => Some(Symbol::HamburgerB),
            'C' => Some(Symbol::CheeseburgerB),
            'h' => Some(Symbol::HamburgerO),
            'c' => Some(Symbol::CheeseburgerO),
            'F' => Some(Symbol::FlexibleO),
            _ => None,
        }
    }

    /// Contribution of this symbol to `(d, d*)`. Flexible orders contribute
    /// nothing until they are resolved.
    #[inline]
    pub fn step(self) -> (i64, i64) {
        match self {
            Symbol::HamburgerB => (1, 0),
            Symbol::CheeseburgerB => (0, 1),
            Symbol::HamburgerO => (-1, 0),
            Symbol::CheeseburgerO => (0, -1),
            Symbol::FlexibleO => (0, 0),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}
