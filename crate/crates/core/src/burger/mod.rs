//! Words over the hamburger/cheeseburger alphabet and their reduction.

mod backward;
mod counts;
mod matching;
mod reduce;
mod symbol;
mod word;

use thiserror::Error;

pub use backward::{backward_j, backward_jc, backward_jh, BackwardReducer, Prepended};
pub use counts::{counts, CountVector};
pub use matching::{match_indices, resolve_flex, resolve_flex_partial, MatchTable};
pub use reduce::{monoid_concat, reduce, reduce_symbols, Fed, ReducedWord};
pub use symbol::Symbol;
pub use word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BurgerError {
    #[error("unknown symbol {found:?} at offset {offset}")]
    BadSymbol { offset: usize, found: char },
    #[error("flexible order at index {0} has no match")]
    UnmatchedFlexible(i64),
    #[error("word must end at index -1, ends at {last_index}")]
    NotBackwardIndexed { last_index: i64 },
    #[error("wanted {wanted} backward burgers, word provides {found}")]
    NotReached { wanted: usize, found: usize },
    #[error("orders block must hold only orders and burger block only burgers")]
    NotNormalForm,
}
