//! Reading a word right to left.
//!
//! Prepending a burger to a reduced word cancels the leftmost order that
//! accepts it; orders skipped over commute with it. Prepending an order just
//! extends the order block. Burger counts therefore never decrease, which is
//! what makes the backward stopping times well defined.

use super::{BurgerError, Symbol, Word};

/// Incremental reduction of `X_{-j} ... X_{-1}` as `j` grows.
///
/// The order block is kept run-length encoded with its left end on top. A
/// prepended burger can only skip a run of the other typed order, so every
/// step touches at most the top two runs and memory stays proportional to
/// the number of runs.
#[derive(Clone, Debug, Default)]
pub struct BackwardReducer {
    runs: Vec<(Symbol, usize)>,
    n_hb: usize,
    n_cb: usize,
    n_ho: usize,
    n_co: usize,
    n_fo: usize,
    read: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prepended {
    BurgerAdded(Symbol),
    BurgerCancelled,
    Order,
}

impl BackwardReducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of symbols read so far (the current `j`).
    pub fn read(&self) -> usize {
        self.read
    }

    pub fn prepend(&mut self, s: Symbol) -> Prepended {
        self.read += 1;
        if s.is_order() {
            match self.runs.last_mut() {
                Some((t, k)) if *t == s => *k += 1,
                _ => self.runs.push((s, 1)),
            }
            *self.order_count(s) += 1;
            return Prepended::Order;
        }
        let skip = if s == Symbol::HamburgerB {
            Symbol::CheeseburgerO
        } else {
            Symbol::HamburgerO
        };
        let top = self.runs.len();
        let target = match self.runs.last() {
            None => None,
            Some(&(t, _)) if t != skip => Some(top - 1),
            Some(_) => top.checked_sub(2),
        };
        let Some(at) = target else {
            if s == Symbol::HamburgerB {
                self.n_hb += 1;
            } else {
                self.n_cb += 1;
            }
            return Prepended::BurgerAdded(s);
        };
        let eaten = self.runs[at].0;
        *self.order_count(eaten) -= 1;
        self.runs[at].1 -= 1;
        if self.runs[at].1 == 0 {
            self.runs.remove(at);
            // Two runs of the skipped type may now touch.
            if at > 0 && at < self.runs.len() && self.runs[at - 1].0 == self.runs[at].0 {
                let (_, k) = self.runs.remove(at);
                self.runs[at - 1].1 += k;
            }
        }
        Prepended::BurgerCancelled
    }

    fn order_count(&mut self, s: Symbol) -> &mut usize {
        match s {
            Symbol::HamburgerO => &mut self.n_ho,
            Symbol::CheeseburgerO => &mut self.n_co,
            _ => &mut self.n_fo,
        }
    }

    pub fn hamburgers(&self) -> usize {
        self.n_hb
    }

    pub fn cheeseburgers(&self) -> usize {
        self.n_cb
    }

    pub fn burgers(&self) -> usize {
        self.n_hb + self.n_cb
    }

    /// Count of `s` in the current reduced word.
    pub fn count(&self, s: Symbol) -> usize {
        match s {
            Symbol::HamburgerB => self.n_hb,
            Symbol::CheeseburgerB => self.n_cb,
            Symbol::HamburgerO => self.n_ho,
            Symbol::CheeseburgerO => self.n_co,
            Symbol::FlexibleO => self.n_fo,
        }
    }

    /// `d` of the current reduced word.
    pub fn d(&self) -> i64 {
        self.n_hb as i64 - self.n_ho as i64
    }

    /// `d*` of the current reduced word.
    pub fn d_star(&self) -> i64 {
        self.n_cb as i64 - self.n_co as i64
    }

    /// Surviving orders, left to right.
    pub fn live_orders(&self) -> Vec<Symbol> {
        self.runs
            .iter()
            .rev()
            .flat_map(|&(s, k)| std::iter::repeat_n(s, k))
            .collect()
    }
}

fn check_backward(w: &Word) -> Result<(), BurgerError> {
    if !w.is_empty() && w.last_index() != -1 {
        return Err(BurgerError::NotBackwardIndexed {
            last_index: w.last_index(),
        });
    }
    Ok(())
}

/// `J`: the smallest `j` such that `X(-j,-1)` contains a burger.
pub fn backward_j(w: &Word) -> Result<Option<usize>, BurgerError> {
    check_backward(w)?;
    let mut r = BackwardReducer::new();
    for &s in w.symbols().iter().rev() {
        if let Prepended::BurgerAdded(_) = r.prepend(s) {
            return Ok(Some(r.read()));
        }
    }
    Ok(None)
}

/// `(J_m^H, L_m^H)`: the `m`-th time a hamburger joins the backward reduced
/// word, and `d*` of the reduced word at that time.
pub fn backward_jh(w: &Word, m: usize) -> Result<(usize, i64), BurgerError> {
    backward_burger_time(w, m, Symbol::HamburgerB)
}

/// `(J_m^C, L_m^C)`, roles of the burger types swapped: `L` is `d` of the
/// reduced word.
pub fn backward_jc(w: &Word, m: usize) -> Result<(usize, i64), BurgerError> {
    backward_burger_time(w, m, Symbol::CheeseburgerB)
}

fn backward_burger_time(w: &Word, m: usize, burger: Symbol) -> Result<(usize, i64), BurgerError> {
    check_backward(w)?;
    if m == 0 {
        return Err(BurgerError::NotReached {
            wanted: 0,
            found: 0,
        });
    }
    let mut r = BackwardReducer::new();
    for &s in w.symbols().iter().rev() {
        if r.prepend(s) == Prepended::BurgerAdded(burger) && r.count(burger) == m {
            let other = if burger == Symbol::HamburgerB {
                r.d_star()
            } else {
                r.d()
            };
            return Ok((r.read(), other));
        }
    }
    Err(BurgerError::NotReached {
        wanted: m,
        found: r.count(burger),
    })
}
