use serde::Serialize;

use super::reduce::reduce;
use super::{Symbol, Word};

/// Raw symbol counts, the discrepancies `(d, d*)`, and the reduced-word
/// order statistics `h`, `c`, `o`, `c_f`, `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountVector {
    pub n_hb: usize,
    pub n_cb: usize,
    pub n_ho: usize,
    pub n_co: usize,
    pub n_fo: usize,
    pub d: i64,
    pub d_star: i64,
    /// Hamburger orders in the reduced word.
    pub h: usize,
    /// Cheeseburger orders in the reduced word.
    pub c: usize,
    /// Hamburger plus flexible orders in the reduced word, plus one.
    pub o: usize,
    /// Cheeseburger orders left of the leftmost flexible order of the reduced
    /// word (all of them when there is no flexible order).
    pub c_f: usize,
    pub r: f64,
}

pub fn counts(w: &Word) -> CountVector {
    let n = |s| w.count(s);
    let (n_hb, n_cb, n_ho, n_co, n_fo) = (
        n(Symbol::HamburgerB),
        n(Symbol::CheeseburgerB),
        n(Symbol::HamburgerO),
        n(Symbol::CheeseburgerO),
        n(Symbol::FlexibleO),
    );
    let reduced = reduce(w);
    let orders = reduced.orders();
    let h = orders.iter().filter(|&&s| s == Symbol::HamburgerO).count();
    let c = orders
        .iter()
        .filter(|&&s| s == Symbol::CheeseburgerO)
        .count();
    let f = orders.iter().filter(|&&s| s == Symbol::FlexibleO).count();
    let o = h + f + 1;
    let c_f = orders
        .iter()
        .take_while(|&&s| s != Symbol::FlexibleO)
        .filter(|&&s| s == Symbol::CheeseburgerO)
        .count();
    CountVector {
        n_hb,
        n_cb,
        n_ho,
        n_co,
        n_fo,
        d: n_hb as i64 - n_ho as i64,
        d_star: n_cb as i64 - n_co as i64,
        h,
        c,
        o,
        c_f,
        r: c_f as f64 / o as f64,
    }
}
