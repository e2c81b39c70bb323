//! Simulation toolkit for the hamburger-cheeseburger inventory model that
//! encodes FK-decorated random planar maps, and for its scaling limit: a
//! correlated planar Brownian motion conditioned to stay in the first
//! quadrant.

pub mod bm;
pub mod burger;
pub mod harness;
pub mod loops;
pub mod path;
pub mod rng;
pub mod sampler;
pub mod stats;
