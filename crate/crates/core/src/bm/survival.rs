use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::BmConfig;
use crate::rng::replica_rng;

/// Node coordinates shared by both axes.
#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalGrid {
    pub nodes: Vec<f64>,
}

impl SurvivalGrid {
    /// Dense near the axes, where survival changes fastest, then uniform.
    pub fn standard(horizon: f64) -> Self {
        let scale = (4.0 * horizon).sqrt();
        let mut nodes = vec![0.02, 0.05];
        nodes.extend((1..=30).map(|k| 0.1 * k as f64));
        SurvivalGrid {
            nodes: nodes.into_iter().map(|x| x * scale).collect(),
        }
    }
}

/// Monte Carlo estimates of `P^z(Z stays in the closed quadrant on the
/// grid up to the horizon)` on a rectilinear grid of starting points, read
/// by bilinear interpolation and clamped outside the grid.
#[derive(Clone, Debug)]
pub struct SurvivalTable {
    horizon: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
    n_paths: u64,
}

pub(crate) fn survives<R: Rng + ?Sized>(
    cfg: &BmConfig,
    z: [f64; 2],
    steps: usize,
    rng: &mut R,
) -> bool {
    let [l11, l21, l22] = cfg.chol();
    let h = cfg.dt.sqrt();
    let (mut u, mut v) = (z[0], z[1]);
    for _ in 0..steps {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        u += h * l11 * g1;
        v += h * (l21 * g1 + l22 * g2);
        if u < 0.0 || v < 0.0 {
            return false;
        }
    }
    true
}

impl SurvivalTable {
    pub fn build(
        cfg: &BmConfig,
        horizon: f64,
        grid: &SurvivalGrid,
        n_paths: u64,
        seed: u64,
    ) -> Self {
        let nodes = grid.nodes.clone();
        let n = nodes.len();
        let steps = cfg.steps(horizon);
        let values = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let z = [nodes[k / n], nodes[k % n]];
                let mut rng = replica_rng(seed, k as u64);
                let hits = (0..n_paths)
                    .filter(|_| survives(cfg, z, steps, &mut rng))
                    .count();
                hits as f64 / n_paths as f64
            })
            .collect();
        SurvivalTable {
            horizon,
            nodes,
            values,
            n_paths,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_paths(&self) -> u64 {
        self.n_paths
    }

    pub fn node_value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.nodes.len() + j]
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let last = self.nodes.len() - 1;
        if x <= self.nodes[0] {
            return (0, 0.0);
        }
        if x >= self.nodes[last] {
            return (last.saturating_sub(1), if last == 0 { 0.0 } else { 1.0 });
        }
        let k = self.nodes.partition_point(|&y| y <= x) - 1;
        (k, (x - self.nodes[k]) / (self.nodes[k + 1] - self.nodes[k]))
    }

    pub fn survival(&self, z: [f64; 2]) -> f64 {
        let (i, fu) = self.locate(z[0]);
        let (j, fv) = self.locate(z[1]);
        let n = self.nodes.len();
        let at = |a: usize, b: usize| self.node_value(a.min(n - 1), b.min(n - 1));
        (1.0 - fu) * (1.0 - fv) * at(i, j)
            + fu * (1.0 - fv) * at(i + 1, j)
            + (1.0 - fu) * fv * at(i, j + 1)
            + fu * fv * at(i + 1, j + 1)
    }
}
