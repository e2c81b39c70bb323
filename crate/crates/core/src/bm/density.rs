use std::fmt::Write as _;

use statrs::function::gamma::gamma;

use super::{BmConfig, BmError, SurvivalTable};

/// Survival estimates below this are treated as unusable.
pub const SURVIVAL_FLOOR: f64 = 1e-6;

/// `arg(Az)` for `z` in the closed quadrant, in `[0, π/(2μ)]`.
pub fn wedge_angle(cfg: &BmConfig, z: [f64; 2]) -> f64 {
    let w = cfg.apply_a(z);
    w[1].atan2(w[0])
}

/// Density at `z` of the time-`t` value of the quadrant meander:
/// `det A / (2^μ Γ(μ) t^{1+μ}) |Az|^{2μ} exp(-|Az|²/2t) sin(2μ arg Az)`.
pub fn endpoint_density(cfg: &BmConfig, t: f64, z: [f64; 2]) -> Result<f64, BmError> {
    if z[0] < 0.0 || z[1] < 0.0 {
        return Err(BmError::OutOfCone(z[0], z[1]));
    }
    let mu = cfg.mu;
    let w = cfg.apply_a(z);
    let r2 = w[0] * w[0] + w[1] * w[1];
    let angle = w[1].atan2(w[0]);
    let norm = cfg.det_a() / (2f64.powf(mu) * gamma(mu) * t.powf(1.0 + mu));
    let f = norm * r2.powf(mu) * (-r2 / (2.0 * t)).exp() * (2.0 * mu * angle).sin();
    Ok(f.max(0.0))
}

/// Unnormalized `g_t(z) = f̂_{1-t}(z) / P^z(Z stays in the quadrant for 1-t)`.
pub fn g_density(
    cfg: &BmConfig,
    t: f64,
    z: [f64; 2],
    survival: &SurvivalTable,
) -> Result<f64, BmError> {
    if !(z[0] > 0.0 && z[1] > 0.0) {
        return Err(BmError::OutOfCone(z[0], z[1]));
    }
    let horizon = 1.0 - t;
    if (survival.horizon() - horizon).abs() > 1e-9 {
        return Err(BmError::HorizonMismatch {
            table: survival.horizon(),
            wanted: horizon,
        });
    }
    let s = survival.survival(z);
    if s < SURVIVAL_FLOOR {
        return Err(BmError::DegenerateSurvival {
            u: z[0],
            v: z[1],
            estimate: s,
        });
    }
    Ok(endpoint_density(cfg, horizon, z)? / s)
}

/// `u,v,f` table of `f̂_t` on an `n × n` grid over `[0, extent]²`.
pub fn endpoint_density_csv(cfg: &BmConfig, t: f64, extent: f64, n: usize) -> String {
    let mut out = String::from("u,v,f\n");
    let h = extent / (n.max(2) - 1) as f64;
    for i in 0..n {
        for j in 0..n {
            let z = [i as f64 * h, j as f64 * h];
            let f = endpoint_density(cfg, t, z).unwrap();
            let _ = writeln!(out, "{},{},{}", z[0], z[1], f);
        }
    }
    out
}
