//! Regression and goodness-of-fit utilities.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Ordinary least squares with the usual residual-based standard errors.
/// Needs at least three points.
pub fn ols(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let s2 = rss / (nf - 2.0);
    Some(LineFit {
        slope,
        intercept,
        slope_se: (s2 / sxx).sqrt(),
        intercept_se: (s2 * (1.0 / nf + mx * mx / sxx)).sqrt(),
    })
}

/// Weighted least squares with known variances `var[i]` of `y[i]`; standard
/// errors come from the weights alone.
pub fn wls(x: &[f64], y: &[f64], var: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n || var.len() != n || var.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let w: Vec<f64> = var.iter().map(|v| 1.0 / v).collect();
    let sw: f64 = w.iter().sum();
    let mx = w.iter().zip(x).map(|(w, a)| w * a).sum::<f64>() / sw;
    let my = w.iter().zip(y).map(|(w, b)| w * b).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(w, a)| w * (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = (0..n).map(|i| w[i] * (x[i] - mx) * (y[i] - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        slope_se: (1.0 / sxx).sqrt(),
        intercept_se: (1.0 / sw + mx * mx / sxx).sqrt(),
    })
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let wa = vec![1.0; a.len()];
    let wb = vec![1.0; b.len()];
    ks_weighted(a, &wa, b, &wb)
}

/// KS statistic between two weighted empirical distributions.
pub fn ks_weighted(a: &[f64], wa: &[f64], b: &[f64], wb: &[f64]) -> f64 {
    let mut ia: Vec<usize> = (0..a.len()).collect();
    let mut ib: Vec<usize> = (0..b.len()).collect();
    ia.sort_by(|&i, &j| a[i].total_cmp(&a[j]));
    ib.sort_by(|&i, &j| b[i].total_cmp(&b[j]));
    let ta: f64 = wa.iter().sum();
    let tb: f64 = wb.iter().sum();
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    while i < ia.len() || j < ib.len() {
        let x = match (ia.get(i), ib.get(j)) {
            (Some(&p), Some(&q)) => a[p].min(b[q]),
            (Some(&p), None) => a[p],
            (None, Some(&q)) => b[q],
            (None, None) => unreachable!(),
        };
        while i < ia.len() && a[ia[i]] <= x {
            fa += wa[ia[i]];
            i += 1;
        }
        while j < ib.len() && b[ib[j]] <= x {
            fb += wb[ib[j]];
            j += 1;
        }
        d = d.max((fa / ta - fb / tb).abs());
    }
    d
}

/// Asymptotic p-value of a two-sample KS statistic with (effective) sample
/// sizes `n` and `m`.
pub fn ks_pvalue(d: f64, n: f64, m: f64) -> f64 {
    let ne = n * m / (n + m);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Kish effective sample size `(Σw)² / Σw²`.
pub fn effective_sample_size(w: &[f64]) -> f64 {
    let s: f64 = w.iter().sum();
    let s2: f64 = w.iter().map(|x| x * x).sum();
    if s2 == 0.0 {
        0.0
    } else {
        s * s / s2
    }
}

/// Pearson statistic `Σ (O - E)² / E`.
pub fn chi_square(observed: &[f64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum()
}

pub fn chi_square_quantile(q: f64, df: f64) -> f64 {
    ChiSquared::new(df).unwrap().inverse_cdf(q)
}

pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let k = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[k]
}

pub fn quantile(xs: &[f64], q: f64) -> f64 {
    quantile_sorted(&sorted(xs), q)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = mean(xs);
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Binomial proportion and its standard error.
pub fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}
