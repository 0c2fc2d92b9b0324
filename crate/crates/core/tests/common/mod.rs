//! Statistical helpers shared by the integration tests.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Chi-square goodness of fit of integer counts against Poisson(`mean`).
///
/// Cells are merged until each expects at least 5 observations. Returns
/// `(statistic, critical value at `alpha`)`.
pub fn poisson_chi_square(counts: &[usize], mean: f64, alpha: f64) -> (f64, f64) {
    let n = counts.len() as f64;
    let pois = Poisson::new(mean).unwrap();
    let max = *counts.iter().max().unwrap();
    let mut observed = vec![0usize; max + 2];
    for &c in counts {
        observed[c] += 1;
    }
    // cells: [lo, hi) with the last one open-ended
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    let mut cum = 0.0;
    for (k, &obs) in observed.iter().enumerate().take(max + 1) {
        let p = pois.pmf(k as u64);
        cum += p;
        obs_acc += obs as f64;
        exp_acc += n * p;
        if exp_acc >= 5.0 && n * (1.0 - cum) >= 5.0 {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    obs_acc += observed[max + 1] as f64;
    exp_acc += n * (1.0 - cum).max(0.0);
    match cells.last_mut() {
        Some(last) if exp_acc < 5.0 => {
            last.0 += obs_acc;
            last.1 += exp_acc;
        }
        _ => cells.push((obs_acc, exp_acc)),
    }
    let stat = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (cells.len() - 1) as f64;
    (stat, ChiSquared::new(dof).unwrap().inverse_cdf(1.0 - alpha))
}

/// Chi-square test of uniformity over `bins` equal cells.
pub fn uniform_chi_square(hist: &[usize], alpha: f64) -> (f64, f64) {
    let n: usize = hist.iter().sum();
    let e = n as f64 / hist.len() as f64;
    let stat = hist.iter().map(|&o| (o as f64 - e).powi(2) / e).sum();
    let dof = (hist.len() - 1) as f64;
    (stat, ChiSquared::new(dof).unwrap().inverse_cdf(1.0 - alpha))
}

/// Weighted isotonic (non-decreasing) regression by pool-adjacent-violators.
pub fn isotonic_non_decreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (v2, w2, n2) = blocks[blocks.len() - 1];
            let (v1, w1, n1) = blocks[blocks.len() - 2];
            if v1 <= v2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().unwrap() = ((v1 * w1 + v2 * w2) / w, w, n1 + n2);
        }
    }
    blocks.into_iter().flat_map(|(v, _, n)| std::iter::repeat_n(v, n)).collect()
}
