//! Closed-form SOP for artificial noise without jamming.
//!
//! Without Charlies the path loss cancels in every Eve SIR, which becomes
//! `φX / (((1−φ)/(N_A−1)) Y)` with `X ~ Exp(1)` and `Y ~ Gamma(N_A−1, 1)`
//! independent. Conditioning on `Y` gives the per-Eve exceedance
//! `Pr(SIR ≥ β) = (1 + βτ)^{−(N_A−1)}` with `τ = (1−φ)/(φ(N_A−1))`, and
//! independent thinning of the Eve process turns that into the SOP.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{estimate_sop, SopEstimate};
use crate::config::{ScenarioConfig, Technique};
use crate::error::{Error, Result};
use crate::secrecy::linear_to_db;

fn check_args(n_a: usize, phi: f64, beta: f64) -> Result<()> {
    if n_a < 2 {
        return Err(Error::domain(format!("n_a must be at least 2, got {n_a}")));
    }
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::domain(format!("phi must lie in (0, 1) for the analytic SOP, got {phi}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::domain(format!("beta must be finite and > 0, got {beta}")));
    }
    Ok(())
}

/// Probability that a single Eve's SIR reaches `beta`.
pub fn per_eve_exceedance_an(n_a: usize, phi: f64, beta: f64) -> Result<f64> {
    check_args(n_a, phi, beta)?;
    let tau = (1.0 - phi) / (phi * (n_a - 1) as f64);
    Ok((-((n_a - 1) as f64) * (beta * tau).ln_1p()).exp())
}

/// SOP when the number of Eves is Poisson with mean `mean_eves`:
/// `1 − exp(−K̄ (1 + βτ)^{−(N_A−1)})`.
pub fn analytic_sop_an(n_a: usize, phi: f64, beta: f64, mean_eves: f64) -> Result<f64> {
    let p = per_eve_exceedance_an(n_a, phi, beta)?;
    if !(mean_eves >= 0.0) || !mean_eves.is_finite() {
        return Err(Error::domain(format!("mean Eve count must be finite and >= 0, got {mean_eves}")));
    }
    Ok(-(-mean_eves * p).exp_m1())
}

/// `E[exp(−s L)]` for the length `L = 2 sqrt(r² − P²)` of a chord with
/// `P ~ Uniform[0, r)`.
///
/// With `P = r cos θ` this is `∫₀^{π/2} exp(−2 s r sin θ) sin θ dθ`, a smooth
/// integrand evaluated by composite Simpson.
pub fn chord_length_laplace(s: f64, r: f64) -> f64 {
    const PANELS: usize = 4096;
    let h = FRAC_PI_2 / PANELS as f64;
    let f = |theta: f64| {
        let sin = theta.sin();
        (-2.0 * s * r * sin).exp() * sin
    };
    let mut acc = f(0.0) + f(FRAC_PI_2);
    for i in 1..PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

/// SOP of the artificial-noise scenario for the full network model.
///
/// Planar Eves are Poisson, but vehicular Eves form a Cox process whose
/// count depends on the random total street length. Thinning each street's
/// 1-D process and averaging over the Poisson line process gives
///
/// `Pr(no outage) = exp(−λ_E π r² p) · exp(−2 λ_l r (1 − E[exp(−p u_E L)]))`
///
/// with `p` the per-Eve exceedance and `L` a chord length.
pub fn analytic_sop_an_network(config: &ScenarioConfig) -> Result<f64> {
    let beta = config.threshold()?.beta_linear;
    let p = per_eve_exceedance_an(config.n_a, config.phi, beta)?;
    let r = config.radius_m;
    let planar = config.lambda_e_per_m2 * PI * r * r * p;
    let streets = 2.0 * config.lambda_l_per_m * r;
    let vehicular = streets * (1.0 - chord_length_laplace(p * config.u_e_per_m, r));
    Ok(-(-(planar + vehicular)).exp_m1())
}

/// Monte Carlo versus closed form at one `(N_A, φ, β)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub n_a: usize,
    pub phi: f64,
    pub beta: f64,
    pub estimate: SopEstimate,
    /// Exact SOP for the network model ([`analytic_sop_an_network`]).
    pub analytic: f64,
    /// SOP treating the total Eve count as Poisson ([`analytic_sop_an`]).
    pub poisson_mean_analytic: f64,
    /// Three binomial standard errors at the analytic value.
    pub tolerance: f64,
    pub pass: bool,
}

/// The 27-point grid `φ ∈ {0.2, 0.5, 0.8} × β ∈ {0.5, 1, 2} × N_A ∈ {2, 4, 8}`.
pub fn default_oracle_grid() -> Vec<(usize, f64, f64)> {
    let mut grid = Vec::with_capacity(27);
    for n_a in [2, 4, 8] {
        for phi in [0.2, 0.5, 0.8] {
            for beta in [0.5, 1.0, 2.0] {
                grid.push((n_a, phi, beta));
            }
        }
    }
    grid
}

/// Runs the artificial-noise scenario of `base` at `(n_a, phi, beta)` and
/// checks it against the closed form.
pub fn compare_with_oracle(
    base: &ScenarioConfig,
    n_a: usize,
    phi: f64,
    beta: f64,
    realizations: usize,
    seed: u64,
) -> Result<OracleComparison> {
    let mut cfg = base.clone();
    cfg.technique = Technique::An;
    cfg.n_a = n_a;
    cfg.phi = phi;
    cfg.beta_db = linear_to_db(beta);
    let estimate = estimate_sop(&cfg, realizations, seed)?;
    let analytic = analytic_sop_an_network(&cfg)?;
    let beta_used = cfg.threshold()?.beta_linear;
    let poisson_mean_analytic = analytic_sop_an(n_a, phi, beta_used, cfg.mean_eves())?;
    let tolerance = 3.0 * (analytic * (1.0 - analytic) / estimate.realizations as f64).sqrt();
    Ok(OracleComparison {
        n_a,
        phi,
        beta,
        estimate,
        analytic,
        poisson_mean_analytic,
        tolerance,
        pass: (estimate.sop - analytic).abs() <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_eves_no_outage() {
        assert_eq!(analytic_sop_an(4, 0.5, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn hand_evaluated_point() {
        let sop = analytic_sop_an(4, 0.5, 1.0, 1.0).unwrap();
        let expected = 1.0 - (-27.0f64 / 64.0).exp();
        assert!((sop - expected).abs() < 1e-15);
        assert!((sop - 0.3442).abs() < 1e-4);
    }

    #[test]
    fn phi_to_one_limit() {
        let k = 3.0;
        let sop = analytic_sop_an(4, 1.0 - 1e-12, 5.0, k).unwrap();
        assert!((sop - (1.0 - (-k).exp())).abs() < 1e-9);
    }

    #[test]
    fn endpoints_rejected() {
        assert!(analytic_sop_an(4, 0.0, 1.0, 1.0).is_err());
        assert!(analytic_sop_an(4, 1.0, 1.0, 1.0).is_err());
        assert!(analytic_sop_an(1, 0.5, 1.0, 1.0).is_err());
        assert!(analytic_sop_an(4, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn chord_laplace_moments() {
        // E[1] = 1 and d/ds at 0 gives -E[L] = -πr/2
        let r = 3000.0;
        assert!((chord_length_laplace(0.0, r) - 1.0).abs() < 1e-12);
        let h = 1e-9;
        let slope = (chord_length_laplace(h, r) - chord_length_laplace(0.0, r)) / h;
        assert!((slope + PI * r / 2.0).abs() < 1e-2 * r);
    }
}
