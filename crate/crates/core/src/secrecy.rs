//! SIR, interference, capacity and threshold formulas.
//!
//! The model is interference-limited: there is no thermal noise term, so an
//! Eve that sees no interference at all has an infinite SIR.

use crate::channel::EveChannelDraw;
use crate::error::{Error, Result};

/// Power split and propagation parameters shared by every link of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Alice's transmit power in watts.
    pub p_t: f64,
    /// Per-Charlie jamming power in watts.
    pub p_c: f64,
    /// Fraction of `p_t` spent on the message.
    pub phi: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    pub n_a: usize,
    pub n_c: usize,
}

impl LinkBudget {
    pub fn new(p_t: f64, p_c: f64, phi: f64, alpha: f64, n_a: usize, n_c: usize) -> Result<Self> {
        if !(p_t >= 0.0) || !p_t.is_finite() {
            return Err(Error::domain(format!("p_t must be finite and >= 0, got {p_t}")));
        }
        if !(p_c >= 0.0) || !p_c.is_finite() {
            return Err(Error::domain(format!("p_c must be finite and >= 0, got {p_c}")));
        }
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::domain(format!("phi must lie in [0, 1], got {phi}")));
        }
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("path-loss exponent must exceed 2, got {alpha}")));
        }
        if n_a < 2 || n_c < 2 {
            return Err(Error::domain(format!(
                "antenna counts must be at least 2, got n_a={n_a}, n_c={n_c}"
            )));
        }
        Ok(LinkBudget { p_t, p_c, phi, alpha, n_a, n_c })
    }

    fn path_loss(&self, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::domain(format!("link distance must be > 0, got {d}")));
        }
        Ok(d.powf(-self.alpha))
    }
}

/// Secrecy threshold on the Eve SIR, derived from the redundancy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyThreshold {
    pub beta_linear: f64,
    /// Bits/s/Hz.
    pub redundancy_rate: f64,
}

impl SecrecyThreshold {
    pub fn from_redundancy_rate(r_e: f64) -> Result<Self> {
        Ok(SecrecyThreshold {
            beta_linear: beta_from_redundancy(r_e)?,
            redundancy_rate: r_e,
        })
    }

    pub fn from_beta_linear(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::domain(format!("threshold must be >= 0, got {beta}")));
        }
        Ok(SecrecyThreshold {
            beta_linear: beta,
            redundancy_rate: (1.0 + beta).log2(),
        })
    }

    pub fn from_beta_db(beta_db: f64) -> Result<Self> {
        Self::from_beta_linear(db_to_linear(beta_db))
    }

    /// Outage when the strongest Eve reaches the threshold.
    pub fn is_outage(&self, max_eve_sir: f64) -> bool {
        max_eve_sir >= self.beta_linear
    }
}

/// Bob's SIR `P_t φ ‖h_a‖² d^{−α}`.
pub fn sir_bob(budget: &LinkBudget, g_bob: f64, d_ab: f64) -> Result<f64> {
    if !(g_bob >= 0.0) {
        return Err(Error::domain(format!("bob gain must be >= 0, got {g_bob}")));
    }
    Ok(budget.p_t * budget.phi * g_bob * budget.path_loss(d_ab)?)
}

/// Aggregate jamming power `Σ (P_c/(N_C−1)) g_c d_c^{−α}` at one Eve.
pub fn charlie_interference(budget: &LinkBudget, g_cj: &[f64], d_ck: &[f64]) -> Result<f64> {
    if g_cj.len() != d_ck.len() {
        return Err(Error::LengthMismatch {
            left: g_cj.len(),
            right: d_ck.len(),
        });
    }
    let per_charlie = budget.p_c / (budget.n_c - 1) as f64;
    let mut sum = 0.0;
    for (&g, &d) in g_cj.iter().zip(d_ck) {
        sum += g * budget.path_loss(d)?;
    }
    Ok(per_charlie * sum)
}

/// SIR of one Eve at distance `d_ae` from Alice with Charlies at `d_ck`.
///
/// Returns `+∞` when the message reaches the Eve without any interference
/// and `0` when neither message nor interference does.
pub fn sir_eve(budget: &LinkBudget, draw: &EveChannelDraw, d_ae: f64, d_ck: &[f64]) -> Result<f64> {
    let loss = budget.path_loss(d_ae)?;
    let numerator = budget.p_t * budget.phi * draw.g_msg * loss;
    let self_noise = budget.p_t * (1.0 - budget.phi) / (budget.n_a - 1) as f64 * draw.g_an * loss;
    let denominator = self_noise + charlie_interference(budget, &draw.g_cj, d_ck)?;
    Ok(ratio_with_sentinels(numerator, denominator))
}

pub(crate) fn ratio_with_sentinels(numerator: f64, denominator: f64) -> f64 {
    if denominator > 0.0 {
        numerator / denominator
    } else if numerator > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// `log2(1 + γ_B) − log2(1 + γ_E)`, possibly negative.
pub fn secrecy_capacity(gamma_b: f64, gamma_e: f64) -> Result<f64> {
    if !(gamma_b >= 0.0) || !(gamma_e >= 0.0) {
        return Err(Error::domain(format!(
            "SIRs must be >= 0, got gamma_b={gamma_b}, gamma_e={gamma_e}"
        )));
    }
    if gamma_b == gamma_e {
        return Ok(0.0);
    }
    Ok(gamma_b.ln_1p() / std::f64::consts::LN_2 - gamma_e.ln_1p() / std::f64::consts::LN_2)
}

/// `β = 2^{R_e} − 1`.
pub fn beta_from_redundancy(r_e: f64) -> Result<f64> {
    if !(r_e >= 0.0) {
        return Err(Error::domain(format!("redundancy rate must be >= 0, got {r_e}")));
    }
    Ok(r_e.exp2() - 1.0)
}

pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
