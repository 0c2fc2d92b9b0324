//! Rayleigh-fading channel gains.
//!
//! Two interchangeable modes produce the power gains that enter the SIR
//! expressions:
//!
//! * [`ChannelMode::Exact`] draws the complex channel vectors, builds the
//!   zero-forcing null-space bases and projects explicitly.
//! * [`ChannelMode::Approx`] samples the marginal laws directly:
//!   `|h_e† h_a/‖h_a‖|² ~ Exp(1)`, `‖h_e† W_a‖² ~ Gamma(N_A−1, 1)`,
//!   `‖h_ck† W_c‖² ~ Gamma(N_C−1, 1)` and `‖h_a‖² ~ Gamma(N_A, 1)`.
//!
//! A `CN(0, 1)` entry has independent real and imaginary parts, each of
//! variance 1/2.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ChannelMode {
    Exact,
    #[default]
    Approx,
}

impl ChannelMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelMode::Exact => "exact",
            ChannelMode::Approx => "approx",
        }
    }
}

/// A channel vector with one complex coefficient per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    /// Draws `n` i.i.d. unit-variance circularly-symmetric complex normals.
    pub fn standard_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        ComplexVector(
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `self† other`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    fn scale(&mut self, s: Complex64) {
        for z in &mut self.0 {
            *z *= s;
        }
    }

    fn sub_scaled(&mut self, s: Complex64, other: &ComplexVector) {
        for (z, o) in self.0.iter_mut().zip(&other.0) {
            *z -= s * o;
        }
    }
}

/// Orthonormal basis of the orthogonal complement of a channel vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpaceBasis {
    pub columns: Vec<ComplexVector>,
}

impl NullSpaceBasis {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// `‖h† W‖²`: energy of `h` inside the null space.
    pub fn projected_energy(&self, h: &ComplexVector) -> f64 {
        self.columns.iter().map(|w| h.inner(w).norm_sqr()).sum()
    }

    /// Projector `W W†` as a dense row-major matrix.
    pub fn projector(&self) -> Vec<Vec<Complex64>> {
        let n = self.columns.first().map_or(0, |c| c.len());
        let mut p = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for w in &self.columns {
            for (i, row) in p.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v += w.0[i] * w.0[j].conj();
                }
            }
        }
        p
    }
}

/// Completes `h/‖h‖` to an orthonormal basis of `ℂⁿ` and returns the other
/// `n − 1` vectors.
///
/// Modified Gram–Schmidt over the canonical vectors, visited in order of
/// increasing overlap with `h`, with one re-orthogonalization pass.
pub fn null_space_basis(h: &ComplexVector) -> Result<NullSpaceBasis> {
    let n = h.len();
    if n < 2 {
        return Err(Error::NoNullSpace(n));
    }
    let norm = h.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::domain("null space of a zero or non-finite channel vector"));
    }
    let mut unit = h.clone();
    unit.scale(Complex64::new(1.0 / norm, 0.0));

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| unit.0[a].norm_sqr().total_cmp(&unit.0[b].norm_sqr()));

    let mut basis = vec![unit];
    for &k in &order {
        if basis.len() == n {
            break;
        }
        let mut v = ComplexVector(vec![Complex64::new(0.0, 0.0); n]);
        v.0[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &basis {
                let c = q.inner(&v);
                v.sub_scaled(c, q);
            }
        }
        let vn = v.norm();
        // e_k nearly parallel to the span so far; the next one will do
        if vn < 1e-6 {
            continue;
        }
        v.scale(Complex64::new(1.0 / vn, 0.0));
        basis.push(v);
    }
    debug_assert_eq!(basis.len(), n);
    basis.remove(0);
    Ok(NullSpaceBasis { columns: basis })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobChannelDraw {
    /// `‖h_a‖²`
    pub g_bob: f64,
}

/// Gains seen by one Eve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EveChannelDraw {
    /// Message-beam gain `|h_e† h_a/‖h_a‖|²`.
    pub g_msg: f64,
    /// Artificial-noise gain `‖h_e† W_a‖²`.
    pub g_an: f64,
    /// Jamming gain `‖h_ck† W_c‖²`, one per Charlie.
    pub g_cj: Vec<f64>,
}

fn check_antennas(name: &str, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!(
            "{name} must be at least 2 (a null space is needed), got {n}"
        )));
    }
    Ok(())
}

fn gamma(shape: usize) -> Result<Gamma<f64>> {
    Gamma::new(shape as f64, 1.0).map_err(|e| Error::domain(format!("gamma shape {shape}: {e}")))
}

/// Draws `‖h_a‖²` for an `n_a`-antenna transmitter.
pub fn sample_bob_channel_gain<R: Rng + ?Sized>(n_a: usize, mode: ChannelMode, rng: &mut R) -> Result<BobChannelDraw> {
    check_antennas("n_a", n_a)?;
    let g_bob = match mode {
        ChannelMode::Exact => ComplexVector::standard_normal(n_a, rng).norm_sqr(),
        ChannelMode::Approx => gamma(n_a)?.sample(rng),
    };
    Ok(BobChannelDraw { g_bob })
}

/// Draws the gains of one Eve with fresh transmitter and Charlie channels.
///
/// Exact mode redraws `h_a` (and `W_a`) and every Charlie's `W_c`, so each
/// call is an independent sample of the joint law of one Eve's gains.
pub fn sample_eve_channel_gains<R: Rng + ?Sized>(
    n_a: usize,
    n_c: usize,
    n_charlies: usize,
    mode: ChannelMode,
    rng: &mut R,
) -> Result<EveChannelDraw> {
    check_antennas("n_a", n_a)?;
    if n_charlies > 0 {
        check_antennas("n_c", n_c)?;
    }
    match mode {
        ChannelMode::Exact => {
            let tx = TransmitterBeam::sample(n_a, rng)?;
            let (g_msg, g_an) = tx.eve_gains(&ComplexVector::standard_normal(n_a, rng));
            let mut g_cj = Vec::with_capacity(n_charlies);
            for _ in 0..n_charlies {
                let w_c = null_space_basis(&ComplexVector::standard_normal(n_c, rng))?;
                g_cj.push(w_c.projected_energy(&ComplexVector::standard_normal(n_c, rng)));
            }
            Ok(EveChannelDraw { g_msg, g_an, g_cj })
        }
        ChannelMode::Approx => {
            let an = gamma(n_a - 1)?;
            let g_msg: f64 = rng.sample(Exp1);
            let g_an = an.sample(rng);
            let g_cj = if n_charlies > 0 {
                let cj = gamma(n_c - 1)?;
                (0..n_charlies).map(|_| cj.sample(rng)).collect()
            } else {
                Vec::new()
            };
            Ok(EveChannelDraw { g_msg, g_an, g_cj })
        }
    }
}

/// Alice's main channel with its beamformer and artificial-noise basis.
#[derive(Debug, Clone)]
pub struct TransmitterBeam {
    pub h_a: ComplexVector,
    pub beam: ComplexVector,
    pub w_a: NullSpaceBasis,
}

impl TransmitterBeam {
    pub fn sample<R: Rng + ?Sized>(n_a: usize, rng: &mut R) -> Result<Self> {
        check_antennas("n_a", n_a)?;
        Self::from_channel(ComplexVector::standard_normal(n_a, rng))
    }

    pub fn from_channel(h_a: ComplexVector) -> Result<Self> {
        let w_a = null_space_basis(&h_a)?;
        let mut beam = h_a.clone();
        beam.scale(Complex64::new(1.0 / h_a.norm(), 0.0));
        Ok(TransmitterBeam { h_a, beam, w_a })
    }

    pub fn bob_gain(&self) -> f64 {
        self.h_a.norm_sqr()
    }

    /// `(|h_e† beam|², ‖h_e† W_a‖²)` for an eavesdropper channel `h_e`.
    pub fn eve_gains(&self, h_e: &ComplexVector) -> (f64, f64) {
        (h_e.inner(&self.beam).norm_sqr(), self.w_a.projected_energy(h_e))
    }
}
