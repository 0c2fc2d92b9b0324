//! Brute-force checks of the closed-form artificial-noise SOP.
//!
//! The reference simulations here sample the SIR ratio directly from its
//! ingredients and never touch the engine.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};
use v2x_secrecy::engine::{analytic_sop_an, analytic_sop_an_network, compare_with_oracle, derive_seed};
use v2x_secrecy::channel::ChannelMode;
use v2x_secrecy::secrecy::linear_to_db;
use v2x_secrecy::{ScenarioConfig, Technique};

fn poisson<R: Rng>(mean: f64, rng: &mut R) -> usize {
    if mean == 0.0 {
        0
    } else {
        Poisson::new(mean).unwrap().sample(rng) as usize
    }
}

/// Does any of `k` Eves reach `beta`?
fn any_exceeds<R: Rng>(k: usize, n_a: usize, phi: f64, beta: f64, rng: &mut R) -> bool {
    let an = Gamma::new((n_a - 1) as f64, 1.0).unwrap();
    let noise_weight = (1.0 - phi) / (n_a - 1) as f64;
    (0..k).any(|_| {
        let x: f64 = rng.sample(Exp1);
        let y = an.sample(rng);
        phi * x / (noise_weight * y) >= beta
    })
}

#[test]
fn poisson_count_formula_matches_brute_force() {
    let points = [
        (4usize, 0.5, 1.0, 1.0),
        (2, 0.3, 2.0, 2.5),
        (8, 0.2, 2.0, 5.0),
        (4, 0.8, 4.0, 0.5),
        (3, 0.6, 1.5, 3.0),
        (8, 0.2, 2.0, 56.548667764616276),
    ];
    let samples = 1_000_000;
    for (i, &(n_a, phi, beta, mean_eves)) in points.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + i as u64);
        let hits = (0..samples)
            .filter(|_| {
                let k = poisson(mean_eves, &mut rng);
                any_exceeds(k, n_a, phi, beta, &mut rng)
            })
            .count();
        let mc = hits as f64 / samples as f64;
        let analytic = analytic_sop_an(n_a, phi, beta, mean_eves).unwrap();
        let se = (analytic * (1.0 - analytic) / samples as f64).sqrt();
        assert!(
            (mc - analytic).abs() <= 3.0 * se,
            "point {i}: brute force {mc} vs closed form {analytic} (se {se})"
        );
    }
}

#[test]
fn street_conditioned_formula_matches_brute_force() {
    let r = 3000.0;
    let points = [(4usize, 0.2, 2.0), (8, 0.2, 1.0), (8, 0.2, 2.0), (2, 0.2, 2.0), (4, 0.2, 1.0)];
    let samples = 200_000;
    for (i, &(n_a, phi, beta)) in points.iter().enumerate() {
        let mut cfg = ScenarioConfig::fig3_baseline();
        cfg.technique = Technique::An;
        cfg.n_a = n_a;
        cfg.phi = phi;
        cfg.beta_db = linear_to_db(beta);
        let beta = cfg.threshold().unwrap().beta_linear;
        let mut rng = ChaCha8Rng::seed_from_u64(400 + i as u64);
        let hits = (0..samples)
            .filter(|_| {
                let mut k = poisson(cfg.lambda_e_per_m2 * PI * r * r, &mut rng);
                for _ in 0..poisson(2.0 * cfg.lambda_l_per_m * r, &mut rng) {
                    let p = r * rng.random::<f64>();
                    k += poisson(cfg.u_e_per_m * 2.0 * (r * r - p * p).sqrt(), &mut rng);
                }
                any_exceeds(k, n_a, phi, beta, &mut rng)
            })
            .count();
        let mc = hits as f64 / samples as f64;
        let analytic = analytic_sop_an_network(&cfg).unwrap();
        let se = (analytic * (1.0 - analytic) / samples as f64).sqrt();
        assert!(
            (mc - analytic).abs() <= 3.0 * se,
            "point {i}: brute force {mc} vs closed form {analytic} (se {se})"
        );
    }
}

#[test]
fn street_conditioned_formula_reduces_to_poisson_without_streets() {
    let mut cfg = ScenarioConfig::fig3_baseline();
    cfg.lambda_l_per_m = 0.0;
    cfg.phi = 0.3;
    let a = analytic_sop_an_network(&cfg).unwrap();
    let b = analytic_sop_an(cfg.n_a, cfg.phi, 1.0, cfg.mean_eves()).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn exact_channel_engine_matches_oracle() {
    let cfg = ScenarioConfig { channel_mode: ChannelMode::Exact, ..ScenarioConfig::fig3_baseline() };
    for (i, (n_a, phi, beta)) in [(8usize, 0.2, 2.0), (4, 0.2, 2.0)].into_iter().enumerate() {
        let seed = derive_seed(77, 0, i as u64, Technique::An);
        let c = compare_with_oracle(&cfg, n_a, phi, beta, 5_000, seed).unwrap();
        assert!(c.pass, "{c:?}");
    }
}
