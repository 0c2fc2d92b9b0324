//! Monte Carlo estimation of the secrecy outage probability.
//!
//! A realization draws one topology and then `fading_draws_per_geometry`
//! independent fading states on it. Realization `i` of a run seeded with `s`
//! always uses ChaCha8 seeded with `s` on stream `i`, and outages are
//! aggregated by counting, so estimates do not depend on the worker count.

mod oracle;
mod sweep;

pub use oracle::{
    analytic_sop_an, analytic_sop_an_network, chord_length_laplace, compare_with_oracle, default_oracle_grid,
    per_eve_exceedance_an, OracleComparison,
};
pub use sweep::{derive_seed, phi_grid, run_sweep, Preset, SweepAxis, SweepGrid, SweepResult, SweepRow, SweepSpec};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;

use crate::channel::{null_space_basis, ChannelMode, ComplexVector, EveChannelDraw, NullSpaceBasis, TransmitterBeam};
use crate::config::{ScenarioConfig, Technique};
use crate::error::{Error, Result};
use crate::geometry::{clamp_distance, generate_network, NetworkRealization, Point2D};
use crate::secrecy::{sir_bob, sir_eve, LinkBudget, SecrecyThreshold};

/// Result of one fading draw on one topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationOutcome {
    /// Strongest Eve SIR; 0 without Eves, `+∞` for an interference-free Eve.
    pub max_eve_sir: f64,
    pub bob_sir: f64,
    pub eve_count: usize,
    pub charlie_count: usize,
    pub outage: bool,
}

/// Pooled outage frequency over `realizations` independent trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimate {
    pub sop: f64,
    pub std_err: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl SopEstimate {
    pub fn from_counts(outages: usize, trials: usize, seed: u64) -> Self {
        let sop = outages as f64 / trials as f64;
        SopEstimate {
            sop,
            std_err: (sop * (1.0 - sop) / trials as f64).sqrt(),
            realizations: trials,
            seed,
        }
    }
}

/// Random stream of realization `index` under master `seed`.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one topology and one fading state and evaluates the outage event.
pub fn run_realization<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<RealizationOutcome> {
    let ctx = Context::new(config)?;
    let net = generate_network(config, rng)?;
    ctx.evaluate(&net, rng)
}

/// Draws one topology and `fading_draws_per_geometry` fading states on it.
pub fn run_geometry<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Vec<RealizationOutcome>> {
    let ctx = Context::new(config)?;
    let net = generate_network(config, rng)?;
    (0..config.fading_draws_per_geometry).map(|_| ctx.evaluate(&net, rng)).collect()
}

/// Estimates the SOP from `realizations` topologies under master `seed`.
///
/// Runs on the current rayon pool.
pub fn estimate_sop(config: &ScenarioConfig, realizations: usize, seed: u64) -> Result<SopEstimate> {
    if realizations == 0 {
        return Err(Error::domain("at least one realization is required"));
    }
    let ctx = Context::new(config)?;
    let draws = config.fading_draws_per_geometry.max(1);
    let outages = (0..realizations as u64)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let mut rng = realization_rng(seed, i);
            let net = generate_network(config, &mut rng)?;
            let mut hits = 0;
            for _ in 0..draws {
                hits += usize::from(ctx.evaluate(&net, &mut rng)?.outage);
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(SopEstimate::from_counts(outages, realizations * draws, seed))
}

/// Per-run constants shared by every realization.
struct Context {
    budget: LinkBudget,
    threshold: SecrecyThreshold,
    technique: Technique,
    mode: ChannelMode,
    exclusion: f64,
    bob_distance: f64,
    bob_gamma: Gamma<f64>,
    an_gamma: Gamma<f64>,
    cj_gamma: Option<Gamma<f64>>,
}

fn gamma(shape: usize) -> Result<Gamma<f64>> {
    Gamma::new(shape as f64, 1.0).map_err(|e| Error::domain(format!("gamma shape {shape}: {e}")))
}

impl Context {
    fn new(config: &ScenarioConfig) -> Result<Self> {
        let budget = config.budget()?;
        let cj_gamma = match config.technique {
            Technique::Cj => Some(gamma(budget.n_c - 1)?),
            Technique::An => None,
        };
        Ok(Context {
            budget,
            threshold: config.threshold()?,
            technique: config.technique,
            mode: config.channel_mode,
            exclusion: config.exclusion_m,
            bob_distance: clamp_distance(config.bob_distance_m, config.exclusion_m),
            bob_gamma: gamma(budget.n_a)?,
            an_gamma: gamma(budget.n_a - 1)?,
            cj_gamma,
        })
    }

    /// Samples one fading state on `net` and evaluates every Eve.
    ///
    /// In exact mode one `(h_a, W_a)` and one `W_c` per Charlie are shared
    /// by all Eves of the draw; approx mode samples every gain independently.
    fn evaluate<R: Rng + ?Sized>(&self, net: &NetworkRealization, rng: &mut R) -> Result<RealizationOutcome> {
        let charlies: Vec<Point2D> = match self.technique {
            Technique::Cj => net.charlies().copied().collect(),
            Technique::An => Vec::new(),
        };
        let n_a = self.budget.n_a;
        let n_c = self.budget.n_c;

        let (g_bob, beam, jammer_bases) = match self.mode {
            ChannelMode::Exact => {
                let beam = TransmitterBeam::sample(n_a, rng)?;
                let bases = charlies
                    .iter()
                    .map(|_| null_space_basis(&ComplexVector::standard_normal(n_c, rng)))
                    .collect::<Result<Vec<NullSpaceBasis>>>()?;
                (beam.bob_gain(), Some(beam), bases)
            }
            ChannelMode::Approx => (self.bob_gamma.sample(rng), None, Vec::new()),
        };
        let bob_sir = sir_bob(&self.budget, g_bob, self.bob_distance)?;

        let mut draw = EveChannelDraw {
            g_msg: 0.0,
            g_an: 0.0,
            g_cj: Vec::with_capacity(charlies.len()),
        };
        let mut d_ck = Vec::with_capacity(charlies.len());
        let mut max_eve_sir = 0.0f64;
        for eve in net.eves() {
            draw.g_cj.clear();
            match &beam {
                Some(beam) => {
                    let (g_msg, g_an) = beam.eve_gains(&ComplexVector::standard_normal(n_a, rng));
                    draw.g_msg = g_msg;
                    draw.g_an = g_an;
                    for w_c in &jammer_bases {
                        draw.g_cj.push(w_c.projected_energy(&ComplexVector::standard_normal(n_c, rng)));
                    }
                }
                None => {
                    draw.g_msg = rng.sample(Exp1);
                    draw.g_an = self.an_gamma.sample(rng);
                    if let Some(cj) = &self.cj_gamma {
                        draw.g_cj.extend((0..charlies.len()).map(|_| cj.sample(rng)));
                    }
                }
            }
            d_ck.clear();
            d_ck.extend(charlies.iter().map(|c| clamp_distance(eve.distance(c), self.exclusion)));
            let d_ae = clamp_distance(eve.norm(), self.exclusion);
            let sir = sir_eve(&self.budget, &draw, d_ae, &d_ck)?;
            max_eve_sir = max_eve_sir.max(sir);
        }

        Ok(RealizationOutcome {
            max_eve_sir,
            bob_sir,
            eve_count: net.eve_count(),
            charlie_count: charlies.len(),
            outage: net.eve_count() > 0 && self.threshold.is_outage(max_eve_sir),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_eves(mut cfg: ScenarioConfig) -> ScenarioConfig {
        cfg.lambda_e_per_m2 = 0.0;
        cfg.u_e_per_m = 0.0;
        cfg
    }

    #[test]
    fn empty_eve_set_never_outage() {
        for technique in Technique::ALL {
            for mode in [ChannelMode::Exact, ChannelMode::Approx] {
                let mut cfg = no_eves(ScenarioConfig::fig3_baseline());
                cfg.technique = technique;
                cfg.channel_mode = mode;
                cfg.beta_db = -30.0;
                for i in 0..50 {
                    let out = run_realization(&cfg, &mut realization_rng(3, i)).unwrap();
                    assert_eq!(out.eve_count, 0);
                    assert_eq!(out.max_eve_sir, 0.0);
                    assert!(!out.outage);
                }
                assert_eq!(estimate_sop(&cfg, 100, 3).unwrap().sop, 0.0);
            }
        }
    }

    #[test]
    fn an_without_noise_power_always_leaks() {
        let mut cfg = ScenarioConfig::fig3_baseline();
        cfg.technique = Technique::An;
        cfg.phi = 1.0;
        cfg.beta_db = 60.0;
        for i in 0..100 {
            let out = run_realization(&cfg, &mut realization_rng(5, i)).unwrap();
            if out.eve_count > 0 {
                assert_eq!(out.max_eve_sir, f64::INFINITY);
                assert!(out.outage);
            }
        }
    }

    #[test]
    fn realizations_are_deterministic() {
        let mut cfg = ScenarioConfig::fig3_baseline();
        for mode in [ChannelMode::Exact, ChannelMode::Approx] {
            cfg.channel_mode = mode;
            let a = run_realization(&cfg, &mut realization_rng(17, 4)).unwrap();
            let b = run_realization(&cfg, &mut realization_rng(17, 4)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn std_err_formula() {
        let est = SopEstimate::from_counts(30, 120, 0);
        assert_eq!(est.sop, 0.25);
        assert_eq!(est.std_err, (0.25f64 * 0.75 / 120.0).sqrt());
    }

    #[test]
    fn estimate_is_thread_count_independent() {
        let mut cfg = ScenarioConfig::fig3_baseline();
        cfg.phi = 0.7;
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_sop(&cfg, 400, 42).unwrap())
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn fading_draws_pool_into_trials() {
        let mut cfg = ScenarioConfig::fig3_baseline();
        cfg.fading_draws_per_geometry = 3;
        let est = estimate_sop(&cfg, 20, 1).unwrap();
        assert_eq!(est.realizations, 60);
        assert_eq!(run_geometry(&cfg, &mut realization_rng(1, 0)).unwrap().len(), 3);
    }

    #[test]
    fn huge_threshold_means_no_outage() {
        let mut cfg = ScenarioConfig::fig3_baseline();
        cfg.technique = Technique::An;
        cfg.phi = 0.9;
        cfg.beta_db = 120.0;
        let est = estimate_sop(&cfg, 2000, 9).unwrap();
        assert!(est.sop <= 3.0 * est.std_err);
    }

    #[test]
    fn zero_realizations_rejected() {
        assert!(estimate_sop(&ScenarioConfig::fig3_baseline(), 0, 1).is_err());
    }
}
