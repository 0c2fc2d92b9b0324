//! Parameter sweeps and the built-in presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{estimate_sop, SopEstimate};
use crate::config::{validate_config, ScenarioConfig, Technique};
use crate::error::{Error, Result};

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Power allocation ratio.
    Phi,
    /// Secrecy threshold in dB.
    #[value(name = "beta_db")]
    BetaDb,
    /// Alice and Charlie power together, in dBm.
    #[value(name = "power_dbm")]
    PowerDbm,
    /// Charlie power only, in dBm.
    #[value(name = "pc_dbm")]
    PcDbm,
    /// Charlie-to-Eve intensity ratio, applied to both planar and vehicular
    /// intensities.
    Ratio,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Phi => "phi",
            SweepAxis::BetaDb => "beta_db",
            SweepAxis::PowerDbm => "power_dbm",
            SweepAxis::PcDbm => "pc_dbm",
            SweepAxis::Ratio => "ratio",
        }
    }

    /// Sets the axis to `value` on `config`; ratios scale `base`'s Eve
    /// intensities.
    pub fn apply(&self, config: &mut ScenarioConfig, base: &ScenarioConfig, value: f64) {
        match self {
            SweepAxis::Phi => config.phi = value,
            SweepAxis::BetaDb => config.beta_db = value,
            SweepAxis::PowerDbm => {
                config.pt_dbm = value;
                config.pc_dbm = value;
            }
            SweepAxis::PcDbm => config.pc_dbm = value,
            SweepAxis::Ratio => {
                config.lambda_c_per_m2 = value * base.lambda_e_per_m2;
                config.u_c_per_m = value * base.u_e_per_m;
            }
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(SweepAxis::Phi),
            "beta_db" => Ok(SweepAxis::BetaDb),
            "power_dbm" => Ok(SweepAxis::PowerDbm),
            "pc_dbm" => Ok(SweepAxis::PcDbm),
            "ratio" => Ok(SweepAxis::Ratio),
            other => Err(Error::Parse {
                what: "sweep axis".into(),
                message: format!("unknown axis `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl SweepGrid {
    pub fn new(axis: SweepAxis, values: Vec<f64>) -> Result<Self> {
        let grid = SweepGrid { axis, values };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |message: String| Error::Grid {
            axis: self.axis.name().to_string(),
            message,
        };
        if self.values.is_empty() {
            return Err(err("grid is empty".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(err(format!("non-finite value {v}")));
        }
        if let Some(w) = self.values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(err(format!("values must be strictly increasing, found {} then {}", w[0], w[1])));
        }
        Ok(())
    }
}

/// A primary axis, an optional series axis (one curve per value) and the
/// techniques to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SweepGrid>,
    pub techniques: Vec<Technique>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub technique: Technique,
    pub series_value: Option<f64>,
    pub axis_value: f64,
    pub estimate: SopEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_name: String,
    pub series_name: Option<String>,
    /// Sorted by technique, then series value, then axis value.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows of one curve.
    pub fn curve(&self, technique: Technique, series_value: Option<f64>) -> Vec<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.technique == technique && r.series_value == series_value)
            .collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one sweep point, mixed from the master seed and the point's
/// coordinates.
pub fn derive_seed(master: u64, series_index: u64, axis_index: u64, technique: Technique) -> u64 {
    [series_index, axis_index, technique.index()]
        .into_iter()
        .fold(splitmix64(master), |acc, part| splitmix64(acc ^ splitmix64(part)))
}

/// Runs every (technique, series value, axis value) point of `spec`.
///
/// Each point uses `config.realizations` realizations and its own derived
/// seed, so a single point can be reproduced with [`estimate_sop`].
pub fn run_sweep(config: &ScenarioConfig, spec: &SweepSpec) -> Result<SweepResult> {
    spec.axis.validate()?;
    if let Some(series) = &spec.series {
        series.validate()?;
    }
    let mut techniques = spec.techniques.clone();
    techniques.sort();
    techniques.dedup();
    if techniques.is_empty() {
        return Err(Error::Grid {
            axis: "technique".into(),
            message: "no technique selected".into(),
        });
    }

    let series_points: Vec<Option<f64>> = match &spec.series {
        Some(s) => s.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };

    let mut rows = Vec::new();
    for &technique in &techniques {
        for (si, series_value) in series_points.iter().enumerate() {
            for (ai, &axis_value) in spec.axis.values.iter().enumerate() {
                let mut point = config.clone();
                point.technique = technique;
                if let (Some(series), Some(v)) = (&spec.series, series_value) {
                    series.axis.apply(&mut point, config, *v);
                }
                spec.axis.axis.apply(&mut point, config, axis_value);
                let point = validate_config(&point.to_table())?;
                let seed = derive_seed(config.seed, si as u64, ai as u64, technique);
                rows.push(SweepRow {
                    technique,
                    series_value: *series_value,
                    axis_value,
                    estimate: estimate_sop(&point, point.realizations, seed)?,
                });
            }
        }
    }
    Ok(SweepResult {
        axis_name: spec.axis.axis.name().to_string(),
        series_name: spec.series.as_ref().map(|s| s.axis.name().to_string()),
        rows,
    })
}

/// Built-in sweep configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// SOP versus φ, one curve per Charlie power {10, 20, 30} dBm.
    Fig3,
    /// SOP versus β, one curve per φ ∈ {0.4, 0.6, 0.8}.
    Fig4,
    /// SOP versus φ, one curve per Charlie/Eve intensity ratio.
    Fig5,
}

/// φ ∈ {0, 0.05, …, 1}.
pub fn phi_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    pub fn scenario(&self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::fig3_baseline();
        match self {
            Preset::Fig3 => {}
            Preset::Fig4 => {
                cfg.realizations = 50;
            }
            Preset::Fig5 => {
                cfg.pt_dbm = 10.0;
                cfg.pc_dbm = 10.0;
            }
        }
        cfg
    }

    pub fn spec(&self) -> SweepSpec {
        let (axis, series) = match self {
            Preset::Fig3 => (
                SweepGrid { axis: SweepAxis::Phi, values: phi_grid() },
                SweepGrid { axis: SweepAxis::PcDbm, values: vec![10.0, 20.0, 30.0] },
            ),
            Preset::Fig4 => (
                SweepGrid {
                    axis: SweepAxis::BetaDb,
                    values: (-10..=10).map(f64::from).collect(),
                },
                SweepGrid { axis: SweepAxis::Phi, values: vec![0.4, 0.6, 0.8] },
            ),
            Preset::Fig5 => (
                SweepGrid { axis: SweepAxis::Phi, values: phi_grid() },
                SweepGrid { axis: SweepAxis::Ratio, values: vec![0.1, 0.5, 1.0, 5.0, 10.0] },
            ),
        };
        SweepSpec {
            axis,
            series: Some(series),
            techniques: Technique::ALL.to_vec(),
        }
    }
}
