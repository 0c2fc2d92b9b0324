//! Scenario configuration: a flat TOML document with one key per parameter.
//!
//! Powers are given in dBm and the threshold in dB; [`ScenarioConfig::budget`]
//! and [`ScenarioConfig::threshold`] convert to linear units.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::channel::ChannelMode;
use crate::error::{Error, Result};
use crate::secrecy::{dbm_to_watts, LinkBudget, SecrecyThreshold};

/// Prefix of environment variables that override config keys, e.g.
/// `V2X_SECRECY_PHI=0.3`.
pub const ENV_PREFIX: &str = "V2X_SECRECY_";

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_EXCLUSION_M: f64 = 1.0;
pub const DEFAULT_BOB_DISTANCE_M: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    /// Artificial noise from Alice only.
    An,
    /// Artificial noise plus cooperative jamming from Charlies.
    Cj,
}

impl Technique {
    pub const ALL: [Technique; 2] = [Technique::An, Technique::Cj];

    pub fn as_str(&self) -> &'static str {
        match self {
            Technique::An => "an",
            Technique::Cj => "cj",
        }
    }

    pub(crate) fn index(&self) -> u64 {
        match self {
            Technique::An => 0,
            Technique::Cj => 1,
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "an" => Ok(Technique::An),
            "cj" => Ok(Technique::Cj),
            other => Err(Error::config("technique", format!("expected `an` or `cj`, got `{other}`"))),
        }
    }
}

/// Every parameter of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub radius_m: f64,
    pub alpha: f64,
    pub phi: f64,
    pub beta_db: f64,
    pub pt_dbm: f64,
    pub pc_dbm: f64,
    pub n_a: usize,
    pub n_c: usize,
    pub lambda_e_per_m2: f64,
    pub lambda_c_per_m2: f64,
    pub lambda_l_per_m: f64,
    pub u_e_per_m: f64,
    pub u_c_per_m: f64,
    pub technique: Technique,
    pub channel_mode: ChannelMode,
    pub realizations: usize,
    pub fading_draws_per_geometry: usize,
    #[serde(serialize_with = "seed_serde::serialize")]
    pub seed: u64,
    pub exclusion_m: f64,
    pub bob_distance_m: f64,
}

pub const CONFIG_KEYS: [&str; 20] = [
    "radius_m",
    "alpha",
    "phi",
    "beta_db",
    "pt_dbm",
    "pc_dbm",
    "n_a",
    "n_c",
    "lambda_e_per_m2",
    "lambda_c_per_m2",
    "lambda_l_per_m",
    "u_e_per_m",
    "u_c_per_m",
    "technique",
    "channel_mode",
    "realizations",
    "fading_draws_per_geometry",
    "seed",
    "exclusion_m",
    "bob_distance_m",
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    radius_m: Option<f64>,
    alpha: Option<f64>,
    phi: Option<f64>,
    beta_db: Option<f64>,
    pt_dbm: Option<f64>,
    pc_dbm: Option<f64>,
    n_a: Option<i64>,
    n_c: Option<i64>,
    lambda_e_per_m2: Option<f64>,
    lambda_c_per_m2: Option<f64>,
    lambda_l_per_m: Option<f64>,
    u_e_per_m: Option<f64>,
    u_c_per_m: Option<f64>,
    technique: Option<Technique>,
    channel_mode: Option<ChannelMode>,
    realizations: Option<i64>,
    fading_draws_per_geometry: Option<i64>,
    #[serde(default, deserialize_with = "seed_serde::deserialize_opt")]
    seed: Option<u64>,
    exclusion_m: Option<f64>,
    bob_distance_m: Option<f64>,
}

fn required<T>(field: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::config(field, "missing required field"))
}

fn count(field: &str, v: i64, min: i64) -> Result<usize> {
    if v < min {
        return Err(Error::config(field, format!("must be at least {min}, got {v}")));
    }
    Ok(v as usize)
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::config(field, format!("must be finite, got {v}")));
    }
    Ok(v)
}

fn intensity(field: &str, v: f64) -> Result<f64> {
    if !(finite(field, v)? >= 0.0) {
        return Err(Error::config(field, format!("intensity must be >= 0, got {v}")));
    }
    Ok(v)
}

/// Checks a raw key-value document and builds a typed config.
///
/// Physical parameters are required; `seed`, `exclusion_m`,
/// `bob_distance_m`, `channel_mode` and `fading_draws_per_geometry` fall back
/// to their defaults. Unknown keys are rejected.
pub fn validate_config(raw: &Table) -> Result<ScenarioConfig> {
    let parsed: RawScenario = Value::Table(raw.clone()).try_into().map_err(|e: toml::de::Error| Error::Parse {
        what: "scenario config".into(),
        message: e.to_string().trim().to_string(),
    })?;

    let radius_m = finite("radius_m", required("radius_m", parsed.radius_m)?)?;
    if !(radius_m > 0.0) {
        return Err(Error::config("radius_m", format!("disk radius must be > 0, got {radius_m}")));
    }
    let alpha = finite("alpha", required("alpha", parsed.alpha)?)?;
    if !(alpha > 2.0) {
        return Err(Error::config("alpha", format!("path-loss exponent must exceed 2, got {alpha}")));
    }
    let phi = required("phi", parsed.phi)?;
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::config("phi", format!("power allocation ratio must lie in [0, 1], got {phi}")));
    }
    let beta_db = required("beta_db", parsed.beta_db)?;
    if beta_db.is_nan() || beta_db == f64::INFINITY {
        return Err(Error::config("beta_db", format!("threshold must be a number below +inf dB, got {beta_db}")));
    }
    let pt_dbm = finite("pt_dbm", required("pt_dbm", parsed.pt_dbm)?)?;
    let pc_dbm = finite("pc_dbm", required("pc_dbm", parsed.pc_dbm)?)?;
    let technique = required("technique", parsed.technique)?;
    let n_a = required("n_a", parsed.n_a)?;
    if n_a < 2 {
        return Err(Error::config(
            "n_a",
            format!("artificial noise needs a null space: at least 2 transmit antennas, got {n_a}"),
        ));
    }
    let n_c = required("n_c", parsed.n_c)?;
    if technique == Technique::Cj && n_c < 2 {
        return Err(Error::config(
            "n_c",
            format!("cooperative jamming needs a null space: at least 2 Charlie antennas, got {n_c}"),
        ));
    }
    let n_c = count("n_c", n_c, 1)?;

    let config = ScenarioConfig {
        radius_m,
        alpha,
        phi,
        beta_db,
        pt_dbm,
        pc_dbm,
        n_a: n_a as usize,
        n_c,
        lambda_e_per_m2: intensity("lambda_e_per_m2", required("lambda_e_per_m2", parsed.lambda_e_per_m2)?)?,
        lambda_c_per_m2: intensity("lambda_c_per_m2", required("lambda_c_per_m2", parsed.lambda_c_per_m2)?)?,
        lambda_l_per_m: intensity("lambda_l_per_m", required("lambda_l_per_m", parsed.lambda_l_per_m)?)?,
        u_e_per_m: intensity("u_e_per_m", required("u_e_per_m", parsed.u_e_per_m)?)?,
        u_c_per_m: intensity("u_c_per_m", required("u_c_per_m", parsed.u_c_per_m)?)?,
        technique,
        channel_mode: parsed.channel_mode.unwrap_or_default(),
        realizations: count("realizations", required("realizations", parsed.realizations)?, 1)?,
        fading_draws_per_geometry: count(
            "fading_draws_per_geometry",
            parsed.fading_draws_per_geometry.unwrap_or(1),
            1,
        )?,
        seed: parsed.seed.unwrap_or(DEFAULT_SEED),
        exclusion_m: finite("exclusion_m", parsed.exclusion_m.unwrap_or(DEFAULT_EXCLUSION_M))?,
        bob_distance_m: finite("bob_distance_m", parsed.bob_distance_m.unwrap_or(DEFAULT_BOB_DISTANCE_M))?,
    };
    if !(config.exclusion_m > 0.0) {
        return Err(Error::config("exclusion_m", format!("exclusion radius must be > 0, got {}", config.exclusion_m)));
    }
    if !(config.bob_distance_m >= config.exclusion_m) {
        return Err(Error::config(
            "bob_distance_m",
            format!(
                "Bob distance {} must be at least the exclusion radius {}",
                config.bob_distance_m, config.exclusion_m
            ),
        ));
    }
    Ok(config)
}

/// Parses and validates a TOML config document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    validate_config(&parse_table(text)?)
}

pub(crate) fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| Error::Parse {
        what: "TOML document".into(),
        message: e.to_string().trim().to_string(),
    })
}

/// Parses a scalar written on the command line or in the environment: any
/// TOML value literal, otherwise a bare string.
pub fn parse_scalar(text: &str) -> Value {
    match format!("v = {text}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(text.to_string())),
        Err(_) => Value::String(text.to_string()),
    }
}

/// Applies `V2X_SECRECY_<KEY>` overrides from `vars` onto `table`.
pub fn apply_env_overrides<I, K, V>(table: &mut Table, vars: I) -> Result<()>
where
    I: IntoIterator<Item = (K, V)>,
    K: AsRef<str>,
    V: AsRef<str>,
{
    for (k, v) in vars {
        let Some(key) = k.as_ref().strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let key = key.to_ascii_lowercase();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::config(&key, format!("unknown key in environment variable {}", k.as_ref())));
        }
        table.insert(key, parse_scalar(v.as_ref()));
    }
    Ok(())
}

impl ScenarioConfig {
    /// Parameters of the power sweep experiment: 3 km disk, `α = 3`,
    /// `N_A = N_C = 4`, `λ_E = λ_C = 1e−6 /m²`, `u_E = u_C = 1e−3 /m`,
    /// streets at `λ_l = 1e−3 /m`, `β = 0 dB`.
    pub fn fig3_baseline() -> Self {
        ScenarioConfig {
            radius_m: 3000.0,
            alpha: 3.0,
            phi: 0.5,
            beta_db: 0.0,
            pt_dbm: 20.0,
            pc_dbm: 20.0,
            n_a: 4,
            n_c: 4,
            lambda_e_per_m2: 1e-6,
            lambda_c_per_m2: 1e-6,
            lambda_l_per_m: 1e-3,
            u_e_per_m: 1e-3,
            u_c_per_m: 1e-3,
            technique: Technique::Cj,
            channel_mode: ChannelMode::Approx,
            realizations: 25,
            fading_draws_per_geometry: 1,
            seed: DEFAULT_SEED,
            exclusion_m: DEFAULT_EXCLUSION_M,
            bob_distance_m: DEFAULT_BOB_DISTANCE_M,
        }
    }

    pub fn to_table(&self) -> Table {
        match Table::try_from(self) {
            Ok(t) => t,
            Err(e) => unreachable!("scenario config always serializes: {e}"),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_table()).unwrap_or_default()
    }

    pub fn budget(&self) -> Result<LinkBudget> {
        // the Charlie antenna count is unused without jamming
        let n_c = match self.technique {
            Technique::An => self.n_c.max(2),
            Technique::Cj => self.n_c,
        };
        LinkBudget::new(
            dbm_to_watts(self.pt_dbm),
            dbm_to_watts(self.pc_dbm),
            self.phi,
            self.alpha,
            self.n_a,
            n_c,
        )
    }

    pub fn threshold(&self) -> Result<SecrecyThreshold> {
        SecrecyThreshold::from_beta_db(self.beta_db)
    }

    pub fn area_m2(&self) -> f64 {
        PI * self.radius_m * self.radius_m
    }

    /// Expected total number of Eves (planar plus vehicular).
    pub fn mean_eves(&self) -> f64 {
        self.lambda_e_per_m2 * self.area_m2() + self.u_e_per_m * PI * self.lambda_l_per_m * self.radius_m.powi(2)
    }

    pub fn mean_charlies(&self) -> f64 {
        self.lambda_c_per_m2 * self.area_m2() + self.u_c_per_m * PI * self.lambda_l_per_m * self.radius_m.powi(2)
    }
}

/// Seeds are `u64` but TOML integers are `i64`: values above `i64::MAX`
/// travel as decimal strings.
mod seed_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn deserialize_opt<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        match Option::<Repr>::deserialize(d)? {
            None => Ok(None),
            Some(Repr::Int(v)) => u64::try_from(v)
                .map(Some)
                .map_err(|_| serde::de::Error::custom(format!("seed must be non-negative, got {v}"))),
            Some(Repr::Str(s)) => s
                .parse::<u64>()
                .map(Some)
                .map_err(|_| serde::de::Error::custom(format!("seed must be a 64-bit unsigned integer, got `{s}`"))),
        }
    }
}
