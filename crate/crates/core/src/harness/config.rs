//! Experiment configuration, read from TOML and from `family[:params]`
//! weight specs.

use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::{DegreeLaw, ExcessWeightLaw};
use crate::error::{Error, Result};
use crate::fpp::WeightMode;
use crate::layers::gamma_p_for_alpha;

/// Smallest graph size accepted in an experiment grid; the centering
/// `2 ln ln n / |ln(tau - 2)|` is comfortably positive from here on.
pub const MIN_GRID_N: u64 = 16;

/// Parses `uniform01`, `exponential[:rate]`, `power-near-zero:beta`,
/// `double-exponential`, `zero`, or `table:x1/F1,x2/F2,...` (the table
/// starts implicitly at `(0, 0)`).
pub fn parse_weight_spec(spec: &str) -> Result<ExcessWeightLaw<f64>> {
    let (family, params) = match spec.split_once(':') {
        Some((f, p)) => (f.trim(), Some(p.trim())),
        None => (spec.trim(), None),
    };
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("`{s}` is not a number in weight spec `{spec}`")))
    };
    let no_params = |law: ExcessWeightLaw<f64>| match params {
        None => Ok(law),
        Some(_) => Err(Error::Config(format!("weight family `{family}` takes no parameters"))),
    };
    let law = match family {
        "uniform01" | "uniform" => no_params(ExcessWeightLaw::Uniform01)?,
        "double-exponential" | "double-exp" => no_params(ExcessWeightLaw::DoubleExponential)?,
        "zero" => no_params(ExcessWeightLaw::Zero)?,
        "exponential" | "exp" => ExcessWeightLaw::Exponential {
            rate: params.map(number).transpose()?.unwrap_or(1.0),
        },
        "power-near-zero" | "power" => ExcessWeightLaw::PowerNearZero {
            beta: number(params.ok_or_else(|| Error::Config("power-near-zero needs `:beta`".into()))?)?,
        },
        "table" => {
            let body = params.ok_or_else(|| Error::Config("table needs `:x/F,...` points".into()))?;
            let mut xs = vec![0.0];
            let mut cdf = vec![0.0];
            for point in body.split(',') {
                let (x, f) = point
                    .split_once('/')
                    .ok_or_else(|| Error::Config(format!("table point `{point}` is not `x/F`")))?;
                xs.push(number(x)?);
                cdf.push(number(f)?);
            }
            ExcessWeightLaw::Table { xs, cdf }
        }
        other => return Err(Error::Config(format!("unknown weight family `{other}`"))),
    };
    law.validated().map_err(|e| Error::Config(e.to_string()))
}

/// Inverse of [`parse_weight_spec`].
pub fn format_weight_spec(law: &ExcessWeightLaw<f64>) -> String {
    match law {
        ExcessWeightLaw::Exponential { rate } => format!("exponential:{rate}"),
        ExcessWeightLaw::PowerNearZero { beta } => format!("power-near-zero:{beta}"),
        ExcessWeightLaw::Table { xs, cdf } => {
            let points: Vec<String> = xs.iter().zip(cdf).skip(1).map(|(x, f)| format!("{x}/{f}")).collect();
            format!("table:{}", points.join(","))
        }
        other => other.name().to_string(),
    }
}

fn de_weight<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExcessWeightLaw<f64>, D::Error> {
    let spec = String::deserialize(d)?;
    parse_weight_spec(&spec).map_err(serde::de::Error::custom)
}

fn ser_weight<S: Serializer>(law: &ExcessWeightLaw<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_weight_spec(law))
}

fn default_replications() -> usize {
    1
}

fn default_mode() -> WeightMode {
    WeightMode::PerEdge
}

fn default_cp() -> f64 {
    1.0
}

fn default_schedule_gamma() -> f64 {
    0.5
}

/// Layer-path diagnostics: schedule `(k, B, gamma)`, core exponent `alpha`,
/// and the retention policy `p(d) = exp(-cp (ln d)^gamma_p)` with
/// `gamma_p = |ln alpha| / |ln(tau - 2)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerParams {
    pub k: u64,
    pub b: f64,
    pub alpha: f64,
    #[serde(default = "default_cp")]
    pub cp: f64,
    #[serde(default = "default_schedule_gamma")]
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Graph sizes, strictly increasing.
    #[serde(rename = "n")]
    pub n_grid: Vec<u64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub degree: DegreeLaw<f64>,
    #[serde(deserialize_with = "de_weight", serialize_with = "ser_weight")]
    pub weight: ExcessWeightLaw<f64>,
    #[serde(default = "default_mode")]
    pub mode: WeightMode,
    #[serde(default)]
    pub layers: Option<LayerParams>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(n_grid: Vec<u64>, replications: usize, tau: f64, weight: ExcessWeightLaw<f64>, seed: u64) -> Self {
        Self {
            n_grid,
            replications,
            degree: DegreeLaw::PurePower {
                tau,
                gamma: 0.5,
                c: 1.0,
                min_degree: 2,
            },
            weight,
            mode: WeightMode::PerEdge,
            layers: None,
            seed,
            out: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validated()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// This config with every key present in `overlay` (TOML) replaced.
    pub fn overridden_by(&self, overlay: &str) -> Result<Self> {
        let mut base: toml::Table = toml::from_str(&self.to_toml()).expect("round trip");
        let top: toml::Table = toml::from_str(overlay).map_err(|e| Error::Config(e.to_string()))?;
        for (key, value) in top {
            match (base.get_mut(&key), value) {
                // tables merge key by key, except a new law family replaces the law
                (Some(toml::Value::Table(old)), toml::Value::Table(new)) if !new.contains_key("family") => {
                    old.extend(new);
                }
                (_, value) => {
                    base.insert(key, value);
                }
            }
        }
        let cfg: Self = base
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validated()
    }

    pub fn tau(&self) -> f64 {
        self.degree.tau().expect("validated configs have a power-law degree")
    }

    /// `gamma_p` of the retention policy, when layer diagnostics are on.
    pub fn gamma_p(&self) -> Option<f64> {
        self.layers.as_ref().map(|l| gamma_p_for_alpha(l.alpha, self.tau()))
    }

    pub fn validated(self) -> Result<Self> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.n_grid.is_empty() {
            return cfg("the n grid is empty".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return cfg(format!("the n grid {:?} is not strictly increasing", self.n_grid));
        }
        if self.n_grid[0] < MIN_GRID_N {
            return cfg(format!("graph sizes must be at least {MIN_GRID_N}"));
        }
        if self.n_grid.iter().any(|&n| n > u32::MAX as u64 / 4) {
            return cfg("graph size exceeds the half-edge index space".into());
        }
        if self.seed > i64::MAX as u64 {
            return cfg(format!(
                "seed {} does not fit a TOML integer (at most 2^63 - 1)",
                self.seed
            ));
        }
        if self.replications == 0 {
            return cfg("replications must be at least 1".into());
        }
        let degree = self
            .degree
            .clone()
            .validated()
            .map_err(|e| Error::Config(e.to_string()))?;
        let Some(tau) = degree.tau() else {
            return cfg("experiments need a power-law degree family with tau".into());
        };
        if !(tau > 2.0 && tau < 3.0) {
            return cfg(format!("tau = {tau} outside (2, 3)"));
        }
        self.weight
            .clone()
            .validated()
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(l) = &self.layers {
            if l.k < 3 || !(l.b > 0.0) || !(l.cp > 0.0) || !(l.gamma > 0.0 && l.gamma < 1.0) {
                return cfg(format!("bad layer parameters {l:?}"));
            }
            if !(l.alpha > 0.5 && l.alpha > tau - 2.0 && l.alpha < 1.0) {
                return cfg(format!("alpha = {} must lie in (max(1/2, tau - 2), 1)", l.alpha));
            }
        }
        Ok(Self { degree, ..self })
    }
}
