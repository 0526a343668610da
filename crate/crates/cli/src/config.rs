//! TOML run configuration with sections [problem], [grid], [run],
//! [diagnostics], [output] and, for sweeps, [sweep].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use bnls_core::evolution::{Absorber, RunConfig};
use bnls_core::ground_state::SolveOptions;
use bnls_core::{Family, ProblemSpec};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: ProblemSpec,
    pub grid: Grid,
    #[serde(default)]
    pub run: Run,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    #[serde(default)]
    pub output: Output,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub k: usize,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Run {
    pub dt: f64,
    pub t_end: f64,
    pub blowup_kinetic_factor: f64,
    pub sup_norm_limit: f64,
    pub linear_only: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub absorber: Option<Absorber>,
    pub initial: Initial,
    pub solver: SolveOptions,
    /// A stored BNLS1 ground-state profile to use instead of solving.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_state: Option<PathBuf>,
    /// Seed for random initial data; `--seed` overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for Run {
    fn default() -> Self {
        let rc = RunConfig::default();
        Self {
            dt: rc.dt,
            t_end: rc.t_end,
            blowup_kinetic_factor: rc.blowup_kinetic_factor,
            sup_norm_limit: rc.sup_norm_limit,
            linear_only: false,
            absorber: None,
            initial: Initial::GroundState { amplitude: 0.1 },
            solver: SolveOptions::default(),
            ground_state: None,
            seed: None,
        }
    }
}

/// Initial datum u0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    /// amplitude × Q.
    GroundState { amplitude: f64 },
    /// amplitude × exp(-r²/width²).
    Gaussian { amplitude: f64, width: f64 },
    /// amplitude × a seeded random smooth radial field.
    Random { amplitude: f64, terms: usize },
}

impl Initial {
    pub fn amplitude(&self) -> f64 {
        match *self {
            Self::GroundState { amplitude } | Self::Gaussian { amplitude, .. } | Self::Random { amplitude, .. } => {
                amplitude
            }
        }
    }

    pub fn with_amplitude(self, a: f64) -> Self {
        match self {
            Self::GroundState { .. } => Self::GroundState { amplitude: a },
            Self::Gaussian { width, .. } => Self::Gaussian { amplitude: a, width },
            Self::Random { terms, .. } => Self::Random { amplitude: a, terms },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diagnostics {
    /// Steps between recorded rows.
    pub every: usize,
    pub morawetz_r: Vec<f64>,
    pub cutoff_r: Vec<f64>,
    #[serde(with = "exponent_list")]
    pub norm_exponents: Vec<f64>,
    /// Ball radius of the evacuation scan; must be one of `cutoff_r`.
    pub evacuation_radius: f64,
    /// Evacuation threshold relative to the initial local mass.
    pub evacuation_fraction: f64,
}

/// JSON has no infinity, so the sup-norm exponent travels through run
/// manifests as the string "inf".
mod exponent_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let r: Vec<Repr> =
            v.iter().map(|&x| if x.is_finite() { Repr::Number(x) } else { Repr::Text(x.to_string()) }).collect();
        r.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Number(x) => Ok(x),
                Repr::Text(t) => t.parse().map_err(|_| serde::de::Error::custom(format!("not an exponent: {t}"))),
            })
            .collect()
    }
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            every: 100,
            morawetz_r: Vec::new(),
            cutoff_r: vec![5.0],
            norm_exponents: Vec::new(),
            evacuation_radius: 5.0,
            evacuation_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    /// Used when `--out` is not given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Steps between snapshots; 0 writes the initial and final states only.
    pub snapshot_every: usize,
    pub series: String,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: None, snapshot_every: 0, series: "series.csv".into() }
    }
}

/// Amplitude × exponent grid. The exponent replaces q (local) or p
/// (Choquard); an empty list keeps the one in [problem].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub exponents: Vec<f64>,
}

impl Config {
    /// Reads a TOML config, or the `config` entry of a JSON run manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            let cfg = v.get("config").ok_or_else(|| CliError::Config("manifest has no config entry".into()))?;
            serde_json::from_value(cfg.clone()).map_err(|e| CliError::Config(e.to_string()))
        } else {
            Self::parse(&text)
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The family-specific parameters must be present; the mathematical
    /// hypotheses are checked separately.
    pub fn check_shape(&self) -> Result<()> {
        let p = &self.problem;
        let missing = match p.family {
            Family::LocalPower => p.q.is_none().then_some("problem.q"),
            Family::Choquard if p.p.is_none() => Some("problem.p"),
            Family::Choquard => p.alpha.is_none().then_some("problem.alpha"),
        };
        if let Some(m) = missing {
            return Err(CliError::Config(format!("{m} is required for this family")));
        }
        if self.diagnostics.every == 0 {
            return Err(CliError::Config("diagnostics.every must be positive".into()));
        }
        if !(self.diagnostics.evacuation_fraction > 0.0) {
            return Err(CliError::Config("diagnostics.evacuation_fraction must be positive".into()));
        }
        if let Initial::Random { terms: 0, .. } = self.run.initial {
            return Err(CliError::Config("random initial data needs terms ≥ 1".into()));
        }
        if let Initial::Gaussian { width, .. } = self.run.initial {
            if !(width > 0.0) {
                return Err(CliError::Config("gaussian width must be positive".into()));
            }
        }
        Ok(())
    }

    /// Evolution settings for the core scheme.
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            dt: self.run.dt,
            t_end: self.run.t_end,
            snapshot_every: self.output.snapshot_every,
            diagnostics_every: self.diagnostics.every,
            blowup_kinetic_factor: self.run.blowup_kinetic_factor,
            sup_norm_limit: self.run.sup_norm_limit,
            morawetz_r: self.diagnostics.morawetz_r.clone(),
            cutoff_r: self.diagnostics.cutoff_r.clone(),
            norm_exponents: self.diagnostics.norm_exponents.clone(),
            absorber: self.run.absorber,
            linear_only: self.run.linear_only,
        }
    }

    /// A copy with the sweep exponent substituted into the spec.
    pub fn with_exponent(&self, e: f64) -> Self {
        let mut c = self.clone();
        match c.problem.family {
            Family::LocalPower => c.problem.q = Some(e),
            Family::Choquard => c.problem.p = Some(e),
        }
        c
    }
}
