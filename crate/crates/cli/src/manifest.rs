use std::path::Path;

use serde::{Deserialize, Serialize};

use bnls_core::diagnostics::{EvacuationScan, SpacetimeFit};
use bnls_core::evolution::Outcome;
use bnls_core::functionals::{FunctionalReport, Thresholds};
use bnls_core::problem::DerivedExponents;
use bnls_core::ProblemSpec;

use crate::config::Config;
use crate::error::{CliError, Result};

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanParams {
    pub dim: usize,
    pub k: usize,
    pub r_max: f64,
}

/// File names relative to the directory holding the manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Inventory {
    pub series: Option<String>,
    pub snapshots: Vec<String>,
    pub ground_state: Option<String>,
    pub certification: Option<String>,
}

impl Inventory {
    fn paths(&self) -> impl Iterator<Item = &String> {
        self.series.iter().chain(&self.snapshots).chain(&self.ground_state).chain(&self.certification)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Completed,
    BlowupSuspected { t: f64, trigger: String },
    NonFinite { t: f64 },
    Certified,
    CertificationFailed { failures: Vec<String> },
    Failed { exit_code: i32, message: String },
}

impl From<&Outcome> for Status {
    fn from(o: &Outcome) -> Self {
        match o {
            Outcome::Completed => Self::Completed,
            Outcome::BlowupSuspected { t, trigger } => Self::BlowupSuspected { t: *t, trigger: trigger.clone() },
            Outcome::NonFinite { t } => Self::NonFinite { t: *t },
        }
    }
}

impl Status {
    pub fn failed(e: &CliError) -> Self {
        Self::Failed { exit_code: e.exit_code(), message: e.to_string() }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Completed => "Completed",
            Self::BlowupSuspected { .. } => "BlowupSuspected",
            Self::NonFinite { .. } => "NonFinite",
            Self::Certified => "Certified",
            Self::CertificationFailed { .. } => "CertificationFailed",
            Self::Failed { .. } => "Failed",
        }
    }
}

/// Condensed evacuation scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evacuation {
    pub radius: f64,
    pub eps: f64,
    pub initial: f64,
    pub last: f64,
    pub last_ratio: f64,
    pub minimum: f64,
    pub first_below: Option<f64>,
}

impl Evacuation {
    pub fn from_scan(scan: &EvacuationScan, initial: f64, last: f64) -> Self {
        Self {
            radius: scan.radius,
            eps: scan.eps,
            initial,
            last,
            last_ratio: last / initial,
            minimum: scan.running_min.last().map(|p| p.1).unwrap_or(f64::NAN),
            first_below: scan.times.first().copied(),
        }
    }
}

/// Everything needed to audit and re-run one pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub code_version: String,
    pub spec: ProblemSpec,
    pub exponents: Option<DerivedExponents>,
    pub plan: PlanParams,
    pub config: Config,
    pub wall_time_s: f64,
    #[serde(flatten)]
    pub status: Status,
    pub files: Inventory,
    #[serde(default)]
    pub thresholds: Option<Thresholds>,
    #[serde(default)]
    pub initial: Option<FunctionalReport>,
    #[serde(default)]
    pub evacuation: Option<Evacuation>,
    #[serde(default)]
    pub spacetime_fit: Option<SpacetimeFit>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &Config) -> Self {
        Self {
            command: command.to_string(),
            code_version: CODE_VERSION.to_string(),
            spec: config.problem,
            exponents: bnls_core::problem::derive_exponents(&config.problem).ok(),
            plan: PlanParams { dim: config.problem.dim, k: config.grid.k, r_max: config.grid.r_max },
            config: config.clone(),
            wall_time_s: 0.0,
            status: Status::Completed,
            files: Inventory::default(),
            thresholds: None,
            initial: None,
            evacuation: None,
            spacetime_fit: None,
            notes: Vec::new(),
        }
    }

    /// Writes `manifest.json` into `dir`, refusing dangling file references.
    pub fn write(&self, dir: &Path) -> Result<()> {
        if let Some(missing) = self.files.paths().find(|p| !dir.join(p).is_file()) {
            return Err(CliError::Io {
                context: "writing manifest".into(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, format!("{missing} does not exist")),
            });
        }
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(CliError::io(format!("writing {}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}
