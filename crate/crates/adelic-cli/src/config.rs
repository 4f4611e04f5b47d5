//! Run configuration: a TOML file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use adelic_core::slopes::SearchOptions;
use adelic_core::tolerances::{ELLIPSOID_TOL, ENUM_NODE_BUDGET};

/// Output encoding of reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// One JSON object per line.
    Json,
    /// Comma-separated rows with a header.
    Csv,
    /// Human-readable lines.
    Text,
}

/// Settings read from `--config`; every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Check tolerance override.
    pub tol: Option<f64>,
    /// Enumeration radius factor of the polygon search.
    pub radius_factor: Option<f64>,
    /// Node budget of each lattice enumeration.
    pub enum_budget: Option<u64>,
    /// Duality-gap tolerance of the ellipsoid solvers.
    pub ellipsoid_tol: Option<f64>,
    /// Seed of randomized commands.
    pub seed: Option<u64>,
    /// Output format.
    pub format: Option<Format>,
    /// Output path.
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    /// Reads and validates a configuration file.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: ConfigFile =
            toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("tol", self.tol),
            ("radius_factor", self.radius_factor),
            ("ellipsoid_tol", self.ellipsoid_tol),
        ] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(format!("{name} must be positive, found {x}"));
                }
            }
        }
        if self.enum_budget == Some(0) {
            return Err("enum_budget must be positive".into());
        }
        Ok(())
    }
}

/// Effective settings of one invocation.
#[derive(Debug, Clone)]
pub struct Config {
    /// Check tolerance override; `None` keeps each check's own tolerance.
    pub tol: Option<f64>,
    /// Polygon search options.
    pub search: SearchOptions,
    /// Duality-gap tolerance of the ellipsoid solvers.
    pub ellipsoid_tol: f64,
    /// Seed of randomized commands.
    pub seed: u64,
    /// Output format.
    pub format: Format,
    /// Output path; standard output when absent.
    pub out: Option<PathBuf>,
}

/// Flag values that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub radius_factor: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Config {
    /// Merges flags over the file over the defaults.
    pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Self, String> {
        let merged = ConfigFile {
            tol: flags.tol.or(file.tol),
            radius_factor: flags.radius_factor.or(file.radius_factor),
            enum_budget: file.enum_budget,
            ellipsoid_tol: file.ellipsoid_tol,
            seed: flags.seed.or(file.seed),
            format: flags.format.or(file.format),
            out: flags.out.or(file.out),
        };
        merged.validate()?;
        Ok(Config {
            tol: merged.tol,
            search: SearchOptions {
                radius_factor: merged.radius_factor.unwrap_or(1.0),
                budget: merged.enum_budget.unwrap_or(ENUM_NODE_BUDGET),
            },
            ellipsoid_tol: merged.ellipsoid_tol.unwrap_or(ELLIPSOID_TOL),
            seed: merged.seed.unwrap_or(0),
            format: merged.format.unwrap_or(Format::Json),
            out: merged.out,
        })
    }
}
