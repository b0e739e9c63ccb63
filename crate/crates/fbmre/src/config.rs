//! Experiment configuration: one JSON object.
//!
//! ```json
//! {
//!   "name": "demo",
//!   "process": { "kind": "both", "hurst": { "kind": "two_point", "h1": 0.25, "h2": 0.75, "p": 0.5 } },
//!   "grid": { "n": 1024, "dt": 0.01 },
//!   "ensemble_size": 2000,
//!   "master_seed": 1,
//!   "lags": [1, 2, 4, 0.08],
//!   "times": [0.5, 1.0],
//!   "tau": 0.1,
//!   "statistics": ["tamsd", "cov", "analytic-overlay"]
//! }
//! ```
//!
//! Integer lags count grid steps and real lags are lag times. Real lags must
//! sit on the grid when an estimator reads them.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use fbmre_core::{HurstModel, ProcessKind, ProcessSpec, Regime, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::ensemble::Method;

/// Relative slack when matching a time to a grid point.
const GRID_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn field(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindChoice {
    Fbm,
    RlFbm,
    Both,
}

impl KindChoice {
    pub fn kinds(self) -> &'static [ProcessKind] {
        match self {
            Self::Fbm => &[ProcessKind::Fbm],
            Self::RlFbm => &[ProcessKind::RlFbm],
            Self::Both => &[ProcessKind::Fbm, ProcessKind::RlFbm],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    pub kind: KindChoice,
    pub hurst: HurstModel,
}

impl ProcessConfig {
    pub fn specs(&self) -> Vec<ProcessSpec> {
        self.kind
            .kinds()
            .iter()
            .map(|&k| ProcessSpec::new(k, self.hurst.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lag {
    Steps(u64),
    Time(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statistic {
    #[serde(rename = "emsd")]
    Emsd,
    #[serde(rename = "tamsd")]
    Tamsd,
    #[serde(rename = "cov")]
    Cov,
    #[serde(rename = "inc_sm")]
    IncSm,
    #[serde(rename = "eb")]
    Eb,
    #[serde(rename = "analytic-overlay")]
    AnalyticOverlay,
    #[serde(rename = "asymptote-overlay")]
    AsymptoteOverlay,
}

impl Statistic {
    pub fn is_overlay(self) -> bool {
        matches!(self, Self::AnalyticOverlay | Self::AsymptoteOverlay)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Emsd => "emsd",
            Self::Tamsd => "tamsd",
            Self::Cov => "cov",
            Self::IncSm => "inc_sm",
            Self::Eb => "eb",
            Self::AnalyticOverlay => "analytic-overlay",
            Self::AsymptoteOverlay => "asymptote-overlay",
        }
    }
}

fn default_name() -> String {
    "experiment".to_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub process: ProcessConfig,
    pub grid: TimeGrid,
    #[serde(default)]
    pub ensemble_size: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub lags: Vec<Lag>,
    /// Observation times for `emsd`, `cov` and `inc_sm`.
    #[serde(default)]
    pub times: Vec<f64>,
    pub statistics: BTreeSet<Statistic>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Observation horizon of the TAMSD; defaults to n·dt.
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Fixed lag of `cov` and `inc_sm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Regime of the asymptote overlays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(default)]
    pub method: Method,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or_else(|| self.grid.horizon())
    }

    pub fn simulates(&self) -> bool {
        self.ensemble_size > 0 && self.statistics.iter().any(|s| !s.is_overlay())
    }

    /// Lag in steps when the lag sits on the grid.
    pub fn lag_steps(&self, lag: Lag) -> Option<usize> {
        match lag {
            Lag::Steps(k) => Some(k as usize),
            Lag::Time(t) => on_grid(t, self.grid.dt),
        }
    }

    pub fn lag_time(&self, lag: Lag) -> f64 {
        match lag {
            Lag::Steps(k) => self.grid.t(k as usize),
            Lag::Time(t) => t,
        }
    }

    /// Grid step count of the fixed lag τ.
    pub fn tau_steps(&self) -> Option<usize> {
        self.tau.and_then(|t| on_grid(t, self.grid.dt))
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        if t == 0.0 {
            return Some(0);
        }
        on_grid(t, self.grid.dt)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        TimeGrid::new(self.grid.n, self.grid.dt).map_err(|e| field("grid", e.to_string()))?;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(field("name", "must be a nonempty plain file stem"));
        }
        if self.statistics.is_empty() {
            return Err(field("statistics", "at least one statistic is required"));
        }
        if self.statistics.iter().all(|s| s.is_overlay()) {
            return Err(field(
                "statistics",
                "overlays need at least one of emsd, tamsd, cov, inc_sm, eb",
            ));
        }
        let estimators = self.simulates();
        if self.statistics.contains(&Statistic::Eb) && self.ensemble_size < 2 {
            return Err(field("ensemble_size", "eb needs at least two trajectories"));
        }
        let n = self.grid.n;
        let horizon = self.horizon();
        if let Some(t) = self.horizon {
            if !(t > 0.0) || !t.is_finite() {
                return Err(field("T", "must be finite and positive"));
            }
            if rel_gap(t, self.grid.horizon()) > GRID_MATCH_TOL {
                return Err(field(
                    "T",
                    format!("{t} differs from n*dt = {}", self.grid.horizon()),
                ));
            }
        }
        for (k, s) in [
            (Statistic::Emsd, &self.times),
            (Statistic::Cov, &self.times),
            (Statistic::IncSm, &self.times),
        ] {
            if self.statistics.contains(&k) && s.is_empty() {
                return Err(field("times", format!("{} needs observation times", k.label())));
            }
        }
        let wants_tau = self.statistics.contains(&Statistic::Cov) || self.statistics.contains(&Statistic::IncSm);
        if wants_tau {
            match self.tau {
                Some(t) if t > 0.0 && t.is_finite() => {}
                _ => return Err(field("tau", "cov and inc_sm need a finite positive tau")),
            }
        }
        let lag_stats = self.statistics.contains(&Statistic::Tamsd) || self.statistics.contains(&Statistic::Eb);
        if lag_stats && self.lags.is_empty() {
            return Err(field("lags", "tamsd and eb need at least one lag"));
        }
        let mut prev = 0.0;
        for &lag in &self.lags {
            let t = self.lag_time(lag);
            if !(t > prev) || !(t < horizon) {
                return Err(field(
                    "lags",
                    format!("lag times must increase strictly inside (0, T); got {t}"),
                ));
            }
            prev = t;
            if estimators && lag_stats {
                match self.lag_steps(lag) {
                    Some(k) if k >= 1 && k < n => {}
                    _ => return Err(field("lags", format!("lag {t} is not a grid lag in [dt, T)"))),
                }
            }
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &self.times {
            if !(t > prev) || !(t > 0.0) || !t.is_finite() {
                return Err(field("times", "times must be positive, finite and strictly increasing"));
            }
            prev = t;
        }
        if estimators && !self.times.is_empty() && !self.times_unused_by_estimators() {
            let k = if wants_tau { self.tau_steps() } else { Some(0) };
            let Some(k) = k else {
                return Err(field("tau", "tau must be a whole number of grid steps"));
            };
            for &t in &self.times {
                match self.time_index(t) {
                    Some(i) if i + k <= n => {}
                    _ => {
                        return Err(field(
                            "times",
                            format!("time {t} (plus tau) is not a grid point within [0, T]"),
                        ))
                    }
                }
            }
        }
        if self.statistics.contains(&Statistic::AsymptoteOverlay) {
            if self.regime.is_none() {
                return Err(field("regime", "asymptote-overlay needs short_ratio or long_ratio"));
            }
            if !matches!(self.process.hurst, HurstModel::TwoPoint(_)) {
                return Err(field(
                    "process.hurst",
                    "asymptote-overlay is defined for a two_point law only",
                ));
            }
        }
        if self.method == Method::Circulant && self.process.kind != KindChoice::Fbm && estimators {
            return Err(field("method", "circulant embedding samples FBM only"));
        }
        Ok(())
    }

    fn times_unused_by_estimators(&self) -> bool {
        ![Statistic::Emsd, Statistic::Cov, Statistic::IncSm]
            .iter()
            .any(|s| self.statistics.contains(s))
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn on_grid(t: f64, dt: f64) -> Option<usize> {
    if !(t > 0.0) || !t.is_finite() {
        return None;
    }
    let k = (t / dt).round();
    (k >= 1.0 && rel_gap(k * dt, t) <= GRID_MATCH_TOL).then_some(k as usize)
}
