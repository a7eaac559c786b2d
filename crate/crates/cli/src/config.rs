//! Run configuration: a TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use colpat::index::{ScanOptions, DEFAULT_TAU};
use colpat::pattern::{Hierarchy, DEFAULT_CAP};
use colpat::rule::{TestKind, DEFAULT_ALPHA};
use colpat::solver::{Objective, SolverParams};
use serde::Deserialize;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "COLPAT_CONFIG";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tau: usize,
    pub cap: u64,
    pub r: f64,
    pub m: u64,
    pub theta: f64,
    pub alpha: f64,
    pub test: TestKind,
    pub objective: Objective,
    pub hierarchy: Option<PathBuf>,
    pub workers: usize,
    pub value_cap: Option<usize>,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        let solver = SolverParams::default();
        Config {
            tau: DEFAULT_TAU,
            cap: DEFAULT_CAP,
            r: solver.r,
            m: solver.m,
            theta: solver.theta,
            alpha: DEFAULT_ALPHA,
            test: TestKind::FisherExact,
            objective: solver.objective,
            hierarchy: None,
            workers: 0,
            value_cap: None,
            seed: 0,
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// TOML config file (default: $COLPAT_CONFIG)
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Generalization hierarchy TOML file
    #[arg(long, global = true)]
    pub hierarchy: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Values with this many tokens or more are not indexed
    #[arg(long, global = true)]
    pub tau: Option<usize>,
    /// Cap on patterns enumerated per value
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Maximum estimated false-positive rate
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Minimum corpus coverage
    #[arg(long, global = true)]
    pub m: Option<u64>,
    /// Tolerated non-conforming fraction (0 = strict)
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Significance level for drift tests
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// fisher-exact or chi-squared-yates
    #[arg(long, global = true)]
    pub test: Option<TestKind>,
    /// fpr-min or coverage-min
    #[arg(long, global = true)]
    pub objective: Option<Objective>,
    /// Keep only the first N values of each benchmark column
    #[arg(long, global = true)]
    pub value_cap: Option<usize>,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading config {}: {e}", path.display()))?;
        Self::from_toml_str(&text)
    }

    /// The config file (if any) with the flags applied on top, validated.
    pub fn resolve(flags: &ConfigFlags) -> Result<Self, String> {
        let mut c = match &flags.config {
            Some(path) => Self::from_path(path)?,
            None => Config::default(),
        };
        macro_rules! overlay {
            ($($f:ident),*) => { $( if let Some(v) = flags.$f.clone() { c.$f = v; } )* };
        }
        overlay!(seed, workers, tau, cap, r, m, theta, alpha, test, objective);
        if flags.hierarchy.is_some() {
            c.hierarchy = flags.hierarchy.clone();
        }
        if flags.value_cap.is_some() {
            c.value_cap = flags.value_cap;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.solver().validate().map_err(|e| e.to_string())?;
        if self.tau < 1 || self.tau > u32::MAX as usize {
            return Err("tau must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err("alpha must be in (0, 1)".into());
        }
        if self.value_cap == Some(0) {
            return Err("value_cap must be positive".into());
        }
        Ok(())
    }

    pub fn solver(&self) -> SolverParams {
        SolverParams { r: self.r, m: self.m, theta: self.theta, objective: self.objective, cap: self.cap }
    }

    pub fn scan(&self) -> ScanOptions {
        ScanOptions { tau: self.tau, cap: self.cap, ..ScanOptions::default() }
    }

    pub fn load_hierarchy(&self) -> Result<Hierarchy, String> {
        match &self.hierarchy {
            Some(path) => Hierarchy::from_path(path).map_err(|e| e.to_string()),
            None => Ok(Hierarchy::default()),
        }
    }
}
