//! Run configuration: a JSON file, overridden field by field by flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sumprod::Scalar;

use crate::error::CliError;

/// Everything a run can be tuned with. Every field is optional in the file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    /// Worker threads; `None` leaves the rayon default.
    pub threads: Option<usize>,
    /// Cap on the number of line constraints in `sigma_sup`.
    pub sigma_budget: Option<u64>,
    pub gamma: Option<Scalar>,
    /// Absolute constant for level-set violation counting.
    pub c_abs: Option<Scalar>,
    pub decimal: Option<bool>,
    pub seed: Option<u64>,
    pub bipartitions: Option<usize>,
    pub natural_log_audit: Option<bool>,
}

pub const DEFAULT_SIGMA_BUDGET: u64 = 200_000;

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `flags` win.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            out: flags.out.or(self.out),
            threads: flags.threads.or(self.threads),
            sigma_budget: flags.sigma_budget.or(self.sigma_budget),
            gamma: flags.gamma.or(self.gamma),
            c_abs: flags.c_abs.or(self.c_abs),
            decimal: flags.decimal.or(self.decimal),
            seed: flags.seed.or(self.seed),
            bipartitions: flags.bipartitions.or(self.bipartitions),
            natural_log_audit: flags.natural_log_audit.or(self.natural_log_audit),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == Some(0) {
            return Err(CliError::Input("threads must be positive".into()));
        }
        if self.sigma_budget == Some(0) {
            return Err(CliError::Input("sigma_budget must be positive".into()));
        }
        if self.bipartitions == Some(0) {
            return Err(CliError::Input("bipartitions must be positive".into()));
        }
        if let Some(g) = &self.gamma {
            if !g.is_positive() {
                return Err(CliError::Input(format!("gamma must be positive, got {g}")));
            }
        }
        if let Some(c) = &self.c_abs {
            if !c.is_positive() {
                return Err(CliError::Input(format!("c_abs must be positive, got {c}")));
            }
        }
        if let Some(dir) = &self.out {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        Ok(())
    }

    pub fn sigma_budget(&self) -> u64 {
        self.sigma_budget.unwrap_or(DEFAULT_SIGMA_BUDGET)
    }

    pub fn decimal(&self) -> bool {
        self.decimal.unwrap_or(false)
    }

    pub fn suite(&self) -> sumprod::tracer::SuiteConfig {
        let mut s = sumprod::tracer::SuiteConfig::default();
        if let Some(b) = self.bipartitions {
            s.bipartitions = b;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(audit) = self.natural_log_audit {
            s.natural_log_audit = audit;
        }
        s
    }
}
