//! Tolerances and constants, loadable from TOML. Every field is optional in
//! the file; missing fields take the defaults below.
//!
//! ```toml
//! tol = 1e-9
//! ledger_constant = 1.0
//! td_exact_limit = 24
//! td_node_budget = 200000
//! rect_exact_limit = 20
//! als_iters = 2000
//! als_restarts = 8
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{ExtractOptions, DEFAULT_LEDGER_CONSTANT};
use crate::factor::DEFAULT_TOL;
use crate::gamma2::AlsOptions;
use crate::structure::{TdOptions, RECT_EXACT_LIMIT, TD_EXACT_LIMIT, TD_NODE_BUDGET};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tol: f64,
    pub ledger_constant: f64,
    pub td_exact_limit: usize,
    pub td_node_budget: usize,
    pub rect_exact_limit: usize,
    pub als_iters: usize,
    pub als_restarts: usize,
}

impl Default for Config {
    fn default() -> Self {
        let als = AlsOptions::default();
        Self {
            tol: DEFAULT_TOL,
            ledger_constant: DEFAULT_LEDGER_CONSTANT,
            td_exact_limit: TD_EXACT_LIMIT,
            td_node_budget: TD_NODE_BUDGET,
            rect_exact_limit: RECT_EXACT_LIMIT,
            als_iters: als.iters,
            als_restarts: als.restarts,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("config: tol must be finite and >= 0, got {}", self.tol)));
        }
        if !(self.ledger_constant > 0.0 && self.ledger_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "config: ledger_constant must be positive, got {}",
                self.ledger_constant
            )));
        }
        if self.als_restarts == 0 {
            return Err(Error::InvalidParameter("config: als_restarts must be at least 1".into()));
        }
        Ok(())
    }

    pub fn td_options(&self) -> TdOptions {
        TdOptions { exact_limit: self.td_exact_limit, node_budget: self.td_node_budget }
    }

    pub fn extract_options(&self) -> ExtractOptions {
        ExtractOptions {
            ledger_constant: self.ledger_constant,
            rect_exact_limit: self.rect_exact_limit,
            td: self.td_options(),
        }
    }

    pub fn als_options(&self, lambda: f64, seed: u64) -> AlsOptions {
        AlsOptions { lambda, seed, iters: self.als_iters, restarts: self.als_restarts, tol: self.tol }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn partial_override() {
        let cfg = Config::from_toml("ledger_constant = 4.0\ntd_node_budget = 10").unwrap();
        assert_eq!(cfg.ledger_constant, 4.0);
        assert_eq!(cfg.td_node_budget, 10);
        assert_eq!(cfg.tol, DEFAULT_TOL);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::from_toml("tolerance = 1").is_err());
        assert!(Config::from_toml("tol = -1.0").is_err());
        assert!(Config::from_toml("ledger_constant = 0.0").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = Config { rect_exact_limit: 12, ..Config::default() };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(Config::from_toml(&text).unwrap(), cfg);
    }
}
