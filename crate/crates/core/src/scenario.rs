//! Problem instances and their text file format.
//!
//! A scenario file is a TOML document:
//!
//! ```toml
//! tolerance = 1e-9          # optional
//! belief_grid_step = 0.001  # optional
//! k_max = 512.0             # optional
//! wealth = [0.0, 1.5]       # or: wealth = { lo = -10.0, hi = 10.0, step = 0.05 }
//!
//! [r]
//! alpha = 2.0
//! beta = 2.0
//!
//! [r_hat]
//! alpha = 1.0
//! beta = 1.0
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamble::{Gamble, WealthSet};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BELIEF_GRID_STEP: f64 = 1e-3;
pub const DEFAULT_K_MAX: f64 = 512.0;

/// Numeric knobs shared by the search and verification routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tolerance: f64,
    pub belief_grid_step: f64,
    pub k_max: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tolerance: DEFAULT_TOLERANCE,
            belief_grid_step: DEFAULT_BELIEF_GRID_STEP,
            k_max: DEFAULT_K_MAX,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "tolerance {} must be >= 0",
                self.tolerance
            )));
        }
        if !(self.belief_grid_step > 0.0 && self.belief_grid_step <= 0.5) {
            return Err(Error::InvalidScenario(format!(
                "belief_grid_step {} must lie in (0, 0.5]",
                self.belief_grid_step
            )));
        }
        if !(self.k_max >= 1.0) || !self.k_max.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "k_max {} must be >= 1",
                self.k_max
            )));
        }
        Ok(())
    }

    /// Gap required before a preference counts as strict.
    pub fn strict_gap(&self) -> f64 {
        10.0 * self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_belief_grid_step")]
    pub belief_grid_step: f64,
    #[serde(default = "default_k_max")]
    pub k_max: f64,
    pub wealth: WealthSet,
    pub r: Gamble,
    pub r_hat: Gamble,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_belief_grid_step() -> f64 {
    DEFAULT_BELIEF_GRID_STEP
}

fn default_k_max() -> f64 {
    DEFAULT_K_MAX
}

impl Scenario {
    pub fn new(r: Gamble, r_hat: Gamble, wealth: WealthSet) -> Result<Self> {
        let s = Scenario {
            tolerance: DEFAULT_TOLERANCE,
            belief_grid_step: DEFAULT_BELIEF_GRID_STEP,
            k_max: DEFAULT_K_MAX,
            wealth,
            r,
            r_hat,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_settings(mut self, settings: Settings) -> Result<Self> {
        self.tolerance = settings.tolerance;
        self.belief_grid_step = settings.belief_grid_step;
        self.k_max = settings.k_max;
        self.validate()?;
        Ok(self)
    }

    pub fn settings(&self) -> Settings {
        Settings {
            tolerance: self.tolerance,
            belief_grid_step: self.belief_grid_step,
            k_max: self.k_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.settings().validate()?;
        self.wealth.validate()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario =
            toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}
