//! Run settings: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Canonical,
    #[default]
    Inclusive,
    Inverse,
}

/// Every setting a command can take. All optional so that a file and the
/// flags can each supply a subset.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub order: Option<usize>,
    pub t0: Option<f64>,
    pub x0: Option<Vec<f64>>,
    pub to: Option<f64>,
    pub theta: Option<f64>,
    pub max_steps: Option<usize>,
    pub window: Option<Vec<f64>>,
    pub step: Option<f64>,
    pub mode: Option<Mode>,
    pub identity_first: Option<bool>,
    pub components: Option<Vec<usize>>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `flags` replace those of `self`.
    pub fn overlay(self, flags: RunConfig) -> RunConfig {
        RunConfig {
            input: flags.input.or(self.input),
            order: flags.order.or(self.order),
            t0: flags.t0.or(self.t0),
            x0: flags.x0.or(self.x0),
            to: flags.to.or(self.to),
            theta: flags.theta.or(self.theta),
            max_steps: flags.max_steps.or(self.max_steps),
            window: flags.window.or(self.window),
            step: flags.step.or(self.step),
            mode: flags.mode.or(self.mode),
            identity_first: flags.identity_first.or(self.identity_first),
            components: flags.components.or(self.components),
            format: flags.format.or(self.format),
            output: flags.output.or(self.output),
        }
    }

    pub fn input(&self) -> Result<&Path, CliError> {
        self.input.as_deref().ok_or_else(|| CliError::input("no input file given"))
    }

    pub fn x0(&self) -> Result<&[f64], CliError> {
        self.x0.as_deref().ok_or_else(|| CliError::input("--x0 is required"))
    }

    pub fn order(&self, default: usize) -> usize {
        self.order.unwrap_or(default)
    }

    pub fn t0(&self) -> f64 {
        self.t0.unwrap_or(0.0)
    }

    pub fn theta(&self) -> Result<f64, CliError> {
        let theta = self.theta.unwrap_or(0.5);
        if theta > 0.0 && theta <= 1.0 {
            Ok(theta)
        } else {
            Err(CliError::input(format!("theta must lie in (0, 1], got {theta}")))
        }
    }

    pub fn step(&self) -> Result<f64, CliError> {
        let h = self.step.unwrap_or(1e-4);
        if h > 0.0 && h.is_finite() {
            Ok(h)
        } else {
            Err(CliError::input(format!("step must be positive, got {h}")))
        }
    }

    pub fn window(&self) -> Result<(f64, f64), CliError> {
        match self.window.as_deref() {
            Some(&[a, b]) if a < b => Ok((a, b)),
            Some(w) => Err(CliError::input(format!("window needs two increasing bounds, got {w:?}"))),
            None => Err(CliError::input("--window is required")),
        }
    }

    /// 0-based component indices from the 1-based list given by the user.
    pub fn components(&self) -> Result<Vec<usize>, CliError> {
        self.components
            .iter()
            .flatten()
            .map(|&c| c.checked_sub(1).ok_or_else(|| CliError::input("components are numbered from 1")))
            .collect()
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}
