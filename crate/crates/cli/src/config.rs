//! Experiment configuration: JSON file plus command-line overrides.

use serde::Deserialize;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Toeplitz,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Is,
    Mc,
    Imhof,
    Spa,
    Bounds,
}

impl MethodName {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Is => "is",
            MethodName::Mc => "mc",
            MethodName::Imhof => "imhof",
            MethodName::Spa => "spa",
            MethodName::Bounds => "bounds",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "is" => Ok(MethodName::Is),
            "mc" => Ok(MethodName::Mc),
            "imhof" => Ok(MethodName::Imhof),
            "spa" => Ok(MethodName::Spa),
            "bounds" => Ok(MethodName::Bounds),
            other => Err(CliError::user(format!(
                "unknown method '{other}' (expected is, mc, imhof, spa or bounds)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub n_values: Vec<usize>,
    pub xi: f64,
    pub rho: f64,
    pub mu_value: f64,
    /// Thresholds in dB; converted as `gamma0 = 10^(dB/10)`.
    pub gamma_db: Vec<f64>,
    pub methods: Vec<MethodName>,
    pub samples_mc: u64,
    pub samples_is: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    /// Problem file, used when `family` is `file`.
    pub problem_path: Option<PathBuf>,
    /// Pilot sample count for IS run planning.
    pub pilot: u64,
    /// Timed repetitions per cell in `compare`.
    pub repetitions: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            family: Family::Toeplitz,
            n_values: vec![10, 20, 30],
            xi: 0.4,
            rho: 0.8,
            mu_value: 1.0,
            gamma_db: vec![-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0],
            methods: vec![MethodName::Is, MethodName::Mc],
            samples_mc: 1_000_000,
            samples_is: 10_000,
            epsilon: 0.05,
            seed: 1,
            output_path: None,
            problem_path: None,
            pilot: 10_000,
            repetitions: 10,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::user(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::user(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.gamma_db.is_empty() {
            return Err(CliError::user("gamma_db must not be empty"));
        }
        if self.methods.is_empty() {
            return Err(CliError::user("methods must not be empty"));
        }
        if self.n_values.is_empty() && self.family == Family::Toeplitz {
            return Err(CliError::user("n_values must not be empty"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::user(format!(
                "epsilon must be in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.samples_is < 2 {
            return Err(CliError::user("samples_is must be at least 2"));
        }
        if self.samples_mc < 1 {
            return Err(CliError::user("samples_mc must be at least 1"));
        }
        if self.pilot < 1_000 {
            return Err(CliError::user("pilot must be at least 1000"));
        }
        if self.repetitions < 1 {
            return Err(CliError::user("repetitions must be at least 1"));
        }
        if self.family == Family::File && self.problem_path.is_none() {
            return Err(CliError::user("family \"file\" requires problem_path"));
        }
        Ok(())
    }
}
