//! Run configuration shared by the CLI commands; carried verbatim in every
//! report so residual claims are reproducible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Residual tolerance for classification and identically-zero verdicts.
    pub tol: f64,
    pub grid: GridSpec,
    /// Step for finite-difference surface derivatives.
    pub fd_step: f64,
    pub output_format: OutputFormat,
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            grid: GridSpec::default(),
            fd_step: 1e-3,
            output_format: OutputFormat::Json,
            parallelism: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return Err(Error::BadConfig(format!(
                "tol must lie in (0, 1e-2), got {}",
                self.tol
            )));
        }
        if self.parallelism < 1 {
            return Err(Error::BadConfig("parallelism must be at least 1".into()));
        }
        if self.fd_step <= 0.0 || !self.fd_step.is_finite() {
            return Err(Error::BadConfig("fd_step must be positive".into()));
        }
        self.grid.validate()
    }
}
