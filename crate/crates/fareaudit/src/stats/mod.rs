//! Self-contained statistical kernel: special functions, chi-square
//! independence tests, Mann–Whitney U, the effective-variance t-test, and
//! prediction-interval classification.
//!
//! Every operation here is a pure function of its inputs and is safe under
//! unrestricted parallelism.

mod contingency;
mod interval;
mod rank;
mod special;
mod ttest;

pub use contingency::{
    chi_square_test, chi_square_test_with, pairwise_chi_square, ContingencyTable, Correction,
    PairwiseOutcome,
};
pub use interval::{classify_intervals, prediction_interval, IntervalClassification};
pub use rank::{mann_whitney_u, mann_whitney_u_with};
pub use special::{
    ln_gamma, normal_cdf, normal_quantile, reg_beta_i, reg_gamma_p, reg_gamma_q, student_t_cdf,
};
pub use ttest::{paired_t_effective, EffectiveMode};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the statistical kernel.
#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{function}: domain error: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("degenerate table: {detail}")]
    DegenerateTable { detail: String },
    #[error("degenerate input: {detail}")]
    Degenerate { detail: String },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

/// Which test produced a [`TestResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    ChiSquare,
    MannWhitney,
    TEffective,
}

/// Alternative hypothesis direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

impl Alternative {
    pub fn as_str(&self) -> &'static str {
        match self {
            Alternative::TwoSided => "two_sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        }
    }
}

impl std::str::FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two_sided" | "two-sided" | "twosided" => Ok(Alternative::TwoSided),
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            other => Err(format!(
                "unknown alternative {other:?} (expected two_sided, greater or less)"
            )),
        }
    }
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestResult {
    pub method: TestMethod,
    pub statistic: f64,
    /// Degrees of freedom where the method has them.
    pub df: Option<f64>,
    pub p_value: f64,
    pub alternative: Alternative,
    /// Sample sizes that entered the test, in method-specific order.
    pub n: Vec<usize>,
    /// Method metadata and caveats accumulated while computing.
    pub notes: String,
}

impl TestResult {
    pub(crate) fn push_note(&mut self, note: &str) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note);
    }

    /// p-value with the reporting floor applied: values below 1e-12 print as
    /// "<1e-12" instead of a false zero.
    pub fn p_display(&self) -> String {
        format_p_value(self.p_value)
    }
}

/// Reporting floor for p-values.
pub fn format_p_value(p: f64) -> String {
    if p < 1e-12 {
        "<1e-12".to_string()
    } else {
        format!("{p}")
    }
}
