//! Named additive terms shared by determinant and gluing reports.

use crate::sum::LogValue;
use serde::{Deserialize, Serialize};

/// One additive contribution to a logarithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    /// The formula this term evaluates, as plain text.
    pub source: String,
    pub value: f64,
    /// Imaginary part in units of `π`.
    pub phase: i64,
}

impl Term {
    pub fn new(name: impl Into<String>, source: impl Into<String>, v: LogValue) -> Self {
        Self {
            name: name.into(),
            source: source.into(),
            value: v.re,
            phase: v.phase,
        }
    }

    pub fn real(name: impl Into<String>, source: impl Into<String>, value: f64) -> Self {
        Self::new(name, source, LogValue::new(value, 0))
    }

    pub fn negated(&self) -> Self {
        Self {
            name: format!("-({})", self.name),
            source: format!("-({})", self.source),
            value: -self.value,
            phase: -self.phase,
        }
    }

    pub fn log_value(&self) -> LogValue {
        LogValue::new(self.value, self.phase)
    }
}

/// Plain left-to-right sum, so a serialized report re-sums to the same bits.
pub fn sum_terms(terms: &[Term]) -> LogValue {
    let mut re = 0.0;
    let mut phase = 0;
    for t in terms {
        re += t.value;
        phase += t.phase;
    }
    LogValue::new(re, phase)
}
