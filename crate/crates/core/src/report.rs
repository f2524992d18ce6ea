//! Shared result types: metric reports with witnesses, and lower/upper
//! brackets for quantities no exact algorithm is known for.

use serde::{Deserialize, Serialize};

/// Result of a metric computation. `witness`, when present, re-evaluates
/// to exactly `value`; `normalized_value` applies the size normalization
/// appropriate to the metric (value/n² for edit and cut, value/n for the
/// local metric, unchanged otherwise).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub value: f64,
    pub normalized_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MetricReport {
    pub fn exact_with_witness(value: f64, normalized_value: f64, witness: Vec<usize>) -> Self {
        MetricReport {
            value,
            normalized_value,
            witness: Some(witness),
            exact: true,
            notes: Vec::new(),
        }
    }

    pub fn plain(value: f64, normalized_value: f64, exact: bool) -> Self {
        MetricReport {
            value,
            normalized_value,
            witness: None,
            exact,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Two-sided enclosure `[lower, upper]` with a tag recording how each
/// side was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: String,
    pub upper_method: String,
}

impl Bracket {
    /// lower ≤ upper must hold up to the stated tolerance.
    pub fn is_consistent(&self, tol: f64) -> bool {
        self.lower <= self.upper + tol
    }
}
