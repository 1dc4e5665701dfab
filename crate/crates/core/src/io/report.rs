//! JSON result report.

use serde::{Deserialize, Serialize};

use crate::engine::{SolveResult, Stats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub omega1: u64,
    pub omega2: u64,
}

/// `answer` is `"yes"` or `"no"`. Fields after `stats` are additions
/// that readers may ignore.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub answer: String,
    pub min_cost: Option<u64>,
    pub engine: String,
    pub reps: u32,
    pub seed: u64,
    pub witness: Option<WitnessReport>,
    pub stats: Stats,
    /// False when a "no" may be a false negative.
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Input files, for reproduction.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
}

impl Report {
    pub fn new(result: &SolveResult) -> Self {
        Report {
            answer: if result.answer { "yes" } else { "no" }.to_string(),
            min_cost: result.min_cost,
            engine: result.engine.name().to_string(),
            reps: result.reps,
            seed: result.seed,
            witness: result.witness.map(|w| WitnessReport { omega1: w.omega1, omega2: w.omega2 }),
            stats: result.stats,
            exact: result.exact,
            note: result.note.clone(),
            warnings: result.warnings.clone(),
            files: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}
