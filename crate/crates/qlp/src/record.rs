//! Answer records as printed by `qlp solve`.

use std::collections::BTreeMap;
use std::fmt;

use qlp_core::{ComputedAnswer, SearchStatus};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Answer,
    Exhausted,
    Truncated,
}

impl From<SearchStatus> for Status {
    fn from(s: SearchStatus) -> Self {
        match s {
            SearchStatus::Exhausted => Status::Exhausted,
            // a running search is only reported once it stopped early
            SearchStatus::Truncated | SearchStatus::Running => Status::Truncated,
        }
    }
}

/// One line of `solve` output: a computed answer, or the final status of
/// the search with empty bindings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub status: Status,
    pub bindings: BTreeMap<String, String>,
    pub qualifications: BTreeMap<String, String>,
    pub steps: u64,
}

impl OutputRecord {
    pub fn answer(a: &ComputedAnswer) -> Self {
        OutputRecord {
            status: Status::Answer,
            bindings: a.sigma.iter().map(|(x, t)| (x.to_string(), t.to_string())).collect(),
            qualifications: a.mu.iter().map(|(w, v)| (w.to_string(), v.to_string())).collect(),
            steps: a.steps,
        }
    }

    pub fn end(status: SearchStatus, steps: u64) -> Self {
        OutputRecord {
            status: status.into(),
            bindings: BTreeMap::new(),
            qualifications: BTreeMap::new(),
            steps,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

fn join(map: &BTreeMap<String, String>) -> String {
    map.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
}

/// Answers print as `{X = adam} | {W1 = 0.64, W2 = 0.9}`, which
/// `qlp check` reads back; the end record prints as a `%` comment.
impl fmt::Display for OutputRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            Status::Answer => write!(f, "{{{}}} | {{{}}}", join(&self.bindings), join(&self.qualifications)),
            Status::Exhausted => write!(f, "% exhausted after {} steps", self.steps),
            Status::Truncated => write!(f, "% truncated after {} steps", self.steps),
        }
    }
}
