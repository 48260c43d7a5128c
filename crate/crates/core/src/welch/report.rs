use serde::Serialize;

use super::SolutionPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceSummary {
    pub p: u64,
    pub e: u32,
    pub g: u64,
    pub m: u64,
    pub ord_pe: u64,
}

/// What was asked: the parameters and ranges a report covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Query {
    FixedC { c: i64, x_range: [i64; 2] },
    AllPairs { x_range: [i64; 2], c_range: [i64; 2] },
    P2 { c: i64, x_range: [i64; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Solutions {
    Xs(Vec<i64>),
    Pairs(Vec<SolutionPair>),
}

impl Solutions {
    pub fn len(&self) -> usize {
        match self {
            Solutions::Xs(v) => v.len(),
            Solutions::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A solver result together with the count its theorem predicts.
///
/// Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionReport {
    pub instance: InstanceSummary,
    pub query: Query,
    pub solutions: Solutions,
    pub predicted_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_formula: Option<&'static str>,
    pub observed_count: u64,
    pub theorem: &'static str,
}

impl SolutionReport {
    /// Checks that the observed count matches both the list and the prediction.
    pub fn verify(&self) -> Result<()> {
        if self.observed_count != self.solutions.len() as u64 {
            return Err(Error::Inconsistent(format!(
                "observed_count {} but {} solutions listed",
                self.observed_count,
                self.solutions.len()
            )));
        }
        match self.predicted_count {
            Some(p) if p != self.observed_count => Err(Error::Inconsistent(format!(
                "predicted {p} solutions, found {}",
                self.observed_count
            ))),
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
