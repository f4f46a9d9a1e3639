//! Machine-readable result records for the CLI and the corpus harness.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::solver::{Outcome, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct StatsRecord {
    pub iterations: u64,
    pub rule_counts: BTreeMap<String, u64>,
    pub peak_equation_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// One solve result. Field order and map ordering are fixed, so identical
/// verdicts serialize to identical bytes (wall time aside).
#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unifier: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_parameters: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verified: Option<bool>,
    pub stats: StatsRecord,
}

impl ResultRecord {
    pub fn from_verdict(v: &Verdict, wall_time_ms: Option<f64>) -> Self {
        let stats = StatsRecord {
            iterations: v.stats.iterations,
            rule_counts: v.stats.rule_counts.clone(),
            peak_equation_count: v.stats.peak_equation_count,
            wall_time_ms,
        };
        match &v.outcome {
            Outcome::Unifiable {
                unifier,
                free_parameters,
                ..
            } => ResultRecord {
                status: "unifiable".to_string(),
                reason: None,
                witness: None,
                unifier: Some(
                    unifier
                        .iter()
                        .map(|(v, t)| (v.to_string(), t.to_string()))
                        .collect(),
                ),
                free_parameters: Some(free_parameters.iter().map(|v| v.to_string()).collect()),
                verified: None,
                stats,
            },
            Outcome::Fail(r) => ResultRecord {
                status: "fail".to_string(),
                reason: Some(r.code.as_str().to_string()),
                witness: Some(r.witness.clone()),
                unifier: None,
                free_parameters: None,
                verified: None,
                stats,
            },
        }
    }

    pub fn error(msg: String) -> Self {
        ResultRecord {
            status: "error".to_string(),
            reason: Some(msg),
            witness: None,
            unifier: None,
            free_parameters: None,
            verified: None,
            stats: StatsRecord {
                iterations: 0,
                rule_counts: BTreeMap::new(),
                peak_equation_count: 0,
                wall_time_ms: None,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }
}
