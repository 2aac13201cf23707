//! Evaluated inequality chains with error-aware pass/fail decisions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::quad::Estimate;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_ABS_TOL: f64 = 1e-10;
/// Relative gap below which a relation is reported as near-equality.
pub const DEFAULT_NEAR_EQUALITY: f64 = 0.02;
/// Terms and relations carried by one CSV row.
pub const CSV_TERMS: usize = 4;
pub const CSV_RELATIONS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Direction {
    pub fn symbol(&self) -> &'static str {
        match self {
            Direction::Le => "<=",
            Direction::Ge => ">=",
            Direction::Eq => "=",
        }
    }
}

/// `values[lhs] direction values[rhs]`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: usize,
    pub rhs: usize,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub schema_version: u32,
    pub chain: String,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub error_bars: Vec<f64>,
    pub relations: Vec<Relation>,
    /// Signed slack of each relation in its required direction.
    pub margins: Vec<f64>,
    /// |A - B| / max(|A|, |B|) per relation.
    pub relative_gaps: Vec<f64>,
    pub near_equality: Vec<bool>,
    pub pass: bool,
    pub abs_tol: f64,
    pub near_equality_threshold: f64,
    pub metadata: BTreeMap<String, Value>,
}

impl ChainReport {
    pub fn new(chain: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            chain: chain.into(),
            labels: Vec::new(),
            values: Vec::new(),
            error_bars: Vec::new(),
            relations: Vec::new(),
            margins: Vec::new(),
            relative_gaps: Vec::new(),
            near_equality: Vec::new(),
            pass: true,
            abs_tol: DEFAULT_ABS_TOL,
            near_equality_threshold: DEFAULT_NEAR_EQUALITY,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, near_equality: f64) -> Self {
        self.abs_tol = abs_tol;
        self.near_equality_threshold = near_equality;
        self.evaluate();
        self
    }

    /// Appends a term and returns its index.
    pub fn term(&mut self, label: impl Into<String>, est: Estimate) -> usize {
        self.labels.push(label.into());
        self.values.push(est.value);
        self.error_bars.push(est.error.abs());
        self.values.len() - 1
    }

    pub fn require(&mut self, lhs: usize, direction: Direction, rhs: usize) {
        self.relations.push(Relation { lhs, rhs, direction });
        self.evaluate();
    }

    pub fn meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metadata.insert(key.to_string(), v);
    }

    /// Recomputes margins, gaps and the overall verdict.
    pub fn evaluate(&mut self) {
        self.margins.clear();
        self.relative_gaps.clear();
        self.near_equality.clear();
        let mut pass = true;
        for r in &self.relations {
            let (a, b) = (self.values[r.lhs], self.values[r.rhs]);
            let slack = self.error_bars[r.lhs] + self.error_bars[r.rhs] + self.abs_tol;
            let margin = match r.direction {
                Direction::Le => b - a,
                Direction::Ge => a - b,
                Direction::Eq => -(a - b).abs(),
            };
            let gap = if a == b {
                0.0
            } else if a.is_infinite() || b.is_infinite() {
                1.0
            } else {
                (a - b).abs() / a.abs().max(b.abs())
            };
            pass &= margin >= -slack;
            self.margins.push(margin);
            self.relative_gaps.push(gap);
            self.near_equality.push(gap < self.near_equality_threshold);
        }
        self.pass = pass;
    }

    pub fn relation_passes(&self, i: usize) -> bool {
        let r = &self.relations[i];
        let slack = self.error_bars[r.lhs] + self.error_bars[r.rhs] + self.abs_tol;
        self.margins[i] >= -slack
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn csv_header() -> Vec<String> {
        let mut h = vec!["chain".to_string(), "parameters".to_string()];
        for i in 0..CSV_TERMS {
            h.push(format!("label{i}"));
            h.push(format!("term{i}"));
            h.push(format!("error{i}"));
        }
        for i in 0..CSV_RELATIONS {
            h.push(format!("margin{i}"));
            h.push(format!("gap{i}"));
        }
        h.push("pass".into());
        h
    }

    /// One CSV record; `parameters` describes the sweep point.
    pub fn csv_record(&self, parameters: &str) -> Vec<String> {
        let mut row = vec![self.chain.clone(), parameters.to_string()];
        for i in 0..CSV_TERMS {
            match self.values.get(i) {
                Some(v) => {
                    row.push(self.labels[i].clone());
                    row.push(format!("{v:.12e}"));
                    row.push(format!("{:.3e}", self.error_bars[i]));
                }
                None => row.extend([String::new(), String::new(), String::new()]),
            }
        }
        for i in 0..CSV_RELATIONS {
            match self.margins.get(i) {
                Some(m) => {
                    row.push(format!("{m:.12e}"));
                    row.push(format!("{:.6e}", self.relative_gaps[i]));
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        row.push(self.pass.to_string());
        row
    }

    /// Single-line summary for logs.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}", self.chain, if self.pass { "PASS" } else { "FAIL" });
        for (i, r) in self.relations.iter().enumerate() {
            s.push_str(&format!(
                " | {} {} {} (margin {:.3e}, gap {:.2e}{})",
                self.labels[r.lhs],
                r.direction.symbol(),
                self.labels[r.rhs],
                self.margins[i],
                self.relative_gaps[i],
                if self.near_equality[i] { ", near equality" } else { "" }
            ));
        }
        s
    }
}
