//! Audit reports. One record per check, plus optional equilibrium and
//! finding listings and a constructed classifier. Everything serialized is
//! deterministic: maps are sorted, indices are stable, and wall-clock time
//! stays out of the body (it is printed to stderr instead), so the same
//! scenario bytes always produce the same report bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub scenario_digest: String,
    pub provenance: Provenance,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<Vec<EquilibriumRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub findings: Option<Vec<FindingRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classifier: Option<BTreeMap<String, Vec<[String; 2]>>>,
    #[serde(skip)]
    pub elapsed: Option<std::time::Duration>,
}

/// What produced the verdicts: concept, belief space, enumeration mode and
/// budget, and the offer grid, so a report is interpretable on its own.
#[derive(Debug, Serialize)]
pub struct Provenance {
    pub concept: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub belief_space: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub grid: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub target: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn new(
        check: impl Into<String>,
        target: impl Into<String>,
        verdict: impl Into<String>,
        witness: Option<String>,
    ) -> Self {
        CheckRecord {
            check: check.into(),
            target: target.into(),
            verdict: verdict.into(),
            witness,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EquilibriumRecord {
    pub index: usize,
    /// Offer per candidate under the firm's strategy.
    pub offers: BTreeMap<String, String>,
    /// Per candidate: offer value -> accepted, over every offer they could hear.
    pub responses: BTreeMap<String, BTreeMap<String, bool>>,
    pub payoffs: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
pub struct FindingRecord {
    pub member: usize,
    pub player: String,
    pub witness_member: usize,
}

impl Report {
    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut bytes = serde_json::to_vec_pretty(self)
            .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
        bytes.push(b'\n');
        Ok(bytes)
    }

    /// Flat form: the per-check records only, one row each.
    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check", "target", "verdict", "witness"])
            .map_err(|e| CliError::Io(e.to_string()))?;
        for c in &self.checks {
            w.write_record([
                c.check.as_str(),
                c.target.as_str(),
                c.verdict.as_str(),
                c.witness.as_deref().unwrap_or(""),
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn emit(&self, out: Option<&Path>, format: ReportFormat) -> Result<(), CliError> {
        let bytes = match format {
            ReportFormat::Json => self.to_json()?,
            ReportFormat::Csv => self.to_csv()?,
        };
        match out {
            Some(path) => std::fs::write(path, bytes)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            None => std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io(e.to_string()))?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}
