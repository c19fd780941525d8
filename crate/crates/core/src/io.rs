//! Graph documents, probability files and analysis reports.
//!
//! Two input formats are accepted:
//!
//! * a JSON graph document with keys `agents`, `delegations`, `areas`,
//!   `probabilities` and `default_probability` (see [`GraphDocument`]);
//! * an edge list with one `from,to` pair per line, `#` comments and blank
//!   lines ignored. A line holding a single id declares an agent without a
//!   delegation.
//!
//! [`parse_document`] picks the format from the first non-blank character.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::graph::{AgentId, AreaId, DelegationOverlay, DelegationProfile, IssueId, Scope, ScopedDelegation};
use crate::influence::{check_probability, SuspendibleProfile};

/// Voting probability used when neither the document nor the caller gives
/// one.
pub const FALLBACK_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Validation(#[from] Error),
    #[error("the document has area- or issue-scoped delegations; select an issue")]
    MissingIssue,
}

impl DocumentError {
    pub fn code(&self) -> &'static str {
        match self {
            DocumentError::Parse { .. } => "parse-error",
            DocumentError::Validation(e) => e.code(),
            DocumentError::MissingIssue => "missing-issue",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub agents: Vec<AgentId>,
    #[serde(default)]
    pub delegations: Vec<ScopedDelegation>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub areas: BTreeMap<IssueId, AreaId>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub probabilities: BTreeMap<AgentId, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_probability: Option<f64>,
}

impl GraphDocument {
    /// Checks referential integrity and probability ranges.
    pub fn validate(&self) -> Result<DelegationOverlay, DocumentError> {
        let overlay = self.overlay_unchecked()?;
        if let Some(p) = self.default_probability {
            check_probability(p, None)?;
        }
        for (agent, &p) in &self.probabilities {
            if !self.agents.contains(agent) {
                return Err(Error::UnknownAgent(agent.clone()).into());
            }
            check_probability(p, Some(agent))?;
        }
        Ok(overlay)
    }

    fn overlay_unchecked(&self) -> Result<DelegationOverlay, Error> {
        DelegationOverlay::new(self.agents.iter().cloned(), self.delegations.iter().cloned(), self.areas.clone())
    }

    /// The delegation profile in force, consolidated for `issue` when given.
    /// Documents with scoped delegations require an issue.
    pub fn profile(&self, issue: Option<&IssueId>) -> Result<DelegationProfile, DocumentError> {
        let overlay = self.validate()?;
        match issue {
            Some(issue) => Ok(overlay.consolidate(issue)?),
            None if overlay.has_scoped_delegations() => Err(DocumentError::MissingIssue),
            None => Ok(overlay.consolidate_global()?),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }
}

pub fn parse_graph(text: &str) -> Result<GraphDocument, DocumentError> {
    let doc: GraphDocument = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.validate()?;
    Ok(doc)
}

pub fn parse_edge_list(text: &str) -> Result<GraphDocument, DocumentError> {
    let mut agents: Vec<AgentId> = Vec::new();
    let mut delegations = Vec::new();
    let declare = |id: &str, agents: &mut Vec<AgentId>| {
        let id = AgentId::from(id);
        if !agents.contains(&id) {
            agents.push(id.clone());
        }
        id
    };
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse_error = |message: &str| DocumentError::Parse {
            line: n + 1,
            column: raw.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1,
            message: message.to_owned(),
        };
        match fields.as_slice() {
            [id] if !id.is_empty() => {
                declare(id, &mut agents);
            }
            [from, to] if !from.is_empty() && !to.is_empty() => {
                let from = declare(from, &mut agents);
                let to = declare(to, &mut agents);
                delegations.push(ScopedDelegation { from, to, scope: Scope::Global });
            }
            _ => return Err(parse_error("expected `from,to`")),
        }
    }
    let doc = GraphDocument {
        agents,
        delegations,
        areas: BTreeMap::new(),
        probabilities: BTreeMap::new(),
        default_probability: None,
    };
    doc.validate()?;
    Ok(doc)
}

/// Parses either format, choosing JSON when the text starts with `{`.
pub fn parse_document(text: &str) -> Result<GraphDocument, DocumentError> {
    if text.trim_start().starts_with('{') {
        parse_graph(text)
    } else {
        parse_edge_list(text)
    }
}

/// Per-agent probabilities from a JSON object (`{"a": 0.3}`) or `agent,p`
/// lines.
pub fn parse_probabilities(text: &str) -> Result<BTreeMap<AgentId, f64>, DocumentError> {
    let map: BTreeMap<AgentId, f64> = if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?
    } else {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| DocumentError::Parse { line: n + 1, column: 1, message };
            let (agent, value) = line.split_once(',').ok_or_else(|| bad("expected `agent,probability`".into()))?;
            let value: f64 = value.trim().parse().map_err(|e| bad(format!("bad probability: {e}")))?;
            map.insert(AgentId::from(agent.trim()), value);
        }
        map
    };
    for (agent, &p) in &map {
        check_probability(p, Some(agent))?;
    }
    Ok(map)
}

/// How voting probabilities are assigned: a uniform value overrides the
/// document; per-agent overrides apply on top of either.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProbabilitySettings {
    pub uniform: Option<f64>,
    pub overrides: BTreeMap<AgentId, f64>,
}

impl ProbabilitySettings {
    pub fn uniform(p: f64) -> Self {
        ProbabilitySettings { uniform: Some(p), overrides: BTreeMap::new() }
    }

    /// Builds the suspendible profile and a one-line description of the
    /// probability model.
    pub fn resolve(
        &self,
        doc: &GraphDocument,
        profile: DelegationProfile,
    ) -> Result<(SuspendibleProfile, String), DocumentError> {
        let (mut probs, default, mut label) = match self.uniform {
            Some(p) => (BTreeMap::new(), p, format!("uniform p={p}")),
            None => {
                let default = doc.default_probability.unwrap_or(FALLBACK_PROBABILITY);
                let label = if doc.probabilities.is_empty() {
                    format!("uniform p={default}")
                } else {
                    format!("per-agent ({}, default p={default})", count(doc.probabilities.len(), "entry", "entries"))
                };
                (doc.probabilities.clone(), default, label)
            }
        };
        if !self.overrides.is_empty() {
            probs.extend(self.overrides.iter().map(|(a, &p)| (a.clone(), p)));
            let _ = write!(label, " with {}", count(self.overrides.len(), "override", "overrides"));
        }
        let sp = SuspendibleProfile::new(profile, &probs, Some(default))?;
        Ok((sp, label))
    }
}

fn count(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloCell {
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub agent: AgentId,
    pub potential: f64,
    pub expected: f64,
    pub stationary_scaled: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarloCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub n: usize,
    pub probability_model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

impl ReportDocument {
    pub fn row(&self, agent: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.agent.as_str() == agent)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mc = self.rows.iter().any(|r| r.monte_carlo.is_some());
        let mut out = String::from("agent,potential,expected,stationary_scaled");
        if mc {
            out.push_str(",mc_estimate,mc_std_error");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{}", r.agent, r.potential, r.expected, r.stationary_scaled);
            if mc {
                match r.monte_carlo {
                    Some(c) => {
                        let _ = write!(out, ",{},{}", c.estimate, c.std_error);
                    }
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Aligned text table, numbers rounded to three decimals.
    pub fn to_table(&self) -> String {
        let mut headers = vec!["agent", "potential", "expected", "stationary"];
        let mc = self.rows.iter().any(|r| r.monte_carlo.is_some());
        if mc {
            headers.extend(["mc_estimate", "mc_std_error"]);
        }
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells =
                    vec![r.agent.to_string(), round3(r.potential), round3(r.expected), round3(r.stationary_scaled)];
                if mc {
                    let (e, s) = r
                        .monte_carlo
                        .map_or((String::new(), String::new()), |c| (round3(c.estimate), round3(c.std_error)));
                    cells.extend([e, s]);
                }
                cells
            })
            .collect();
        let mut out = format!(
            "# n={} probabilities: {} tolerance={:e}",
            self.metadata.n, self.metadata.probability_model, self.metadata.tolerance
        );
        if let Some(issue) = &self.metadata.issue {
            let _ = write!(out, " issue={issue}");
        }
        if let (Some(seed), Some(samples)) = (self.metadata.seed, self.metadata.samples) {
            let _ = write!(out, " seed={seed} samples={samples}");
        }
        out.push('\n');
        out.push_str(&text_table(&headers, &rows));
        out
    }
}

/// Three-decimal rendering with trailing zeros trimmed (`3.484`, `4`,
/// `1.5`).
pub fn round3(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

/// Renders right-aligned columns separated by two spaces.
pub fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut headers.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}
