//! Machine-readable command reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use linfty_core::report::{CheckReport, Failure, Status};
use linfty_core::scalar::format_scalar;
use linfty_core::{GradedModule, Vector};
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct WindowInfo {
    pub arity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poly_degree: Option<usize>,
}

/// The first basis tuple on which an identity fails.
#[derive(Clone, Debug, Serialize)]
pub struct FailureInfo {
    pub identity: String,
    pub arity: usize,
    pub inputs: Vec<String>,
    pub residual: BTreeMap<String, String>,
}

impl FailureInfo {
    pub fn new(identity: &str, failure: &Failure, source: &GradedModule, target: &GradedModule) -> Self {
        Self {
            identity: identity.into(),
            arity: failure.arity,
            inputs: failure.word.iter().map(|&i| source.label(i).to_string()).collect(),
            residual: residual_labels(&failure.residual, target),
        }
    }
}

fn residual_labels(v: &Vector, target: &GradedModule) -> BTreeMap<String, String> {
    v.iter().map(|(&j, c)| (target.label(j).to_string(), format_scalar(c))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub status: Status,
    pub window: WindowInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<FailureInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub facts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
}

impl Report {
    pub fn new(command: &str, window: WindowInfo, seed: Option<u64>) -> Self {
        Self {
            schema_version: linfty_core::io::SCHEMA_VERSION,
            command: command.into(),
            status: Status::Pass,
            window,
            seed,
            first_failure: None,
            reason: None,
            provenance: BTreeMap::new(),
            facts: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Records the first failure; later failures are ignored.
    pub fn fail(&mut self, failure: FailureInfo) {
        if self.first_failure.is_none() {
            self.status = Status::Fail;
            self.first_failure = Some(failure);
        }
    }

    pub fn absorb(&mut self, identity: &str, report: &CheckReport, source: &GradedModule, target: &GradedModule) {
        if let Some(f) = &report.first_failure {
            self.fail(FailureInfo::new(identity, f, source, target));
        }
    }

    /// A failure without a witnessing tuple.
    pub fn fail_with_reason(&mut self, reason: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
        self.reason.get_or_insert(reason.into());
    }

    pub fn fact(&mut self, key: &str, value: impl Serialize) {
        self.facts.insert(key.into(), serde_json::to_value(value).expect("facts serialize"));
    }

    pub fn provenance(&mut self, key: &str, value: impl Serialize) {
        self.provenance.insert(key.into(), serde_json::to_value(value).expect("provenance serializes"));
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = serde_json::to_value(self.status).expect("status serializes");
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "status: {}", status.as_str().unwrap_or_default());
        let _ = write!(out, "window: arity {}", self.window.arity);
        if let Some(p) = self.window.poly_degree {
            let _ = write!(out, ", poly-degree {p}");
        }
        out.push('\n');
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        if let Some(f) = &self.first_failure {
            let residual: Vec<String> = f.residual.iter().map(|(l, c)| format!("{c}·{l}")).collect();
            let _ = writeln!(
                out,
                "failure: {} at arity {} on ({}), residual {}",
                f.identity,
                f.arity,
                f.inputs.join(", "),
                residual.join(" + ")
            );
        }
        if let Some(r) = &self.reason {
            let _ = writeln!(out, "reason: {r}");
        }
        for (k, v) in self.provenance.iter().chain(&self.facts) {
            let _ = writeln!(out, "{k}: {}", compact(v));
        }
        for path in &self.outputs {
            let _ = writeln!(out, "wrote: {path}");
        }
        out
    }
}

fn compact(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
