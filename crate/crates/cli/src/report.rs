//! Report assembly and rendering. Reports are deterministic given the
//! scenario and seed: maps are key-sorted and the only varying field is
//! the timestamp line.

use qctrl_core::ctrl::{Outcome, Verdict};
use qctrl_core::NumericsConfig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub command: String,
    pub tool_version: String,
    pub timestamp: u64,
    pub overrides: Vec<String>,
    pub numerics: NumericsConfig,
    pub body: Value,
}

impl Report {
    pub fn new(
        scenario: &str,
        command: &str,
        overrides: Vec<String>,
        numerics: &NumericsConfig,
        body: Value,
    ) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            scenario: scenario.to_string(),
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            overrides,
            numerics: numerics.clone(),
            body,
        }
    }

    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario: {}\n", self.scenario));
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("version: {}\n", self.tool_version));
        out.push_str(&format!("timestamp: {}\n", self.timestamp));
        if self.overrides.is_empty() {
            out.push_str("overrides: none\n");
        } else {
            out.push_str(&format!("overrides: {}\n", self.overrides.join(", ")));
        }
        out.push_str(&format!(
            "numerics: rank_tol={:e} hermiticity_tol={:e} unitarity_tol={:e} residual_tol={:e} resonance_tol={:e} denom_bound={} state_samples={} seed={} tail_tol={:e}\n",
            self.numerics.rank_tol,
            self.numerics.hermiticity_tol,
            self.numerics.unitarity_tol,
            self.numerics.residual_tol,
            self.numerics.resonance_tol,
            self.numerics.denom_bound,
            self.numerics.state_samples,
            self.numerics.seed,
            self.numerics.tail_tol,
        ));
        render_value(&mut out, 0, None, &self.body);
        out
    }
}

fn render_value(out: &mut String, indent: usize, key: Option<&str>, value: &Value) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            if let Some(k) = key {
                out.push_str(&format!("{pad}{k}:\n"));
            }
            // Scalars first, nested blocks after; key-sorted within each.
            let (flat, nested): (Vec<_>, Vec<_>) = map
                .iter()
                .partition(|(_, v)| !v.is_object() && !v.is_array());
            for (k, v) in flat.into_iter().chain(nested) {
                render_value(out, indent + usize::from(key.is_some()), Some(k), v);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let inline: Vec<String> = items.iter().map(render_scalar).collect();
            out.push_str(&format!(
                "{pad}{}[{}]\n",
                key.map(|k| format!("{k} = ")).unwrap_or_default(),
                inline.join(", ")
            ));
        }
        Value::Array(items) => {
            if let Some(k) = key {
                out.push_str(&format!("{pad}{k}:\n"));
            }
            for v in items {
                render_value(out, indent + 1, Some("-"), v);
            }
        }
        scalar => {
            out.push_str(&format!(
                "{pad}{}{}\n",
                key.map(|k| format!("{k} = ")).unwrap_or_default(),
                render_scalar(scalar)
            ));
        }
    }
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Verdicts are rendered with their full evidence map; the numbers are
/// the report, the Yes/No is only their summary.
pub fn verdict_body(v: &Verdict) -> Value {
    json!({
        "kind": format!("{:?}", v.kind),
        "outcome": outcome_str(v.outcome),
        "evidence": v.evidence,
    })
}

pub fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Yes => "Yes",
        Outcome::No => "No",
        Outcome::Inconclusive => "Inconclusive",
    }
}

pub fn complex_pairs(v: &qctrl_core::mat::CVector) -> Value {
    Value::Array(v.as_slice().iter().map(|c| json!([c.re, c.im])).collect())
}
