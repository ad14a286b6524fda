//! JSON reports. Non-finite numbers are written as `null`.

use std::path::Path;

use cvhet_core::protocol::{FidelityReport, ProbabilityBudget};
use cvhet_core::tomography::TomographyReport;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::state_spec::matrix_json;

pub fn budget_json(b: &ProbabilityBudget) -> Value {
    json!({
        "terms": b.terms.iter().map(|t| json!({
            "name": t.name,
            "log_value": t.log_value,
            "clamped": t.clamped(),
            "vacuous": t.vacuous,
        })).collect::<Vec<_>>(),
        "total_log": b.total_log,
        "total_clamped": b.total_clamped,
    })
}

pub fn tomography_json(r: &TomographyReport) -> Value {
    json!({
        "estimates": matrix_json(&r.estimates),
        "epsilon": r.epsilon,
        "epsilon_prime": r.epsilon_prime,
        "confidence_radius": r.confidence_radius,
        "sample_count": r.sample_count,
        "hermitized": r.hermitized,
        "failure_log_prob": r.failure_log_prob,
        "failure_prob_clamped": r.failure_prob_clamped(),
    })
}

pub fn fidelity_json(r: &FidelityReport) -> Value {
    json!({
        "support_count": r.support_count,
        "support_threshold": r.support_threshold,
        "passed": r.passed,
        "mean": r.mean,
        "estimate": r.estimate,
        "radius": r.radius,
        "eta": r.eta,
        "k_psi": r.k_psi,
        "ln_c_psi": r.ln_c_psi,
        "budget": budget_json(&r.budget),
    })
}

/// Writes `value` pretty-printed to `path`, or to stdout when `None`.
pub fn emit(value: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
