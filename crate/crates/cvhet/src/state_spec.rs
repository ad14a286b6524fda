//! JSON state and operator files.
//!
//! ```json
//! {"cutoff": 1, "amplitudes": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}
//! {"cutoff": 1, "matrix": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}
//! ```

use std::path::Path;

use cvhet_core::{Complex64, DensityMatrix, FockOperator, FockVector};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    cutoff: usize,
    amplitudes: Option<Vec<[f64; 2]>>,
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// A parsed state file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Pure(FockVector),
    Mixed(DensityMatrix),
}

impl StateSpec {
    pub fn cutoff(&self) -> usize {
        match self {
            StateSpec::Pure(v) => v.cutoff(),
            StateSpec::Mixed(r) => r.cutoff(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            StateSpec::Pure(v) => v.projector(),
            StateSpec::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&FockVector> {
        match self {
            StateSpec::Pure(v) => Some(v),
            StateSpec::Mixed(_) => None,
        }
    }
}

/// Either body of a spec, checked for shape but not for physical invariants.
enum Body {
    Amplitudes(Vec<Complex64>),
    Matrix(Vec<Vec<Complex64>>),
}

fn complex(pair: &[f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn parse_body(text: &str, origin: &str) -> Result<(usize, Body)> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    let dim = raw.cutoff.checked_add(1).ok_or_else(|| CliError::Field {
        path: origin.to_string(),
        field: "cutoff",
        msg: "too large".into(),
    })?;
    let field_err = |field, msg: String| CliError::Field {
        path: origin.to_string(),
        field,
        msg,
    };
    let finite = |field, xs: &mut dyn Iterator<Item = &[f64; 2]>| -> Result<()> {
        if xs.flatten().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(field_err(field, "entries must be finite".into()))
        }
    };
    match (raw.amplitudes, raw.matrix) {
        (Some(a), None) => {
            if a.len() != dim {
                return Err(field_err(
                    "amplitudes",
                    format!("expected {dim} entries for cutoff {}, found {}", raw.cutoff, a.len()),
                ));
            }
            finite("amplitudes", &mut a.iter())?;
            Ok((raw.cutoff, Body::Amplitudes(a.iter().map(complex).collect())))
        }
        (None, Some(m)) => {
            if m.len() != dim {
                return Err(field_err(
                    "matrix",
                    format!("expected {dim} rows for cutoff {}, found {}", raw.cutoff, m.len()),
                ));
            }
            if let Some((i, row)) = m.iter().enumerate().find(|(_, r)| r.len() != dim) {
                return Err(field_err(
                    "matrix",
                    format!("row {i} has {} entries, expected {dim}", row.len()),
                ));
            }
            finite("matrix", &mut m.iter().flatten())?;
            Ok((
                raw.cutoff,
                Body::Matrix(m.iter().map(|r| r.iter().map(complex).collect()).collect()),
            ))
        }
        (Some(_), Some(_)) => Err(field_err(
            "amplitudes",
            "give exactly one of `amplitudes` and `matrix`".into(),
        )),
        (None, None) => Err(field_err("matrix", "missing; give `amplitudes` or `matrix`".into())),
    }
}

/// Parses and validates a state. Amplitudes must be normalized; matrices must
/// be Hermitian, unit-trace and positive semidefinite.
pub fn parse_state_spec(text: &str, origin: &str) -> Result<StateSpec> {
    match parse_body(text, origin)?.1 {
        Body::Amplitudes(a) => Ok(StateSpec::Pure(FockVector::new(a)?)),
        Body::Matrix(rows) => Ok(StateSpec::Mixed(DensityMatrix::new(FockOperator::from_rows(&rows)?)?)),
    }
}

/// Parses an arbitrary operator. `amplitudes` stands for `|ψ⟩⟨ψ|` and is not
/// required to be normalized.
pub fn parse_operator_spec(text: &str, origin: &str) -> Result<FockOperator> {
    match parse_body(text, origin)?.1 {
        Body::Amplitudes(a) => Ok(FockOperator::from_fn(a.len() - 1, |k, l| a[k] * a[l].conj())),
        Body::Matrix(rows) => Ok(FockOperator::from_rows(&rows)?),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn read_state(path: &Path) -> Result<StateSpec> {
    parse_state_spec(&read_text(path)?, &path.display().to_string())
}

pub fn read_operator(path: &Path) -> Result<FockOperator> {
    parse_operator_spec(&read_text(path)?, &path.display().to_string())
}

/// Rows of `[re, im]` pairs, the matrix layout of state files and reports.
pub fn matrix_json(op: &FockOperator) -> serde_json::Value {
    op.rows()
        .iter()
        .map(|r| r.iter().map(|z| serde_json::json!([z.re, z.im])).collect::<Vec<_>>())
        .collect()
}

pub fn state_json(state: &StateSpec) -> serde_json::Value {
    match state {
        StateSpec::Pure(v) => serde_json::json!({
            "cutoff": v.cutoff(),
            "amplitudes": v.amplitudes().iter().map(|z| serde_json::json!([z.re, z.im])).collect::<Vec<_>>(),
        }),
        StateSpec::Mixed(r) => serde_json::json!({
            "cutoff": r.cutoff(),
            "matrix": matrix_json(r.as_operator()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cvhet_core::Error;

    #[test]
    fn vacuum_amplitudes() {
        let s = parse_state_spec(r#"{"cutoff":0, "amplitudes":[[1,0]]}"#, "t").unwrap();
        assert_eq!(s, StateSpec::Pure(FockVector::vacuum()));
    }

    #[test]
    fn plus_like_matrix() {
        let s = parse_state_spec(r#"{"cutoff":1, "matrix":[[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]}"#, "t").unwrap();
        let ev = s.density().eigenvalues();
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_deficit_names_residual() {
        let err = parse_state_spec(r#"{"cutoff":1, "matrix":[[[0.5,0],[0,0]],[[0,0],[0.4,0]]]}"#, "t").unwrap_err();
        match err {
            CliError::Core(Error::InvalidState { invariant, residual }) => {
                assert!(invariant.contains("trace"), "{invariant}");
                assert!((residual - 0.1).abs() < 1e-12);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_state_spec("{\"cutoff\": 0,\n \"amplitudes\": [[1, 0]],,\n}", "f.json").unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn shape_errors_name_field() {
        for (text, field) in [
            (r#"{"cutoff":1, "amplitudes":[[1,0]]}"#, "amplitudes"),
            (r#"{"cutoff":1, "matrix":[[[1,0],[0,0]],[[0,0]]]}"#, "matrix"),
            (r#"{"cutoff":0}"#, "matrix"),
            (
                r#"{"cutoff":0, "amplitudes":[[1,0]], "matrix":[[[1,0]]]}"#,
                "amplitudes",
            ),
        ] {
            match parse_state_spec(text, "t").unwrap_err() {
                CliError::Field { field: f, .. } => assert_eq!(f, field),
                e => panic!("{e}"),
            }
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_state_spec(r#"{"cutoff":0, "amplitude":[[1,0]]}"#, "t").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
    }

    #[test]
    fn operator_from_amplitudes_is_outer_product() {
        let op = parse_operator_spec(r#"{"cutoff":1, "amplitudes":[[1,0],[0,2]]}"#, "t").unwrap();
        assert_eq!(op.get(0, 1), Complex64::new(0.0, -2.0));
        assert_eq!(op.get(1, 1), Complex64::new(4.0, 0.0));
    }
}
