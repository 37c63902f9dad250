//! Scenario files: a hermitian space plus named frames and tangent vectors.
//!
//! ```json
//! {
//!   "field": "C",
//!   "signature": [2, 1],
//!   "points": { "p1": [[0], [0], [1]] },
//!   "tangents": { "t1": { "base": "p1", "matrix": [[[1, 0.5]], [0], [0]] } },
//!   "suites": ["round_trip"],
//!   "seed": 7,
//!   "trials": 100,
//!   "tolerances": { "round_trip": 1e-9 }
//! }
//! ```
//!
//! Scalars are numbers or `[re, im]` pairs; matrices are row-major. Either
//! `gram` or `signature` must be present.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::GeometryError;
use crate::hermitian_space::{Field, HermitianSpace};
use crate::linalg::{CMat, C64};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixSpec = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentSpec {
    pub base: String,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub field: Field,
    #[serde(default)]
    pub gram: Option<MatrixSpec>,
    #[serde(default)]
    pub signature: Option<(usize, usize)>,
    #[serde(default)]
    pub points: BTreeMap<String, MatrixSpec>,
    #[serde(default)]
    pub tangents: BTreeMap<String, TangentSpec>,
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("invalid scenario: {0}")]
    Geometry(#[from] GeometryError),
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Scenario, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn space(&self) -> Result<Arc<HermitianSpace>, ScenarioError> {
        match (&self.gram, self.signature) {
            (Some(g), None) => {
                let n = g.len();
                let m = matrix(g, Some(n))?;
                if m.ncols() != n {
                    return Err(ScenarioError::Invalid(format!(
                        "gram must be square, got {}x{}",
                        n,
                        m.ncols()
                    )));
                }
                Ok(HermitianSpace::new(self.field, m)?)
            }
            (None, Some((p, m))) => Ok(HermitianSpace::from_signature(self.field, p, m)?),
            (Some(_), Some(_)) => Err(ScenarioError::Invalid(
                "give either gram or signature, not both".into(),
            )),
            (None, None) => Err(ScenarioError::Invalid("missing gram or signature".into())),
        }
    }

    /// Named frames, checked against the ambient dimension.
    pub fn frames(&self, n: usize) -> Result<BTreeMap<String, CMat>, ScenarioError> {
        self.points
            .iter()
            .map(|(name, spec)| {
                let m = matrix(spec, Some(n))
                    .map_err(|e| ScenarioError::Invalid(format!("point {name}: {e}")))?;
                Ok((name.clone(), m))
            })
            .collect()
    }
}

/// Row-major matrix; rows may be empty to describe `n x 0` frames.
pub fn matrix(spec: &MatrixSpec, rows: Option<usize>) -> Result<CMat, ScenarioError> {
    if let Some(n) = rows {
        if spec.len() != n {
            return Err(ScenarioError::Invalid(format!(
                "expected {n} rows, got {}",
                spec.len()
            )));
        }
    }
    let cols = spec.first().map_or(0, |r| r.len());
    if spec.iter().any(|r| r.len() != cols) {
        return Err(ScenarioError::Invalid("ragged matrix rows".into()));
    }
    let m = CMat::from_fn(spec.len(), cols, |i, j| spec[i][j].value());
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(ScenarioError::Invalid("non-finite matrix entry".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_scalars() {
        let s = Scenario::from_json(
            r#"{"field":"C","gram":[[1,0],[0,[-1,0]]],"points":{"a":[[1],[[0,1]]]}}"#,
        )
        .unwrap();
        let space = s.space().unwrap();
        assert_eq!(space.signature(), (1, 1));
        let f = s.frames(2).unwrap();
        assert_eq!(f["a"][(1, 0)], C64::new(0.0, 1.0));
    }

    #[test]
    fn rejects_non_hermitian_gram() {
        let s = Scenario::from_json(r#"{"field":"R","gram":[[1,2],[0,1]]}"#).unwrap();
        assert!(matches!(
            s.space(),
            Err(ScenarioError::Geometry(GeometryError::NotHermitian { .. }))
        ));
    }

    #[test]
    fn empty_frame_rows() {
        let s = Scenario::from_json(r#"{"field":"R","signature":[2,1],"points":{"e":[[],[],[]]}}"#)
            .unwrap();
        assert_eq!(s.frames(3).unwrap()["e"].shape(), (3, 0));
    }
}
