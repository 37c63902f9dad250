//! The `hgr` command-line harness: `verify`, `invariants` and `stratify`.
//!
//! Exit codes: 0 pass, 1 suite failure, 2 unreadable or invalid input.

pub mod scenario;
pub mod suites;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::grassmannian::GrassPoint;
use crate::hermitian_space::HermitianSpace;
use crate::linalg::{CMat, C64};
use crate::projective::{self, ProjectivePoint};
use crate::tangent::{self, TangentVector};

pub use scenario::{Scenario, ScenarioError};
pub use suites::{run_suite, Suite, SuiteReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_TRIALS: usize = 100;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixOut = Vec<Vec<C64>>;

pub fn matrix_out(m: &CMat) -> MatrixOut {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

/// Options of `verify` after merging flags into the scenario.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub suites: Vec<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tolerance: Option<f64>,
}

pub fn cmd_verify(
    scenario: &Scenario,
    opts: &VerifyOptions,
) -> Result<VerificationReport, ScenarioError> {
    let space = scenario.space()?;
    let names = if opts.suites.is_empty() {
        &scenario.suites
    } else {
        &opts.suites
    };
    if names.is_empty() {
        return Err(ScenarioError::Invalid("no suites selected".into()));
    }
    let suites = names
        .iter()
        .map(|n| {
            Suite::parse(n).ok_or_else(|| ScenarioError::Invalid(format!("unknown suite {n:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (name, tol) in &scenario.tolerances {
        if Suite::parse(name).is_none() || !(tol.is_finite() && *tol >= 0.0) {
            return Err(ScenarioError::Invalid(format!(
                "bad tolerance entry {name:?}"
            )));
        }
    }
    let seed = opts.seed.or(scenario.seed).unwrap_or(0);
    let trials = opts.trials.or(scenario.trials).unwrap_or(DEFAULT_TRIALS);
    let reports: Vec<SuiteReport> = suites
        .iter()
        .map(|&s| {
            let tol = scenario
                .tolerances
                .get(s.name())
                .copied()
                .or(opts.tolerance)
                .unwrap_or_else(|| s.default_tolerance());
            run_suite(s, &space, seed, trials, tol)
        })
        .collect();
    let pass = reports.iter().all(|r| r.failures == 0);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.into(),
        command: "verify".into(),
        seed,
        pass,
        suites: reports,
    })
}

/// A value or the reason it could not be computed.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Entry<T> {
    Value { value: T },
    Error { error: String },
}

impl<T> From<crate::Result<T>> for Entry<T> {
    fn from(r: crate::Result<T>) -> Self {
        match r {
            Ok(value) => Entry::Value { value },
            Err(e) => Entry::Error {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEntry<T> {
    pub a: String,
    pub b: String,
    #[serde(flatten)]
    pub entry: Entry<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedEntry<T> {
    pub name: String,
    #[serde(flatten)]
    pub entry: Entry<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub strata: Vec<NamedEntry<crate::StratumSignature>>,
    pub tance: Vec<PairEntry<f64>>,
    pub metric: Vec<PairEntry<C64>>,
    pub char_coefficients: Vec<PairEntry<Vec<C64>>>,
    pub geodesic_invariant: Vec<NamedEntry<C64>>,
}

fn build_points(
    space: &Arc<HermitianSpace>,
    scenario: &Scenario,
) -> Result<BTreeMap<String, crate::Result<GrassPoint>>, ScenarioError> {
    Ok(scenario
        .frames(space.dim())?
        .into_iter()
        .map(|(name, f)| (name, GrassPoint::new(space.clone(), f)))
        .collect())
}

pub fn cmd_invariants(scenario: &Scenario) -> Result<InvariantsReport, ScenarioError> {
    let space = scenario.space()?;
    let points = build_points(&space, scenario)?;
    let mut tangents: BTreeMap<String, crate::Result<TangentVector>> = BTreeMap::new();
    for (name, spec) in &scenario.tangents {
        let base = points.get(&spec.base).ok_or_else(|| {
            ScenarioError::Invalid(format!(
                "tangent {name}: unknown base point {:?}",
                spec.base
            ))
        })?;
        let m = scenario::matrix(&spec.matrix, Some(space.dim()))?;
        let t = base.clone().and_then(|b| TangentVector::new(b, m));
        tangents.insert(name.clone(), t);
    }
    let strata = points
        .iter()
        .map(|(name, p)| NamedEntry {
            name: name.clone(),
            entry: p.clone().map(|p| p.stratum_signature()).into(),
        })
        .collect();
    let names: Vec<&String> = points.keys().collect();
    let mut tance = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            let value = (|| {
                let pa = ProjectivePoint::from_point(points[*a].clone()?)?;
                let pb = ProjectivePoint::from_point(points[*b].clone()?)?;
                projective::tance(&pa, &pb)
            })();
            tance.push(PairEntry {
                a: (*a).clone(),
                b: (*b).clone(),
                entry: value.into(),
            });
        }
    }
    let tnames: Vec<&String> = tangents.keys().collect();
    let mut metric = Vec::new();
    let mut char_coefficients = Vec::new();
    for a in &tnames {
        for b in &tnames {
            let (ta, tb) = (&tangents[*a], &tangents[*b]);
            let pair = || -> crate::Result<(TangentVector, TangentVector)> {
                Ok((ta.clone()?, tb.clone()?))
            };
            metric.push(PairEntry {
                a: (*a).clone(),
                b: (*b).clone(),
                entry: pair().and_then(|(x, y)| tangent::metric(&x, &y)).into(),
            });
            char_coefficients.push(PairEntry {
                a: (*a).clone(),
                b: (*b).clone(),
                entry: pair()
                    .and_then(|(x, y)| tangent::char_coefficients(&x, &y))
                    .into(),
            });
        }
    }
    let geodesic_invariant = tangents
        .iter()
        .map(|(name, t)| NamedEntry {
            name: name.clone(),
            entry: t
                .clone()
                .and_then(|t| tangent::geodesic_invariant(&t))
                .into(),
        })
        .collect();
    Ok(InvariantsReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.into(),
        command: "invariants".into(),
        strata,
        tance,
        metric,
        char_coefficients,
        geodesic_invariant,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumRecord {
    pub degeneracy: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Euclidean-orthonormal frame of `p ∩ p⊥`.
    pub kernel: MatrixOut,
    pub quotient_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratifyEntry {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record: Option<StratumRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratifyReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub points: Vec<StratifyEntry>,
}

fn stratum_record(p: &GrassPoint) -> crate::Result<StratumRecord> {
    let sig = p.stratum_signature();
    let q = p.pi_d()?;
    Ok(StratumRecord {
        degeneracy: sig.degeneracy,
        n_plus: sig.n_plus,
        n_minus: sig.n_minus,
        kernel: matrix_out(q.frame()),
        quotient_dim: p.space().dim() - 2 * sig.degeneracy,
    })
}

pub fn cmd_stratify(scenario: &Scenario) -> Result<StratifyReport, ScenarioError> {
    let space = scenario.space()?;
    let points = build_points(&space, scenario)?
        .into_iter()
        .map(|(name, p)| match p.and_then(|p| stratum_record(&p)) {
            Ok(record) => StratifyEntry {
                name,
                status: "ok".into(),
                record: Some(record),
                error: None,
            },
            Err(e @ crate::GeometryError::NearStratumBoundary { .. }) => StratifyEntry {
                name,
                status: "near stratum boundary".into(),
                record: None,
                error: Some(e.to_string()),
            },
            Err(e) => StratifyEntry {
                name,
                status: "error".into(),
                record: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(StratifyReport {
        schema_version: SCHEMA_VERSION,
        artifact_version: ARTIFACT_VERSION.into(),
        command: "stratify".into(),
        points,
    })
}
