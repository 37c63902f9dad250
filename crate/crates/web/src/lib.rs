//! Browser bindings: each export takes a scenario as JSON text and returns a
//! JSON report, or throws the error message.

use std::sync::Arc;

use hermitian_grassmann::cli::{self, matrix_out, MatrixOut, Scenario};
use hermitian_grassmann::projective::{self, ProjectivePoint};
use hermitian_grassmann::{GrassPoint, HermitianSpace, TangentVector, C64};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn to_json<T: Serialize>(v: &T) -> Out {
    serde_json::to_string_pretty(v).map_err(|e| e.to_string())
}

fn point(space: &Arc<HermitianSpace>, sc: &Scenario, name: &str) -> Result<GrassPoint, String> {
    let frames = sc.frames(space.dim()).map_err(|e| e.to_string())?;
    let f = frames
        .get(name)
        .ok_or_else(|| format!("unknown point {name:?}"))?;
    GrassPoint::new(space.clone(), f.clone()).map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct RoundTrip {
    pub tance: f64,
    pub horizontal: MatrixOut,
    pub vertical: MatrixOut,
    pub round_trip: MatrixOut,
    /// `|trip - (tance² h + tance v)| / |t|`
    pub residual: f64,
}

/// Observes `tangent` at the second point and back again.
pub fn round_trip_json(scenario: &str, tangent: &str, target: &str) -> Out {
    let sc = Scenario::from_json(scenario).map_err(|e| e.to_string())?;
    let space = sc.space().map_err(|e| e.to_string())?;
    let spec = sc
        .tangents
        .get(tangent)
        .ok_or_else(|| format!("unknown tangent {tangent:?}"))?;
    let base = point(&space, &sc, &spec.base)?;
    let m = cli::scenario::matrix(&spec.matrix, Some(space.dim())).map_err(|e| e.to_string())?;
    let run = || -> hermitian_grassmann::Result<RoundTrip> {
        let t = TangentVector::new(base.clone(), m)?;
        let p1 = ProjectivePoint::from_point(base.clone())?;
        let p2 = ProjectivePoint::from_point(
            point(&space, &sc, target).map_err(hermitian_grassmann::GeometryError::Domain)?,
        )?;
        let ta = projective::tance(&p1, &p2)?;
        let hv = projective::hv_decompose(&t, &p2)?;
        let trip = projective::round_trip(&t, &p2)?;
        let expected = hv
            .horizontal
            .scaled(C64::new(ta * ta, 0.0))?
            .add(&hv.vertical.scaled(C64::new(ta, 0.0))?)?;
        Ok(RoundTrip {
            tance: ta,
            horizontal: matrix_out(hv.horizontal.mat()),
            vertical: matrix_out(hv.vertical.mat()),
            round_trip: matrix_out(trip.mat()),
            residual: trip.distance(&expected)? / t.norm().max(f64::MIN_POSITIVE),
        })
    };
    to_json(&run().map_err(|e| e.to_string())?)
}

pub fn invariants_json(scenario: &str) -> Out {
    let sc = Scenario::from_json(scenario).map_err(|e| e.to_string())?;
    to_json(&cli::cmd_invariants(&sc).map_err(|e| e.to_string())?)
}

pub fn stratify_json(scenario: &str) -> Out {
    let sc = Scenario::from_json(scenario).map_err(|e| e.to_string())?;
    to_json(&cli::cmd_stratify(&sc).map_err(|e| e.to_string())?)
}

fn js(r: Out) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn round_trip(scenario: &str, tangent: &str, target: &str) -> Result<String, JsValue> {
    js(round_trip_json(scenario, tangent, target))
}

#[wasm_bindgen]
pub fn invariants(scenario: &str) -> Result<String, JsValue> {
    js(invariants_json(scenario))
}

#[wasm_bindgen]
pub fn stratify(scenario: &str) -> Result<String, JsValue> {
    js(stratify_json(scenario))
}
