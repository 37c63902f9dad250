#![allow(dead_code)]

use std::sync::Arc;

use hermitian_grassmann::linalg::{diag_real, real_mat, real_vec};
use hermitian_grassmann::{CMat, CVec, Field, GrassPoint, HermitianSpace};

pub fn diag(field: Field, xs: &[f64]) -> Arc<HermitianSpace> {
    HermitianSpace::new(field, diag_real(xs)).unwrap()
}

/// `diag(1, 1, −1)` over the reals.
pub fn lorentz3() -> Arc<HermitianSpace> {
    diag(Field::Real, &[1.0, 1.0, -1.0])
}

pub fn cols(columns: &[&[f64]]) -> CMat {
    let n = columns[0].len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    real_mat(&refs)
}

pub fn vec(xs: &[f64]) -> CVec {
    real_vec(xs)
}

pub fn point(space: &Arc<HermitianSpace>, columns: &[&[f64]]) -> GrassPoint {
    GrassPoint::new(space.clone(), cols(columns)).unwrap()
}

pub fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
    a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
}
