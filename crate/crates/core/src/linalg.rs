//! Dense complex linear algebra shared by every module.
//!
//! All matrices are stored as `DMatrix<Complex64>`. When an input has
//! identically zero imaginary part the decompositions run on the real
//! matrix, so real inputs produce real bases (the field tag R is closed
//! under every helper here).

use nalgebra::{ComplexField, DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{GeometryError, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = nalgebra::DVector<C64>;

/// Relative threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Values in `(RANK_TOL, AMBIGUITY_FACTOR * RANK_TOL]` (relative) are refused.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

fn to_real(m: &CMat) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

fn lift<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> CMat {
    m.map(|z| C64::new(z.clone().real(), z.imaginary()))
}

/// Counts values above `RANK_TOL * scale`; refuses values in the ambiguous band.
pub fn split_rank(values: &[f64], scale: f64) -> Result<usize> {
    let lo = RANK_TOL * scale;
    let hi = AMBIGUITY_FACTOR * lo;
    let mut rank = 0;
    for &v in values {
        let a = v.abs();
        if a > hi {
            rank += 1;
        } else if a > lo {
            return Err(GeometryError::NearStratumBoundary {
                value: a / scale.max(f64::MIN_POSITIVE),
            });
        }
    }
    Ok(rank)
}

struct FullSvd {
    singular: Vec<f64>,
    /// Right singular vectors as columns, ordered like `singular` (descending).
    right: CMat,
}

fn full_svd_generic<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> FullSvd {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = DMatrix::<T>::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap()
    });
    let singular = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut right = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            let z = v_t[(i, r)].clone().conjugate();
            right[(r, col)] = C64::new(z.clone().real(), z.imaginary());
        }
    }
    FullSvd { singular, right }
}

fn full_svd(a: &CMat) -> FullSvd {
    if is_real(a) {
        full_svd_generic(&to_real(a))
    } else {
        full_svd_generic(a)
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = if is_real(a) {
        to_real(a).singular_values().iter().copied().collect()
    } else {
        a.singular_values().iter().copied().collect()
    };
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

pub fn spectral_norm(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Numerical rank relative to the largest singular value (or `scale` if given).
pub fn rank(a: &CMat, scale: Option<f64>) -> Result<usize> {
    let s = singular_values(a);
    let scale = scale.unwrap_or_else(|| s.first().copied().unwrap_or(0.0));
    if scale == 0.0 {
        return Ok(0);
    }
    split_rank(&s, scale)
}

/// Orthonormal (euclidean) basis of the null space of `a`.
pub fn null_space(a: &CMat, scale: Option<f64>) -> Result<CMat> {
    let n = a.ncols();
    if n == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    if a.nrows() == 0 {
        return Ok(CMat::identity(n, n));
    }
    let svd = full_svd(a);
    let scale = scale.unwrap_or(svd.singular[0]);
    if scale == 0.0 {
        return Ok(CMat::identity(n, n));
    }
    let r = split_rank(&svd.singular, scale)?;
    Ok(svd.right.columns(r, n - r).into_owned())
}

/// Orthonormal (euclidean) basis of the column space of `a`.
pub fn column_basis(a: &CMat) -> Result<CMat> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(CMat::zeros(m, 0));
    }
    let (u, s) = if is_real(a) {
        let svd = SVD::new(to_real(a), true, false);
        (
            to_complex(&svd.u.unwrap()),
            svd.singular_values.iter().copied().collect::<Vec<_>>(),
        )
    } else {
        let svd = SVD::new(a.clone(), true, false);
        (
            svd.u.unwrap(),
            svd.singular_values.iter().copied().collect::<Vec<_>>(),
        )
    };
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(CMat::zeros(m, 0));
    }
    let mut cols = Vec::new();
    for (i, &v) in s.iter().enumerate() {
        if v > AMBIGUITY_FACTOR * RANK_TOL * smax {
            cols.push(u.column(i).into_owned());
        } else if v > RANK_TOL * smax {
            return Err(GeometryError::NearStratumBoundary { value: v / smax });
        }
    }
    if cols.is_empty() {
        return Ok(CMat::zeros(m, 0));
    }
    Ok(CMat::from_columns(&cols))
}

fn hermitian_eigen_generic<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = lift(&eig.eigenvectors);
    let mut sorted = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        sorted.set_column(col, &vecs.column(i));
    }
    (values, sorted)
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues in descending order.
///
/// The input is hermitized first; eigenvectors are orthonormal columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    if m.nrows() == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let h = hermitize(m);
    if is_real(&h) {
        hermitian_eigen_generic(&to_real(&h))
    } else {
        hermitian_eigen_generic(&h)
    }
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| GeometryError::Degenerate("singular matrix".into()))
}

/// Least-squares solution of `a x = b` via SVD.
pub fn lstsq(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.ncols() == 0 {
        return Ok(CMat::zeros(0, b.ncols()));
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, RANK_TOL * smax)
        .map_err(|e| GeometryError::Degenerate(e.to_string()))
}

/// Largest sine of the principal angles between two column spaces.
pub fn max_principal_sine(a: &CMat, b: &CMat) -> Result<f64> {
    let qa = column_basis(a)?;
    let qb = column_basis(b)?;
    if qa.ncols() != qb.ncols() {
        return Ok(1.0);
    }
    if qa.ncols() == 0 {
        return Ok(0.0);
    }
    let ra = &qb - &qa * (qa.adjoint() * &qb);
    let rb = &qa - &qb * (qb.adjoint() * &qa);
    Ok(spectral_norm(&ra).max(spectral_norm(&rb)).min(1.0))
}

/// Euclidean norm of a complex vector or matrix (Frobenius).
pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn mat_from_rows(rows: &[Vec<C64>]) -> CMat {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, c, |i, j| rows[i][j])
}

pub fn real_mat(rows: &[&[f64]]) -> CMat {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
}

pub fn real_vec(xs: &[f64]) -> CVec {
    CVec::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn diag_real(xs: &[f64]) -> CMat {
    CMat::from_diagonal(&real_vec(xs))
}
