//! The absolute `S V` of `P V` (isotropic lines), tangency to it and the
//! CR-distribution over C, and the fibres `Gr⁰(1, V_q)` of the conformal
//! structure with their angle interpretations.
//!
//! A tangent representative `t : q → V/q` is given by the image vector `t(q)`.

use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::grassmannian::GrassPoint;
use crate::hermitian_space::{Field, HermitianSpace, QuotientSpace};
use crate::linalg::{self, CMat, CVec, C64};
use crate::projective::ProjectivePoint;
use crate::tangent::{self, TangentVector};

/// Relative tolerance of the tangency and CR tests.
pub const TANGENCY_TOL: f64 = 1e-5;
/// Step of the level-set finite difference.
pub const FD_EPS: f64 = 1e-6;
/// Defects within `[TANGENCY_TOL / BAND, TANGENCY_TOL * BAND]` are too close
/// to call; agreement with the finite-difference oracle is not required there.
pub const BAND: f64 = 100.0;
const REFERENCE_MIN: f64 = 1e-6;

/// An isotropic line `q`.
#[derive(Debug, Clone)]
pub struct AbsolutePoint {
    point: ProjectivePoint,
    /// Euclidean-unit representative.
    unit: CVec,
}

impl AbsolutePoint {
    pub fn new(space: Arc<HermitianSpace>, q: CVec) -> Result<Self> {
        let point = ProjectivePoint::new(space, q)?;
        Self::from_point(point)
    }

    pub fn from_point(point: ProjectivePoint) -> Result<Self> {
        let v = point.vector();
        let unit = &v / C64::new(v.norm(), 0.0);
        if !point.is_absolute() {
            let residual = point.space().norm2(&unit)?.abs() / point.space().gram_norm();
            return Err(GeometryError::NotIsotropic { residual });
        }
        Ok(AbsolutePoint { point, unit })
    }

    pub fn point(&self) -> &ProjectivePoint {
        &self.point
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        self.point.space()
    }

    pub fn unit(&self) -> &CVec {
        &self.unit
    }

    fn unit_image(&self, tq: &CVec) -> Result<Option<CVec>> {
        if tq.len() != self.space().dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("{}", self.space().dim()),
                found: format!("{}", tq.len()),
            });
        }
        let n = tq.norm();
        // t(q) is scaled with q so that the test sees q̂ ↦ ŵ
        Ok((n > 0.0).then(|| tq / C64::new(n, 0.0)))
    }
}

/// `|Re<t(q)^, q^>| / |G|` for unit representatives (zero for `t(q) = 0`).
pub fn tangency_defect(q: &AbsolutePoint, tq: &CVec) -> Result<f64> {
    let Some(w) = q.unit_image(tq)? else {
        return Ok(0.0);
    };
    Ok(q.space().inner(&w, q.unit())?.re.abs() / q.space().gram_norm())
}

/// Whether `t` is tangent to the absolute at `q`: `Re<t(q), q> = 0`.
pub fn absolute_tangent_check(q: &AbsolutePoint, tq: &CVec) -> Result<bool> {
    Ok(tangency_defect(q, tq)? < TANGENCY_TOL)
}

/// Reference vector `u = G⁻¹ q̂`, so that `<q̂, u> = 1`.
pub fn default_reference(q: &AbsolutePoint) -> CVec {
    q.space().gram_inv() * q.unit() / C64::new(q.unit().norm_squared(), 0.0)
}

/// `|f(q̂ + ε ŵ)| / (2ε)` with `f(x) = <x,x> / |<x,u>|²` normalized by `|<q̂,u>|²`;
/// the first-order term equals [`tangency_defect`] times `|G|`.
pub fn fd_defect(q: &AbsolutePoint, tq: &CVec, u: Option<&CVec>) -> Result<f64> {
    let space = q.space();
    let u = u.cloned().unwrap_or_else(|| default_reference(q));
    let qu = space.inner(q.unit(), &u)?;
    if qu.norm() < REFERENCE_MIN * u.norm() * space.gram_norm() {
        return Err(GeometryError::Domain(
            "reference vector is orthogonal to q".into(),
        ));
    }
    let Some(w) = q.unit_image(tq)? else {
        return Ok(0.0);
    };
    let f = |x: &CVec| -> Result<f64> { Ok(space.norm2(x)? / space.inner(x, &u)?.norm_sqr()) };
    let x = q.unit() + &w * C64::new(FD_EPS, 0.0);
    Ok(f(&x)?.abs() * qu.norm_sqr() / (2.0 * FD_EPS) / space.gram_norm())
}

/// Finite-difference level-set test of tangency.
pub fn absolute_tangent_fd_oracle(q: &AbsolutePoint, tq: &CVec, u: Option<&CVec>) -> Result<bool> {
    Ok(fd_defect(q, tq, u)? < TANGENCY_TOL)
}

/// Whether the analytic and finite-difference tests must agree for this defect.
pub fn outside_band(defect: f64) -> bool {
    !(TANGENCY_TOL / BAND..=TANGENCY_TOL * BAND).contains(&defect)
}

/// Whether `t(q) ∈ q⊥`, i.e. `t` lies in the CR-distribution. Complex spaces only.
pub fn cr_check(q: &AbsolutePoint, tq: &CVec) -> Result<bool> {
    if q.space().field() != Field::Complex {
        return Err(GeometryError::WrongField(
            "the CR-distribution needs a complex space".into(),
        ));
    }
    let Some(w) = q.unit_image(tq)? else {
        return Ok(true);
    };
    Ok(q.space().inner(&w, q.unit())?.norm() / q.space().gram_norm() < TANGENCY_TOL)
}

/// A direction with `<t(q), q̂> = i`: tangent to the absolute but not in the
/// CR-distribution.
pub fn contact_direction(q: &AbsolutePoint) -> Result<CVec> {
    if q.space().field() != Field::Complex {
        return Err(GeometryError::WrongField(
            "contact directions need a complex space".into(),
        ));
    }
    Ok(default_reference(q) * C64::new(0.0, -1.0))
}

/// Dimensions of the solution spaces inside `Lin(q, V/q) ≅ V/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DimensionCounts {
    /// Real dimension of `{t : Re<t(q),q> = 0}`.
    pub tangent_real: usize,
    /// Complex dimension of `{t : <t(q),q> = 0}` (complex spaces only).
    pub cr_complex: Option<usize>,
}

/// Counts by numerical rank of the defining linear conditions.
pub fn dimension_counts(q: &AbsolutePoint) -> Result<DimensionCounts> {
    let space = q.space();
    // euclidean complement of q: a basis of V/q
    let qm = CMat::from_column_slice(q.unit().len(), 1, q.unit().as_slice());
    let basis = linalg::null_space(&qm.adjoint(), None)?;
    let m = basis.ncols();
    let gq = space.gram() * q.unit();
    // <b, q> for each basis vector b
    let pair: Vec<C64> = (0..m)
        .map(|j| (basis.column(j).adjoint() * &gq)[(0, 0)])
        .collect();
    match space.field() {
        Field::Real => {
            let row = CMat::from_fn(1, m, |_, j| C64::new(pair[j].re, 0.0));
            Ok(DimensionCounts {
                tangent_real: m - linalg::rank(&row, None)?,
                cr_complex: None,
            })
        }
        Field::Complex => {
            // real coordinates (Re z_j, Im z_j); Re<b z, q> = Re(z̄ <b,q>)
            let row = CMat::from_fn(1, 2 * m, |_, a| {
                let z = pair[a / 2];
                C64::new(if a % 2 == 0 { z.re } else { z.im }, 0.0)
            });
            let tangent_real = 2 * m - linalg::rank(&row, None)?;
            let crow = CMat::from_fn(1, m, |_, j| pair[j].conj());
            let cr_complex = m - linalg::rank(&crow, None)?;
            Ok(DimensionCounts {
                tangent_real,
                cr_complex: Some(cr_complex),
            })
        }
    }
}

/// The fibre `π₁⁻¹(q) ≅ Gr⁰(1, V_q)` of the conformal structure.
#[derive(Debug, Clone)]
pub struct ConformalFibre {
    base: AbsolutePoint,
    quotient: QuotientSpace,
}

impl ConformalFibre {
    pub fn new(q: &AbsolutePoint) -> Result<Self> {
        let quotient = q.space().quotient_space(q.point().point().subspace())?;
        if quotient.dim() + 2 != q.space().dim() {
            return Err(GeometryError::Degenerate(
                "quotient has the wrong dimension".into(),
            ));
        }
        Ok(ConformalFibre {
            base: q.clone(),
            quotient,
        })
    }

    pub fn base(&self) -> &AbsolutePoint {
        &self.base
    }

    pub fn quotient(&self) -> &QuotientSpace {
        &self.quotient
    }

    /// `V_q` in lift coordinates.
    pub fn space(&self) -> &Arc<HermitianSpace> {
        self.quotient.space()
    }

    /// Fibre point of the plane `span(q, v)` for `v ∈ q⊥`.
    pub fn point_of(&self, v: &CVec) -> Result<GrassPoint> {
        let coords = self
            .quotient
            .project(&CMat::from_column_slice(v.len(), 1, v.as_slice()))?;
        let p = GrassPoint::new(self.space().clone(), coords)?;
        if !p.is_nondegenerate() {
            return Err(GeometryError::Degenerate(
                "plane through q is more degenerate than q".into(),
            ));
        }
        Ok(p)
    }

    /// Ambient representative in `q⊥` of a fibre point.
    pub fn lift(&self, p: &GrassPoint) -> CVec {
        self.quotient.lift() * p.frame().column(0)
    }

    fn signature_check(&self) -> Result<()> {
        let (n_plus, n_minus) = self.base.space().signature();
        if n_minus != 1 || n_plus < 2 {
            return Err(GeometryError::WrongSignature(format!(
                "conformal fibres need signature (n−1,1), got ({n_plus},{n_minus})"
            )));
        }
        Ok(())
    }
}

/// `tr(t₁*t₂)` inside `V_q`.
pub fn fibre_metric(
    fibre: &ConformalFibre,
    p0: &GrassPoint,
    t1: &TangentVector,
    t2: &TangentVector,
) -> Result<C64> {
    if !crate::hermitian_space::same_space(p0.space(), fibre.space()) {
        return Err(GeometryError::AmbientMismatch);
    }
    if !p0.is_nondegenerate() {
        return Err(GeometryError::Degenerate(
            "fibre point is degenerate".into(),
        ));
    }
    if !t1.base().equal_points(p0)? || !t2.base().equal_points(p0)? {
        return Err(GeometryError::Domain(
            "tangent vectors are not based at p0".into(),
        ));
    }
    tangent::metric(t1, t2)
}

/// Angle in `[0, π/2]` between the lines of `x` and `y` for a definite form,
/// computed as `atan2(|y⊥|, |<x,y>|/|x|)`.
fn line_angle(pair: impl Fn(&CVec, &CVec) -> C64, x: &CVec, y: &CVec) -> f64 {
    let xx = pair(x, x).re;
    let xy = pair(x, y);
    let perp = y - x * (xy / xx);
    let perp_norm = pair(&perp, &perp).re.abs().sqrt();
    perp_norm.atan2(xy.norm() / xx.abs().sqrt())
}

/// Elliptic distance `arccos √ta` between two fibre points, evaluated stably.
pub fn fibre_distance(fibre: &ConformalFibre, p: &GrassPoint, p_prime: &GrassPoint) -> Result<f64> {
    let s = fibre.space();
    let (vals, _) = linalg::hermitian_eigen(s.gram());
    if vals.iter().any(|v| v * vals[0] <= 0.0) {
        return Err(GeometryError::WrongSignature(
            "fibre form is indefinite".into(),
        ));
    }
    let x = p.frame().column(0).into_owned();
    let y = p_prime.frame().column(0).into_owned();
    Ok(line_angle(
        |a, b| s.inner(a, b).expect("fibre vectors"),
        &x,
        &y,
    ))
}

/// Direction `dφ(q)[v]` in the affine chart `φ(c) = c[..n−1] / c[n−1]` of the
/// standard basis, in which the absolute is the unit sphere.
fn chart_direction(fibre: &ConformalFibre, v: &CVec) -> Result<CVec> {
    let space = fibre.base.space();
    let p = space.standard_basis();
    let p_inv = linalg::inverse(&p)?;
    let n = space.dim();
    let cq = &p_inv * fibre.base.unit();
    let cv = &p_inv * v;
    let (qn, vn) = (cq[n - 1], cv[n - 1]);
    Ok(CVec::from_fn(n - 1, |i, _| {
        (cv[i] * qn - cq[i] * vn) / (qn * qn)
    }))
}

/// `(fibre distance, angle between sphere directions in the chart)` over R.
pub fn fibre_angle_check(
    fibre: &ConformalFibre,
    p: &GrassPoint,
    p_prime: &GrassPoint,
) -> Result<(f64, f64)> {
    if fibre.base.space().field() != Field::Real {
        return Err(GeometryError::WrongField(
            "real conformal fibres need a real space".into(),
        ));
    }
    fibre.signature_check()?;
    let d = fibre_distance(fibre, p, p_prime)?;
    let a = chart_direction(fibre, &fibre.lift(p))?;
    let b = chart_direction(fibre, &fibre.lift(p_prime))?;
    Ok((d, line_angle(|x, y| x.dotc(y), &a, &b)))
}

/// `(fibre distance, angle between complex directions)` over C.
///
/// The directions are `dφ(q)[v]` in the ball chart; they span complex lines
/// of the CR-distribution of the sphere `S^{2n−3}`, compared with the
/// euclidean hermitian product of the chart.
pub fn fubini_study_fibre_check(
    fibre: &ConformalFibre,
    p: &GrassPoint,
    p_prime: &GrassPoint,
) -> Result<(f64, f64)> {
    if fibre.base.space().field() != Field::Complex {
        return Err(GeometryError::WrongField(
            "Fubini-Study fibres need a complex space".into(),
        ));
    }
    fibre.signature_check()?;
    let d = fibre_distance(fibre, p, p_prime)?;
    let a = chart_direction(fibre, &fibre.lift(p))?;
    let b = chart_direction(fibre, &fibre.lift(p_prime))?;
    Ok((d, line_angle(|x, y| x.dotc(y), &a, &b)))
}
