//! Random spaces, points and tangent vectors for property checks.
//!
//! Every function takes the generator explicitly; the CLI and the tests use
//! `ChaCha8Rng`, so sequences are reproducible across platforms.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeometryError, Result};
use crate::grassmannian::GrassPoint;
use crate::hermitian_space::{Field, HermitianSpace, SubspaceFrame};
use crate::linalg::{self, CMat, CVec, C64};
use crate::projective::ProjectivePoint;
use crate::tangent::TangentVector;

const MAX_TRIES: usize = 200;
/// Sampled vectors keep `|<v,v>| ≥ MARGIN v^H|G|v` away from the absolute.
const MARGIN: f64 = 0.05;

/// `|<v,v>| / v^H|G|v`, in `[0, 1]` for any nonzero `v`.
fn separation(space: &HermitianSpace, v: &CVec) -> Result<f64> {
    let (vals, vecs) = linalg::hermitian_eigen(space.gram());
    let c = vecs.adjoint() * v;
    let abs: f64 = c
        .iter()
        .zip(&vals)
        .map(|(z, l)| z.norm_sqr() * l.abs())
        .sum();
    Ok(space.norm2(v)?.abs() / abs)
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Standard gaussian scalar of the field (unit variance over C as well).
pub fn scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(normal(rng), 0.0),
        Field::Complex => C64::new(normal(rng), normal(rng)) / 2f64.sqrt(),
    }
}

/// Unit scalar: `±1` over R, a uniform phase over C.
pub fn unit_scalar<R: Rng + ?Sized>(rng: &mut R, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
        Field::Complex => C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)),
    }
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, field: Field, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| scalar(rng, field))
}

pub fn matrix<R: Rng + ?Sized>(rng: &mut R, field: Field, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| scalar(rng, field))
}

/// A well-conditioned non-diagonal form `G = A^H D A` of the given signature.
pub fn space<R: Rng + ?Sized>(
    rng: &mut R,
    field: Field,
    n_plus: usize,
    n_minus: usize,
) -> Result<Arc<HermitianSpace>> {
    let n = n_plus + n_minus;
    let d: Vec<f64> = (0..n)
        .map(|i| if i < n_plus { 1.0 } else { -1.0 })
        .collect();
    for _ in 0..MAX_TRIES {
        let a = CMat::identity(n, n)
            + matrix(rng, field, n, n) * C64::new(0.4 / (n as f64).sqrt(), 0.0);
        let s = linalg::singular_values(&a);
        if s.last().is_some_and(|&lo| s[0] / lo < 10.0) {
            return HermitianSpace::new(field, a.adjoint() * linalg::diag_real(&d) * a);
        }
    }
    Err(GeometryError::Domain(
        "could not sample a well-conditioned form".into(),
    ))
}

/// `exp(scale · G⁻¹ S)` with `S` anti-hermitian; preserves the form.
pub fn form_preserving<R: Rng + ?Sized>(rng: &mut R, space: &HermitianSpace, scale: f64) -> CMat {
    let n = space.dim();
    let x = matrix(rng, space.field(), n, n);
    let s = (&x - x.adjoint()) * C64::new(0.5, 0.0);
    let m = space.gram_inv() * s * C64::new(scale, 0.0);
    let g = m.exp();
    if space.field() == Field::Real {
        g.map(|z| C64::new(z.re, 0.0))
    } else {
        g
    }
}

/// A random totally isotropic subspace of dimension `d`.
pub fn isotropic<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<HermitianSpace>,
    d: usize,
) -> Result<SubspaceFrame> {
    let (n_plus, n_minus) = space.signature();
    if d > n_plus.min(n_minus) {
        return Err(GeometryError::WrongSignature(format!(
            "no isotropic {d}-space in signature ({n_plus},{n_minus})"
        )));
    }
    let p = space.standard_basis();
    let n = space.dim();
    let mut frame = CMat::zeros(n, d);
    for i in 0..d {
        let u = unit_scalar(rng, space.field());
        let col = p.column(i) + p.column(n_plus + i) * u;
        frame.set_column(i, &col);
    }
    let g = form_preserving(rng, space, 0.5);
    SubspaceFrame::new(space.clone(), g * frame)
}

/// A random `k`-dimensional point with `dim(p ∩ p⊥) = d`.
pub fn point<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<HermitianSpace>,
    k: usize,
    d: usize,
) -> Result<GrassPoint> {
    let n = space.dim();
    if k > n || k + d > n || d > k {
        return Err(GeometryError::DimensionMismatch {
            expected: "d ≤ k, k + d ≤ n".into(),
            found: format!("k = {k}, d = {d}, n = {n}"),
        });
    }
    for _ in 0..MAX_TRIES {
        let frame = if d == 0 {
            matrix(rng, space.field(), n, k)
        } else {
            let q = isotropic(rng, space, d)?;
            let perp = space.orthogonal_complement(&q)?;
            let rest = perp.frame() * matrix(rng, space.field(), perp.dim(), k - d);
            let mut f = CMat::zeros(n, k);
            f.columns_mut(0, d).copy_from(q.frame());
            f.columns_mut(d, k - d).copy_from(&rest);
            f
        };
        if let Ok(p) = GrassPoint::new(space.clone(), frame) {
            if p.degeneracy() == d && well_separated(&p) {
                return Ok(p);
            }
        }
    }
    Err(GeometryError::Domain(format!(
        "could not sample a point with degeneracy {d}"
    )))
}

/// Nonzero eigenvalues of the restricted form stay above `MARGIN`.
fn well_separated(p: &GrassPoint) -> bool {
    let Ok(q) = linalg::column_basis(p.frame()) else {
        return false;
    };
    let (vals, _) = linalg::hermitian_eigen(&p.space().pairing(&q, &q));
    let scale = p.space().gram_norm();
    vals.iter()
        .filter(|v| v.abs() > 1e-8 * scale)
        .all(|v| v.abs() >= MARGIN * scale)
}

/// A projective point with `sign <v,v> > 0`, away from the absolute.
pub fn projective_point<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<HermitianSpace>,
    sign: f64,
) -> Result<ProjectivePoint> {
    let (n_plus, n_minus) = space.signature();
    let wanted = if sign > 0.0 {
        0..n_plus
    } else {
        n_plus..n_plus + n_minus
    };
    if wanted.is_empty() {
        return Err(GeometryError::WrongSignature(format!(
            "no vectors of sign {sign}"
        )));
    }
    let basis = space.standard_basis();
    for _ in 0..MAX_TRIES {
        // in form-orthonormal coordinates, shrink the opposite block below the wanted one
        let mut c = vector(rng, space.field(), space.dim());
        let (mut own, mut other) = (0.0, 0.0);
        for (i, z) in c.iter().enumerate() {
            if wanted.contains(&i) {
                own += z.norm_sqr()
            } else {
                other += z.norm_sqr()
            }
        }
        if other > 0.0 {
            let shrink = rng.random_range(0.0..0.9) * (own / other).sqrt();
            c.iter_mut()
                .enumerate()
                .filter(|(i, _)| !wanted.contains(i))
                .for_each(|(_, z)| *z *= shrink);
        }
        let v = &basis * &c;
        let q = space.norm2(&v)?;
        if q * sign >= MARGIN * c.norm_squared() {
            return ProjectivePoint::new(space.clone(), v);
        }
    }
    Err(GeometryError::WrongSignature(format!(
        "no vectors of sign {sign}"
    )))
}

/// A projective point near `center`: `v = x + scale·w` with `w` a random `x⊥` vector.
pub fn nearby_point<R: Rng + ?Sized>(
    rng: &mut R,
    center: &ProjectivePoint,
    scale: f64,
) -> Result<ProjectivePoint> {
    let t = tangent(rng, center.point())?;
    let w = t.mat().column(0).into_owned();
    let x = center.vector();
    let f = scale * x.norm() / w.norm().max(f64::MIN_POSITIVE);
    let v = &x + w * C64::new(f, 0.0);
    ProjectivePoint::new(center.space().clone(), v)
}

/// A random tangent vector `π[p] M` at a nondegenerate point.
pub fn tangent<R: Rng + ?Sized>(rng: &mut R, base: &GrassPoint) -> Result<TangentVector> {
    let (n, k) = (base.space().dim(), base.k());
    let m = matrix(rng, base.space().field(), n, k);
    TangentVector::projected(base.clone(), &m)
}

/// A definite complex line: the image of two standard basis vectors of the
/// same sign under a random isometry. Returns a frame and the sign.
pub fn definite_line<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<HermitianSpace>,
) -> Result<(CMat, f64)> {
    let (n_plus, n_minus) = space.signature();
    let p = space.standard_basis();
    let (cols, sign) = if n_plus >= 2 {
        ([0, 1], 1.0)
    } else if n_minus >= 2 {
        ([n_plus, n_plus + 1], -1.0)
    } else {
        return Err(GeometryError::WrongSignature("no definite 2-plane".into()));
    };
    let frame = CMat::from_columns(&[
        p.column(cols[0]).into_owned(),
        p.column(cols[1]).into_owned(),
    ]);
    Ok((form_preserving(rng, space, 0.5) * frame, sign))
}

/// A line of signature `(1,1)` through the standard basis.
pub fn lorentzian_line<R: Rng + ?Sized>(rng: &mut R, space: &Arc<HermitianSpace>) -> Result<CMat> {
    let (n_plus, n_minus) = space.signature();
    if n_plus == 0 || n_minus == 0 {
        return Err(GeometryError::WrongSignature(
            "no indefinite 2-plane".into(),
        ));
    }
    let p = space.standard_basis();
    let frame = CMat::from_columns(&[p.column(0).into_owned(), p.column(n_plus).into_owned()]);
    Ok(form_preserving(rng, space, 0.5) * frame)
}

/// Three points on the line `frame` whose vectors have sign `sign`, plus a
/// tangent vector at the first one that stays in the line.
pub fn line_triangle<R: Rng + ?Sized>(
    rng: &mut R,
    space: &Arc<HermitianSpace>,
    frame: &CMat,
    sign: f64,
    spread: f64,
) -> Result<(TangentVector, ProjectivePoint, ProjectivePoint)> {
    let swap = sign < 0.0 && space.pairing(frame, frame)[(0, 0)].re > 0.0;
    let fail = || GeometryError::Domain("could not sample a triangle on the line".into());
    let mut draw = || -> Result<ProjectivePoint> {
        for _ in 0..MAX_TRIES {
            let (a, b) = (C64::new(1.0, 0.0), scalar(rng, space.field()) * spread);
            let c = if swap {
                CVec::from_vec(vec![b, a])
            } else {
                CVec::from_vec(vec![a, b])
            };
            let v = frame * &c;
            if space.norm2(&v)? * sign > 0.0 && separation(space, &v)? >= MARGIN {
                return ProjectivePoint::new(space.clone(), v);
            }
        }
        Err(fail())
    };
    let p1 = draw()?;
    let p2 = draw()?;
    let p3 = draw()?;
    // the x1⊥ part of a frame vector lies in the line; keep the larger one
    let pick = |j: usize| -> Result<TangentVector> {
        TangentVector::projected(p1.point().clone(), &frame.columns(j, 1).into_owned())
    };
    let (t0, t1) = (pick(0)?, pick(1)?);
    let t = if t0.norm() >= t1.norm() { t0 } else { t1 };
    let t = t.scaled(scalar(rng, space.field()) / t.norm())?;
    Ok((t, p2, p3))
}

/// `x + r·w` with `w ∈ x⊥` scaled to `|<w,w>| = |<x,x>|`; for a riemannian
/// piece `r` is the radius of the second point in the chart at the first.
pub fn point_at_radius<R: Rng + ?Sized>(
    rng: &mut R,
    center: &ProjectivePoint,
    r: f64,
) -> Result<ProjectivePoint> {
    let x = center.vector();
    let xx = center.norm2().abs();
    for _ in 0..MAX_TRIES {
        let w = tangent(rng, center.point())?.mat().column(0).into_owned();
        let ww = center.space().norm2(&w)?.abs();
        if separation(center.space(), &w)? >= MARGIN {
            let v = &x + w * C64::new(r * (xx / ww).sqrt(), 0.0);
            return ProjectivePoint::new(center.space().clone(), v);
        }
    }
    Err(GeometryError::Domain(
        "no non-null direction at the point".into(),
    ))
}

/// Random tangent vector of unit Frobenius norm.
pub fn unit_tangent<R: Rng + ?Sized>(rng: &mut R, base: &GrassPoint) -> Result<TangentVector> {
    for _ in 0..MAX_TRIES {
        let t = tangent(rng, base)?;
        if t.norm() > 1e-6 {
            return t.scaled(C64::new(1.0 / t.norm(), 0.0));
        }
    }
    Err(GeometryError::Domain("tangent space is trivial".into()))
}
