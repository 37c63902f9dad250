//! Tangent vectors `t : p → p⊥`, footless vectors (endomorphisms of the
//! ambient or quotient space), observation through the orthogonal
//! projectors, and the product `t₁* t₂` with the invariants built from it.

use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::grassmannian::GrassPoint;
use crate::hermitian_space::{same_space, Field, HermitianSpace};
use crate::linalg::{self, CMat, C64};

const RANGE_TOL: f64 = 1e-10;

pub(crate) fn clean(field: Field, mut m: CMat) -> CMat {
    if field == Field::Real {
        m.iter_mut().for_each(|z| z.im = 0.0);
    }
    m
}

/// Coordinate map `R = (F^H G F)^-1 F^H G`, so that `R F = I` and `F R = π'[p]`.
pub(crate) fn coordinate_map(p: &GrassPoint) -> Result<CMat> {
    let g = p.space().gram();
    let s_inv = linalg::inverse(&p.restricted_gram())?;
    Ok(s_inv * p.frame().adjoint() * g)
}

/// A linear map `p → p⊥` stored as the `n x k` matrix of images of the frame columns.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: GrassPoint,
    mat: CMat,
}

impl TangentVector {
    pub fn new(base: GrassPoint, mat: CMat) -> Result<Self> {
        if !base.is_nondegenerate() {
            return Err(GeometryError::Degenerate(
                "tangent vectors need a nondegenerate base".into(),
            ));
        }
        let (n, k) = (base.space().dim(), base.k());
        if mat.shape() != (n, k) {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("{n}x{k}"),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        if base.space().field() == Field::Real && mat.iter().any(|z| z.im != 0.0) {
            return Err(GeometryError::WrongField(
                "complex tangent matrix in a real space".into(),
            ));
        }
        let scale = linalg::fro(base.frame()) * linalg::fro(&mat) * base.space().gram_norm();
        let residual = linalg::fro(&base.space().pairing(base.frame(), &mat));
        if residual > RANGE_TOL * scale {
            return Err(GeometryError::NotTangent {
                residual: residual / scale,
            });
        }
        Ok(TangentVector { base, mat })
    }

    /// Projects an arbitrary `n x k` matrix onto `p⊥` along `p`.
    pub fn projected(base: GrassPoint, mat: &CMat) -> Result<Self> {
        let pr = projectors(&base)?;
        let m = clean(base.space().field(), &pr.onto_perp * mat);
        Self::new(base, m)
    }

    pub fn zero(base: GrassPoint) -> Result<Self> {
        let (n, k) = (base.space().dim(), base.k());
        Self::new(base, CMat::zeros(n, k))
    }

    pub fn base(&self) -> &GrassPoint {
        &self.base
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        self.base.space()
    }

    /// Frame `F -> F g` together with `T -> T g`; the underlying map is unchanged.
    pub fn reframed(&self, g: &CMat) -> Result<Self> {
        let base = self.base.reframed(g)?;
        Ok(TangentVector {
            base,
            mat: &self.mat * g,
        })
    }

    /// The same map expressed against another frame of the same base point.
    pub fn in_frame_of(&self, point: &GrassPoint) -> Result<Self> {
        if !self.base.equal_points(point)? {
            return Err(GeometryError::Domain(
                "target frame spans a different subspace".into(),
            ));
        }
        let g = clean(
            self.space().field(),
            linalg::lstsq(self.base.frame(), point.frame())?,
        );
        Ok(TangentVector {
            base: point.clone(),
            mat: clean(self.space().field(), &self.mat * g),
        })
    }

    /// Push-forward by an ambient map `g` (frame and images move together).
    pub fn transformed(&self, g: &CMat) -> Result<Self> {
        let base = self.base.transformed(g)?;
        TangentVector::new(base, g * &self.mat)
    }

    pub fn scaled(&self, s: C64) -> Result<Self> {
        TangentVector::new(self.base.clone(), self.mat.map(|z| z * s))
    }

    pub fn add(&self, other: &TangentVector) -> Result<Self> {
        let o = other.in_frame_of(&self.base)?;
        // projected, so that near-cancellation leaves a valid (tiny) vector
        TangentVector::projected(self.base.clone(), &(&self.mat + o.mat))
    }

    pub fn sub(&self, other: &TangentVector) -> Result<Self> {
        self.add(&other.scaled(C64::new(-1.0, 0.0))?)
    }

    /// Frobenius distance of the matrices after expressing `other` in this frame.
    pub fn distance(&self, other: &TangentVector) -> Result<f64> {
        let o = other.in_frame_of(&self.base)?;
        Ok(linalg::fro(&(&self.mat - o.mat)))
    }

    pub fn norm(&self) -> f64 {
        linalg::fro(&self.mat)
    }
}

/// An endomorphism of `V` (or of a quotient `V_q`) not anchored at any point.
#[derive(Debug, Clone)]
pub struct FootlessVector {
    space: Arc<HermitianSpace>,
    mat: CMat,
}

impl FootlessVector {
    pub fn new(space: Arc<HermitianSpace>, mat: CMat) -> Result<Self> {
        let n = space.dim();
        if mat.shape() != (n, n) {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", mat.nrows(), mat.ncols()),
            });
        }
        Ok(FootlessVector { space, mat })
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        &self.space
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }
}

/// `π'[p]` (onto `p` along `p⊥`) and `π[p]` (onto `p⊥` along `p`).
#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub onto_p: CMat,
    pub onto_perp: CMat,
}

pub fn projectors(p: &GrassPoint) -> Result<ProjectorPair> {
    if !p.is_nondegenerate() {
        return Err(GeometryError::Degenerate(
            "projectors need a nondegenerate point".into(),
        ));
    }
    let n = p.space().dim();
    let field = p.space().field();
    let onto_p = clean(field, p.frame() * coordinate_map(p)?);
    let onto_perp = CMat::identity(n, n) - &onto_p;
    Ok(ProjectorPair { onto_p, onto_perp })
}

/// `t_{p₀} = π[p₀] t π'[p₀]`, restricted to `p₀`.
pub fn observe(t: &FootlessVector, p0: &GrassPoint) -> Result<TangentVector> {
    if !same_space(t.space(), p0.space()) {
        return Err(GeometryError::AmbientMismatch);
    }
    let pr = projectors(p0)?;
    let mat = clean(p0.space().field(), &pr.onto_perp * t.mat() * p0.frame());
    TangentVector::new(p0.clone(), mat)
}

/// Extension by zero on `p⊥`: the endomorphism `T R`.
pub fn embed(t: &TangentVector) -> Result<FootlessVector> {
    let r = coordinate_map(t.base())?;
    let mat = clean(t.space().field(), t.mat() * r);
    FootlessVector::new(t.space().clone(), mat)
}

/// Matrix of `t₁* ∘ t₂` compressed to the base of `t₂`, in its frame coordinates.
///
/// Both vectors are extended by zero to endomorphisms of the ambient space,
/// so distinct base points are allowed; the trace is that of `t₁* t₂` on `V`.
pub fn product(t1: &TangentVector, t2: &TangentVector) -> Result<CMat> {
    if !same_space(t1.space(), t2.space()) {
        return Err(GeometryError::AmbientMismatch);
    }
    let g = t1.space().gram();
    let r2 = coordinate_map(t2.base())?;
    let s1_inv = linalg::inverse(&t1.base().restricted_gram())?;
    // t₁* = F₁ S₁⁻¹ T₁^H G as an endomorphism of V
    let p = r2 * t1.base().frame() * s1_inv * t1.mat().adjoint() * g * t2.mat();
    Ok(clean(t1.space().field(), p))
}

/// The hermitian metric `tr(t₁* t₂)`.
pub fn metric(t1: &TangentVector, t2: &TangentVector) -> Result<C64> {
    Ok(linalg::trace(&product(t1, t2)?))
}

/// The `k` nontrivial coefficients of `char(t₁* t₂)`, from degree `k−1` down to 0.
pub fn char_coefficients(t1: &TangentVector, t2: &TangentVector) -> Result<Vec<C64>> {
    if !t1.base().equal_points(t2.base())? {
        return Err(GeometryError::Domain(
            "characteristic coefficients need a common base point".into(),
        ));
    }
    let p = product(t1, t2)?;
    Ok(charpoly_tail(&p))
}

/// Newton's identities on the power traces `tr(P^j)`.
fn charpoly_tail(p: &CMat) -> Vec<C64> {
    let k = p.nrows();
    let mut power_traces = Vec::with_capacity(k);
    let mut pow = CMat::identity(k, k);
    for _ in 0..k {
        pow = &pow * p;
        power_traces.push(linalg::trace(&pow));
    }
    // elementary symmetric e_0..e_k
    let mut e = vec![C64::new(1.0, 0.0)];
    for j in 1..=k {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[j - i] * power_traces[i - 1] * sign;
        }
        e.push(acc / j as f64);
    }
    (1..=k)
        .map(|j| if j % 2 == 1 { -e[j] } else { e[j] })
        .collect()
}

/// `det(t*t) / tr(t*t)^k`.
pub fn geodesic_invariant(t: &TangentVector) -> Result<C64> {
    let p = product(t, t)?;
    let tr = linalg::trace(&p);
    let s_inv = linalg::inverse(&t.base().restricted_gram())?;
    let scale = t.norm().powi(2) * t.space().gram_norm() * linalg::spectral_norm(&s_inv);
    if tr.norm() <= 1e-12 * scale || scale == 0.0 {
        return Err(GeometryError::NullDirection);
    }
    let det = if p.nrows() == 0 {
        C64::new(1.0, 0.0)
    } else {
        p.determinant()
    };
    Ok(det / tr.powu(p.nrows() as u32))
}
