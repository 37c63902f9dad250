//! Points of `Gr(k, V)`, their stratification by `dim(p ∩ p⊥)`, the bundle
//! `π_d : p ↦ p ∩ p⊥` and the identification of its fibres with
//! nondegenerate grassmannians of `V_q`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::hermitian_space::{same_space, HermitianSpace, QuotientSpace, SubspaceFrame};
use crate::linalg::{self, CMat, CVec, AMBIGUITY_FACTOR, RANK_TOL};

/// A `k`-dimensional subspace, represented by any frame of it.
#[derive(Debug, Clone)]
pub struct GrassPoint {
    frame: SubspaceFrame,
    degeneracy: usize,
    n_plus: usize,
    n_minus: usize,
    /// Orthonormal frame of `p ∩ p⊥`.
    kernel: CMat,
    /// Euclidean-orthonormal eigenvectors of the nonzero part of the restricted form.
    regular: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSignature {
    pub degeneracy: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl GrassPoint {
    pub fn new(space: Arc<HermitianSpace>, frame: CMat) -> Result<Self> {
        Self::from_frame(SubspaceFrame::new(space, frame)?)
    }

    pub fn from_vector(space: Arc<HermitianSpace>, v: CVec) -> Result<Self> {
        let n = v.len();
        Self::new(space, CMat::from_column_slice(n, 1, v.as_slice()))
    }

    pub fn from_frame(frame: SubspaceFrame) -> Result<Self> {
        let space = frame.space().clone();
        let n = space.dim();
        let k = frame.dim();
        if k == 0 {
            return Ok(GrassPoint {
                frame,
                degeneracy: 0,
                n_plus: 0,
                n_minus: 0,
                kernel: CMat::zeros(n, 0),
                regular: CMat::zeros(n, 0),
            });
        }
        // classify on a euclidean-orthonormal frame so thresholds are scale free
        let q = linalg::column_basis(frame.frame())?;
        let (vals, vecs) = linalg::hermitian_eigen(&space.pairing(&q, &q));
        let lo = RANK_TOL * space.gram_norm();
        let hi = AMBIGUITY_FACTOR * lo;
        let (mut kernel, mut regular) = (Vec::new(), Vec::new());
        let (mut n_plus, mut n_minus) = (0, 0);
        for (i, &v) in vals.iter().enumerate() {
            let col = &q * vecs.column(i);
            if v.abs() <= lo {
                kernel.push(col);
            } else if v.abs() <= hi {
                return Err(GeometryError::NearStratumBoundary {
                    value: v.abs() / space.gram_norm(),
                });
            } else {
                if v > 0.0 {
                    n_plus += 1;
                } else {
                    n_minus += 1;
                }
                regular.push(col);
            }
        }
        let cols = |v: Vec<CVec>| {
            if v.is_empty() {
                CMat::zeros(n, 0)
            } else {
                CMat::from_columns(&v)
            }
        };
        Ok(GrassPoint {
            frame,
            degeneracy: kernel.len(),
            n_plus,
            n_minus,
            kernel: cols(kernel),
            regular: cols(regular),
        })
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        self.frame.space()
    }

    pub fn subspace(&self) -> &SubspaceFrame {
        &self.frame
    }

    pub fn frame(&self) -> &CMat {
        self.frame.frame()
    }

    pub fn k(&self) -> usize {
        self.frame.dim()
    }

    pub fn restricted_gram(&self) -> CMat {
        self.frame.restricted_gram()
    }

    /// `dim(p ∩ p⊥)`.
    pub fn degeneracy(&self) -> usize {
        self.degeneracy
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy == 0
    }

    /// `(d, n₊, n₋)`: degeneracy plus the signature of the nondegenerate part;
    /// classifies the orbit of `p` under the isometry group.
    pub fn stratum_signature(&self) -> StratumSignature {
        StratumSignature {
            degeneracy: self.degeneracy,
            n_plus: self.n_plus,
            n_minus: self.n_minus,
        }
    }

    /// Column-space equality modulo the right `GL_k` action.
    pub fn equal_points(&self, other: &GrassPoint) -> Result<bool> {
        if !same_space(self.space(), other.space()) {
            return Err(GeometryError::AmbientMismatch);
        }
        if self.k() != other.k() {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("k = {}", self.k()),
                found: format!("k = {}", other.k()),
            });
        }
        self.frame.same_span(&other.frame)
    }

    /// `π_d(p) = p ∩ p⊥`, a totally isotropic point of dimension `d`.
    pub fn pi_d(&self) -> Result<GrassPoint> {
        let space = self.space().clone();
        let kernel = SubspaceFrame::new(space, self.kernel.clone())?;
        Ok(GrassPoint {
            frame: kernel,
            degeneracy: self.degeneracy,
            n_plus: 0,
            n_minus: 0,
            kernel: self.kernel.clone(),
            regular: CMat::zeros(self.space().dim(), 0),
        })
    }

    /// `p ↦ p/q` inside `V_q`, where `q = π_d(p)`.
    pub fn fibre_identify(&self) -> Result<FibrePoint> {
        let q = self.pi_d()?;
        let quotient = self.space().quotient_space(q.subspace())?;
        let coords = quotient.project(&self.regular)?;
        let point = GrassPoint::new(quotient.space().clone(), coords)?;
        if !point.is_nondegenerate() {
            return Err(GeometryError::Degenerate(
                "fibre image is degenerate".into(),
            ));
        }
        Ok(FibrePoint { quotient, point })
    }

    /// `g·p` for an ambient linear map `g`.
    pub fn transformed(&self, g: &CMat) -> Result<GrassPoint> {
        GrassPoint::from_frame(self.frame.transformed(g)?)
    }

    /// The same point with frame `F g`.
    pub fn reframed(&self, g: &CMat) -> Result<GrassPoint> {
        GrassPoint::from_frame(self.frame.reframed(g)?)
    }
}

/// A point of `Gr⁰(k−d, V_q)` together with the quotient it lives in.
#[derive(Debug, Clone)]
pub struct FibrePoint {
    pub quotient: QuotientSpace,
    pub point: GrassPoint,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian_space::Field;
    use crate::linalg::real_mat;

    fn sig21() -> Arc<HermitianSpace> {
        HermitianSpace::from_signature(Field::Real, 2, 1).unwrap()
    }

    fn pt(rows: &[&[f64]]) -> GrassPoint {
        GrassPoint::new(sig21(), real_mat(rows)).unwrap()
    }

    #[test]
    fn equal_points_examples() {
        let p = pt(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 2.0]]);
        let g = real_mat(&[&[2.0, 1.0], &[-1.0, 3.0]]);
        assert!(p.equal_points(&p.reframed(&g).unwrap()).unwrap());
        assert!(!pt(&[&[1.0], &[0.0], &[0.0]])
            .equal_points(&pt(&[&[0.0], &[1.0], &[0.0]]))
            .unwrap());
        assert!(pt(&[&[1.0], &[1.0], &[0.0]])
            .equal_points(&pt(&[&[2.0], &[2.0], &[0.0]]))
            .unwrap());
        let other = HermitianSpace::from_signature(Field::Real, 3, 0).unwrap();
        let o = GrassPoint::new(other, real_mat(&[&[1.0], &[0.0], &[0.0]])).unwrap();
        assert!(matches!(
            o.equal_points(&pt(&[&[1.0], &[0.0], &[0.0]])),
            Err(GeometryError::AmbientMismatch)
        ));
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(pt(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]).degeneracy(), 0);
        assert_eq!(pt(&[&[0.0], &[1.0], &[1.0]]).degeneracy(), 1);
        assert_eq!(pt(&[&[0.0, 1.0], &[1.0, 0.0], &[1.0, 0.0]]).degeneracy(), 1);
    }

    #[test]
    fn ambiguous_band_is_rejected() {
        // <v,v>/|v|^2 = 2e-10 lands inside the refused band
        let eps: f64 = 1e-10;
        let v = real_mat(&[&[0.0], &[1.0], &[(1.0 - 4.0 * eps).sqrt()]]);
        let r = GrassPoint::new(sig21(), v);
        assert!(
            matches!(r, Err(GeometryError::NearStratumBoundary { .. })),
            "{r:?}"
        );
    }

    #[test]
    fn pi_d_examples() {
        let p = pt(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(p.pi_d().unwrap().k(), 0);
        let l = pt(&[&[0.0], &[1.0], &[1.0]]);
        assert!(l.pi_d().unwrap().equal_points(&l).unwrap());
        let p = pt(&[&[0.0, 1.0], &[1.0, 0.0], &[1.0, 0.0]]);
        assert!(p.pi_d().unwrap().equal_points(&l).unwrap());
    }

    #[test]
    fn fibre_identify_examples() {
        let p = pt(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]);
        let f = p.fibre_identify().unwrap();
        assert_eq!(f.quotient.dim(), 3);
        assert!(f
            .point
            .equal_points(&GrassPoint::from_frame(p.subspace().clone()).unwrap())
            .unwrap());

        let p = pt(&[&[0.0, 1.0], &[1.0, 0.0], &[1.0, 0.0]]);
        let f = p.fibre_identify().unwrap();
        assert_eq!(f.quotient.dim(), 1);
        assert_eq!(f.point.k(), 1);
        assert_eq!(
            f.point.stratum_signature(),
            StratumSignature {
                degeneracy: 0,
                n_plus: 1,
                n_minus: 0
            }
        );

        let iso = pt(&[&[0.0], &[1.0], &[1.0]]);
        let f = iso.fibre_identify().unwrap();
        assert_eq!(f.point.k(), 0);
    }

    #[test]
    fn stratum_signature_examples() {
        let s = |d, a, b| StratumSignature {
            degeneracy: d,
            n_plus: a,
            n_minus: b,
        };
        assert_eq!(
            pt(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]]).stratum_signature(),
            s(0, 2, 0)
        );
        assert_eq!(
            pt(&[&[0.0], &[0.0], &[1.0]]).stratum_signature(),
            s(0, 0, 1)
        );
        assert_eq!(
            pt(&[&[0.0, 1.0], &[1.0, 0.0], &[1.0, 0.0]]).stratum_signature(),
            s(1, 1, 0)
        );
    }
}
