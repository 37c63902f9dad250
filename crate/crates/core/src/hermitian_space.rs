//! Nondegenerate hermitian forms over R or C, subspace frames, complements
//! and the quotient `q⊥/q` of an isotropic subspace.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::linalg::{self, CMat, CVec, C64, RANK_TOL};

/// Scalar field of the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "R"),
            Field::Complex => write!(f, "C"),
        }
    }
}

/// `K^n` equipped with a nondegenerate hermitian form `<u,v> = u^H G v`.
#[derive(Debug, Clone)]
pub struct HermitianSpace {
    field: Field,
    gram: CMat,
    gram_inv: CMat,
    gram_norm: f64,
}

impl PartialEq for HermitianSpace {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.gram == other.gram
    }
}

/// Hermiticity is accepted up to this relative residual, then made exact.
const HERMITIAN_TOL: f64 = 1e-12;

impl HermitianSpace {
    pub fn new(field: Field, gram: CMat) -> Result<Arc<Self>> {
        let n = gram.nrows();
        if n == 0 || gram.ncols() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: "nonempty square gram".into(),
                found: format!("{}x{}", gram.nrows(), gram.ncols()),
            });
        }
        if gram.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(GeometryError::Degenerate("non-finite gram entry".into()));
        }
        let scale = linalg::fro(&gram).max(f64::MIN_POSITIVE);
        let residual = linalg::fro(&(&gram - gram.adjoint())) / scale;
        if residual > HERMITIAN_TOL {
            return Err(GeometryError::NotHermitian { residual });
        }
        let mut gram = linalg::hermitize(&gram);
        if field == Field::Real {
            if gram.iter().any(|z| z.im.abs() > HERMITIAN_TOL * scale) {
                return Err(GeometryError::NotReal);
            }
            gram.iter_mut().for_each(|z| z.im = 0.0);
        }
        let s = linalg::singular_values(&gram);
        let (smax, smin) = (s[0], s[n - 1]);
        if smin <= RANK_TOL * smax {
            return Err(GeometryError::Degenerate(format!(
                "gram is singular (sigma_min/sigma_max = {:e})",
                smin / smax
            )));
        }
        let gram_inv = linalg::inverse(&gram)?;
        Ok(Arc::new(HermitianSpace {
            field,
            gram,
            gram_inv,
            gram_norm: smax,
        }))
    }

    /// Diagonal form with `n_plus` entries `+1` followed by `n_minus` entries `-1`.
    pub fn from_signature(field: Field, n_plus: usize, n_minus: usize) -> Result<Arc<Self>> {
        let diag: Vec<f64> = std::iter::repeat_n(1.0, n_plus)
            .chain(std::iter::repeat_n(-1.0, n_minus))
            .collect();
        Self::new(field, linalg::diag_real(&diag))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMat {
        &self.gram_inv
    }

    /// Spectral norm of the gram matrix; used to scale tolerances.
    pub fn gram_norm(&self) -> f64 {
        self.gram_norm
    }

    pub fn inner(&self, u: &CVec, v: &CVec) -> Result<C64> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        let r = (u.adjoint() * &self.gram * v)[(0, 0)];
        debug_assert!(
            self.field == Field::Complex || !(is_real_vec(u) && is_real_vec(v)) || r.im == 0.0
        );
        Ok(r)
    }

    /// `<u,u>` as a real number.
    pub fn norm2(&self, u: &CVec) -> Result<f64> {
        Ok(self.inner(u, u)?.re)
    }

    /// Matrix of pairings `a^H G b`.
    pub fn pairing(&self, a: &CMat, b: &CMat) -> CMat {
        a.adjoint() * &self.gram * b
    }

    /// The form-adjoint `G^-1 A^H G`, so that `<A* u, v> = <u, A v>`.
    pub fn adjoint_map(&self, a: &CMat) -> Result<CMat> {
        self.check_shape(a)?;
        Ok(&self.gram_inv * a.adjoint() * &self.gram)
    }

    /// Counts of positive and negative eigenvalues of the gram matrix.
    pub fn signature(&self) -> (usize, usize) {
        let (vals, _) = linalg::hermitian_eigen(&self.gram);
        let tol = RANK_TOL * self.gram_norm;
        let plus = vals.iter().filter(|&&v| v > tol).count();
        let minus = vals.iter().filter(|&&v| v < -tol).count();
        // nondegeneracy is a type invariant
        assert_eq!(
            plus + minus,
            self.dim(),
            "internal error: near-zero eigenvalue in a nondegenerate gram"
        );
        (plus, minus)
    }

    /// Basis `P` with `P^H G P = diag(+1,..,+1,-1,..,-1)`.
    pub fn standard_basis(&self) -> CMat {
        let (vals, vecs) = linalg::hermitian_eigen(&self.gram);
        let mut p = vecs;
        for (j, v) in vals.iter().enumerate() {
            let s = 1.0 / v.abs().sqrt();
            p.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        p
    }

    pub fn orthogonal_complement(&self, s: &SubspaceFrame) -> Result<SubspaceFrame> {
        if !same_space(self, s.space()) {
            return Err(GeometryError::AmbientMismatch);
        }
        let n = self.dim();
        if s.dim() == 0 {
            return SubspaceFrame::new(s.space.clone(), CMat::identity(n, n));
        }
        let constraint = s.frame.adjoint() * &self.gram;
        let basis = linalg::null_space(&constraint, None)?;
        SubspaceFrame::new(s.space.clone(), basis)
    }

    /// Quotient `q⊥/q` of a totally isotropic subspace, with an explicit lift.
    pub fn quotient_space(self: &Arc<Self>, q: &SubspaceFrame) -> Result<QuotientSpace> {
        QuotientSpace::new(self, q)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("vector of length {}", self.dim()),
                found: format!("length {len}"),
            });
        }
        Ok(())
    }

    fn check_shape(&self, a: &CMat) -> Result<()> {
        let n = self.dim();
        if a.shape() != (n, n) {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        Ok(())
    }
}

fn is_real_vec(v: &CVec) -> bool {
    v.iter().all(|z| z.im == 0.0)
}

pub fn same_space(a: &HermitianSpace, b: &HermitianSpace) -> bool {
    std::ptr::eq(a, b) || a == b
}

/// A subspace given by an `n x k` frame of full column rank.
#[derive(Debug, Clone)]
pub struct SubspaceFrame {
    space: Arc<HermitianSpace>,
    frame: CMat,
}

impl SubspaceFrame {
    pub fn new(space: Arc<HermitianSpace>, frame: CMat) -> Result<Self> {
        let n = space.dim();
        if frame.nrows() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: format!("{n} rows"),
                found: format!("{} rows", frame.nrows()),
            });
        }
        let mut frame = frame;
        if space.field() == Field::Real
            && frame.iter().any(|z| z.im != 0.0) {
                return Err(GeometryError::WrongField(
                    "complex frame in a real space".into(),
                ));
            }
        let k = frame.ncols();
        if k > 0 {
            let r = linalg::rank(&frame, None)?;
            if r < k {
                return Err(GeometryError::RankDeficient {
                    rank: r,
                    expected: k,
                });
            }
        } else {
            frame = CMat::zeros(n, 0);
        }
        Ok(SubspaceFrame { space, frame })
    }

    pub fn from_columns(space: Arc<HermitianSpace>, cols: &[CVec]) -> Result<Self> {
        let n = space.dim();
        let frame = if cols.is_empty() {
            CMat::zeros(n, 0)
        } else {
            CMat::from_columns(cols)
        };
        Self::new(space, frame)
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        &self.space
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    /// Dimension `k` of the subspace.
    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    /// `F^H G F`.
    pub fn restricted_gram(&self) -> CMat {
        self.space.pairing(&self.frame, &self.frame)
    }

    /// Same subspace under a right action `F -> F g`.
    pub fn reframed(&self, g: &CMat) -> Result<Self> {
        Self::new(self.space.clone(), &self.frame * g)
    }

    /// Image under an ambient linear map `F -> A F`.
    pub fn transformed(&self, a: &CMat) -> Result<Self> {
        Self::new(self.space.clone(), a * &self.frame)
    }

    /// Same column space (all principal angles below `1e-8`).
    pub fn same_span(&self, other: &SubspaceFrame) -> Result<bool> {
        if !same_space(&self.space, &other.space) {
            return Err(GeometryError::AmbientMismatch);
        }
        if self.dim() != other.dim() {
            return Ok(false);
        }
        Ok(linalg::max_principal_sine(&self.frame, &other.frame)? < SPAN_TOL)
    }
}

pub const SPAN_TOL: f64 = 1e-8;

/// `V_q = q⊥/q` realized by a lift `L` (columns in `q⊥`, independent modulo `q`)
/// and its induced nondegenerate form `L^H G L`.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    ambient: Arc<HermitianSpace>,
    q: SubspaceFrame,
    lift: CMat,
    induced: Arc<HermitianSpace>,
}

const ISOTROPY_TOL: f64 = 1e-10;

impl QuotientSpace {
    fn new(ambient: &Arc<HermitianSpace>, q: &SubspaceFrame) -> Result<Self> {
        if !same_space(ambient, q.space()) {
            return Err(GeometryError::AmbientMismatch);
        }
        let n = ambient.dim();
        let d = q.dim();
        if d == 0 {
            return Ok(QuotientSpace {
                ambient: ambient.clone(),
                q: q.clone(),
                lift: CMat::identity(n, n),
                induced: ambient.clone(),
            });
        }
        let qb = linalg::column_basis(q.frame())?;
        let residual = linalg::spectral_norm(&ambient.pairing(&qb, &qb)) / ambient.gram_norm();
        if residual > ISOTROPY_TOL || 2 * d > n {
            return Err(GeometryError::NotIsotropic { residual });
        }
        let q_perp = linalg::null_space(&(qb.adjoint() * ambient.gram()), None)?;
        // euclidean complement of q inside q⊥
        let inside = linalg::null_space(&(qb.adjoint() * &q_perp), None)?;
        let lift = &q_perp * inside;
        debug_assert_eq!(lift.ncols(), n - 2 * d);
        if lift.ncols() == 0 {
            return Ok(QuotientSpace {
                ambient: ambient.clone(),
                q: q.clone(),
                lift,
                induced: Arc::new(HermitianSpace {
                    field: ambient.field(),
                    gram: CMat::zeros(0, 0),
                    gram_inv: CMat::zeros(0, 0),
                    gram_norm: 0.0,
                }),
            });
        }
        let induced = HermitianSpace::new(ambient.field(), ambient.pairing(&lift, &lift))?;
        Ok(QuotientSpace {
            ambient: ambient.clone(),
            q: q.clone(),
            lift,
            induced,
        })
    }

    pub fn ambient(&self) -> &Arc<HermitianSpace> {
        &self.ambient
    }

    pub fn q(&self) -> &SubspaceFrame {
        &self.q
    }

    pub fn lift(&self) -> &CMat {
        &self.lift
    }

    pub fn induced_gram(&self) -> &CMat {
        self.induced.gram()
    }

    /// The quotient as a hermitian space in lift coordinates.
    pub fn space(&self) -> &Arc<HermitianSpace> {
        &self.induced
    }

    /// `n - 2d`.
    pub fn dim(&self) -> usize {
        self.lift.ncols()
    }

    /// Lift coordinates of vectors of `q⊥` (columns), discarding their `q` part.
    pub fn project(&self, vectors: &CMat) -> Result<CMat> {
        let qb = self.q.frame();
        let perp_residual = linalg::spectral_norm(&self.ambient.pairing(qb, vectors));
        let scale = linalg::fro(qb) * linalg::fro(vectors) * self.ambient.gram_norm();
        if perp_residual > 1e-9 * scale.max(f64::MIN_POSITIVE) {
            return Err(GeometryError::Domain("vector not in q⊥".into()));
        }
        let mut basis = CMat::zeros(self.ambient.dim(), self.dim() + self.q.dim());
        basis
            .view_mut((0, 0), self.lift.shape())
            .copy_from(&self.lift);
        basis.view_mut((0, self.dim()), qb.shape()).copy_from(qb);
        let coords = linalg::lstsq(&basis, vectors)?;
        let mut out = coords.rows(0, self.dim()).into_owned();
        if self.ambient.field() == Field::Real {
            out.iter_mut().for_each(|z| z.im = 0.0);
        }
        Ok(out)
    }
}
