//! Tangent calculus of grassmannians of nondegenerate hermitian forms.
//!
//! The crate works with `V = K^n` (`K = R` or `C`) carrying a nondegenerate
//! hermitian form. It provides
//!
//! * [`hermitian_space`]: forms, adjoints, complements, quotients `q⊥/q`;
//! * [`grassmannian`]: points of `Gr(k,V)`, stratification and `π_d`;
//! * [`tangent`]: tangent and footless vectors, observation, `t₁*t₂`;
//! * [`projective`]: the `k = 1` geometry (tance, round trips, triangles);
//! * [`connection`]: a finite-difference Levi-Civita oracle on charts;
//! * [`absolute`]: tangency to the absolute and its conformal structure;
//! * [`cli`]: scenario files, verification suites and reports.

pub mod absolute;
pub mod cli;
pub mod connection;
pub mod error;
pub mod grassmannian;
pub mod hermitian_space;
pub mod linalg;
pub mod projective;
pub mod sampling;
pub mod tangent;

pub use error::{GeometryError, Result};
pub use grassmannian::{FibrePoint, GrassPoint, StratumSignature};
pub use hermitian_space::{Field, HermitianSpace, QuotientSpace, SubspaceFrame};
pub use linalg::{CMat, CVec, C64};
pub use tangent::{FootlessVector, ProjectorPair, TangentVector};
