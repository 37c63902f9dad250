//! Randomized verification suites. Each trial draws from its own ChaCha8
//! stream (`seed`, stream = suite index · 2³² + trial), so results do not
//! depend on scheduling.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::absolute::{self, AbsolutePoint, ConformalFibre};
use crate::connection;
use crate::error::{GeometryError, Result};
use crate::grassmannian::GrassPoint;
use crate::hermitian_space::{Field, HermitianSpace};
use crate::linalg::{self, CMat, C64};
use crate::projective::{self, ProjectivePoint, TRIANGLE_CHAIN, TRIANGLE_PHASE_SIGN};
use crate::sampling;
use crate::tangent::{self, embed, observe};

/// Diagnostics kept per suite (first failures in trial order).
const MAX_DIAGNOSTICS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    RoundTrip,
    Eq31,
    TrianglePhase,
    ConformalAngles,
    AbsoluteTangency,
    Stratification,
    ProjectorIdentities,
    OracleSelftest,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::RoundTrip,
        Suite::Eq31,
        Suite::TrianglePhase,
        Suite::ConformalAngles,
        Suite::AbsoluteTangency,
        Suite::Stratification,
        Suite::ProjectorIdentities,
        Suite::OracleSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::RoundTrip => "round_trip",
            Suite::Eq31 => "eq31",
            Suite::TrianglePhase => "triangle_phase",
            Suite::ConformalAngles => "conformal_angles",
            Suite::AbsoluteTangency => "absolute_tangency",
            Suite::Stratification => "stratification",
            Suite::ProjectorIdentities => "projector_identities",
            Suite::OracleSelftest => "oracle_selftest",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::RoundTrip => 1e-9,
            Suite::Eq31 => 1e-6,
            Suite::TrianglePhase => 1e-5,
            Suite::ConformalAngles => 1e-8,
            Suite::AbsoluteTangency => 1e-5,
            Suite::Stratification => 1e-8,
            Suite::ProjectorIdentities => 1e-10,
            Suite::OracleSelftest => 1e-6,
        }
    }

    fn index(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64
    }

    /// Why the suite cannot run on this space, if it cannot.
    pub fn inapplicable(self, space: &HermitianSpace) -> Option<String> {
        let (p, m) = space.signature();
        let n = p + m;
        match self {
            Suite::RoundTrip | Suite::ProjectorIdentities if n < 2 => {
                Some("needs dimension at least 2".into())
            }
            Suite::Eq31 | Suite::OracleSelftest if riemannian_sign(space).is_none() => Some(
                format!("no riemannian piece of P(V) in signature ({p},{m})"),
            ),
            Suite::TrianglePhase if space.field() != Field::Complex => {
                Some("needs a complex space".into())
            }
            Suite::TrianglePhase if n < 2 => Some("needs dimension at least 2".into()),
            Suite::ConformalAngles if m != 1 || p < 2 => {
                Some(format!("needs signature (n−1,1), got ({p},{m})"))
            }
            Suite::AbsoluteTangency if p == 0 || m == 0 => Some("needs an indefinite form".into()),
            Suite::AbsoluteTangency if n < 3 => Some("needs dimension at least 3".into()),
            _ => None,
        }
    }

    fn trial(self, space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
        match self {
            Suite::RoundTrip => round_trip_trial(space, rng),
            Suite::Eq31 => eq31_trial(space, rng),
            Suite::TrianglePhase => triangle_trial(space, rng),
            Suite::ConformalAngles => conformal_trial(space, rng),
            Suite::AbsoluteTangency => tangency_trial(space, rng),
            Suite::Stratification => stratification_trial(space, rng),
            Suite::ProjectorIdentities => identities_trial(space, rng),
            Suite::OracleSelftest => oracle_trial(space, rng),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub wall_time_ms: f64,
    pub diagnostics: Vec<String>,
}

/// Runs `trials` independent trials of `suite` in parallel.
pub fn run_suite(
    suite: Suite,
    space: &Arc<HermitianSpace>,
    seed: u64,
    trials: usize,
    tolerance: f64,
) -> SuiteReport {
    let start = Instant::now();
    let mut report = SuiteReport {
        name: suite.name().into(),
        trials,
        failures: 0,
        max_residual: 0.0,
        tolerance,
        wall_time_ms: 0.0,
        diagnostics: Vec::new(),
    };
    if let Some(reason) = suite.inapplicable(space) {
        report.failures = trials.max(1);
        report.diagnostics.push(format!("inapplicable: {reason}"));
        report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        return report;
    }
    let outcomes: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((suite.index() << 32) | i as u64);
            suite.trial(space, &mut rng)
        })
        .collect();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let failure = match outcome {
            Ok(r) if r.is_finite() => {
                report.max_residual = report.max_residual.max(r);
                (r > tolerance).then(|| format!("trial {i}: residual {r:e} exceeds {tolerance:e}"))
            }
            Ok(r) => Some(format!("trial {i}: non-finite residual {r}")),
            Err(e) => Some(format!("trial {i}: {e}")),
        };
        if let Some(msg) = failure {
            report.failures += 1;
            if report.diagnostics.len() < MAX_DIAGNOSTICS {
                report.diagnostics.push(msg);
            }
        }
    }
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// Sign of `<p,p>` for which `p⊥` is definite, if any.
pub fn riemannian_sign(space: &HermitianSpace) -> Option<f64> {
    match space.signature() {
        (_, 0) => Some(1.0),
        (0, _) => Some(-1.0),
        (_, 1) => Some(-1.0),
        (1, _) => Some(1.0),
        _ => None,
    }
}

fn random_sign(space: &HermitianSpace, rng: &mut ChaCha8Rng) -> f64 {
    match space.signature() {
        (_, 0) => 1.0,
        (0, _) => -1.0,
        _ => {
            if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Same-piece pair `(t at p1, p2)` with `p2` at chart radius in `[lo, hi]`.
fn projective_pair(
    space: &Arc<HermitianSpace>,
    rng: &mut ChaCha8Rng,
    sign: f64,
    lo: f64,
    hi: f64,
) -> Result<(ProjectivePoint, ProjectivePoint)> {
    let p1 = sampling::projective_point(rng, space, sign)?;
    let r = rng.random_range(lo..hi);
    let p2 = sampling::point_at_radius(rng, &p1, r)?;
    Ok((p1, p2))
}

fn round_trip_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let sign = random_sign(space, rng);
    let (p1, p2) = projective_pair(space, rng, sign, 0.05, 0.9)?;
    let t = sampling::unit_tangent(rng, p1.point())?;
    round_trip_residual(&t, &p2)
}

/// `|round_trip(t) − (ta² h + ta v)| / (|t| max(1, ta²))`.
pub fn round_trip_residual(t: &tangent::TangentVector, p2: &ProjectivePoint) -> Result<f64> {
    let p1 = ProjectivePoint::from_point(t.base().clone())?;
    let ta = projective::tance(&p1, p2)?;
    let hv = projective::hv_decompose(t, p2)?;
    let expected = hv
        .horizontal
        .scaled(C64::new(ta * ta, 0.0))?
        .add(&hv.vertical.scaled(C64::new(ta, 0.0))?)?;
    let got = projective::round_trip(t, p2)?;
    Ok(got.distance(&expected)? / (t.norm() * ta.powi(2).max(1.0)))
}

/// Chart-radius range for the second point of a riemannian pair.
fn riemannian_radius(space: &HermitianSpace) -> (f64, f64) {
    match space.signature() {
        (_, 0) | (0, _) => (0.1, 2.0),
        _ => (0.1, 0.8),
    }
}

fn eq31_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let sign = riemannian_sign(space)
        .ok_or_else(|| GeometryError::WrongSignature("no riemannian piece".into()))?;
    let (lo, hi) = riemannian_radius(space);
    let (p1, p2) = projective_pair(space, rng, sign, lo, hi)?;
    let t1 = sampling::unit_tangent(rng, p1.point())?;
    let t2 = sampling::unit_tangent(rng, p2.point())?;
    Ok(projective::verify_31(&t1, &t2)?.residual)
}

fn triangle_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (t, p2, p3) = match sampling::definite_line(rng, space) {
        Ok((frame, sign)) => sampling::line_triangle(rng, space, &frame, sign, 1.0)?,
        Err(_) => {
            let frame = sampling::lorentzian_line(rng, space)?;
            let sign = random_sign(space, rng);
            sampling::line_triangle(rng, space, &frame, sign, 0.5)?
        }
    };
    triangle_residual(&t, &p2, &p3)
}

/// `|t′ − closed form| / max(|t|, |closed form|)` for the frozen convention.
pub fn triangle_residual(
    t: &tangent::TangentVector,
    p2: &ProjectivePoint,
    p3: &ProjectivePoint,
) -> Result<f64> {
    let chain = projective::triangle_trip(t, p2, p3, TRIANGLE_CHAIN)?;
    let closed = projective::triangle_closed_form(t, p2, p3, TRIANGLE_PHASE_SIGN)?;
    Ok(chain.distance(&closed)? / t.norm().max(closed.norm()))
}

/// Random isotropic line.
pub fn random_absolute_point(
    space: &Arc<HermitianSpace>,
    rng: &mut ChaCha8Rng,
) -> Result<AbsolutePoint> {
    let q = sampling::isotropic(rng, space, 1)?;
    AbsolutePoint::new(space.clone(), q.frame().column(0).into_owned())
}

fn conformal_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let q = random_absolute_point(space, rng)?;
    let fibre = ConformalFibre::new(&q)?;
    let fs = fibre.space().clone();
    let p = GrassPoint::from_vector(fs.clone(), sampling::vector(rng, fs.field(), fs.dim()))?;
    let p2 = GrassPoint::from_vector(fs.clone(), sampling::vector(rng, fs.field(), fs.dim()))?;
    let (d, a) = match space.field() {
        Field::Real => absolute::fibre_angle_check(&fibre, &p, &p2)?,
        Field::Complex => absolute::fubini_study_fibre_check(&fibre, &p, &p2)?,
    };
    Ok((d - a).abs())
}

/// A random `t(q)`; half of the draws are projected onto the tangency condition.
pub fn random_tangent_image(q: &AbsolutePoint, rng: &mut ChaCha8Rng) -> crate::linalg::CVec {
    let space = q.space();
    let w = sampling::vector(rng, space.field(), space.dim());
    if rng.random::<bool>() {
        let u = absolute::default_reference(q);
        let c = space.inner(&w, q.unit()).expect("same space").re;
        w - u * C64::new(c, 0.0)
    } else {
        w
    }
}

fn tangency_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let q = random_absolute_point(space, rng)?;
    let tq = random_tangent_image(&q, rng);
    let a = absolute::tangency_defect(&q, &tq)?;
    let f = absolute::fd_defect(&q, &tq, None)?;
    if absolute::outside_band(a) && (a < absolute::TANGENCY_TOL) != (f < absolute::TANGENCY_TOL) {
        return Err(GeometryError::Domain(format!(
            "analytic defect {a:e} and level-set defect {f:e} disagree"
        )));
    }
    let n = space.dim();
    let counts = absolute::dimension_counts(&q)?;
    match space.field() {
        Field::Real if counts.tangent_real != n - 2 => {
            return Err(GeometryError::Domain(format!(
                "tangent dimension {} ≠ {}",
                counts.tangent_real,
                n - 2
            )));
        }
        Field::Complex => {
            if counts.tangent_real != 2 * n - 3 || counts.cr_complex != Some(n - 2) {
                return Err(GeometryError::Domain(format!(
                    "dimension counts {counts:?} for n = {n}"
                )));
            }
            if absolute::cr_check(&q, &tq)? && !absolute::absolute_tangent_check(&q, &tq)? {
                return Err(GeometryError::Domain("CR direction not tangent".into()));
            }
            let c = absolute::contact_direction(&q)?;
            if absolute::cr_check(&q, &c)? || !absolute::absolute_tangent_check(&q, &c)? {
                return Err(GeometryError::Domain(
                    "contact direction misclassified".into(),
                ));
            }
        }
        _ => {}
    }
    Ok((a - f).abs())
}

/// Random `(k, d)` with `d ≤ min(k, n−k, n₊, n₋)`.
pub fn random_shape(space: &HermitianSpace, rng: &mut ChaCha8Rng) -> (usize, usize) {
    let (p, m) = space.signature();
    let n = p + m;
    let k = rng.random_range(1..=n.min(3));
    let dmax = k.min(n - k).min(p).min(m);
    (k, rng.random_range(0..=dmax))
}

/// Residual of the stratification invariants for one point.
pub fn stratification_residual(p: &GrassPoint, g: &CMat) -> Result<f64> {
    let space = p.space();
    let d = p.degeneracy();
    let q = p.pi_d()?;
    let mut worst = 0.0f64;
    if d > 0 {
        worst = linalg::spectral_norm(&space.pairing(q.frame(), q.frame())) / space.gram_norm();
    }
    let fibre = p.fibre_identify()?;
    if fibre.quotient.dim() != space.dim() - 2 * d {
        return Err(GeometryError::Domain(format!(
            "dim V_q = {} for d = {d}",
            fibre.quotient.dim()
        )));
    }
    if !fibre.point.is_nondegenerate() || fibre.point.k() != p.k() - d {
        return Err(GeometryError::Domain(
            "fibre image is degenerate or has the wrong dimension".into(),
        ));
    }
    let moved = p.transformed(g)?;
    if moved.degeneracy() != d || moved.stratum_signature() != p.stratum_signature() {
        return Err(GeometryError::Domain(
            "stratum not preserved by an isometry".into(),
        ));
    }
    if d > 0 {
        let lhs = moved.pi_d()?;
        let rhs = q.transformed(g)?;
        worst = worst.max(linalg::max_principal_sine(lhs.frame(), rhs.frame())?);
    }
    Ok(worst)
}

fn stratification_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let (k, d) = random_shape(space, rng);
    let p = sampling::point(rng, space, k, d)?;
    if p.degeneracy() != d {
        return Err(GeometryError::Domain(format!(
            "sampled degeneracy {} instead of {d}",
            p.degeneracy()
        )));
    }
    let g = sampling::form_preserving(rng, space, 0.5);
    stratification_residual(&p, &g)
}

/// Worst relative residual of the tangent-calculus identities at one point.
pub fn identities_residual(
    t1: &tangent::TangentVector,
    t2: &tangent::TangentVector,
    alpha: C64,
) -> Result<f64> {
    let p = t1.base();
    let space = p.space();
    let pr = tangent::projectors(p)?;
    let n = space.dim();
    let scale = linalg::spectral_norm(&pr.onto_p).max(1.0);
    let mut worst = 0.0f64;
    worst = worst.max(linalg::fro(&(&pr.onto_p * &pr.onto_p - &pr.onto_p)) / scale.powi(2));
    worst = worst.max(linalg::fro(&(&pr.onto_p + &pr.onto_perp - CMat::identity(n, n))) / scale);
    worst = worst.max(
        linalg::fro(&(space.adjoint_map(&pr.onto_p)? - &pr.onto_p))
            / (scale * space.gram_norm() * linalg::spectral_norm(space.gram_inv())),
    );
    let back = observe(&embed(t1)?, p)?;
    worst = worst.max(back.distance(t1)? / t1.norm().max(f64::MIN_POSITIVE));
    let m12 = tangent::metric(t1, t2)?;
    let m21 = tangent::metric(t2, t1)?;
    let mscale = (t1.norm()
        * t2.norm()
        * space.gram_norm()
        * linalg::spectral_norm(&linalg::inverse(&p.restricted_gram())?))
    .max(f64::MIN_POSITIVE);
    worst = worst.max((m12 - m21.conj()).norm() / mscale);
    let coeffs = tangent::char_coefficients(t1, t2)?;
    worst = worst.max((coeffs[0] + m12).norm() / mscale);
    match (
        tangent::geodesic_invariant(t1),
        tangent::geodesic_invariant(&t1.scaled(alpha)?),
    ) {
        (Ok(a), Ok(b)) => {
            // det/tr^k loses (|t|²|G||S⁻¹| / |tr|)^k digits near null directions
            let tr = tangent::metric(t1, t1)?.norm();
            let s1 = t1.norm().powi(2)
                * space.gram_norm()
                * linalg::spectral_norm(&linalg::inverse(&p.restricted_gram())?);
            let cond = (s1 / tr).max(1.0).powi(p.k() as i32);
            worst = worst.max((a - b).norm() / a.norm().max(1.0) / cond)
        }
        (Err(GeometryError::NullDirection), Err(GeometryError::NullDirection)) => {}
        (Err(e), _) | (_, Err(e)) => return Err(e),
    }
    Ok(worst)
}

fn identities_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n = space.dim();
    let k = rng.random_range(1..=(n - 1).min(3));
    let p = sampling::point(rng, space, k, 0)?;
    let t1 = sampling::unit_tangent(rng, &p)?;
    let t2 = sampling::unit_tangent(rng, &p)?;
    let alpha = sampling::scalar(rng, space.field()) + C64::new(0.5, 0.0);
    identities_residual(&t1, &t2, alpha)
}

/// `max(energy drift, norm drift, forward-backward error)` on one geodesic.
pub fn oracle_residual(
    p1: &ProjectivePoint,
    p2: &ProjectivePoint,
    t: &tangent::TangentVector,
) -> Result<f64> {
    let curve = connection::geodesic_connect(p1.point(), p2.point())?;
    let drift = curve.energy_drift()?;
    let moved = connection::transport(t, &curve)?;
    let before = tangent::metric(t, t)?.re;
    let after = tangent::metric(&moved, &moved)?.re;
    let norm_drift = (after - before).abs() / before.abs().max(f64::MIN_POSITIVE);
    let back = connection::transport(&moved, &curve.reversed())?;
    let round = back.distance(t)? / t.norm();
    Ok(drift.max(norm_drift).max(round))
}

fn oracle_trial(space: &Arc<HermitianSpace>, rng: &mut ChaCha8Rng) -> Result<f64> {
    let sign = riemannian_sign(space)
        .ok_or_else(|| GeometryError::WrongSignature("no riemannian piece".into()))?;
    let (lo, hi) = riemannian_radius(space);
    let (p1, p2) = projective_pair(space, rng, sign, lo, hi)?;
    let t = sampling::unit_tangent(rng, p1.point())?;
    oracle_residual(&p1, &p2, &t)
}
