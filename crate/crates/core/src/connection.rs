//! Independent Levi-Civita oracle: the pulled-back metric `Re tr(t₁*t₂)` in an
//! affine chart, finite-difference Christoffel symbols, RK4 geodesics found
//! by shooting, and parallel transport along a discretized curve.
//!
//! Chart at a nondegenerate `p`: `F(h) = F_p + W H`, with `F_p` a frame of
//! `p` normalized to `F_p^H G F_p = diag(±1)`, `W` a frame of `p⊥` normalized
//! to `W^H G W = diag(±1)`, and `H` an `(n−k)×k` matrix whose entries (real and
//! imaginary parts over C) are the real coordinates `h`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::grassmannian::GrassPoint;
use crate::hermitian_space::{Field, HermitianSpace};
use crate::linalg::{self, CMat, C64};
use crate::tangent::{self, TangentVector};

/// Relative step of the central differences for metric derivatives.
pub const FD_STEP: f64 = 1e-5;
/// RK4 steps on `[0, 1]` for geodesics and transport.
pub const GEODESIC_STEPS: usize = 1000;
/// Coarser grid used only for the shooting Jacobian.
pub const JACOBIAN_STEPS: usize = 100;
pub const SHOOTING_TOL: f64 = 1e-10;
pub const ENDPOINT_TOL: f64 = 1e-8;
pub const MAX_SHOOTING_ITER: usize = 50;
/// Fraction of the nondegeneracy bound kept as chart domain.
const RADIUS_SAFETY: f64 = 0.9;
/// Chart radius when no point of the chart can degenerate.
const MAX_CHART_RADIUS: f64 = 10.0;
const CONDITION_LIMIT: f64 = 1e12;

type RVec = DVector<f64>;

fn normalized_frame(space: &HermitianSpace, frame: &CMat) -> Result<(CMat, Vec<f64>)> {
    let (vals, vecs) = linalg::hermitian_eigen(&space.pairing(frame, frame));
    let mut basis = frame * vecs;
    let mut signs = Vec::with_capacity(vals.len());
    for (j, v) in vals.iter().enumerate() {
        if *v == 0.0 {
            return Err(GeometryError::Degenerate(
                "chart frame is degenerate".into(),
            ));
        }
        let f = C64::new(1.0 / v.abs().sqrt(), 0.0);
        basis.column_mut(j).iter_mut().for_each(|z| *z *= f);
        signs.push(v.signum());
    }
    Ok((tangent::clean(space.field(), basis), signs))
}

#[derive(Debug, Clone)]
pub struct Chart {
    center: GrassPoint,
    basis_p: CMat,
    basis_perp: CMat,
    /// `[F_p W]⁻¹`.
    basis_inv: CMat,
    s0: Vec<f64>,
    a: Vec<f64>,
    radius: f64,
}

impl Chart {
    pub fn new(center: &GrassPoint) -> Result<Chart> {
        if !center.is_nondegenerate() {
            return Err(GeometryError::Degenerate(
                "chart center must be nondegenerate".into(),
            ));
        }
        let space = center.space();
        let (basis_p, s0) = normalized_frame(space, center.frame())?;
        let perp = space.orthogonal_complement(center.subspace())?;
        let (basis_perp, a) = normalized_frame(space, perp.frame())?;
        let full = CMat::from_fn(space.dim(), space.dim(), |i, j| {
            if j < basis_p.ncols() {
                basis_p[(i, j)]
            } else {
                basis_perp[(i, j - basis_p.ncols())]
            }
        });
        let basis_inv = linalg::inverse(&full)?;
        // S(h) = S₀ + H^H A H with |S₀| = |A| = 1 stays invertible while |H|² < 1;
        // same-sign definite S₀ and A never degenerate.
        let definite = |s: &[f64]| s.iter().all(|&x| x > 0.0) || s.iter().all(|&x| x < 0.0);
        let radius = if !a.is_empty() && definite(&s0) && definite(&a) && s0[0] == a[0] {
            MAX_CHART_RADIUS
        } else {
            RADIUS_SAFETY.sqrt()
        };
        Ok(Chart {
            center: center.clone(),
            basis_p,
            basis_perp,
            basis_inv,
            s0,
            a,
            radius,
        })
    }

    pub fn center(&self) -> &GrassPoint {
        &self.center
    }

    pub fn space(&self) -> &Arc<HermitianSpace> {
        self.center.space()
    }

    fn field(&self) -> Field {
        self.space().field()
    }

    fn k(&self) -> usize {
        self.basis_p.ncols()
    }

    fn rows(&self) -> usize {
        self.basis_perp.ncols()
    }

    fn parts(&self) -> usize {
        match self.field() {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }

    /// Number of real coordinates.
    pub fn dim(&self) -> usize {
        self.rows() * self.k() * self.parts()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `(row, column, unit)` of real coordinate `a`.
    fn slot(&self, a: usize) -> (usize, usize, C64) {
        let parts = self.parts();
        let part = a % parts;
        let entry = a / parts;
        let unit = if part == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 1.0)
        };
        (entry % self.rows(), entry / self.rows(), unit)
    }

    fn h_matrix(&self, h: &RVec) -> CMat {
        let mut m = CMat::zeros(self.rows(), self.k());
        for a in 0..self.dim() {
            let (i, j, u) = self.slot(a);
            m[(i, j)] += u * h[a];
        }
        m
    }

    fn h_vector(&self, m: &CMat) -> RVec {
        RVec::from_fn(self.dim(), |a, _| {
            let (i, j, u) = self.slot(a);
            (m[(i, j)] * u.conj()).re
        })
    }

    fn check_domain(&self, h: &RVec) -> Result<()> {
        let norm = h.norm();
        if !(norm < self.radius) {
            return Err(GeometryError::OutsideChart {
                norm,
                radius: self.radius,
            });
        }
        Ok(())
    }

    pub fn frame_at(&self, h: &RVec) -> CMat {
        &self.basis_p + &self.basis_perp * self.h_matrix(h)
    }

    pub fn point_at(&self, h: &RVec) -> Result<GrassPoint> {
        self.check_domain(h)?;
        GrassPoint::new(self.space().clone(), self.frame_at(h))
    }

    /// Chart coordinates of a point.
    pub fn coords_of(&self, p: &GrassPoint) -> Result<RVec> {
        let k = self.k();
        let c = &self.basis_inv * p.frame();
        let top = c.rows(0, k).into_owned();
        let bottom = c.rows(k, self.rows()).into_owned();
        let top_inv = top.try_inverse().ok_or(GeometryError::OutsideChart {
            norm: f64::INFINITY,
            radius: self.radius,
        })?;
        let h = self.h_vector(&(bottom * top_inv));
        self.check_domain(&h)?;
        Ok(h)
    }

    /// Base coordinates and components of a tangent vector.
    pub fn tangent_coords(&self, t: &TangentVector) -> Result<(RVec, RVec)> {
        let h = self.coords_of(t.base())?;
        let base = self.point_at(&h)?;
        let t = t.in_frame_of(&base)?;
        // T = F(h) Y + W X  with  F(h) = F_p + W H
        let c = &self.basis_inv * t.mat();
        let y = c.rows(0, self.k()).into_owned();
        let x = c.rows(self.k(), self.rows()).into_owned() - self.h_matrix(&h) * y;
        Ok((h, self.h_vector(&x)))
    }

    /// The tangent vector with components `x` at the point with coordinates `h`.
    pub fn tangent_at(&self, h: &RVec, x: &RVec) -> Result<TangentVector> {
        let base = self.point_at(h)?;
        TangentVector::projected(base, &(&self.basis_perp * self.h_matrix(x)))
    }

    /// `g_ab(h) = Re tr(∂_a*∂_b)` in closed form.
    ///
    /// With `S = S₀ + H^H A H` and `K = A − A H S⁻¹ H^H A`, the coordinate
    /// vectors `∂_a ↔ ε_a E_{i_a j_a}` give `g_ab = Re(ε̄_a ε_b K_{i_a i_b} S⁻¹_{j_b j_a})`.
    pub fn metric_at(&self, h: &RVec) -> Result<DMatrix<f64>> {
        self.check_domain(h)?;
        let m = self.dim();
        let mut g = DMatrix::zeros(m, m);
        self.metric_into(h.as_slice(), g.as_mut_slice())?;
        Ok(g)
    }

    /// Column-major `g(h)` into `out`, without the domain check.
    fn metric_into(&self, h: &[f64], out: &mut [f64]) -> Result<()> {
        let (rows, k, m) = (self.rows(), self.k(), self.dim());
        let mut hm = vec![C64::new(0.0, 0.0); rows * k];
        for (x, &hx) in h.iter().enumerate() {
            let (i, j, u) = self.slot(x);
            hm[i + rows * j] += u * hx;
        }
        let mut s = CMat::zeros(k, k);
        for j in 0..k {
            for l in 0..k {
                let mut acc = if j == l {
                    C64::new(self.s0[j], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                for i in 0..rows {
                    acc += hm[i + rows * j].conj() * hm[i + rows * l] * self.a[i];
                }
                s[(j, l)] = acc;
            }
        }
        let s_inv = s
            .try_inverse()
            .ok_or_else(|| GeometryError::Degenerate("chart point is degenerate".into()))?;
        // B = H S⁻¹ H^H, then K = A − A B A
        let mut hs = vec![C64::new(0.0, 0.0); rows * k];
        for i in 0..rows {
            for l in 0..k {
                hs[i + rows * l] = (0..k).map(|j| hm[i + rows * j] * s_inv[(j, l)]).sum();
            }
        }
        let mut kmat = vec![C64::new(0.0, 0.0); rows * rows];
        for i in 0..rows {
            for i2 in 0..rows {
                let b: C64 = (0..k)
                    .map(|l| hs[i + rows * l] * hm[i2 + rows * l].conj())
                    .sum();
                let diag = if i == i2 { self.a[i] } else { 0.0 };
                kmat[i + rows * i2] = C64::new(diag, 0.0) - b * (self.a[i] * self.a[i2]);
            }
        }
        for x in 0..m {
            let (ia, ja, ea) = self.slot(x);
            for y in x..m {
                let (ib, jb, eb) = self.slot(y);
                let v = (ea.conj() * eb * kmat[ia + rows * ib] * s_inv[(jb, ja)]).re;
                out[x + m * y] = v;
                out[y + m * x] = v;
            }
        }
        Ok(())
    }

    /// Christoffel symbols of the second kind at `h`.
    pub fn christoffel(&self, h: &RVec) -> Result<Christoffel> {
        let m = self.dim();
        let delta = FD_STEP * h.norm().max(1.0);
        let g0 = self.metric_at(h)?;
        let g_inv = g0
            .clone()
            .try_inverse()
            .ok_or(GeometryError::IllConditioned(f64::INFINITY))?;
        // Frobenius condition number, an upper bound of the spectral one
        let cond = g0.norm() * g_inv.norm();
        if !(cond <= CONDITION_LIMIT) {
            return Err(GeometryError::IllConditioned(cond));
        }
        // dg[(d + m·e) + m²·c] = ∂_c g_de
        let mut dg = vec![0.0; m * m * m];
        let (mut plus, mut minus) = (vec![0.0; m * m], vec![0.0; m * m]);
        let mut hp = h.as_slice().to_vec();
        for c in 0..m {
            hp[c] = h[c] + delta;
            self.metric_into(&hp, &mut plus)?;
            hp[c] = h[c] - delta;
            self.metric_into(&hp, &mut minus)?;
            hp[c] = h[c];
            for (x, (p, q)) in plus.iter().zip(&minus).enumerate() {
                dg[x + m * m * c] = (p - q) / (2.0 * delta);
            }
        }
        let d = |i: usize, j: usize, c: usize| dg[i + m * j + m * m * c];
        let mut lower = vec![0.0; m];
        let mut data = vec![0.0; m * m * m];
        for b in 0..m {
            for c in b..m {
                for (e, slot) in lower.iter_mut().enumerate() {
                    *slot = 0.5 * (d(e, c, b) + d(e, b, c) - d(b, c, e));
                }
                for a in 0..m {
                    let v: f64 = (0..m).map(|e| g_inv[(a, e)] * lower[e]).sum();
                    data[(a * m + b) * m + c] = v;
                    data[(a * m + c) * m + b] = v;
                }
            }
        }
        Ok(Christoffel { dim: m, data })
    }
}

/// `Γ^a_bc`, symmetric in `b, c`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    /// `Γ^a_bc u^b w^c`.
    pub fn contract(&self, u: &RVec, w: &RVec) -> RVec {
        let m = self.dim;
        RVec::from_fn(m, |a, _| {
            let mut s = 0.0;
            for b in 0..m {
                for c in 0..m {
                    s += self.data[(a * m + b) * m + c] * u[b] * w[c];
                }
            }
            s
        })
    }
}

/// Samples of a curve `h(s)`, `s ∈ [0,1]`, in one chart.
#[derive(Debug, Clone)]
pub struct CurveDiscretization {
    pub chart: Chart,
    pub positions: Vec<RVec>,
    pub velocities: Vec<RVec>,
}

impl CurveDiscretization {
    pub fn steps(&self) -> usize {
        self.positions.len().saturating_sub(1)
    }

    pub fn start_point(&self) -> Result<GrassPoint> {
        self.chart.point_at(&self.positions[0])
    }

    pub fn end_point(&self) -> Result<GrassPoint> {
        self.chart
            .point_at(self.positions.last().expect("nonempty curve"))
    }

    pub fn reversed(&self) -> CurveDiscretization {
        CurveDiscretization {
            chart: self.chart.clone(),
            positions: self.positions.iter().rev().cloned().collect(),
            velocities: self.velocities.iter().rev().map(|v| -v).collect(),
        }
    }

    /// `g(ḣ, ḣ)` at each sample.
    pub fn energy_profile(&self) -> Result<Vec<f64>> {
        self.positions
            .iter()
            .zip(&self.velocities)
            .map(|(h, v)| Ok(v.dot(&(self.chart.metric_at(h)? * v))))
            .collect()
    }

    /// `max |E(s) − E(0)| / |E(0)|`, zero for a constant curve.
    pub fn energy_drift(&self) -> Result<f64> {
        let e = self.energy_profile()?;
        let e0 = e[0];
        if e0 == 0.0 {
            return Ok(0.0);
        }
        Ok(e.iter().map(|x| (x - e0).abs()).fold(0.0, f64::max) / e0.abs())
    }
}

fn rk4<F>(state: &RVec, dt: f64, f: &F) -> Result<RVec>
where
    F: Fn(&RVec) -> Result<RVec>,
{
    let k1 = f(state)?;
    let k2 = f(&(state + &k1 * (dt / 2.0)))?;
    let k3 = f(&(state + &k2 * (dt / 2.0)))?;
    let k4 = f(&(state + &k3 * dt))?;
    Ok(state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

fn geodesic_field(chart: &Chart) -> impl Fn(&RVec) -> Result<RVec> + '_ {
    let m = chart.dim();
    move |s: &RVec| {
        let h = s.rows(0, m).into_owned();
        let v = s.rows(m, m).into_owned();
        let acc = -chart.christoffel(&h)?.contract(&v, &v);
        let mut out = RVec::zeros(2 * m);
        out.rows_mut(0, m).copy_from(&v);
        out.rows_mut(m, m).copy_from(&acc);
        Ok(out)
    }
}

fn integrate_geodesic(
    chart: &Chart,
    h0: &RVec,
    v0: &RVec,
    steps: usize,
) -> Result<(Vec<RVec>, Vec<RVec>)> {
    let m = chart.dim();
    let f = geodesic_field(chart);
    let mut state = RVec::zeros(2 * m);
    state.rows_mut(0, m).copy_from(h0);
    state.rows_mut(m, m).copy_from(v0);
    let dt = 1.0 / steps as f64;
    let mut pos = vec![h0.clone()];
    let mut vel = vec![v0.clone()];
    for _ in 0..steps {
        state = rk4(&state, dt, &f)?;
        pos.push(state.rows(0, m).into_owned());
        vel.push(state.rows(m, m).into_owned());
    }
    Ok((pos, vel))
}

/// Geodesic from `p1` to `p2`, in the chart centred at `p1`, by shooting.
///
/// Newton on the initial velocity; the Jacobian comes from forward
/// differences on the coarse grid, the residual from the fine one.
pub fn geodesic_connect(p1: &GrassPoint, p2: &GrassPoint) -> Result<CurveDiscretization> {
    let chart = Chart::new(p1)?;
    let target = chart.coords_of(p2)?;
    let m = chart.dim();
    let origin = RVec::zeros(m);
    let shoot = |v: &RVec| -> Result<(RVec, Vec<RVec>, Vec<RVec>)> {
        let (pos, vel) = integrate_geodesic(&chart, &origin, v, GEODESIC_STEPS)?;
        Ok((pos.last().expect("nonempty") - &target, pos, vel))
    };
    let coarse_end = |v: &RVec| -> Result<RVec> {
        let (pos, _) = integrate_geodesic(&chart, &origin, v, JACOBIAN_STEPS)?;
        Ok(pos.last().expect("nonempty").clone())
    };
    let mut v = target.clone();
    // rays through the centre are geodesics of the definite charts; start
    // from their exact speed so the first shot stays inside the chart
    let r = target.norm();
    if chart.k() == 1 && r > 0.0 {
        let (s0, a) = (chart.s0[0], &chart.a);
        if a.iter().all(|&x| x == s0) {
            v *= r.atan() / r;
        } else if a.iter().all(|&x| x == -s0) && r < 1.0 {
            v *= r.atanh() / r;
        }
    }
    let (mut r, mut positions, mut velocities) = shoot(&v)?;
    let mut iterations = 0;
    while r.norm() > SHOOTING_TOL && iterations < MAX_SHOOTING_ITER {
        iterations += 1;
        let base = coarse_end(&v)?;
        let dv = 1e-6 * v.norm().max(1.0);
        let mut jac = DMatrix::zeros(m, m);
        for j in 0..m {
            let mut vj = v.clone();
            vj[j] += dv;
            jac.set_column(j, &((coarse_end(&vj)? - &base) / dv));
        }
        let step = jac.lu().solve(&(-&r)).ok_or(GeometryError::NoGeodesic {
            residual: r.norm(),
            iterations,
        })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &v + &step * lambda;
            if let Ok((rt, pos, vel)) = shoot(&trial) {
                if rt.norm() < r.norm() {
                    (v, r, positions, velocities) = (trial, rt, pos, vel);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if r.norm() > ENDPOINT_TOL {
        return Err(GeometryError::NoGeodesic {
            residual: r.norm(),
            iterations,
        });
    }
    Ok(CurveDiscretization {
        chart,
        positions,
        velocities,
    })
}

/// Parallel transport of `t` (based at the curve's start) to the curve's end.
pub fn transport(t: &TangentVector, curve: &CurveDiscretization) -> Result<TangentVector> {
    Ok(transport_all(std::slice::from_ref(t), curve)?.remove(0))
}

/// Parallel transport of several vectors along one curve, solving
/// `Ẋ^a = −Γ^a_bc ḣ^b X^c` for each jointly with the geodesic equation.
///
/// The curve's own ODE is re-integrated from its first sample, so the curve
/// must be a geodesic of the chart (as produced by [`geodesic_connect`]).
pub fn transport_all(
    ts: &[TangentVector],
    curve: &CurveDiscretization,
) -> Result<Vec<TangentVector>> {
    let chart = &curve.chart;
    let start = curve.start_point()?;
    let mut xs = Vec::with_capacity(ts.len());
    for t in ts {
        if !start.equal_points(t.base())? {
            return Err(GeometryError::TransportFailure(
                "tangent vector is not based at the curve start".into(),
            ));
        }
        xs.push(chart.tangent_coords(t)?.1);
    }
    let steps = curve.steps();
    let m = chart.dim();
    let end = curve.positions.last().expect("nonempty");
    if steps == 0 {
        return xs.iter().map(|x| chart.tangent_at(end, x)).collect();
    }
    let count = xs.len();
    let f = |s: &RVec| -> Result<RVec> {
        let h = s.rows(0, m).into_owned();
        let v = s.rows(m, m).into_owned();
        let gamma = chart.christoffel(&h)?;
        let mut out = RVec::zeros(s.len());
        out.rows_mut(0, m).copy_from(&v);
        out.rows_mut(m, m).copy_from(&-gamma.contract(&v, &v));
        for i in 0..count {
            let x = s.rows((2 + i) * m, m).into_owned();
            out.rows_mut((2 + i) * m, m)
                .copy_from(&-gamma.contract(&v, &x));
        }
        Ok(out)
    };
    let mut state = RVec::zeros((2 + count) * m);
    state.rows_mut(0, m).copy_from(&curve.positions[0]);
    state.rows_mut(m, m).copy_from(&curve.velocities[0]);
    for (i, x) in xs.iter().enumerate() {
        state.rows_mut((2 + i) * m, m).copy_from(x);
    }
    let dt = 1.0 / steps as f64;
    for _ in 0..steps {
        state = rk4(&state, dt, &f).map_err(|e| GeometryError::TransportFailure(e.to_string()))?;
    }
    if state.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::TransportFailure(
            "non-finite components".into(),
        ));
    }
    (0..count)
        .map(|i| chart.tangent_at(end, &state.rows((2 + i) * m, m).into_owned()))
        .collect()
}
