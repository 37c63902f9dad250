mod common;

use common::*;
use hermitian_grassmann::linalg::{c, diag_real, fro, trace};
use hermitian_grassmann::tangent::{self, embed, observe, projectors};
use hermitian_grassmann::{
    sampling, CMat, Field, FootlessVector, GeometryError, GrassPoint, TangentVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn projector_examples() {
    let e = diag(Field::Real, &[1.0, 1.0]);
    let pr = projectors(&point(&e, &[&[1.0, 0.0]])).unwrap();
    assert!(close(&pr.onto_p, &diag_real(&[1.0, 0.0]), 1e-15));
    assert!(close(&pr.onto_perp, &diag_real(&[0.0, 1.0]), 1e-15));

    let pr = projectors(&point(&lorentz3(), &[&[0.0, 0.0, 1.0]])).unwrap();
    assert!(close(&pr.onto_p, &diag_real(&[0.0, 0.0, 1.0]), 1e-15));
}

#[test]
fn projector_membership_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let s = sampling::space(&mut rng, Field::Complex, 2, 2).unwrap();
    let p = sampling::point(&mut rng, &s, 2, 0).unwrap();
    let pr = projectors(&p).unwrap();
    let v = sampling::vector(&mut rng, Field::Complex, 4);
    let a = &pr.onto_p * &v;
    // a ∈ p: solvable in frame coordinates
    let coeffs =
        hermitian_grassmann::linalg::lstsq(p.frame(), &CMat::from_column_slice(4, 1, a.as_slice()))
            .unwrap();
    assert!(((p.frame() * coeffs).column(0) - &a).norm() < 1e-12);
    // v − a ∈ p⊥
    let rest = CMat::from_column_slice(4, 1, (&v - &a).as_slice());
    assert!(fro(&s.pairing(p.frame(), &rest)) < 1e-12);
}

#[test]
fn observe_examples() {
    let s = lorentz3();
    let p0 = point(&s, &[&[1.0, 0.0, 0.0]]);
    let t = TangentVector::new(p0.clone(), cols(&[&[0.0, 2.0, -1.0]])).unwrap();
    let back = observe(&embed(&t).unwrap(), &p0).unwrap();
    assert!(close(back.mat(), t.mat(), 1e-15));

    let id = FootlessVector::new(s.clone(), CMat::identity(3, 3)).unwrap();
    assert!(observe(&id, &p0).unwrap().norm() < 1e-15);
}

#[test]
fn observe_range_condition_on_random_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = sampling::space(&mut rng, Field::Complex, 3, 1).unwrap();
    let p0 = sampling::point(&mut rng, &s, 2, 0).unwrap();
    let t =
        FootlessVector::new(s.clone(), sampling::matrix(&mut rng, Field::Complex, 4, 4)).unwrap();
    let o = observe(&t, &p0).unwrap();
    assert!(fro(&s.pairing(p0.frame(), o.mat())) < 1e-12);
}

#[test]
fn embed_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = sampling::space(&mut rng, Field::Real, 2, 2).unwrap();
    for _ in 0..3 {
        let p = sampling::point(&mut rng, &s, 2, 0).unwrap();
        let t = sampling::tangent(&mut rng, &p).unwrap();
        let e = embed(&t).unwrap();
        assert!(observe(&e, &p).unwrap().distance(&t).unwrap() < 1e-12);
        let r = |m: &CMat| hermitian_grassmann::linalg::rank(m, None).unwrap();
        assert_eq!(r(e.mat()), r(t.mat()));
    }
    let p = sampling::point(&mut rng, &s, 1, 0).unwrap();
    assert!(fro(embed(&TangentVector::zero(p).unwrap()).unwrap().mat()) == 0.0);
}

#[test]
fn product_examples() {
    let e = diag(Field::Complex, &[1.0, 1.0, 1.0]);
    let p = point(&e, &[&[1.0, 0.0, 0.0]]);
    let m = CMat::from_column_slice(3, 1, &[c(0.0, 0.0), c(1.0, 2.0), c(0.0, -1.0)]);
    let t = TangentVector::new(p.clone(), m.clone()).unwrap();
    assert!(close(
        &tangent::product(&t, &t).unwrap(),
        &(m.adjoint() * &m),
        1e-14
    ));
    let z = TangentVector::zero(p).unwrap();
    assert!(fro(&tangent::product(&t, &z).unwrap()) == 0.0);

    // t1: e1 → e2 at span(e1); t2: e3 → e1 at span(e3); t1* vanishes on the image of t2
    let s = lorentz3();
    let t1 = TangentVector::new(point(&s, &[&[1.0, 0.0, 0.0]]), cols(&[&[0.0, 1.0, 0.0]])).unwrap();
    let t2 = TangentVector::new(point(&s, &[&[0.0, 0.0, 1.0]]), cols(&[&[1.0, 0.0, 0.0]])).unwrap();
    assert!(fro(&tangent::product(&t1, &t2).unwrap()) < 1e-15);
}

#[test]
fn metric_example() {
    let e = diag(Field::Real, &[1.0, 1.0]);
    let t = TangentVector::new(point(&e, &[&[1.0, 0.0]]), cols(&[&[0.0, 1.0]])).unwrap();
    assert!((tangent::metric(&t, &t).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn char_coefficient_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = sampling::space(&mut rng, Field::Complex, 3, 2).unwrap();
    let p1 = sampling::point(&mut rng, &s, 1, 0).unwrap();
    let (a, b) = (
        sampling::tangent(&mut rng, &p1).unwrap(),
        sampling::tangent(&mut rng, &p1).unwrap(),
    );
    let cc = tangent::char_coefficients(&a, &b).unwrap();
    assert_eq!(cc.len(), 1);
    assert!((cc[0] + tangent::metric(&a, &b).unwrap()).norm() < 1e-12);

    let z = TangentVector::zero(p1.clone()).unwrap();
    assert!(tangent::char_coefficients(&a, &z)
        .unwrap()
        .iter()
        .all(|x| x.norm() == 0.0));

    let p2 = sampling::point(&mut rng, &s, 2, 0).unwrap();
    let (a, b) = (
        sampling::tangent(&mut rng, &p2).unwrap(),
        sampling::tangent(&mut rng, &p2).unwrap(),
    );
    let prod = tangent::product(&a, &b).unwrap();
    // eigenvalues of the 2x2 product from its trace and determinant
    let (tr, det) = (trace(&prod), prod.determinant());
    let disc = (tr * tr - det * 4.0).sqrt();
    let eig = [(tr + disc) / 2.0, (tr - disc) / 2.0];
    let cc = tangent::char_coefficients(&a, &b).unwrap();
    assert!((cc[0] + (eig[0] + eig[1])).norm() < 1e-10);
    assert!((cc[1] - eig[0] * eig[1]).norm() < 1e-10);
}

#[test]
fn geodesic_invariant_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let s = sampling::space(&mut rng, Field::Complex, 3, 1).unwrap();
    let p1 = sampling::point(&mut rng, &s, 1, 0).unwrap();
    let t = sampling::unit_tangent(&mut rng, &p1).unwrap();
    if let Ok(v) = tangent::geodesic_invariant(&t) {
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    // product(t,t) = diag(1,1) on span(e1,e2) in a definite space
    let e = diag(Field::Complex, &[1.0; 4]);
    let p = point(&e, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
    let t = TangentVector::new(p, cols(&[&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]])).unwrap();
    assert!(close(
        &tangent::product(&t, &t).unwrap(),
        &CMat::identity(2, 2),
        1e-15
    ));
    let g = tangent::geodesic_invariant(&t).unwrap();
    assert!((g - c(0.25, 0.0)).norm() < 1e-15);
    let g2 = tangent::geodesic_invariant(&t.scaled(c(-0.3, 2.0)).unwrap()).unwrap();
    assert!((g2 - g).norm() < 1e-14);
}

#[test]
fn geodesic_invariant_null_direction() {
    let s = lorentz3();
    // a null image vector at a positive point: tr(t*t) = 0
    let t = TangentVector::new(point(&s, &[&[1.0, 0.0, 0.0]]), cols(&[&[0.0, 1.0, 1.0]])).unwrap();
    assert_eq!(
        tangent::geodesic_invariant(&t),
        Err(GeometryError::NullDirection)
    );
}

#[test]
fn tangent_range_is_enforced() {
    let s = lorentz3();
    let r = TangentVector::new(point(&s, &[&[1.0, 0.0, 0.0]]), cols(&[&[1.0, 0.0, 0.0]]));
    assert!(matches!(r, Err(GeometryError::NotTangent { .. })));
    let null = GrassPoint::new(s, cols(&[&[0.0, 1.0, 1.0]])).unwrap();
    assert!(matches!(
        TangentVector::zero(null),
        Err(GeometryError::Degenerate(_))
    ));
}

#[test]
fn near_cancellation_stays_tangent() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = sampling::space(&mut rng, Field::Real, 1, 1).unwrap();
    let p = sampling::point(&mut rng, &s, 1, 0).unwrap();
    let t = sampling::unit_tangent(&mut rng, &p).unwrap();
    let almost = t.scaled(c(1.0 + 1e-15, 0.0)).unwrap();
    assert!(t.sub(&almost).unwrap().norm() < 1e-14);
}
