//! Shared fixtures for the integration suites: the operator catalog, the
//! named catalog instances, and seeded sampling helpers.

use drsplit_core::operators::{
    affine_normal, normal_cone, prox_l1, prox_quadratic, psd_linear, skew_rotator, MonotoneOp,
};
use drsplit_core::sets::{ConvexSet, Point};
use drsplit_core::splitting::DrInstance;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn pt(v: &[f64]) -> Point {
    DVector::from_row_slice(v)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard-normal sample via Box-Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn gaussian_point(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Point {
    DVector::from_fn(dim, |_, _| gaussian(rng) * scale)
}

/// One operator of every catalog construction, all on R^2.
pub fn catalog_ops() -> Vec<MonotoneOp> {
    let e1 = pt(&[1.0, 0.0]);
    vec![
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::ball(pt(&[4.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::linear_subspace(2, std::slice::from_ref(&e1)).unwrap()),
        normal_cone(
            ConvexSet::affine_subspace(pt(&[0.0, 1.0]), std::slice::from_ref(&e1)).unwrap(),
        ),
        normal_cone(ConvexSet::hyper_box(pt(&[0.0, f64::NEG_INFINITY]), pt(&[1.0, 2.0])).unwrap()),
        normal_cone(ConvexSet::ray(e1.clone()).unwrap()),
        normal_cone(ConvexSet::halfspace(pt(&[1.0, 1.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::orthant(vec![1, -1]).unwrap()),
        normal_cone(
            ConvexSet::sum_ball_subspace(pt(&[0.0, 0.0]), 1.0, std::slice::from_ref(&e1)).unwrap(),
        ),
        normal_cone(
            ConvexSet::shifted(ConvexSet::ray(pt(&[0.0, 1.0])).unwrap(), pt(&[2.0, 0.0])).unwrap(),
        ),
        normal_cone(ConvexSet::singleton(pt(&[1.0, -1.0])).unwrap()),
        skew_rotator(1.0, 2, false).unwrap(),
        skew_rotator(2.5, 2, true).unwrap(),
        affine_normal(pt(&[1.0, 0.0]), pt(&[0.0, 1.0]), std::slice::from_ref(&e1)).unwrap(),
        psd_linear(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 1.0])).unwrap(),
        prox_quadratic(pt(&[2.0, 0.0])),
        prox_l1(0.7, 2).unwrap(),
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()).invert(),
        prox_l1(1.0, 2).unwrap().dual_negate(),
    ]
}

/// The named catalog instances the regression and acceptance suites run on.
pub fn catalog_instances() -> Vec<(&'static str, DrInstance)> {
    let e1 = pt(&[1.0, 0.0]);
    let e2 = pt(&[0.0, 1.0]);
    let two_ball = DrInstance::new(
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::ball(pt(&[4.0, 0.0]), 1.0).unwrap()),
    )
    .unwrap();
    let rotator_pair = DrInstance::new(
        skew_rotator(1.0, 2, false).unwrap(),
        skew_rotator(1.0, 2, true).unwrap(),
    )
    .unwrap();
    let rotator_line = DrInstance::new(
        skew_rotator(1.0, 2, false).unwrap(),
        normal_cone(ConvexSet::linear_subspace(2, std::slice::from_ref(&e1)).unwrap()),
    )
    .unwrap();
    let affine_pair = DrInstance::new(
        affine_normal(pt(&[2.0, 0.0]), pt(&[0.0, 1.0]), std::slice::from_ref(&e1)).unwrap(),
        affine_normal(pt(&[1.0, 0.0]), pt(&[0.0, 0.0]), std::slice::from_ref(&e1)).unwrap(),
    )
    .unwrap();
    let ball_line = DrInstance::new(
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::linear_subspace(2, std::slice::from_ref(&e1)).unwrap()),
    )
    .unwrap();
    let shifted_lines = DrInstance::new(
        normal_cone(ConvexSet::linear_subspace(2, std::slice::from_ref(&e1)).unwrap()),
        normal_cone(ConvexSet::affine_subspace(e2.clone(), std::slice::from_ref(&e1)).unwrap()),
    )
    .unwrap();
    let cone_pair = DrInstance::new(
        normal_cone(ConvexSet::ray(e1).unwrap()),
        normal_cone(ConvexSet::ray(e2).unwrap()),
    )
    .unwrap();
    let l1_quadratic =
        DrInstance::new(prox_l1(1.0, 2).unwrap(), prox_quadratic(pt(&[2.0, 0.0]))).unwrap();
    vec![
        ("two_ball", two_ball),
        ("rotator_pair", rotator_pair),
        ("rotator_line", rotator_line),
        ("affine_pair", affine_pair),
        ("ball_line", ball_line),
        ("shifted_lines", shifted_lines),
        ("cone_pair", cone_pair),
        ("l1_quadratic", l1_quadratic),
    ]
}
