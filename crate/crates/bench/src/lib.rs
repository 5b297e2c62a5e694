//! Benchmark fixtures shared by the criterion targets.

use drsplit_core::operators::normal_cone;
use drsplit_core::sets::{ConvexSet, Point};
use drsplit_core::splitting::DrInstance;
use nalgebra::DVector;

pub fn pt(v: &[f64]) -> Point {
    DVector::from_row_slice(v)
}

/// The inconsistent two-ball instance used across the benchmarks.
pub fn two_ball() -> DrInstance {
    DrInstance::new(
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::ball(pt(&[4.0, 0.0]), 1.0).unwrap()),
    )
    .unwrap()
}

/// Ball-plus-line sum set, the most expensive catalog projection.
pub fn sum_set() -> ConvexSet {
    ConvexSet::sum_ball_subspace(pt(&[0.0, 0.0]), 1.0, &[pt(&[1.0, 0.0])]).unwrap()
}
