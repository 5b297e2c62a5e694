//! Built-in regression suite: one row per catalog example with the worst
//! observed defect against its tolerance. In perturb mode a gamma mismatch
//! is injected into the rotator pair as a negative control.

use drsplit_core::operators::{affine_normal, normal_cone, skew_rotator};
use drsplit_core::oracle::{sample_displacement_image, GridSpec};
use drsplit_core::sets::{ConvexSet, Point};
use drsplit_core::splitting::{DrInstance, ProbeParams};
use nalgebra::DVector;

pub struct Row {
    pub name: &'static str,
    pub defect: f64,
    pub tol: f64,
}

fn pt(v: &[f64]) -> Point {
    DVector::from_row_slice(v)
}

fn grid_points() -> Vec<Point> {
    let mut pts = Vec::new();
    let mut i = -6;
    while i <= 6 {
        let mut j = -6;
        while j <= 6 {
            pts.push(pt(&[i as f64 * 0.5, j as f64 * 0.5]));
            j += 1;
        }
        i += 1;
    }
    pts
}

/// Rotator pair: T is the identity when the two skews cancel exactly.
fn rotator_pair_row(perturb: bool) -> Row {
    let gamma_b = if perturb { 1.02 } else { 1.0 };
    let inst = DrInstance::new(
        skew_rotator(1.0, 2, false).unwrap(),
        skew_rotator(gamma_b, 2, true).unwrap(),
    )
    .unwrap();
    let defect = grid_points()
        .iter()
        .map(|x| (inst.apply(x).unwrap() - x).norm())
        .fold(0.0, f64::max);
    Row {
        name: "rotator pair: T = Id",
        defect,
        tol: 1e-12,
    }
}

/// Rotator vs line through (1,0): the displacement map is the rank-one
/// matrix [[.5,-.5],[-.5,.5]] and its image is the line through (1,-1).
fn rotator_line_row() -> Row {
    let inst = DrInstance::new(
        skew_rotator(1.0, 2, false).unwrap(),
        normal_cone(ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap()),
    )
    .unwrap();
    let want = [[0.5, -0.5], [-0.5, 0.5]];
    let mut defect = 0.0_f64;
    for (j, e) in [pt(&[1.0, 0.0]), pt(&[0.0, 1.0])].iter().enumerate() {
        let d = inst.displacement(e).unwrap();
        for i in 0..2 {
            defect = defect.max((d[i] - want[i][j]).abs());
        }
    }
    let line = ConvexSet::linear_subspace(2, &[pt(&[1.0, -1.0])]).unwrap();
    let cloud = sample_displacement_image(&inst, &GridSpec::default()).unwrap();
    for w in &cloud.points {
        defect = defect.max(line.distance(w).unwrap());
    }
    Row {
        name: "rotator vs line: displacement",
        defect,
        tol: 1e-9,
    }
}

/// Orthogonal affine pair whose displacement image collapses to the single
/// intersection point (3,1).
fn orthogonal_affine_row() -> Row {
    let inst = DrInstance::new(
        affine_normal(pt(&[2.0, 0.0]), pt(&[0.0, 1.0]), &[pt(&[1.0, 0.0])]).unwrap(),
        affine_normal(pt(&[1.0, 0.0]), pt(&[0.0, 0.0]), &[pt(&[1.0, 0.0])]).unwrap(),
    )
    .unwrap();
    let target = pt(&[3.0, 1.0]);
    let cloud = sample_displacement_image(&inst, &GridSpec::default()).unwrap();
    let defect = cloud
        .points
        .iter()
        .map(|w| (w - &target).norm())
        .fold(0.0, f64::max);
    Row {
        name: "orthogonal affine pair: image",
        defect,
        tol: 1e-9,
    }
}

/// Ball vs line: w = (2,1) sits in the closure of the displacement range
/// but is never attained; the scaled probe norms must decay regardless.
fn ball_line_probe_row() -> Row {
    let inst = DrInstance::new(
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap()),
    )
    .unwrap();
    let params = ProbeParams {
        n_schedule: (1..=12).map(|k| 1u64 << k).collect(),
        ..ProbeParams::default()
    };
    let res = inst
        .probe_range_membership(&pt(&[2.0, 1.0]), &params)
        .unwrap();
    Row {
        name: "ball vs line: closure probe",
        defect: *res.scaled_norms.last().unwrap(),
        tol: 1e-4,
    }
}

/// Bounded-set range formulas: for two balls the displacement range closure
/// is the ball difference; for ball vs line the closure of ran T is the
/// ball plus the orthogonal line.
fn bounded_ranges_row() -> Row {
    let mut defect = 0.0_f64;
    let two_ball = DrInstance::new(
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::ball(pt(&[4.0, 0.0]), 1.0).unwrap()),
    )
    .unwrap();
    let diff_set = ConvexSet::ball(pt(&[-4.0, 0.0]), 2.0).unwrap();
    let cloud = sample_displacement_image(&two_ball, &GridSpec::default()).unwrap();
    for w in &cloud.points {
        defect = defect.max(diff_set.distance(w).unwrap());
    }

    let ball_line = DrInstance::new(
        normal_cone(ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap()),
        normal_cone(ConvexSet::linear_subspace(2, &[pt(&[1.0, 0.0])]).unwrap()),
    )
    .unwrap();
    let t_range = ConvexSet::sum_ball_subspace(pt(&[0.0, 0.0]), 1.0, &[pt(&[0.0, 1.0])]).unwrap();
    for x in grid_points() {
        let tx = ball_line.apply(&x).unwrap();
        defect = defect.max(t_range.distance(&tx).unwrap());
    }
    Row {
        name: "bounded sets: range formulas",
        defect,
        tol: 1e-9,
    }
}

pub fn run_suite(perturb: bool) -> Vec<Row> {
    vec![
        rotator_pair_row(perturb),
        rotator_line_row(),
        orthogonal_affine_row(),
        ball_line_probe_row(),
        bounded_ranges_row(),
    ]
}
