//! The instance file schema: a JSON document describing an operator pair
//! (or a product of factors), run parameters, and requested outputs.
//! Schema version 1. All tolerances live in the file; none are read from
//! the environment.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{self, MonotoneOp};
use crate::product::{self, ProductInstance};
use crate::sets::ConvexSet;
use crate::splitting::{DrInstance, ProbeParams};

/// A box bound: a finite number, or the strings `"inf"` / `"-inf"`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Number(f64),
    Keyword(BoundKeyword),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum BoundKeyword {
    #[serde(rename = "inf")]
    PosInf,
    #[serde(rename = "-inf")]
    NegInf,
}

impl Bound {
    pub fn value(&self) -> f64 {
        match self {
            Bound::Number(v) => *v,
            Bound::Keyword(BoundKeyword::PosInf) => f64::INFINITY,
            Bound::Keyword(BoundKeyword::NegInf) => f64::NEG_INFINITY,
        }
    }
}

/// Set descriptors addressable from instance files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    WholeSpace,
    Singleton {
        point: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    AffineSubspace {
        anchor: Vec<f64>,
        /// Direction vectors, one per entry; orthonormalized on build.
        basis: Vec<Vec<f64>>,
    },
    Box {
        lower: Vec<Bound>,
        upper: Vec<Bound>,
    },
    Ray {
        direction: Vec<f64>,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Orthant {
        signs: Vec<i8>,
    },
    SumBallSubspace {
        center: Vec<f64>,
        radius: f64,
        basis: Vec<Vec<f64>>,
    },
    Shifted {
        base: Box<SetSpec>,
        shift: Vec<f64>,
    },
}

/// Operator constructors addressable from instance files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    NormalCone {
        set: SetSpec,
    },
    /// Alias of `normal_cone`: prox of the indicator.
    Indicator {
        set: SetSpec,
    },
    SkewRotator {
        gamma: f64,
        #[serde(default)]
        reversed: bool,
    },
    AffineNormal {
        u: Vec<f64>,
        u_perp: Vec<f64>,
        basis: Vec<Vec<f64>>,
    },
    PsdLinear {
        matrix: Vec<Vec<f64>>,
    },
    ProxQuadratic {
        center: Vec<f64>,
    },
    ProxL1 {
        weight: f64,
    },
    Invert {
        of: Box<OperatorSpec>,
    },
    DualNegate {
        of: Box<OperatorSpec>,
    },
}

/// Product wrapper: a list of factor operator specs on the factor space.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub factors: Vec<OperatorSpec>,
}

/// Run parameters; every tolerance is overridable here.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunParams {
    /// Initial point; the origin when absent.
    pub x0: Option<Vec<f64>>,
    pub steps: usize,
    /// Convergence threshold on the final difference norm.
    pub tol: f64,
    /// Agreement tolerance between the two minimal-displacement estimators.
    pub agree_tol: f64,
    pub seed: u64,
    pub n_schedule: Option<Vec<u64>>,
    pub inner_tol: f64,
    pub inner_max: usize,
    pub abs_tol: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        let probe = ProbeParams::default();
        RunParams {
            x0: None,
            steps: 10_000,
            tol: 1e-8,
            agree_tol: 1e-2,
            seed: 0,
            n_schedule: None,
            inner_tol: probe.inner_tol,
            inner_max: probe.inner_max,
            abs_tol: probe.abs_tol,
        }
    }
}

impl RunParams {
    pub fn probe_params(&self) -> ProbeParams {
        let defaults = ProbeParams::default();
        ProbeParams {
            n_schedule: self.n_schedule.clone().unwrap_or(defaults.n_schedule),
            inner_tol: self.inner_tol,
            inner_max: self.inner_max,
            abs_tol: self.abs_tol,
        }
    }
}

/// Top-level instance file. Exactly one of `a`/`b` (pair form) or
/// `product` must be present.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    /// Dimension of the base space (the factor space in product form).
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<ProductSpec>,
    #[serde(default)]
    pub run: RunParams,
    /// Requested outputs for `run`; defaults to all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputKind>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Trace,
    Summary,
}

/// A built instance: either a plain pair or a product lift. Both expose the
/// splitting instance the pipelines act on.
#[derive(Clone, Debug)]
pub enum BuiltInstance {
    Pair(DrInstance),
    Product(ProductInstance),
}

impl BuiltInstance {
    pub fn instance(&self) -> &DrInstance {
        match self {
            BuiltInstance::Pair(i) => i,
            BuiltInstance::Product(p) => p.lifted(),
        }
    }

    /// Dimension the iteration runs in (the lifted dimension for products).
    pub fn dim(&self) -> usize {
        self.instance().dim()
    }
}

fn vec_to_point(v: &[f64], dim: usize, what: &str) -> Result<DVector<f64>> {
    if v.len() != dim {
        return Err(Error::InvalidInstance(format!(
            "{what} has length {}, expected {dim}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInstance(format!(
            "{what} has non-finite entries"
        )));
    }
    Ok(DVector::from_row_slice(v))
}

fn rows_to_columns(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<Vec<DVector<f64>>> {
    rows.iter()
        .map(|r| vec_to_point(r, dim, what))
        .collect::<Result<Vec<_>>>()
}

impl SetSpec {
    /// Schema form of a catalog descriptor (inverse of `build` up to basis
    /// orthonormalization).
    pub fn from_set(set: &ConvexSet) -> SetSpec {
        let cols = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.ncols())
                .map(|j| m.column(j).iter().cloned().collect())
                .collect()
        };
        let bound = |v: f64| -> Bound {
            if v == f64::INFINITY {
                Bound::Keyword(BoundKeyword::PosInf)
            } else if v == f64::NEG_INFINITY {
                Bound::Keyword(BoundKeyword::NegInf)
            } else {
                Bound::Number(v)
            }
        };
        match set {
            ConvexSet::WholeSpace { .. } => SetSpec::WholeSpace,
            ConvexSet::Singleton { point } => SetSpec::Singleton {
                point: point.as_slice().to_vec(),
            },
            ConvexSet::Ball { center, radius } => SetSpec::Ball {
                center: center.as_slice().to_vec(),
                radius: *radius,
            },
            ConvexSet::AffineSubspace { anchor, basis } => SetSpec::AffineSubspace {
                anchor: anchor.as_slice().to_vec(),
                basis: cols(basis),
            },
            ConvexSet::Box { lower, upper } => SetSpec::Box {
                lower: lower.iter().map(|v| bound(*v)).collect(),
                upper: upper.iter().map(|v| bound(*v)).collect(),
            },
            ConvexSet::Ray { direction } => SetSpec::Ray {
                direction: direction.as_slice().to_vec(),
            },
            ConvexSet::Halfspace { normal, offset } => SetSpec::Halfspace {
                normal: normal.as_slice().to_vec(),
                offset: *offset,
            },
            ConvexSet::Orthant { signs } => SetSpec::Orthant {
                signs: signs.clone(),
            },
            ConvexSet::SumBallSubspace {
                center,
                radius,
                basis,
            } => SetSpec::SumBallSubspace {
                center: center.as_slice().to_vec(),
                radius: *radius,
                basis: cols(basis),
            },
            ConvexSet::Shifted { base, shift } => SetSpec::Shifted {
                base: Box::new(SetSpec::from_set(base)),
                shift: shift.as_slice().to_vec(),
            },
        }
    }

    pub fn build(&self, dim: usize) -> Result<ConvexSet> {
        match self {
            SetSpec::WholeSpace => Ok(ConvexSet::whole_space(dim)),
            SetSpec::Singleton { point } => {
                ConvexSet::singleton(vec_to_point(point, dim, "singleton point")?)
            }
            SetSpec::Ball { center, radius } => {
                ConvexSet::ball(vec_to_point(center, dim, "ball center")?, *radius)
            }
            SetSpec::AffineSubspace { anchor, basis } => ConvexSet::affine_subspace(
                vec_to_point(anchor, dim, "subspace anchor")?,
                &rows_to_columns(basis, dim, "basis vector")?,
            ),
            SetSpec::Box { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    return Err(Error::InvalidInstance(format!(
                        "box bounds must have length {dim}"
                    )));
                }
                let l = DVector::from_fn(dim, |i, _| lower[i].value());
                let u = DVector::from_fn(dim, |i, _| upper[i].value());
                ConvexSet::hyper_box(l, u)
            }
            SetSpec::Ray { direction } => {
                ConvexSet::ray(vec_to_point(direction, dim, "ray direction")?)
            }
            SetSpec::Halfspace { normal, offset } => {
                ConvexSet::halfspace(vec_to_point(normal, dim, "halfspace normal")?, *offset)
            }
            SetSpec::Orthant { signs } => {
                if signs.len() != dim {
                    return Err(Error::InvalidInstance(format!(
                        "orthant signs must have length {dim}"
                    )));
                }
                ConvexSet::orthant(signs.clone())
            }
            SetSpec::SumBallSubspace {
                center,
                radius,
                basis,
            } => ConvexSet::sum_ball_subspace(
                vec_to_point(center, dim, "ball center")?,
                *radius,
                &rows_to_columns(basis, dim, "basis vector")?,
            ),
            SetSpec::Shifted { base, shift } => {
                ConvexSet::shifted(base.build(dim)?, vec_to_point(shift, dim, "shift")?)
            }
        }
    }
}

impl OperatorSpec {
    pub fn build(&self, dim: usize) -> Result<MonotoneOp> {
        match self {
            OperatorSpec::NormalCone { set } | OperatorSpec::Indicator { set } => {
                Ok(operators::normal_cone(set.build(dim)?))
            }
            OperatorSpec::SkewRotator { gamma, reversed } => {
                operators::skew_rotator(*gamma, dim, *reversed)
            }
            OperatorSpec::AffineNormal { u, u_perp, basis } => operators::affine_normal(
                vec_to_point(u, dim, "u")?,
                vec_to_point(u_perp, dim, "u_perp")?,
                &rows_to_columns(basis, dim, "basis vector")?,
            ),
            OperatorSpec::PsdLinear { matrix } => {
                if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(Error::InvalidInstance(format!(
                        "psd_linear matrix must be {dim}x{dim}"
                    )));
                }
                let m = DMatrix::from_fn(dim, dim, |i, j| matrix[i][j]);
                operators::psd_linear(m)
            }
            OperatorSpec::ProxQuadratic { center } => Ok(operators::prox_quadratic(vec_to_point(
                center, dim, "center",
            )?)),
            OperatorSpec::ProxL1 { weight } => operators::prox_l1(*weight, dim),
            OperatorSpec::Invert { of } => Ok(of.build(dim)?.invert()),
            OperatorSpec::DualNegate { of } => Ok(of.build(dim)?.dual_negate()),
        }
    }
}

impl InstanceFile {
    /// Parse a JSON document; serde errors carry line/column information.
    pub fn parse(text: &str) -> Result<InstanceFile> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInstance(format!("parse error: {e}")))?;
        if file.schema != 1 {
            return Err(Error::InvalidInstance(format!(
                "unsupported schema version {}",
                file.schema
            )));
        }
        if file.dim == 0 {
            return Err(Error::InvalidInstance("dim must be positive".into()));
        }
        match (&file.a, &file.b, &file.product) {
            (Some(_), Some(_), None) | (None, None, Some(_)) => Ok(file),
            _ => Err(Error::InvalidInstance(
                "provide either operators `a` and `b`, or a `product` wrapper".into(),
            )),
        }
    }

    pub fn build(&self) -> Result<BuiltInstance> {
        if let Some(p) = &self.product {
            let factors = p
                .factors
                .iter()
                .map(|f| f.build(self.dim))
                .collect::<Result<Vec<_>>>()?;
            return Ok(BuiltInstance::Product(product::lift(factors)?));
        }
        let a = self
            .a
            .as_ref()
            .expect("validated by parse")
            .build(self.dim)?;
        let b = self
            .b
            .as_ref()
            .expect("validated by parse")
            .build(self.dim)?;
        Ok(BuiltInstance::Pair(DrInstance::new(a, b)?))
    }

    /// Initial point for iteration: the file's `x0`, or the origin.
    pub fn x0(&self, lifted_dim: usize) -> Result<DVector<f64>> {
        match &self.run.x0 {
            Some(v) => vec_to_point(v, lifted_dim, "x0"),
            None => Ok(DVector::zeros(lifted_dim)),
        }
    }
}
