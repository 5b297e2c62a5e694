//! Monotone-operator splitting toolkit: the Douglas-Rachford operator, its
//! displacement map, range diagnostics, and minimal displacement vectors on
//! finite-dimensional instances.
//!
//! The crate is organized around five layers:
//!
//! - [`sets`]: a catalog of closed convex sets with exact projection,
//!   recession-cone, and polar-cone oracles;
//! - [`operators`]: maximally monotone operators as resolvent oracles, a
//!   constructor catalog, and the inverse / dual-negation transforms;
//! - [`splitting`]: the operator `T = Id - J_A + J_B R_A`, iteration with
//!   trace capture, minimal-displacement estimators, and range-membership
//!   probing;
//! - [`ranges`]: descriptors for `D = dom A - dom B` and
//!   `R = ran A + ran B`, the split vectors `v_D`, `v_R`, and sufficient
//!   condition classification;
//! - [`product`] and [`oracle`]: the product-space lift for m operators and
//!   brute-force cross-checks used by the test suites.
//!
//! Instance files (see [`schema`]) drive the command-line front end.

pub mod error;
pub mod linalg;
pub mod operators;
pub mod oracle;
pub mod product;
pub mod ranges;
pub mod schema;
pub mod sets;
pub mod splitting;

pub use error::{Error, Result};
pub use operators::{GraphPoint, MonotoneOp, Rectangularity};
pub use sets::{project_intersection, ConvexSet, Point};
pub use splitting::{DrInstance, IterationTrace};
