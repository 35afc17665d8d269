//! Generation, filtering and mapping of equilibrium networks.
//!
//! The pipeline draws integer design parameters, expands them into the
//! inputs of a combinatorial equilibrium solve on a ring-tower topology,
//! discards forms that self-intersect in plan, and organizes the accepted
//! forms with a self-organizing map and a UMAP embedding.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the precisions the pipeline uses.

pub mod analysis;
pub mod cem;
pub mod dataset;
pub mod error;
pub mod filter;
pub mod generator;
pub mod matrix;
pub mod parallel;
pub mod pipeline;
pub mod scalar;
pub mod som;
pub mod umap;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Topology with double-precision start positions.
pub type Topology = cem::TopologyDiagram<f64>;
/// Solver inputs in double precision.
pub type Inputs = cem::CemInputs<f64>;
/// Solved form in double precision.
pub type Form = cem::FormDiagram<f64>;
pub type Point3 = vector::Vec3<f64>;
/// Feature rows as stored on disk.
pub type Features = matrix::Matrix<f32>;
/// Self-organizing map over stored features.
pub type Som = som::SomModel<f32>;
/// Two-dimensional embedding of stored features.
pub type Embedding2 = umap::Embedding<f32>;
