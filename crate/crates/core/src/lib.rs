//! Circle patterns with prescribed intersection angles on quasi-simplicial
//! surface triangulations.
//!
//! The crate is organised bottom-up: [`complex`] holds the combinatorics,
//! [`covering`] builds finite abelian covers, [`geometry`] computes edge
//! lengths, angles and curvatures, [`kat`] checks the subset inequalities
//! that decide whether a curvature target is attainable, and [`solver`]
//! finds the radii.

pub mod complex;
pub mod covering;
pub mod fixtures;
pub mod geometry;
pub mod io;
pub mod kat;
pub mod solver;

pub use complex::{ComplexError, DeltaComplex, Edge, Orientation, Triangle, VertexTriple};
pub use covering::{Covering, CoveringError, VoltageAssignment};
pub use geometry::{AngleData, Background, CurvatureVector, GeometryError, PackingMetric};
