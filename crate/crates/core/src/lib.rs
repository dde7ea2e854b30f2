//! Conic optimization by dual path following.
//!
//! The solver follows the central path of the reduced dual problem
//! max{⟨b, y⟩ : c − A*y ∈ K*} with a predictor-corrector scheme driven by a
//! gradient proximity measure. The neighborhood of the central path tightens
//! proportionally to the penalty parameter, which turns the global linear
//! rate into a local superlinear one on problems whose dual optimum is sharp
//! and whose slack barrier has negative curvature.
//!
//! Crate layout mirrors the moving parts: [`linalg`] is the dense substrate,
//! [`cones`] holds barrier oracles, [`geometry`] the reduced dual quantities,
//! [`solver`] the predictor-corrector loop, [`diagnostics`] the numerical
//! certification layer, and [`io`]/[`generators`] the file format, example
//! problems, and the CLI surface.

pub mod cones;
pub mod diagnostics;
pub mod generators;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod solver;

pub mod cli;

pub use cones::{BarrierOracle, ConeDescriptor, Side, StepLimit};
pub use geometry::{ConicProblem, KnownOptimum, PathIterate};
pub use linalg::{LinearMap, SymOperator, Vec64};
pub use solver::{solve, ConvergenceTrace, IterateRecord, SolverConfig};
