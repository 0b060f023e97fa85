//! Exact growth functions of Coxeter systems.
//!
//! Sphere enumeration with descent data, counting identities over the
//! sphere sizes, rational growth series with exact convergence verdicts,
//! and residue/root geometry over finite balls of the chamber system.

pub mod classify;
pub mod cli;
pub mod element;
pub mod geometry;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod roots;
pub mod series;
pub mod stats;

pub use classify::{classify, poincare_polynomial, spherical_subsets, FiniteType, SphericalSubset, TypeLabel};
pub use element::{build_ball, Ball, DescentSet, Direction, ElementId, Engine, EngineError, GroupElement};
pub use matrix::{CoxeterMatrix, DiagramProperties, MatrixError, Order};
pub use oracle::oracle_reduce;
pub use poly::Poly;
pub use report::{Comparison, ExactValue, Verdict, VerificationReport};
pub use stats::{compute_k, compute_stats, Gate, SphereStats, StatsError};
