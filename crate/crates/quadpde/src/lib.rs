#![recursion_limit = "256"]

//! Exact boundary-condition enforcement on curved quadrilateral domains.
//!
//! This crate constructs trial functions that satisfy Dirichlet, Neumann,
//! and Robin boundary conditions *exactly* (to machine precision) on general
//! quadrilateral domains with curved boundaries, and solves linear and
//! nonlinear PDEs on those domains with a random-feature least-squares
//! (extreme learning machine) method.
//!
//! # Architecture
//!
//! The pipeline has four layers:
//!
//! 1. **Geometry** ([`geometry`]): parametric boundary curves with analytic
//!    derivatives up to order 3, assembled into quadrilateral domains. A
//!    catalog of benchmark domains is included.
//! 2. **Mapping** ([`mapping`]): transfinite interpolation (Coons patch,
//!    optionally center-augmented) from the physical domain to the standard
//!    square `[-1,1]^2`, with Jacobians, edge metrics, and univalency audits.
//! 3. **Trial forms** ([`trial`]): constrained expressions
//!    `V = g - Pg + PF^g` that satisfy the prescribed boundary conditions for
//!    *any* free function `g`, exposed in affine form `V = c + B·β` where the
//!    columns of `B` come from a random feature network ([`features`]).
//! 4. **Solver** ([`solver`], [`problems`], [`harness`]): collocation of the
//!    PDE residual at interior points, dense least squares (SVD, minimum
//!    norm) for linear problems, and Gauss-Newton with perturbation restarts
//!    for nonlinear problems.
//!
//! All numerical kernels are generic over the scalar type via [`scalar::Scalar`]
//! (satisfied by `f32` and `f64`); concrete `f64` aliases are exported at the
//! crate root.

pub mod blend;
pub mod error;
pub mod features;
pub mod geometry;
pub mod harness;
pub mod jet;
pub mod mapping;
pub mod problems;
pub mod scalar;
pub mod solver;
pub mod trial;

pub use error::Error;
pub use scalar::Scalar;

// Concrete `f64` aliases for the main library types. The harness and CLI
// operate on these; generic code should use the underlying types directly.
pub type Point2F64 = geometry::Point2<f64>;
pub type ParametricCurveF64 = geometry::ParametricCurve<f64>;
pub type QuadDomainF64 = geometry::QuadDomain<f64>;
pub type DomainMapF64 = mapping::DomainMap<f64>;
pub type MapKindF64 = mapping::MapKind<f64>;
pub type FeatureNetF64 = features::FeatureNet<f64>;
pub type BcKindF64 = problems::BcKind<f64>;
pub type BcAssignmentF64 = problems::BcAssignment<f64>;
pub type SolveReportF64 = solver::SolveReport<f64>;
pub use harness::{RunConfig, Summary};
pub use problems::ProblemKind;
