//! Numerical laboratory for minimal surfaces of the product sphere.
//!
//! The crate builds gridded conformal immersions into `S²×S²`, `S³` and
//! `S²×ℝ` from explicit formulas and moving-frame integration, extracts
//! their geometric invariants (Kähler functions, curvatures, Hopf
//! differential, fundamental data) with high-order finite differences,
//! and verifies the structure equations that tie them together.
//!
//! Module map:
//! - [`cxgrid`]: grids in the conformal parameter, Wirtinger derivatives,
//!   quadrature, residual norms, CSV/JSON field containers.
//! - [`grassmann`]: exact algebra of `Λ²ℝ⁴`, the star operator and the
//!   identification `G⁺(2,4) ≅ S²₊×S²₋`.
//! - [`s3min`]: conformal minimal surfaces in `S³` and their Frenet
//!   integrator.
//! - [`s2xs2`]: the example catalog (slices, diagonal, Clifford torus,
//!   Weierstrass tori, graphs) and invariant extraction.
//! - [`frenet`]: fundamental data, compatibility residuals and the
//!   moving-frame integrator for `S²×S²`.
//! - [`sinhgordon`]: the sinh-Gordon equation, exact one-dimensional
//!   orbits and the Kähler-function change of variables.
//! - [`gaussbridge`]: Gauss maps of pairs of `S³` surfaces, the `S²×ℝ`
//!   specialization and the two-route round trip.
//! - [`validator`]: cross-cutting identity suites and classification.

pub mod cxgrid;
pub mod error;
pub mod frenet;
pub mod gaussbridge;
pub mod grassmann;
mod interp;
mod rk4;
pub mod s2xs2;
pub mod s3min;
pub mod sinhgordon;
pub mod validator;

pub use cxgrid::{ComplexGrid, Field, ResidualNorm};
pub use error::{Error, Result};
pub use frenet::{AdaptedFrame, FundamentalData};
pub use grassmann::{BiVector4, DualSplit, Vector4r};
pub use s2xs2::{InvariantField, ProductImmersion, SurfaceMeta};
pub use s3min::S3Immersion;
pub use sinhgordon::SGSolution;
