//! Pointwise algebraic-curvature toolkit for sectional-curvature pinching
//! estimates on four-dimensional gradient shrinking Ricci solitons.
//!
//! Modules:
//! - [`tensor`]: algebraic curvature tensors in an orthonormal frame,
//!   contractions, Kulkarni–Nomizu products and the modified tensor `R̄m`.
//! - [`sectional`]: minimum sectional curvature over `G(2, n)`.
//! - [`estimates`]: the two pointwise pinching estimates, their convex
//!   combination and the eigenbasis σ-profile model.
//! - [`campaign`]: seeded Monte Carlo verification campaigns.
//! - [`functional`]: the auxiliary three-tensor `F`, `|F|²`, `Q₁`, `Q₂` and
//!   the maximization of `Q₂`.
//! - [`models`]: closed-form model geometries and their pinching ratios.

pub mod campaign;
pub mod error;
pub mod estimates;
pub mod functional;
pub mod models;
pub mod optim;
pub mod rational;
pub mod scalar;
pub mod sectional;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::{parse_rational, Arithmetic, Exact, Rational, Scalar};
pub use tensor::{AlgCurvTensor, Plane, SymTensor2};
