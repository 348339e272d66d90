//! Numerical laboratory for Liouville-type results on the p-Laplacian.
//!
//! Modules map onto the computable objects of the theory:
//!
//! * [`exponents`] - problem parameters, the Serrin and equation critical
//!   exponents, regime classification.
//! * [`radial`] - the radial p-Laplacian (closed form and a conservative
//!   finite-difference oracle) and the catalog of radial profiles.
//! * [`barriers`] - the explicit supersolution counterexample, cutoff and
//!   logarithmic barriers, Hadamard three-sphere bounds.
//! * [`shooting`] - the radial initial value problem from the origin,
//!   trajectory classification, decay rates and the radial Pohozaev identity.
//! * [`bvp`] - radial Dirichlet problems on annuli and the comparison principle.
//! * [`identities`] - the iteration recursion bound and a Caccioppoli check.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barriers;
pub mod bvp;
pub mod error;
pub mod exponents;
pub mod identities;
pub mod ode;
pub mod quad;
pub mod radial;
pub mod report;
pub mod shooting;

pub use error::{Error, Result};
pub use exponents::{Operator, ProblemParams, Regime};
pub use radial::{EvalPoint, GridProfile, ProfileSpec, RadialProfile};
pub use report::IdentityReport;
