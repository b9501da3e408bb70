//! Expected number of real roots of random sparse polynomial and
//! exponential-sum systems.
//!
//! A space ([`ExpSumSpace`]) is a finite support `A ⊂ ℤⁿ` with squared
//! coefficients; random elements are `Σ fₐ αₐ e^{a·x}` with independent
//! standard normal `fₐ`. The crate computes
//!
//! * the Aronszajn product and powers of spaces ([`space`]),
//! * the potential, momentum map and pullback metric ([`kernel`]),
//! * mixed volumes of ellipsoids and lattice polytopes ([`convex`]),
//! * expected root densities and counts by quadrature ([`expectation`]),
//! * Monte Carlo root counts for cross-checking ([`montecarlo`]).
//!
//! Numerical code is generic over [`scalar::Real`] (`f32`, `f64`); space
//! algebra also runs over exact rationals. The aliases below fix the usual
//! choices.

pub mod convex;
pub mod domain;
pub mod error;
pub mod expectation;
pub mod kernel;
pub mod lattice;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod space;
pub mod verify;

pub use convex::{EllipsoidBody, LatticePolytope, MixedVolumeRule};
pub use domain::{DomainBox, DomainUnion, Region, SignedDomain};
pub use error::{Error, Result};
pub use expectation::{Estimate, QuadratureConfig};
pub use kernel::{EvaluationPoint, MetricMatrix, MomentumVector};
pub use space::{ExpSumSpace, SupportShape};

/// Double precision space.
pub type Space = ExpSumSpace<f64>;
/// Single precision space.
pub type Space32 = ExpSumSpace<f32>;
/// Space with exact rational squared coefficients.
pub type ExactSpace = ExpSumSpace<num_rational::BigRational>;
pub type Metric = MetricMatrix<f64>;
pub type Ellipsoid = EllipsoidBody<f64>;
pub type LogBox = DomainBox<f64>;
pub type Domain = DomainUnion<f64>;
pub type Signed = SignedDomain<f64>;
pub type Matrix = linalg::Matrix<f64>;
