//! # quadsub
//!
//! Sparse generalized polynomial chaos (gPC) recovery by ℓ1 minimization, with
//! collocation points drawn by randomly subsampling a tensor-product Gauss
//! quadrature grid.
//!
//! The building blocks, bottom-up:
//!
//! * [`orthopoly`] – orthonormal univariate families (Jacobi/Beta, Hermite,
//!   Laguerre), Christoffel functions and Christoffel-weighted polynomials.
//! * [`quadrature`] – Gauss rules from recurrence coefficients (Golub–Welsch on
//!   an implicit-shift QL eigensolver) and lazily indexed tensor-product rules.
//! * [`indexset`] – total-degree and tensor multi-index sets.
//! * [`sampling`] – subsampled Gauss grids and iid sampling strategies.
//! * [`design`] – the weighted design matrix `D = sqrt(W) Psi`.
//! * [`bpsolver`] – ADMM basis pursuit, best s-term errors and success tests.
//! * [`bounds`] – sup-norm bounds of the weighted polynomials, the product
//!   bound, Mhaskar–Rakhmanov–Saff numbers, sample counts and brute-force RIC.
//! * [`models`] – target functions (sparse synthetic, analytic, random ODE).
//! * [`harness`] – seeded experiments writing CSV.
//!
//! ```
//! use quadsub::orthopoly::{MarginalDistribution, PolynomialFamily};
//! use quadsub::quadrature::gauss_rule;
//!
//! let family = PolynomialFamily::build(MarginalDistribution::uniform(), 4).unwrap();
//! let rule = gauss_rule(&family, 2).unwrap();
//! assert!((rule.nodes()[1] - 1.0 / 3f64.sqrt()).abs() < 1e-14);
//! assert!((rule.weights()[0] - 0.5).abs() < 1e-14);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod bpsolver;
pub mod design;
mod error;
pub mod harness;
pub mod indexset;
pub mod models;
pub mod orthopoly;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
