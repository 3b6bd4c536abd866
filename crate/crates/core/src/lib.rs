//! Numerical toolkit for average-radius multiple packings in Euclidean space.
//!
//! The crate is split along the lines of the construction it supports:
//!
//! * [`geometry`]: average squared radius (four equivalent formulas), the
//!   Chebyshev radius via a certified simplex-dual solver and a brute-force
//!   circumball oracle, the `p`-relaxations, and the quadratic form
//!   `A = I - J/L` with its orthonormal eigenbasis.
//! * [`bounds`]: closed-form capacity bounds, the exponent `E(K)`, the
//!   optimal tilt and the critical point density `lambda_n`.
//! * [`deviation`]: log-MGF of the quadratic form over the cube, the
//!   finite-`K` Cramér rate, a Laplace-asymptotics check and Monte Carlo
//!   tail estimates.
//! * [`construction`]: uniform random codes on `[-K, K]^n`, bad-list search,
//!   expurgation, periodic tiling, packing verification and density
//!   estimates.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod construction;
pub mod deviation;
mod error;
pub mod geometry;
pub mod rng;

pub use error::{Error, Result};

pub use bounds::{BoundQuery, ExponentQuery};
pub use construction::{Constellation, DensityReport, FiniteCode, Verdict};
pub use deviation::{RateFunctionResult, TailEstimate};
pub use geometry::{AvgRadiusFormula, ChebResult, PointList, SimplexWeights, SpectralPair};
