//! Numerical laboratory for weighted heat-flow smoothing, sparse domination
//! on shifted dyadic grids, Muckenhoupt-type constants and mild solutions of
//! the Hardy-Henon parabolic equation `u_t - Δu = V u^τ`.
//!
//! Module map:
//! - [`grid`]: sampled fields on a truncated box, shifted dyadic cubes, scans.
//! - [`weights`]: weight descriptors, cube integrals, `A_p`/`A_∞`/two-weight
//!   and Morrey constants, admissibility checkers.
//! - [`sparse`]: dyadic maximal functions, stopping-time sparse families,
//!   fractional sparse operators and the fractional integral.
//! - [`heat`]: Gaussian semigroup on sampled fields and smoothing scans.
//! - [`hh_solver`]: Duhamel quadrature and Picard iteration.

// Negated comparisons such as `!(p > 1.0)` are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod heat;
pub mod hh_solver;
pub mod quadrature;
pub mod sparse;
pub mod weights;

pub use error::{Error, Result};
