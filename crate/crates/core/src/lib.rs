//! Hamilton-Jacobi counterterms for one-dimensional half-binding potentials.
//!
//! A particle in a repulsive potential such as `V = 1/q²` escapes to
//! infinity, and its on-shell action grows without bound. Subtracting a
//! boundary term built from a solution of the Hamilton-Jacobi equation
//! makes the action finite and the variational problem well posed.
//! The [`dilaton`] module evaluates the analogous boundary term for
//! two-dimensional dilaton gravity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod cli;
pub mod counterterm;
pub mod dilaton;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod potential;
pub mod report;

pub use error::{Error, Result};
