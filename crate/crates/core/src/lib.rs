#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::many_single_char_names, clippy::neg_cmp_op_on_partial_ord)]

//! First-order convex optimization with runtime certificates.
//!
//! Every method in this crate comes with the potential function that proves
//! its convergence or regret bound. The [`certify`] module evaluates those
//! potentials along a recorded [`Trace`] and checks the per-step inequality
//! and the end-to-end bound numerically, so a run either carries a passing
//! certificate or points at the exact step where the argument broke.
//!
//! The crate is `no_std` (with `alloc`). All transcendental functions go
//! through `libm`, which keeps traces bit-identical across targets.
//!
//! * [`vector`], [`norm`], [`set`]: vectors, the ℓ2/ℓ1/ℓ∞ norm family and
//!   feasible sets with Euclidean projection and linear minimization.
//! * [`problem`]: objectives with declared constants, online adversaries and
//!   a finite-difference gradient checker.
//! * [`descent`]: online, projected and strongly convex gradient descent.
//! * [`smooth`]: 1/β steps, projected smooth steps, Frank–Wolfe,
//!   well-conditioned descent and the general-norm smooth step.
//! * [`mirror`]: mirror maps, Bregman divergences and projections, mirror
//!   descent and the Hedge closed form.
//! * [`accel`]: Nesterov acceleration in its coupled, momentum, constrained,
//!   general-norm and strongly convex forms, plus restarts.
//! * [`certify`]: potentials, step certificates and run certificates.

extern crate alloc;

pub mod accel;
pub mod certify;
pub mod descent;
mod error;
pub mod mirror;
pub mod norm;
pub mod problem;
pub mod set;
pub mod smooth;
pub mod trace;
pub mod vector;

pub use error::{Error, Result};
pub use norm::NormKind;
pub use problem::{Objective, OnlineAdversary};
pub use set::FeasibleSet;
pub use trace::{State, Step, Trace};
pub use vector::Vector;

#[doc(hidden)]
pub mod __private {
    pub use alloc::vec;
}

/// Absolute tolerance used by every membership test.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
