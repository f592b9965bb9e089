//! Symplectic tomography of one-dimensional classical and quantum states.
//!
//! A tomogram `W(X, mu, nu)` is the probability density of `X = mu q + nu p`.
//! The crate computes tomograms of phase-space densities, trajectories and
//! wave functions, inverts tomogram families back to phase-space densities,
//! Wigner functions and density matrices, and runs convergence studies of the
//! quantum tomograms towards their classical counterparts as `hbar -> 0`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod limits;
pub mod phase;
pub mod quadrature;
pub mod quantum;
pub mod special;

pub use error::{Result, TomoError};
pub use phase::{DeltaAtom, GridFunction2D, Tomogram, TomographyFrame, UniformGrid};
