//! Minimal front speeds for reaction-diffusion-advection equations
//! `u_t = Δu + b(x,t)·∇u + f(u)` with space-time periodic incompressible `b`.
//!
//! Speeds come from two independent routes: the variational formula
//! `c* = inf_{λ>0} μ(λ)/λ` over the principal eigenvalue of a periodic-parabolic
//! operator ([`eigensolver`], [`dispersion`]), and direct simulation with front
//! tracking ([`simulator`]).

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod eigensolver;
pub mod error;
pub mod fields;
pub mod grid;
pub mod quadrature;
pub mod reactions;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
pub use fields::{FieldKind, FieldSpec, TabulatedField};
pub use grid::CellGrid;
pub use reactions::ReactionSpec;
