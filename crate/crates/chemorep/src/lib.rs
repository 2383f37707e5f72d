//! Finite-element solver for a 2D chemo-repulsion model with quadratic
//! production.
//!
//! The model couples a cell density `u` with the gradient `sigma` of a
//! chemical concentration `v`. Time discretization is backward Euler posed
//! in the variables `(u, sigma)`, which makes the scheme mass-conservative
//! and unconditionally energy-stable; `v` is recovered afterwards from a
//! linear parabolic equation driven by `u^2`. The nonlinear step is solved
//! either by a Picard fixed-point iteration or by Newton's method.
//!
//! Crate layout:
//! - [`mesh`]: conforming triangulations of 2D polygonal domains;
//! - [`sparse`]: CSR matrices, Krylov solvers and direct factorizations;
//! - [`fem`]: Lagrange spaces (P1/P2, scalar and 2-vector), quadrature,
//!   assembly of all bilinear/linear forms, norms;
//! - [`fields`]: closed-form scalar/vector fields used as data;
//! - [`projection`]: elliptic (Ritz) projections used for initialization
//!   and discrete-error measurement;
//! - [`scheme`]: the backward-Euler stepper with Picard/Newton solvers and
//!   per-step conservation/energy diagnostics;
//! - [`mms`]: manufactured solutions, forcing terms, error accumulation
//!   and convergence tables;
//! - [`config`], [`workflows`], [`vtk`]: the command-line driver.

pub mod config;
pub mod error;
pub mod fem;
pub mod fields;
pub mod mesh;
pub mod mms;
pub mod projection;
pub mod scheme;
pub mod sparse;
pub mod vtk;
pub mod workflows;

pub use error::{Error, Result};
