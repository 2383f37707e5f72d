//! Lagrange finite-element spaces on triangles, quadrature and assembly.

mod assemble;
mod function;
mod norms;
mod quadrature;
mod reference;
mod space;

pub use assemble::{assemble_bilinear, assemble_linear, BilinearForm, LinearForm};
pub use function::FeFunction;
pub use norms::{scalar_norms, vector_norms, ScalarNorms, VectorNorms};
pub use quadrature::{quadrature, QuadratureRule};
pub use reference::{basis_count, eval_reference_basis, local_nodes};
pub use space::{eval_basis, BoundaryDof, FeSpace};

/// Fixed assembly rule: exact to polynomial degree 6. The worst integrand
/// among the scheme's forms at P1/P1/P2 is (u_h^2, v_bar) of degree 4, and
/// error integrands against trigonometric exact fields need headroom.
pub const ASSEMBLY_QUADRATURE_DEGREE: usize = 6;
