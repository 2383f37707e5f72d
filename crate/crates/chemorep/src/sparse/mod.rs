//! Sparse matrix storage and the linear solvers used by the scheme.
//!
//! Assembled systems come in two flavors: symmetric positive definite
//! (mass/elliptic operators, projections, the `v` recovery) and
//! nonsymmetric (the coupled Picard/Newton block systems, which carry
//! transport terms). SPD systems go through conjugate gradients or a
//! reusable envelope Cholesky factorization; nonsymmetric systems go
//! through BiCGStab with a banded-LU direct fallback.

mod csr;
mod direct;
mod krylov;

pub use csr::{BlockLayout, SparseMatrix};
pub use direct::{reverse_cuthill_mckee, BandLu, EnvelopeCholesky};
pub use krylov::{bicgstab, cg, solve_general, solve_spd, SolveStats};

/// Dense coefficient vector helpers (plain `Vec<f64>` is the carrier).
pub mod vec_ops {
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn norm2(a: &[f64]) -> f64 {
        dot(a, a).sqrt()
    }

    /// y += alpha * x
    pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }
}
