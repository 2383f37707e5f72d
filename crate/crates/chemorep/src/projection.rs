//! Elliptic (Ritz) projections onto the discrete spaces.
//!
//! The scalar projection R_h u satisfies, for all discrete test functions,
//! (grad(R_h u - u), grad w) + (R_h u - u, w) = 0; the vector projection
//! uses the div/rot/mass form instead. Both are used to initialize the
//! scheme and to split total errors into interpolation and discrete parts.
//!
//! Each projection owns a Cholesky factorization of its (time-independent)
//! operator, reused across right-hand sides.

use crate::error::{Error, Result};
use crate::fem::{
    assemble_bilinear, quadrature, BilinearForm, FeFunction, FeSpace, ASSEMBLY_QUADRATURE_DEGREE,
};
use crate::fields::{ScalarField, VectorField};
use crate::scheme::{Spaces, State};
use crate::sparse::{EnvelopeCholesky, SparseMatrix};
use std::sync::Arc;

/// A reusable elliptic projection onto one space.
pub struct ProjectionProblem {
    space: Arc<FeSpace>,
    matrix: SparseMatrix,
    factor: EnvelopeCholesky,
}

impl ProjectionProblem {
    /// Scalar projection in the (grad, grad) + (., .) form.
    pub fn scalar(space: Arc<FeSpace>) -> Result<Self> {
        if space.components() != 1 {
            return Err(Error::Dimension(
                "scalar projection needs a scalar space".into(),
            ));
        }
        let matrix = assemble_bilinear(&BilinearForm::AForm, &space, &space)?;
        let factor = EnvelopeCholesky::factor(&matrix)?;
        Ok(ProjectionProblem {
            space,
            matrix,
            factor,
        })
    }

    /// Vector projection in the (div, div) + (rot, rot) + (., .) form, on
    /// the constrained subspace.
    pub fn vector(space: Arc<FeSpace>) -> Result<Self> {
        if space.components() != 2 {
            return Err(Error::Dimension(
                "vector projection needs a vector space".into(),
            ));
        }
        let matrix = assemble_bilinear(&BilinearForm::BForm, &space, &space)?;
        let factor = EnvelopeCholesky::factor(&matrix)?;
        Ok(ProjectionProblem {
            space,
            matrix,
            factor,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Projects a scalar field at time `t`.
    pub fn project_scalar(&self, exact: &dyn ScalarField, t: f64) -> Result<FeFunction> {
        if self.space.components() != 1 {
            return Err(Error::Dimension(
                "project_scalar on a vector projection".into(),
            ));
        }
        let rhs = self.scalar_rhs(exact, t)?;
        self.solve(rhs)
    }

    /// Projects a vector field at time `t`; the right-hand side integrates
    /// the analytic divergence and scalar curl of the exact field against
    /// div/rot of the test functions.
    pub fn project_vector(&self, exact: &dyn VectorField, t: f64) -> Result<FeFunction> {
        if self.space.components() != 2 {
            return Err(Error::Dimension(
                "project_vector on a scalar projection".into(),
            ));
        }
        let rhs = self.vector_rhs(exact, t)?;
        self.solve(rhs)
    }

    fn solve(&self, rhs: Vec<f64>) -> Result<FeFunction> {
        let x = self.factor.solve(&rhs);
        // Projection contract: relative linear residual <= 1e-10.
        let ax = self.matrix.matvec_alloc(&x);
        let mut r2 = 0.0;
        let mut b2 = 0.0;
        for i in 0..rhs.len() {
            let r = rhs[i] - ax[i];
            r2 += r * r;
            b2 += rhs[i] * rhs[i];
        }
        if b2 > 0.0 && r2.sqrt() > 1e-10 * b2.sqrt() {
            return Err(Error::SolverConvergence {
                what: "ritz projection".into(),
                iterations: 0,
                residual: (r2 / b2).sqrt(),
            });
        }
        Ok(FeFunction::new(self.space.clone(), x))
    }

    fn scalar_rhs(&self, exact: &dyn ScalarField, t: f64) -> Result<Vec<f64>> {
        let mesh = self.space.mesh().clone();
        let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).expect("fixed rule");
        let tabs: Vec<_> = rule
            .points
            .iter()
            .map(|&p| crate::fem::eval_reference_basis(self.space.degree(), p))
            .collect();
        let mut rhs = vec![0.0; self.space.n_dofs()];
        for tr in 0..mesh.n_triangles() {
            let geom = mesh.element_geometry(tr)?;
            let it = &geom.inverse_transpose;
            let (dofs, n_local) = self.space.scalar_dofs(tr);
            for (q, &qp) in rule.points.iter().enumerate() {
                let w = rule.weights[q] * geom.det;
                let xy = mesh.map_point(tr, qp);
                let val = exact.value(xy[0], xy[1], t);
                let grad = exact.gradient(xy[0], xy[1], t);
                let (bv, bg) = &tabs[q];
                for i in 0..n_local {
                    let g = [
                        it[0][0] * bg[i][0] + it[0][1] * bg[i][1],
                        it[1][0] * bg[i][0] + it[1][1] * bg[i][1],
                    ];
                    rhs[dofs[i]] += w * (grad[0] * g[0] + grad[1] * g[1] + val * bv[i]);
                }
            }
        }
        Ok(rhs)
    }

    fn vector_rhs(&self, exact: &dyn VectorField, t: f64) -> Result<Vec<f64>> {
        let mesh = self.space.mesh().clone();
        let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).expect("fixed rule");
        let tabs: Vec<_> = rule
            .points
            .iter()
            .map(|&p| crate::fem::eval_reference_basis(self.space.degree(), p))
            .collect();
        let ns = self.space.n_scalar_dofs();
        let mut rhs = vec![0.0; self.space.n_dofs()];
        for tr in 0..mesh.n_triangles() {
            let geom = mesh.element_geometry(tr)?;
            let it = &geom.inverse_transpose;
            let (dofs, n_local) = self.space.scalar_dofs(tr);
            for (q, &qp) in rule.points.iter().enumerate() {
                let w = rule.weights[q] * geom.det;
                let xy = mesh.map_point(tr, qp);
                let val = exact.value(xy[0], xy[1], t);
                let div = exact.divergence(xy[0], xy[1], t);
                let rot = exact.curl(xy[0], xy[1], t);
                let (bv, bg) = &tabs[q];
                for i in 0..n_local {
                    let g = [
                        it[0][0] * bg[i][0] + it[0][1] * bg[i][1],
                        it[1][0] * bg[i][0] + it[1][1] * bg[i][1],
                    ];
                    // Test (phi_i, 0): div = d phi/dx, rot = -d phi/dy.
                    rhs[dofs[i]] += w * (div * g[0] + rot * (-g[1]) + val[0] * bv[i]);
                    // Test (0, phi_i): div = d phi/dy, rot = d phi/dx.
                    rhs[ns + dofs[i]] += w * (div * g[1] + rot * g[0] + val[1] * bv[i]);
                }
            }
        }
        for (dof, &con) in self.space.constrained_flags().iter().enumerate() {
            if con {
                rhs[dof] = 0.0;
            }
        }
        Ok(rhs)
    }
}

/// The three projections used by the scheme: R_h^u, R_h^sigma, R_h^v.
pub struct Projector {
    pub u: ProjectionProblem,
    pub sigma: ProjectionProblem,
    pub v: ProjectionProblem,
}

impl Projector {
    pub fn new(spaces: &Spaces) -> Result<Self> {
        Ok(Projector {
            u: ProjectionProblem::scalar(spaces.u.clone())?,
            sigma: ProjectionProblem::vector(spaces.sigma.clone())?,
            v: ProjectionProblem::scalar(spaces.v.clone())?,
        })
    }

    /// Initializes the scheme's state as the Ritz projections of the
    /// initial data (u0, sigma0, v0) at t = 0.
    pub fn initialize(
        &self,
        u0: &dyn ScalarField,
        sigma0: &dyn VectorField,
        v0: &dyn ScalarField,
    ) -> Result<State> {
        Ok(State {
            n: 0,
            t: 0.0,
            u: self.u.project_scalar(u0, 0.0)?,
            sigma: self.sigma.project_vector(sigma0, 0.0)?,
            v: self.v.project_scalar(v0, 0.0)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::scalar_norms;
    use crate::fields::{ScalarClosure, ZeroVector};
    use crate::mesh::Mesh;
    use crate::mms::ExactSolution;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn constant_field(c: f64) -> impl ScalarField {
        ScalarClosure {
            value: move |_x: f64, _y: f64, _t: f64| c,
            gradient: |_x: f64, _y: f64, _t: f64| [0.0, 0.0],
        }
    }

    #[test]
    fn projection_of_constant_is_exact() {
        let mesh = Arc::new(Mesh::unit_square(4).unwrap());
        let space = FeSpace::scalar(mesh, 1).unwrap();
        let proj = ProjectionProblem::scalar(space).unwrap();
        let r = proj.project_scalar(&constant_field(1.0), 0.0).unwrap();
        for c in r.coefficients() {
            assert_abs_diff_eq!(*c, 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn projection_is_idempotent_on_discrete_fields() {
        // An affine field lies in the P1 space, so its projection is its
        // interpolant.
        let mesh = Arc::new(Mesh::unit_square(3).unwrap());
        let space = FeSpace::scalar(mesh, 1).unwrap();
        let proj = ProjectionProblem::scalar(space.clone()).unwrap();
        let field = ScalarClosure {
            value: |x: f64, y: f64, _t: f64| 2.0 * x - y + 0.25,
            gradient: |_x: f64, _y: f64, _t: f64| [2.0, -1.0],
        };
        let r = proj.project_scalar(&field, 0.0).unwrap();
        let interp = FeFunction::interpolate_scalar(space, |x, y| 2.0 * x - y + 0.25);
        for (a, b) in r.coefficients().iter().zip(interp.coefficients()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn galerkin_orthogonality_residual() {
        let mesh = Arc::new(Mesh::unit_square(8).unwrap());
        let space = FeSpace::scalar(mesh, 1).unwrap();
        let proj = ProjectionProblem::scalar(space.clone()).unwrap();
        let exact = ExactSolution::new();
        let r = proj.project_scalar(&exact.u, 0.0).unwrap();
        // Residual functional applied to random discrete test functions.
        let rhs = proj.scalar_rhs(&exact.u, 0.0).unwrap();
        let ax = proj.matrix.matvec_alloc(r.coefficients());
        let resid: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..20 {
            let phi: Vec<f64> = (0..space.n_dofs())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let val: f64 = phi.iter().zip(&resid).map(|(p, r)| p * r).sum();
            assert!(val.abs() <= 1e-9, "residual functional {val}");
        }
    }

    #[test]
    fn mean_value_preserved() {
        // Testing the defining identity with the constant function shows
        // int(R_h u) = int(u); for the reference u0 the mean is exactly 2.
        let mesh = Arc::new(Mesh::unit_square(16).unwrap());
        let space = FeSpace::scalar(mesh, 1).unwrap();
        let proj = ProjectionProblem::scalar(space.clone()).unwrap();
        let exact = ExactSolution::new();
        let r = proj.project_scalar(&exact.u, 0.0).unwrap();
        let mass = assemble_bilinear(&BilinearForm::Mass, &space, &space).unwrap();
        let ones = vec![1.0; space.n_dofs()];
        let integral = mass.bilinear(&ones, r.coefficients());
        assert_abs_diff_eq!(integral, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn sigma_projection_respects_constraints_and_v0_constant_gives_zero() {
        let mesh = Arc::new(Mesh::unit_square(8).unwrap());
        let space = FeSpace::vector(mesh, 1).unwrap();
        let proj = ProjectionProblem::vector(space.clone()).unwrap();
        // v0 constant means sigma0 = grad v0 = 0.
        let zero = proj.project_vector(&ZeroVector, 0.0).unwrap();
        for c in zero.coefficients() {
            assert_abs_diff_eq!(*c, 0.0, epsilon = 1e-12);
        }
        let exact = ExactSolution::new();
        let r = proj.project_vector(&exact.sigma, 0.0).unwrap();
        for (dof, &con) in space.constrained_flags().iter().enumerate() {
            if con {
                assert_eq!(r.coefficients()[dof], 0.0);
            }
        }
    }

    #[test]
    fn initialization_preserves_initial_mass() {
        let mesh = Arc::new(Mesh::unit_square(10).unwrap());
        let spaces = Spaces::standard(mesh).unwrap();
        let projector = Projector::new(&spaces).unwrap();
        let exact = ExactSolution::new();
        let state = projector
            .initialize(&exact.u, &exact.sigma, &exact.v)
            .unwrap();
        let mass_matrix = assemble_bilinear(&BilinearForm::Mass, &spaces.u, &spaces.u).unwrap();
        let ones = vec![1.0; spaces.u.n_dofs()];
        let m0 = mass_matrix.bilinear(&ones, state.u.coefficients());
        assert_abs_diff_eq!(m0, 2.0, epsilon = 1e-10);
        assert_eq!(state.n, 0);
        // All three fields have finite, nonzero norms.
        assert!(scalar_norms(&state.u, None).h1 > 0.0);
        assert!(scalar_norms(&state.v, None).h1 > 0.0);
    }

    #[test]
    fn scalar_projection_converges_at_second_order() {
        let exact = ExactSolution::new();
        let mut errors = Vec::new();
        for m in [10usize, 20] {
            let mesh = Arc::new(Mesh::unit_square(m).unwrap());
            let space = FeSpace::scalar(mesh, 1).unwrap();
            let proj = ProjectionProblem::scalar(space).unwrap();
            let r = proj.project_scalar(&exact.u, 0.0).unwrap();
            errors.push(scalar_norms(&r, Some((&exact.u, 0.0))).l2);
        }
        let ratio = errors[0] / errors[1];
        assert!(
            (3.2..5.0).contains(&ratio),
            "L2 ratio under refinement: {ratio}"
        );
    }
}
