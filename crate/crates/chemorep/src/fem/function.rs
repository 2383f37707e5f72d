//! Discrete fields: a coefficient vector tagged with its space.

use super::space::{eval_basis, FeSpace};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct FeFunction {
    space: Arc<FeSpace>,
    coefficients: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: Arc<FeSpace>, coefficients: Vec<f64>) -> Self {
        assert_eq!(
            coefficients.len(),
            space.n_dofs(),
            "coefficient length must match the space's DOF count"
        );
        FeFunction {
            space,
            coefficients,
        }
    }

    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let n = space.n_dofs();
        FeFunction {
            space,
            coefficients: vec![0.0; n],
        }
    }

    /// Nodal interpolation of a scalar field (scalar spaces only).
    pub fn interpolate_scalar(space: Arc<FeSpace>, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(space.components(), 1);
        let coefficients = space
            .scalar_dof_points()
            .iter()
            .map(|p| f(p[0], p[1]))
            .collect();
        FeFunction {
            space,
            coefficients,
        }
    }

    /// Nodal interpolation of a vector field (vector spaces only). The
    /// constrained boundary DOFs are not zeroed; callers that need the
    /// constrained subspace apply `FeSpace::apply_constraints`.
    pub fn interpolate_vector(space: Arc<FeSpace>, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        assert_eq!(space.components(), 2);
        let pts = space.scalar_dof_points();
        let ns = space.n_scalar_dofs();
        let mut coefficients = vec![0.0; space.n_dofs()];
        for (s, p) in pts.iter().enumerate() {
            let v = f(p[0], p[1]);
            coefficients[s] = v[0];
            coefficients[ns + s] = v[1];
        }
        FeFunction {
            space,
            coefficients,
        }
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    /// Value and physical gradient at reference point `p` of triangle `t`
    /// (scalar spaces).
    pub fn eval_scalar(&self, t: usize, p: [f64; 2]) -> (f64, [f64; 2]) {
        debug_assert_eq!(self.space.components(), 1);
        let (values, grads) = eval_basis(&self.space, t, p);
        let (dofs, n) = self.space.scalar_dofs(t);
        let mut v = 0.0;
        let mut g = [0.0, 0.0];
        for i in 0..n {
            let c = self.coefficients[dofs[i]];
            v += c * values[i];
            g[0] += c * grads[i][0];
            g[1] += c * grads[i][1];
        }
        (v, g)
    }

    /// Value and Jacobian (rows are components) at reference point `p` of
    /// triangle `t` (vector spaces).
    pub fn eval_vector(&self, t: usize, p: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        debug_assert_eq!(self.space.components(), 2);
        let (values, grads) = eval_basis(&self.space, t, p);
        let (dofs, n) = self.space.scalar_dofs(t);
        let ns = self.space.n_scalar_dofs();
        let mut v = [0.0, 0.0];
        let mut jac = [[0.0, 0.0], [0.0, 0.0]];
        for i in 0..n {
            for comp in 0..2 {
                let c = self.coefficients[comp * ns + dofs[i]];
                v[comp] += c * values[i];
                jac[comp][0] += c * grads[i][0];
                jac[comp][1] += c * grads[i][1];
            }
        }
        (v, jac)
    }

    /// Coefficient-wise difference with another function on the same space.
    pub fn sub(&self, other: &FeFunction) -> FeFunction {
        assert!(Arc::ptr_eq(&self.space, &other.space));
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a - b)
            .collect();
        FeFunction {
            space: self.space.clone(),
            coefficients,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p1_reproduces_linears() {
        let mesh = Arc::new(Mesh::unit_square(3).unwrap());
        let space = FeSpace::scalar(mesh.clone(), 1).unwrap();
        let f = FeFunction::interpolate_scalar(space, |x, y| x + y);
        for t in 0..mesh.n_triangles() {
            let centroid = [1.0 / 3.0, 1.0 / 3.0];
            let phys = mesh.map_point(t, centroid);
            let (v, g) = f.eval_scalar(t, centroid);
            assert_abs_diff_eq!(v, phys[0] + phys[1], epsilon = 1e-14);
            assert_abs_diff_eq!(g[0], 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(g[1], 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn p2_reproduces_quadratics() {
        let mesh = Arc::new(Mesh::unit_square(2).unwrap());
        let space = FeSpace::scalar(mesh.clone(), 2).unwrap();
        let f = FeFunction::interpolate_scalar(space, |x, _y| x * x);
        for &(t, p) in &[(0usize, [0.21, 0.37]), (3, [0.11, 0.52]), (5, [0.4, 0.4])] {
            let phys = mesh.map_point(t, p);
            let (v, g) = f.eval_scalar(t, p);
            assert_abs_diff_eq!(v, phys[0] * phys[0], epsilon = 1e-13);
            assert_abs_diff_eq!(g[0], 2.0 * phys[0], epsilon = 1e-12);
            assert_abs_diff_eq!(g[1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zeros_evaluate_to_zero() {
        let mesh = Arc::new(Mesh::unit_square(2).unwrap());
        let space = FeSpace::vector(mesh, 1).unwrap();
        let f = FeFunction::zeros(space);
        let (v, jac) = f.eval_vector(1, [0.3, 0.3]);
        assert_eq!(v, [0.0, 0.0]);
        assert_eq!(jac, [[0.0, 0.0], [0.0, 0.0]]);
    }
}
