//! Degree-of-freedom maps for scalar and 2-vector Lagrange spaces.

use super::reference::{basis_count, eval_reference_basis};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use std::sync::Arc;

/// A boundary degree of freedom constrained by the strong `sigma . n = 0`
/// condition, with the outward normal that produced the constraint.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryDof {
    pub dof: usize,
    /// Constrained component: 0 = x, 1 = y.
    pub component: u8,
    pub normal: [f64; 2],
}

/// Scalar or 2-vector Lagrange space of degree 1 or 2 on a triangulation.
///
/// Scalar DOFs are numbered vertices-first (P2 appends one DOF per edge).
/// Vector spaces store all x-components first, then all y-components, so
/// the global DOF of component `c` at scalar DOF `s` is `c * n_scalar + s`.
///
/// Vector spaces carry the strong boundary condition `sigma . n = 0`:
/// on axis-aligned boundary edges the normal component of every DOF-node on
/// the edge is constrained (both components on non-axis-aligned edges, and
/// at corners where two differently-oriented edges meet).
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    degree: u8,
    components: u8,
    n_scalar: usize,
    constrained: Vec<bool>,
    boundary_dofs: Vec<BoundaryDof>,
}

impl FeSpace {
    pub fn scalar(mesh: Arc<Mesh>, degree: u8) -> Result<Arc<Self>> {
        Self::new(mesh, degree, 1)
    }

    pub fn vector(mesh: Arc<Mesh>, degree: u8) -> Result<Arc<Self>> {
        Self::new(mesh, degree, 2)
    }

    fn new(mesh: Arc<Mesh>, degree: u8, components: u8) -> Result<Arc<Self>> {
        if !(1..=2).contains(&degree) {
            return Err(Error::Config(format!(
                "element degree must be 1 or 2, got {degree}"
            )));
        }
        let n_scalar = match degree {
            1 => mesh.n_vertices(),
            _ => mesh.n_vertices() + mesh.n_edges(),
        };
        let n_dofs = n_scalar * components as usize;
        let mut constrained = vec![false; n_dofs];
        let mut boundary_dofs = Vec::new();
        if components == 2 {
            for &e in mesh.boundary_edges() {
                let edge = mesh.edge(e);
                let n = edge.normal.expect("boundary edge without normal");
                let mut scalar_dofs = vec![edge.vertices[0], edge.vertices[1]];
                if degree == 2 {
                    scalar_dofs.push(mesh.n_vertices() + e);
                }
                let axis_x = n[0].abs() > 0.999;
                let axis_y = n[1].abs() > 0.999;
                for s in scalar_dofs {
                    let mut constrain = |comp: usize| {
                        let dof = comp * n_scalar + s;
                        if !constrained[dof] {
                            constrained[dof] = true;
                            boundary_dofs.push(BoundaryDof {
                                dof,
                                component: comp as u8,
                                normal: n,
                            });
                        }
                    };
                    if axis_x {
                        constrain(0);
                    } else if axis_y {
                        constrain(1);
                    } else {
                        constrain(0);
                        constrain(1);
                    }
                }
            }
        }
        Ok(Arc::new(FeSpace {
            mesh,
            degree,
            components,
            n_scalar,
            constrained,
            boundary_dofs,
        }))
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn components(&self) -> u8 {
        self.components
    }

    pub fn n_scalar_dofs(&self) -> usize {
        self.n_scalar
    }

    pub fn n_dofs(&self) -> usize {
        self.n_scalar * self.components as usize
    }

    pub fn n_local(&self) -> usize {
        basis_count(self.degree)
    }

    /// Scalar DOF indices of triangle `t` (3 for P1, 6 for P2), in the
    /// local node order of the reference element.
    pub fn scalar_dofs(&self, t: usize) -> ([usize; 6], usize) {
        let tri = self.mesh.triangle(t);
        let mut out = [0usize; 6];
        out[..3].copy_from_slice(&tri);
        if self.degree == 1 {
            (out, 3)
        } else {
            let edges = self.mesh.triangle_edges(t);
            for le in 0..3 {
                out[3 + le] = self.mesh.n_vertices() + edges[le];
            }
            (out, 6)
        }
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained_flags(&self) -> &[bool] {
        &self.constrained
    }

    pub fn boundary_dofs(&self) -> &[BoundaryDof] {
        &self.boundary_dofs
    }

    /// Zeroes the constrained entries of a coefficient vector in place.
    pub fn apply_constraints(&self, coeffs: &mut [f64]) {
        for (c, flag) in coeffs.iter_mut().zip(&self.constrained) {
            if *flag {
                *c = 0.0;
            }
        }
    }

    /// Physical coordinates of every scalar DOF node (vertices, then edge
    /// midpoints for P2).
    pub fn scalar_dof_points(&self) -> Vec<[f64; 2]> {
        let mut pts = self.mesh.vertices().to_vec();
        if self.degree == 2 {
            for e in self.mesh.edges() {
                let a = self.mesh.vertex(e.vertices[0]);
                let b = self.mesh.vertex(e.vertices[1]);
                pts.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
        }
        pts
    }
}

/// Basis values and physical gradients of the scalar basis functions of
/// triangle `t` at reference point `p`.
pub fn eval_basis(space: &FeSpace, t: usize, p: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let (values, ref_grads) = eval_reference_basis(space.degree(), p);
    let geom = space
        .mesh()
        .element_geometry(t)
        .expect("valid triangle index");
    let grads = ref_grads
        .iter()
        .map(|g| {
            [
                geom.inverse_transpose[0][0] * g[0] + geom.inverse_transpose[0][1] * g[1],
                geom.inverse_transpose[1][0] * g[0] + geom.inverse_transpose[1][1] * g[1],
            ]
        })
        .collect();
    (values, grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::quadrature;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dof_counts() {
        let mesh = Arc::new(Mesh::unit_square(4).unwrap());
        let p1 = FeSpace::scalar(mesh.clone(), 1).unwrap();
        assert_eq!(p1.n_dofs(), mesh.n_vertices());
        let p2 = FeSpace::scalar(mesh.clone(), 2).unwrap();
        assert_eq!(p2.n_dofs(), mesh.n_vertices() + mesh.n_edges());
        let vec_p1 = FeSpace::vector(mesh.clone(), 1).unwrap();
        assert_eq!(vec_p1.n_dofs(), 2 * mesh.n_vertices());
    }

    #[test]
    fn partition_of_unity_at_quadrature_points() {
        let mesh = Arc::new(Mesh::unit_square(3).unwrap());
        let rule = quadrature(6).unwrap();
        for degree in [1u8, 2] {
            let space = FeSpace::scalar(mesh.clone(), degree).unwrap();
            for t in 0..mesh.n_triangles() {
                for &p in &rule.points {
                    let (values, grads) = eval_basis(&space, t, p);
                    let sum: f64 = values.iter().sum();
                    assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-14);
                    let gx: f64 = grads.iter().map(|g| g[0]).sum();
                    let gy: f64 = grads.iter().map(|g| g[1]).sum();
                    assert_abs_diff_eq!(gx, 0.0, epsilon = 1e-12);
                    assert_abs_diff_eq!(gy, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn vector_constraints_on_unit_square() {
        let m = 4;
        let mesh = Arc::new(Mesh::unit_square(m).unwrap());
        let space = FeSpace::vector(mesh.clone(), 1).unwrap();
        let ns = space.n_scalar_dofs();
        for v in 0..mesh.n_vertices() {
            let [x, y] = mesh.vertex(v);
            let on_vertical = x < 1e-14 || x > 1.0 - 1e-14;
            let on_horizontal = y < 1e-14 || y > 1.0 - 1e-14;
            assert_eq!(space.is_constrained(v), on_vertical, "x-dof at {x},{y}");
            assert_eq!(
                space.is_constrained(ns + v),
                on_horizontal,
                "y-dof at {x},{y}"
            );
        }
        // Corners have both components constrained.
        assert!(space.is_constrained(0) && space.is_constrained(ns));
        for bd in space.boundary_dofs() {
            let n = bd.normal;
            assert_abs_diff_eq!((n[0] * n[0] + n[1] * n[1]).sqrt(), 1.0, epsilon = 1e-14);
        }
    }
}
