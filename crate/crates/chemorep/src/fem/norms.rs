//! L2/H1 norms of discrete fields and of differences against closed-form
//! exact fields, integrated with the fixed degree-6 rule.

use super::function::FeFunction;
use super::quadrature::quadrature;
use super::reference::eval_reference_basis;
use super::ASSEMBLY_QUADRATURE_DEGREE;
use crate::fields::{ScalarField, VectorField};

#[derive(Debug, Clone, Copy, Default)]
pub struct ScalarNorms {
    pub l2: f64,
    pub h1_semi: f64,
    /// Standard H1 norm: sqrt(l2^2 + h1_semi^2). Error tables use this.
    pub h1: f64,
    /// The equivalent mean-value variant sqrt(h1_semi^2 + (int u)^2).
    pub h1_mean: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VectorNorms {
    pub l2: f64,
    /// Frobenius seminorm of the Jacobian.
    pub h1_semi: f64,
    /// Standard H1 norm: sqrt(l2^2 + h1_semi^2).
    pub h1: f64,
    pub div_l2: f64,
    pub curl_l2: f64,
    /// The equivalent norm sqrt(l2^2 + div_l2^2 + curl_l2^2) on the space
    /// of normal-trace-free vector fields.
    pub hdiv_rot: f64,
}

/// Norms of `fn_h` itself, or of `fn_h - exact(t)` when an exact field is
/// provided.
pub fn scalar_norms(fn_h: &FeFunction, exact: Option<(&dyn ScalarField, f64)>) -> ScalarNorms {
    assert_eq!(fn_h.space().components(), 1);
    let space = fn_h.space();
    let mesh = space.mesh().clone();
    let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).expect("fixed rule");
    let tabs: Vec<_> = rule
        .points
        .iter()
        .map(|&p| eval_reference_basis(space.degree(), p))
        .collect();
    let coeffs = fn_h.coefficients();
    let mut l2_sq = 0.0;
    let mut semi_sq = 0.0;
    let mut mean = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.element_geometry(t).expect("valid mesh");
        let it = &geom.inverse_transpose;
        let (dofs, n_local) = space.scalar_dofs(t);
        for (q, &qp) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det;
            let (bv, bg) = &tabs[q];
            let mut v = 0.0;
            let mut gr = [0.0f64; 2];
            for i in 0..n_local {
                let c = coeffs[dofs[i]];
                v += c * bv[i];
                gr[0] += c * bg[i][0];
                gr[1] += c * bg[i][1];
            }
            let mut g = [
                it[0][0] * gr[0] + it[0][1] * gr[1],
                it[1][0] * gr[0] + it[1][1] * gr[1],
            ];
            if let Some((field, time)) = exact {
                let xy = mesh.map_point(t, qp);
                v -= field.value(xy[0], xy[1], time);
                let eg = field.gradient(xy[0], xy[1], time);
                g[0] -= eg[0];
                g[1] -= eg[1];
            }
            l2_sq += w * v * v;
            semi_sq += w * (g[0] * g[0] + g[1] * g[1]);
            mean += w * v;
        }
    }
    ScalarNorms {
        l2: l2_sq.sqrt(),
        h1_semi: semi_sq.sqrt(),
        h1: (l2_sq + semi_sq).sqrt(),
        h1_mean: (semi_sq + mean * mean).sqrt(),
    }
}

pub fn vector_norms(fn_h: &FeFunction, exact: Option<(&dyn VectorField, f64)>) -> VectorNorms {
    assert_eq!(fn_h.space().components(), 2);
    let space = fn_h.space();
    let mesh = space.mesh().clone();
    let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).expect("fixed rule");
    let tabs: Vec<_> = rule
        .points
        .iter()
        .map(|&p| eval_reference_basis(space.degree(), p))
        .collect();
    let coeffs = fn_h.coefficients();
    let ns = space.n_scalar_dofs();
    let mut l2_sq = 0.0;
    let mut semi_sq = 0.0;
    let mut div_sq = 0.0;
    let mut curl_sq = 0.0;
    for t in 0..mesh.n_triangles() {
        let geom = mesh.element_geometry(t).expect("valid mesh");
        let it = &geom.inverse_transpose;
        let (dofs, n_local) = space.scalar_dofs(t);
        for (q, &qp) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det;
            let (bv, bg) = &tabs[q];
            let mut v = [0.0f64; 2];
            let mut jr = [[0.0f64; 2]; 2];
            for i in 0..n_local {
                for comp in 0..2 {
                    let c = coeffs[comp * ns + dofs[i]];
                    v[comp] += c * bv[i];
                    jr[comp][0] += c * bg[i][0];
                    jr[comp][1] += c * bg[i][1];
                }
            }
            let mut jac = [[0.0f64; 2]; 2];
            for comp in 0..2 {
                jac[comp][0] = it[0][0] * jr[comp][0] + it[0][1] * jr[comp][1];
                jac[comp][1] = it[1][0] * jr[comp][0] + it[1][1] * jr[comp][1];
            }
            if let Some((field, time)) = exact {
                let xy = mesh.map_point(t, qp);
                let ev = field.value(xy[0], xy[1], time);
                let ej = field.jacobian(xy[0], xy[1], time);
                for c in 0..2 {
                    v[c] -= ev[c];
                    jac[c][0] -= ej[c][0];
                    jac[c][1] -= ej[c][1];
                }
            }
            l2_sq += w * (v[0] * v[0] + v[1] * v[1]);
            let frob = jac[0][0] * jac[0][0]
                + jac[0][1] * jac[0][1]
                + jac[1][0] * jac[1][0]
                + jac[1][1] * jac[1][1];
            semi_sq += w * frob;
            let div = jac[0][0] + jac[1][1];
            let curl = jac[1][0] - jac[0][1];
            div_sq += w * div * div;
            curl_sq += w * curl * curl;
        }
    }
    VectorNorms {
        l2: l2_sq.sqrt(),
        h1_semi: semi_sq.sqrt(),
        h1: (l2_sq + semi_sq).sqrt(),
        div_l2: div_sq.sqrt(),
        curl_l2: curl_sq.sqrt(),
        hdiv_rot: (l2_sq + div_sq + curl_sq).sqrt(),
    }
}
