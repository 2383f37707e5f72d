//! Local-to-global assembly of every bilinear and linear form the scheme
//! uses, on the fixed degree-6 rule.
//!
//! Vector-space constraints (`sigma . n = 0`) are applied here: constrained
//! rows/columns are dropped and square vector forms get a unit diagonal, so
//! constrained systems read `sigma_c = 0` against a zero right-hand side.

use super::function::FeFunction;
use super::quadrature::quadrature;
use super::reference::eval_reference_basis;
use super::space::FeSpace;
use super::ASSEMBLY_QUADRATURE_DEGREE;
use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use std::sync::Arc;

/// Bilinear forms. Frozen coefficient fields are the Picard/Newton
/// linearization points.
pub enum BilinearForm<'a> {
    /// (u, u_bar) on a scalar space, or (sigma, sigma_bar) on a vector one.
    Mass,
    /// (grad u, grad u_bar); componentwise full gradient on vector spaces.
    Stiffness,
    /// (grad u, grad u_bar) + (u, u_bar) on a scalar space.
    AForm,
    /// (div sigma, div sigma_bar) + (rot sigma, rot sigma_bar)
    /// + (sigma, sigma_bar) on a vector space, rot sigma = d1 s2 - d2 s1.
    BForm,
    /// (w sigma, grad u_bar): vector trial, scalar test, frozen scalar `w`.
    ConvUSigma(&'a FeFunction),
    /// 2 (w grad u, sigma_bar): scalar trial, vector test, frozen scalar
    /// `w`.
    ConvGradU(&'a FeFunction),
    /// (u sigma_f, grad u_bar): scalar trial, scalar test, frozen vector
    /// `sigma_f` (Newton cross block).
    ConvFrozenSigma(&'a FeFunction),
    /// 2 (u grad w_f, sigma_bar): scalar trial, vector test, frozen scalar
    /// `w_f` entering through its gradient (Newton cross block).
    ConvGradFrozenU(&'a FeFunction),
}

impl BilinearForm<'_> {
    fn frozen(&self) -> Option<&FeFunction> {
        match self {
            BilinearForm::ConvUSigma(w)
            | BilinearForm::ConvGradU(w)
            | BilinearForm::ConvFrozenSigma(w)
            | BilinearForm::ConvGradFrozenU(w) => Some(w),
            _ => None,
        }
    }
}

/// Right-hand-side functionals.
pub enum LinearForm<'a> {
    /// (f, u_bar) with a callable source f(x, y, t) against a scalar space.
    ScalarSource(&'a (dyn Fn(f64, f64, f64) -> f64 + Sync)),
    /// (g, sigma_bar) with a callable 2-vector source against a vector
    /// space.
    VectorSource(&'a (dyn Fn(f64, f64, f64) -> [f64; 2] + Sync)),
    /// ((u_h)^2, v_bar): the discrete `u_h` is evaluated at quadrature
    /// points and squared pointwise.
    USquared(&'a FeFunction),
}

struct BasisTable {
    /// Per quadrature point: basis values.
    values: Vec<Vec<f64>>,
    /// Per quadrature point: reference gradients.
    ref_grads: Vec<Vec<[f64; 2]>>,
}

fn tabulate(degree: u8, points: &[[f64; 2]]) -> BasisTable {
    let mut values = Vec::with_capacity(points.len());
    let mut ref_grads = Vec::with_capacity(points.len());
    for &p in points {
        let (v, g) = eval_reference_basis(degree, p);
        values.push(v);
        ref_grads.push(g);
    }
    BasisTable { values, ref_grads }
}

fn physical_grad(inv_t: &[[f64; 2]; 2], g: [f64; 2]) -> [f64; 2] {
    [
        inv_t[0][0] * g[0] + inv_t[0][1] * g[1],
        inv_t[1][0] * g[0] + inv_t[1][1] * g[1],
    ]
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Dimension(msg.into()))
    }
}

/// Assembles the matrix of a bilinear form: rows are test-space DOFs,
/// columns trial-space DOFs.
pub fn assemble_bilinear(
    form: &BilinearForm,
    test: &Arc<FeSpace>,
    trial: &Arc<FeSpace>,
) -> Result<SparseMatrix> {
    require(
        Arc::ptr_eq(test.mesh(), trial.mesh()),
        "test and trial spaces must share a mesh",
    )?;
    match form {
        BilinearForm::Mass | BilinearForm::Stiffness => require(
            Arc::ptr_eq(test, trial),
            "mass/stiffness need identical test and trial spaces",
        )?,
        BilinearForm::AForm => require(
            Arc::ptr_eq(test, trial) && test.components() == 1,
            "A-form is defined on a scalar space",
        )?,
        BilinearForm::BForm => require(
            Arc::ptr_eq(test, trial) && test.components() == 2,
            "B-form is defined on a vector space",
        )?,
        BilinearForm::ConvUSigma(w) => require(
            test.components() == 1 && trial.components() == 2 && w.space().components() == 1,
            "(w sigma, grad u_bar) needs scalar test, vector trial, scalar w",
        )?,
        BilinearForm::ConvGradU(w) => require(
            test.components() == 2 && trial.components() == 1 && w.space().components() == 1,
            "2(w grad u, sigma_bar) needs vector test, scalar trial, scalar w",
        )?,
        BilinearForm::ConvFrozenSigma(s) => require(
            test.components() == 1 && trial.components() == 1 && s.space().components() == 2,
            "(u sigma_f, grad u_bar) needs scalar test/trial, vector sigma_f",
        )?,
        BilinearForm::ConvGradFrozenU(w) => require(
            test.components() == 2 && trial.components() == 1 && w.space().components() == 1,
            "2(u grad w_f, sigma_bar) needs vector test, scalar trial, scalar w_f",
        )?,
    }
    if let Some(w) = form.frozen() {
        require(
            Arc::ptr_eq(w.space().mesh(), test.mesh()),
            "frozen coefficient must live on the same mesh",
        )?;
    }

    let mesh = test.mesh().clone();
    let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).expect("fixed assembly rule");
    let nq = rule.points.len();
    let test_tab = tabulate(test.degree(), &rule.points);
    let same_tab = test.degree() == trial.degree();
    let trial_tab = if same_tab {
        None
    } else {
        Some(tabulate(trial.degree(), &rule.points))
    };
    let frozen = form.frozen();
    let frozen_tab = frozen.map(|w| tabulate(w.space().degree(), &rule.points));

    let nt_local = test.n_local();
    let nr_local = trial.n_local();
    let ns_test = test.n_scalar_dofs();
    let ns_trial = trial.n_scalar_dofs();
    let lt = nt_local * test.components() as usize;
    let lr = nr_local * trial.components() as usize;

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(mesh.n_triangles() * lt * lr);
    let mut grads_test = vec![[0.0f64; 2]; nt_local];
    let mut grads_trial = vec![[0.0f64; 2]; nr_local];
    // Local element matrix, accumulated over quadrature points and emitted
    // once per element; row-major, component-major local indices.
    let mut local = vec![0.0f64; lt * lr];

    for t in 0..mesh.n_triangles() {
        let geom = mesh.element_geometry(t)?;
        let inv_t = &geom.inverse_transpose;
        let (test_dofs, _) = test.scalar_dofs(t);
        let trial_dofs = if Arc::ptr_eq(test, trial) {
            test_dofs
        } else {
            trial.scalar_dofs(t).0
        };
        let frozen_dofs = frozen.map(|w| w.space().scalar_dofs(t).0);
        local.iter_mut().for_each(|x| *x = 0.0);

        for q in 0..nq {
            let w = rule.weights[q] * geom.det;
            for (i, g) in test_tab.ref_grads[q].iter().enumerate() {
                grads_test[i] = physical_grad(inv_t, *g);
            }
            match &trial_tab {
                Some(tab) => {
                    for (j, g) in tab.ref_grads[q].iter().enumerate() {
                        grads_trial[j] = physical_grad(inv_t, *g);
                    }
                }
                None => grads_trial[..nr_local].copy_from_slice(&grads_test[..nr_local]),
            }
            let tv = &test_tab.values[q];
            let rv = match &trial_tab {
                Some(tab) => &tab.values[q],
                None => &test_tab.values[q],
            };

            match form {
                BilinearForm::Mass => {
                    for i in 0..nt_local {
                        for j in 0..nr_local {
                            let v = w * tv[i] * rv[j];
                            for comp in 0..test.components() as usize {
                                local[(comp * nt_local + i) * lr + comp * nr_local + j] += v;
                            }
                        }
                    }
                }
                BilinearForm::Stiffness => {
                    for i in 0..nt_local {
                        for j in 0..nr_local {
                            let v = w
                                * (grads_test[i][0] * grads_trial[j][0]
                                    + grads_test[i][1] * grads_trial[j][1]);
                            for comp in 0..test.components() as usize {
                                local[(comp * nt_local + i) * lr + comp * nr_local + j] += v;
                            }
                        }
                    }
                }
                BilinearForm::AForm => {
                    for i in 0..nt_local {
                        for j in 0..nr_local {
                            let v = w
                                * (grads_test[i][0] * grads_trial[j][0]
                                    + grads_test[i][1] * grads_trial[j][1]
                                    + tv[i] * rv[j]);
                            local[i * lr + j] += v;
                        }
                    }
                }
                BilinearForm::BForm => {
                    // Trial sigma = (phi_j, 0) or (0, phi_j); test likewise.
                    // div (phi, 0) = dphi/dx, rot (phi, 0) = -dphi/dy;
                    // div (0, phi) = dphi/dy, rot (0, phi) = dphi/dx.
                    for i in 0..nt_local {
                        let div_i = [grads_test[i][0], grads_test[i][1]];
                        let rot_i = [-grads_test[i][1], grads_test[i][0]];
                        for j in 0..nr_local {
                            let div_j = [grads_trial[j][0], grads_trial[j][1]];
                            let rot_j = [-grads_trial[j][1], grads_trial[j][0]];
                            for ci in 0..2 {
                                for cj in 0..2 {
                                    let mut v = div_i[ci] * div_j[cj] + rot_i[ci] * rot_j[cj];
                                    if ci == cj {
                                        v += tv[i] * rv[j];
                                    }
                                    local[(ci * nt_local + i) * lr + cj * nr_local + j] += w * v;
                                }
                            }
                        }
                    }
                }
                BilinearForm::ConvUSigma(wfn) => {
                    let tab = frozen_tab.as_ref().unwrap();
                    let dofs = &frozen_dofs.unwrap();
                    let p = w * scalar_value(wfn, dofs, &tab.values[q]);
                    for i in 0..nt_local {
                        for j in 0..nr_local {
                            for cj in 0..2 {
                                local[i * lr + cj * nr_local + j] += p * rv[j] * grads_test[i][cj];
                            }
                        }
                    }
                }
                BilinearForm::ConvGradU(wfn) => {
                    let tab = frozen_tab.as_ref().unwrap();
                    let dofs = &frozen_dofs.unwrap();
                    let p = w * scalar_value(wfn, dofs, &tab.values[q]);
                    // Exactly 2x the transposed ConvUSigma products, so the
                    // cancellation identity holds to the last bit.
                    for i in 0..nt_local {
                        for j in 0..nr_local {
                            for ci in 0..2 {
                                local[(ci * nt_local + i) * lr + j] +=
                                    2.0 * (p * tv[i] * grads_trial[j][ci]);
                            }
                        }
                    }
                }
                BilinearForm::ConvFrozenSigma(sfn) => {
                    let tab = frozen_tab.as_ref().unwrap();
                    let dofs = &frozen_dofs.unwrap();
                    let sval = vector_value(sfn, dofs, &tab.values[q]);
                    for i in 0..nt_local {
                        let gdot = w * (sval[0] * grads_test[i][0] + sval[1] * grads_test[i][1]);
                        for j in 0..nr_local {
                            local[i * lr + j] += rv[j] * gdot;
                        }
                    }
                }
                BilinearForm::ConvGradFrozenU(wfn) => {
                    let tab = frozen_tab.as_ref().unwrap();
                    let dofs = &frozen_dofs.unwrap();
                    let wgrad = scalar_gradient(wfn, dofs, &tab.ref_grads[q], inv_t);
                    for i in 0..nt_local {
                        for j in 0..nr_local {
                            for ci in 0..2 {
                                local[(ci * nt_local + i) * lr + j] +=
                                    2.0 * w * rv[j] * wgrad[ci] * tv[i];
                            }
                        }
                    }
                }
            }
        }

        for ci in 0..test.components() as usize {
            for i in 0..nt_local {
                let row = ci * ns_test + test_dofs[i];
                for cj in 0..trial.components() as usize {
                    for j in 0..nr_local {
                        let v = local[(ci * nt_local + i) * lr + cj * nr_local + j];
                        if v != 0.0 {
                            triplets.push((row, cj * ns_trial + trial_dofs[j], v));
                        }
                    }
                }
            }
        }
    }

    // Strong sigma . n = 0: drop constrained rows/columns; square vector
    // forms get a unit diagonal so the constrained equation reads
    // sigma_c = 0.
    let test_con = test.constrained_flags();
    let trial_con = trial.constrained_flags();
    let any_constraint = test_con.iter().any(|&c| c) || trial_con.iter().any(|&c| c);
    if any_constraint {
        triplets.retain(|&(r, c, _)| !test_con[r] && !trial_con[c]);
        if Arc::ptr_eq(test, trial) {
            for (dof, &con) in test_con.iter().enumerate() {
                if con {
                    triplets.push((dof, dof, 1.0));
                }
            }
        }
    }

    SparseMatrix::from_triplets(test.n_dofs(), trial.n_dofs(), &triplets)
}

fn scalar_value(f: &FeFunction, dofs: &[usize; 6], basis: &[f64]) -> f64 {
    let coeffs = f.coefficients();
    basis
        .iter()
        .enumerate()
        .map(|(i, b)| coeffs[dofs[i]] * b)
        .sum()
}

fn scalar_gradient(
    f: &FeFunction,
    dofs: &[usize; 6],
    ref_grads: &[[f64; 2]],
    inv_t: &[[f64; 2]; 2],
) -> [f64; 2] {
    let coeffs = f.coefficients();
    let mut g = [0.0, 0.0];
    for (i, rg) in ref_grads.iter().enumerate() {
        let c = coeffs[dofs[i]];
        g[0] += c * rg[0];
        g[1] += c * rg[1];
    }
    physical_grad(inv_t, g)
}

fn vector_value(f: &FeFunction, dofs: &[usize; 6], basis: &[f64]) -> [f64; 2] {
    let coeffs = f.coefficients();
    let ns = f.space().n_scalar_dofs();
    let mut v = [0.0, 0.0];
    for (i, b) in basis.iter().enumerate() {
        v[0] += coeffs[dofs[i]] * b;
        v[1] += coeffs[ns + dofs[i]] * b;
    }
    v
}

/// Assembles a right-hand-side functional against `test` at time `t_eval`.
/// Constrained vector-space entries are zeroed.
pub fn assemble_linear(form: &LinearForm, test: &Arc<FeSpace>, t_eval: f64) -> Result<Vec<f64>> {
    match form {
        LinearForm::ScalarSource(_) => require(
            test.components() == 1,
            "scalar source needs a scalar test space",
        )?,
        LinearForm::VectorSource(_) => require(
            test.components() == 2,
            "vector source needs a vector test space",
        )?,
        LinearForm::USquared(u) => {
            require(
                test.components() == 1 && u.space().components() == 1,
                "(u^2, v_bar) needs scalar u and scalar test space",
            )?;
            require(
                Arc::ptr_eq(u.space().mesh(), test.mesh()),
                "(u^2, v_bar): u and the test space must share a mesh",
            )?;
        }
    }

    let mesh = test.mesh().clone();
    let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).expect("fixed assembly rule");
    let test_tab = tabulate(test.degree(), &rule.points);
    let u_tab = match form {
        LinearForm::USquared(u) => Some(tabulate(u.space().degree(), &rule.points)),
        _ => None,
    };
    let n_local = test.n_local();
    let ns = test.n_scalar_dofs();
    let mut out = vec![0.0f64; test.n_dofs()];

    for t in 0..mesh.n_triangles() {
        let geom = mesh.element_geometry(t)?;
        let (dofs, _) = test.scalar_dofs(t);
        let u_dofs = match form {
            LinearForm::USquared(u) => Some(u.space().scalar_dofs(t).0),
            _ => None,
        };
        for (q, &qp) in rule.points.iter().enumerate() {
            let w = rule.weights[q] * geom.det;
            let tv = &test_tab.values[q];
            match form {
                LinearForm::ScalarSource(f) => {
                    let xy = mesh.map_point(t, qp);
                    let fv = f(xy[0], xy[1], t_eval);
                    for i in 0..n_local {
                        out[dofs[i]] += w * fv * tv[i];
                    }
                }
                LinearForm::VectorSource(g) => {
                    let xy = mesh.map_point(t, qp);
                    let gv = g(xy[0], xy[1], t_eval);
                    for i in 0..n_local {
                        out[dofs[i]] += w * gv[0] * tv[i];
                        out[ns + dofs[i]] += w * gv[1] * tv[i];
                    }
                }
                LinearForm::USquared(u) => {
                    let uv = scalar_value(u, &u_dofs.unwrap(), &u_tab.as_ref().unwrap().values[q]);
                    let uu = uv * uv;
                    for i in 0..n_local {
                        out[dofs[i]] += w * uu * tv[i];
                    }
                }
            }
        }
    }
    for (dof, &con) in test.constrained_flags().iter().enumerate() {
        if con {
            out[dof] = 0.0;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn unit_square_spaces(m: usize) -> (Arc<FeSpace>, Arc<FeSpace>, Arc<FeSpace>) {
        let mesh = Arc::new(Mesh::unit_square(m).unwrap());
        let u = FeSpace::scalar(mesh.clone(), 1).unwrap();
        let s = FeSpace::vector(mesh.clone(), 1).unwrap();
        let v = FeSpace::scalar(mesh, 2).unwrap();
        (u, s, v)
    }

    #[test]
    fn mass_matrix_integrates_one() {
        let (u, _, _) = unit_square_spaces(1);
        let mass = assemble_bilinear(&BilinearForm::Mass, &u, &u).unwrap();
        let ones = vec![1.0; u.n_dofs()];
        // 1^T M 1 = domain area.
        assert_abs_diff_eq!(mass.bilinear(&ones, &ones), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let (u, _, v) = unit_square_spaces(3);
        for space in [&u, &v] {
            let k = assemble_bilinear(&BilinearForm::Stiffness, space, space).unwrap();
            let ones = vec![1.0; space.n_dofs()];
            let kv = k.matvec_alloc(&ones);
            for e in kv {
                assert_abs_diff_eq!(e, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn a_and_b_forms_symmetric_positive_definite() {
        let (u, s, _) = unit_square_spaces(3);
        let a = assemble_bilinear(&BilinearForm::AForm, &u, &u).unwrap();
        let b = assemble_bilinear(&BilinearForm::BForm, &s, &s).unwrap();
        assert!(a.max_asymmetry() <= 1e-13);
        assert!(b.max_asymmetry() <= 1e-13);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let xa: Vec<f64> = (0..a.n_rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(a.bilinear(&xa, &xa) > 0.0);
            let xb: Vec<f64> = (0..b.n_rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(b.bilinear(&xb, &xb) > 0.0);
        }
    }

    #[test]
    fn mass_is_positive_definite_random_vectors() {
        let (_, _, v) = unit_square_spaces(2);
        let m = assemble_bilinear(&BilinearForm::Mass, &v, &v).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let x: Vec<f64> = (0..m.n_rows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if x.iter().any(|&xi| xi != 0.0) {
                assert!(m.bilinear(&x, &x) > 0.0);
            }
        }
    }

    #[test]
    fn conv_forms_are_exact_transposes_up_to_factor_two() {
        // The algebraic heart of unconditional stability:
        // u^T C1(w) sigma - (1/2) sigma^T C2(w) u = 0 for constrained sigma.
        let (uspace, sspace, _) = unit_square_spaces(4);
        let mut rng = StdRng::seed_from_u64(17);
        let w = FeFunction::new(
            uspace.clone(),
            (0..uspace.n_dofs())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect(),
        );
        let c1 = assemble_bilinear(&BilinearForm::ConvUSigma(&w), &uspace, &sspace).unwrap();
        let c2 = assemble_bilinear(&BilinearForm::ConvGradU(&w), &sspace, &uspace).unwrap();
        for _ in 0..5 {
            let u: Vec<f64> = (0..uspace.n_dofs())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let mut sig: Vec<f64> = (0..sspace.n_dofs())
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            sspace.apply_constraints(&mut sig);
            let lhs = c1.bilinear(&u, &sig);
            let rhs = 0.5 * c2.bilinear(&sig, &u);
            assert_abs_diff_eq!(lhs - rhs, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn b_form_rot_part_vanishes_on_gradient_field() {
        // sigma = (x, y) = grad((x^2+y^2)/2) is curl-free and linear, hence
        // exactly representable in P1; its rot energy must vanish.
        let (_, s, _) = unit_square_spaces(3);
        let sigma = FeFunction::interpolate_vector(s.clone(), |x, y| [x, y]);
        let rule = quadrature(ASSEMBLY_QUADRATURE_DEGREE).unwrap();
        let mesh = s.mesh();
        let mut rot_energy = 0.0;
        for t in 0..mesh.n_triangles() {
            let geom = mesh.element_geometry(t).unwrap();
            for (q, &qp) in rule.points.iter().enumerate() {
                let w = rule.weights[q] * geom.det;
                let (_, jac) = sigma.eval_vector(t, qp);
                let rot = jac[1][0] - jac[0][1];
                rot_energy += w * rot * rot;
            }
        }
        assert_abs_diff_eq!(rot_energy, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn scalar_source_of_one_sums_to_area() {
        let (u, _, v) = unit_square_spaces(3);
        for space in [&u, &v] {
            let f = |_x: f64, _y: f64, _t: f64| 1.0;
            let rhs = assemble_linear(&LinearForm::ScalarSource(&f), space, 0.0).unwrap();
            let total: f64 = rhs.iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn u_squared_constant_matches_mass_row_sums() {
        let (u, _, v) = unit_square_spaces(2);
        let two = FeFunction::interpolate_scalar(u, |_, _| 2.0);
        let rhs = assemble_linear(&LinearForm::USquared(&two), &v, 0.0).unwrap();
        let mass = assemble_bilinear(&BilinearForm::Mass, &v, &v).unwrap();
        let ones = vec![1.0; v.n_dofs()];
        let row_sums = mass.matvec_alloc(&ones);
        for (r, m4) in rhs.iter().zip(row_sums.iter().map(|s| 4.0 * s)) {
            assert_abs_diff_eq!(*r, m4, epsilon = 1e-13);
        }
    }

    #[test]
    fn oscillatory_source_integrates_to_zero() {
        let mesh = Arc::new(Mesh::unit_square(80).unwrap());
        let space = FeSpace::scalar(mesh, 1).unwrap();
        let f = |x: f64, y: f64, _t: f64| {
            (2.0 * std::f64::consts::PI * x).cos() * (2.0 * std::f64::consts::PI * y).cos()
        };
        let rhs = assemble_linear(&LinearForm::ScalarSource(&f), &space, 0.0).unwrap();
        let total: f64 = rhs.iter().sum();
        assert_abs_diff_eq!(total, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn arity_mismatches_rejected() {
        let (u, s, _) = unit_square_spaces(1);
        assert!(assemble_bilinear(&BilinearForm::AForm, &s, &s).is_err());
        assert!(assemble_bilinear(&BilinearForm::BForm, &u, &u).is_err());
        let w = FeFunction::zeros(u.clone());
        assert!(assemble_bilinear(&BilinearForm::ConvUSigma(&w), &s, &u).is_err());
        let f = |_: f64, _: f64, _: f64| 0.0;
        assert!(assemble_linear(&LinearForm::ScalarSource(&f), &s, 0.0).is_err());
    }
}
