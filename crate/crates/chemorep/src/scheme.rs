//! One backward-Euler time step of the nonlinear coupled (u, sigma) scheme,
//! solved by Picard or Newton linearization, followed by the linear
//! recovery of the chemical concentration v, plus per-step conservation and
//! energy diagnostics.
//!
//! The step solves, for all test functions,
//!
//! ```text
//! (d_t u^n, u_bar)     + (grad u^n, grad u_bar) + (u^n sigma^n, grad u_bar) = (f, u_bar)
//! (d_t sigma^n, s_bar) + (B_h sigma^n, s_bar)   - 2 (u^n grad u^n, s_bar)   = (g, s_bar)
//! ```
//!
//! and afterwards `(d_t v^n, v_bar) + (A_h v^n, v_bar) = ((u^n)^2 + h, v_bar)`.
//!
//! With no forcing the scheme conserves the total mass of u exactly and
//! decreases the energy E = 1/2 ||u||^2 + 1/4 ||sigma||^2 every step,
//! balancing it against physical dissipation plus the two numerical
//! dissipation terms (k/2) ||d_t u||^2 and (k/4) ||d_t sigma||^2.

use crate::error::{Error, Result};
use crate::fem::{
    assemble_bilinear, assemble_linear, BilinearForm, FeFunction, FeSpace, LinearForm,
};
use crate::mesh::Mesh;
use crate::sparse::{solve_general, BlockLayout, EnvelopeCholesky, SparseMatrix};
use std::sync::Arc;

/// Nonlinear linearization strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Picard,
    Newton,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Picard => "picard",
            Method::Newton => "newton",
        }
    }

    fn default_max_iter(self) -> usize {
        match self {
            Method::Picard => 50,
            Method::Newton => 20,
        }
    }
}

/// Time-stepping and solver parameters.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub k: f64,
    pub t_final: f64,
    pub method: Method,
    /// Relative nonlinear stopping tolerance on the L2 increments.
    pub tol: f64,
    /// Nonlinear iteration cap; `None` uses 50 for Picard, 20 for Newton.
    pub max_nl_iter: Option<usize>,
    /// Relative residual for the coupled linear solves.
    pub linear_tol: f64,
    pub linear_max_iter: usize,
    /// Warn when k (||u||_1 + ||sigma||_1)^4 exceeds this (the uniqueness
    /// regime indicator); never enforced.
    pub uniqueness_warn_threshold: f64,
}

impl SolverConfig {
    pub fn new(k: f64, t_final: f64) -> Self {
        SolverConfig {
            k,
            t_final,
            method: Method::Newton,
            tol: 1e-6,
            max_nl_iter: None,
            linear_tol: 1e-10,
            linear_max_iter: 100_000,
            uniqueness_warn_threshold: 1e3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) {
            return Err(Error::Config(format!("k must be positive, got {}", self.k)));
        }
        if self.t_final < self.k {
            return Err(Error::Config(format!(
                "T = {} must be at least k = {}",
                self.t_final, self.k
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        let ratio = self.t_final / self.k;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.round().max(1.0) {
            return Err(Error::Config(format!(
                "T/k = {ratio} is not an integer step count"
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.k).round() as usize
    }

    fn max_iterations(&self) -> usize {
        self.max_nl_iter
            .unwrap_or_else(|| self.method.default_max_iter())
    }
}

/// The three discrete spaces of the scheme.
#[derive(Clone)]
pub struct Spaces {
    pub u: Arc<FeSpace>,
    pub sigma: Arc<FeSpace>,
    pub v: Arc<FeSpace>,
}

impl Spaces {
    /// P1 for u and sigma, P2 for v.
    pub fn standard(mesh: Arc<Mesh>) -> Result<Self> {
        Ok(Spaces {
            u: FeSpace::scalar(mesh.clone(), 1)?,
            sigma: FeSpace::vector(mesh.clone(), 1)?,
            v: FeSpace::scalar(mesh, 2)?,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.u.mesh()
    }
}

/// Time-independent matrices shared by the stepper and the diagnostics.
pub struct Operators {
    pub mass_u: SparseMatrix,
    pub stiff_u: SparseMatrix,
    pub a_u: SparseMatrix,
    pub mass_sigma: SparseMatrix,
    pub b_sigma: SparseMatrix,
    pub mass_v: SparseMatrix,
    pub a_v: SparseMatrix,
    /// Integration functionals (M 1), so that int f = w . coeffs.
    pub int_u: Vec<f64>,
    pub int_v: Vec<f64>,
}

impl Operators {
    pub fn assemble(spaces: &Spaces) -> Result<Self> {
        let mass_u = assemble_bilinear(&BilinearForm::Mass, &spaces.u, &spaces.u)?;
        let stiff_u = assemble_bilinear(&BilinearForm::Stiffness, &spaces.u, &spaces.u)?;
        let a_u = assemble_bilinear(&BilinearForm::AForm, &spaces.u, &spaces.u)?;
        let mass_sigma = assemble_bilinear(&BilinearForm::Mass, &spaces.sigma, &spaces.sigma)?;
        let b_sigma = assemble_bilinear(&BilinearForm::BForm, &spaces.sigma, &spaces.sigma)?;
        let mass_v = assemble_bilinear(&BilinearForm::Mass, &spaces.v, &spaces.v)?;
        let a_v = assemble_bilinear(&BilinearForm::AForm, &spaces.v, &spaces.v)?;
        let int_u = mass_u.matvec_alloc(&vec![1.0; spaces.u.n_dofs()]);
        let int_v = mass_v.matvec_alloc(&vec![1.0; spaces.v.n_dofs()]);
        Ok(Operators {
            mass_u,
            stiff_u,
            a_u,
            mass_sigma,
            b_sigma,
            mass_v,
            a_v,
            int_u,
            int_v,
        })
    }
}

/// Discrete state at time t = n k.
pub struct State {
    pub n: usize,
    pub t: f64,
    pub u: FeFunction,
    pub sigma: FeFunction,
    pub v: FeFunction,
}

impl State {
    pub fn clone_fields(&self) -> State {
        State {
            n: self.n,
            t: self.t,
            u: self.u.clone(),
            sigma: self.sigma.clone(),
            v: self.v.clone(),
        }
    }
}

/// Closed-form right-hand sides (f, g, h); absent for homogeneous runs.
pub struct Forcing {
    f: Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
    g: Box<dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync>,
    h: Box<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
}

impl Forcing {
    pub fn new(
        f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        g: impl Fn(f64, f64, f64) -> [f64; 2] + Send + Sync + 'static,
        h: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Forcing {
            f: Box::new(f),
            g: Box::new(g),
            h: Box::new(h),
        }
    }

    pub fn f(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.f)(x, y, t)
    }

    pub fn g(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        (self.g)(x, y, t)
    }

    pub fn h(&self, x: f64, y: f64, t: f64) -> f64 {
        (self.h)(x, y, t)
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub n: usize,
    pub t: f64,
    pub nonlinear_iterations: usize,
    /// Per-iteration stopping-rule values: max of the relative L2
    /// increments of u and sigma.
    pub increments: Vec<f64>,
    /// E(u, sigma) = 1/2 ||u||_0^2 + 1/4 ||sigma||_0^2.
    pub energy: f64,
    /// d_t E + (k/2)||d_t u||^2 + (k/4)||d_t sigma||^2 + ||grad u||^2
    /// + 1/2 ||sigma||_1^2; vanishes for the homogeneous scheme.
    pub energy_law_residual: f64,
    /// The dissipation magnitude the residual is compared against.
    pub dissipation: f64,
    pub mass: f64,
    /// d_t int(v) + int(v) - int(u^2) - int(h).
    pub v_mass_balance_residual: f64,
    /// int((u^n)^2), quadrature-consistent with the recovery right-hand
    /// side.
    pub int_u_squared: f64,
    /// int(v^n).
    pub int_v: f64,
    /// k (||u||_1 + ||sigma||_1)^4; large values leave the theoretical
    /// uniqueness regime.
    pub uniqueness_indicator: f64,
}

/// Output of a complete run.
pub struct RunOutput {
    pub final_state: State,
    pub reports: Vec<StepReport>,
    pub snapshots: Vec<State>,
}

struct IterationSystem {
    system: SparseMatrix,
    rhs: Vec<f64>,
}

/// Backward-Euler stepper over fixed spaces and operators.
pub struct Stepper {
    pub spaces: Spaces,
    pub ops: Operators,
    pub config: SolverConfig,
    forcing: Option<Forcing>,
    /// Cholesky factor of M_v / k + A_v, reused every step.
    v_solver: EnvelopeCholesky,
    /// Pre-merged constant part of the coupled iteration matrix:
    /// diag(M_u/k + K, M_sigma/k + B).
    base_system: SparseMatrix,
}

impl Stepper {
    pub fn new(spaces: Spaces, config: SolverConfig, forcing: Option<Forcing>) -> Result<Self> {
        let ops = Operators::assemble(&spaces)?;
        Self::with_operators(spaces, ops, config, forcing)
    }

    pub fn with_operators(
        spaces: Spaces,
        ops: Operators,
        config: SolverConfig,
        forcing: Option<Forcing>,
    ) -> Result<Self> {
        config.validate()?;
        let n_v = spaces.v.n_dofs();
        let mut layout = BlockLayout::new(n_v, n_v);
        layout.add(0, 0, 1.0 / config.k, ops.mass_v.clone());
        layout.add(0, 0, 1.0, ops.a_v.clone());
        let v_step_matrix = layout.compose();
        let v_solver = EnvelopeCholesky::factor(&v_step_matrix)?;
        let n_u = spaces.u.n_dofs();
        let n = n_u + spaces.sigma.n_dofs();
        let mut base = BlockLayout::new(n, n);
        base.add(0, 0, 1.0 / config.k, ops.mass_u.clone());
        base.add(0, 0, 1.0, ops.stiff_u.clone());
        base.add(n_u, n_u, 1.0 / config.k, ops.mass_sigma.clone());
        base.add(n_u, n_u, 1.0, ops.b_sigma.clone());
        let base_system = base.compose();
        Ok(Stepper {
            spaces,
            ops,
            config,
            forcing,
            v_solver,
            base_system,
        })
    }

    pub fn forcing(&self) -> Option<&Forcing> {
        self.forcing.as_ref()
    }

    fn n_u(&self) -> usize {
        self.spaces.u.n_dofs()
    }

    fn n_sigma(&self) -> usize {
        self.spaces.sigma.n_dofs()
    }

    /// L2 norm through the mass matrix of the u space.
    fn l2_u(&self, x: &[f64]) -> f64 {
        self.ops.mass_u.bilinear(x, x).max(0.0).sqrt()
    }

    fn l2_sigma(&self, x: &[f64]) -> f64 {
        self.ops.mass_sigma.bilinear(x, x).max(0.0).sqrt()
    }

    /// Assembles the coupled block system of one linearized iteration.
    /// `rhs_const` already holds the time terms plus forcing.
    fn linearized_system(
        &self,
        u_frozen: &FeFunction,
        sigma_frozen: &FeFunction,
        rhs_const: &[f64],
        newton: bool,
    ) -> Result<IterationSystem> {
        let (n_u, n_s) = (self.n_u(), self.n_sigma());
        let n = n_u + n_s;

        let c1 = assemble_bilinear(
            &BilinearForm::ConvUSigma(u_frozen),
            &self.spaces.u,
            &self.spaces.sigma,
        )?;
        let c2 = assemble_bilinear(
            &BilinearForm::ConvGradU(u_frozen),
            &self.spaces.sigma,
            &self.spaces.u,
        )?;

        let mut layout = BlockLayout::new(n, n);
        layout.add(0, 0, 1.0, self.base_system.clone());
        let mut rhs = rhs_const.to_vec();

        if newton {
            let d1 = assemble_bilinear(
                &BilinearForm::ConvFrozenSigma(sigma_frozen),
                &self.spaces.u,
                &self.spaces.u,
            )?;
            let d2 = assemble_bilinear(
                &BilinearForm::ConvGradFrozenU(u_frozen),
                &self.spaces.sigma,
                &self.spaces.u,
            )?;
            // The right-hand side carries the previous-iterate products.
            let c1_sig = c1.matvec_alloc(sigma_frozen.coefficients());
            let c2_u = c2.matvec_alloc(u_frozen.coefficients());
            for i in 0..n_u {
                rhs[i] += c1_sig[i];
            }
            for i in 0..n_s {
                rhs[n_u + i] -= c2_u[i];
            }
            layout.add(0, 0, 1.0, d1);
            layout.add(n_u, 0, -1.0, d2);
        }
        layout.add(0, n_u, 1.0, c1);
        layout.add(n_u, 0, -1.0, c2);

        // The sigma rows of constrained DOFs are pure diagonal rows (from
        // mass + B) with zero right-hand side, so sigma_c = 0 is enforced.
        Ok(IterationSystem {
            system: layout.compose(),
            rhs,
        })
    }

    /// Forcing right-hand sides at t_n (zero vectors when homogeneous).
    fn forcing_rhs(&self, t_n: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        match &self.forcing {
            Some(forcing) => {
                let f = |x: f64, y: f64, t: f64| forcing.f(x, y, t);
                let g = |x: f64, y: f64, t: f64| forcing.g(x, y, t);
                let rhs_f = assemble_linear(&LinearForm::ScalarSource(&f), &self.spaces.u, t_n)?;
                let rhs_g =
                    assemble_linear(&LinearForm::VectorSource(&g), &self.spaces.sigma, t_n)?;
                Ok((rhs_f, rhs_g))
            }
            None => Ok((vec![0.0; self.n_u()], vec![0.0; self.n_sigma()])),
        }
    }

    /// Runs the configured nonlinear iteration for the (u, sigma) system at
    /// t_n, seeding from the previous time level. Returns the converged
    /// fields and the increment trace.
    pub fn solve_nonlinear(
        &self,
        prev: &State,
        t_n: f64,
    ) -> Result<(FeFunction, FeFunction, Vec<f64>)> {
        let (rhs_f, rhs_g) = self.forcing_rhs(t_n)?;
        let newton = self.config.method == Method::Newton;
        let max_iter = self.config.max_iterations();
        let k = self.config.k;

        let mut u_iter = prev.u.clone();
        let mut sigma_iter = prev.sigma.clone();
        let mut increments = Vec::new();
        let (n_u, n_s) = (self.n_u(), self.n_sigma());

        // Time terms plus forcing are iteration-independent.
        let mut rhs_const = vec![0.0; n_u + n_s];
        let mu_prev = self.ops.mass_u.matvec_alloc(prev.u.coefficients());
        let ms_prev = self.ops.mass_sigma.matvec_alloc(prev.sigma.coefficients());
        for i in 0..n_u {
            rhs_const[i] = mu_prev[i] / k + rhs_f[i];
        }
        for i in 0..n_s {
            rhs_const[n_u + i] = ms_prev[i] / k + rhs_g[i];
        }

        let mut x0: Vec<f64> = Vec::with_capacity(n_u + n_s);
        x0.extend_from_slice(u_iter.coefficients());
        x0.extend_from_slice(sigma_iter.coefficients());

        for _l in 1..=max_iter {
            let sys = self.linearized_system(&u_iter, &sigma_iter, &rhs_const, newton)?;
            let solve = solve_general(
                &sys.system,
                &sys.rhs,
                Some(&x0),
                self.config.linear_tol,
                self.config.linear_max_iter,
            );
            let (x, _stats) = match solve {
                Ok(out) => out,
                // Newton's solvability is conditional on k: a singular
                // linearized system points at too large a time step.
                Err(Error::SolverBreakdown(msg)) if newton => {
                    return Err(Error::SolverBreakdown(format!(
                        "{msg}; the Newton system may be singular, consider reducing k"
                    )));
                }
                Err(e) => return Err(e),
            };

            let du: Vec<f64> = (0..n_u).map(|i| x[i] - u_iter.coefficients()[i]).collect();
            let ds: Vec<f64> = (0..n_s)
                .map(|i| x[n_u + i] - sigma_iter.coefficients()[i])
                .collect();
            // Relative L2 stopping rule, degrading to absolute increments
            // when the previous iterate is near zero.
            let denom_u = self.l2_u(u_iter.coefficients());
            let denom_s = self.l2_sigma(sigma_iter.coefficients());
            let rel_u = if denom_u < 1e-14 {
                self.l2_u(&du)
            } else {
                self.l2_u(&du) / denom_u
            };
            let rel_s = if denom_s < 1e-14 {
                self.l2_sigma(&ds)
            } else {
                self.l2_sigma(&ds) / denom_s
            };
            let inc = rel_u.max(rel_s);
            increments.push(inc);

            u_iter.coefficients_mut().copy_from_slice(&x[..n_u]);
            sigma_iter.coefficients_mut().copy_from_slice(&x[n_u..]);
            // The constrained equations are identity rows with zero data;
            // strip the Krylov noise so the state invariant holds exactly.
            self.spaces
                .sigma
                .apply_constraints(sigma_iter.coefficients_mut());
            x0[..n_u].copy_from_slice(u_iter.coefficients());
            x0[n_u..].copy_from_slice(sigma_iter.coefficients());

            if inc <= self.config.tol {
                return Ok((u_iter, sigma_iter, increments));
            }
        }
        Err(Error::NonlinearFailure {
            method: self.config.method.name(),
            step: prev.n + 1,
            iterations: max_iter,
            increments,
        })
    }

    /// Solves the SPD v-recovery system
    /// (M/k + A) v^n = M v^{n-1} / k + ((u^n)^2, .) + (h, .).
    /// Also returns int(u^2) and int(h) for the balance diagnostic.
    pub fn recover_v(
        &self,
        prev_v: &FeFunction,
        u_n: &FeFunction,
        t_n: f64,
    ) -> Result<(FeFunction, f64, f64)> {
        let k = self.config.k;
        let usq = assemble_linear(&LinearForm::USquared(u_n), &self.spaces.v, t_n)?;
        let int_usq: f64 = usq.iter().sum();
        let (h_rhs, int_h) = match &self.forcing {
            Some(forcing) => {
                let h = |x: f64, y: f64, t: f64| forcing.h(x, y, t);
                let rhs = assemble_linear(&LinearForm::ScalarSource(&h), &self.spaces.v, t_n)?;
                let total: f64 = rhs.iter().sum();
                (Some(rhs), total)
            }
            None => (None, 0.0),
        };
        let mv_prev = self.ops.mass_v.matvec_alloc(prev_v.coefficients());
        let mut rhs = vec![0.0; self.spaces.v.n_dofs()];
        for i in 0..rhs.len() {
            rhs[i] = mv_prev[i] / k + usq[i];
            if let Some(h) = &h_rhs {
                rhs[i] += h[i];
            }
        }
        let x = self.v_solver.solve(&rhs);
        Ok((FeFunction::new(self.spaces.v.clone(), x), int_usq, int_h))
    }

    /// One full time step: nonlinear (u, sigma) solve, then v recovery,
    /// then diagnostics. The previous state is left untouched on failure.
    pub fn step(&self, prev: &State) -> Result<(State, StepReport)> {
        let k = self.config.k;
        let n_new = prev.n + 1;
        let t_n = n_new as f64 * k;
        let (u_n, sigma_n, increments) = self.solve_nonlinear(prev, t_n)?;
        let (v_n, int_usq, int_h) = self.recover_v(&prev.v, &u_n, t_n)?;

        // Energy and the discrete energy law.
        let uu = u_n.coefficients();
        let ss = sigma_n.coefficients();
        let energy =
            0.5 * self.ops.mass_u.bilinear(uu, uu) + 0.25 * self.ops.mass_sigma.bilinear(ss, ss);
        let pu = prev.u.coefficients();
        let ps = prev.sigma.coefficients();
        let energy_prev =
            0.5 * self.ops.mass_u.bilinear(pu, pu) + 0.25 * self.ops.mass_sigma.bilinear(ps, ps);
        let du: Vec<f64> = uu.iter().zip(pu).map(|(a, b)| (a - b) / k).collect();
        let ds: Vec<f64> = ss.iter().zip(ps).map(|(a, b)| (a - b) / k).collect();
        let grad_energy = self.ops.stiff_u.bilinear(uu, uu);
        let sigma_b_energy = self.ops.b_sigma.bilinear(ss, ss);
        let dissipation = 0.5 * k * self.ops.mass_u.bilinear(&du, &du)
            + 0.25 * k * self.ops.mass_sigma.bilinear(&ds, &ds)
            + grad_energy
            + 0.5 * sigma_b_energy;
        let energy_law_residual = (energy - energy_prev) / k + dissipation;

        // Mass of u, and the v balance identity computed from the same
        // assembled vectors as the solve (quadrature-consistent).
        let mass = dot(&self.ops.int_u, uu);
        let int_v_new = dot(&self.ops.int_v, v_n.coefficients());
        let int_v_prev = dot(&self.ops.int_v, prev.v.coefficients());
        let v_mass_balance_residual = (int_v_new - int_v_prev) / k + int_v_new - int_usq - int_h;

        let u_h1 = self.ops.a_u.bilinear(uu, uu).max(0.0).sqrt();
        let s_h1 = sigma_b_energy.max(0.0).sqrt();
        let uniqueness_indicator = k * (u_h1 + s_h1).powi(4);

        let report = StepReport {
            n: n_new,
            t: t_n,
            nonlinear_iterations: increments.len(),
            increments,
            energy,
            energy_law_residual,
            dissipation,
            mass,
            v_mass_balance_residual,
            int_u_squared: int_usq,
            int_v: int_v_new,
            uniqueness_indicator,
        };
        let state = State {
            n: n_new,
            t: t_n,
            u: u_n,
            sigma: sigma_n,
            v: v_n,
        };
        Ok((state, report))
    }

    /// Executes N = T/k steps. `snapshot_stride = 0` stores no intermediate
    /// snapshots; otherwise every stride-th state is kept as full
    /// coefficient vectors. `on_step` observes each accepted state.
    pub fn run(
        &self,
        initial: State,
        snapshot_stride: usize,
        mut on_step: impl FnMut(&State, &StepReport) -> Result<()>,
    ) -> Result<RunOutput> {
        let n_steps = self.config.n_steps();
        let mut state = initial;
        let mut reports = Vec::with_capacity(n_steps);
        let mut snapshots = Vec::new();
        for _ in 0..n_steps {
            let (next, report) = self.step(&state)?;
            on_step(&next, &report)?;
            reports.push(report);
            if snapshot_stride > 0 && next.n % snapshot_stride == 0 {
                snapshots.push(next.clone_fields());
            }
            state = next;
        }
        Ok(RunOutput {
            final_state: state,
            reports,
            snapshots,
        })
    }

    /// Residual of the *nonlinear* scheme at a candidate (u, sigma); used
    /// to verify that a linearization converged to the right fixed point.
    pub fn nonlinear_residual(
        &self,
        prev: &State,
        u: &FeFunction,
        sigma: &FeFunction,
        t_n: f64,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.config.k;
        let (rhs_f, rhs_g) = self.forcing_rhs(t_n)?;
        let c1 = assemble_bilinear(
            &BilinearForm::ConvUSigma(u),
            &self.spaces.u,
            &self.spaces.sigma,
        )?;
        let c2 = assemble_bilinear(
            &BilinearForm::ConvGradU(u),
            &self.spaces.sigma,
            &self.spaces.u,
        )?;

        let mu = self.ops.mass_u.matvec_alloc(u.coefficients());
        let mu_prev = self.ops.mass_u.matvec_alloc(prev.u.coefficients());
        let ku = self.ops.stiff_u.matvec_alloc(u.coefficients());
        let c1s = c1.matvec_alloc(sigma.coefficients());
        let mut r_u = vec![0.0; self.n_u()];
        for i in 0..r_u.len() {
            r_u[i] = (mu[i] - mu_prev[i]) / k + ku[i] + c1s[i] - rhs_f[i];
        }

        let ms = self.ops.mass_sigma.matvec_alloc(sigma.coefficients());
        let ms_prev = self.ops.mass_sigma.matvec_alloc(prev.sigma.coefficients());
        let bs = self.ops.b_sigma.matvec_alloc(sigma.coefficients());
        let c2u = c2.matvec_alloc(u.coefficients());
        let mut r_s = vec![0.0; self.n_sigma()];
        for i in 0..r_s.len() {
            r_s[i] = (ms[i] - ms_prev[i]) / k + bs[i] - c2u[i] - rhs_g[i];
        }
        Ok((r_u, r_s))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
