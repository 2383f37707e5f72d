//! Manufactured solutions: the closed-form exact fields, their forcing
//! terms, per-step error accumulation and convergence tables.
//!
//! The reference fields on the unit square are
//!
//! ```text
//! u(x, y, t)     = e^{-t} (cos(2 pi x) cos(2 pi y) + 2)
//! v(x, y, t)     = (1 + sin t) (cos(2 pi x) cos(2 pi y) + 2)
//! sigma(x, y, t) = grad v
//! ```
//!
//! `sigma . n` vanishes on the boundary of the unit square, so the fields
//! are compatible with the strongly imposed constraint.

use crate::error::Result;
use crate::fem::{scalar_norms, vector_norms, FeFunction};
use crate::fields::{ScalarField, VectorField};
use crate::projection::Projector;
use crate::scheme::{Forcing, State};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// cos(2 pi x) cos(2 pi y).
#[inline]
fn cc(x: f64, y: f64) -> f64 {
    (TAU * x).cos() * (TAU * y).cos()
}

/// Spatial profile phi = cos(2 pi x) cos(2 pi y) + 2 shared by all fields.
#[inline]
fn phi(x: f64, y: f64) -> f64 {
    cc(x, y) + 2.0
}

#[inline]
fn grad_phi(x: f64, y: f64) -> [f64; 2] {
    [
        -TAU * (TAU * x).sin() * (TAU * y).cos(),
        -TAU * (TAU * x).cos() * (TAU * y).sin(),
    ]
}

/// Hessian of phi; the Laplacian is -2 tau^2 cc.
#[inline]
fn hess_phi(x: f64, y: f64) -> [[f64; 2]; 2] {
    let d2 = -TAU * TAU * cc(x, y);
    let mixed = TAU * TAU * (TAU * x).sin() * (TAU * y).sin();
    [[d2, mixed], [mixed, d2]]
}

/// Cell density u = e^{-t} phi.
#[derive(Default)]
pub struct ExactU;

impl ScalarField for ExactU {
    fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        (-t).exp() * phi(x, y)
    }

    fn gradient(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let a = (-t).exp();
        let g = grad_phi(x, y);
        [a * g[0], a * g[1]]
    }
}

/// Chemical concentration v = (1 + sin t) phi.
#[derive(Default)]
pub struct ExactV;

impl ScalarField for ExactV {
    fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        (1.0 + t.sin()) * phi(x, y)
    }

    fn gradient(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let a = 1.0 + t.sin();
        let g = grad_phi(x, y);
        [a * g[0], a * g[1]]
    }
}

/// sigma = grad v = (1 + sin t) grad phi.
#[derive(Default)]
pub struct ExactSigma;

impl VectorField for ExactSigma {
    fn value(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let a = 1.0 + t.sin();
        let g = grad_phi(x, y);
        [a * g[0], a * g[1]]
    }

    fn jacobian(&self, x: f64, y: f64, t: f64) -> [[f64; 2]; 2] {
        let a = 1.0 + t.sin();
        let h = hess_phi(x, y);
        [[a * h[0][0], a * h[0][1]], [a * h[1][0], a * h[1][1]]]
    }
}

/// Borrowed view of one exact solution triple, the unit error
/// accumulation works against.
pub struct FieldSet<'a> {
    pub u: &'a dyn ScalarField,
    pub sigma: &'a dyn VectorField,
    pub v: &'a dyn ScalarField,
}

/// The manufactured solution bundle.
#[derive(Default)]
pub struct ExactSolution {
    pub u: ExactU,
    pub v: ExactV,
    pub sigma: ExactSigma,
}

impl ExactSolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fields(&self) -> FieldSet<'_> {
        FieldSet {
            u: &self.u,
            sigma: &self.sigma,
            v: &self.v,
        }
    }

    /// Closed-form right-hand sides:
    ///
    /// ```text
    /// f = u_t - lap u - div(u sigma)
    /// g = sigma_t - grad(div sigma) + sigma - grad(u^2)
    /// h = v_t - lap v + v - u^2
    /// ```
    ///
    /// rot sigma = 0 identically, so the rot(rot sigma) term contributes
    /// nothing to `g`.
    pub fn forcing(&self) -> Forcing {
        let f = move |x: f64, y: f64, t: f64| -> f64 {
            let et = (-t).exp();
            let a = 1.0 + t.sin();
            let p = phi(x, y);
            let c = cc(x, y);
            let g = grad_phi(x, y);
            let lap_phi = -2.0 * TAU * TAU * c;
            // div(u sigma) = grad u . sigma + u div sigma
            //              = e^{-t} a (|grad phi|^2 + phi lap phi)
            let div_usigma = et * a * (g[0] * g[0] + g[1] * g[1] + p * lap_phi);
            let u_t = -et * p;
            let lap_u = et * lap_phi;
            u_t - lap_u - div_usigma
        };
        let g = move |x: f64, y: f64, t: f64| -> [f64; 2] {
            let a = 1.0 + t.sin();
            let p = phi(x, y);
            let gp = grad_phi(x, y);
            // sigma_t = cos t grad phi;
            // grad(div sigma) = a grad(lap phi) = -2 tau^2 a grad phi;
            // grad(u^2) = 2 u grad u = 2 e^{-2t} phi grad phi.
            let scale = t.cos() + a * (1.0 + 2.0 * TAU * TAU) - 2.0 * (-2.0 * t).exp() * p;
            [scale * gp[0], scale * gp[1]]
        };
        let h = move |x: f64, y: f64, t: f64| -> f64 {
            let a = 1.0 + t.sin();
            let p = phi(x, y);
            let c = cc(x, y);
            let usq = (-2.0 * t).exp() * p * p;
            t.cos() * p + 2.0 * TAU * TAU * a * c + a * p - usq
        };
        Forcing::new(f, g, h)
    }
}

/// One per-step error record: total errors against the exact fields and
/// discrete errors against their Ritz projections.
#[derive(Debug, Clone, Copy)]
pub struct ErrorRecord {
    pub n: usize,
    pub t: f64,
    /// Indexed by [`Series::index`].
    pub values: [f64; Series::COUNT],
}

/// The tabulated norm series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    UL2,
    UH1,
    UDiscreteL2,
    UDiscreteH1,
    SigmaL2,
    SigmaH1,
    SigmaDiscreteL2,
    SigmaDiscreteH1,
    VL2,
    VH1,
    VDiscreteL2,
    VDiscreteH1,
}

impl Series {
    pub const COUNT: usize = 12;
    pub const ALL: [Series; Series::COUNT] = [
        Series::UL2,
        Series::UH1,
        Series::UDiscreteL2,
        Series::UDiscreteH1,
        Series::SigmaL2,
        Series::SigmaH1,
        Series::SigmaDiscreteL2,
        Series::SigmaDiscreteH1,
        Series::VL2,
        Series::VH1,
        Series::VDiscreteL2,
        Series::VDiscreteH1,
    ];

    pub fn index(self) -> usize {
        Series::ALL.iter().position(|&s| s == self).unwrap()
    }

    /// Stable name used in CSV headers and file names.
    pub fn name(self) -> &'static str {
        match self {
            Series::UL2 => "u_l2",
            Series::UH1 => "u_h1",
            Series::UDiscreteL2 => "u_discrete_l2",
            Series::UDiscreteH1 => "u_discrete_h1",
            Series::SigmaL2 => "sigma_l2",
            Series::SigmaH1 => "sigma_h1",
            Series::SigmaDiscreteL2 => "sigma_discrete_l2",
            Series::SigmaDiscreteH1 => "sigma_discrete_h1",
            Series::VL2 => "v_l2",
            Series::VH1 => "v_h1",
            Series::VDiscreteL2 => "v_discrete_l2",
            Series::VDiscreteH1 => "v_discrete_h1",
        }
    }
}

/// Accumulates per-step spatial error norms and their time aggregates:
/// running max (l-infinity in time) and running k-weighted sum of squares
/// (l2 in time, included from n >= 1 by default).
pub struct ErrorAccumulator {
    k: f64,
    include_step0_linf: bool,
    include_step0_l2: bool,
    records: Vec<ErrorRecord>,
    linf: [f64; Series::COUNT],
    l2_sq: [f64; Series::COUNT],
}

impl ErrorAccumulator {
    pub fn new(k: f64, include_step0_linf: bool, include_step0_l2: bool) -> Self {
        ErrorAccumulator {
            k,
            include_step0_linf,
            include_step0_l2,
            records: Vec::new(),
            linf: [0.0; Series::COUNT],
            l2_sq: [0.0; Series::COUNT],
        }
    }

    /// Computes all error norms of `state` at its own time and folds them
    /// into the aggregates. Ritz projections of the exact fields are
    /// computed on demand through `projector`.
    pub fn record(
        &mut self,
        state: &State,
        exact: &FieldSet,
        projector: &Projector,
    ) -> Result<()> {
        let t = state.t;
        let ru = projector.u.project_scalar(exact.u, t)?;
        let rs = projector.sigma.project_vector(exact.sigma, t)?;
        let rv = projector.v.project_scalar(exact.v, t)?;
        self.record_with_projections(state, exact, &ru, &rs, &rv);
        Ok(())
    }

    pub fn record_with_projections(
        &mut self,
        state: &State,
        exact: &FieldSet,
        ritz_u: &FeFunction,
        ritz_sigma: &FeFunction,
        ritz_v: &FeFunction,
    ) {
        let t = state.t;
        let eu = scalar_norms(&state.u, Some((exact.u, t)));
        let es = vector_norms(&state.sigma, Some((exact.sigma, t)));
        let ev = scalar_norms(&state.v, Some((exact.v, t)));
        let du = scalar_norms(&state.u.sub(ritz_u), None);
        let ds = vector_norms(&state.sigma.sub(ritz_sigma), None);
        let dv = scalar_norms(&state.v.sub(ritz_v), None);
        let mut values = [0.0; Series::COUNT];
        values[Series::UL2.index()] = eu.l2;
        values[Series::UH1.index()] = eu.h1;
        values[Series::UDiscreteL2.index()] = du.l2;
        values[Series::UDiscreteH1.index()] = du.h1;
        values[Series::SigmaL2.index()] = es.l2;
        values[Series::SigmaH1.index()] = es.h1;
        values[Series::SigmaDiscreteL2.index()] = ds.l2;
        values[Series::SigmaDiscreteH1.index()] = ds.h1;
        values[Series::VL2.index()] = ev.l2;
        values[Series::VH1.index()] = ev.h1;
        values[Series::VDiscreteL2.index()] = dv.l2;
        values[Series::VDiscreteH1.index()] = dv.h1;
        let record = ErrorRecord {
            n: state.n,
            t,
            values,
        };
        if state.n > 0 || self.include_step0_linf {
            for i in 0..Series::COUNT {
                self.linf[i] = self.linf[i].max(values[i]);
            }
        }
        if state.n > 0 || self.include_step0_l2 {
            for i in 0..Series::COUNT {
                self.l2_sq[i] += self.k * values[i] * values[i];
            }
        }
        self.records.push(record);
    }

    pub fn records(&self) -> &[ErrorRecord] {
        &self.records
    }

    /// max over recorded steps of the spatial norm.
    pub fn linf(&self, s: Series) -> f64 {
        self.linf[s.index()]
    }

    /// (k sum_n ||e^n||^2)^{1/2} over recorded steps.
    pub fn l2_time(&self, s: Series) -> f64 {
        self.l2_sq[s.index()].sqrt()
    }

    /// Brute-force recomputation of (linf, l2) from the stored records;
    /// must agree with the running aggregates.
    pub fn recompute(&self, s: Series) -> (f64, f64) {
        let i = s.index();
        let mut linf = 0.0_f64;
        let mut l2_sq = 0.0_f64;
        for r in &self.records {
            if r.n > 0 || self.include_step0_linf {
                linf = linf.max(r.values[i]);
            }
            if r.n > 0 || self.include_step0_l2 {
                l2_sq += self.k * r.values[i] * r.values[i];
            }
        }
        (linf, l2_sq.sqrt())
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub m: usize,
    pub error: f64,
    /// Order against the previous row; `None` for the first row and for
    /// rows flagged as machine-exact zeros.
    pub order: Option<f64>,
}

/// Builds error/order rows from per-mesh aggregate errors. The order
/// between consecutive rows is log(e_coarse / e_fine) / log(m_fine /
/// m_coarse).
pub fn convergence_table(results: &[(usize, f64)]) -> Vec<TableRow> {
    let mut rows = Vec::with_capacity(results.len());
    for (i, &(m, error)) in results.iter().enumerate() {
        let order = if i == 0 {
            None
        } else {
            let (m_prev, e_prev) = results[i - 1];
            if error == 0.0 || e_prev == 0.0 {
                None
            } else {
                Some((e_prev / error).ln() / (m as f64 / m_prev as f64).ln())
            }
        };
        rows.push(TableRow { m, error, order });
    }
    rows
}

/// Least-squares slope of log(error) against log(1/m) over all rows.
pub fn least_squares_order(results: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = results
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|&(m, e)| (-(m as f64).ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
