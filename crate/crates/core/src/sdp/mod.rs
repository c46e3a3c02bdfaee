//! Small dense convex programs over the trace-bounded spectrahedron
//! `{W ⪰ 0, tr(W) ≤ τ}` and Gaussian rank-one rounding.
//!
//! Three objective kinds are supported:
//!
//! * max-min of affine forms, `max_W min_k (c_k + tr(W A_k))`;
//! * concave square-root objectives, `Σ_k 2 a_k √tr(W S) − tr(W B_k)`;
//! * a single affine form, solved in closed form by the leading eigenvector.
//!
//! The first two are solved with a primal log-barrier interior-point method
//! (see [`barrier`]); all three return a [`SolverResult`] whose matrix is
//! Hermitian PSD and satisfies the trace budget.

mod barrier;
mod rounding;

pub use rounding::{randomize_rank_one, Rounded};

use crate::error::{Error, Result};
use crate::linalg::{cplx, hermitize, identity, inner, leading_eigenpair, outer, trace_re, CMatrix, Eigh};
use barrier::{BarrierProblem, BarrierSettings, Hyperbolic, LinearConstraint, Point};

/// `W ↦ constant + tr(W · coeff)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub constant: f64,
    pub coeff: CMatrix,
}

impl AffineForm {
    /// The coefficient is symmetrized on construction.
    pub fn new(constant: f64, coeff: CMatrix) -> Self {
        AffineForm {
            constant,
            coeff: hermitize(&coeff),
        }
    }

    pub fn linear(coeff: CMatrix) -> Self {
        Self::new(0.0, coeff)
    }

    pub fn dim(&self) -> usize {
        self.coeff.nrows()
    }

    pub fn eval(&self, w: &CMatrix) -> f64 {
        self.constant + inner(&self.coeff, w)
    }

    /// `self + scale · other`.
    pub fn add_scaled(&self, other: &AffineForm, scale: f64) -> AffineForm {
        AffineForm {
            constant: self.constant + scale * other.constant,
            coeff: &self.coeff + &other.coeff * cplx(scale),
        }
    }
}

/// One `2 a √tr(W S) − tr(W B)` summand; `S` is shared across terms.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtTerm {
    pub a: f64,
    pub b: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    MaxMinAffine(Vec<AffineForm>),
    ConcaveSqrt { s: CMatrix, terms: Vec<SqrtTerm> },
    Affine(AffineForm),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdProgram {
    pub dim: usize,
    pub trace_budget: f64,
    pub objective: Objective,
}

impl PsdProgram {
    pub fn max_min(trace_budget: f64, forms: Vec<AffineForm>) -> Result<Self> {
        let dim = forms.first().map(AffineForm::dim).ok_or_else(|| Error::Domain("at least one form required".into()))?;
        let prog = PsdProgram {
            dim,
            trace_budget,
            objective: Objective::MaxMinAffine(forms),
        };
        prog.validate()?;
        Ok(prog)
    }

    pub fn concave_sqrt(trace_budget: f64, s: CMatrix, terms: Vec<SqrtTerm>) -> Result<Self> {
        let prog = PsdProgram {
            dim: s.nrows(),
            trace_budget,
            objective: Objective::ConcaveSqrt { s: hermitize(&s), terms },
        };
        prog.validate()?;
        Ok(prog)
    }

    pub fn affine(trace_budget: f64, form: AffineForm) -> Result<Self> {
        let prog = PsdProgram {
            dim: form.dim(),
            trace_budget,
            objective: Objective::Affine(form),
        };
        prog.validate()?;
        Ok(prog)
    }

    fn validate(&self) -> Result<()> {
        if !(self.trace_budget > 0.0) || !self.trace_budget.is_finite() {
            return Err(Error::Domain(format!("trace budget {} must be finite and positive", self.trace_budget)));
        }
        let square = |m: &CMatrix| m.nrows() == self.dim && m.ncols() == self.dim;
        match &self.objective {
            Objective::MaxMinAffine(forms) => {
                if forms.is_empty() {
                    return Err(Error::Domain("at least one form required".into()));
                }
                if !forms.iter().all(|f| square(&f.coeff)) {
                    return Err(Error::Dimension("affine forms must share one square dimension".into()));
                }
            }
            Objective::ConcaveSqrt { s, terms } => {
                if terms.is_empty() {
                    return Err(Error::Domain("at least one term required".into()));
                }
                if !square(s) || !terms.iter().all(|t| square(&t.b)) {
                    return Err(Error::Dimension("sqrt terms must share one square dimension".into()));
                }
                if terms.iter().any(|t| !(t.a >= 0.0)) {
                    return Err(Error::Domain("sqrt weights must be non-negative".into()));
                }
            }
            Objective::Affine(f) => {
                if !square(&f.coeff) {
                    return Err(Error::Dimension("coefficient must be square".into()));
                }
            }
        }
        Ok(())
    }

    /// Objective value at `w`.
    pub fn eval(&self, w: &CMatrix) -> f64 {
        match &self.objective {
            Objective::MaxMinAffine(forms) => forms.iter().map(|f| f.eval(w)).fold(f64::INFINITY, f64::min),
            Objective::ConcaveSqrt { s, terms } => {
                let root = inner(s, w).max(0.0).sqrt();
                terms.iter().map(|t| 2.0 * t.a * root - inner(&t.b, w)).sum()
            }
            Objective::Affine(f) => f.eval(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Newton-step budget of the interior-point method.
    pub max_iters: usize,
    pub rel_tol: f64,
    /// Barrier weight multiplier between centering rounds.
    pub barrier_growth: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 5000,
            rel_tol: 1e-5,
            barrier_growth: 8.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub w: CMatrix,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolverResult {
    /// Checks the PSD and trace-budget invariants.
    pub fn is_feasible(&self, trace_budget: f64) -> bool {
        let tr = trace_re(&self.w);
        let min_eig = Eigh::new(&self.w).min_value();
        min_eig >= -1e-8 * tr.abs().max(1e-300) && tr <= trace_budget * (1.0 + 1e-8)
    }
}

fn check_cfg(cfg: &SolverConfig) -> Result<()> {
    if !(cfg.rel_tol > 0.0) {
        return Err(Error::Domain("rel_tol must be positive".into()));
    }
    Ok(())
}

fn trace_constraint(n: usize, tau: f64, p: usize) -> LinearConstraint {
    LinearConstraint {
        b: tau,
        g: -identity(n),
        h: vec![0.0; p],
    }
}

fn spectral_scale(m: &CMatrix) -> f64 {
    m.norm()
}

/// `max_W min_k (c_k + tr(W A_k))` over `{W ⪰ 0, tr W ≤ τ}`.
pub fn solve_maxmin_affine(prog: &PsdProgram, cfg: &SolverConfig) -> Result<SolverResult> {
    check_cfg(cfg)?;
    let Objective::MaxMinAffine(forms) = &prog.objective else {
        return Err(Error::Domain("program is not a max-min of affine forms".into()));
    };
    let n = prog.dim;
    let tau = prog.trace_budget;
    let scale = forms
        .iter()
        .map(|f| f.constant.abs() + tau * spectral_scale(&f.coeff))
        .fold(0.0, f64::max)
        .max(1e-12);

    let w0 = identity(n) * cplx(tau / (2.0 * n as f64));
    let start = forms.iter().map(|f| f.eval(&w0)).fold(f64::INFINITY, f64::min);
    let eta0 = start - 0.1 * scale.max(start.abs());

    let mut linear: Vec<LinearConstraint> = forms
        .iter()
        .map(|f| LinearConstraint {
            b: f.constant,
            g: f.coeff.clone(),
            h: vec![-1.0],
        })
        .collect();
    linear.push(trace_constraint(n, tau, 1));
    let problem = BarrierProblem {
        n,
        c_w: None,
        c_y: vec![1.0],
        linear,
        hyper: None,
    };
    let settings = BarrierSettings {
        max_newton_steps: cfg.max_iters,
        rel_tol: cfg.rel_tol * 0.1,
        abs_floor: scale,
        t0: problem.nu() / scale,
        growth: cfg.barrier_growth,
    };
    let out = problem.solve(Point { w: w0, y: vec![eta0] }, &settings);
    let w = hermitize(&out.point.w);
    Ok(SolverResult {
        objective: prog.eval(&w),
        w,
        iterations: out.newton_steps,
        converged: out.converged,
    })
}

/// `max_W Σ_k 2 a_k √tr(W S) − tr(W B_k)` over `{W ⪰ 0, tr W ≤ τ}`.
pub fn solve_concave_sqrt(prog: &PsdProgram, cfg: &SolverConfig) -> Result<SolverResult> {
    check_cfg(cfg)?;
    let Objective::ConcaveSqrt { s, terms } = &prog.objective else {
        return Err(Error::Domain("program is not a concave sqrt objective".into()));
    };
    let n = prog.dim;
    let tau = prog.trace_budget;
    let a_total: f64 = terms.iter().map(|t| t.a).sum();
    let b_total = terms.iter().fold(CMatrix::zeros(n, n), |acc, t| acc + &t.b);
    let (s_max, _) = leading_eigenpair(s);

    if a_total <= 0.0 || s_max <= 0.0 {
        // purely -tr(W B): W = 0 is optimal for PSD B, otherwise the closed form applies
        let (w, _) = maximize_affine_trace(&(-&b_total), tau);
        return Ok(SolverResult {
            objective: prog.eval(&w),
            w,
            iterations: 0,
            converged: true,
        });
    }

    let scale = (a_total * (tau * s_max).sqrt() + tau * spectral_scale(&b_total)).max(1e-12);
    let w0 = identity(n) * cplx(tau / (2.0 * n as f64));
    let v0 = 0.5 * inner(s, &w0).max(0.0).sqrt();
    let problem = BarrierProblem {
        n,
        c_w: Some(-b_total),
        c_y: vec![2.0 * a_total],
        linear: vec![trace_constraint(n, tau, 1)],
        hyper: Some(Hyperbolic { s: s.clone(), var: 0 }),
    };
    let settings = BarrierSettings {
        max_newton_steps: cfg.max_iters,
        rel_tol: cfg.rel_tol * 0.1,
        abs_floor: scale,
        t0: problem.nu() / scale,
        growth: cfg.barrier_growth,
    };
    let out = problem.solve(Point { w: w0, y: vec![v0] }, &settings);
    let w = hermitize(&out.point.w);
    Ok(SolverResult {
        objective: prog.eval(&w),
        w,
        iterations: out.newton_steps,
        converged: out.converged,
    })
}

/// Closed-form maximizer of `tr(W · coeff)` over `{W ⪰ 0, tr W ≤ τ}`:
/// `τ q q^H` for the leading eigenvector `q`, or zero if `λ_max ≤ 0`.
pub fn maximize_affine_trace(coeff: &CMatrix, tau: f64) -> (CMatrix, f64) {
    let n = coeff.nrows();
    let (lmax, q) = leading_eigenpair(coeff);
    if lmax > 0.0 {
        (outer(&q) * cplx(tau), tau * lmax)
    } else {
        (CMatrix::zeros(n, n), 0.0)
    }
}

/// Dispatches on the objective kind.
pub fn solve(prog: &PsdProgram, cfg: &SolverConfig) -> Result<SolverResult> {
    match &prog.objective {
        Objective::MaxMinAffine(_) => solve_maxmin_affine(prog, cfg),
        Objective::ConcaveSqrt { .. } => solve_concave_sqrt(prog, cfg),
        Objective::Affine(f) => {
            let (w, _) = maximize_affine_trace(&f.coeff, prog.trace_budget);
            Ok(SolverResult {
                objective: f.eval(&w),
                w,
                iterations: 0,
                converged: true,
            })
        }
    }
}
