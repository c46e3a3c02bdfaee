//! Fractional-programming drivers over the trace-bounded spectrahedron.
//!
//! * [`dinkelbach_maxmin`] maximizes `min_k f̄_k(W)/g_k(W) + κ_k` with the
//!   generalized Dinkelbach iteration: fold the offsets into the numerators,
//!   `f_k = f̄_k + κ_k g_k`, then alternate
//!   `W ← argmax min_k (f_k − λ g_k)` and `λ ← min_k f_k/g_k` until the
//!   parametric optimum `min_k (f_k − λ g_k)` drops below `ε`.
//! * [`quadratic_transform_sum`] maximizes `Σ_k a_k tr(WS)/tr(WB_k)` by
//!   alternating the concave surrogate
//!   `Σ_k 2λ_k √(a_k tr(WS)) − λ_k² tr(W B_k)` in `W` with the closed-form
//!   update `λ_k = √(a_k tr(WS)) / tr(W B_k)`.

use crate::error::{Error, Result};
use crate::linalg::{cplx, identity, inner, CMatrix};
use crate::sdp::{solve_concave_sqrt, solve_maxmin_affine, AffineForm, PsdProgram, SolverConfig, SqrtTerm};

/// `f̄(W)/g(W) + κ`.
#[derive(Debug, Clone)]
pub struct Ratio {
    pub numerator: AffineForm,
    pub denominator: AffineForm,
    pub offset: f64,
}

impl Ratio {
    pub fn eval(&self, w: &CMatrix) -> f64 {
        self.numerator.eval(w) / self.denominator.eval(w) + self.offset
    }

    /// `f = f̄ + κ g`.
    fn folded_numerator(&self) -> AffineForm {
        self.numerator.add_scaled(&self.denominator, self.offset)
    }
}

#[derive(Debug, Clone)]
pub struct RatioFamily {
    pub ratios: Vec<Ratio>,
}

impl RatioFamily {
    pub fn new(ratios: Vec<Ratio>) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Domain("ratio family is empty".into()));
        }
        Ok(RatioFamily { ratios })
    }

    /// `min_k f̄_k/g_k + κ_k`.
    pub fn value(&self, w: &CMatrix) -> f64 {
        self.ratios.iter().map(|r| r.eval(w)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub solver: SolverConfig,
}

impl Default for FractionalConfig {
    fn default() -> Self {
        FractionalConfig {
            epsilon: 0.01,
            max_iters: 100,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FractionalResult {
    pub w: CMatrix,
    /// Achieved objective: the worst-case ratio (Dinkelbach) or the sum of
    /// ratios (quadratic transform).
    pub value: f64,
    /// Objective after every accepted iteration.
    pub trace: Vec<f64>,
    /// Final slack variables `λ_k` of the quadratic transform; empty for Dinkelbach.
    pub slacks: Vec<f64>,
    /// Dinkelbach's `ε_0` at termination.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn check_eps(cfg: &FractionalConfig) -> Result<()> {
    if !(cfg.epsilon > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    Ok(())
}

/// Generalized Dinkelbach iteration for `max_W min_k f̄_k/g_k + κ_k` over
/// `{W ⪰ 0, tr W ≤ τ}`, started from `λ = 0`.
pub fn dinkelbach_maxmin(family: &RatioFamily, tau: f64, cfg: &FractionalConfig) -> Result<FractionalResult> {
    check_eps(cfg)?;
    let folded: Vec<(AffineForm, &AffineForm)> =
        family.ratios.iter().map(|r| (r.folded_numerator(), &r.denominator)).collect();

    let mut lambda = 0.0;
    let mut best: Option<CMatrix> = None;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        let forms: Vec<AffineForm> = folded.iter().map(|(f, g)| f.add_scaled(g, -lambda)).collect();
        let prog = PsdProgram::max_min(tau, forms)?;
        let res = solve_maxmin_affine(&prog, &cfg.solver)?;
        if !res.converged {
            return Err(Error::NotConverged {
                iterations: res.iterations,
                detail: format!("inner max-min solve at Dinkelbach iteration {iterations}, lambda trace {trace:?}"),
            });
        }
        let w = res.w;
        let mut eps0 = f64::INFINITY;
        let mut next = f64::INFINITY;
        for (f, g) in &folded {
            let (fv, gv) = (f.eval(&w), g.eval(&w));
            if !(gv > 0.0) {
                return Err(Error::Numerical(format!("denominator {gv} is not positive")));
            }
            eps0 = eps0.min(fv - lambda * gv);
            next = next.min(fv / gv);
        }
        if best.is_some() && next < lambda {
            // the inner solve could not improve on the incumbent beyond its tolerance
            residual = eps0.max(0.0);
            converged = true;
            break;
        }
        lambda = next;
        best = Some(w);
        trace.push(lambda);
        residual = eps0;
        if eps0 <= cfg.epsilon {
            converged = true;
            break;
        }
    }
    let w = best.expect("at least one Dinkelbach iteration");
    Ok(FractionalResult {
        value: family.value(&w),
        w,
        trace,
        slacks: Vec::new(),
        residual,
        iterations,
        converged,
    })
}

/// `Σ_k a_k tr(WS) / tr(W B_k)`.
pub fn sum_of_ratios(s: &CMatrix, b: &[CMatrix], a: &[f64], w: &CMatrix) -> f64 {
    let num = inner(s, w);
    b.iter().zip(a).map(|(bk, ak)| ak * num / inner(bk, w)).sum()
}

fn slack_update(s: &CMatrix, b: &[CMatrix], a: &[f64], w: &CMatrix) -> Vec<f64> {
    let num = inner(s, w).max(0.0);
    b.iter().zip(a).map(|(bk, ak)| (ak * num).sqrt() / inner(bk, w)).collect()
}

/// Quadratic-transform alternation for `max_W Σ_k a_k tr(WS)/tr(W B_k)` over
/// `{W ⪰ 0, tr W ≤ τ}`. The slacks are initialized at their optimal values
/// for `init` (or for `τ/N · I` when no start is given).
pub fn quadratic_transform_sum(
    s: &CMatrix,
    b: &[CMatrix],
    a: &[f64],
    tau: f64,
    init: Option<&CMatrix>,
    cfg: &FractionalConfig,
) -> Result<FractionalResult> {
    check_eps(cfg)?;
    let n = s.nrows();
    if b.len() != a.len() || b.is_empty() {
        return Err(Error::Dimension("need one weight per denominator matrix".into()));
    }
    if a.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::Domain("ratio weights must be non-negative".into()));
    }
    if a.iter().all(|&x| x == 0.0) {
        return Ok(FractionalResult {
            w: CMatrix::zeros(n, n),
            value: 0.0,
            trace: vec![0.0],
            slacks: vec![0.0; a.len()],
            residual: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    let mut w = match init {
        Some(w0) if inner(&identity(n), w0) > 0.0 => w0.clone(),
        _ => identity(n) * cplx(tau / n as f64),
    };
    let mut value = sum_of_ratios(s, b, a, &w);
    let mut slacks = slack_update(s, b, a, &w);
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        iterations += 1;
        let terms: Vec<SqrtTerm> = slacks
            .iter()
            .zip(a)
            .zip(b)
            .map(|((l, ak), bk)| SqrtTerm {
                a: l * ak.sqrt(),
                b: bk * cplx(l * l),
            })
            .collect();
        let prog = PsdProgram::concave_sqrt(tau, s.clone(), terms)?;
        let res = solve_concave_sqrt(&prog, &cfg.solver)?;
        if !res.converged {
            return Err(Error::NotConverged {
                iterations: res.iterations,
                detail: format!("inner concave solve at alternation {iterations}, objective trace {trace:?}"),
            });
        }
        let next = sum_of_ratios(s, b, a, &res.w);
        if !(next >= value) {
            converged = true;
            break;
        }
        let gain = next - value;
        w = res.w;
        value = next;
        slacks = slack_update(s, b, a, &w);
        trace.push(value);
        if gain < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(FractionalResult {
        w,
        value,
        trace,
        slacks,
        residual: 0.0,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| cplx(x))))
    }

    #[test]
    fn unit_ratios_give_one() {
        let g = AffineForm::linear(diag(&[2.0, 1.0, 3.0]));
        let fam = RatioFamily::new(vec![
            Ratio { numerator: g.clone(), denominator: g.clone(), offset: 0.0 },
            Ratio { numerator: AffineForm::linear(identity(3)), denominator: AffineForm::linear(identity(3)), offset: 0.0 },
        ])
        .unwrap();
        let res = dinkelbach_maxmin(&fam, 1.0, &FractionalConfig::default()).unwrap();
        assert!((res.value - 1.0).abs() < 1e-9);
        assert!(res.converged);
    }

    #[test]
    fn empty_family_rejected() {
        assert!(RatioFamily::new(vec![]).is_err());
    }

    #[test]
    fn zero_weights_give_zero_matrix() {
        let res = quadratic_transform_sum(&identity(2), &[identity(2)], &[0.0], 1.0, None, &FractionalConfig::default()).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.w.norm(), 0.0);
    }

    #[test]
    fn bad_epsilon_rejected() {
        let cfg = FractionalConfig { epsilon: 0.0, ..FractionalConfig::default() };
        assert!(quadratic_transform_sum(&identity(2), &[identity(2)], &[1.0], 1.0, None, &cfg).is_err());
    }
}
