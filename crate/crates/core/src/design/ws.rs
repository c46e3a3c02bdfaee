//! Weighted-sum SINR design.

use crate::error::{Error, Result};
use crate::fractional::quadratic_transform_sum;
use crate::linalg::{cholesky_lower, cplx, leading_eigenpair, normalized, outer, CMatrix, CVector};
use crate::sdp::maximize_affine_trace;
use crate::signal_model::DesignPoint;

use super::{
    check_inputs, diverged, outer_loop, round_filter, round_waveform, stage_seed, DesignConfig, DesignReport, DesignState,
    Method, Problem, WaveformModel, STAGE_FILTER_R, STAGE_WAVEFORM,
};

fn weighted(problem: &Problem, values: impl Iterator<Item = f64>) -> f64 {
    values.zip(&problem.sinr.weights).map(|(v, u)| u * v).sum()
}

/// Radar-filter block: quadratic-transform alternation for
/// `Σ_k u_k γ_r tr(W S)/tr(W(γ_c Σ_k + I))`, then randomization scored by
/// the weighted radar-path SINR.
pub fn ws_filter_r_step(state: &DesignState, problem: &Problem, cfg: &DesignConfig, outer_iter: usize) -> Result<DesignState> {
    let dp = &state.point;
    let s = outer(&dp.s_r);
    let b: Vec<CMatrix> = (0..problem.len()).map(|i| problem.radar_interference(i)).collect();
    let a: Vec<f64> = problem.sinr.weights.iter().map(|u| u * problem.gamma_r()).collect();
    let w0 = outer(&dp.w_r) * cplx(cfg.filter_budget / dp.w_r.norm_squared());
    let res = quadratic_transform_sum(&s, &b, &a, cfg.filter_budget, Some(&w0), &cfg.fractional)?;
    let score = |w: &CVector| weighted(problem, (0..problem.len()).map(|i| problem.sinr.radar_term(&dp.s_r, w, i)));
    let seed = stage_seed(cfg.seed, outer_iter, STAGE_FILTER_R);
    let mut next = state.clone();
    next.point.w_r = round_filter(&res.w, &dp.w_r, cfg.randomization_trials, seed, score)?;
    next.slacks = res.slacks;
    Ok(next)
}

/// Maximizer of `w^H A w / w^H B w` for `A ⪰ 0`, `B ≻ 0`, with unit norm.
pub fn generalized_rayleigh(a: &CMatrix, b: &CMatrix) -> Result<(f64, CVector)> {
    let l = cholesky_lower(b)?;
    let l_inv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let r = l
        .solve_lower_triangular(&l_inv_a.adjoint())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let (value, q) = leading_eigenpair(&r);
    let w = l
        .adjoint()
        .solve_upper_triangular(&q)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    Ok((value, normalized(&w)))
}

/// Communication-filter block in closed form: the leading generalized
/// eigenvector of `(γ_c Σ_k u_k Σ_k, γ_r s s^H + I)`.
pub fn ws_filter_c_step(state: &DesignState, problem: &Problem) -> Result<DesignState> {
    let dp = &state.point;
    let n = problem.n;
    let a = problem
        .sinr
        .covariances
        .iter()
        .zip(&problem.sinr.weights)
        .fold(CMatrix::zeros(n, n), |acc, (c, u)| acc + c * cplx(u * problem.gamma_c()));
    let (_, w) = generalized_rayleigh(&a, &problem.comm_interference(&dp.s_r))?;
    let mut next = state.clone();
    next.point.w_c = w;
    Ok(next)
}

/// Waveform block for the weighted sum: every linearized subproblem is a
/// single affine objective and is solved in closed form under `tr(S) ≤ P_r`.
pub fn ws_waveform_step(state: &DesignState, problem: &Problem, cfg: &DesignConfig, outer_iter: usize) -> Result<DesignState> {
    let dp = &state.point;
    let model = WaveformModel::new(problem, &dp.w_r, &dp.w_c);
    let total = |s: &CMatrix| weighted(problem, model.eval(s).into_iter());
    let mut s = outer(&dp.s_r);
    let mut value = total(&s);
    let mut trace = vec![value];
    for _ in 0..cfg.max_scp_iters {
        let n = problem.n;
        let coeff = model
            .linearize(&s)
            .iter()
            .zip(&problem.sinr.weights)
            .fold(CMatrix::zeros(n, n), |acc, (f, u)| acc + &f.coeff * cplx(*u));
        let (s_next, _) = maximize_affine_trace(&coeff, problem.power);
        let next = total(&s_next);
        if diverged(value, next) {
            return Err(Error::Numerical(format!(
                "sequential convex programming decreased the objective from {value} to {next}; trace {trace:?}"
            )));
        }
        if next <= value {
            break;
        }
        let gain = next - value;
        s = s_next;
        value = next;
        trace.push(value);
        if gain < cfg.epsilon {
            break;
        }
    }
    let score = |v: &CVector| {
        weighted(
            problem,
            (0..problem.len()).map(|i| problem.sinr.radar_term(v, &dp.w_r, i) + problem.sinr.comm_term(v, &dp.w_c, i)),
        )
    };
    let seed = stage_seed(cfg.seed, outer_iter, STAGE_WAVEFORM);
    let mut next = state.clone();
    next.point.s_r = round_waveform(&s, &dp.s_r, problem.power, cfg.randomization_trials, seed, score)?;
    Ok(next)
}

/// Alternates the three weighted-sum blocks until `Σ_k u_k SINR_k` improves
/// by less than `ε`.
pub fn ws_design(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig) -> Result<DesignReport> {
    check_inputs(problem, init, cfg)?;
    outer_loop(problem, Method::WeightedSum, init.clone(), cfg, false, |state, it| {
        let st = ws_filter_r_step(state, problem, cfg, it)?;
        let st = ws_filter_c_step(&st, problem)?;
        ws_waveform_step(&st, problem, cfg, it)
    })
}

pub(crate) fn ws_filters_only(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig) -> Result<DesignReport> {
    check_inputs(problem, init, cfg)?;
    outer_loop(problem, Method::WeightedSum, init.clone(), cfg, true, |state, it| {
        let st = ws_filter_r_step(state, problem, cfg, it)?;
        ws_filter_c_step(&st, problem)
    })
}
