//! Worst-case (max-min) SINR design.

use crate::error::{Error, Result};
use crate::fractional::{dinkelbach_maxmin, Ratio, RatioFamily};
use crate::linalg::{cplx, outer, CVector};
use crate::sdp::{solve_maxmin_affine, AffineForm, PsdProgram};
use crate::signal_model::DesignPoint;

use super::{
    check_inputs, diverged, outer_loop, round_filter, round_waveform, stage_seed, DesignConfig, DesignReport, DesignState,
    Method, Problem, WaveformModel, STAGE_FILTER_C, STAGE_FILTER_R, STAGE_WAVEFORM,
};

/// Which receive filter a filter block updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    Radar,
    Comm,
}

fn min(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

/// One max-min filter block: Dinkelbach on the relaxed filter matrix, then
/// randomization scored by the worst-case SINR.
pub fn mm_filter_step(
    state: &DesignState,
    which: Filter,
    problem: &Problem,
    cfg: &DesignConfig,
    outer_iter: usize,
) -> Result<DesignState> {
    let dp = &state.point;
    let s = outer(&dp.s_r);
    let mut next = state.clone();
    match which {
        Filter::Radar => {
            let comm = problem.comm_terms(&dp.s_r, &dp.w_c);
            let num = AffineForm::linear(&s * cplx(problem.gamma_r()));
            let ratios = (0..problem.len())
                .map(|i| Ratio {
                    numerator: num.clone(),
                    denominator: AffineForm::linear(problem.radar_interference(i)),
                    offset: comm[i],
                })
                .collect();
            let res = dinkelbach_maxmin(&RatioFamily::new(ratios)?, cfg.filter_budget, &cfg.fractional)?;
            let score = |w: &CVector| min((0..problem.len()).map(|i| problem.sinr.radar_term(&dp.s_r, w, i) + comm[i]));
            let seed = stage_seed(cfg.seed, outer_iter, STAGE_FILTER_R);
            next.point.w_r = round_filter(&res.w, &dp.w_r, cfg.randomization_trials, seed, score)?;
        }
        Filter::Comm => {
            let radar = problem.radar_terms(&dp.s_r, &dp.w_r);
            let den = AffineForm::linear(problem.comm_interference(&dp.s_r));
            let ratios = problem
                .sinr
                .covariances
                .iter()
                .zip(&radar)
                .map(|(c, r)| Ratio {
                    numerator: AffineForm::linear(c * cplx(problem.gamma_c())),
                    denominator: den.clone(),
                    offset: *r,
                })
                .collect();
            let res = dinkelbach_maxmin(&RatioFamily::new(ratios)?, cfg.filter_budget, &cfg.fractional)?;
            let score = |w: &CVector| min((0..problem.len()).map(|i| radar[i] + problem.sinr.comm_term(&dp.s_r, w, i)));
            let seed = stage_seed(cfg.seed, outer_iter, STAGE_FILTER_C);
            next.point.w_c = round_filter(&res.w, &dp.w_c, cfg.randomization_trials, seed, score)?;
        }
    }
    Ok(next)
}

/// Waveform block with both filters fixed: sequential convex programming on
/// the relaxed waveform matrix, each subproblem a max-min of the linearized
/// per-delay SINRs under `tr(S) ≤ P_r`, followed by randomization.
pub fn mm_waveform_step(state: &DesignState, problem: &Problem, cfg: &DesignConfig, outer_iter: usize) -> Result<DesignState> {
    let dp = &state.point;
    let model = WaveformModel::new(problem, &dp.w_r, &dp.w_c);
    let mut s = outer(&dp.s_r);
    let mut value = min(model.eval(&s));
    let mut trace = vec![value];
    for _ in 0..cfg.max_scp_iters {
        let prog = PsdProgram::max_min(problem.power, model.linearize(&s))?;
        let res = solve_maxmin_affine(&prog, cfg.solver())?;
        if !res.converged {
            return Err(Error::NotConverged {
                iterations: res.iterations,
                detail: format!("waveform subproblem, objective trace {trace:?}"),
            });
        }
        let next = min(model.eval(&res.w));
        if diverged(value, next) {
            return Err(Error::Numerical(format!(
                "sequential convex programming decreased the objective from {value} to {next}; trace {trace:?}"
            )));
        }
        if next <= value {
            break;
        }
        let gain = next - value;
        s = res.w;
        value = next;
        trace.push(value);
        if gain < cfg.epsilon {
            break;
        }
    }
    let score = |v: &CVector| {
        min((0..problem.len()).map(|i| problem.sinr.radar_term(v, &dp.w_r, i) + problem.sinr.comm_term(v, &dp.w_c, i)))
    };
    let seed = stage_seed(cfg.seed, outer_iter, STAGE_WAVEFORM);
    let mut next = state.clone();
    next.point.s_r = round_waveform(&s, &dp.s_r, problem.power, cfg.randomization_trials, seed, score)?;
    Ok(next)
}

/// Alternates radar filter, communication filter and waveform blocks until
/// the worst-case SINR improves by less than `ε`.
pub fn mm_design(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig) -> Result<DesignReport> {
    check_inputs(problem, init, cfg)?;
    outer_loop(problem, Method::MaxMin, init.clone(), cfg, false, |state, it| {
        let st = mm_filter_step(state, Filter::Radar, problem, cfg, it)?;
        let st = mm_filter_step(&st, Filter::Comm, problem, cfg, it)?;
        mm_waveform_step(&st, problem, cfg, it)
    })
}

/// Filter blocks only; the waveform stays at `init.s_r`.
pub(crate) fn mm_filters_only(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig) -> Result<DesignReport> {
    check_inputs(problem, init, cfg)?;
    outer_loop(problem, Method::MaxMin, init.clone(), cfg, true, |state, it| {
        let st = mm_filter_step(state, Filter::Radar, problem, cfg, it)?;
        mm_filter_step(&st, Filter::Comm, problem, cfg, it)
    })
}
