//! Synchronized design (`K = 0`) and the single-path reference configurations.

use crate::error::{Error, Result};
use crate::linalg::{hpd_solve, leading_eigenpair, normalized, CVector};
use crate::signal_model::DesignPoint;

use super::mm::mm_filters_only;
use super::ws::{ws_filter_c_step, ws_filters_only, ws_waveform_step};
use super::{check_inputs, outer_loop, DesignConfig, DesignReport, Method, Problem};

/// Optimal radar filter at the nominal timing, `(γ_c Σ_0 + I)^{-1} s_r`, unit norm.
pub fn sync_filter_r(s_r: &CVector, problem: &Problem) -> Result<CVector> {
    if !(s_r.norm() > 0.0) {
        return Err(Error::Domain("waveform must be nonzero".into()));
    }
    let i = problem.sinr.index_of(0).expect("delay set always contains 0");
    Ok(normalized(&hpd_solve(&problem.radar_interference(i), s_r)?))
}

/// Joint design for a scenario without timing uncertainty: closed-form
/// filters and the linearized waveform block.
pub fn sync_design(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig) -> Result<DesignReport> {
    check_inputs(problem, init, cfg)?;
    if problem.len() != 1 {
        return Err(Error::Domain(format!(
            "synchronized design needs K = 0, got {} delays",
            problem.len()
        )));
    }
    outer_loop(problem, Method::Sync, init.clone(), cfg, false, |state, it| {
        let mut st = state.clone();
        st.point.w_r = sync_filter_r(&st.point.s_r, problem)?;
        let st = ws_filter_c_step(&st, problem)?;
        ws_waveform_step(&st, problem, cfg, it)
    })
}

/// Single-path reference receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    ActiveOnly,
    PassiveOnly,
}

impl Baseline {
    pub fn label(self) -> &'static str {
        match self {
            Baseline::ActiveOnly => "active-only",
            Baseline::PassiveOnly => "passive-only",
        }
    }
}

/// Interference-free SINR of a single-path receiver: `γ_r P_r` for the
/// active path, `γ_c λ_max(Σ_0)` for the passive path.
pub fn baseline_sinr(kind: Baseline, problem: &Problem) -> f64 {
    match kind {
        Baseline::ActiveOnly => problem.gamma_r() * problem.power,
        Baseline::PassiveOnly => problem.gamma_c() * leading_eigenpair(problem.nominal_covariance()).0,
    }
}

/// Optimizes only the receive filters for the fixed waveform `init.s_r`,
/// using the max-min or the weighted-sum filter blocks.
pub fn hybrid_rx_design(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig, method: Method) -> Result<DesignReport> {
    match method {
        Method::MaxMin => mm_filters_only(problem, init, cfg),
        Method::WeightedSum => ws_filters_only(problem, init, cfg),
        Method::Sync => {
            check_inputs(problem, init, cfg)?;
            outer_loop(problem, Method::Sync, init.clone(), cfg, true, |state, _| {
                let mut st = state.clone();
                st.point.w_r = sync_filter_r(&st.point.s_r, problem)?;
                ws_filter_c_step(&st, problem)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::initial_point;
    use crate::signal_model::{build_waveform_matrix, raised_cosine_taps, Scenario};

    fn problem(gr: f64, gc: f64) -> Problem {
        let shape = raised_cosine_taps(0.22, 4, 2).unwrap();
        let model = build_waveform_matrix(&shape, 4).unwrap().with_unit_energy_window(8).unwrap();
        Problem::new(&Scenario::new(gr, gc, 8, 0), &model).unwrap()
    }

    #[test]
    fn matched_filter_without_passive_path() {
        let p = problem(10.0, 0.0);
        let s = initial_point(&p, 1).unwrap().s_r;
        let w = sync_filter_r(&s, &p).unwrap();
        assert!((w - normalized(&s)).norm() < 1e-12);
    }

    #[test]
    fn baselines() {
        let p = problem(316.2, 5.0);
        assert_eq!(baseline_sinr(Baseline::ActiveOnly, &p), 316.2);
        let lmax = leading_eigenpair(p.nominal_covariance()).0;
        assert!((baseline_sinr(Baseline::PassiveOnly, &p) - 5.0 * lmax).abs() < 1e-12);
        assert!(lmax <= crate::linalg::trace_re(p.nominal_covariance()) + 1e-12);
    }

    #[test]
    fn rx_only_keeps_waveform() {
        let p = problem(30.0, 30.0);
        let init = initial_point(&p, 2).unwrap();
        let rep = hybrid_rx_design(&p, &init, &DesignConfig::default(), Method::MaxMin).unwrap();
        assert_eq!(rep.point.s_r, init.s_r);
        assert!(rep.waveform_fixed);
    }
}
