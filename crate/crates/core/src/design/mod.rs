//! Sequential joint design of the radar waveform and the two receive filters.
//!
//! Each design alternates three blocks: the radar filter `w_r`, the
//! communication filter `w_c` and the waveform `s_r`. Filter blocks are
//! fractional programs over the relaxed matrix `W = w w^H`; the waveform block
//! is a sequence of convex programs obtained by linearizing the passive-path
//! term around the current waveform. Relaxed solutions are rounded back to
//! vectors by Gaussian randomization.
//!
//! * [`mm`] maximizes the worst-case SINR over `k ∈ [−K, K]`.
//! * [`ws`] maximizes the weighted sum of SINRs.
//! * [`sync`] covers the synchronized case `K = 0` and the single-path
//!   reference configurations.

pub mod mm;
pub mod sync;
pub mod ws;

pub use mm::{mm_design, mm_filter_step, mm_waveform_step};
pub use sync::{baseline_sinr, hybrid_rx_design, sync_design, sync_filter_r, Baseline};
pub use ws::{ws_design, ws_filter_c_step, ws_filter_r_step, ws_waveform_step};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fractional::FractionalConfig;
use crate::linalg::{cplx, identity, leading_eigenpair, normalized, outer, quad_form, with_power, CMatrix, CVector};
use crate::sdp::{randomize_rank_one, AffineForm, SolverConfig};
use crate::signal_model::{CommWaveformModel, DesignPoint, Scenario, SinrModel};

/// Which SINR aggregate a design maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    WorstCase,
    WeightedSum,
}

impl Criterion {
    pub fn eval(self, sm: &SinrModel, dp: &DesignPoint) -> f64 {
        match self {
            Criterion::WorstCase => sm.worst_case(dp),
            Criterion::WeightedSum => sm.weighted_sum(dp),
        }
    }
}

/// Algorithm family; also selects the filter-only loop of the hybrid-Rx configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MaxMin,
    WeightedSum,
    Sync,
}

impl Method {
    pub fn criterion(self) -> Criterion {
        match self {
            Method::MaxMin | Method::Sync => Criterion::WorstCase,
            Method::WeightedSum => Criterion::WeightedSum,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::MaxMin => "MM",
            Method::WeightedSum => "WS",
            Method::Sync => "SYNC",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    /// Outer and waveform-block stopping tolerance on the linear objective.
    pub epsilon: f64,
    /// Gaussian randomization trials `Q`.
    pub randomization_trials: usize,
    pub max_outer_iters: usize,
    pub max_scp_iters: usize,
    /// Trace budget of the relaxed filter matrices.
    pub filter_budget: f64,
    pub seed: u64,
    pub fractional: FractionalConfig,
}

impl Default for DesignConfig {
    fn default() -> Self {
        DesignConfig {
            epsilon: 0.01,
            randomization_trials: 200,
            max_outer_iters: 50,
            max_scp_iters: 50,
            filter_budget: 1.0,
            seed: 42,
            fractional: FractionalConfig::default(),
        }
    }
}

impl DesignConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn solver(&self) -> &SolverConfig {
        &self.fractional.solver
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Domain("epsilon must be positive".into()));
        }
        if self.randomization_trials == 0 || self.max_outer_iters == 0 || self.max_scp_iters == 0 {
            return Err(Error::Domain("trial and iteration budgets must be positive".into()));
        }
        if !(self.filter_budget > 0.0) {
            return Err(Error::Domain("filter trace budget must be positive".into()));
        }
        Ok(())
    }
}

/// Precomputed covariances and budgets of one design instance.
#[derive(Debug, Clone)]
pub struct Problem {
    pub sinr: SinrModel,
    pub power: f64,
    pub n: usize,
}

impl Problem {
    pub fn new(sc: &Scenario, model: &CommWaveformModel) -> Result<Self> {
        Ok(Problem {
            sinr: SinrModel::new(sc, model)?,
            power: sc.power,
            n: sc.n,
        })
    }

    pub fn gamma_r(&self) -> f64 {
        self.sinr.gamma_r
    }

    pub fn gamma_c(&self) -> f64 {
        self.sinr.gamma_c
    }

    pub fn len(&self) -> usize {
        self.sinr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sinr.is_empty()
    }

    /// `Σ_0`, the covariance at the nominal timing.
    pub fn nominal_covariance(&self) -> &CMatrix {
        let i = self.sinr.index_of(0).expect("delay set always contains 0");
        &self.sinr.covariances[i]
    }

    /// `γ_c Σ_k + I`.
    pub fn radar_interference(&self, idx: usize) -> CMatrix {
        &self.sinr.covariances[idx] * cplx(self.gamma_c()) + identity(self.n)
    }

    /// `γ_r s s^H + I`.
    pub fn comm_interference(&self, s_r: &CVector) -> CMatrix {
        outer(s_r) * cplx(self.gamma_r()) + identity(self.n)
    }

    pub fn radar_terms(&self, s_r: &CVector, w_r: &CVector) -> Vec<f64> {
        (0..self.len()).map(|i| self.sinr.radar_term(s_r, w_r, i)).collect()
    }

    pub fn comm_terms(&self, s_r: &CVector, w_c: &CVector) -> Vec<f64> {
        (0..self.len()).map(|i| self.sinr.comm_term(s_r, w_c, i)).collect()
    }

    pub fn aggregate(&self, criterion: Criterion, values: &[f64]) -> f64 {
        match criterion {
            Criterion::WorstCase => values.iter().copied().fold(f64::INFINITY, f64::min),
            Criterion::WeightedSum => values.iter().zip(&self.sinr.weights).map(|(v, u)| u * v).sum(),
        }
    }

    pub fn objective(&self, criterion: Criterion, dp: &DesignPoint) -> f64 {
        criterion.eval(&self.sinr, dp)
    }
}

/// Iterate of a design loop: the current point plus the quadratic-transform
/// slacks carried by the weighted-sum radar-filter block.
#[derive(Debug, Clone)]
pub struct DesignState {
    pub point: DesignPoint,
    pub slacks: Vec<f64>,
}

impl DesignState {
    pub fn new(point: DesignPoint) -> Self {
        DesignState { point, slacks: Vec::new() }
    }
}

/// Converged (or best-so-far) design with its objective history.
#[derive(Debug, Clone)]
pub struct DesignReport {
    pub method: Method,
    pub criterion: Criterion,
    pub point: DesignPoint,
    /// Objective at the initial point followed by one entry per outer iteration.
    pub trace: Vec<f64>,
    pub delays: Vec<i64>,
    pub weights: Vec<f64>,
    pub profile: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub waveform_fixed: bool,
}

impl DesignReport {
    pub(crate) fn build(
        problem: &Problem,
        method: Method,
        state: DesignState,
        trace: Vec<f64>,
        iterations: usize,
        converged: bool,
        waveform_fixed: bool,
    ) -> Self {
        let criterion = method.criterion();
        let profile = problem.sinr.profile(&state.point);
        DesignReport {
            method,
            criterion,
            objective: problem.aggregate(criterion, &profile),
            point: state.point,
            trace,
            delays: problem.sinr.delays.clone(),
            weights: problem.sinr.weights.clone(),
            profile,
            iterations,
            converged,
            waveform_fixed,
        }
    }

    pub fn worst_case(&self) -> f64 {
        self.profile.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.profile.iter().sum::<f64>() / self.profile.len() as f64
    }

    /// `Σ_k u_k SINR_k / Σ_k u_k`.
    pub fn weighted_mean(&self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        self.profile.iter().zip(&self.weights).map(|(s, u)| u * s).sum::<f64>() / total
    }

    /// Output SINR of the design on its own criterion: the worst case for
    /// max-min designs, the weighted mean for weighted-sum designs.
    pub fn output_sinr(&self) -> f64 {
        match self.criterion {
            Criterion::WorstCase => self.worst_case(),
            Criterion::WeightedSum => self.weighted_mean(),
        }
    }
}

/// Random `±1` sequence scaled to power `power`.
pub fn random_binary_waveform(n: usize, power: f64, seed: u64) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CVector::from_fn(n, |_, _| cplx(if rng.random::<bool>() { 1.0 } else { -1.0 }));
    with_power(&v, power)
}

/// Starting point: `s_r` from [`random_binary_waveform`], `w_r` matched to
/// `s_r` and `w_c` the leading eigenvector of `Σ_0`.
pub fn initial_point(problem: &Problem, seed: u64) -> Result<DesignPoint> {
    initial_point_with(problem, random_binary_waveform(problem.n, problem.power, seed))
}

pub fn initial_point_with(problem: &Problem, s_r: CVector) -> Result<DesignPoint> {
    if s_r.len() != problem.n {
        return Err(Error::Dimension(format!("waveform length {} != N = {}", s_r.len(), problem.n)));
    }
    if !(s_r.norm() > 0.0) {
        return Err(Error::Domain("initial waveform must be nonzero".into()));
    }
    let (_, q) = leading_eigenpair(problem.nominal_covariance());
    DesignPoint::new(s_r.clone(), normalized(&s_r), q)
}

/// Seed for one randomization call, distinct per outer iteration and block.
pub(crate) fn stage_seed(seed: u64, outer: usize, stage: u64) -> u64 {
    let mix = ((outer as u64) << 8 | stage).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    seed ^ mix
}

pub(crate) const STAGE_FILTER_R: u64 = 1;
pub(crate) const STAGE_FILTER_C: u64 = 2;
pub(crate) const STAGE_WAVEFORM: u64 = 3;

/// Rounds a relaxed filter matrix and keeps the incumbent unless a candidate
/// scores strictly higher. The winner is returned with unit norm.
pub(crate) fn round_filter<F>(w: &CMatrix, incumbent: &CVector, trials: usize, seed: u64, mut score: F) -> Result<CVector>
where
    F: FnMut(&CVector) -> f64,
{
    let current = score(incumbent);
    let rounded = match randomize_rank_one(w, trials, &mut score, seed) {
        Ok(r) => r,
        Err(Error::DegenerateRounding) => return Ok(incumbent.clone()),
        Err(e) => return Err(e),
    };
    if rounded.score > current {
        Ok(normalized(&rounded.vector))
    } else {
        Ok(incumbent.clone())
    }
}

/// Rounds a relaxed waveform matrix; candidates are rescaled to the full
/// power budget before scoring.
pub(crate) fn round_waveform<F>(s: &CMatrix, incumbent: &CVector, power: f64, trials: usize, seed: u64, mut score: F) -> Result<CVector>
where
    F: FnMut(&CVector) -> f64,
{
    let current = score(incumbent);
    let rounded = match randomize_rank_one(s, trials, |v| score(&with_power(v, power)), seed) {
        Ok(r) => r,
        Err(Error::DegenerateRounding) => return Ok(incumbent.clone()),
        Err(e) => return Err(e),
    };
    if rounded.score > current {
        Ok(with_power(&rounded.vector, power))
    } else {
        Ok(incumbent.clone())
    }
}

/// Per-delay model of the waveform block with both filters fixed:
/// `F_k(S) = γ_r tr(W_r S)/ρ_k + a_k / (γ_r tr(W_c S) + ‖w_c‖²)`.
#[derive(Debug, Clone)]
pub(crate) struct WaveformModel {
    gamma_r: f64,
    w_r: CMatrix,
    w_c: CMatrix,
    wc_norm2: f64,
    rho: Vec<f64>,
    a: Vec<f64>,
}

impl WaveformModel {
    pub(crate) fn new(problem: &Problem, w_r: &CVector, w_c: &CVector) -> Self {
        let gc = problem.gamma_c();
        let rho = problem
            .sinr
            .covariances
            .iter()
            .map(|c| gc * quad_form(c, w_r) + w_r.norm_squared())
            .collect();
        let a = problem.sinr.covariances.iter().map(|c| gc * quad_form(c, w_c)).collect();
        WaveformModel {
            gamma_r: problem.gamma_r(),
            w_r: outer(w_r),
            w_c: outer(w_c),
            wc_norm2: w_c.norm_squared(),
            rho,
            a,
        }
    }

    /// Exact relaxed per-delay SINRs at `S`.
    pub(crate) fn eval(&self, s: &CMatrix) -> Vec<f64> {
        let tr_r = crate::linalg::inner(&self.w_r, s);
        let d = self.gamma_r * crate::linalg::inner(&self.w_c, s) + self.wc_norm2;
        self.rho.iter().zip(&self.a).map(|(rho, a)| self.gamma_r * tr_r / rho + a / d).collect()
    }

    /// First-order expansion of every `F_k` around `S0`; each form is a global
    /// lower bound of `F_k` that is tight at `S0`.
    pub(crate) fn linearize(&self, s0: &CMatrix) -> Vec<AffineForm> {
        let t0 = crate::linalg::inner(&self.w_c, s0);
        let d0 = self.gamma_r * t0 + self.wc_norm2;
        self.rho
            .iter()
            .zip(&self.a)
            .map(|(rho, a)| {
                let constant = a / d0 + a * self.gamma_r * t0 / (d0 * d0);
                let coeff = &self.w_r * cplx(self.gamma_r / rho) - &self.w_c * cplx(a * self.gamma_r / (d0 * d0));
                AffineForm::new(constant, coeff)
            })
            .collect()
    }
}

/// Relative slack below which a decrease of a monotone sequence is treated
/// as solver noise rather than divergence.
pub(crate) const DIVERGENCE_SLACK: f64 = 1e-4;

pub(crate) fn diverged(prev: f64, next: f64) -> bool {
    next < prev - DIVERGENCE_SLACK * prev.abs().max(1.0)
}

pub(crate) fn check_inputs(problem: &Problem, init: &DesignPoint, cfg: &DesignConfig) -> Result<()> {
    cfg.validate()?;
    if init.s_r.len() != problem.n {
        return Err(Error::Dimension(format!("initial point has length {}, N = {}", init.s_r.len(), problem.n)));
    }
    if init.power() > problem.power * (1.0 + 1e-9) {
        return Err(Error::Domain(format!(
            "initial waveform power {} exceeds the budget {}",
            init.power(),
            problem.power
        )));
    }
    Ok(())
}

/// Generic outer loop shared by every design: `step` performs one full
/// block pass; iteration stops once the objective gain drops below `ε`.
pub(crate) fn outer_loop<F>(
    problem: &Problem,
    method: Method,
    init: DesignPoint,
    cfg: &DesignConfig,
    waveform_fixed: bool,
    mut step: F,
) -> Result<DesignReport>
where
    F: FnMut(&DesignState, usize) -> Result<DesignState>,
{
    let criterion = method.criterion();
    let mut state = DesignState::new(init);
    let mut value = problem.objective(criterion, &state.point);
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_outer_iters {
        iterations += 1;
        let next = step(&state, iterations)?;
        let next_value = problem.objective(criterion, &next.point);
        let gain = next_value - value;
        if gain >= 0.0 {
            state = next;
            value = next_value;
        }
        trace.push(value);
        if gain < cfg.epsilon {
            converged = true;
            break;
        }
    }
    Ok(DesignReport::build(problem, method, state, trace, iterations, converged, waveform_fixed))
}
