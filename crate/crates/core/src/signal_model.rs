//! Discrete received-signal model for the hybrid active-passive receiver.
//!
//! The communication waveform is a linearly modulated symbol stream
//! `s = H b` sampled at `P` samples per symbol. The receiver observes an
//! `N`-sample window of it whose position is offset by an unknown integer
//! delay `k`; the window selector is `J_k`. With unit symbol covariance the
//! passive-path covariance seen by the receiver is `Σ_k = J_k H H^H J_k^H`.
//!
//! All SINR quantities in the crate are evaluated through [`SinrModel`].

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{abs2_dot, cplx, quad_form, trace_re, CMatrix, CVector};

/// Sampled raised-cosine symbol pulse, truncated to `span_symbols` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    pub rolloff: f64,
    pub samples_per_symbol: usize,
    pub span_symbols: usize,
    /// `g_0 ‖ g_1 ‖ … ‖ g_{I-1}`, each block `samples_per_symbol` long.
    pub taps: Vec<f64>,
}

/// Raised-cosine impulse response with symbol period `symbol_period`,
/// peak at `t = 0`.
pub fn raised_cosine(t: f64, symbol_period: f64, rolloff: f64) -> f64 {
    let x = t / symbol_period;
    if rolloff > 0.0 && ((2.0 * rolloff * x).abs() - 1.0).abs() < 1e-12 {
        // removable singularity at |t| = T_c / (2 β)
        return PI / 4.0 * sinc(1.0 / (2.0 * rolloff));
    }
    let denom = 1.0 - (2.0 * rolloff * x).powi(2);
    sinc(x) * (PI * rolloff * x).cos() / denom
}

/// Normalized sinc, `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-15 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Samples the raised-cosine pulse on `t = 0, 1, …, I·P − 1` (unit sample
/// period) with the peak placed at `t = I·P/2`.
pub fn raised_cosine_taps(rolloff: f64, samples_per_symbol: usize, span_symbols: usize) -> Result<PulseShape> {
    if !(0.0..=1.0).contains(&rolloff) || rolloff.is_nan() {
        return Err(Error::Domain(format!("rolloff {rolloff} outside [0, 1]")));
    }
    if samples_per_symbol == 0 || span_symbols == 0 {
        return Err(Error::Domain("samples per symbol and span must be positive".into()));
    }
    let symbol_period = samples_per_symbol as f64;
    let len = samples_per_symbol * span_symbols;
    let center = len as f64 / 2.0;
    let taps = (0..len)
        .map(|t| raised_cosine(t as f64 - center, symbol_period, rolloff))
        .collect();
    Ok(PulseShape {
        rolloff,
        samples_per_symbol,
        span_symbols,
        taps,
    })
}

/// How the waveform matrix has been scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HNormalization {
    /// Raw pulse samples.
    Unnormalized,
    /// Scaled so that `tr(Σ_0) = 1`, i.e. the expected energy of the nominal
    /// `N`-sample window is one.
    UnitEnergyWindow { window: usize },
}

impl HNormalization {
    pub fn label(&self) -> String {
        match self {
            HNormalization::Unnormalized => "unnormalized".into(),
            HNormalization::UnitEnergyWindow { window } => format!("unit_energy_window_{window}"),
        }
    }
}

/// The `M × L` block-Toeplitz waveform matrix `H` with `s = H b`.
#[derive(Debug, Clone)]
pub struct CommWaveformModel {
    pub h: CMatrix,
    pub symbols: usize,
    pub samples_per_symbol: usize,
    pub span_symbols: usize,
    pub normalization: HNormalization,
}

/// Column `j` of `H` carries the pulse taps at rows `jP … jP + IP − 1`.
pub fn build_waveform_matrix(shape: &PulseShape, symbols: usize) -> Result<CommWaveformModel> {
    if symbols == 0 {
        return Err(Error::Domain("symbol count must be positive".into()));
    }
    let p = shape.samples_per_symbol;
    let span = shape.span_symbols;
    if shape.taps.len() != p * span {
        return Err(Error::Dimension(format!(
            "pulse has {} taps, expected {}",
            shape.taps.len(),
            p * span
        )));
    }
    let m = (symbols + span - 1) * p;
    let mut h = CMatrix::zeros(m, symbols);
    for j in 0..symbols {
        for (r, &g) in shape.taps.iter().enumerate() {
            h[(j * p + r, j)] = cplx(g);
        }
    }
    Ok(CommWaveformModel {
        h,
        symbols,
        samples_per_symbol: p,
        span_symbols: span,
        normalization: HNormalization::Unnormalized,
    })
}

impl CommWaveformModel {
    /// `M = (L + I − 1) P`.
    pub fn num_samples(&self) -> usize {
        self.h.nrows()
    }

    /// Rescales `H` so that the nominal window `J_0 H` has unit expected energy.
    pub fn with_unit_energy_window(&self, window: usize) -> Result<Self> {
        let sigma0 = comm_covariance(self, 0, window)?;
        let energy = trace_re(&sigma0);
        if energy <= 0.0 {
            return Err(Error::Numerical("nominal window carries no energy".into()));
        }
        let mut out = self.clone();
        out.h *= cplx(1.0 / energy.sqrt());
        out.normalization = HNormalization::UnitEnergyWindow { window };
        Ok(out)
    }

    /// The `N × L` rows of `H` selected by `J_k`.
    pub fn window(&self, k: i64, n: usize) -> Result<CMatrix> {
        let start = shift_start(k, n, self.num_samples())?;
        Ok(self.h.rows(start, n).into_owned())
    }
}

/// First sample index `k̄ = (M − N)/2 − k` of the window selected by `J_k`.
pub fn shift_start(k: i64, n: usize, m: usize) -> Result<usize> {
    if n > m || (m - n) % 2 != 0 {
        return Err(Error::Domain(format!(
            "window length {n} and waveform length {m} must differ by an even non-negative amount"
        )));
    }
    let start = ((m - n) / 2) as i64 - k;
    if start < 0 || start as usize + n > m {
        return Err(Error::ShiftOutOfRange { k, n, m });
    }
    Ok(start as usize)
}

/// The `N × M` 0/1 selection matrix `J_k`.
pub fn build_shift_matrix(k: i64, n: usize, m: usize) -> Result<DMatrix<f64>> {
    let start = shift_start(k, n, m)?;
    let mut j = DMatrix::zeros(n, m);
    for i in 0..n {
        j[(i, start + i)] = 1.0;
    }
    Ok(j)
}

/// `Σ_k = J_k H H^H J_k^H` (unit symbol covariance).
pub fn comm_covariance(model: &CommWaveformModel, k: i64, n: usize) -> Result<CMatrix> {
    let w = model.window(k, n)?;
    Ok(&w * w.adjoint())
}

/// Channel and design parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Active-path channel SNR, linear.
    pub gamma_r: f64,
    /// Passive-path channel SNR, linear.
    pub gamma_c: f64,
    pub sigma2: f64,
    /// Pulse length `N`.
    pub n: usize,
    /// Timing uncertainty bound `K`.
    pub k_max: usize,
    /// `u_{-K} … u_K`.
    pub weights: Vec<f64>,
    /// Radar power budget `P_r`.
    pub power: f64,
}

impl Scenario {
    /// Unit noise, unit power budget and uniform weights.
    pub fn new(gamma_r: f64, gamma_c: f64, n: usize, k_max: usize) -> Self {
        Scenario {
            gamma_r,
            gamma_c,
            sigma2: 1.0,
            n,
            k_max,
            weights: vec![1.0; 2 * k_max + 1],
            power: 1.0,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_power(mut self, power: f64) -> Self {
        self.power = power;
        self
    }

    /// `-K, …, K`.
    pub fn delays(&self) -> Vec<i64> {
        let k = self.k_max as i64;
        (-k..=k).collect()
    }

    pub fn validate(&self, model: &CommWaveformModel) -> Result<()> {
        if !(self.gamma_r >= 0.0 && self.gamma_c >= 0.0) || !self.gamma_r.is_finite() || !self.gamma_c.is_finite() {
            return Err(Error::Domain("channel SNRs must be finite and non-negative".into()));
        }
        if !(self.sigma2 > 0.0) || !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::Domain("noise power and power budget must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::Domain("pulse length must be positive".into()));
        }
        if self.weights.len() != 2 * self.k_max + 1 {
            return Err(Error::Dimension(format!(
                "{} weights for K={} (expected {})",
                self.weights.len(),
                self.k_max,
                2 * self.k_max + 1
            )));
        }
        if self.weights.iter().any(|&u| !(u >= 0.0) || !u.is_finite()) || !self.weights.iter().any(|&u| u > 0.0) {
            return Err(Error::Domain("weights must be non-negative with at least one positive".into()));
        }
        let m = model.num_samples();
        if self.n > m || (m - self.n) % 2 != 0 {
            return Err(Error::Domain(format!("M − N = {m} − {} must be even and non-negative", self.n)));
        }
        if self.k_max > (m - self.n) / 2 {
            return Err(Error::Domain(format!(
                "uncertainty bound K={} exceeds (M − N)/2 = {}",
                self.k_max,
                (m - self.n) / 2
            )));
        }
        Ok(())
    }
}

/// Radar waveform and the two receive filters.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    pub s_r: CVector,
    pub w_r: CVector,
    pub w_c: CVector,
}

impl DesignPoint {
    pub fn new(s_r: CVector, w_r: CVector, w_c: CVector) -> Result<Self> {
        let n = s_r.len();
        if w_r.len() != n || w_c.len() != n {
            return Err(Error::Dimension("waveform and filters must share length N".into()));
        }
        if !(w_r.norm() > 0.0) || !(w_c.norm() > 0.0) {
            return Err(Error::Domain("receive filters must be nonzero".into()));
        }
        Ok(DesignPoint { s_r, w_r, w_c })
    }

    pub fn power(&self) -> f64 {
        self.s_r.norm_squared()
    }
}

/// Precomputed passive-path covariances for a set of delays, plus the channel
/// SNRs and weights needed to evaluate every SINR quantity.
#[derive(Debug, Clone)]
pub struct SinrModel {
    pub gamma_r: f64,
    pub gamma_c: f64,
    pub delays: Vec<i64>,
    pub weights: Vec<f64>,
    pub covariances: Vec<CMatrix>,
}

impl SinrModel {
    /// Covariances for `k ∈ [−K, K]` with the scenario's weights.
    pub fn new(sc: &Scenario, model: &CommWaveformModel) -> Result<Self> {
        sc.validate(model)?;
        let delays = sc.delays();
        let covariances = delays
            .iter()
            .map(|&k| comm_covariance(model, k, sc.n))
            .collect::<Result<Vec<_>>>()?;
        Ok(SinrModel {
            gamma_r: sc.gamma_r,
            gamma_c: sc.gamma_c,
            delays,
            weights: sc.weights.clone(),
            covariances,
        })
    }

    /// Evaluation at arbitrary delays (unit weights), e.g. for robustness sweeps.
    pub fn at_delays(sc: &Scenario, model: &CommWaveformModel, delays: &[i64]) -> Result<Self> {
        let covariances = delays
            .iter()
            .map(|&k| comm_covariance(model, k, sc.n))
            .collect::<Result<Vec<_>>>()?;
        Ok(SinrModel {
            gamma_r: sc.gamma_r,
            gamma_c: sc.gamma_c,
            delays: delays.to_vec(),
            weights: vec![1.0; delays.len()],
            covariances,
        })
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    pub fn index_of(&self, k: i64) -> Option<usize> {
        self.delays.iter().position(|&d| d == k)
    }

    /// Active-path term `γ_r |w_r^H s_r|² / (γ_c w_r^H Σ_k w_r + w_r^H w_r)`.
    pub fn radar_term(&self, s_r: &CVector, w_r: &CVector, idx: usize) -> f64 {
        let num = self.gamma_r * abs2_dot(w_r, s_r);
        let den = self.gamma_c * quad_form(&self.covariances[idx], w_r) + w_r.norm_squared();
        num / den
    }

    /// Passive-path term `γ_c w_c^H Σ_k w_c / (γ_r |w_c^H s_r|² + w_c^H w_c)`.
    pub fn comm_term(&self, s_r: &CVector, w_c: &CVector, idx: usize) -> f64 {
        let num = self.gamma_c * quad_form(&self.covariances[idx], w_c);
        let den = self.gamma_r * abs2_dot(w_c, s_r) + w_c.norm_squared();
        num / den
    }

    pub fn sinr(&self, dp: &DesignPoint, idx: usize) -> f64 {
        self.radar_term(&dp.s_r, &dp.w_r, idx) + self.comm_term(&dp.s_r, &dp.w_c, idx)
    }

    pub fn profile(&self, dp: &DesignPoint) -> Vec<f64> {
        (0..self.len()).map(|i| self.sinr(dp, i)).collect()
    }

    pub fn worst_case(&self, dp: &DesignPoint) -> f64 {
        self.profile(dp).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_k u_k SINR_k`, without the `1/(2K+1)` factor.
    pub fn weighted_sum(&self, dp: &DesignPoint) -> f64 {
        self.profile(dp).iter().zip(&self.weights).map(|(s, u)| u * s).sum()
    }

    /// `Σ_k u_k SINR_k / Σ_k u_k`.
    pub fn weighted_mean(&self, dp: &DesignPoint) -> f64 {
        self.weighted_sum(dp) / self.weights.iter().sum::<f64>()
    }
}

/// SINR at delay `k` for the given design point.
pub fn sinr_k(sc: &Scenario, dp: &DesignPoint, model: &CommWaveformModel, k: i64) -> Result<f64> {
    let sm = SinrModel::at_delays(sc, model, &[k])?;
    Ok(sm.sinr(dp, 0))
}

/// `min_{|k| ≤ K} SINR_k`.
pub fn worst_case_sinr(sc: &Scenario, dp: &DesignPoint, model: &CommWaveformModel) -> Result<f64> {
    Ok(SinrModel::new(sc, model)?.worst_case(dp))
}

/// `Σ_{|k| ≤ K} u_k SINR_k`.
pub fn weighted_sum_sinr(sc: &Scenario, dp: &DesignPoint, model: &CommWaveformModel) -> Result<f64> {
    Ok(SinrModel::new(sc, model)?.weighted_sum(dp))
}

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Integer sample offset caused by a target location error `delta_xy`.
///
/// The bistatic delay difference is `(|p − radar| − |p − io|)/c`; `k` is the
/// change of that difference between the true and nominal target positions,
/// in samples of length `sample_period` seconds. Positive `k` means the true
/// target sits relatively closer to the illuminator.
pub fn geometric_delay_offset(
    target_xy: (f64, f64),
    radar_xy: (f64, f64),
    io_xy: (f64, f64),
    delta_xy: (f64, f64),
    sample_period: f64,
) -> Result<i64> {
    if !(sample_period > 0.0) {
        return Err(Error::Domain("sample period must be positive".into()));
    }
    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let delay_diff = |p: (f64, f64)| (dist(p, radar_xy) - dist(p, io_xy)) / SPEED_OF_LIGHT;
    let nominal = delay_diff(target_xy);
    let actual = delay_diff((target_xy.0 + delta_xy.0, target_xy.1 + delta_xy.1));
    Ok(((actual - nominal) / sample_period).round() as i64)
}
