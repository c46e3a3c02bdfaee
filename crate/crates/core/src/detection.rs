//! Monte Carlo evaluation of the two-filter energy detector.
//!
//! Under `H0` the received pulse is white noise; under `H1` it is
//! `α_r s_r + α_c s_c + w` with independent circular complex Gaussian
//! amplitudes and a fresh BPSK symbol block per trial. The detector declares
//! a target when `Σ_i |w_i^H y|² > ζ`. Thresholds come from the empirical
//! `1 − P_f` quantile of the `H0` statistic.
//!
//! Trials are split into fixed-size chunks; chunk `c` draws from a ChaCha
//! stream selected by `c`, so results do not depend on how chunks are
//! scheduled across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{cplx, from_db, CMatrix, CVector};
use crate::signal_model::{CommWaveformModel, DesignPoint};

const CHUNK: usize = 4096;

/// `1.96`, the two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    pub p_f: f64,
    pub trials_h0: usize,
    pub trials_h1: usize,
    pub snr_grid_db: Vec<f64>,
    pub sigma2: f64,
    pub seed: u64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            p_f: 1e-4,
            trials_h0: 1_000_000,
            trials_h1: 100_000,
            snr_grid_db: (0..=12).map(|i| 2.5 * i as f64).collect(),
            sigma2: 1.0,
            seed: 42,
        }
    }
}

/// Signals present under `H1` and the receive filters of one configuration.
#[derive(Debug, Clone)]
pub struct Detector {
    pub label: String,
    pub filters: Vec<CVector>,
    /// Radar waveform; `None` when the active path is not used.
    pub s_r: Option<CVector>,
    /// Shifted waveform matrix `J_k H`; `None` when the passive path is not used.
    pub comm_window: Option<CMatrix>,
}

impl Detector {
    /// Both paths, both filters of `dp`, passive signal at true delay `k`.
    pub fn hybrid(label: impl Into<String>, dp: &DesignPoint, model: &CommWaveformModel, k: i64) -> Result<Self> {
        Ok(Detector {
            label: label.into(),
            filters: vec![dp.w_r.clone(), dp.w_c.clone()],
            s_r: Some(dp.s_r.clone()),
            comm_window: Some(model.window(k, dp.s_r.len())?),
        })
    }

    /// Radar path only, matched filter.
    pub fn active_only(s_r: &CVector) -> Self {
        Detector {
            label: "active-only".into(),
            filters: vec![crate::linalg::normalized(s_r)],
            s_r: Some(s_r.clone()),
            comm_window: None,
        }
    }

    /// Passive path only with filter `w_c`.
    pub fn passive_only(w_c: &CVector, model: &CommWaveformModel, k: i64) -> Result<Self> {
        Ok(Detector {
            label: "passive-only".into(),
            filters: vec![w_c.clone()],
            s_r: None,
            comm_window: Some(model.window(k, w_c.len())?),
        })
    }

    fn dim(&self) -> usize {
        self.filters[0].len()
    }

    fn statistic(&self, y: &CVector) -> f64 {
        self.filters.iter().map(|w| w.dotc(y).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct DetectionCurve {
    pub label: String,
    pub threshold: f64,
    pub snr_db: Vec<f64>,
    pub pm: Vec<f64>,
    pub half_width: Vec<f64>,
    pub trials: usize,
}

/// 95% normal-approximation half-width of a binomial proportion.
pub fn binomial_half_width(p: f64, trials: usize) -> f64 {
    Z95 * (p * (1.0 - p) / trials as f64).sqrt()
}

fn complex_normal<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

fn noise<R: Rng>(rng: &mut R, n: usize, sigma2: f64) -> CVector {
    CVector::from_fn(n, |_, _| complex_normal(rng, sigma2))
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Runs `trials` independent evaluations of `f` in deterministic chunks.
fn monte_carlo<T, F>(trials: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK.min(trials - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

fn check_trials(trials: usize, p_f: f64) -> Result<()> {
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::Domain(format!("P_f = {p_f} must lie in (0, 1)")));
    }
    if (trials as f64) * p_f < 10.0 {
        return Err(Error::InsufficientTrials { trials, p_f });
    }
    Ok(())
}

/// Empirical `1 − P_f` quantile of the noise-only statistic.
pub fn calibrate_threshold(detector: &Detector, sigma2: f64, p_f: f64, trials: usize, seed: u64) -> Result<f64> {
    check_trials(trials, p_f)?;
    if !(sigma2 > 0.0) {
        return Err(Error::Domain("noise power must be positive".into()));
    }
    let n = detector.dim();
    let mut stats = monte_carlo(trials, seed, |rng| detector.statistic(&noise(rng, n, sigma2)));
    let idx = (((1.0 - p_f) * trials as f64).ceil() as usize).clamp(1, trials) - 1;
    let (_, q, _) = stats.select_nth_unstable_by(idx, f64::total_cmp);
    Ok(*q)
}

/// Fraction of noise-only trials whose statistic exceeds `threshold`.
pub fn false_alarm_rate(detector: &Detector, sigma2: f64, threshold: f64, trials: usize, seed: u64) -> f64 {
    let n = detector.dim();
    let hits = monte_carlo(trials, seed, |rng| detector.statistic(&noise(rng, n, sigma2)) > threshold);
    hits.iter().filter(|&&h| h).count() as f64 / trials as f64
}

/// One `H1` observation at average per-path SNR `snr` (linear).
fn observe<R: Rng>(detector: &Detector, rng: &mut R, snr: f64, sigma2: f64) -> CVector {
    let n = detector.dim();
    let mut y = noise(rng, n, sigma2);
    if let Some(s_r) = &detector.s_r {
        let a = complex_normal(rng, snr * sigma2);
        y += s_r * a;
    }
    if let Some(h) = &detector.comm_window {
        let b = CVector::from_fn(h.ncols(), |_, _| cplx(if rng.random::<bool>() { 1.0 } else { -1.0 }));
        let s_c = h * b;
        let e = s_c.norm();
        let a = complex_normal(rng, snr * sigma2);
        if e > 0.0 {
            y += s_c * (a / e);
        }
    }
    y
}

/// Estimated probability of missing at average SNR `snr_db`.
pub fn missing_probability(detector: &Detector, sigma2: f64, threshold: f64, snr_db: f64, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial required".into()));
    }
    let snr = if snr_db == f64::NEG_INFINITY { 0.0 } else { from_db(snr_db) };
    let misses = monte_carlo(trials, seed, |rng| detector.statistic(&observe(detector, rng, snr, sigma2)) <= threshold);
    Ok(misses.iter().filter(|&&m| m).count() as f64 / trials as f64)
}

/// Calibrates the threshold for `detector`, then sweeps the SNR grid.
pub fn detection_curve(detector: &Detector, cfg: &DetectionConfig) -> Result<DetectionCurve> {
    let threshold = calibrate_threshold(detector, cfg.sigma2, cfg.p_f, cfg.trials_h0, cfg.seed)?;
    let mut pm = Vec::with_capacity(cfg.snr_grid_db.len());
    let mut half_width = Vec::with_capacity(cfg.snr_grid_db.len());
    for (i, &snr) in cfg.snr_grid_db.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(0x5851_F42D_4C95_7F2D_u64.wrapping_mul(i as u64 + 1));
        let p = missing_probability(detector, cfg.sigma2, threshold, snr, cfg.trials_h1, seed)?;
        pm.push(p);
        half_width.push(binomial_half_width(p, cfg.trials_h1));
    }
    Ok(DetectionCurve {
        label: detector.label.clone(),
        threshold,
        snr_db: cfg.snr_grid_db.clone(),
        pm,
        half_width,
        trials: cfg.trials_h1,
    })
}

/// Threshold of two orthonormal filters in white noise: the root of
/// `(1 + ζ/σ²) e^{−ζ/σ²} = P_f`.
pub fn orthonormal_pair_threshold(p_f: f64, sigma2: f64) -> f64 {
    // the tail is decreasing in ζ; bisection on [0, hi]
    let tail = |z: f64| (1.0 + z) * (-z).exp();
    let mut hi = 1.0;
    while tail(hi) > p_f {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > p_f {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * sigma2
}
