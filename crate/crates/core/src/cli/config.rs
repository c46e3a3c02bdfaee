//! Experiment configuration: a TOML file with `[scenario]`, `[algorithm]`
//! and `[experiment]` tables. Every field is optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::{DesignConfig, Method, Problem};
use crate::detection::DetectionConfig;
use crate::error::{Error, Result};
use crate::fractional::FractionalConfig;
use crate::linalg::from_db;
use crate::signal_model::{build_waveform_matrix, raised_cosine_taps, CommWaveformModel, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `tr(Σ_0) = 1`.
    UnitEnergyWindow,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "MM")]
    Mm,
    #[serde(rename = "WS")]
    Ws,
    #[serde(rename = "SYNC")]
    Sync,
    #[serde(rename = "HYBRID_RX")]
    HybridRx,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Mm => "MM",
            Mode::Ws => "WS",
            Mode::Sync => "SYNC",
            Mode::HybridRx => "HYBRID_RX",
        }
    }

    pub fn method(self) -> Option<Method> {
        match self {
            Mode::Mm => Some(Method::MaxMin),
            Mode::Ws => Some(Method::WeightedSum),
            Mode::Sync => Some(Method::Sync),
            Mode::HybridRx => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Design,
    Contour,
    KSweep,
    Robustness,
    Detect,
    Convergence,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Design => "design",
            ExperimentKind::Contour => "contour",
            ExperimentKind::KSweep => "k-sweep",
            ExperimentKind::Robustness => "robustness",
            ExperimentKind::Detect => "detect",
            ExperimentKind::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub n: usize,
    pub l: usize,
    pub p: usize,
    pub i: usize,
    pub rolloff: f64,
    pub gamma_r_db: f64,
    pub gamma_c_db: f64,
    pub sigma2: f64,
    pub k: usize,
    pub power: f64,
    /// `2K + 1` weights; uniform when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub h_normalization: Normalization,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 16,
            l: 10,
            p: 8,
            i: 2,
            rolloff: 0.22,
            gamma_r_db: 25.0,
            gamma_c_db: 25.0,
            sigma2: 1.0,
            k: 0,
            power: 1.0,
            weights: None,
            h_normalization: Normalization::UnitEnergyWindow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgorithmConfig {
    pub mode: Mode,
    /// Filter blocks used by `HYBRID_RX`.
    pub rx_mode: Mode,
    pub epsilon: f64,
    pub q: usize,
    pub max_iters: usize,
    pub max_scp_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            mode: Mode::Mm,
            rx_mode: Mode::Mm,
            epsilon: 0.01,
            q: 200,
            max_iters: 50,
            max_scp_iters: 50,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Contour grid over both channel SNRs, dB.
    pub grid_min_db: f64,
    pub grid_max_db: f64,
    pub grid_step_db: f64,
    /// Uncertainty bounds of the K sweep.
    pub k_values: Vec<usize>,
    /// Number of seeds per sweep point, starting at the run seed.
    pub seeds: usize,
    /// Design modes of the K sweep and robustness experiments.
    pub modes: Vec<Mode>,
    /// Design bounds of the robustness experiment.
    pub design_k: Vec<usize>,
    /// Robustness evaluation range `k ∈ [−eval_k_max, eval_k_max]`.
    pub eval_k_max: usize,
    /// Design bounds of the detection experiment.
    pub detect_k: Vec<usize>,
    /// True delay used in detection trials.
    pub true_k: i64,
    pub p_f: f64,
    pub trials_h0: usize,
    pub trials_h1: usize,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
    pub snr_step_db: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: None,
            output: None,
            grid_min_db: 0.0,
            grid_max_db: 40.0,
            grid_step_db: 2.5,
            k_values: (0..=6).collect(),
            seeds: 5,
            modes: vec![Mode::Mm, Mode::Ws],
            design_k: vec![0, 3],
            eval_k_max: 6,
            detect_k: vec![0, 4],
            true_k: 0,
            p_f: 1e-4,
            trials_h0: 1_000_000,
            trials_h1: 100_000,
            snr_min_db: 0.0,
            snr_max_db: 30.0,
            snr_step_db: 2.5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub algorithm: AlgorithmConfig,
    pub experiment: ExperimentConfig,
}

/// Inclusive arithmetic grid `min, min + step, …, ≤ max`.
pub fn grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + step * i as f64).collect()
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read configuration {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always serializable")
    }

    fn fail(field: &str, msg: impl std::fmt::Display) -> Error {
        Error::Config(format!("field `{field}`: {msg}"))
    }

    /// Checks every field that the runners rely on, including that the
    /// scenario is consistent with the waveform model.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        if s.n == 0 || s.l == 0 || s.p == 0 || s.i == 0 {
            return Err(Self::fail("scenario.n/l/p/i", "must be positive"));
        }
        if !(0.0..=1.0).contains(&s.rolloff) {
            return Err(Self::fail("scenario.rolloff", "must lie in [0, 1]"));
        }
        for (name, v) in [("scenario.gamma_r_db", s.gamma_r_db), ("scenario.gamma_c_db", s.gamma_c_db)] {
            if !v.is_finite() {
                return Err(Self::fail(name, "must be finite"));
            }
        }
        if !(s.sigma2 > 0.0) || !(s.power > 0.0) {
            return Err(Self::fail("scenario.sigma2/power", "must be positive"));
        }
        let a = &self.algorithm;
        if !(a.epsilon > 0.0) {
            return Err(Self::fail("algorithm.epsilon", "must be positive"));
        }
        if a.q == 0 || a.max_iters == 0 || a.max_scp_iters == 0 {
            return Err(Self::fail("algorithm.q/max_iters/max_scp_iters", "must be positive"));
        }
        if !matches!(a.rx_mode, Mode::Mm | Mode::Ws | Mode::Sync) {
            return Err(Self::fail("algorithm.rx_mode", "must be MM, WS or SYNC"));
        }
        let e = &self.experiment;
        if !(e.grid_step_db > 0.0) || e.grid_max_db < e.grid_min_db {
            return Err(Self::fail("experiment.grid_*", "need step > 0 and max ≥ min"));
        }
        if !(e.snr_step_db > 0.0) || e.snr_max_db < e.snr_min_db {
            return Err(Self::fail("experiment.snr_*", "need step > 0 and max ≥ min"));
        }
        if e.seeds == 0 {
            return Err(Self::fail("experiment.seeds", "must be positive"));
        }
        if e.modes.is_empty() || e.k_values.is_empty() || e.design_k.is_empty() || e.detect_k.is_empty() {
            return Err(Self::fail("experiment", "mode and K lists must be non-empty"));
        }
        if e.modes.iter().any(|m| !matches!(m, Mode::Mm | Mode::Ws)) {
            return Err(Self::fail("experiment.modes", "must contain only MM or WS"));
        }
        if !(e.p_f > 0.0 && e.p_f < 1.0) {
            return Err(Self::fail("experiment.p_f", "must lie in (0, 1)"));
        }
        if (e.trials_h0 as f64) * e.p_f < 10.0 || e.trials_h1 == 0 {
            return Err(Self::fail("experiment.trials_h0/trials_h1", "need trials_h0 · p_f ≥ 10 and trials_h1 > 0"));
        }

        let model = self.model()?;
        let max_k = self
            .experiment
            .k_values
            .iter()
            .chain(&e.design_k)
            .chain(&e.detect_k)
            .chain(std::iter::once(&s.k))
            .chain(std::iter::once(&e.eval_k_max))
            .copied()
            .max()
            .unwrap_or(0)
            .max(e.true_k.unsigned_abs() as usize);
        let m = model.num_samples();
        if s.n > m || (m - s.n) % 2 != 0 {
            return Err(Self::fail("scenario.n", format!("M − N = {m} − {} must be even and non-negative", s.n)));
        }
        if max_k > (m - s.n) / 2 {
            return Err(Self::fail("scenario.k / experiment", format!("delay bound {max_k} exceeds (M − N)/2 = {}", (m - s.n) / 2)));
        }
        self.scenario_with(s.k, from_db(s.gamma_r_db), from_db(s.gamma_c_db))
            .validate(&model)
            .map_err(|e| Self::fail("scenario", e))?;
        Ok(())
    }

    pub fn model(&self) -> Result<CommWaveformModel> {
        let s = &self.scenario;
        let shape = raised_cosine_taps(s.rolloff, s.p, s.i).map_err(|e| Self::fail("scenario", e))?;
        let raw = build_waveform_matrix(&shape, s.l).map_err(|e| Self::fail("scenario", e))?;
        match s.h_normalization {
            Normalization::None => Ok(raw),
            Normalization::UnitEnergyWindow => raw.with_unit_energy_window(s.n).map_err(|e| Self::fail("scenario", e)),
        }
    }

    /// Scenario at bound `k` and the given linear SNRs. Configured weights are
    /// used only when their length matches `2k + 1`.
    pub fn scenario_with(&self, k: usize, gamma_r: f64, gamma_c: f64) -> Scenario {
        let s = &self.scenario;
        let mut sc = Scenario::new(gamma_r, gamma_c, s.n, k).with_power(s.power);
        sc.sigma2 = s.sigma2;
        if let Some(w) = &s.weights {
            if w.len() == 2 * k + 1 {
                sc = sc.with_weights(w.clone());
            }
        }
        sc
    }

    pub fn scenario(&self) -> Scenario {
        let s = &self.scenario;
        self.scenario_with(s.k, from_db(s.gamma_r_db), from_db(s.gamma_c_db))
    }

    pub fn problem(&self, model: &CommWaveformModel, k: usize, gamma_r: f64, gamma_c: f64) -> Result<Problem> {
        Problem::new(&self.scenario_with(k, gamma_r, gamma_c), model)
    }

    pub fn design_config(&self, seed: u64) -> DesignConfig {
        let a = &self.algorithm;
        DesignConfig {
            epsilon: a.epsilon,
            randomization_trials: a.q,
            max_outer_iters: a.max_iters,
            max_scp_iters: a.max_scp_iters,
            seed,
            fractional: FractionalConfig {
                epsilon: a.epsilon,
                ..FractionalConfig::default()
            },
            ..DesignConfig::default()
        }
    }

    pub fn detection_config(&self, seed: u64) -> DetectionConfig {
        let e = &self.experiment;
        DetectionConfig {
            p_f: e.p_f,
            trials_h0: e.trials_h0,
            trials_h1: e.trials_h1,
            snr_grid_db: grid(e.snr_min_db, e.snr_max_db, e.snr_step_db),
            sigma2: self.scenario.sigma2,
            seed,
        }
    }

    /// Seed precedence: explicit override, then the configuration, then 42.
    pub fn resolved_seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.algorithm.seed).unwrap_or(42)
    }

    /// Flattened `section.key = value` pairs for the run metadata.
    pub fn flatten(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("configuration is always serializable");
        let mut out = Vec::new();
        if let toml::Value::Table(sections) = value {
            for (section, body) in sections {
                if let toml::Value::Table(fields) = body {
                    for (k, v) in fields {
                        out.push((format!("{section}.{k}"), v.to_string()));
                    }
                }
            }
        }
        out.sort();
        out
    }
}
