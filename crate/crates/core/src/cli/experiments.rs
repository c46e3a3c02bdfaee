//! The six experiment runners. Each writes its tables into the output
//! directory and returns the metadata entries it wants recorded.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

use crate::design::{
    baseline_sinr, hybrid_rx_design, initial_point, mm_design, random_binary_waveform, sync_design, ws_design, Baseline,
    DesignReport, Method, Problem,
};
use crate::detection::{detection_curve, DetectionCurve, Detector};
use crate::error::Result;
use crate::linalg::{from_db, leading_eigenpair, to_db};
use crate::signal_model::{CommWaveformModel, SinrModel};

use super::config::{grid, Config, ExperimentKind, Mode};
use super::output::{complex_fields, complex_header, emit_convergence_trace, num, Table};

/// One finished design together with the instance it was computed for.
#[derive(Debug, Clone)]
pub struct DesignRecord {
    pub id: String,
    pub mode: Mode,
    pub k_bound: usize,
    pub gamma_r_db: f64,
    pub gamma_c_db: f64,
    pub seed: u64,
    pub report: DesignReport,
}

/// Everything a run produced, for the caller and the metadata file.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub designs: Vec<DesignRecord>,
    pub curves: Vec<DetectionCurve>,
    pub metadata: BTreeMap<String, String>,
}

fn design_id(i: usize) -> String {
    format!("d{i:04}")
}

/// Runs `mode` on `problem` from the seeded starting point.
pub fn run_design(cfg: &Config, problem: &Problem, mode: Mode, seed: u64) -> Result<DesignReport> {
    let dc = cfg.design_config(seed);
    let init = initial_point(problem, seed)?;
    match mode {
        Mode::Mm => mm_design(problem, &init, &dc),
        Mode::Ws => ws_design(problem, &init, &dc),
        Mode::Sync => sync_design(problem, &init, &dc),
        Mode::HybridRx => {
            let method = cfg.algorithm.rx_mode.method().unwrap_or(Method::MaxMin);
            hybrid_rx_design(problem, &init, &dc, method)
        }
    }
}

struct Job {
    mode: Mode,
    k_bound: usize,
    gamma_r_db: f64,
    gamma_c_db: f64,
    seed: u64,
}

/// Runs the jobs concurrently; records keep the job order.
fn run_jobs(cfg: &Config, model: &CommWaveformModel, jobs: Vec<Job>) -> Result<Vec<DesignRecord>> {
    jobs.into_par_iter()
        .enumerate()
        .map(|(i, j)| {
            let problem = cfg.problem(model, j.k_bound, from_db(j.gamma_r_db), from_db(j.gamma_c_db))?;
            let report = run_design(cfg, &problem, j.mode, j.seed)?;
            Ok(DesignRecord {
                id: design_id(i),
                mode: j.mode,
                k_bound: j.k_bound,
                gamma_r_db: j.gamma_r_db,
                gamma_c_db: j.gamma_c_db,
                seed: j.seed,
                report,
            })
        })
        .collect()
}

fn write_designs(out: &Path, designs: &[DesignRecord], n: usize) -> Result<()> {
    let mut header: Vec<String> = [
        "design_id",
        "mode",
        "design_k",
        "gamma_r_db",
        "gamma_c_db",
        "seed",
        "converged",
        "iterations",
        "objective_linear",
        "output_sinr_linear",
        "output_sinr_db",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for p in ["s_r", "w_r", "w_c"] {
        header.extend(complex_header(p, n));
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::create(&out.join("designs.csv"), &refs)?;
    for d in designs {
        let r = &d.report;
        let mut row = vec![
            d.id.clone(),
            d.mode.label().to_string(),
            d.k_bound.to_string(),
            num(d.gamma_r_db),
            num(d.gamma_c_db),
            d.seed.to_string(),
            r.converged.to_string(),
            r.iterations.to_string(),
            num(r.objective),
            num(r.output_sinr()),
            num(to_db(r.output_sinr())),
        ];
        row.extend(complex_fields(&r.point.s_r));
        row.extend(complex_fields(&r.point.w_r));
        row.extend(complex_fields(&r.point.w_c));
        t.row(row)?;
    }
    t.finish()
}

fn write_profiles(out: &Path, designs: &[DesignRecord]) -> Result<()> {
    let mut t = Table::create(&out.join("profile.csv"), &["design_id", "k", "sinr_linear", "sinr_db"])?;
    for d in designs {
        for (k, v) in d.report.delays.iter().zip(&d.report.profile) {
            t.row([d.id.clone(), k.to_string(), num(*v), num(to_db(*v))])?;
        }
    }
    t.finish()
}

fn record_designs(meta: &mut BTreeMap<String, String>, designs: &[DesignRecord]) {
    meta.insert("designs.count".into(), designs.len().to_string());
    meta.insert(
        "designs.converged".into(),
        designs.iter().filter(|d| d.report.converged).count().to_string(),
    );
    for d in designs {
        meta.insert(format!("design.{}.converged", d.id), d.report.converged.to_string());
        meta.insert(format!("design.{}.iterations", d.id), d.report.iterations.to_string());
    }
}

fn finish_designs(out: &Path, cfg: &Config, designs: Vec<DesignRecord>, mut run: RunOutput) -> Result<RunOutput> {
    write_designs(out, &designs, cfg.scenario.n)?;
    write_profiles(out, &designs)?;
    record_designs(&mut run.metadata, &designs);
    run.designs = designs;
    Ok(run)
}

pub fn design(cfg: &Config, model: &CommWaveformModel, seed: u64, out: &Path) -> Result<RunOutput> {
    let s = &cfg.scenario;
    let job = Job {
        mode: cfg.algorithm.mode,
        k_bound: s.k,
        gamma_r_db: s.gamma_r_db,
        gamma_c_db: s.gamma_c_db,
        seed,
    };
    let designs = run_jobs(cfg, model, vec![job])?;
    for d in &designs {
        let name = format!("convergence_{}.csv", d.mode.label().to_lowercase());
        emit_convergence_trace(&d.report, &out.join(name))?;
    }
    finish_designs(out, cfg, designs, RunOutput::default())
}

fn txrx_mode(cfg: &Config) -> Mode {
    match cfg.algorithm.mode {
        Mode::HybridRx => cfg.algorithm.rx_mode,
        m => m,
    }
}

pub fn contour(cfg: &Config, model: &CommWaveformModel, seed: u64, out: &Path) -> Result<RunOutput> {
    let e = &cfg.experiment;
    let axis = grid(e.grid_min_db, e.grid_max_db, e.grid_step_db);
    let k = cfg.scenario.k;
    let mut jobs = Vec::new();
    for &gr in &axis {
        for &gc in &axis {
            for mode in [txrx_mode(cfg), Mode::HybridRx] {
                jobs.push(Job { mode, k_bound: k, gamma_r_db: gr, gamma_c_db: gc, seed });
            }
        }
    }
    let designs = run_jobs(cfg, model, jobs)?;
    let mut t = Table::create(
        &out.join("contour.csv"),
        &["gamma_r_db", "gamma_c_db", "config", "sinr_db", "design_id"],
    )?;
    let mut it = designs.iter();
    for &gr in &axis {
        for &gc in &axis {
            let problem = cfg.problem(model, k, from_db(gr), from_db(gc))?;
            for label in ["hybrid-TxRx", "hybrid-Rx"] {
                let d = it.next().expect("one design per grid point and configuration");
                t.row([num(gr), num(gc), label.into(), num(to_db(d.report.output_sinr())), d.id.clone()])?;
            }
            for b in [Baseline::ActiveOnly, Baseline::PassiveOnly] {
                t.row([num(gr), num(gc), b.label().into(), num(to_db(baseline_sinr(b, &problem))), String::new()])?;
            }
        }
    }
    t.finish()?;
    let mut run = RunOutput::default();
    run.metadata.insert("contour.points".into(), (axis.len() * axis.len()).to_string());
    finish_designs(out, cfg, designs, run)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn k_sweep(cfg: &Config, model: &CommWaveformModel, seed: u64, out: &Path) -> Result<RunOutput> {
    let e = &cfg.experiment;
    let s = &cfg.scenario;
    let mut jobs = Vec::new();
    for &k in &e.k_values {
        for &mode in &e.modes {
            for j in 0..e.seeds {
                jobs.push(Job {
                    mode,
                    k_bound: k,
                    gamma_r_db: s.gamma_r_db,
                    gamma_c_db: s.gamma_c_db,
                    seed: seed + j as u64,
                });
            }
        }
    }
    let designs = run_jobs(cfg, model, jobs)?;
    let mut t = Table::create(&out.join("ksweep.csv"), &["K", "mode", "seed", "sinr_db", "design_id"])?;
    for d in &designs {
        t.row([
            d.k_bound.to_string(),
            d.mode.label().into(),
            d.seed.to_string(),
            num(to_db(d.report.output_sinr())),
            d.id.clone(),
        ])?;
    }
    t.finish()?;
    let mut m = Table::create(&out.join("ksweep_median.csv"), &["K", "mode", "median_sinr_db"])?;
    for chunk in designs.chunks(e.seeds) {
        let v = chunk.iter().map(|d| to_db(d.report.output_sinr())).collect();
        m.row([chunk[0].k_bound.to_string(), chunk[0].mode.label().into(), num(median(v))])?;
    }
    m.finish()?;
    finish_designs(out, cfg, designs, RunOutput::default())
}

pub fn robustness(cfg: &Config, model: &CommWaveformModel, seed: u64, out: &Path) -> Result<RunOutput> {
    let e = &cfg.experiment;
    let s = &cfg.scenario;
    let mut jobs = Vec::new();
    for &k in &e.design_k {
        for &mode in &e.modes {
            jobs.push(Job { mode, k_bound: k, gamma_r_db: s.gamma_r_db, gamma_c_db: s.gamma_c_db, seed });
        }
    }
    let designs = run_jobs(cfg, model, jobs)?;
    let kmax = e.eval_k_max as i64;
    let delays: Vec<i64> = (-kmax..=kmax).collect();
    let sc = cfg.scenario_with(0, from_db(s.gamma_r_db), from_db(s.gamma_c_db));
    let eval = SinrModel::at_delays(&sc, model, &delays)?;
    let mut t = Table::create(
        &out.join("robustness.csv"),
        &["design_K", "mode", "k", "sinr_linear", "sinr_db", "design_id"],
    )?;
    for d in &designs {
        for (k, v) in delays.iter().zip(eval.profile(&d.report.point)) {
            t.row([d.k_bound.to_string(), d.mode.label().into(), k.to_string(), num(v), num(to_db(v)), d.id.clone()])?;
        }
    }
    t.finish()?;
    finish_designs(out, cfg, designs, RunOutput::default())
}

pub fn detect(cfg: &Config, model: &CommWaveformModel, seed: u64, out: &Path) -> Result<RunOutput> {
    let e = &cfg.experiment;
    let s = &cfg.scenario;
    let mut jobs = Vec::new();
    for &k in &e.detect_k {
        for &mode in &e.modes {
            jobs.push(Job { mode, k_bound: k, gamma_r_db: s.gamma_r_db, gamma_c_db: s.gamma_c_db, seed });
        }
    }
    let designs = run_jobs(cfg, model, jobs)?;

    let nominal = cfg.problem(model, 0, from_db(s.gamma_r_db), from_db(s.gamma_c_db))?;
    let mut detectors = vec![
        Detector::active_only(&random_binary_waveform(s.n, s.power, seed)),
        Detector::passive_only(&leading_eigenpair(nominal.nominal_covariance()).1, model, e.true_k)?,
    ];
    for d in &designs {
        let label = format!("hybrid-{}-K{}", d.mode.label(), d.k_bound);
        detectors.push(Detector::hybrid(label, &d.report.point, model, e.true_k)?);
    }
    let dc = cfg.detection_config(seed);
    let curves = detectors.iter().map(|det| detection_curve(det, &dc)).collect::<Result<Vec<_>>>()?;

    let mut t = Table::create(
        &out.join("detection.csv"),
        &["config", "snr_db", "pm", "half_width", "threshold", "trials_h1"],
    )?;
    for c in &curves {
        for i in 0..c.snr_db.len() {
            t.row([
                c.label.clone(),
                num(c.snr_db[i]),
                num(c.pm[i]),
                num(c.half_width[i]),
                num(c.threshold),
                c.trials.to_string(),
            ])?;
        }
    }
    t.finish()?;
    let mut run = RunOutput::default();
    for c in &curves {
        run.metadata.insert(format!("threshold.{}", c.label), num(c.threshold));
    }
    run.curves = curves;
    finish_designs(out, cfg, designs, run)
}

pub fn convergence(cfg: &Config, model: &CommWaveformModel, seed: u64, out: &Path) -> Result<RunOutput> {
    let s = &cfg.scenario;
    let jobs = cfg
        .experiment
        .modes
        .iter()
        .map(|&mode| Job { mode, k_bound: s.k, gamma_r_db: s.gamma_r_db, gamma_c_db: s.gamma_c_db, seed })
        .collect();
    let designs = run_jobs(cfg, model, jobs)?;
    for d in &designs {
        let name = format!("convergence_{}.csv", d.mode.label().to_lowercase());
        emit_convergence_trace(&d.report, &out.join(name))?;
    }
    finish_designs(out, cfg, designs, RunOutput::default())
}

pub fn dispatch(kind: ExperimentKind, cfg: &Config, seed: u64, out: &Path) -> Result<RunOutput> {
    let model = cfg.model()?;
    let mut run = match kind {
        ExperimentKind::Design => design(cfg, &model, seed, out),
        ExperimentKind::Contour => contour(cfg, &model, seed, out),
        ExperimentKind::KSweep => k_sweep(cfg, &model, seed, out),
        ExperimentKind::Robustness => robustness(cfg, &model, seed, out),
        ExperimentKind::Detect => detect(cfg, &model, seed, out),
        ExperimentKind::Convergence => convergence(cfg, &model, seed, out),
    }?;
    run.metadata.insert("h_normalization".into(), model.normalization.label());
    Ok(run)
}
