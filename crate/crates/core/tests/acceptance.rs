//! Acceptance criteria 1–10. Each test prints one `criterion N: PASS|FAIL`
//! line followed by the measured quantities.
//!
//! cargo test --release --test acceptance -- --nocapture --test-threads 1

mod common;

use std::time::Instant;

use common::{default_model, grid_max_2x2, median, model, pencil_max, problem_db, quotient, real_2x2};
use hybrid_radar::design::{
    hybrid_rx_design, initial_point, mm_design, random_binary_waveform, sync_design, sync_filter_r, ws_design,
    ws_filter_c_step, baseline_sinr, Baseline, DesignConfig, DesignReport, DesignState, Method, Problem,
};
use hybrid_radar::detection::{calibrate_threshold, detection_curve, DetectionConfig, DetectionCurve, Detector};
use hybrid_radar::fractional::{dinkelbach_maxmin, FractionalConfig, Ratio, RatioFamily};
use hybrid_radar::linalg::{cplx, from_db, identity, outer, to_db, CMatrix, CVector};
use hybrid_radar::sdp::{
    maximize_affine_trace, solve_concave_sqrt, solve_maxmin_affine, AffineForm, PsdProgram, SolverConfig, SqrtTerm,
};
use hybrid_radar::signal_model::{DesignPoint, Scenario, SinrModel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, pass: bool, lines: &[String]) {
    println!("criterion {n}: {}", if pass { "PASS" } else { "FAIL" });
    for l in lines {
        println!("    {l}");
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn random_real_symmetric(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| cplx(rng.random::<f64>() * 2.0 - 1.0));
    (&a + a.transpose()) * cplx(0.5)
}

fn random_real_pd(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| cplx(rng.random::<f64>() - 0.5));
    &a * a.transpose() + identity(n) * cplx(0.2)
}

#[test]
fn criterion_01_closed_form_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_r: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for inst in 0..50 {
        let rolloff = 0.1 + 0.8 * rng.random::<f64>();
        let m = model(rolloff, 4, 2, 4, 8);
        let k = inst % 2;
        let p = problem_db(&m, 30.0 * rng.random::<f64>(), 30.0 * rng.random::<f64>(), 8, k);
        let mut dp = initial_point(&p, inst as u64).unwrap();
        dp.s_r = random_vector(&mut rng, 8);

        let w_r = sync_filter_r(&dp.s_r, &p).unwrap();
        let a = outer(&dp.s_r) * cplx(p.gamma_r());
        let i0 = p.sinr.index_of(0).unwrap();
        let b = &p.sinr.covariances[i0] * cplx(p.gamma_c()) + identity(8);
        let oracle = pencil_max(&a, &b);
        worst_r = worst_r.max((quotient(&a, &b, &w_r) - oracle).abs() / oracle);

        let st = ws_filter_c_step(&DesignState::new(dp.clone()), &p).unwrap();
        let mut a = CMatrix::zeros(8, 8);
        for (c, u) in p.sinr.covariances.iter().zip(&p.sinr.weights) {
            a += c * cplx(u * p.gamma_c());
        }
        let b = outer(&dp.s_r) * cplx(p.gamma_r()) + identity(8);
        let oracle = pencil_max(&a, &b);
        worst_c = worst_c.max((quotient(&a, &b, &st.point.w_c) - oracle).abs() / oracle);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst_r <= 1e-8 && worst_c <= 1e-8 && secs < 10.0;
    report(
        1,
        pass,
        &[
            format!("radar filter: worst relative quotient gap {worst_r:.2e}"),
            format!("communication filter: worst relative quotient gap {worst_c:.2e}"),
            format!("runtime {secs:.2} s"),
        ],
    );
    assert!(pass);
}

#[test]
fn criterion_02_solver_oracles() {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    // max-min of affine forms against a refined grid over real 2x2 matrices
    let mut worst_mm: f64 = 0.0;
    for _ in 0..6 {
        let forms: Vec<AffineForm> = (0..3)
            .map(|_| AffineForm::new(rng.random::<f64>() - 0.5, random_real_symmetric(&mut rng, 2)))
            .collect();
        let tau = 0.5 + rng.random::<f64>();
        let res = solve_maxmin_affine(&PsdProgram::max_min(tau, forms.clone()).unwrap(), &cfg).unwrap();
        let grid = grid_max_2x2(tau, |a, b, c| {
            let w = real_2x2(a, b, c);
            forms.iter().map(|f| f.eval(&w)).fold(f64::INFINITY, f64::min)
        });
        worst_mm = worst_mm.max((res.objective - grid).abs() / grid.abs().max(1.0));
    }

    // concave square-root objective: analytic optimum for scalar B_k and rank-one S
    let mut worst_sqrt: f64 = 0.0;
    for _ in 0..6 {
        let n = 4;
        let v = random_vector(&mut rng, n);
        let coeffs: Vec<(f64, f64)> = (0..3).map(|_| (rng.random::<f64>() + 0.1, rng.random::<f64>() + 0.1)).collect();
        let tau = 0.5 + 2.0 * rng.random::<f64>();
        let terms = coeffs.iter().map(|&(a, b)| SqrtTerm { a, b: identity(n) * cplx(b) }).collect();
        let res = solve_concave_sqrt(&PsdProgram::concave_sqrt(tau, outer(&v), terms).unwrap(), &cfg).unwrap();
        let sa: f64 = coeffs.iter().map(|c| c.0).sum();
        let sb: f64 = coeffs.iter().map(|c| c.1).sum();
        let t = tau.min((sa * v.norm() / sb).powi(2));
        let exact = 2.0 * sa * v.norm() * t.sqrt() - sb * t;
        worst_sqrt = worst_sqrt.max((res.objective - exact).abs() / exact.abs().max(1.0));
    }
    // and against the grid with general denominators
    for _ in 0..4 {
        let v = CVector::from_fn(2, |_, _| cplx(rng.random::<f64>() - 0.5));
        let s = outer(&v) * cplx(4.0);
        let terms: Vec<SqrtTerm> = (0..2)
            .map(|_| SqrtTerm { a: rng.random::<f64>() + 0.2, b: random_real_pd(&mut rng, 2) })
            .collect();
        let res = solve_concave_sqrt(&PsdProgram::concave_sqrt(1.0, s.clone(), terms.clone()).unwrap(), &cfg).unwrap();
        let grid = grid_max_2x2(1.0, |a, b, c| {
            let w = real_2x2(a, b, c);
            let ts = (w.component_mul(&s.transpose()).sum().re).max(0.0);
            terms.iter().map(|t| 2.0 * t.a * ts.sqrt() - w.component_mul(&t.b.transpose()).sum().re).sum()
        });
        worst_sqrt = worst_sqrt.max((res.objective - grid).abs() / grid.abs().max(1.0));
    }

    // single-form programs against the closed form
    let mut worst_single: f64 = 0.0;
    for _ in 0..10 {
        let n = 2 + rng.random_range(0..5);
        let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let coeff = (&a + a.adjoint()) * cplx(0.5);
        let c0 = rng.random::<f64>();
        let tau = 0.5 + rng.random::<f64>();
        let res = solve_maxmin_affine(&PsdProgram::max_min(tau, vec![AffineForm::new(c0, coeff.clone())]).unwrap(), &cfg)
            .unwrap();
        let (_, closed) = maximize_affine_trace(&coeff, tau);
        let exact = c0 + closed;
        worst_single = worst_single.max((res.objective - exact).abs() / exact.abs().max(1.0));
    }

    let secs = start.elapsed().as_secs_f64();
    let pass = worst_mm <= 1e-3 && worst_sqrt <= 1e-3 && worst_single <= 1e-5 && secs < 60.0;
    report(
        2,
        pass,
        &[
            format!("max-min vs grid: worst gap {worst_mm:.2e}"),
            format!("concave sqrt vs analytic/grid: worst gap {worst_sqrt:.2e}"),
            format!("single form vs closed form: worst gap {worst_single:.2e}"),
            format!("runtime {secs:.2} s"),
        ],
    );
    assert!(pass);
}

/// Unit vector from hyperspherical angles.
fn sphere_point(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    let mut x = vec![1.0; n];
    for (i, &a) in angles.iter().enumerate() {
        for xj in x.iter_mut().skip(i + 1) {
            *xj *= a.sin();
        }
        x[i] *= a.cos();
    }
    x
}

/// Maximum of `f` over the unit sphere in `R^n` (`n ≤ 4`) by a refined angle grid.
fn sphere_grid_max(n: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let d = n - 1;
    let steps: usize = [2000, 400, 60][d - 1];
    let pi = std::f64::consts::PI;
    let mut lo = vec![0.0; d];
    let mut hi = vec![pi; d];
    let mut best = (f64::NEG_INFINITY, vec![0.0; d]);
    for _ in 0..12 {
        let total = (steps + 1).pow(d as u32);
        for idx in 0..total {
            let mut r = idx;
            let angles: Vec<f64> = (0..d)
                .map(|j| {
                    let t = (r % (steps + 1)) as f64 / steps as f64;
                    r /= steps + 1;
                    lo[j] + t * (hi[j] - lo[j])
                })
                .collect();
            let v = f(&sphere_point(&angles));
            if v > best.0 {
                best = (v, angles);
            }
        }
        for j in 0..d {
            let span = (hi[j] - lo[j]) / 4.0;
            lo[j] = best.1[j] - span;
            hi[j] = best.1[j] + span;
        }
    }
    best.0
}

#[test]
fn criterion_03_dinkelbach() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut monotone = 0;
    let runs = 12;
    for r in 0..runs {
        let n = 2 + r % 3;
        let a = random_real_pd(&mut rng, n) - identity(n) * cplx(0.2);
        let b = random_real_pd(&mut rng, n);
        let kappa = rng.random::<f64>();
        let family = RatioFamily::new(vec![Ratio {
            numerator: AffineForm::linear(a.clone()),
            denominator: AffineForm::linear(b.clone()),
            offset: kappa,
        }])
        .unwrap();
        let res = dinkelbach_maxmin(&family, 1.0, &FractionalConfig::default()).unwrap();
        let grid = sphere_grid_max(n, |x| {
            let v = CVector::from_fn(n, |i, _| cplx(x[i]));
            quotient(&a, &b, &v) + kappa
        });
        worst = worst.max((res.value - grid).abs() / grid.abs().max(1.0));
        if res.trace.windows(2).all(|w| w[1] >= w[0]) {
            monotone += 1;
        }
    }
    let pass = worst <= 1e-3 && monotone == runs;
    report(
        3,
        pass,
        &[
            format!("worst gap to grid maximum {worst:.2e}"),
            format!("monotone lambda traces {monotone}/{runs}"),
        ],
    );
    assert!(pass);
}

#[test]
fn criterion_04_equivalence_at_k0() {
    let m = default_model();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let gr = 15.0 + 15.0 * rng.random::<f64>();
        let gc = 15.0 + 15.0 * rng.random::<f64>();
        let p = problem_db(&m, gr, gc, 16, 0);
        let init = initial_point(&p, seed).unwrap();
        let cfg = DesignConfig::default().with_seed(seed);
        let v = [
            mm_design(&p, &init, &cfg).unwrap().output_sinr(),
            ws_design(&p, &init, &cfg).unwrap().output_sinr(),
            sync_design(&p, &init, &cfg).unwrap().output_sinr(),
        ];
        let mut gap: f64 = 0.0;
        for i in 0..3 {
            for j in 0..i {
                gap = gap.max((v[i] - v[j]).abs() / v[i].max(v[j]));
            }
        }
        worst = worst.max(gap);
        lines.push(format!(
            "seed {seed}: MM {:.4} dB, WS {:.4} dB, SYNC {:.4} dB, gap {gap:.2e}",
            to_db(v[0]),
            to_db(v[1]),
            to_db(v[2])
        ));
    }
    let pass = worst <= 1e-2;
    lines.push(format!("worst pairwise relative gap {worst:.2e}"));
    report(4, pass, &lines);
    assert!(pass);
}

#[test]
fn criterion_05_convergence() {
    let m = default_model();
    let p = problem_db(&m, 25.0, 25.0, 16, 3);
    let mut lines = Vec::new();
    let mut pass = true;
    type Design = fn(&Problem, &DesignPoint, &DesignConfig) -> hybrid_radar::error::Result<DesignReport>;
    for (label, run) in [("MM", mm_design as Design), ("WS", ws_design as Design)] {
        let mut converged = 0;
        let (mut steps, mut ok_steps) = (0, 0);
        for seed in 0..10u64 {
            let cfg = DesignConfig { max_outer_iters: 15, ..DesignConfig::default().with_seed(seed) };
            let rep: DesignReport = run(&p, &initial_point(&p, seed).unwrap(), &cfg).unwrap();
            if rep.converged && rep.iterations <= 15 {
                converged += 1;
            }
            for w in rep.trace.windows(2) {
                steps += 1;
                if w[1] >= w[0] - 1e-3 {
                    ok_steps += 1;
                }
            }
            let last = rep.trace.len() - 1;
            lines.push(format!(
                "{label} seed {seed}: converged {} after {} iterations, final {:.4} dB, last gain {:.3e}",
                rep.converged,
                rep.iterations,
                to_db(rep.trace[last]),
                rep.trace[last] - rep.trace[last.saturating_sub(1)]
            ));
        }
        let frac = ok_steps as f64 / steps as f64;
        lines.push(format!("{label}: {converged}/10 converged within 15 iterations, non-decreasing steps {:.1}%", 100.0 * frac));
        pass &= converged >= 9 && frac >= 0.95;
    }
    report(5, pass, &lines);
    assert!(pass);
}

#[test]
fn criterion_06_k_sweep() {
    let m = default_model();
    let mut lines = Vec::new();
    let mut medians = [Vec::new(), Vec::new()];
    for k in 0..=4 {
        let p = problem_db(&m, 25.0, 25.0, 16, k);
        let mut vals = [Vec::new(), Vec::new()];
        for seed in 0..5u64 {
            let cfg = DesignConfig::default().with_seed(seed);
            let init = initial_point(&p, seed).unwrap();
            vals[0].push(to_db(mm_design(&p, &init, &cfg).unwrap().output_sinr()));
            vals[1].push(to_db(ws_design(&p, &init, &cfg).unwrap().output_sinr()));
        }
        for i in 0..2 {
            medians[i].push(median(vals[i].clone()));
        }
        lines.push(format!("K = {k}: median MM {:.4} dB, median WS {:.4} dB", medians[0][k], medians[1][k]));
    }
    let non_increasing = medians.iter().all(|m| m.windows(2).all(|w| w[1] <= w[0]));
    let ws_ok = medians[0].iter().zip(&medians[1]).all(|(mm, ws)| *ws >= mm - 0.2);
    lines.push(format!("medians non-increasing in K: {non_increasing}; WS >= MM - 0.2 dB at every K: {ws_ok}"));
    let pass = non_increasing && ws_ok;
    report(6, pass, &lines);
    assert!(pass);
}

#[test]
fn criterion_07_mm_robustness() {
    let m = default_model();
    let delays: Vec<i64> = (-3..=3).collect();
    let eval = SinrModel::at_delays(&Scenario::new(from_db(25.0), from_db(25.0), 16, 0), &m, &delays).unwrap();
    let cfg = DesignConfig::default();
    let mut profiles = Vec::new();
    for k in [3, 0] {
        let p = problem_db(&m, 25.0, 25.0, 16, k);
        let rep = mm_design(&p, &initial_point(&p, 42).unwrap(), &cfg).unwrap();
        profiles.push(eval.profile(&rep.point).iter().map(|v| to_db(*v)).collect::<Vec<_>>());
    }
    let spread = profiles[0].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - profiles[0].iter().cloned().fold(f64::INFINITY, f64::min);
    let k0 = &profiles[1];
    let drop = k0[3] - k0[0].max(k0[6]);
    let pass = spread <= 1.5 && drop >= 3.0;
    report(
        7,
        pass,
        &[
            format!("K = 3 design over k in [-3, 3]: {:.3?} dB, spread {spread:.3} dB (<= 1.5)", profiles[0]),
            format!("K = 0 design over k in [-3, 3]: {:.3?} dB, drop at |k| = 3 {drop:.3} dB (>= 3)", k0),
        ],
    );
    assert!(pass);
}

#[test]
fn criterion_08_hybrid_advantage() {
    let m = default_model();
    let p = problem_db(&m, 25.0, 25.0, 16, 0);
    let mut txrx = Vec::new();
    let mut rx = Vec::new();
    for seed in 0..10u64 {
        let cfg = DesignConfig::default().with_seed(seed);
        let init = initial_point(&p, seed).unwrap();
        txrx.push(to_db(mm_design(&p, &init, &cfg).unwrap().output_sinr()));
        rx.push(to_db(hybrid_rx_design(&p, &init, &cfg, Method::MaxMin).unwrap().output_sinr()));
    }
    let (t, r) = (median(txrx), median(rx));
    let a = to_db(baseline_sinr(Baseline::ActiveOnly, &p));
    let pa = to_db(baseline_sinr(Baseline::PassiveOnly, &p));
    let pass = t >= r && r >= a.max(pa);
    report(
        8,
        pass,
        &[format!(
            "median hybrid-TxRx {t:.4} dB, median hybrid-Rx {r:.4} dB, active-only {a:.4} dB, passive-only {pa:.4} dB"
        )],
    );
    assert!(pass);
}

/// SNR at which `curve` reaches `pm`, interpolating `log10 Pm` linearly.
fn snr_at(curve: &DetectionCurve, pm: f64) -> Option<f64> {
    let target = pm.log10();
    curve.snr_db.windows(2).zip(curve.pm.windows(2)).find_map(|(x, y)| {
        if y[0] > 0.0 && y[1] > 0.0 && y[0] >= pm && pm >= y[1] {
            let (l0, l1) = (y[0].log10(), y[1].log10());
            let t = if l0 == l1 { 0.0 } else { (l0 - target) / (l0 - l1) };
            Some(x[0] + t * (x[1] - x[0]))
        } else {
            None
        }
    })
}

#[test]
fn criterion_09_detection() {
    let start = Instant::now();
    let m = default_model();
    let seed = 42;
    let mut designs = Vec::new();
    for k in [0, 4] {
        let p = problem_db(&m, 25.0, 25.0, 16, k);
        let rep = ws_design(&p, &initial_point(&p, seed).unwrap(), &DesignConfig::default()).unwrap();
        designs.push(rep.point);
    }
    let cfg = DetectionConfig::default();
    assert!(cfg.trials_h0 >= 1_000_000 && cfg.trials_h1 >= 100_000 && cfg.p_f == 1e-4);
    let active = detection_curve(&Detector::active_only(&random_binary_waveform(16, 1.0, seed)), &cfg).unwrap();
    let ws0 = detection_curve(&Detector::hybrid("WS K=0", &designs[0], &m, 0).unwrap(), &cfg).unwrap();
    let ws4 = detection_curve(&Detector::hybrid("WS K=4", &designs[1], &m, 0).unwrap(), &cfg).unwrap();

    let mut lines = vec![format!("thresholds: active {:.4}, WS K=0 {:.4}, WS K=4 {:.4}", active.threshold, ws0.threshold, ws4.threshold)];
    for i in 0..cfg.snr_grid_db.len() {
        lines.push(format!(
            "{:5.1} dB: active {:.3e}, WS K=0 {:.3e}, WS K=4 {:.3e}",
            cfg.snr_grid_db[i], active.pm[i], ws0.pm[i], ws4.pm[i]
        ));
    }
    let below = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= 15.0)
        .all(|(i, _)| ws0.pm[i] < active.pm[i]);
    let idx = |s: f64| cfg.snr_grid_db.iter().position(|&x| (x - s).abs() < 1e-9).unwrap();
    let slope = |c: &DetectionCurve| (c.pm[idx(25.0)].log10() - c.pm[idx(15.0)].log10()) / 10.0;
    let (s_h, s_a) = (slope(&ws0), slope(&active));
    let mut shift: f64 = 0.0;
    for (x, &pm) in ws4.snr_db.iter().zip(&ws4.pm) {
        if pm > 1e-3 && pm < 0.9 {
            if let Some(x0) = snr_at(&ws0, pm) {
                shift = shift.max((x - x0).abs());
            }
        }
    }
    lines.push(format!("hybrid below active-only at all SNR >= 15 dB: {below}"));
    lines.push(format!("log10 Pm slope 15..25 dB: hybrid {s_h:.4}/dB, active-only {s_a:.4}/dB"));
    lines.push(format!("largest horizontal shift WS K=4 vs K=0: {shift:.3} dB"));
    lines.push(format!("runtime {:.1} s", start.elapsed().as_secs_f64()));
    let pass = below && s_h < s_a && shift <= 1.0;
    report(9, pass, &lines);
    assert!(pass);
}

/// Root of `(1 + z) e^{-z} = p` by bisection.
fn gamma2_tail_root(p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 100.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (1.0 + mid) * (-mid).exp() > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_10_calibration() {
    let n = 16;
    let mut e0 = CVector::zeros(n);
    e0[0] = cplx(1.0);
    let mut e1 = CVector::zeros(n);
    e1[5] = Complex64::new(0.0, 1.0);
    let det = Detector { label: "orthonormal".into(), filters: vec![e0, e1], s_r: None, comm_window: None };
    let (p_f, trials) = (1e-4, 1_000_000);
    let mut lines = Vec::new();
    let mut pass = true;
    for sigma2 in [1.0, 2.0] {
        let z = calibrate_threshold(&det, sigma2, p_f, trials, 7).unwrap();
        let root = sigma2 * gamma2_tail_root(p_f);
        // quantile standard error: sqrt(p(1-p)/n) over the density at the root
        let density = (root / sigma2) * (-root / sigma2).exp() / sigma2;
        let tol = 3.0 * (p_f * (1.0 - p_f) / trials as f64).sqrt() / density;
        let ok = (z - root).abs() <= tol;
        pass &= ok;
        lines.push(format!("sigma2 = {sigma2}: Monte Carlo {z:.4}, analytic {root:.4}, tolerance {tol:.4}"));
    }
    report(10, pass, &lines);
    assert!(pass);
}
