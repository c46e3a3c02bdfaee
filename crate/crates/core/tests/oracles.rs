mod common;

use common::{default_model, model, pencil_max, problem_db, quotient};
use hybrid_radar::design::{
    baseline_sinr, hybrid_rx_design, initial_point, sync_design, sync_filter_r, ws_filter_c_step, Baseline,
    DesignConfig, DesignState, Method, Problem,
};
use hybrid_radar::detection::{binomial_half_width, calibrate_threshold, false_alarm_rate, missing_probability, Detector};
use hybrid_radar::linalg::{cplx, identity, leading_eigenpair, normalized, outer, CMatrix, CVector};
use hybrid_radar::sdp::{maximize_affine_trace, solve_maxmin_affine, AffineForm, PsdProgram, SolverConfig};
use hybrid_radar::signal_model::{build_waveform_matrix, comm_covariance, raised_cosine, PulseShape, Scenario};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

#[test]
fn raised_cosine_peak_and_zero_crossings() {
    assert_eq!(raised_cosine(0.0, 8.0, 0.22), 1.0);
    for m in 1..4 {
        assert!(raised_cosine(8.0 * m as f64, 8.0, 0.22).abs() < 1e-12);
    }
    // the singular point matches its neighbours
    let t = 8.0 / (2.0 * 0.25);
    let v = raised_cosine(t, 8.0, 0.25);
    assert!((v - raised_cosine(t + 1e-6, 8.0, 0.25)).abs() < 1e-5);
    assert!(v.is_finite());
}

#[test]
fn covariances_are_hermitian_psd() {
    let m = default_model();
    for k in -6..=6 {
        let c = comm_covariance(&m, k, 16).unwrap();
        assert!((&c - c.adjoint()).norm() < 1e-14);
        let min = c.clone().symmetric_eigenvalues().min();
        assert!(min > -1e-12, "k = {k}: {min}");
    }
}

#[test]
fn out_of_range_shift_rejected() {
    let m = default_model();
    let limit = (m.num_samples() - 16) as i64 / 2;
    assert!(comm_covariance(&m, limit, 16).is_ok());
    assert!(comm_covariance(&m, limit + 1, 16).is_err());
    assert!(comm_covariance(&m, -limit - 1, 16).is_err());
}

#[test]
fn single_linear_form_gives_top_eigenvalue() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_vector(&mut rng, 5);
    let b = random_vector(&mut rng, 5);
    let coeff = outer(&a) - outer(&b) * cplx(0.3);
    let res = solve_maxmin_affine(&PsdProgram::max_min(1.0, vec![AffineForm::linear(coeff.clone())]).unwrap(), &SolverConfig::default())
        .unwrap();
    let (lmax, _) = leading_eigenpair(&coeff);
    assert!((res.objective - lmax).abs() <= 1e-5 * lmax);
    let (w, v) = maximize_affine_trace(&coeff, 1.0);
    assert!((v - lmax).abs() < 1e-12);
    let rank_one_gap = (&w - outer(&normalized(&(&w * &a)))).norm();
    assert!(rank_one_gap < 1e-8);
}

#[test]
fn passive_baseline_matches_random_search() {
    let m = model(0.22, 4, 2, 4, 8);
    let p = problem_db(&m, 25.0, 25.0, 8, 0);
    let sigma = p.nominal_covariance().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // random search with shrinking perturbations, 1e5 draws in total
    let mut best_v = normalized(&random_vector(&mut rng, 8));
    let mut best = quotient(&sigma, &identity(8), &best_v);
    for i in 0..100_000 {
        let step = 0.5 * (1.0 - i as f64 / 100_000.0).powi(3) + 1e-4;
        let cand = normalized(&(&best_v + random_vector(&mut rng, 8) * cplx(step)));
        let q = quotient(&sigma, &identity(8), &cand);
        if q > best {
            best = q;
            best_v = cand;
        }
    }
    let baseline = baseline_sinr(Baseline::PassiveOnly, &p);
    let searched = p.gamma_c() * best;
    assert!(searched <= baseline * (1.0 + 1e-12));
    assert!((baseline - searched) / baseline < 1e-3, "{baseline} vs {searched}");
}

#[test]
fn active_baseline_is_gamma_times_power() {
    let p = problem_db(&default_model(), 25.0, 10.0, 16, 0);
    let v = baseline_sinr(Baseline::ActiveOnly, &p);
    assert!((v - 10f64.powf(2.5)).abs() < 1e-9);
}

#[test]
fn comm_filter_beats_perturbations() {
    let m = model(0.3, 4, 2, 4, 8);
    let p = problem_db(&m, 20.0, 25.0, 8, 1);
    let dp = initial_point(&p, 9).unwrap();
    let st = ws_filter_c_step(&DesignState::new(dp.clone()), &p).unwrap();
    let mut a = CMatrix::zeros(8, 8);
    for (c, u) in p.sinr.covariances.iter().zip(&p.sinr.weights) {
        a += c * cplx(u * p.gamma_c());
    }
    let b = outer(&dp.s_r) * cplx(p.gamma_r()) + identity(8);
    let best = quotient(&a, &b, &st.point.w_c);
    assert!((best - pencil_max(&a, &b)).abs() <= 1e-8 * best);
    assert!((quotient(&a, &b, &(&st.point.w_c * cplx(2.0))) - best).abs() <= 1e-12 * best);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let w = &st.point.w_c + random_vector(&mut rng, 8) * cplx(0.05);
        assert!(quotient(&a, &b, &w) < best);
    }
}

#[test]
fn radar_filter_with_diagonal_covariance() {
    // a one-sample pulse gives Σ_0 = c² I
    let shape = PulseShape { rolloff: 0.0, samples_per_symbol: 1, span_symbols: 1, taps: vec![0.7] };
    let m = build_waveform_matrix(&shape, 10).unwrap();
    let p = Problem::new(&Scenario::new(50.0, 30.0, 8, 0), &m).unwrap();
    let s = CVector::from_fn(8, |i, _| Complex64::new(i as f64 + 1.0, 0.5));
    let w = sync_filter_r(&s, &p).unwrap();
    let d = 30.0 * 0.49 + 1.0;
    let expect = normalized(&s.map(|z| z / d));
    assert!((w - expect).norm() < 1e-12);
}

#[test]
fn receive_only_never_beats_joint_design() {
    let p = problem_db(&default_model(), 25.0, 25.0, 16, 0);
    for seed in 0..20 {
        let cfg = DesignConfig::default().with_seed(seed);
        let init = initial_point(&p, seed).unwrap();
        let rx = hybrid_rx_design(&p, &init, &cfg, Method::Sync).unwrap();
        let txrx = sync_design(&p, &init, &cfg).unwrap();
        assert!(rx.objective <= txrx.objective + 1e-3 * txrx.objective, "seed {seed}");
    }
}

#[test]
fn receive_only_modes_agree_at_k0() {
    let p = problem_db(&default_model(), 25.0, 25.0, 16, 0);
    let cfg = DesignConfig::default();
    let init = initial_point(&p, 1).unwrap();
    let mm = hybrid_rx_design(&p, &init, &cfg, Method::MaxMin).unwrap();
    let ws = hybrid_rx_design(&p, &init, &cfg, Method::WeightedSum).unwrap();
    assert!((mm.objective - ws.objective).abs() <= 1e-2 * mm.objective);
}

fn orthonormal_detector(scale: f64) -> Detector {
    let mut a = CVector::zeros(8);
    a[1] = cplx(scale);
    let mut b = CVector::zeros(8);
    b[6] = cplx(scale);
    Detector { label: "pair".into(), filters: vec![a, b], s_r: None, comm_window: None }
}

#[test]
fn threshold_scales_with_filter_energy() {
    let z1 = calibrate_threshold(&orthonormal_detector(1.0), 1.0, 1e-2, 20_000, 3).unwrap();
    let z3 = calibrate_threshold(&orthonormal_detector(3.0), 1.0, 1e-2, 20_000, 3).unwrap();
    assert!((z3 - 9.0 * z1).abs() < 1e-9 * z3);
    assert!(calibrate_threshold(&orthonormal_detector(1.0), 1.0, 1e-4, 50_000, 3).is_err());
}

#[test]
fn false_alarm_rate_on_fresh_seed() {
    let det = orthonormal_detector(1.0);
    let (p_f, n) = (1e-3, 200_000);
    let z = calibrate_threshold(&det, 1.0, p_f, n, 11).unwrap();
    let rate = false_alarm_rate(&det, 1.0, z, n, 12);
    let se = (p_f * (1.0 - p_f) / n as f64).sqrt();
    assert!((rate - p_f).abs() <= 3.0 * se, "{rate}");
}

#[test]
fn missing_probability_limits() {
    let m = default_model();
    let p = problem_db(&m, 25.0, 25.0, 16, 0);
    let dp = initial_point(&p, 2).unwrap();
    let det = Detector::hybrid("h", &dp, &m, 0).unwrap();
    assert_eq!(missing_probability(&det, 1.0, 0.0, 10.0, 5_000, 1).unwrap(), 0.0);
    let z = calibrate_threshold(&det, 1.0, 1e-2, 20_000, 1).unwrap();
    let pm = missing_probability(&det, 1.0, z, f64::NEG_INFINITY, 20_000, 2).unwrap();
    assert!((pm - 0.99).abs() < 4.0 * binomial_half_width(0.99, 20_000), "{pm}");
}

#[test]
fn rotation_leaves_threshold_distribution_unchanged() {
    // a unitary rotation of the filters keeps the noise-only statistic's law
    let det = orthonormal_detector(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = CMatrix::from_fn(8, 8, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let q = a.qr().q();
    let rotated = Detector { filters: det.filters.iter().map(|f| &q * f).collect(), ..det.clone() };
    let (p_f, n) = (1e-2, 100_000);
    let z0 = calibrate_threshold(&det, 1.0, p_f, n, 4).unwrap();
    let z1 = calibrate_threshold(&rotated, 1.0, p_f, n, 5).unwrap();
    // quantile error of a shape-2 Gamma at the 0.99 point
    let density = z0 * (-z0).exp();
    let tol = 4.0 * 2f64.sqrt() * (p_f * (1.0 - p_f) / n as f64).sqrt() / density;
    assert!((z0 - z1).abs() < tol, "{z0} vs {z1} (tol {tol})");
}

#[test]
fn half_width_scales_with_trials() {
    let h1 = binomial_half_width(0.2, 10_000);
    let h2 = binomial_half_width(0.2, 20_000);
    assert!((h1 / h2 - 2f64.sqrt()).abs() < 1e-12);
}
