//! Probability of missing for the active-only receiver and a hybrid design.
//! Trial counts are reduced; the detect subcommand uses the full budget.

use hybrid_radar::design::{initial_point, sync_design, DesignConfig, Problem};
use hybrid_radar::detection::{detection_curve, orthonormal_pair_threshold, DetectionConfig, Detector};
use hybrid_radar::linalg::from_db;
use hybrid_radar::signal_model::{build_waveform_matrix, raised_cosine_taps, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_waveform_matrix(&raised_cosine_taps(0.22, 8, 2)?, 10)?.with_unit_energy_window(16)?;
    let problem = Problem::new(&Scenario::new(from_db(25.0), from_db(25.0), 16, 0), &model)?;
    let init = initial_point(&problem, 42)?;
    let design = sync_design(&problem, &init, &DesignConfig::default())?;

    let cfg = DetectionConfig {
        p_f: 1e-3,
        trials_h0: 100_000,
        trials_h1: 20_000,
        snr_grid_db: vec![5.0, 10.0, 15.0, 20.0, 25.0],
        ..DetectionConfig::default()
    };
    println!("orthonormal-pair threshold at P_f = 1e-3: {:.4}", orthonormal_pair_threshold(cfg.p_f, 1.0));
    for det in [Detector::active_only(&init.s_r), Detector::hybrid("hybrid", &design.point, &model, 0)?] {
        let c = detection_curve(&det, &cfg)?;
        println!("{} (threshold {:.3})", c.label, c.threshold);
        for i in 0..c.snr_db.len() {
            println!("  {:5.1} dB  Pm = {:.5} +- {:.5}", c.snr_db[i], c.pm[i], c.half_width[i]);
        }
    }
    Ok(())
}
