//! Worst-case design over the delay interval [-K, K] at the default scenario.
//!
//! cargo run --release --example max_min_design [K]

use hybrid_radar::design::{initial_point, mm_design, DesignConfig, Problem};
use hybrid_radar::linalg::{from_db, to_db};
use hybrid_radar::signal_model::{build_waveform_matrix, raised_cosine_taps, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k: usize = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(3);
    let model = build_waveform_matrix(&raised_cosine_taps(0.22, 8, 2)?, 10)?.with_unit_energy_window(16)?;
    let problem = Problem::new(&Scenario::new(from_db(25.0), from_db(25.0), 16, k), &model)?;
    let cfg = DesignConfig { max_outer_iters: 15, ..DesignConfig::default() };
    let report = mm_design(&problem, &initial_point(&problem, 42)?, &cfg)?;

    for (i, v) in report.trace.iter().enumerate() {
        println!("iter {i:2}: {:.3} dB", to_db(*v));
    }
    println!("converged: {}", report.converged);
    for (k, v) in report.delays.iter().zip(&report.profile) {
        println!("k = {k:+}: {:.3} dB", to_db(*v));
    }
    Ok(())
}
