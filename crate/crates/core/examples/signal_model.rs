//! Builds the waveform matrix, the shifted covariances and evaluates the
//! SINR of a simple design across delays.
//!
//! cargo run --example signal_model

use hybrid_radar::design::{initial_point, Problem};
use hybrid_radar::linalg::{from_db, leading_eigenpair, to_db, trace_re};
use hybrid_radar::signal_model::{build_waveform_matrix, comm_covariance, raised_cosine_taps, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shape = raised_cosine_taps(0.22, 8, 2)?;
    let model = build_waveform_matrix(&shape, 10)?.with_unit_energy_window(16)?;
    println!("H is {} x {} ({})", model.h.nrows(), model.h.ncols(), model.normalization.label());

    for k in -3..=3 {
        let sigma = comm_covariance(&model, k, 16)?;
        println!("k = {k:+}: tr = {:.4}, lambda_max = {:.4}", trace_re(&sigma), leading_eigenpair(&sigma).0);
    }

    let sc = Scenario::new(from_db(25.0), from_db(25.0), 16, 3);
    let problem = Problem::new(&sc, &model)?;
    let dp = initial_point(&problem, 1)?;
    for (k, v) in problem.sinr.delays.iter().zip(problem.sinr.profile(&dp)) {
        println!("SINR(k = {k:+}) = {:.2} dB", to_db(v));
    }
    Ok(())
}
