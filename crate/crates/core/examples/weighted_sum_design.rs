//! Weighted-sum design, with the block steps driven by hand for the first
//! iteration and then the full loop.

use hybrid_radar::design::{
    initial_point, ws_design, ws_filter_c_step, ws_filter_r_step, ws_waveform_step, DesignConfig, DesignState, Problem,
};
use hybrid_radar::linalg::{from_db, to_db};
use hybrid_radar::signal_model::{build_waveform_matrix, raised_cosine_taps, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_waveform_matrix(&raised_cosine_taps(0.22, 8, 2)?, 10)?.with_unit_energy_window(16)?;
    let problem = Problem::new(&Scenario::new(from_db(25.0), from_db(25.0), 16, 2), &model)?;
    let cfg = DesignConfig::default();
    let init = initial_point(&problem, 3)?;

    let mut st = DesignState::new(init.clone());
    println!("start           {:.3} dB", to_db(problem.sinr.weighted_mean(&st.point)));
    st = ws_filter_r_step(&st, &problem, &cfg, 1)?;
    println!("after w_r block {:.3} dB", to_db(problem.sinr.weighted_mean(&st.point)));
    st = ws_filter_c_step(&st, &problem)?;
    println!("after w_c block {:.3} dB", to_db(problem.sinr.weighted_mean(&st.point)));
    st = ws_waveform_step(&st, &problem, &cfg, 1)?;
    println!("after s_r block {:.3} dB", to_db(problem.sinr.weighted_mean(&st.point)));

    let report = ws_design(&problem, &init, &cfg)?;
    println!(
        "full loop: {} iterations, mean {:.3} dB, worst case {:.3} dB",
        report.iterations,
        to_db(report.weighted_mean()),
        to_db(report.worst_case())
    );
    Ok(())
}
