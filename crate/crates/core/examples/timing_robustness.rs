//! SINR of designs made for K = 0 and K = 3 when the true delay is k.

use hybrid_radar::design::{initial_point, mm_design, DesignConfig, Problem};
use hybrid_radar::linalg::{from_db, to_db};
use hybrid_radar::signal_model::{build_waveform_matrix, raised_cosine_taps, Scenario, SinrModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_waveform_matrix(&raised_cosine_taps(0.22, 8, 2)?, 10)?.with_unit_energy_window(16)?;
    let cfg = DesignConfig { max_outer_iters: 10, ..DesignConfig::default() };
    let delays: Vec<i64> = (-6..=6).collect();
    let eval = SinrModel::at_delays(&Scenario::new(from_db(25.0), from_db(25.0), 16, 0), &model, &delays)?;

    for k in [0, 3] {
        let problem = Problem::new(&Scenario::new(from_db(25.0), from_db(25.0), 16, k), &model)?;
        let report = mm_design(&problem, &initial_point(&problem, 42)?, &cfg)?;
        let row: Vec<String> = eval.profile(&report.point).iter().map(|v| format!("{:5.2}", to_db(*v))).collect();
        println!("K = {k}: {}", row.join(" "));
    }
    Ok(())
}
