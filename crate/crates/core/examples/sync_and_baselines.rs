//! The four receiver configurations at K = 0 and a few channel SNRs.

use hybrid_radar::design::{
    baseline_sinr, hybrid_rx_design, initial_point, sync_design, Baseline, DesignConfig, Method, Problem,
};
use hybrid_radar::linalg::{from_db, to_db};
use hybrid_radar::signal_model::{build_waveform_matrix, raised_cosine_taps, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_waveform_matrix(&raised_cosine_taps(0.22, 8, 2)?, 10)?.with_unit_energy_window(16)?;
    let cfg = DesignConfig::default();
    println!("gamma_r gamma_c   TxRx     Rx  active passive");
    for (gr, gc) in [(25.0, 25.0), (15.0, 30.0), (30.0, 15.0)] {
        let problem = Problem::new(&Scenario::new(from_db(gr), from_db(gc), 16, 0), &model)?;
        let init = initial_point(&problem, 42)?;
        let txrx = sync_design(&problem, &init, &cfg)?;
        let rx = hybrid_rx_design(&problem, &init, &cfg, Method::Sync)?;
        println!(
            "{gr:7.1} {gc:7.1} {:6.2} {:6.2} {:7.2} {:7.2}",
            to_db(txrx.objective),
            to_db(rx.objective),
            to_db(baseline_sinr(Baseline::ActiveOnly, &problem)),
            to_db(baseline_sinr(Baseline::PassiveOnly, &problem)),
        );
    }
    Ok(())
}
