//! Runs an experiment through the library entry point used by the binary.
//!
//! cargo run --release --example cli_experiment -- examples/configs/convergence.toml /tmp/out

use std::path::PathBuf;

use hybrid_radar::cli::{read_convergence_trace, run_experiment, Config, ExperimentKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(p) => Config::load(p.as_ref())?,
        None => {
            let mut c = Config::default();
            c.scenario.k = 1;
            c.algorithm.max_iters = 5;
            c
        }
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hybrid-radar-example"));
    let run = run_experiment(ExperimentKind::Convergence, &cfg, None, &out)?;
    for d in &run.designs {
        let trace = read_convergence_trace(&out.join(format!("convergence_{}.csv", d.mode.label().to_lowercase())))?;
        println!("{}: {} rows, last {:.3} dB", d.mode.label(), trace.len(), trace.last().map_or(f64::NAN, |r| r.2));
    }
    println!("tables in {}", out.display());
    Ok(())
}
