//! Evaluate the mission profiles of an existing run directory and write
//! the figure data CSVs next to them.
//!
//! `cargo run --release --example evaluate_fleet -- <run_dir> [jobs]`
//!
//! The run directory must already hold `simulate` and `dilate` outputs
//! (see the `uamsim` binary).

use std::path::PathBuf;

use uamsim::dilation::read_profiles;
use uamsim::evaluator::{evaluate_missions, FleetReport};
use uamsim::run::{load_run, write_figures, MISSIONS, STAGE_DILATE};

fn main() -> Result<(), uamsim::Error> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().expect("usage: evaluate_fleet <run_dir> [jobs]"));
    let jobs = args.next().map_or(0, |j| j.parse().expect("job count"));

    let (_, cfg) = load_run(&dir, &[(STAGE_DILATE, "dilate")])?;
    let profiles = read_profiles(&dir.join(MISSIONS))?;
    let results = evaluate_missions(&profiles, &cfg.vehicle, &cfg.evaluator, jobs);
    let report = FleetReport::from_results(&results);
    print!("{}", report.feasibility_table());

    for r in results.iter().filter(|r| !r.feasible).take(5) {
        println!(
            "flight {:>4}: {} in {}",
            r.flight_id,
            r.failure_reason.map_or("-".into(), |f| f.to_string()),
            r.first_failed_segment.map_or("-".into(), |k| k.to_string())
        );
    }
    let figures = dir.join("example-figures");
    write_figures(&figures, &report)?;
    println!("figure data in {}", figures.display());
    Ok(())
}
