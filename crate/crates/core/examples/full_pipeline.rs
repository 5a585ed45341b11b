//! Simulate, dilate and evaluate a full scenario in memory, then print the
//! feasibility table and the per-segment fleet averages.
//!
//! `cargo run --release --example full_pipeline -- [flights] [seed]`

use std::time::Instant;

use uamsim::airspace::{run_scenario, DemandModel};
use uamsim::dilation::{dilate_all, SegmentKind};
use uamsim::evaluator::{evaluate_missions, FleetReport};
use uamsim::Config;

fn main() -> Result<(), uamsim::Error> {
    let mut args = std::env::args().skip(1);
    let mut cfg = Config::default();
    if let Some(n) = args.next() {
        cfg.sim.n_flights = n.parse().expect("flight count");
    }
    if let Some(s) = args.next() {
        cfg.sim.rng_seed = s.parse().expect("seed");
    }
    cfg.validate()?;

    let t0 = Instant::now();
    let trajs = run_scenario(&DemandModel::from_config(&cfg.sim), &cfg.sim)?;
    let t1 = Instant::now();
    let profiles = dilate_all(&trajs, &cfg.mission_spec(), &cfg.dilation_bounds())?;
    let t2 = Instant::now();
    let results = evaluate_missions(&profiles, &cfg.vehicle, &cfg.evaluator, 0);
    let report = FleetReport::from_results(&results);
    let t3 = Instant::now();

    print!("{}", report.feasibility_table());
    println!("failure reasons: {:?}", report.failures_by_reason);
    println!(
        "timing: simulate {:.2}s, dilate {:.2}s, evaluate {:.2}s",
        (t1 - t0).as_secs_f64(),
        (t2 - t1).as_secs_f64(),
        (t3 - t2).as_secs_f64()
    );
    println!("{:<28} {:>10} {:>10} {:>10}", "segment", "C-rate/h", "lift", "forward");
    for kind in SegmentKind::ALL {
        if let (Some(c), Some(t)) = (
            report.per_segment_mean_c_rate.get(&kind),
            report.per_segment_mean_throttle.get(&kind),
        ) {
            println!("{:<28} {:>10.3} {:>10.3} {:>10.3}", kind, c, t.lift, t.forward);
        }
    }
    Ok(())
}
