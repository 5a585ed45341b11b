//! Run the airspace simulation and write the trajectory CSVs and scenario manifest.
//!
//! `cargo run --release --example simulate_airspace -- [flights] [out_dir]`

use std::path::PathBuf;

use uamsim::airspace::io::{write_scenario, ScenarioManifest};
use uamsim::airspace::{DemandModel, Phase, World};
use uamsim::Config;

fn main() -> Result<(), uamsim::Error> {
    let mut args = std::env::args().skip(1);
    let mut cfg = Config::default();
    cfg.sim.n_flights = args.next().map_or(40, |n| n.parse().expect("flight count"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "uamsim-scenario".into()));

    let demand = DemandModel::from_config(&cfg.sim);
    let agents = demand.generate(cfg.sim.n_flights, cfg.sim.max_speed);
    let mut world = World::new(agents.clone());
    let mut peak = 0;
    while !world.is_finished() {
        world.step(&cfg.sim);
        peak = peak.max(world.count(Phase::Airborne));
    }
    let trajs = world.into_trajectories();

    let manifest = ScenarioManifest::new(cfg.sim.rng_seed, cfg.hash(), &agents, &trajs);
    let files = write_scenario(&out, &manifest, &trajs)?;
    let longest = trajs.iter().map(|t| t.ground_track_length()).fold(0.0, f64::max);
    let delayed = manifest.flights.iter().filter(|f| f.departure_time - f.requested_departure >= 1.0).count();
    println!("{} flights, peak {peak} airborne, {delayed} held at departure", trajs.len());
    println!("longest ground track {:.1} km", longest / 1000.0);
    println!("wrote {} files under {}", files.len(), out.display());
    Ok(())
}
