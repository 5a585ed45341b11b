//! Dilate one straight cruise leg into a nine-segment mission and print its schedule.
//!
//! `cargo run --example dilate_mission -- [flight_id]`

use uamsim::airspace::{Trajectory2D, TrajectoryPoint};
use uamsim::dilation::{dilate, realize_spec};
use uamsim::Config;

fn main() -> Result<(), uamsim::Error> {
    let flight_id: u32 = std::env::args().nth(1).map_or(0, |s| s.parse().expect("flight id"));
    let cfg = Config::default();
    let v = cfg.sim.max_speed;
    let traj = Trajectory2D {
        flight_id,
        points: (0..=300).map(|i| TrajectoryPoint::new(v * i as f64, 0.0, v, 0.0, i as f64)).collect(),
    };

    let spec = realize_spec(&cfg.mission_spec(), &cfg.dilation_bounds(), flight_id);
    let profile = dilate(&traj, &cfg.mission_spec(), &cfg.dilation_bounds())?;
    println!(
        "{:<28} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "segment", "start s", "dur s", "z end m", "v0 m/s", "v1 m/s"
    );
    for (s, drawn) in profile.segments.iter().zip(&spec) {
        println!(
            "{:<28} {:>9.1} {:>9.1} {:>9.1} {:>9.2} {:>9.2}",
            s.kind,
            s.start_time,
            s.duration,
            drawn.end_altitude,
            s.start_speed(),
            s.end_speed()
        );
    }
    println!("total {:.1} s, cruise {:.1} km", profile.duration(), profile.cruise().ground_distance() / 1000.0);
    Ok(())
}
