//! Closest point of approach and a single MVP resolution for a head-on pair.
//!
//! `cargo run --example cpa_and_mvp`

use uamsim::airspace::{cpa, detect_conflicts, mvp_resolve, preferred_velocity, Agent, Phase, TrajectoryPoint};
use uamsim::config::SimConfig;

fn airborne(id: u32, from: [f64; 2], to: [f64; 2], speed: f64) -> Agent {
    let mut a = Agent::pending(id, from, to, 0.0, speed);
    let d = (to[0] - from[0]).hypot(to[1] - from[1]);
    a.phase = Phase::Airborne;
    a.state = TrajectoryPoint::new(from[0], from[1], (to[0] - from[0]) / d * speed, (to[1] - from[1]) / d * speed, 0.0);
    a
}

fn main() {
    let cfg = SimConfig::default();
    let v = cfg.max_speed;
    // Slightly offset so the resolution has a preferred side.
    let own = airborne(0, [20_000.0, 25_000.0], [30_000.0, 25_000.0], v);
    let intruder = airborne(1, [24_000.0, 25_100.0], [14_000.0, 25_100.0], v);

    let c = cpa(&own.state, &intruder.state);
    println!("cpa: t = {:.1} s, d = {:.1} m", c.t_cpa, c.d_cpa);
    for p in detect_conflicts(&own, &[&intruder], &cfg) {
        println!("conflict with {} in {:.1} s at {:.1} m", p.intruder_id, p.t_cpa, p.d_cpa);
    }
    let pref = preferred_velocity(&own, &cfg);
    let res = mvp_resolve(&own, &[&intruder], &cfg);
    println!("preferred velocity  ({:8.3}, {:8.3}) m/s", pref[0], pref[1]);
    println!("resolution velocity ({:8.3}, {:8.3}) m/s", res[0], res[1]);

    let mut after = own.state;
    (after.vx, after.vy) = (res[0], res[1]);
    let mut intr = intruder.state;
    let r = mvp_resolve(&intruder, &[&own], &cfg);
    (intr.vx, intr.vy) = (r[0], r[1]);
    println!("cpa after both resolve: {:.1} m", cpa(&after, &intr).d_cpa);
}
