use uamsim::airspace::io::{read_scenario, write_scenario, ScenarioManifest};
use uamsim::airspace::{run_scenario, DemandModel, Trajectory2D};
use uamsim::dilation::{dilate_all, read_profiles, write_profiles, MissionProfile, SegmentKind};
use uamsim::Config;

fn scenario(cfg: &Config) -> Vec<Trajectory2D> {
    run_scenario(&DemandModel::from_config(&cfg.sim), &cfg.sim).unwrap()
}

#[test]
fn default_scenario_invariants() {
    let cfg = Config::default();
    let trajs = scenario(&cfg);
    assert_eq!(trajs.len(), 262);
    let slack = cfg.sim.max_speed * cfg.sim.tick;
    for (i, t) in trajs.iter().enumerate() {
        assert_eq!(t.flight_id as usize, i);
        assert!(t.points.len() >= 2);
        for p in &t.points {
            assert!(p.speed() <= cfg.sim.max_speed + 1e-9, "flight {i}: {}", p.speed());
            assert!(p.t >= 0.0);
            assert!(p.x >= -slack && p.x <= cfg.sim.area_side + slack);
            assert!(p.y >= -slack && p.y <= cfg.sim.area_side + slack);
        }
        assert!(t.points.windows(2).all(|w| w[1].t > w[0].t), "flight {i}");
    }
    assert_eq!(trajs, scenario(&cfg), "rerun differs");
}

#[test]
fn dilated_profiles_hold_their_invariants() {
    let cfg = Config::default();
    let trajs = scenario(&cfg);
    let profiles = dilate_all(&trajs, &cfg.mission_spec(), &cfg.dilation_bounds()).unwrap();
    assert_eq!(profiles.len(), 262);
    for (p, t) in profiles.iter().zip(&trajs) {
        assert_eq!(p.flight_id, t.flight_id);
        let kinds: Vec<_> = p.segments.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, SegmentKind::ALL);
        for w in p.segments.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!((a.altitude_at(a.duration) - b.start_altitude).abs() <= 0.1);
            assert!((a.end_speed() - b.start_speed()).abs() <= 0.1, "{} -> {}", a.kind, b.kind);
        }
        assert!(p.segments.iter().all(|s| s.duration > 0.0));
        assert!(p.cruise().waypoints.iter().all(|w| (w.z - 457.2).abs() < 1e-9));
        assert_eq!(&p.cruise_trajectory(), t);
        // Randomization never touches the altitude column.
        for (s, spec) in p.segments.iter().zip(&cfg.mission_spec().segments) {
            assert_eq!(s.end_altitude, spec.end_altitude);
        }
    }
    let again = dilate_all(&trajs, &cfg.mission_spec(), &cfg.dilation_bounds()).unwrap();
    assert_eq!(serde_json::to_string(&profiles).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn single_trajectory_gives_single_profile() {
    let mut cfg = Config::default();
    cfg.sim.n_flights = 1;
    let trajs = scenario(&cfg);
    let profiles = dilate_all(&trajs, &cfg.mission_spec(), &cfg.dilation_bounds()).unwrap();
    assert_eq!(profiles.len(), 1);
}

#[test]
fn artifacts_round_trip_through_disk() {
    let mut cfg = Config::default();
    cfg.sim.n_flights = 12;
    let demand = DemandModel::from_config(&cfg.sim);
    let agents = demand.generate(cfg.sim.n_flights, cfg.sim.max_speed);
    let trajs = run_scenario(&demand, &cfg.sim).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let manifest = ScenarioManifest::new(cfg.sim.rng_seed, cfg.hash(), &agents, &trajs);
    write_scenario(dir.path(), &manifest, &trajs).unwrap();
    let (m2, t2) = read_scenario(dir.path()).unwrap();
    assert_eq!(m2, manifest);
    assert_eq!(t2, trajs);
    assert_eq!(m2.flights[3].origin, agents[3].origin);

    let profiles = dilate_all(&trajs, &cfg.mission_spec(), &cfg.dilation_bounds()).unwrap();
    let pdir = dir.path().join("missions");
    write_profiles(&pdir, &profiles, &cfg.dilation_bounds()).unwrap();
    let back: Vec<MissionProfile> = read_profiles(&pdir).unwrap();
    assert_eq!(back, profiles);
}
