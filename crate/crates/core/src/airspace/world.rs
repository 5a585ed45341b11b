use super::{access_control, mvp_resolve, Access, Agent, DemandModel, Phase, SimError, Trajectory2D, TrajectoryPoint};
use crate::config::SimConfig;

/// Full simulator state between ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub time: f64,
    pub agents: Vec<Agent>,
    /// Recorded points, indexed like `agents`.
    pub tracks: Vec<Vec<TrajectoryPoint>>,
}

impl World {
    /// Agents must be numbered `0..n` in order.
    pub fn new(agents: Vec<Agent>) -> Self {
        assert!(
            agents.iter().enumerate().all(|(i, a)| a.id as usize == i),
            "agent ids must match their index"
        );
        let tracks = vec![Vec::new(); agents.len()];
        Self {
            time: 0.0,
            agents,
            tracks,
        }
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.agents.iter().filter(|a| a.phase == phase).count()
    }

    pub fn is_finished(&self) -> bool {
        self.agents.iter().all(|a| a.phase == Phase::Arrived)
    }

    /// Advances the world by one tick.
    ///
    /// Airborne flights get MVP velocities computed against a snapshot of
    /// everyone airborne within sensing range, then integrate and record one
    /// point each. Arrivals close their tracks; pending flights whose request
    /// time has come ask for access, in id order.
    pub fn step(&mut self, cfg: &SimConfig) {
        let snapshot: Vec<Agent> = self
            .agents
            .iter()
            .filter(|a| a.phase == Phase::Airborne)
            .cloned()
            .collect();

        let new_velocities: Vec<[f64; 2]> = snapshot
            .iter()
            .map(|own| {
                let neighbors: Vec<&Agent> = snapshot
                    .iter()
                    .filter(|n| n.id != own.id && n.state.distance_to(&own.state) <= cfg.sensing_radius)
                    .collect();
                let v = mvp_resolve(own, &neighbors, cfg);
                contain(&own.state, v, cfg)
            })
            .collect();

        let t = self.time + cfg.tick;
        for (own, v) in snapshot.iter().zip(new_velocities) {
            let idx = own.id as usize;
            let agent = &mut self.agents[idx];
            agent.state = TrajectoryPoint::new(
                agent.state.x + v[0] * cfg.tick,
                agent.state.y + v[1] * cfg.tick,
                v[0],
                v[1],
                t,
            );
            self.tracks[idx].push(agent.state);
            if agent.distance_to_destination() <= cfg.arrival_threshold() {
                agent.phase = Phase::Arrived;
            }
        }
        self.time = t;

        for idx in 0..self.agents.len() {
            let cand = &self.agents[idx];
            if cand.phase != Phase::Pending || cand.requested_departure > self.time {
                continue;
            }
            let active: Vec<&Agent> = self
                .agents
                .iter()
                .filter(|a| a.phase == Phase::Airborne)
                .collect();
            if access_control(cand, &active, cfg) == Access::Denied {
                continue;
            }
            let agent = &mut self.agents[idx];
            agent.phase = Phase::Airborne;
            agent.state = TrajectoryPoint::new(agent.origin[0], agent.origin[1], 0.0, 0.0, self.time);
            let [vx, vy] = super::preferred_velocity(agent, cfg);
            agent.state.vx = vx;
            agent.state.vy = vy;
            self.tracks[idx].push(agent.state);
        }
    }

    /// Completed trajectories in flight-id order.
    pub fn into_trajectories(self) -> Vec<Trajectory2D> {
        self.agents
            .iter()
            .zip(self.tracks)
            .map(|(a, points)| Trajectory2D {
                flight_id: a.id,
                points,
            })
            .collect()
    }
}

/// Keeps the next position inside the operational square by trimming the
/// outward velocity component on the offending axis.
fn contain(state: &TrajectoryPoint, mut v: [f64; 2], cfg: &SimConfig) -> [f64; 2] {
    let pos = [state.x, state.y];
    for axis in 0..2 {
        let next = pos[axis] + v[axis] * cfg.tick;
        if next < 0.0 || next > cfg.area_side {
            v[axis] = (next.clamp(0.0, cfg.area_side) - pos[axis]) / cfg.tick;
        }
    }
    v
}

/// Functional form of [`World::step`].
pub fn step(mut world: World, cfg: &SimConfig) -> World {
    world.step(cfg);
    world
}

/// Runs `cfg.n_flights` flights from `demand` until all have arrived.
pub fn run_scenario(demand: &DemandModel, cfg: &SimConfig) -> Result<Vec<Trajectory2D>, SimError> {
    if cfg.n_flights == 0 {
        return Err(SimError::NoFlights);
    }
    let agents = demand.generate(cfg.n_flights, cfg.max_speed);
    let mut world = World::new(agents);
    while !world.is_finished() {
        if world.time > cfg.horizon {
            return Err(SimError::HorizonExceeded {
                time: world.time,
                horizon: cfg.horizon,
                remaining: world.agents.len() - world.count(Phase::Arrived),
            });
        }
        world.step(cfg);
    }
    Ok(world.into_trajectories())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn single_agent_advances_by_velocity_times_tick() {
        let cfg = cfg();
        let mut a = Agent::pending(0, [1000.0, 1000.0], [21_000.0, 1000.0], 0.0, cfg.max_speed);
        a.phase = Phase::Airborne;
        a.state = TrajectoryPoint::new(5000.0, 1000.0, cfg.max_speed, 0.0, 10.0);
        let mut w = World::new(vec![a]);
        w.time = 10.0;
        w.step(&cfg);
        let s = w.agents[0].state;
        assert!((s.x - (5000.0 + cfg.max_speed * cfg.tick)).abs() < 1e-9);
        assert_eq!(s.y, 1000.0);
        assert_eq!(s.t, 11.0);
        assert_eq!(w.tracks[0].len(), 1);
    }

    #[test]
    fn agent_inside_threshold_arrives() {
        let cfg = cfg();
        let mut a = Agent::pending(0, [1000.0, 1000.0], [21_000.0, 1000.0], 0.0, cfg.max_speed);
        a.phase = Phase::Airborne;
        a.state = TrajectoryPoint::new(21_000.0 - 60.0, 1000.0, cfg.max_speed, 0.0, 0.0);
        let mut w = World::new(vec![a]);
        w.step(&cfg);
        assert_eq!(w.agents[0].phase, Phase::Arrived);
        let before = w.tracks[0].len();
        w.step(&cfg);
        assert_eq!(w.tracks[0].len(), before, "closed trajectories stay closed");
    }

    #[test]
    fn pending_agent_departs_when_due() {
        let cfg = cfg();
        let a = Agent::pending(0, [1000.0, 1000.0], [21_000.0, 1000.0], 2.5, cfg.max_speed);
        let mut w = World::new(vec![a]);
        w.step(&cfg);
        w.step(&cfg);
        assert_eq!(w.agents[0].phase, Phase::Pending);
        w.step(&cfg);
        assert_eq!(w.agents[0].phase, Phase::Airborne);
        assert_eq!(w.tracks[0][0].t, 3.0);
        assert_eq!(w.tracks[0][0].position(), [1000.0, 1000.0]);
    }

    #[test]
    fn containment_trims_outward_motion() {
        let cfg = cfg();
        let s = TrajectoryPoint::new(10.0, 100.0, 0.0, 0.0, 0.0);
        let v = contain(&s, [-40.0, 5.0], &cfg);
        assert_eq!(v, [-10.0, 5.0]);
    }

    #[test]
    fn one_flight_flies_straight() {
        let mut cfg = cfg();
        cfg.n_flights = 1;
        let demand = DemandModel::from_config(&cfg);
        let trajs = run_scenario(&demand, &cfg).unwrap();
        assert_eq!(trajs.len(), 1);
        let pts = &trajs[0].points;
        let v0 = [pts[0].vx, pts[0].vy];
        for p in pts {
            assert!((p.vx - v0[0]).abs() < 1e-9 && (p.vy - v0[1]).abs() < 1e-9);
        }
        let od = demand.generate(1, cfg.max_speed)[0].clone();
        let last = pts.last().unwrap();
        assert!((last.x - od.destination[0]).hypot(last.y - od.destination[1]) <= cfg.arrival_threshold());
    }

    #[test]
    fn zero_flights_is_an_error() {
        let mut cfg = cfg();
        cfg.n_flights = 0;
        assert!(matches!(
            run_scenario(&DemandModel::from_config(&cfg), &cfg),
            Err(SimError::NoFlights)
        ));
    }

    #[test]
    fn horizon_guard_fires() {
        let mut cfg = cfg();
        cfg.n_flights = 3;
        cfg.horizon = 10.0;
        assert!(matches!(
            run_scenario(&DemandModel::from_config(&cfg), &cfg),
            Err(SimError::HorizonExceeded { .. })
        ));
    }
}
