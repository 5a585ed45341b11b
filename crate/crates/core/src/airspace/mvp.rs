//! Modified Voltage Potential conflict resolution and departure access control.

use super::{cpa, Agent, ConflictPrediction, Phase, TrajectoryPoint};
use crate::config::SimConfig;

/// Direct-to-destination velocity at the agent's cruise speed.
pub fn preferred_velocity(agent: &Agent, cfg: &SimConfig) -> [f64; 2] {
    let dx = agent.destination[0] - agent.state.x;
    let dy = agent.destination[1] - agent.state.y;
    let dist = dx.hypot(dy);
    if dist == 0.0 {
        return [0.0, 0.0];
    }
    let speed = agent.cruise_speed.min(cfg.max_speed);
    [dx / dist * speed, dy / dist * speed]
}

/// Where the agent would be heading if nobody else were around.
fn intent(agent: &Agent, cfg: &SimConfig) -> TrajectoryPoint {
    let [vx, vy] = preferred_velocity(agent, cfg);
    TrajectoryPoint::new(agent.state.x, agent.state.y, vx, vy, agent.state.t)
}

/// Neighbors whose predicted closest approach breaks separation inside the lookahead.
///
/// Prediction uses both flights' preferred velocities from their current
/// positions, so the set only depends on positions and destinations.
pub fn detect_conflicts(own: &Agent, neighbors: &[&Agent], cfg: &SimConfig) -> Vec<ConflictPrediction> {
    let own_intent = intent(own, cfg);
    let lookahead = cfg.lookahead();
    neighbors
        .iter()
        .filter(|n| n.id != own.id)
        .filter_map(|n| {
            let c = cpa(&own_intent, &intent(n, cfg));
            (c.d_cpa < cfg.min_separation && c.t_cpa <= lookahead).then_some(ConflictPrediction {
                intruder_id: n.id,
                t_cpa: c.t_cpa,
                d_cpa: c.d_cpa,
            })
        })
        .collect()
}

/// Resolution velocity for `own` given the neighbors inside its sensing radius.
///
/// For every predicted intrusion the predicted CPA point is pushed out to the
/// protected-zone boundary (scaled by `resolution_margin`); the displacement
/// divided by the time to CPA is a velocity correction. Corrections add up on
/// top of the preferred velocity and the result is clamped to `max_speed`.
pub fn mvp_resolve(own: &Agent, neighbors: &[&Agent], cfg: &SimConfig) -> [f64; 2] {
    let own_intent = intent(own, cfg);
    let target = cfg.min_separation * cfg.resolution_margin;
    let lookahead = cfg.lookahead();
    let mut dv = [0.0, 0.0];

    for n in neighbors.iter().filter(|n| n.id != own.id) {
        let c = cpa(&own_intent, &intent(n, cfg));
        if c.d_cpa >= cfg.min_separation || c.t_cpa > lookahead {
            continue;
        }
        // Unit vector along which own must move away from the intruder's CPA position.
        let away = if c.d_cpa > 1e-6 {
            [-c.offset[0] / c.d_cpa, -c.offset[1] / c.d_cpa]
        } else {
            let [wx, wy] = c.rel_velocity;
            let w = wx.hypot(wy);
            if w > 1e-9 {
                // Perpendicular to the relative velocity; the intruder computes the
                // opposite relative velocity and therefore moves the other way.
                [wy / w, -wx / w]
            } else if own.id < n.id {
                [0.0, 1.0]
            } else {
                [0.0, -1.0]
            }
        };
        let intrusion = target - c.d_cpa;
        let t = c.t_cpa.max(cfg.tick);
        dv[0] += away[0] * intrusion / t;
        dv[1] += away[1] * intrusion / t;
    }

    let mut v = [own_intent.vx + dv[0], own_intent.vy + dv[1]];
    let speed = v[0].hypot(v[1]);
    if speed > cfg.max_speed {
        let k = cfg.max_speed / speed;
        v[0] *= k;
        v[1] *= k;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Granted,
    Denied,
}

/// Free access control: a flight may depart if nobody is inside the protected
/// zone around its origin and nobody is predicted to intrude on its initial
/// straight-line path within the lookahead.
pub fn access_control(candidate: &Agent, active: &[&Agent], cfg: &SimConfig) -> Access {
    let mut probe = candidate.clone();
    probe.state.x = candidate.origin[0];
    probe.state.y = candidate.origin[1];
    let start = intent(&probe, cfg);
    let lookahead = cfg.lookahead();
    let blocked = active
        .iter()
        .filter(|a| a.id != candidate.id && a.phase == Phase::Airborne)
        .any(|a| {
            if start.distance_to(&a.state) < cfg.min_separation {
                return true;
            }
            let c = cpa(&start, &a.state);
            c.d_cpa < cfg.min_separation && c.t_cpa <= lookahead
        });
    if blocked {
        Access::Denied
    } else {
        Access::Granted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn airborne(id: u32, pos: [f64; 2], vel: [f64; 2], dest: [f64; 2], cfg: &SimConfig) -> Agent {
        let mut a = Agent::pending(id, pos, dest, 0.0, cfg.max_speed);
        a.phase = Phase::Airborne;
        a.state = TrajectoryPoint::new(pos[0], pos[1], vel[0], vel[1], 0.0);
        a
    }

    #[test]
    fn no_neighbors_gives_preferred_velocity() {
        let cfg = SimConfig::default();
        let own = airborne(0, [0.0, 0.0], [0.0, 0.0], [30_000.0, 40_000.0], &cfg);
        let v = mvp_resolve(&own, &[], &cfg);
        assert!((v[0] - 0.6 * cfg.max_speed).abs() < 1e-12);
        assert!((v[1] - 0.8 * cfg.max_speed).abs() < 1e-12);
    }

    #[test]
    fn distant_miss_leaves_velocity_unchanged() {
        let cfg = SimConfig::default();
        let own = airborne(0, [0.0, 0.0], [0.0, 0.0], [40_000.0, 0.0], &cfg);
        // Parallel opposite track offset by twice the separation.
        let other = airborne(1, [4_000.0, 1_000.0], [0.0, 0.0], [-30_000.0, 1_000.0], &cfg);
        assert!(detect_conflicts(&own, &[&other], &cfg).is_empty());
        let v = mvp_resolve(&own, &[&other], &cfg);
        assert_eq!(v, preferred_velocity(&own, &cfg));
    }

    #[test]
    fn head_on_agents_deflect_opposite_ways() {
        let cfg = SimConfig::default();
        let a = airborne(0, [0.0, 0.0], [0.0, 0.0], [40_000.0, 0.0], &cfg);
        let b = airborne(1, [4_000.0, 0.0], [0.0, 0.0], [-36_000.0, 0.0], &cfg);
        let va = mvp_resolve(&a, &[&b], &cfg);
        let vb = mvp_resolve(&b, &[&a], &cfg);
        assert!(va[1] * vb[1] < 0.0, "{va:?} {vb:?}");
        assert!(va[0].hypot(va[1]) <= cfg.max_speed + 1e-9);
    }

    #[test]
    fn empty_airspace_grants() {
        let cfg = SimConfig::default();
        let cand = Agent::pending(0, [1000.0, 1000.0], [20_000.0, 1000.0], 0.0, cfg.max_speed);
        assert_eq!(access_control(&cand, &[], &cfg), Access::Granted);
    }

    #[test]
    fn hovering_neighbor_at_origin_denies() {
        let cfg = SimConfig::default();
        let cand = Agent::pending(0, [1000.0, 1000.0], [20_000.0, 1000.0], 0.0, cfg.max_speed);
        let near = airborne(1, [1000.0, 1100.0], [0.0, 0.0], [1000.0, 1100.0], &cfg);
        assert_eq!(access_control(&cand, &[&near], &cfg), Access::Denied);
    }

    #[test]
    fn crossing_traffic_on_departure_path_denies() {
        let cfg = SimConfig::default();
        let v = cfg.max_speed;
        // Candidate heads east from the origin. Intruder 4 km away flies north
        // across the departure path; equal speeds at 90 degrees put the CPA at
        // (along-track lead) / sqrt(2), here 300 m.
        let cand = Agent::pending(0, [0.0, 0.0], [30_000.0, 0.0], 0.0, v);
        let t = 60.0;
        let cross_x = v * t + 300.0 * std::f64::consts::SQRT_2;
        let start = [cross_x, -v * t];
        let intr = airborne(1, start, [0.0, v], [cross_x, 20_000.0], &cfg);
        let dist = start[0].hypot(start[1]);
        assert!(dist > 3_500.0 && dist < 5_000.0, "{dist}");
        // Oracle: the CPA of the two straight lines.
        let c = cpa(
            &TrajectoryPoint::new(0.0, 0.0, v, 0.0, 0.0),
            &TrajectoryPoint::new(start[0], start[1], 0.0, v, 0.0),
        );
        assert!((c.d_cpa - 300.0).abs() < 1e-6, "{}", c.d_cpa);
        assert!(c.t_cpa < cfg.lookahead());
        assert_eq!(access_control(&cand, &[&intr], &cfg), Access::Denied);

        // Same geometry shifted far enough away clears.
        let far = airborne(1, [cross_x + 2_000.0, -v * t], [0.0, v], [cross_x + 2_000.0, 20_000.0], &cfg);
        assert_eq!(access_control(&cand, &[&far], &cfg), Access::Granted);
    }
}
