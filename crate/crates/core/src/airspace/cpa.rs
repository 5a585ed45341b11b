use super::TrajectoryPoint;

/// Closest point of approach under constant velocities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cpa {
    pub t_cpa: f64,
    pub d_cpa: f64,
    /// Intruder position relative to own at `t_cpa`.
    pub offset: [f64; 2],
    /// Intruder velocity relative to own.
    pub rel_velocity: [f64; 2],
}

/// Time and distance of closest approach, looking forward only.
///
/// `t_cpa` is clamped to 0 when the pair is already diverging or the
/// relative velocity vanishes.
pub fn cpa(own: &TrajectoryPoint, intruder: &TrajectoryPoint) -> Cpa {
    let rx = intruder.x - own.x;
    let ry = intruder.y - own.y;
    let wx = intruder.vx - own.vx;
    let wy = intruder.vy - own.vy;
    let w2 = wx * wx + wy * wy;
    let t = if w2 > 0.0 {
        (-(rx * wx + ry * wy) / w2).max(0.0)
    } else {
        0.0
    };
    let ox = rx + wx * t;
    let oy = ry + wy * t;
    Cpa {
        t_cpa: t,
        d_cpa: ox.hypot(oy),
        offset: [ox, oy],
        rel_velocity: [wx, wy],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, vx: f64, vy: f64) -> TrajectoryPoint {
        TrajectoryPoint::new(x, y, vx, vy, 0.0)
    }

    #[test]
    fn symmetric_head_on() {
        let c = cpa(&p(0.0, 0.0, 50.0, 0.0), &p(10_000.0, 0.0, -50.0, 0.0));
        assert!((c.t_cpa - 100.0).abs() < 1e-12);
        assert!(c.d_cpa.abs() < 1e-9);
    }

    #[test]
    fn zero_relative_velocity() {
        let c = cpa(&p(0.0, 0.0, 50.0, 0.0), &p(0.0, 1000.0, 50.0, 0.0));
        assert_eq!(c.t_cpa, 0.0);
        assert!((c.d_cpa - 1000.0).abs() < 1e-12);
    }

    #[test]
    fn diverging_pair_clamps_to_now() {
        let c = cpa(&p(0.0, 0.0, -10.0, 0.0), &p(100.0, 0.0, 10.0, 0.0));
        assert_eq!(c.t_cpa, 0.0);
        assert_eq!(c.d_cpa, 100.0);
    }

    #[test]
    fn crossing_matches_sampled_distance() {
        // Oracle: sample the separation every 0.1 s over [0, 600] s.
        let own = p(0.0, 0.0, 50.0, 0.0);
        let intr = p(6000.0, -5000.0, 0.0, 50.0);
        let (mut best_t, mut best_d) = (0.0, f64::INFINITY);
        for k in 0..=6000 {
            let t = k as f64 * 0.1;
            let d = ((intr.x + intr.vx * t) - (own.x + own.vx * t))
                .hypot((intr.y + intr.vy * t) - (own.y + own.vy * t));
            if d < best_d {
                best_d = d;
                best_t = t;
            }
        }
        assert!((best_t - 110.0).abs() < 1e-6);
        assert!((best_d - 707.106_781).abs() < 1e-3);

        let c = cpa(&own, &intr);
        assert!((c.t_cpa - best_t).abs() < 0.1);
        assert!((c.d_cpa - best_d).abs() < 1e-3);
    }
}
