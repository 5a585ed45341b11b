use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::Agent;
use crate::config::SimConfig;

/// Seeded demand: Poisson departure requests, origins and destinations
/// uniform over the operational square with a minimum O-D distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandModel {
    pub rng_seed: u64,
    /// [flights/s]
    pub arrival_rate: f64,
    pub area_side: f64,
    pub min_od_distance: f64,
}

impl DemandModel {
    pub fn from_config(cfg: &SimConfig) -> Self {
        Self {
            rng_seed: cfg.rng_seed,
            arrival_rate: cfg.arrival_rate,
            area_side: cfg.area_side,
            min_od_distance: cfg.min_od_distance,
        }
    }

    /// `n` pending flights, ids `0..n`, sorted by requested departure.
    pub fn generate(&self, n: usize, cruise_speed: f64) -> Vec<Agent> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        let gaps = Exp::new(self.arrival_rate).expect("arrival rate is positive");
        let side = self.area_side;
        let mut t = 0.0;
        (0..n)
            .map(|i| {
                t += gaps.sample(&mut rng);
                let origin = [rng.random_range(0.0..=side), rng.random_range(0.0..=side)];
                let destination = loop {
                    let d = [rng.random_range(0.0..=side), rng.random_range(0.0..=side)];
                    if (d[0] - origin[0]).hypot(d[1] - origin[1]) >= self.min_od_distance {
                        break d;
                    }
                };
                Agent::pending(i as u32, origin, destination, t, cruise_speed)
            })
            .collect()
    }
}
