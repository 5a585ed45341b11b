//! Agent-based 2D cruise simulator.
//!
//! Free airspace structure (every flight heads straight for its destination),
//! free access control (take off when there is no immediate conflict) and
//! Modified Voltage Potential reactive conflict resolution. The simulator
//! records one [`TrajectoryPoint`] per tick for every airborne flight.

mod cpa;
mod demand;
pub mod io;
mod mvp;
mod world;

pub use cpa::{cpa, Cpa};
pub use demand::DemandModel;
pub use mvp::{access_control, detect_conflicts, mvp_resolve, preferred_velocity, Access};
pub use world::{run_scenario, step, World};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Planar state of one flight at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub t: f64,
}

impl TrajectoryPoint {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64, t: f64) -> Self {
        Self { x, y, vx, vy, t }
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn distance_to(&self, other: &TrajectoryPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Recorded cruise trajectory of one completed flight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory2D {
    pub flight_id: u32,
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory2D {
    /// Length of the flown ground track [m].
    pub fn ground_track_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].distance_to(&w[1]))
            .sum()
    }

    pub fn duration(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Pending,
    Airborne,
    Arrived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: u32,
    pub origin: [f64; 2],
    pub destination: [f64; 2],
    pub state: TrajectoryPoint,
    pub phase: Phase,
    pub requested_departure: f64,
    /// Preferred ground speed; never above the configured max speed.
    pub cruise_speed: f64,
}

impl Agent {
    /// A pending flight parked at its origin.
    pub fn pending(
        id: u32,
        origin: [f64; 2],
        destination: [f64; 2],
        requested_departure: f64,
        cruise_speed: f64,
    ) -> Self {
        Self {
            id,
            origin,
            destination,
            state: TrajectoryPoint::new(origin[0], origin[1], 0.0, 0.0, requested_departure),
            phase: Phase::Pending,
            requested_departure,
            cruise_speed,
        }
    }

    pub fn distance_to_destination(&self) -> f64 {
        (self.destination[0] - self.state.x).hypot(self.destination[1] - self.state.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConflictPrediction {
    pub intruder_id: u32,
    pub t_cpa: f64,
    pub d_cpa: f64,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("scenario needs at least one flight")]
    NoFlights,
    #[error("simulated time {time} s exceeded the horizon of {horizon} s with {remaining} flights unfinished")]
    HorizonExceeded {
        time: f64,
        horizon: f64,
        remaining: usize,
    },
}
