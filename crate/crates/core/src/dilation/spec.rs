use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Schedule, SegmentKind};
use crate::config::{ConfigError, MissionSettings, VehicleConfig};
use crate::units::{FOOT, FPM, MPH};

/// One row of the baseline mission table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub kind: SegmentKind,
    /// Magnitude of the climb or descent rate [m/s].
    pub vertical_speed: Schedule,
    pub horizontal_speed: Schedule,
    /// [m AGL]
    pub end_altitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSpec {
    pub segments: Vec<SegmentSpec>,
    pub cruise_altitude: f64,
    /// Duration of the level terminal-procedure segments [s].
    pub terminal_duration: f64,
    /// Time a terminal procedure gets to capture its commanded speed [s].
    pub capture_time: f64,
}

impl MissionSpec {
    /// The baseline table, with `1.2 v_stall` resolved against `vehicle`.
    ///
    /// | segment | vertical (ft/min) | horizontal (mph) | end alt (ft) |
    /// |---|---|---|---|
    /// | hover climb | 0 to 500 | 0 | 50 |
    /// | transition climb | 500 | 0 to 1.2 v_stall | 300 |
    /// | departure terminal procedure | 0 | 1.2 v_stall | 300 |
    /// | accel climb | 500 | 1.2 v_stall to 110 | cruise |
    /// | cruise | 0 | 110 | cruise |
    /// | decel descend | 500 | 110 to 1.2 v_stall | 300 |
    /// | arrival terminal procedure | 0 to 500 | 1.2 v_stall | 300 |
    /// | transition descend | 500 to 300 | 1.2 v_stall to 0 | 50 |
    /// | hover descend | 300 to 0 | 0 | 0 |
    pub fn baseline(vehicle: &VehicleConfig, mission: &MissionSettings) -> Self {
        use SegmentKind::*;
        let vt = vehicle.transition_speed();
        let cruise = 110.0 * MPH;
        let fpm = |v: f64| v * FPM;
        let row = |kind, vertical_speed, horizontal_speed, end_altitude| SegmentSpec {
            kind,
            vertical_speed,
            horizontal_speed,
            end_altitude,
        };
        let c = Schedule::constant;
        let r = Schedule::ramp;
        let alt = mission.cruise_altitude;
        Self {
            segments: vec![
                row(HoverClimb, r(0.0, fpm(500.0)), c(0.0), 50.0 * FOOT),
                row(TransitionClimb, c(fpm(500.0)), r(0.0, vt), 300.0 * FOOT),
                row(DepartureTerminalProcedure, c(0.0), c(vt), 300.0 * FOOT),
                row(AccelClimb, c(fpm(500.0)), r(vt, cruise), alt),
                row(Cruise, c(0.0), c(cruise), alt),
                row(DecelDescend, c(fpm(500.0)), r(cruise, vt), 300.0 * FOOT),
                row(ArrivalTerminalProcedure, r(0.0, fpm(500.0)), c(vt), 300.0 * FOOT),
                row(TransitionDescend, r(fpm(500.0), fpm(300.0)), r(vt, 0.0), 50.0 * FOOT),
                row(HoverDescend, r(fpm(300.0), 0.0), c(0.0), 0.0),
            ],
            cruise_altitude: alt,
            terminal_duration: mission.terminal_duration,
            capture_time: mission.capture_time,
        }
    }

    pub fn segment(&self, kind: SegmentKind) -> &SegmentSpec {
        &self.segments[kind.index()]
    }

    /// Start altitude of every segment: 0 for the first, then the previous end.
    pub fn start_altitudes(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.segments.iter().map(|s| s.end_altitude))
            .take(self.segments.len())
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |message: String| ConfigError::Invariant {
            field: "mission".into(),
            message,
        };
        if self.segments.len() != 9 {
            return Err(bad(format!("expected 9 segments, found {}", self.segments.len())));
        }
        for (seg, kind) in self.segments.iter().zip(SegmentKind::ALL) {
            if seg.kind != kind {
                return Err(bad(format!("segment {} out of order, expected {kind}", seg.kind)));
            }
            if seg.end_altitude < 0.0 {
                return Err(bad(format!("{kind} ends below ground")));
            }
        }
        if self.segments.last().map(|s| s.end_altitude) != Some(0.0) {
            return Err(bad("mission must end on the ground".into()));
        }
        Ok(())
    }
}

/// Randomization half-widths around the tabulated speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationBounds {
    pub delta_vertical: f64,
    pub delta_horizontal: f64,
    pub rng_seed: u64,
}

impl DilationBounds {
    /// Every nonzero tabulated speed must stay positive after randomization.
    pub fn validate(&self, spec: &MissionSpec) -> Result<(), ConfigError> {
        for (field, delta, pick) in [
            ("bounds.delta_vertical", self.delta_vertical, true),
            ("bounds.delta_horizontal", self.delta_horizontal, false),
        ] {
            if !(delta.is_finite() && delta >= 0.0) {
                return Err(ConfigError::Invariant {
                    field: field.into(),
                    message: format!("must be finite and >= 0, got {delta}"),
                });
            }
            for seg in &spec.segments {
                let sched = if pick { &seg.vertical_speed } else { &seg.horizontal_speed };
                if let Some(mu) = sched.nominal_values().into_iter().find(|&mu| mu != 0.0 && delta >= mu) {
                    return Err(ConfigError::Invariant {
                        field: field.into(),
                        message: format!("{delta} m/s is not below the {} speed {mu} m/s", seg.kind),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Per-flight draw of every nonzero speed in `spec` from `[mu - delta, mu + delta]`.
///
/// Zeros and altitudes are left alone. The stream depends only on
/// `(bounds.rng_seed, flight_id)`.
pub fn realize_spec(spec: &MissionSpec, bounds: &DilationBounds, flight_id: u32) -> Vec<SegmentSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.rng_seed);
    rng.set_stream(u64::from(flight_id));
    let mut draw = |mu: f64, delta: f64| {
        if mu == 0.0 || delta == 0.0 {
            mu
        } else {
            rng.random_range(mu - delta..=mu + delta)
        }
    };
    spec.segments
        .iter()
        .map(|s| SegmentSpec {
            kind: s.kind,
            vertical_speed: s.vertical_speed.map_values(|mu| draw(mu, bounds.delta_vertical)),
            horizontal_speed: s.horizontal_speed.map_values(|mu| draw(mu, bounds.delta_horizontal)),
            end_altitude: s.end_altitude,
        })
        .collect()
}
