use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{realize_spec, DilationBounds, DilationError, MissionSpec, Schedule, SegmentKind};
use crate::airspace::Trajectory2D;
use crate::Error;

/// Cruise waypoint lifted to the cruise altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint3D {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub t: f64,
}

impl Waypoint3D {
    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }
}

/// Horizontal motion at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalState {
    pub speed: f64,
    /// Acceleration along the direction of travel [m/s^2].
    pub along_track_accel: f64,
    /// Magnitude of the full horizontal acceleration vector [m/s^2].
    pub accel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedSegment {
    pub kind: SegmentKind,
    pub vertical_speed: Schedule,
    pub horizontal_speed: Schedule,
    pub start_altitude: f64,
    pub end_altitude: f64,
    /// Mission-elapsed time at segment start [s].
    pub start_time: f64,
    pub duration: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<Waypoint3D>,
}

impl RealizedSegment {
    /// +1 climbing, -1 descending, 0 level.
    fn direction(&self) -> f64 {
        let dz = self.end_altitude - self.start_altitude;
        if dz > 0.0 {
            1.0
        } else if dz < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    /// Signed rate of climb at `tau` [m/s]. Level segments hold altitude.
    pub fn climb_rate(&self, tau: f64) -> f64 {
        self.direction() * self.vertical_speed.at(tau, self.duration)
    }

    pub fn vertical_accel(&self, tau: f64) -> f64 {
        self.direction() * self.vertical_speed.rate(tau, self.duration)
    }

    pub fn altitude_at(&self, tau: f64) -> f64 {
        let dir = self.direction();
        if dir == 0.0 {
            return self.start_altitude;
        }
        if tau >= self.duration {
            return self.end_altitude;
        }
        self.start_altitude + dir * self.vertical_speed.integral(tau.clamp(0.0, self.duration), self.duration)
    }

    pub fn horizontal(&self, tau: f64) -> HorizontalState {
        if self.waypoints.is_empty() {
            let speed = self.horizontal_speed.at(tau, self.duration);
            let a = self.horizontal_speed.rate(tau, self.duration);
            return HorizontalState {
                speed,
                along_track_accel: a,
                accel: a.abs(),
            };
        }
        let wps = &self.waypoints;
        let t = wps[0].t + tau;
        let i = match wps.binary_search_by(|w| w.t.total_cmp(&t)) {
            Ok(i) => i.min(wps.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(wps.len() - 2),
        };
        let (a, b) = (&wps[i], &wps[i + 1]);
        let dt = b.t - a.t;
        let s = ((t - a.t) / dt).clamp(0.0, 1.0);
        let vx = a.vx + (b.vx - a.vx) * s;
        let vy = a.vy + (b.vy - a.vy) * s;
        let ax = (b.vx - a.vx) / dt;
        let ay = (b.vy - a.vy) / dt;
        let speed = vx.hypot(vy);
        let along = if speed > 0.0 { (ax * vx + ay * vy) / speed } else { ax.hypot(ay) };
        HorizontalState {
            speed,
            along_track_accel: along,
            accel: ax.hypot(ay),
        }
    }

    pub fn start_speed(&self) -> f64 {
        self.waypoints.first().map_or(self.horizontal_speed.start(), Waypoint3D::speed)
    }

    pub fn end_speed(&self) -> f64 {
        self.waypoints.last().map_or(self.horizontal_speed.end(), Waypoint3D::speed)
    }

    /// Horizontal distance flown [m].
    pub fn ground_distance(&self) -> f64 {
        if self.waypoints.is_empty() {
            self.horizontal_speed.integral(self.duration, self.duration)
        } else {
            self.waypoints
                .windows(2)
                .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y))
                .sum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionProfile {
    pub flight_id: u32,
    pub segments: Vec<RealizedSegment>,
}

impl MissionProfile {
    pub fn segment(&self, kind: SegmentKind) -> &RealizedSegment {
        &self.segments[kind.index()]
    }

    pub fn cruise(&self) -> &RealizedSegment {
        self.segment(SegmentKind::Cruise)
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// The cruise waypoints projected back to the plane.
    pub fn cruise_trajectory(&self) -> Trajectory2D {
        Trajectory2D {
            flight_id: self.flight_id,
            points: self
                .cruise()
                .waypoints
                .iter()
                .map(|w| crate::airspace::TrajectoryPoint::new(w.x, w.y, w.vx, w.vy, w.t))
                .collect(),
        }
    }
}

/// Wraps `traj` with the eight non-cruise segments.
///
/// Speeds are drawn per flight by [`realize_spec`], then joined so that
/// horizontal speed is continuous:
/// - the transition climb ends at its own draw and the departure procedure
///   captures its own draw from there within `spec.capture_time`;
/// - the accel climb runs from the departure speed to the first cruise
///   waypoint's speed, the decel descent from the last cruise waypoint's
///   speed to the arrival-procedure speed;
/// - the transition descent starts from the arrival-procedure speed.
///
/// Durations come from altitude change over the mean vertical rate, except
/// for the level terminal procedures (`spec.terminal_duration`) and cruise
/// (the trajectory's own time span).
pub fn dilate(traj: &Trajectory2D, spec: &MissionSpec, bounds: &DilationBounds) -> Result<MissionProfile, DilationError> {
    use SegmentKind::*;
    let flight_id = traj.flight_id;
    if traj.points.len() < 2 {
        return Err(DilationError::TooFewWaypoints {
            flight_id,
            found: traj.points.len(),
        });
    }
    if let Some(index) = traj.points.windows(2).position(|w| w[1].t <= w[0].t) {
        return Err(DilationError::NonMonotonicTime {
            flight_id,
            index: index + 1,
        });
    }

    let drawn = realize_spec(spec, bounds, flight_id);
    let h = |k: SegmentKind| drawn[k.index()].horizontal_speed;
    let first = traj.points[0].speed();
    let last = traj.points[traj.points.len() - 1].speed();
    let tc_end = h(TransitionClimb).end();
    let dtp = h(DepartureTerminalProcedure).end();
    let atp = h(ArrivalTerminalProcedure).end();

    let horizontal = |k: SegmentKind| match k {
        HoverClimb | HoverDescend => h(k),
        TransitionClimb => Schedule::ramp(h(k).start(), tc_end),
        DepartureTerminalProcedure => Schedule::Capture {
            from: tc_end,
            to: dtp,
            capture_time: spec.capture_time,
        },
        AccelClimb => Schedule::ramp(dtp, first),
        Cruise => Schedule::Track,
        DecelDescend => Schedule::ramp(last, atp),
        ArrivalTerminalProcedure => Schedule::constant(atp),
        TransitionDescend => Schedule::ramp(atp, h(k).end()),
    };

    let starts = spec.start_altitudes();
    let mut t = 0.0;
    let mut segments = Vec::with_capacity(9);
    for (seg, start_altitude) in drawn.iter().zip(starts) {
        let kind = seg.kind;
        let dz = (seg.end_altitude - start_altitude).abs();
        let (duration, waypoints) = if kind == Cruise {
            let z = seg.end_altitude;
            let wps: Vec<Waypoint3D> = traj
                .points
                .iter()
                .map(|p| Waypoint3D {
                    x: p.x,
                    y: p.y,
                    z,
                    vx: p.vx,
                    vy: p.vy,
                    t: p.t,
                })
                .collect();
            (traj.duration(), wps)
        } else if dz == 0.0 {
            (spec.terminal_duration, Vec::new())
        } else {
            let v = seg.vertical_speed.nominal_values();
            let mean = match seg.vertical_speed {
                Schedule::Ramp { start, end } => 0.5 * (start + end),
                _ => v[0],
            };
            if mean.is_nan() || mean <= 0.0 {
                return Err(DilationError::Segment {
                    kind,
                    message: format!("needs a positive vertical speed to change altitude by {dz} m"),
                });
            }
            (dz / mean, Vec::new())
        };
        segments.push(RealizedSegment {
            kind,
            vertical_speed: seg.vertical_speed,
            horizontal_speed: horizontal(kind),
            start_altitude,
            end_altitude: seg.end_altitude,
            start_time: t,
            duration,
            waypoints,
        });
        t += duration;
    }
    Ok(MissionProfile { flight_id, segments })
}

/// Dilates every trajectory, preserving order.
pub fn dilate_all(trajs: &[Trajectory2D], spec: &MissionSpec, bounds: &DilationBounds) -> Result<Vec<MissionProfile>, DilationError> {
    trajs.iter().map(|t| dilate(t, spec, bounds)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileIndexEntry {
    pub flight_id: u32,
    pub file: String,
    pub duration: f64,
    pub cruise_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileIndex {
    pub bounds: DilationBounds,
    pub missions: Vec<ProfileIndexEntry>,
}

pub const PROFILE_INDEX: &str = "index.json";

pub fn profile_file_name(flight_id: u32) -> String {
    format!("mission_{flight_id:04}.json")
}

/// One JSON file per mission plus `index.json`.
pub fn write_profiles(dir: &Path, profiles: &[MissionProfile], bounds: &DilationBounds) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(profiles.len() + 1);
    let mut missions = Vec::with_capacity(profiles.len());
    for p in profiles {
        let file = profile_file_name(p.flight_id);
        let path = dir.join(&file);
        crate::write_json(&path, p)?;
        written.push(path);
        missions.push(ProfileIndexEntry {
            flight_id: p.flight_id,
            file,
            duration: p.duration(),
            cruise_distance: p.cruise().ground_distance(),
        });
    }
    let path = dir.join(PROFILE_INDEX);
    crate::write_json(
        &path,
        &ProfileIndex {
            bounds: *bounds,
            missions,
        },
    )?;
    written.push(path);
    Ok(written)
}

pub fn read_profiles(dir: &Path) -> Result<Vec<MissionProfile>, Error> {
    let index: ProfileIndex = crate::read_json(&dir.join(PROFILE_INDEX))?;
    index
        .missions
        .iter()
        .map(|m| crate::read_json(&dir.join(&m.file)))
        .collect()
}
