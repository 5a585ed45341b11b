//! Mission dilation: turns a 2D cruise trajectory into a nine-segment 3D
//! mission profile.
//!
//! The baseline table ([`MissionSpec::baseline`]) gives per-segment vertical
//! speed, horizontal speed and ending altitude. [`realize_spec`] draws every
//! nonzero speed uniformly from `[mu - delta, mu + delta]`; [`dilate`] then
//! stitches the drawn segments around the lifted cruise track.

mod profile;
mod spec;

pub use profile::{
    dilate, dilate_all, profile_file_name, read_profiles, write_profiles, HorizontalState, MissionProfile, ProfileIndex,
    ProfileIndexEntry, RealizedSegment, Waypoint3D, PROFILE_INDEX,
};
pub use spec::{realize_spec, DilationBounds, MissionSpec, SegmentSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The nine mission segments, in flight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SegmentKind {
    HoverClimb,
    TransitionClimb,
    DepartureTerminalProcedure,
    AccelClimb,
    Cruise,
    DecelDescend,
    ArrivalTerminalProcedure,
    TransitionDescend,
    HoverDescend,
}

impl SegmentKind {
    pub const ALL: [SegmentKind; 9] = [
        SegmentKind::HoverClimb,
        SegmentKind::TransitionClimb,
        SegmentKind::DepartureTerminalProcedure,
        SegmentKind::AccelClimb,
        SegmentKind::Cruise,
        SegmentKind::DecelDescend,
        SegmentKind::ArrivalTerminalProcedure,
        SegmentKind::TransitionDescend,
        SegmentKind::HoverDescend,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SegmentKind::HoverClimb => "HoverClimb",
            SegmentKind::TransitionClimb => "TransitionClimb",
            SegmentKind::DepartureTerminalProcedure => "DepartureTerminalProcedure",
            SegmentKind::AccelClimb => "AccelClimb",
            SegmentKind::Cruise => "Cruise",
            SegmentKind::DecelDescend => "DecelDescend",
            SegmentKind::ArrivalTerminalProcedure => "ArrivalTerminalProcedure",
            SegmentKind::TransitionDescend => "TransitionDescend",
            SegmentKind::HoverDescend => "HoverDescend",
        }
    }

    /// Human label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            SegmentKind::HoverClimb => "hover climb",
            SegmentKind::TransitionClimb => "transition climb",
            SegmentKind::DepartureTerminalProcedure => "departure terminal area procedure",
            SegmentKind::AccelClimb => "accel climb",
            SegmentKind::Cruise => "cruise",
            SegmentKind::DecelDescend => "decel descend",
            SegmentKind::ArrivalTerminalProcedure => "arrival terminal area procedure",
            SegmentKind::TransitionDescend => "transition descend",
            SegmentKind::HoverDescend => "hover descend",
        }
    }
}

impl std::fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

/// A speed as a function of time within a segment. Values are SI magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Schedule {
    Constant { value: f64 },
    /// Linear in time over the whole segment.
    Ramp { start: f64, end: f64 },
    /// Linear from `from` to `to` over `capture_time`, then held at `to`.
    Capture { from: f64, to: f64, capture_time: f64 },
    /// Given by the cruise waypoints.
    Track,
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    pub fn ramp(start: f64, end: f64) -> Self {
        Schedule::Ramp { start, end }
    }

    /// Value at `tau` seconds into a segment lasting `duration`.
    pub fn at(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            Schedule::Constant { value } => value,
            Schedule::Ramp { start, end } => {
                if duration <= 0.0 {
                    end
                } else {
                    start + (end - start) * (tau / duration).clamp(0.0, 1.0)
                }
            }
            Schedule::Capture { from, to, capture_time } => {
                if tau >= capture_time {
                    to
                } else {
                    from + (to - from) * (tau / capture_time).max(0.0)
                }
            }
            Schedule::Track => f64::NAN,
        }
    }

    /// Time derivative at `tau`.
    pub fn rate(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            Schedule::Constant { .. } | Schedule::Track => 0.0,
            Schedule::Ramp { start, end } => {
                if duration <= 0.0 {
                    0.0
                } else {
                    (end - start) / duration
                }
            }
            Schedule::Capture { from, to, capture_time } => {
                if (0.0..capture_time).contains(&tau) {
                    (to - from) / capture_time
                } else {
                    0.0
                }
            }
        }
    }

    /// Integral over `[0, tau]`.
    pub fn integral(&self, tau: f64, duration: f64) -> f64 {
        match *self {
            Schedule::Constant { value } => value * tau,
            Schedule::Ramp { start, end } => {
                if duration <= 0.0 {
                    return 0.0;
                }
                let s = tau.clamp(0.0, duration);
                start * s + 0.5 * (end - start) * s * s / duration
            }
            Schedule::Capture { from, to, capture_time } => {
                let s = tau.min(capture_time);
                let ramp = from * s + 0.5 * (to - from) * s * s / capture_time;
                ramp + to * (tau - capture_time).max(0.0)
            }
            Schedule::Track => f64::NAN,
        }
    }

    pub fn start(&self) -> f64 {
        self.at(0.0, 1.0)
    }

    pub fn end(&self) -> f64 {
        match *self {
            Schedule::Constant { value } => value,
            Schedule::Ramp { end, .. } => end,
            Schedule::Capture { to, .. } => to,
            Schedule::Track => f64::NAN,
        }
    }

    /// Nominal values, in draw order.
    pub(crate) fn nominal_values(&self) -> Vec<f64> {
        match *self {
            Schedule::Constant { value } => vec![value],
            Schedule::Ramp { start, end } => vec![start, end],
            Schedule::Capture { from, to, .. } => vec![from, to],
            Schedule::Track => Vec::new(),
        }
    }

    pub(crate) fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        match *self {
            Schedule::Constant { value } => Schedule::Constant { value: f(value) },
            Schedule::Ramp { start, end } => {
                let start = f(start);
                Schedule::Ramp { start, end: f(end) }
            }
            Schedule::Capture { from, to, capture_time } => {
                let from = f(from);
                Schedule::Capture {
                    from,
                    to: f(to),
                    capture_time,
                }
            }
            Schedule::Track => Schedule::Track,
        }
    }
}

#[derive(Debug, Error)]
pub enum DilationError {
    #[error("flight {flight_id}: trajectory needs at least two waypoints, found {found}")]
    TooFewWaypoints { flight_id: u32, found: usize },
    #[error("flight {flight_id}: cruise trajectory has non-increasing time stamps at waypoint {index}")]
    NonMonotonicTime { flight_id: u32, index: usize },
    #[error("segment {kind}: {message}")]
    Segment { kind: SegmentKind, message: String },
}
