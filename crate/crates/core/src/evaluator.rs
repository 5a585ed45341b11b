//! Feasibility evaluation of mission profiles against the powertrain model.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EvaluatorConfig, VehicleConfig};
use crate::dilation::{MissionProfile, RealizedSegment, SegmentKind};
use crate::powertrain::{battery_step, power_required, BatteryState, FlightCondition};
use crate::Error;

/// Slack on every threshold comparison, relative to the threshold.
const REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    ThrottleExceeded,
    SpeedUnachievable,
    BatteryDepleted,
    CRateExceeded,
    VoltageFloor,
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FailureReason::ThrottleExceeded => "throttle_exceeded",
            FailureReason::SpeedUnachievable => "speed_unachievable",
            FailureReason::BatteryDepleted => "battery_depleted",
            FailureReason::CRateExceeded => "c_rate_exceeded",
            FailureReason::VoltageFloor => "voltage_floor",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Mission-elapsed time at the end of the sample interval [s].
    pub t: f64,
    pub throttle_lift: f64,
    pub throttle_forward: f64,
    pub energy_remaining: f64,
    pub voltage: f64,
    pub c_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentResult {
    pub kind: SegmentKind,
    pub feasible: bool,
    pub failure_reason: Option<FailureReason>,
    pub samples: Vec<Sample>,
}

impl SegmentResult {
    fn mean(&self, f: impl Fn(&Sample) -> f64) -> f64 {
        self.samples.iter().map(f).sum::<f64>() / self.samples.len() as f64
    }

    pub fn mean_c_rate(&self) -> f64 {
        self.mean(|s| s.c_rate)
    }

    pub fn mean_throttle(&self) -> ThrottleMeans {
        ThrottleMeans {
            lift: self.mean(|s| s.throttle_lift),
            forward: self.mean(|s| s.throttle_forward),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionResult {
    pub flight_id: u32,
    pub feasible: bool,
    pub first_failed_segment: Option<SegmentKind>,
    pub failure_reason: Option<FailureReason>,
    /// Cruise ground-track length [m].
    pub range: f64,
    pub total_energy_used: f64,
    pub final_voltage: f64,
    pub segment_results: Vec<SegmentResult>,
}

impl MissionResult {
    pub fn samples(&self) -> impl Iterator<Item = (SegmentKind, &Sample)> {
        self.segment_results
            .iter()
            .flat_map(|r| r.samples.iter().map(move |s| (r.kind, s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrottleMeans {
    pub lift: f64,
    pub forward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangePoint {
    pub flight_id: u32,
    pub range: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetReport {
    pub n_total: usize,
    pub n_feasible: usize,
    pub n_infeasible: usize,
    pub failures_by_segment: BTreeMap<SegmentKind, usize>,
    pub failures_by_reason: BTreeMap<FailureReason, usize>,
    /// (range, total energy used) of feasible missions, by range.
    pub energy_vs_range: Vec<RangePoint>,
    /// (range, final voltage) of feasible missions, by range.
    pub voltage_vs_range: Vec<RangePoint>,
    /// Mean over feasible missions of each segment's mean C-rate.
    pub per_segment_mean_c_rate: BTreeMap<SegmentKind, f64>,
    pub per_segment_mean_throttle: BTreeMap<SegmentKind, ThrottleMeans>,
}

impl FleetReport {
    pub fn from_results(results: &[MissionResult]) -> Self {
        let feasible: Vec<&MissionResult> = results.iter().filter(|r| r.feasible).collect();
        let mut failures_by_segment = BTreeMap::new();
        let mut failures_by_reason = BTreeMap::new();
        for r in results.iter().filter(|r| !r.feasible) {
            if let Some(k) = r.first_failed_segment {
                *failures_by_segment.entry(k).or_insert(0) += 1;
            }
            if let Some(f) = r.failure_reason {
                *failures_by_reason.entry(f).or_insert(0) += 1;
            }
        }

        let by_range = |value: fn(&MissionResult) -> f64| {
            let mut v: Vec<RangePoint> = feasible
                .iter()
                .map(|r| RangePoint {
                    flight_id: r.flight_id,
                    range: r.range,
                    value: value(r),
                })
                .collect();
            v.sort_by(|a, b| a.range.total_cmp(&b.range).then(a.flight_id.cmp(&b.flight_id)));
            v
        };

        let mut per_segment_mean_c_rate = BTreeMap::new();
        let mut per_segment_mean_throttle = BTreeMap::new();
        if !feasible.is_empty() {
            let n = feasible.len() as f64;
            for kind in SegmentKind::ALL {
                let segs = feasible.iter().map(|r| &r.segment_results[kind.index()]);
                let c = segs.clone().map(SegmentResult::mean_c_rate).sum::<f64>() / n;
                let (l, f) = segs.fold((0.0, 0.0), |(l, f), s| {
                    let m = s.mean_throttle();
                    (l + m.lift, f + m.forward)
                });
                per_segment_mean_c_rate.insert(kind, c);
                per_segment_mean_throttle.insert(
                    kind,
                    ThrottleMeans {
                        lift: l / n,
                        forward: f / n,
                    },
                );
            }
        }

        Self {
            n_total: results.len(),
            n_feasible: feasible.len(),
            n_infeasible: results.len() - feasible.len(),
            failures_by_segment,
            failures_by_reason,
            energy_vs_range: by_range(|r| r.total_energy_used),
            voltage_vs_range: by_range(|r| r.final_voltage),
            per_segment_mean_c_rate,
            per_segment_mean_throttle,
        }
    }

    /// Segment with the largest mean C-rate over the feasible set.
    pub fn peak_c_rate_segment(&self) -> Option<SegmentKind> {
        self.per_segment_mean_c_rate
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| *k)
    }

    /// Two-row feasibility table: feasible count, infeasible count with the
    /// per-segment breakdown.
    pub fn feasibility_table(&self) -> String {
        let breakdown = self
            .failures_by_segment
            .iter()
            .map(|(k, n)| format!("{n} in {} segment", k.label()))
            .collect::<Vec<_>>()
            .join(" & ");
        let infeasible = if breakdown.is_empty() {
            self.n_infeasible.to_string()
        } else {
            format!("{} ({breakdown})", self.n_infeasible)
        };
        let mut out = String::new();
        let _ = writeln!(out, "| Framework | Number of feasible mission profiles | Number of infeasible mission profiles |");
        let _ = writeln!(out, "|---|---|---|");
        let _ = writeln!(out, "| uamsim | {} | {infeasible} |", self.n_feasible);
        out
    }
}

fn exceeds(value: f64, limit: f64) -> bool {
    value > limit + REL_TOL * limit.abs().max(1.0)
}

/// Kinematic check: can the vehicle fly this instant at all?
fn speed_achievable(seg: &RealizedSegment, tau: f64, vehicle: &VehicleConfig, settings: &EvaluatorConfig) -> bool {
    let h = seg.horizontal(tau);
    if seg.kind == SegmentKind::Cruise && exceeds(h.speed, vehicle.design_speed) {
        return false;
    }
    if exceeds(h.accel, settings.accel_cap) {
        return false;
    }
    let drag = power_required(
        &FlightCondition {
            horizontal_speed: h.speed,
            vertical_speed: 0.0,
            vertical_accel: 0.0,
            altitude: seg.altitude_at(tau),
            mass: vehicle.max_takeoff_mass,
        },
        vehicle,
    )
    .drag;
    let thrust_limited = (vehicle.max_forward_thrust - drag) / vehicle.max_takeoff_mass;
    !exceeds(h.along_track_accel, thrust_limited)
}

/// Flies one segment from `battery`, one sample per `settings.sample_step`.
///
/// Each interval is evaluated at its midpoint and recorded at its end. The
/// segment stops at the first sample that breaks a limit; that sample is kept.
pub fn evaluate_segment(
    seg: &RealizedSegment,
    battery: &BatteryState,
    vehicle: &VehicleConfig,
    settings: &EvaluatorConfig,
) -> (SegmentResult, BatteryState) {
    let reserve = settings.reserve_fraction * battery.capacity;
    let fail = |reason, samples| SegmentResult {
        kind: seg.kind,
        feasible: false,
        failure_reason: Some(reason),
        samples,
    };
    if battery.empty || battery.energy_remaining <= reserve {
        let s = Sample {
            t: seg.start_time,
            throttle_lift: 0.0,
            throttle_forward: 0.0,
            energy_remaining: battery.energy_remaining,
            voltage: battery.voltage_under_load,
            c_rate: 0.0,
        };
        return (fail(FailureReason::BatteryDepleted, vec![s]), *battery);
    }

    let step = settings.sample_step;
    let n = ((seg.duration / step) - 1e-9).ceil().max(1.0) as usize;
    let mut samples = Vec::with_capacity(n);
    let mut state = *battery;
    for k in 0..n {
        let t0 = k as f64 * step;
        let t1 = if k + 1 == n { seg.duration } else { (k + 1) as f64 * step };
        let mid = 0.5 * (t0 + t1);
        let cond = FlightCondition {
            horizontal_speed: seg.horizontal(mid).speed,
            vertical_speed: seg.climb_rate(mid),
            vertical_accel: seg.vertical_accel(mid),
            altitude: seg.altitude_at(mid),
            mass: vehicle.max_takeoff_mass,
        };
        let p = power_required(&cond, vehicle);
        state = battery_step(&state, p.total(), t1 - t0, vehicle);
        samples.push(Sample {
            t: seg.start_time + t1,
            throttle_lift: p.lift_throttle,
            throttle_forward: p.forward_throttle,
            energy_remaining: state.energy_remaining,
            voltage: state.voltage_under_load,
            c_rate: state.c_rate,
        });

        let reason = if !speed_achievable(seg, mid, vehicle, settings) {
            Some(FailureReason::SpeedUnachievable)
        } else if exceeds(p.lift_throttle, 1.0) || exceeds(p.forward_throttle, 1.0) {
            Some(FailureReason::ThrottleExceeded)
        } else if state.empty || state.energy_remaining < reserve {
            Some(FailureReason::BatteryDepleted)
        } else if exceeds(state.c_rate, vehicle.max_c_rate) {
            Some(FailureReason::CRateExceeded)
        } else if state.voltage_under_load < vehicle.min_voltage * (1.0 - REL_TOL) {
            Some(FailureReason::VoltageFloor)
        } else {
            None
        };
        if let Some(r) = reason {
            return (fail(r, samples), state);
        }
    }
    (
        SegmentResult {
            kind: seg.kind,
            feasible: true,
            failure_reason: None,
            samples,
        },
        state,
    )
}

/// Flies a whole mission on a fresh battery, stopping at the first failure.
pub fn evaluate_mission(profile: &MissionProfile, vehicle: &VehicleConfig, settings: &EvaluatorConfig) -> MissionResult {
    let mut battery = BatteryState::full(vehicle);
    let mut segment_results = Vec::with_capacity(profile.segments.len());
    let mut failed = None;
    for seg in &profile.segments {
        let (r, next) = evaluate_segment(seg, &battery, vehicle, settings);
        battery = next;
        let reason = r.failure_reason;
        segment_results.push(r);
        if let Some(reason) = reason {
            failed = Some((seg.kind, reason));
            break;
        }
    }
    let final_voltage = segment_results
        .last()
        .and_then(|r| r.samples.last())
        .map_or(battery.voltage_under_load, |s| s.voltage);
    MissionResult {
        flight_id: profile.flight_id,
        feasible: failed.is_none(),
        first_failed_segment: failed.map(|f| f.0),
        failure_reason: failed.map(|f| f.1),
        range: profile.cruise().ground_distance(),
        total_energy_used: battery.energy_used(),
        final_voltage,
        segment_results,
    }
}

/// Evaluates every mission on a pool of `jobs` workers (0 picks the core
/// count). Results come back in input order regardless of scheduling.
pub fn evaluate_missions(
    profiles: &[MissionProfile],
    vehicle: &VehicleConfig,
    settings: &EvaluatorConfig,
    jobs: usize,
) -> Vec<MissionResult> {
    let run = || {
        profiles
            .par_iter()
            .map(|p| evaluate_mission(p, vehicle, settings))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => profiles.iter().map(|p| evaluate_mission(p, vehicle, settings)).collect(),
    }
}

pub fn evaluate_fleet(profiles: &[MissionProfile], vehicle: &VehicleConfig, settings: &EvaluatorConfig, jobs: usize) -> FleetReport {
    FleetReport::from_results(&evaluate_missions(profiles, vehicle, settings, jobs))
}

pub const SAMPLES_HEADER: &str = "t_s,throttle_lift,throttle_fwd,energy_J,voltage_V,c_rate_per_h,segment";

/// Per-mission sample series as CSV text.
pub fn samples_csv(result: &MissionResult) -> String {
    let mut out = String::from(SAMPLES_HEADER);
    out.push('\n');
    for (kind, s) in result.samples() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t, s.throttle_lift, s.throttle_forward, s.energy_remaining, s.voltage, s.c_rate, kind
        );
    }
    out
}

pub fn write_samples_csv(path: &Path, result: &MissionResult) -> Result<(), Error> {
    std::fs::write(path, samples_csv(result)).map_err(|e| Error::io(path, e))
}
