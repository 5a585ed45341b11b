//! Run directories: the three pipeline stages as resumable commands with
//! artifacts on disk.
//!
//! ```text
//! <run>/config.toml          canonical config the run was made with
//! <run>/run_manifest.json    stage outputs, config hash, seed, timings
//! <run>/trajectories/        flight_NNNN.csv + scenario.json
//! <run>/missions/            mission_NNNN.json + index.json
//! <run>/evaluation/          report.json, results.json, samples/, figures/
//! ```
//!
//! Every artifact except the timings in `run_manifest.json` is a pure
//! function of the config.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::airspace::io::{read_scenario, write_scenario, ScenarioManifest};
use crate::airspace::{run_scenario, DemandModel};
use crate::config::{load_config, parse_config, Config};
use crate::dilation::{dilate_all, read_profiles, write_profiles, MissionProfile, SegmentKind};
use crate::evaluator::{evaluate_missions, write_samples_csv, FailureReason, FleetReport, MissionResult};
use crate::powertrain::joules_to_kwh;
use crate::Error;

pub const MANIFEST: &str = "run_manifest.json";
pub const CONFIG: &str = "config.toml";
pub const TRAJECTORIES: &str = "trajectories";
pub const MISSIONS: &str = "missions";
pub const EVALUATION: &str = "evaluation";

pub const STAGE_SIMULATE: &str = "simulate";
pub const STAGE_DILATE: &str = "dilate";
pub const STAGE_EVALUATE: &str = "evaluate";

/// Environment variable naming the default run directory.
pub const OUT_ENV: &str = "UAMSIM_OUT";
pub const DEFAULT_OUT: &str = "uamsim-run";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUT), PathBuf::from)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub config_hash: String,
    pub seed: u64,
    /// Stage name to output directory, relative to the run directory.
    pub stage_outputs: BTreeMap<String, String>,
    /// Stage name to wall-clock seconds.
    pub timing: BTreeMap<String, f64>,
}

impl RunManifest {
    fn new(cfg: &Config) -> Self {
        let mut m = Self {
            run_id: String::new(),
            config_hash: String::new(),
            seed: cfg.sim.rng_seed,
            stage_outputs: BTreeMap::new(),
            timing: BTreeMap::new(),
        };
        m.rehash(cfg);
        m
    }

    fn rehash(&mut self, cfg: &Config) {
        self.config_hash = cfg.hash();
        self.run_id = format!("seed{}-{}", cfg.sim.rng_seed, &self.config_hash[..12]);
    }

    fn record(&mut self, stage: &str, dir: &str, seconds: f64) {
        self.stage_outputs.insert(stage.into(), dir.into());
        self.timing.insert(stage.into(), seconds);
    }

    /// Forgets `stages`, used when an earlier stage is rerun.
    fn invalidate(&mut self, stages: &[&str]) {
        for s in stages {
            self.stage_outputs.remove(*s);
            self.timing.remove(*s);
        }
    }
}

/// Loads the manifest and the config next to it, checking the stored hash
/// and that every stage in `required` has run.
pub fn load_run(run_dir: &Path, required: &[(&str, &str)]) -> Result<(RunManifest, Config), Error> {
    let manifest_path = run_dir.join(MANIFEST);
    if !run_dir.is_dir() {
        return Err(Error::io(
            run_dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "run directory not found"),
        ));
    }
    if !manifest_path.is_file() {
        return Err(Error::Usage(format!(
            "{}: no run manifest; run simulate first",
            run_dir.display()
        )));
    }
    let manifest: RunManifest = crate::read_json(&manifest_path)?;
    let text = fs::read_to_string(run_dir.join(CONFIG)).map_err(|e| Error::io(&run_dir.join(CONFIG), e))?;
    let cfg = parse_config(&text)?;
    let hash = cfg.hash();
    if hash != manifest.config_hash {
        return Err(Error::Invariant(format!(
            "{}: config hash {hash} does not match manifest {}",
            run_dir.display(),
            manifest.config_hash
        )));
    }
    for (stage, hint) in required {
        let present = manifest
            .stage_outputs
            .get(*stage)
            .is_some_and(|d| run_dir.join(d).is_dir());
        if !present {
            return Err(Error::Usage(format!("{}: missing {stage} output; {hint}", run_dir.display())));
        }
    }
    Ok((manifest, cfg))
}

fn save(run_dir: &Path, manifest: &RunManifest, cfg: &Config) -> Result<(), Error> {
    let path = run_dir.join(CONFIG);
    fs::write(&path, cfg.to_canonical_toml()).map_err(|e| Error::io(&path, e))?;
    crate::write_json(&run_dir.join(MANIFEST), manifest)
}

/// Overrides from the command line, applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub flights: Option<usize>,
    pub delta_vertical: Option<f64>,
    pub delta_horizontal: Option<f64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut Config) {
        if let Some(s) = self.seed {
            cfg.sim.rng_seed = s;
        }
        if let Some(n) = self.flights {
            cfg.sim.n_flights = n;
        }
        if let Some(d) = self.delta_vertical {
            cfg.bounds.delta_vertical = d;
        }
        if let Some(d) = self.delta_horizontal {
            cfg.bounds.delta_horizontal = d;
        }
    }

    fn touches_bounds(&self) -> bool {
        self.delta_vertical.is_some() || self.delta_horizontal.is_some()
    }
}

/// Stage 1: simulate the airspace and write one CSV per flight.
pub fn cmd_simulate(config: Option<&Path>, run_dir: &Path, overrides: &Overrides) -> Result<RunManifest, Error> {
    let mut cfg = match config {
        Some(p) => load_config(p)?,
        None => Config::default(),
    };
    overrides.apply(&mut cfg);
    if cfg.sim.n_flights == 0 {
        return Err(Error::Usage("--flights must be at least 1".into()));
    }
    cfg.validate()?;

    let start = Instant::now();
    let demand = DemandModel::from_config(&cfg.sim);
    let agents = demand.generate(cfg.sim.n_flights, cfg.sim.max_speed);
    let trajs = run_scenario(&demand, &cfg.sim)?;
    let scenario = ScenarioManifest::new(cfg.sim.rng_seed, cfg.hash(), &agents, &trajs);
    fs::create_dir_all(run_dir).map_err(|e| Error::io(run_dir, e))?;
    write_scenario(&run_dir.join(TRAJECTORIES), &scenario, &trajs)?;

    let mut manifest = RunManifest::new(&cfg);
    manifest.record(STAGE_SIMULATE, TRAJECTORIES, start.elapsed().as_secs_f64());
    save(run_dir, &manifest, &cfg)?;
    Ok(manifest)
}

/// Stage 2: dilate every trajectory into a mission profile.
///
/// Randomization overrides rewrite the run's config and drop any earlier
/// evaluation, since its inputs change.
pub fn cmd_dilate(run_dir: &Path, overrides: &Overrides) -> Result<Vec<MissionProfile>, Error> {
    let (mut manifest, mut cfg) = load_run(run_dir, &[(STAGE_SIMULATE, "run simulate first")])?;
    if overrides.touches_bounds() {
        Overrides {
            seed: None,
            flights: None,
            ..overrides.clone()
        }
        .apply(&mut cfg);
        cfg.validate()?;
        manifest.rehash(&cfg);
    }

    let start = Instant::now();
    let (_, trajs) = read_scenario(&run_dir.join(TRAJECTORIES))?;
    let bounds = cfg.dilation_bounds();
    let profiles = dilate_all(&trajs, &cfg.mission_spec(), &bounds)?;
    write_profiles(&run_dir.join(MISSIONS), &profiles, &bounds)?;

    manifest.invalidate(&[STAGE_EVALUATE]);
    manifest.record(STAGE_DILATE, MISSIONS, start.elapsed().as_secs_f64());
    save(run_dir, &manifest, &cfg)?;
    Ok(profiles)
}

/// Per-mission summary row of `results.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSummary {
    pub flight_id: u32,
    pub feasible: bool,
    pub first_failed_segment: Option<SegmentKind>,
    pub failure_reason: Option<FailureReason>,
    pub range: f64,
    pub total_energy_used: f64,
    pub final_voltage: f64,
}

impl From<&MissionResult> for MissionSummary {
    fn from(r: &MissionResult) -> Self {
        Self {
            flight_id: r.flight_id,
            feasible: r.feasible,
            first_failed_segment: r.first_failed_segment,
            failure_reason: r.failure_reason,
            range: r.range,
            total_energy_used: r.total_energy_used,
            final_voltage: r.final_voltage,
        }
    }
}

/// Stage 3: evaluate every mission and write the report and figure data.
pub fn cmd_evaluate(run_dir: &Path, jobs: usize) -> Result<FleetReport, Error> {
    let (mut manifest, cfg) = load_run(
        run_dir,
        &[(STAGE_SIMULATE, "run simulate first"), (STAGE_DILATE, "run dilate first")],
    )?;
    let start = Instant::now();
    let profiles = read_profiles(&run_dir.join(MISSIONS))?;
    if profiles.is_empty() {
        return Err(Error::Usage("no mission profiles to evaluate".into()));
    }
    let results = evaluate_missions(&profiles, &cfg.vehicle, &cfg.evaluator, jobs);
    let report = FleetReport::from_results(&results);

    let eval = run_dir.join(EVALUATION);
    let samples = eval.join("samples");
    let figures = eval.join("figures");
    let profile_dir = figures.join("profiles");
    for d in [&samples, &profile_dir] {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    crate::write_json(&eval.join("report.json"), &report)?;
    let summaries: Vec<MissionSummary> = results.iter().map(MissionSummary::from).collect();
    crate::write_json(&eval.join("results.json"), &summaries)?;
    for (p, r) in profiles.iter().zip(&results) {
        write_samples_csv(&samples.join(format!("flight_{:04}.csv", r.flight_id)), r)?;
        write_text(&profile_dir.join(format!("flight_{:04}.csv", p.flight_id)), &profile_csv(p, r))?;
    }
    write_figures(&figures, &report)?;

    manifest.record(STAGE_EVALUATE, EVALUATION, start.elapsed().as_secs_f64());
    crate::write_json(&run_dir.join(MANIFEST), &manifest)?;
    Ok(report)
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Altitude and airspeed once per second plus each segment end, with the
/// evaluation status of the segment (`ok`, `failed`, `not_flown`).
pub fn profile_csv(profile: &MissionProfile, result: &MissionResult) -> String {
    let mut out = String::from("t_s,altitude_m,airspeed_mps,segment,status\n");
    for seg in &profile.segments {
        let status = match result.segment_results.get(seg.kind.index()) {
            Some(r) if r.feasible => "ok",
            Some(_) => "failed",
            None => "not_flown",
        };
        let n = seg.duration.floor() as usize;
        let taus = (0..=n).map(|k| k as f64).chain(std::iter::once(seg.duration));
        let mut last = f64::NEG_INFINITY;
        for tau in taus {
            if tau <= last || tau > seg.duration {
                continue;
            }
            last = tau;
            let _ = writeln!(
                out,
                "{},{},{},{},{status}",
                seg.start_time + tau,
                seg.altitude_at(tau),
                seg.horizontal(tau).speed,
                seg.kind
            );
        }
    }
    out
}

/// Figure-data CSVs derived from the fleet report.
pub fn write_figures(dir: &Path, report: &FleetReport) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut energy = String::from("flight_id,range_m,energy_J\n");
    for p in &report.energy_vs_range {
        let _ = writeln!(energy, "{},{},{}", p.flight_id, p.range, p.value);
    }
    let mut voltage = String::from("flight_id,range_m,final_voltage_V\n");
    for p in &report.voltage_vs_range {
        let _ = writeln!(voltage, "{},{},{}", p.flight_id, p.range, p.value);
    }
    let mut c_rate = String::from("segment,mean_c_rate_per_h\n");
    for (k, c) in &report.per_segment_mean_c_rate {
        let _ = writeln!(c_rate, "{k},{c}");
    }
    let mut throttle = String::from("segment,mean_throttle_lift,mean_throttle_fwd\n");
    for (k, t) in &report.per_segment_mean_throttle {
        let _ = writeln!(throttle, "{k},{},{}", t.lift, t.forward);
    }
    write_text(&dir.join("energy_vs_range.csv"), &energy)?;
    write_text(&dir.join("voltage_vs_range.csv"), &voltage)?;
    write_text(&dir.join("segment_c_rate.csv"), &c_rate)?;
    write_text(&dir.join("segment_throttle.csv"), &throttle)
}

/// Human-readable summary of an evaluated run.
pub fn cmd_report(run_dir: &Path) -> Result<String, Error> {
    let (manifest, _) = load_run(
        run_dir,
        &[
            (STAGE_SIMULATE, "run simulate first"),
            (STAGE_DILATE, "run dilate first"),
            (STAGE_EVALUATE, "run evaluate first"),
        ],
    )?;
    let report: FleetReport = crate::read_json(&run_dir.join(EVALUATION).join("report.json"))?;
    Ok(format_report(&manifest, &report))
}

pub fn format_report(manifest: &RunManifest, report: &FleetReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "run {} (config {})", manifest.run_id, &manifest.config_hash[..16]);
    let _ = writeln!(out, "missions: {}", report.n_total);
    let _ = writeln!(out, "feasible: {}", report.n_feasible);
    let _ = writeln!(out, "infeasible: {}", report.n_infeasible);
    for (k, n) in &report.failures_by_segment {
        let _ = writeln!(out, "  failed in {k}: {n}");
    }
    for (r, n) in &report.failures_by_reason {
        let _ = writeln!(out, "  reason {r}: {n}");
    }
    let per_km: Vec<f64> = report
        .energy_vs_range
        .iter()
        .filter(|p| p.range > 0.0)
        .map(|p| joules_to_kwh(p.value) / (p.range / 1000.0))
        .collect();
    if per_km.is_empty() {
        let _ = writeln!(out, "energy per km: no feasible missions");
    } else {
        let mean = per_km.iter().sum::<f64>() / per_km.len() as f64;
        let min = per_km.iter().copied().fold(f64::INFINITY, f64::min);
        let max = per_km.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            out,
            "energy per km (kWh/km, feasible set): mean {mean:.3}, min {min:.3}, max {max:.3}"
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Overrides {
        Overrides {
            seed: Some(3),
            flights: Some(6),
            ..Overrides::default()
        }
    }

    #[test]
    fn stages_refuse_to_run_out_of_order() {
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_dilate(dir.path(), &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("run simulate first"), "{err}");

        cmd_simulate(None, dir.path(), &small()).unwrap();
        let err = cmd_evaluate(dir.path(), 1).unwrap_err();
        assert!(err.to_string().contains("run dilate first"), "{err}");
        let err = cmd_report(dir.path()).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn zero_flights_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let o = Overrides {
            flights: Some(0),
            ..Overrides::default()
        };
        assert!(matches!(cmd_simulate(None, dir.path(), &o), Err(Error::Usage(_))));
    }

    #[test]
    fn tampered_config_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        cmd_simulate(None, dir.path(), &small()).unwrap();
        let path = dir.path().join(CONFIG);
        let text = fs::read_to_string(&path).unwrap().replace("n_flights = 6", "n_flights = 7");
        fs::write(&path, text).unwrap();
        assert!(matches!(cmd_dilate(dir.path(), &Overrides::default()), Err(Error::Invariant(_))));
    }

    #[test]
    fn full_run_and_report() {
        let dir = tempfile::tempdir().unwrap();
        let m = cmd_simulate(None, dir.path(), &small()).unwrap();
        assert_eq!(m.seed, 3);
        let profiles = cmd_dilate(dir.path(), &Overrides::default()).unwrap();
        assert_eq!(profiles.len(), 6);
        let report = cmd_evaluate(dir.path(), 2).unwrap();
        assert_eq!(report.n_total, 6);
        let text = cmd_report(dir.path()).unwrap();
        assert!(text.contains(&format!("infeasible: {}", report.n_infeasible)));
        for f in ["energy_vs_range.csv", "voltage_vs_range.csv", "segment_c_rate.csv", "segment_throttle.csv"] {
            assert!(dir.path().join(EVALUATION).join("figures").join(f).is_file());
        }
    }
}
