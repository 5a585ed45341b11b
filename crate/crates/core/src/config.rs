//! Validated configuration for the three pipeline stages.
//!
//! The on-disk format is TOML with four sections (`sim`, `vehicle`,
//! `mission`, `bounds`) plus an optional `evaluator` section. Every numeric
//! field is either a bare number in SI units or a string with a unit suffix,
//! e.g. `max_speed = "100.662 mph"`. Absent fields keep their defaults; see
//! `docs/config.md` for the full schema.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dilation::{DilationBounds, MissionSpec};
use crate::units::{Dimension, Quantity, Unit, UnitError, FOOT, FPM, HOUR, MPH, POUND, STANDARD_GRAVITY};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("[{section}] {field}: {message}")]
    Field {
        section: String,
        field: String,
        message: String,
    },
    #[error("invariant violated for `{field}`: {message}")]
    Invariant { field: String, message: String },
}

fn invariant(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invariant {
        field: field.to_string(),
        message: message.into(),
    }
}

/// UTM simulator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Side of the square operational area [m].
    pub area_side: f64,
    pub min_separation: f64,
    pub sensing_radius: f64,
    pub max_speed: f64,
    pub tick: f64,
    pub rng_seed: u64,
    pub n_flights: usize,
    /// Poisson departure-request rate [flights/s].
    pub arrival_rate: f64,
    pub min_od_distance: f64,
    /// Resolution target as a multiple of `min_separation`.
    pub resolution_margin: f64,
    /// Simulated-time guard for `run_scenario` [s].
    pub horizon: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            area_side: 50_000.0,
            min_separation: 500.0,
            sensing_radius: 5_000.0,
            max_speed: 100.662 * MPH,
            tick: 1.0,
            rng_seed: 42,
            n_flights: 262,
            arrival_rate: 0.05,
            min_od_distance: 5_000.0,
            resolution_margin: 1.05,
            horizon: 200_000.0,
        }
    }
}

impl SimConfig {
    /// Conflict-detection lookahead: time to cross the sensing radius at max speed.
    pub fn lookahead(&self) -> f64 {
        self.sensing_radius / self.max_speed
    }

    pub fn arrival_threshold(&self) -> f64 {
        self.max_speed * self.tick
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("sim.area_side", self.area_side)?;
        positive("sim.min_separation", self.min_separation)?;
        positive("sim.max_speed", self.max_speed)?;
        positive("sim.tick", self.tick)?;
        positive("sim.arrival_rate", self.arrival_rate)?;
        positive("sim.horizon", self.horizon)?;
        if self.min_separation >= self.sensing_radius {
            return Err(invariant(
                "sim.min_separation",
                format!(
                    "must be below sensing_radius ({} m >= {} m)",
                    self.min_separation, self.sensing_radius
                ),
            ));
        }
        if self.min_od_distance < 0.0 || self.min_od_distance >= self.area_side {
            return Err(invariant(
                "sim.min_od_distance",
                "must lie in [0, area_side)",
            ));
        }
        if self.resolution_margin < 1.0 {
            return Err(invariant("sim.resolution_margin", "must be >= 1"));
        }
        Ok(())
    }
}

/// Lift+cruise vehicle parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleConfig {
    pub max_takeoff_mass: f64,
    pub max_payload_mass: f64,
    pub reference_area: f64,
    pub n_lift_motors: u32,
    pub n_cruise_motors: u32,
    pub battery_max_voltage: f64,
    /// [J/kg]
    pub battery_specific_energy: f64,
    pub battery_mass: f64,
    pub battery_internal_resistance: f64,
    pub v_stall: f64,
    pub design_speed: f64,
    pub rotor_radius: f64,
    pub figure_of_merit: f64,
    pub lift_to_drag: f64,
    pub powertrain_efficiency: f64,
    /// Per lift motor [W].
    pub max_motor_power_lift: f64,
    /// Per cruise motor [W].
    pub max_motor_power_cruise: f64,
    /// Maximum thrust of the forward propulsor group [N].
    pub max_forward_thrust: f64,
    /// [1/h]
    pub max_c_rate: f64,
    pub min_voltage: f64,
}

impl Default for VehicleConfig {
    fn default() -> Self {
        Self {
            max_takeoff_mass: 2450.0 * POUND,
            max_payload_mass: 200.0 * POUND,
            reference_area: 10.76,
            n_lift_motors: 12,
            n_cruise_motors: 1,
            battery_max_voltage: 500.0,
            battery_specific_energy: 300.0 * HOUR,
            battery_mass: 300.0,
            battery_internal_resistance: 0.05,
            v_stall: 84.28 * MPH,
            design_speed: 111.847 * MPH,
            rotor_radius: 0.8,
            figure_of_merit: 0.75,
            lift_to_drag: 12.0,
            powertrain_efficiency: 0.9,
            max_motor_power_lift: 25_000.0,
            max_motor_power_cruise: 150_000.0,
            max_forward_thrust: 4_500.0,
            max_c_rate: 4.0,
            min_voltage: 400.0,
        }
    }
}

impl VehicleConfig {
    pub fn weight(&self) -> f64 {
        self.max_takeoff_mass * STANDARD_GRAVITY
    }

    /// Speed at which the wing carries the full weight (1.2 v_stall).
    pub fn transition_speed(&self) -> f64 {
        1.2 * self.v_stall
    }

    pub fn total_disk_area(&self) -> f64 {
        f64::from(self.n_lift_motors) * std::f64::consts::PI * self.rotor_radius.powi(2)
    }

    pub fn lift_group_max_power(&self) -> f64 {
        f64::from(self.n_lift_motors) * self.max_motor_power_lift
    }

    pub fn cruise_group_max_power(&self) -> f64 {
        f64::from(self.n_cruise_motors) * self.max_motor_power_cruise
    }

    /// Pack energy [J].
    pub fn battery_capacity(&self) -> f64 {
        self.battery_mass * self.battery_specific_energy
    }

    /// Pack charge rating [Ah], referenced to the maximum voltage.
    pub fn battery_capacity_ah(&self) -> f64 {
        self.battery_capacity() / HOUR / self.battery_max_voltage
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (field, v) in [
            ("vehicle.max_takeoff_mass", self.max_takeoff_mass),
            ("vehicle.max_payload_mass", self.max_payload_mass),
            ("vehicle.reference_area", self.reference_area),
            ("vehicle.battery_max_voltage", self.battery_max_voltage),
            ("vehicle.battery_specific_energy", self.battery_specific_energy),
            ("vehicle.battery_mass", self.battery_mass),
            ("vehicle.v_stall", self.v_stall),
            ("vehicle.rotor_radius", self.rotor_radius),
            ("vehicle.lift_to_drag", self.lift_to_drag),
            ("vehicle.max_motor_power_lift", self.max_motor_power_lift),
            ("vehicle.max_motor_power_cruise", self.max_motor_power_cruise),
            ("vehicle.max_forward_thrust", self.max_forward_thrust),
            ("vehicle.max_c_rate", self.max_c_rate),
            ("vehicle.min_voltage", self.min_voltage),
        ] {
            positive(field, v)?;
        }
        if self.battery_internal_resistance < 0.0 {
            return Err(invariant("vehicle.battery_internal_resistance", "must be >= 0"));
        }
        if self.n_lift_motors == 0 || self.n_cruise_motors == 0 {
            return Err(invariant("vehicle.n_lift_motors", "motor counts must be >= 1"));
        }
        if !(self.figure_of_merit > 0.0 && self.figure_of_merit <= 1.0) {
            return Err(invariant("vehicle.figure_of_merit", "must lie in (0, 1]"));
        }
        if !(self.powertrain_efficiency > 0.0 && self.powertrain_efficiency <= 1.0) {
            return Err(invariant("vehicle.powertrain_efficiency", "must lie in (0, 1]"));
        }
        if self.v_stall >= self.design_speed {
            return Err(invariant("vehicle.v_stall", "must be below design_speed"));
        }
        if self.min_voltage >= self.battery_max_voltage {
            return Err(invariant("vehicle.min_voltage", "must be below battery_max_voltage"));
        }
        Ok(())
    }
}

/// Settings for the feasibility evaluator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatorConfig {
    pub sample_step: f64,
    /// Cap on achievable horizontal acceleration [m/s^2].
    pub accel_cap: f64,
    /// Fraction of capacity that must remain at the end of every sample.
    pub reserve_fraction: f64,
}

impl Default for EvaluatorConfig {
    fn default() -> Self {
        Self {
            sample_step: 0.5,
            accel_cap: 0.3 * STANDARD_GRAVITY,
            reserve_fraction: 0.0,
        }
    }
}

impl EvaluatorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("evaluator.sample_step", self.sample_step)?;
        positive("evaluator.accel_cap", self.accel_cap)?;
        if !(0.0..1.0).contains(&self.reserve_fraction) {
            return Err(invariant("evaluator.reserve_fraction", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Mission-shape knobs that are not part of the per-segment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionSettings {
    pub cruise_altitude: f64,
    /// Duration of each terminal-area procedure segment [s].
    pub terminal_duration: f64,
    /// Time allowed for a procedure segment to capture its commanded speed [s].
    pub capture_time: f64,
}

impl Default for MissionSettings {
    fn default() -> Self {
        Self {
            cruise_altitude: 1500.0 * FOOT,
            terminal_duration: 60.0,
            capture_time: 1.0,
        }
    }
}

impl MissionSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cruise_altitude <= 300.0 * FOOT {
            return Err(invariant(
                "mission.cruise_altitude",
                "must be above the 300 ft terminal-procedure altitude",
            ));
        }
        positive("mission.terminal_duration", self.terminal_duration)?;
        positive("mission.capture_time", self.capture_time)?;
        if self.capture_time >= self.terminal_duration {
            return Err(invariant(
                "mission.capture_time",
                "must be shorter than terminal_duration",
            ));
        }
        Ok(())
    }
}

/// Half-widths of the randomization interval around each tabulated speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSettings {
    pub delta_vertical: f64,
    pub delta_horizontal: f64,
    pub rng_seed: u64,
}

impl Default for BoundsSettings {
    fn default() -> Self {
        Self {
            delta_vertical: 100.0 * FPM,
            delta_horizontal: 15.0 * MPH,
            rng_seed: 7,
        }
    }
}

/// Everything a run needs, as loaded from one config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Config {
    pub sim: SimConfig,
    pub vehicle: VehicleConfig,
    pub mission: MissionSettings,
    pub bounds: BoundsSettings,
    pub evaluator: EvaluatorConfig,
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sim.validate()?;
        self.vehicle.validate()?;
        self.mission.validate()?;
        self.evaluator.validate()?;
        self.dilation_bounds().validate(&self.mission_spec())?;
        Ok(())
    }

    /// Baseline segment table with the `1.2 v_stall` cells resolved against this vehicle.
    pub fn mission_spec(&self) -> MissionSpec {
        MissionSpec::baseline(&self.vehicle, &self.mission)
    }

    pub fn dilation_bounds(&self) -> DilationBounds {
        DilationBounds {
            delta_vertical: self.bounds.delta_vertical,
            delta_horizontal: self.bounds.delta_horizontal,
            rng_seed: self.bounds.rng_seed,
        }
    }

    /// Canonical SI text form; plain numbers, so it reloads through [`parse_config`].
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.to_canonical_toml().as_bytes()))
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invariant(field, format!("must be positive and finite, got {v}")))
    }
}

/// Reads and validates a config file. An empty file yields all defaults.
pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let mut cfg = Config::default();

    for (name, value) in &table {
        let section = value.as_table().ok_or_else(|| ConfigError::Field {
            section: name.clone(),
            field: String::new(),
            message: "expected a [section] table".into(),
        })?;
        let mut s = Section { name, table: section };
        match name.as_str() {
            "sim" => s.apply_sim(&mut cfg.sim)?,
            "vehicle" => s.apply_vehicle(&mut cfg.vehicle)?,
            "mission" => s.apply_mission(&mut cfg.mission)?,
            "bounds" => s.apply_bounds(&mut cfg.bounds)?,
            "evaluator" => s.apply_evaluator(&mut cfg.evaluator)?,
            other => {
                return Err(ConfigError::Field {
                    section: other.to_string(),
                    field: String::new(),
                    message: "unknown section".into(),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Section<'a> {
    name: &'a str,
    table: &'a toml::Table,
}

impl Section<'_> {
    fn err(&self, field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Field {
            section: self.name.to_string(),
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn check_known(&self, known: &[&str]) -> Result<(), ConfigError> {
        match self.table.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(self.err(k, "unknown field")),
            None => Ok(()),
        }
    }

    /// A quantity in SI, accepting a bare number (already SI) or a suffixed string.
    fn quantity(&self, field: &str, dim: Dimension, slot: &mut f64) -> Result<(), ConfigError> {
        let Some(v) = self.table.get(field) else {
            return Ok(());
        };
        let si = match v {
            toml::Value::Integer(i) => *i as f64,
            toml::Value::Float(f) => *f,
            toml::Value::String(s) => {
                let q: Quantity = s
                    .parse()
                    .map_err(|e: UnitError| self.err(field, e.to_string()))?;
                if q.unit == Unit::One {
                    q.value
                } else if q.dimension() != dim {
                    return Err(self.err(
                        field,
                        format!("expected a {dim:?} quantity, got unit `{}`", q.unit),
                    ));
                } else {
                    q.to_si()
                }
            }
            other => return Err(self.err(field, format!("expected a number, got {}", other.type_str()))),
        };
        *slot = si;
        Ok(())
    }

    fn scalar(&self, field: &str, slot: &mut f64) -> Result<(), ConfigError> {
        self.quantity(field, Dimension::Dimensionless, slot)
    }

    fn integer<T: TryFrom<i64>>(&self, field: &str, slot: &mut T) -> Result<(), ConfigError> {
        let Some(v) = self.table.get(field) else {
            return Ok(());
        };
        let i = v
            .as_integer()
            .ok_or_else(|| self.err(field, "expected an integer"))?;
        *slot = T::try_from(i).map_err(|_| self.err(field, format!("out of range: {i}")))?;
        Ok(())
    }

    fn apply_sim(&mut self, c: &mut SimConfig) -> Result<(), ConfigError> {
        use Dimension::*;
        self.check_known(&[
            "area_side",
            "min_separation",
            "sensing_radius",
            "max_speed",
            "tick",
            "rng_seed",
            "n_flights",
            "arrival_rate",
            "min_od_distance",
            "resolution_margin",
            "horizon",
        ])?;
        self.quantity("area_side", Length, &mut c.area_side)?;
        self.quantity("min_separation", Length, &mut c.min_separation)?;
        self.quantity("sensing_radius", Length, &mut c.sensing_radius)?;
        self.quantity("max_speed", Speed, &mut c.max_speed)?;
        self.quantity("tick", Time, &mut c.tick)?;
        self.integer("rng_seed", &mut c.rng_seed)?;
        self.integer("n_flights", &mut c.n_flights)?;
        self.scalar("arrival_rate", &mut c.arrival_rate)?;
        self.quantity("min_od_distance", Length, &mut c.min_od_distance)?;
        self.scalar("resolution_margin", &mut c.resolution_margin)?;
        self.quantity("horizon", Time, &mut c.horizon)?;
        Ok(())
    }

    fn apply_vehicle(&mut self, c: &mut VehicleConfig) -> Result<(), ConfigError> {
        use Dimension::*;
        self.check_known(&[
            "max_takeoff_mass",
            "max_payload_mass",
            "reference_area",
            "n_lift_motors",
            "n_cruise_motors",
            "battery_max_voltage",
            "battery_specific_energy",
            "battery_mass",
            "battery_internal_resistance",
            "v_stall",
            "design_speed",
            "rotor_radius",
            "figure_of_merit",
            "lift_to_drag",
            "powertrain_efficiency",
            "max_motor_power_lift",
            "max_motor_power_cruise",
            "max_forward_thrust",
            "max_c_rate",
            "min_voltage",
        ])?;
        self.quantity("max_takeoff_mass", Mass, &mut c.max_takeoff_mass)?;
        self.quantity("max_payload_mass", Mass, &mut c.max_payload_mass)?;
        self.quantity("reference_area", Area, &mut c.reference_area)?;
        self.integer("n_lift_motors", &mut c.n_lift_motors)?;
        self.integer("n_cruise_motors", &mut c.n_cruise_motors)?;
        self.quantity("battery_max_voltage", Voltage, &mut c.battery_max_voltage)?;
        self.quantity("battery_specific_energy", SpecificEnergy, &mut c.battery_specific_energy)?;
        self.quantity("battery_mass", Mass, &mut c.battery_mass)?;
        self.scalar("battery_internal_resistance", &mut c.battery_internal_resistance)?;
        self.quantity("v_stall", Speed, &mut c.v_stall)?;
        self.quantity("design_speed", Speed, &mut c.design_speed)?;
        self.quantity("rotor_radius", Length, &mut c.rotor_radius)?;
        self.scalar("figure_of_merit", &mut c.figure_of_merit)?;
        self.scalar("lift_to_drag", &mut c.lift_to_drag)?;
        self.scalar("powertrain_efficiency", &mut c.powertrain_efficiency)?;
        self.quantity("max_motor_power_lift", Power, &mut c.max_motor_power_lift)?;
        self.quantity("max_motor_power_cruise", Power, &mut c.max_motor_power_cruise)?;
        self.quantity("max_forward_thrust", Force, &mut c.max_forward_thrust)?;
        self.scalar("max_c_rate", &mut c.max_c_rate)?;
        self.quantity("min_voltage", Voltage, &mut c.min_voltage)?;
        Ok(())
    }

    fn apply_mission(&mut self, c: &mut MissionSettings) -> Result<(), ConfigError> {
        use Dimension::*;
        self.check_known(&["cruise_altitude", "terminal_duration", "capture_time"])?;
        self.quantity("cruise_altitude", Length, &mut c.cruise_altitude)?;
        self.quantity("terminal_duration", Time, &mut c.terminal_duration)?;
        self.quantity("capture_time", Time, &mut c.capture_time)?;
        Ok(())
    }

    fn apply_bounds(&mut self, c: &mut BoundsSettings) -> Result<(), ConfigError> {
        use Dimension::*;
        self.check_known(&["delta_vertical", "delta_horizontal", "rng_seed"])?;
        self.quantity("delta_vertical", Speed, &mut c.delta_vertical)?;
        self.quantity("delta_horizontal", Speed, &mut c.delta_horizontal)?;
        self.integer("rng_seed", &mut c.rng_seed)?;
        Ok(())
    }

    fn apply_evaluator(&mut self, c: &mut EvaluatorConfig) -> Result<(), ConfigError> {
        use Dimension::*;
        self.check_known(&["sample_step", "accel_cap", "reserve_fraction"])?;
        self.quantity("sample_step", Time, &mut c.sample_step)?;
        self.quantity("accel_cap", Acceleration, &mut c.accel_cap)?;
        self.scalar("reserve_fraction", &mut c.reserve_fraction)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_table_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, Config::default());
        assert_eq!(cfg.sim.area_side, 50_000.0);
        assert_eq!(cfg.sim.min_separation, 500.0);
        assert_eq!(cfg.sim.sensing_radius, 5_000.0);
        assert!((cfg.sim.max_speed - 44.999).abs() < 1e-3);
        assert!((cfg.vehicle.max_takeoff_mass - 1111.30).abs() < 0.01);
        assert!((cfg.vehicle.max_payload_mass - 90.718).abs() < 0.001);
        assert_eq!(cfg.vehicle.n_lift_motors, 12);
        assert_eq!(cfg.vehicle.n_cruise_motors, 1);
        assert_eq!(cfg.vehicle.battery_max_voltage, 500.0);
        assert!((cfg.vehicle.battery_capacity() - 90_000.0 * HOUR).abs() < 1e-6);
        assert!((cfg.mission.cruise_altitude - 457.2).abs() < 1e-9);
    }

    #[test]
    fn passthrough_override() {
        let cfg = parse_config("[sim]\nmin_separation = 600\n").unwrap();
        assert_eq!(cfg.sim.min_separation, 600.0);
        let cfg = parse_config("[sim]\nmin_separation = \"0.6 km\"\n").unwrap();
        assert!((cfg.sim.min_separation - 600.0).abs() < 1e-9);
    }

    #[test]
    fn unit_suffixes() {
        let cfg = parse_config(
            "[mission]\ncruise_altitude = \"2000 ft\"\n[bounds]\ndelta_horizontal = \"10 mph\"\n",
        )
        .unwrap();
        assert!((cfg.mission.cruise_altitude - 609.6).abs() < 1e-9);
        assert!((cfg.bounds.delta_horizontal - 4.4704).abs() < 1e-9);
    }

    #[test]
    fn separation_above_sensing_radius_is_rejected() {
        let err = parse_config("[sim]\nmin_separation = 6000\n").unwrap_err();
        match err {
            ConfigError::Invariant { field, .. } => assert_eq!(field, "sim.min_separation"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_line() {
        let err = parse_config("[sim]\n\nmin_separation = = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn wrong_dimension_names_field() {
        let err = parse_config("[sim]\nmax_speed = \"40 ft\"\n").unwrap_err();
        assert!(err.to_string().contains("max_speed"), "{err}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(parse_config("[vehicle]\nwingspan = 3\n").is_err());
        assert!(parse_config("[weather]\nwind = 3\n").is_err());
    }

    #[test]
    fn canonical_text_reloads_identically() {
        let mut cfg = Config::default();
        cfg.sim.n_flights = 17;
        cfg.bounds.delta_vertical = 0.0;
        let again = parse_config(&cfg.to_canonical_toml()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.hash(), cfg.hash());
    }
}
