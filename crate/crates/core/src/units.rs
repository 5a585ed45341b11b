//! Unit handling for the handful of dimensions the pipeline needs.
//!
//! Everything inside the crate is SI. Imperial units (ft, ft/min, mph, lb)
//! only appear when a value is parsed from a config file or printed for a
//! human, which is why conversion lives here and nowhere else.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FOOT: f64 = 0.3048;
pub const MILE: f64 = 1609.344;
pub const POUND: f64 = 0.453_592_37;
pub const HOUR: f64 = 3600.0;
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// mph to m/s.
pub const MPH: f64 = MILE / HOUR;
/// ft/min to m/s.
pub const FPM: f64 = FOOT / 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Length,
    Speed,
    Mass,
    Force,
    Power,
    Energy,
    SpecificEnergy,
    Voltage,
    Current,
    Time,
    Area,
    Acceleration,
    Dimensionless,
}

/// Unit tags accepted at the parse/serialize boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    Meter,
    Kilometer,
    Foot,
    Mile,
    MeterPerSecond,
    KilometerPerHour,
    MilePerHour,
    FootPerMinute,
    Knot,
    Kilogram,
    Pound,
    Newton,
    Watt,
    Kilowatt,
    Joule,
    Megajoule,
    WattHour,
    KilowattHour,
    WattHourPerKilogram,
    JoulePerKilogram,
    Volt,
    Ampere,
    Second,
    Minute,
    Hour,
    SquareMeter,
    SquareFoot,
    Gee,
    MeterPerSecondSquared,
    One,
}

#[derive(Debug, Error, PartialEq)]
pub enum UnitError {
    #[error("cannot convert {from:?} ({from_dim:?}) to {to:?} ({to_dim:?})")]
    DimensionMismatch {
        from: Unit,
        to: Unit,
        from_dim: Dimension,
        to_dim: Dimension,
    },
    #[error("unknown unit suffix `{0}`")]
    UnknownUnit(String),
    #[error("malformed quantity `{0}`")]
    Malformed(String),
}

impl Unit {
    pub const ALL: [Unit; 30] = [
        Unit::Meter,
        Unit::Kilometer,
        Unit::Foot,
        Unit::Mile,
        Unit::MeterPerSecond,
        Unit::KilometerPerHour,
        Unit::MilePerHour,
        Unit::FootPerMinute,
        Unit::Knot,
        Unit::Kilogram,
        Unit::Pound,
        Unit::Newton,
        Unit::Watt,
        Unit::Kilowatt,
        Unit::Joule,
        Unit::Megajoule,
        Unit::WattHour,
        Unit::KilowattHour,
        Unit::WattHourPerKilogram,
        Unit::JoulePerKilogram,
        Unit::Volt,
        Unit::Ampere,
        Unit::Second,
        Unit::Minute,
        Unit::Hour,
        Unit::SquareMeter,
        Unit::SquareFoot,
        Unit::Gee,
        Unit::MeterPerSecondSquared,
        Unit::One,
    ];

    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Meter | Kilometer | Foot | Mile => Dimension::Length,
            MeterPerSecond | KilometerPerHour | MilePerHour | FootPerMinute | Knot => {
                Dimension::Speed
            }
            Kilogram | Pound => Dimension::Mass,
            Newton => Dimension::Force,
            Watt | Kilowatt => Dimension::Power,
            Joule | Megajoule | WattHour | KilowattHour => Dimension::Energy,
            WattHourPerKilogram | JoulePerKilogram => Dimension::SpecificEnergy,
            Volt => Dimension::Voltage,
            Ampere => Dimension::Current,
            Second | Minute | Hour => Dimension::Time,
            SquareMeter | SquareFoot => Dimension::Area,
            Gee | MeterPerSecondSquared => Dimension::Acceleration,
            One => Dimension::Dimensionless,
        }
    }

    /// Multiplier taking a value in this unit to the SI base unit.
    pub fn si_factor(self) -> f64 {
        use Unit::*;
        match self {
            Meter => 1.0,
            Kilometer => 1000.0,
            Foot => FOOT,
            Mile => MILE,
            MeterPerSecond => 1.0,
            KilometerPerHour => 1000.0 / HOUR,
            MilePerHour => MPH,
            FootPerMinute => FPM,
            Knot => 1852.0 / HOUR,
            Kilogram => 1.0,
            Pound => POUND,
            Newton => 1.0,
            Watt => 1.0,
            Kilowatt => 1000.0,
            Joule => 1.0,
            Megajoule => 1.0e6,
            WattHour => HOUR,
            KilowattHour => 1000.0 * HOUR,
            WattHourPerKilogram => HOUR,
            JoulePerKilogram => 1.0,
            Volt => 1.0,
            Ampere => 1.0,
            Second => 1.0,
            Minute => 60.0,
            Hour => HOUR,
            SquareMeter => 1.0,
            SquareFoot => FOOT * FOOT,
            Gee => STANDARD_GRAVITY,
            MeterPerSecondSquared => 1.0,
            One => 1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        use Unit::*;
        match self {
            Meter => "m",
            Kilometer => "km",
            Foot => "ft",
            Mile => "mi",
            MeterPerSecond => "m/s",
            KilometerPerHour => "km/h",
            MilePerHour => "mph",
            FootPerMinute => "ft/min",
            Knot => "kt",
            Kilogram => "kg",
            Pound => "lb",
            Newton => "N",
            Watt => "W",
            Kilowatt => "kW",
            Joule => "J",
            Megajoule => "MJ",
            WattHour => "Wh",
            KilowattHour => "kWh",
            WattHourPerKilogram => "Wh/kg",
            JoulePerKilogram => "J/kg",
            Volt => "V",
            Ampere => "A",
            Second => "s",
            Minute => "min",
            Hour => "h",
            SquareMeter => "m2",
            SquareFoot => "ft2",
            Gee => "g",
            MeterPerSecondSquared => "m/s2",
            One => "",
        }
    }

    pub fn from_symbol(s: &str) -> Result<Unit, UnitError> {
        use Unit::*;
        let unit = match s {
            "m" => Meter,
            "km" => Kilometer,
            "ft" => Foot,
            "mi" => Mile,
            "m/s" | "mps" => MeterPerSecond,
            "km/h" | "kph" => KilometerPerHour,
            "mph" => MilePerHour,
            "ft/min" | "fpm" => FootPerMinute,
            "kt" | "kts" => Knot,
            "kg" => Kilogram,
            "lb" | "lbs" => Pound,
            "N" => Newton,
            "W" => Watt,
            "kW" => Kilowatt,
            "J" => Joule,
            "MJ" => Megajoule,
            "Wh" => WattHour,
            "kWh" => KilowattHour,
            "Wh/kg" => WattHourPerKilogram,
            "J/kg" => JoulePerKilogram,
            "V" => Volt,
            "A" => Ampere,
            "s" => Second,
            "min" => Minute,
            "h" => Hour,
            "m2" | "m^2" | "m²" => SquareMeter,
            "ft2" | "ft^2" | "ft²" => SquareFoot,
            "g" => Gee,
            "m/s2" | "m/s^2" | "m/s²" => MeterPerSecondSquared,
            "" => One,
            other => return Err(UnitError::UnknownUnit(other.to_string())),
        };
        Ok(unit)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Converts `value` between two units of the same dimension.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64, UnitError> {
    if from.dimension() != to.dimension() {
        return Err(UnitError::DimensionMismatch {
            from,
            to,
            from_dim: from.dimension(),
            to_dim: to.dimension(),
        });
    }
    if from == to {
        return Ok(value);
    }
    Ok(value * from.si_factor() / to.si_factor())
}

/// A scalar tagged with the unit it was written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    pub fn to_si(&self) -> f64 {
        self.value * self.unit.si_factor()
    }

    pub fn in_unit(&self, unit: Unit) -> Result<f64, UnitError> {
        convert(self.value, self.unit, unit)
    }
}

impl FromStr for Quantity {
    type Err = UnitError;

    /// Parses `"1500 ft"`, `"100.662mph"` or a bare number (unit `One`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let split = s
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_digit()
                    || c == '.'
                    || c == '_'
                    || ((c == '-' || c == '+')
                        && (i == 0 || matches!(s.as_bytes()[i - 1], b'e' | b'E')))
                    || ((c == 'e' || c == 'E')
                        && i > 0
                        && s.as_bytes()[i - 1].is_ascii_digit()
                        && s[i + 1..]
                            .chars()
                            .next()
                            .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+')))
            })
            .map(|(i, _)| i)
            .unwrap_or(s.len());
        let (number, suffix) = s.split_at(split);
        let value: f64 = number
            .replace('_', "")
            .parse()
            .map_err(|_| UnitError::Malformed(s.to_string()))?;
        let unit = Unit::from_symbol(suffix.trim())?;
        Ok(Quantity { value, unit })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Unit::One => write!(f, "{}", self.value),
            u => write!(f, "{} {}", self.value, u),
        }
    }
}
