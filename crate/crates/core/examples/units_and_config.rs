//! Unit conversion at the boundary and config loading with overrides.
//!
//! `cargo run --example units_and_config -- [config.toml]`

use uamsim::config::{load_config, parse_config};
use uamsim::units::{convert, Quantity, Unit};

fn main() -> Result<(), uamsim::Error> {
    let v = convert(100.662, Unit::MilePerHour, Unit::MeterPerSecond)?;
    println!("100.662 mph = {v:.5} m/s");
    println!("1500 ft     = {:.4} m", convert(1500.0, Unit::Foot, Unit::Meter)?);
    let q: Quantity = "100 ft/min".parse()?;
    println!("{q:?} = {:.5} m/s", q.to_si());

    let cfg = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => parse_config("[sim]\nmin_separation = \"600 m\"\n")?,
    };
    println!("min_separation {} m, lookahead {:.1} s", cfg.sim.min_separation, cfg.sim.lookahead());
    println!("config hash {}", cfg.hash());
    print!("{}", cfg.to_canonical_toml());

    // Invariant violations name the offending field.
    if let Err(e) = parse_config("[sim]\nmin_separation = \"6 km\"\n") {
        println!("rejected: {e}");
    }
    Ok(())
}
