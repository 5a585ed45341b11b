//! Power required across the hover-to-wingborne transition and a constant-power battery drain.
//!
//! `cargo run --example powertrain_hover`

use uamsim::powertrain::{battery_step, joules_to_kwh, power_required, wing_lift_fraction, BatteryState, FlightCondition};
use uamsim::Config;

fn main() {
    let v = Config::default().vehicle;
    let m = v.max_takeoff_mass;
    println!("{:>8} {:>6} {:>10} {:>10} {:>7} {:>7}", "v m/s", "f", "lift kW", "fwd kW", "thr L", "thr F");
    for i in 0..=10 {
        let speed = v.transition_speed() * i as f64 / 8.0;
        let p = power_required(
            &FlightCondition {
                horizontal_speed: speed,
                ..FlightCondition::hover(m)
            },
            &v,
        );
        println!(
            "{speed:>8.2} {:>6.3} {:>10.1} {:>10.1} {:>7.3} {:>7.3}",
            wing_lift_fraction(speed, &v),
            p.lift_rotor_power / 1e3,
            p.forward_motor_power / 1e3,
            p.lift_throttle,
            p.forward_throttle
        );
    }

    let hover = power_required(&FlightCondition::hover(m), &v).total();
    let mut b = BatteryState::full(&v);
    for _ in 0..120 {
        b = battery_step(&b, hover, 0.5, &v);
    }
    println!(
        "60 s hover at {:.1} kW: used {:.3} kWh, {:.1} V under load, {:.0} A, C-rate {:.2}/h",
        hover / 1e3,
        joules_to_kwh(b.energy_used()),
        b.voltage_under_load,
        b.current,
        b.c_rate
    );
}
