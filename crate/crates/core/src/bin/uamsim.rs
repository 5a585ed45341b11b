use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uamsim::config::ConfigError;
use uamsim::run::{cmd_dilate, cmd_evaluate, cmd_report, cmd_simulate, default_out_dir, format_report, load_run, Overrides};
use uamsim::units::{Quantity, Unit};
use uamsim::Error;

/// Simulate UTM cruise traffic, dilate it into eVTOL missions and evaluate
/// their feasibility.
#[derive(Parser)]
#[command(name = "uamsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunDir {
    /// Run directory [default: $UAMSIM_OUT or ./uamsim-run]
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunDir {
    fn path(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(default_out_dir)
    }
}

#[derive(Args)]
struct Deltas {
    /// Vertical-speed half-width, e.g. "100 ft/min" (bare numbers are m/s)
    #[arg(long = "delta-v", value_parser = speed)]
    delta_v: Option<f64>,
    /// Horizontal-speed half-width, e.g. "15 mph" (bare numbers are m/s)
    #[arg(long = "delta-h", value_parser = speed)]
    delta_h: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the airspace simulation and write one trajectory CSV per flight.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        dir: RunDir,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        flights: Option<usize>,
        #[command(flatten)]
        deltas: Deltas,
    },
    /// Dilate the simulated trajectories into nine-segment mission profiles.
    Dilate {
        #[command(flatten)]
        dir: RunDir,
        #[command(flatten)]
        deltas: Deltas,
    },
    /// Evaluate every mission profile and write the report and figure data.
    Evaluate {
        #[command(flatten)]
        dir: RunDir,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Print a summary of an evaluated run.
    Report {
        #[command(flatten)]
        dir: RunDir,
    },
}

fn speed(s: &str) -> Result<f64, String> {
    let q: Quantity = s.parse().map_err(|e| format!("{e}"))?;
    if q.unit == Unit::One {
        return Ok(q.value);
    }
    q.in_unit(Unit::MeterPerSecond).map_err(|e| format!("{e}"))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Units(_) => 1,
        Error::Io { .. } | Error::Format { .. } => 2,
        Error::Config(ConfigError::Io { .. } | ConfigError::Parse(_) | ConfigError::Field { .. }) => 2,
        Error::Config(ConfigError::Invariant { .. }) | Error::Invariant(_) | Error::Sim(_) | Error::Dilation(_) => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate {
            config,
            dir,
            seed,
            flights,
            deltas,
        } => {
            let out = dir.path();
            let overrides = Overrides {
                seed,
                flights,
                delta_vertical: deltas.delta_v,
                delta_horizontal: deltas.delta_h,
            };
            let m = cmd_simulate(config.as_deref(), &out, &overrides)?;
            println!(
                "simulated {} flights into {} (config {})",
                flights.map_or_else(|| "configured".into(), |n| n.to_string()),
                out.display(),
                &m.config_hash[..16]
            );
        }
        Command::Dilate { dir, deltas } => {
            let out = dir.path();
            let overrides = Overrides {
                delta_vertical: deltas.delta_v,
                delta_horizontal: deltas.delta_h,
                ..Overrides::default()
            };
            let profiles = cmd_dilate(&out, &overrides)?;
            println!("dilated {} mission profiles in {}", profiles.len(), out.display());
        }
        Command::Evaluate { dir, jobs } => {
            let out = dir.path();
            let report = cmd_evaluate(&out, jobs)?;
            print!("{}", report.feasibility_table());
            let (manifest, _) = load_run(&out, &[])?;
            print!("{}", format_report(&manifest, &report));
        }
        Command::Report { dir } => {
            print!("{}", cmd_report(&dir.path())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
