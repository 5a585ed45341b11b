//! Trajectory CSV files and the scenario manifest.
//!
//! One CSV per flight with header `x_m,y_m,vx_mps,vy_mps,t_s`. Floats are
//! written in shortest round-trip form so a read-back is bit-exact.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Agent, Trajectory2D, TrajectoryPoint};
use crate::Error;

pub const TRAJECTORY_HEADER: &str = "x_m,y_m,vx_mps,vy_mps,t_s";

pub fn trajectory_file_name(flight_id: u32) -> String {
    format!("flight_{flight_id:04}.csv")
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory2D) -> Result<(), Error> {
    let mut out = String::with_capacity(traj.points.len() * 64);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for p in &traj.points {
        out.push_str(&format!("{},{},{},{},{}\n", p.x, p.y, p.vx, p.vy, p.t));
    }
    fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

pub fn read_trajectory_csv(path: &Path, flight_id: u32) -> Result<Trajectory2D, Error> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::csv(path, &e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, &e))?.clone();
    if headers.iter().collect::<Vec<_>>().join(",") != TRAJECTORY_HEADER {
        return Err(Error::Format {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected header `{TRAJECTORY_HEADER}`"),
        });
    }
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, &e))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| Error::Format {
            path: path.display().to_string(),
            line,
            message,
        };
        if record.len() != 5 {
            return Err(bad(format!("expected 5 fields, found {}", record.len())));
        }
        let mut v = [0.0; 5];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("not a number: `{field}`")))?;
        }
        points.push(TrajectoryPoint::new(v[0], v[1], v[2], v[3], v[4]));
    }
    Ok(Trajectory2D { flight_id, points })
}

/// One entry per flight in the scenario manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightRecord {
    pub flight_id: u32,
    pub origin: [f64; 2],
    pub destination: [f64; 2],
    pub requested_departure: f64,
    pub departure_time: f64,
    pub arrival_time: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioManifest {
    pub seed: u64,
    pub config_hash: String,
    pub flights: Vec<FlightRecord>,
}

impl ScenarioManifest {
    pub fn new(seed: u64, config_hash: String, agents: &[Agent], trajs: &[Trajectory2D]) -> Self {
        let flights = agents
            .iter()
            .zip(trajs)
            .map(|(a, t)| FlightRecord {
                flight_id: a.id,
                origin: a.origin,
                destination: a.destination,
                requested_departure: a.requested_departure,
                departure_time: t.points.first().map_or(f64::NAN, |p| p.t),
                arrival_time: t.points.last().map_or(f64::NAN, |p| p.t),
                file: trajectory_file_name(a.id),
            })
            .collect();
        Self {
            seed,
            config_hash,
            flights,
        }
    }
}

pub const SCENARIO_MANIFEST: &str = "scenario.json";

/// Writes every trajectory plus `scenario.json` into `dir`.
pub fn write_scenario(dir: &Path, manifest: &ScenarioManifest, trajs: &[Trajectory2D]) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::with_capacity(trajs.len() + 1);
    for t in trajs {
        let path = dir.join(trajectory_file_name(t.flight_id));
        write_trajectory_csv(&path, t)?;
        written.push(path);
    }
    let path = dir.join(SCENARIO_MANIFEST);
    crate::write_json(&path, manifest)?;
    written.push(path);
    Ok(written)
}

/// Reads `scenario.json` and every trajectory it lists.
pub fn read_scenario(dir: &Path) -> Result<(ScenarioManifest, Vec<Trajectory2D>), Error> {
    let manifest: ScenarioManifest = crate::read_json(&dir.join(SCENARIO_MANIFEST))?;
    let trajs = manifest
        .flights
        .iter()
        .map(|f| read_trajectory_csv(&dir.join(&f.file), f.flight_id))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((manifest, trajs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(pts in prop::collection::vec(
            (-1e5f64..1e5, -1e5f64..1e5, -50f64..50.0, -50f64..50.0, 0f64..1e6), 1..40)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.csv");
            let traj = Trajectory2D {
                flight_id: 3,
                points: pts.iter().map(|&(x, y, vx, vy, t)| TrajectoryPoint::new(x, y, vx, vy, t)).collect(),
            };
            write_trajectory_csv(&path, &traj).unwrap();
            let back = read_trajectory_csv(&path, 3).unwrap();
            prop_assert_eq!(back, traj);
        }
    }

    #[test]
    fn corrupted_row_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flight_0001.csv");
        fs::write(&path, "x_m,y_m,vx_mps,vy_mps,t_s\n1,2,3,4,5\n1,2,oops,4,6\n").unwrap();
        let err = read_trajectory_csv(&path, 1).unwrap_err().to_string();
        assert!(err.contains("flight_0001.csv"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn wrong_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        fs::write(&path, "x,y,vx,vy,t\n1,2,3,4,5\n").unwrap();
        assert!(read_trajectory_csv(&path, 0).is_err());
    }
}
