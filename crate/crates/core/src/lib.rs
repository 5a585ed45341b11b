//! Urban air mobility pipeline: a UTM cruise simulator with MVP conflict
//! resolution, dilation of cruise tracks into nine-segment eVTOL missions,
//! and feasibility evaluation against a lift+cruise powertrain model.
//!
//! The stages chain as
//! [`airspace::run_scenario`] → [`dilation::dilate_all`] → [`evaluator::evaluate_fleet`],
//! all configured from one [`config::Config`]. [`run`] wraps them with
//! on-disk artifacts and is what the `uamsim` binary drives.

pub mod airspace;
pub mod config;
pub mod dilation;
pub mod evaluator;
pub mod powertrain;
pub mod run;
pub mod units;

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub use config::{Config, ConfigError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Units(#[from] units::UnitError),
    #[error(transparent)]
    Sim(#[from] airspace::SimError),
    #[error(transparent)]
    Dilation(#[from] dilation::DilationError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Format { path: String, line: u64, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, e: &csv::Error) -> Self {
        Error::Format {
            path: path.display().to_string(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.display().to_string(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}
