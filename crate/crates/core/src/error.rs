use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("lines are parallel (|cos| = {0:.3e} away from 1)")]
    ParallelLines(f64),
    #[error("degenerate line configuration: {0}")]
    DegenerateConfiguration(&'static str),
    #[error("measurement has coincident direct and reflected directions")]
    DegenerateMeasurement,
    #[error("point lies outside the open hemisphere (cos c = {0:.3e})")]
    OutsideHemisphere(f64),
    #[error("measurement pair is coplanar; nested cross product vanishes")]
    CoplanarPair,
    #[error("cluster has {0} measurement(s), at least 2 required")]
    InsufficientMeasurements(usize),
    #[error("every measurement pair in the cluster was degenerate")]
    AllPairsDegenerate,
    #[error("every measurement in the cluster was degenerate")]
    AllMeasurementsDegenerate,
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("computed sender distance {0} is not positive")]
    NonPositiveDistance(f64),
    #[error("no wall estimates available")]
    NoWalls,
    #[error("unknown combination token `{0}`")]
    UnknownComboToken(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
