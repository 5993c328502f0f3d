use thiserror::Error;

use crate::benchmarks::BenchmarkError;
use crate::ensemble::EnsembleError;
use crate::features::FeatureError;
use crate::lasso::LassoError;
use crate::model::ModelError;
use crate::scoring::ScoringError;
use crate::series::SeriesError;

/// Coarse failure class, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid settings or arguments.
    Config,
    /// Input data that cannot be used as given.
    Data,
    /// Estimation or simulation broke down.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Lasso(#[from] LassoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl SeriesError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            SeriesError::UnstableProcess(_)
            | SeriesError::NegativeVarianceParams(_)
            | SeriesError::InvalidCalendar(_) => ErrorKind::Config,
            _ => ErrorKind::Data,
        }
    }
}

impl FeatureError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            FeatureError::InvalidDegree(_)
            | FeatureError::InsufficientSpacing { .. }
            | FeatureError::InvalidLagSets(_) => ErrorKind::Config,
            _ => ErrorKind::Data,
        }
    }
}

impl LassoError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            LassoError::InvalidConfig(_) => ErrorKind::Config,
            LassoError::AllColumnsConstant | LassoError::DegenerateTarget | LassoError::NonFinite(_) => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::Data,
        }
    }
}

impl ModelError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ModelError::InvalidConfig(_) => ErrorKind::Config,
            ModelError::Series(e) => e.kind(),
            ModelError::Feature(e) => e.kind(),
            ModelError::Lasso(e) => e.kind(),
            _ => ErrorKind::Data,
        }
    }
}

impl EnsembleError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            EnsembleError::EmptyGrid
            | EnsembleError::InvalidGrid(_)
            | EnsembleError::UnknownMode(_)
            | EnsembleError::WindowExceedsHorizon { .. } => ErrorKind::Config,
            EnsembleError::InvalidShape(_) | EnsembleError::EmptyInnovationPool => ErrorKind::Numerical,
            EnsembleError::Model(e) => e.kind(),
            _ => ErrorKind::Data,
        }
    }
}

impl BenchmarkError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            BenchmarkError::SingularToeplitz(_) | BenchmarkError::EmptyResiduals => ErrorKind::Numerical,
            BenchmarkError::Ensemble(e) => e.kind(),
            _ => ErrorKind::Data,
        }
    }
}

impl ScoringError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ScoringError::ZeroVarianceActuals | ScoringError::DegenerateDifferential => ErrorKind::Numerical,
            ScoringError::Ensemble(e) => e.kind(),
            _ => ErrorKind::Data,
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Series(e) => e.kind(),
            Error::Feature(e) => e.kind(),
            Error::Lasso(e) => e.kind(),
            Error::Model(e) => e.kind(),
            Error::Ensemble(e) => e.kind(),
            Error::Benchmark(e) => e.kind(),
            Error::Scoring(e) => e.kind(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_follow_nested_errors() {
        let e: Error = ModelError::Lasso(LassoError::DegenerateTarget).into();
        assert_eq!(e.kind(), ErrorKind::Numerical);
        let e: Error = EnsembleError::Model(ModelError::InvalidConfig("x".into())).into();
        assert_eq!(e.kind(), ErrorKind::Config);
        let e: Error = SeriesError::Empty.into();
        assert_eq!(e.kind(), ErrorKind::Data);
    }
}
