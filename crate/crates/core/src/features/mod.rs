//! Regressor construction: calendar dummies, annual B-splines, lagged
//! demand, interactions, and their assembly into feature matrices.

mod dummies;
mod lags;
mod matrix;
mod spec;
mod spline;
mod term;

pub use dummies::{bspline_basis, hd_dummies, hod_dummies, holiday_dummies, holiday_hour_dummies, how_dummies};
pub use lags::{interaction_block, lag_block, LagSets};
pub use matrix::{build_matrix, FeatureMatrix};
pub use spec::{Block, FeatureSpec, Target};
pub use spline::{bspline_value, PeriodicBasis, SplineBasisConfig};
pub use term::{Family, Term};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("spline degree must be odd, got {0}")]
    InvalidDegree(usize),
    #[error("{n_basis} basis functions cannot hold splines of degree {degree}")]
    InsufficientSpacing { n_basis: usize, degree: usize },
    #[error("series too short: {needed} observations needed, {available} available")]
    SeriesTooShort { needed: usize, available: usize },
    #[error("calendar covers {available} hours but {needed} are needed")]
    ContextTooShort { needed: usize, available: usize },
    #[error("lag source has {source_len} values but target has {target_len}")]
    LengthMismatch { source_len: usize, target_len: usize },
    #[error("invalid lag sets: {0}")]
    InvalidLagSets(String),
}

/// A group of named columns over a common set of rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureBlock {
    pub names: Vec<String>,
    pub terms: Vec<Term>,
    pub columns: Vec<Vec<f64>>,
}

impl FeatureBlock {
    pub(crate) fn with_terms(terms: &[Term], n_rows: usize) -> Self {
        Self {
            names: terms.iter().map(Term::to_string).collect(),
            terms: terms.to_vec(),
            columns: vec![vec![0.0; n_rows]; terms.len()],
        }
    }

    pub(crate) fn constant(term: Term, n_rows: usize, value: f64) -> Self {
        Self {
            names: vec![term.to_string()],
            terms: vec![term],
            columns: vec![vec![value; n_rows]],
        }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn extend(&mut self, other: FeatureBlock) {
        self.names.extend(other.names);
        self.terms.extend(other.terms);
        self.columns.extend(other.columns);
    }
}
