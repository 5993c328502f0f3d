use rayon::prelude::*;

use super::dummies::{bspline_basis, hod_dummies, holiday_dummies, how_dummies};
use super::lags::{interaction_columns, lag_columns};
use super::spec::{Block, FeatureSpec, Target};
use super::spline::PeriodicBasis;
use super::{FeatureBlock, FeatureError, Term};
use crate::series::CalendarContext;

/// Realized regressors aligned to a target vector. Columns are stored
/// column-major; `rows[i]` is the calendar index of row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub terms: Vec<Term>,
    pub columns: Vec<Vec<f64>>,
    pub rows: Vec<usize>,
    pub target: Vec<f64>,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }
}

/// Assembles every block of `spec` in order.
///
/// `lag_source[i]` and `target[i]` refer to calendar index `offset + i`.
/// Rows start at the first index for which every lag of the spec is
/// available.
pub fn build_matrix(
    spec: &FeatureSpec,
    ctx: &CalendarContext,
    lag_source: &[f64],
    offset: usize,
    target: &[f64],
) -> Result<FeatureMatrix, FeatureError> {
    spec.validate()?;
    if lag_source.len() != target.len() {
        return Err(FeatureError::LengthMismatch {
            source_len: lag_source.len(),
            target_len: target.len(),
        });
    }
    let max_lag = spec.max_lag();
    if max_lag >= lag_source.len() {
        return Err(FeatureError::SeriesTooShort {
            needed: max_lag + 1,
            available: lag_source.len(),
        });
    }
    let end = offset + lag_source.len();
    if end > ctx.len() {
        return Err(FeatureError::ContextTooShort {
            needed: end,
            available: ctx.len(),
        });
    }
    let rows: Vec<usize> = (offset + max_lag..end).collect();
    let basis = PeriodicBasis::new(spec.spline)?;

    let blocks: Vec<FeatureBlock> = spec
        .blocks
        .par_iter()
        .map(|block| -> Result<FeatureBlock, FeatureError> {
            Ok(match block {
                Block::Constant => {
                    FeatureBlock::constant(Term::Constant, rows.len(), 1.0)
                }
                Block::HourOfDay => hod_dummies(ctx, &rows, false),
                Block::HourOfDayCum => hod_dummies(ctx, &rows, true),
                Block::HourOfWeek => how_dummies(ctx, &rows),
                Block::AnnualSpline { cumulative } => {
                    bspline_basis(ctx, &rows, &basis, *cumulative)
                }
                Block::Holidays { cumulative } => holiday_dummies(ctx, &rows, *cumulative),
                Block::Lags { lags } => {
                    let terms = lags
                        .iter()
                        .map(|&lag| match spec.target {
                            Target::Mean => Term::Lag { lag },
                            Target::Variance => Term::SquaredResidualLag { lag },
                        })
                        .collect();
                    lag_columns(lag_source, offset, &rows, terms)?
                }
                Block::Interactions { lags } => {
                    interaction_columns(lag_source, offset, &rows, ctx, lags)?
                }
            })
        })
        .collect::<Result<_, _>>()?;

    let mut all = FeatureBlock::default();
    for b in blocks {
        all.extend(b);
    }
    debug_assert_eq!(all.names, spec.column_names(ctx.calendar()));
    Ok(FeatureMatrix {
        names: all.names,
        terms: all.terms,
        columns: all.columns,
        target: target[max_lag..].to_vec(),
        rows,
    })
}
