use serde::{Deserialize, Serialize};

use super::{FeatureBlock, FeatureError, Term};
use crate::series::CalendarContext;

/// Lag index sets of the mean (`mean`), variance (`variance`) and
/// interaction (`interaction`) regressors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagSets {
    pub mean: Vec<usize>,
    pub variance: Vec<usize>,
    pub interaction: Vec<usize>,
}

impl Default for LagSets {
    fn default() -> Self {
        let mut mean: Vec<usize> = (1..=361).collect();
        for week in [504, 672, 840, 1008, 1176, 1344] {
            mean.extend([week, week + 1]);
        }
        Self {
            mean,
            variance: (1..=361).collect(),
            interaction: vec![1, 2, 24, 25, 168, 169],
        }
    }
}

impl LagSets {
    pub fn none() -> Self {
        Self {
            mean: vec![],
            variance: vec![],
            interaction: vec![],
        }
    }

    /// Checks ordering and the subset relations of the variance and
    /// interaction sets with respect to the mean set.
    pub fn validate(&self) -> Result<(), FeatureError> {
        for (name, set) in [
            ("mean", &self.mean),
            ("variance", &self.variance),
            ("interaction", &self.interaction),
        ] {
            if set.contains(&0) {
                return Err(FeatureError::InvalidLagSets(format!("{name} set contains lag 0")));
            }
            if set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(FeatureError::InvalidLagSets(format!(
                    "{name} set must be strictly increasing"
                )));
            }
        }
        for (name, set) in [("variance", &self.variance), ("interaction", &self.interaction)] {
            if let Some(k) = set.iter().find(|k| self.mean.binary_search(k).is_err()) {
                return Err(FeatureError::InvalidLagSets(format!(
                    "{name} lag {k} is not in the mean lag set"
                )));
            }
        }
        Ok(())
    }
}

/// Lag columns for the absolute row indices `rows`; `values[i]` holds the
/// source at absolute index `offset + i`.
pub(crate) fn lag_columns(
    values: &[f64],
    offset: usize,
    rows: &[usize],
    terms: Vec<Term>,
) -> Result<FeatureBlock, FeatureError> {
    let mut block = FeatureBlock::with_terms(&terms, rows.len());
    for (col, term) in block.columns.iter_mut().zip(&terms) {
        let k = term.lag().expect("lag term");
        for (r, &t) in rows.iter().enumerate() {
            col[r] = source_at(values, offset, t, k)?;
        }
    }
    Ok(block)
}

fn source_at(values: &[f64], offset: usize, t: usize, k: usize) -> Result<f64, FeatureError> {
    t.checked_sub(k)
        .and_then(|i| i.checked_sub(offset))
        .and_then(|i| values.get(i).copied())
        .ok_or(FeatureError::SeriesTooShort {
            needed: k + 1,
            available: values.len(),
        })
}

fn first_row(values: &[f64], lags: &[usize]) -> Result<usize, FeatureError> {
    let max_lag = lags.iter().copied().max().unwrap_or(0);
    if max_lag >= values.len() {
        return Err(FeatureError::SeriesTooShort {
            needed: max_lag + 1,
            available: values.len(),
        });
    }
    Ok(max_lag)
}

/// One column `Y_{t-k}` per lag; rows are the indices `t` of `values`
/// for which every lag is available.
pub fn lag_block(values: &[f64], lags: &[usize]) -> Result<FeatureBlock, FeatureError> {
    let first = first_row(values, lags)?;
    let rows: Vec<usize> = (first..values.len()).collect();
    let terms = lags.iter().map(|&lag| Term::Lag { lag }).collect();
    lag_columns(values, 0, &rows, terms)
}

/// Interaction terms `Y_{t-s} HoD_k` (all 24 hours) followed by
/// `Y_{t-s} HD_k` for every `s` in `lags`. `values` starts at calendar
/// index `offset`; rows are those with all lags available.
pub fn interaction_block(
    values: &[f64],
    offset: usize,
    ctx: &CalendarContext,
    lags: &[usize],
) -> Result<FeatureBlock, FeatureError> {
    let first = first_row(values, lags)?;
    let rows: Vec<usize> = (offset + first..offset + values.len()).collect();
    interaction_columns(values, offset, &rows, ctx, lags)
}

pub(crate) fn interaction_terms(lags: &[usize], n_holidays: usize) -> Vec<Term> {
    let mut terms: Vec<Term> = lags
        .iter()
        .flat_map(|&lag| (0..24).map(move |hour| Term::LagHourOfDay { lag, hour }))
        .collect();
    terms.extend(
        lags.iter()
            .flat_map(|&lag| (0..n_holidays).map(move |holiday| Term::LagHoliday { lag, holiday })),
    );
    terms
}

pub(crate) fn interaction_columns(
    values: &[f64],
    offset: usize,
    rows: &[usize],
    ctx: &CalendarContext,
    lags: &[usize],
) -> Result<FeatureBlock, FeatureError> {
    let terms = interaction_terms(lags, ctx.calendar().count());
    let mut block = FeatureBlock::with_terms(&terms, rows.len());
    for (col, term) in block.columns.iter_mut().zip(&terms) {
        let k = term.lag().expect("lag term");
        for (r, &t) in rows.iter().enumerate() {
            let on = match *term {
                Term::LagHourOfDay { hour, .. } => ctx.hour_of_day(t) == hour,
                Term::LagHoliday { holiday, .. } => ctx.holiday_active(t, holiday),
                _ => unreachable!("interaction terms only"),
            };
            if on {
                col[r] = source_at(values, offset, t, k)?;
            }
        }
    }
    Ok(block)
}
