use serde::{Deserialize, Serialize};

use super::SeriesError;

/// Forecast origins of a rolling-origin study. An origin is the index of
/// the first forecast hour; history is everything strictly before it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollingStudyPlan {
    pub origins: Vec<usize>,
    pub window_length: usize,
    pub horizon: usize,
    pub ensemble_size: usize,
}

impl RollingStudyPlan {
    pub fn with_ensemble_size(mut self, m: usize) -> Self {
        self.ensemble_size = m;
        self
    }
}

/// Spreads `n_origins` origins evenly over `[calib_length, series_length - h]`.
pub fn make_study_plan(
    series_length: usize,
    calib_length: usize,
    n_origins: usize,
    h: usize,
) -> Result<RollingStudyPlan, SeriesError> {
    if n_origins == 0 {
        return Err(SeriesError::InsufficientData(
            "at least one origin is required".into(),
        ));
    }
    if h == 0 || series_length < calib_length + h {
        return Err(SeriesError::InsufficientData(format!(
            "series of length {series_length} cannot hold {calib_length} calibration hours and a {h}-hour horizon"
        )));
    }
    let first = calib_length;
    let span = series_length - h - calib_length;
    if n_origins > span + 1 {
        return Err(SeriesError::InsufficientData(format!(
            "{n_origins} distinct origins do not fit into {} candidate hours",
            span + 1
        )));
    }
    let origins = if n_origins == 1 {
        vec![first]
    } else {
        let gaps = n_origins - 1;
        (0..n_origins)
            .map(|i| first + (i * span + gaps / 2) / gaps)
            .collect()
    };
    Ok(RollingStudyPlan {
        origins,
        window_length: calib_length,
        horizon: h,
        ensemble_size: 1000,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_origins_span_the_range() {
        let plan = make_study_plan(100, 50, 2, 10).unwrap();
        assert_eq!(plan.origins, vec![50, 90]);
    }

    #[test]
    fn single_origin() {
        assert_eq!(make_study_plan(60, 50, 1, 10).unwrap().origins, vec![50]);
    }

    #[test]
    fn insufficient_data() {
        assert!(matches!(
            make_study_plan(55, 50, 1, 10),
            Err(SeriesError::InsufficientData(_))
        ));
        assert!(make_study_plan(100, 50, 0, 10).is_err());
        assert!(make_study_plan(61, 50, 3, 10).is_err());
    }

    proptest! {
        #[test]
        fn origins_equally_spaced(calib in 1usize..500, extra in 0usize..5000, n in 1usize..200, h in 1usize..48) {
            let len = calib + h + extra;
            match make_study_plan(len, calib, n, h) {
                Ok(plan) => {
                    let o = &plan.origins;
                    prop_assert_eq!(o.len(), n);
                    prop_assert_eq!(o[0], calib);
                    if n > 1 {
                        prop_assert_eq!(*o.last().unwrap(), len - h);
                        let gaps: Vec<usize> = o.windows(2).map(|w| w[1] - w[0]).collect();
                        prop_assert!(gaps.iter().all(|&g| g >= 1));
                        let (lo, hi) = (gaps.iter().min().unwrap(), gaps.iter().max().unwrap());
                        prop_assert!(hi - lo <= 1);
                    }
                    prop_assert!(o.iter().all(|&t| t >= calib && t + h <= len));
                }
                Err(_) => prop_assert!(n > extra + 1),
            }
        }
    }
}
