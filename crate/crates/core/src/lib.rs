//! Probabilistic short-term demand forecasting.
//!
//! The crate fits a high-dimensional linear ARX model for the conditional
//! mean of an hourly demand series together with a time-varying ARCH model
//! for its conditional variance, both estimated by lasso with BIC tuning.
//! Fitted models produce multivariate `H`-step ensemble forecasts by
//! recursive Monte-Carlo simulation, which are evaluated with the energy
//! score, the pinball score and classical point measures against naive and
//! seasonal autoregressive benchmarks.
//!
//! Module overview:
//!
//! - [`series`]: hourly series, holiday calendars, ingestion, study plans
//!   and synthetic processes.
//! - [`features`]: calendar dummies, annual B-splines, lags, interactions.
//! - [`lasso`]: standardization, coordinate descent and BIC selection.
//! - [`model`]: the ARX mean and ARCH variance models.
//! - [`ensemble`]: path simulation, dependence rearrangements, quantiles.
//! - [`benchmarks`]: naive and seasonal AR reference forecasters.
//! - [`scoring`]: MAE, RMSE, NS, pinball, energy score, Diebold-Mariano.
//! - [`forecaster`]: the common fit/forecast interface used by studies.

pub mod benchmarks;
pub mod ensemble;
pub mod features;
pub mod forecaster;
pub mod lasso;
pub mod model;
pub mod rng;
pub mod scoring;
pub mod series;

mod error;

pub use error::{Error, ErrorKind, Result};
