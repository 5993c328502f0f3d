//! Uniform fit/forecast interface over the ARX-ARCH model and the
//! benchmarks, used by rolling-origin studies.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{
    fit_naive, fit_seasonal_ar, NaiveKind, NaiveModel, SeasonalArModel, SeasonalVariant, DEFAULT_MAX_ORDER,
};
use crate::ensemble::{simulate_with, EnsembleForecast, SimulationOptions};
use crate::model::{DemandModel, ModelConfig};
use crate::series::{CalendarContext, TimeSeries};
use crate::Result;

pub trait Forecaster: Send + Sync {
    /// Estimates the model on calendar indices `window` of `series`.
    fn fit(
        &self,
        series: &TimeSeries,
        ctx: &CalendarContext,
        window: Range<usize>,
    ) -> Result<Box<dyn FittedForecaster>>;
}

pub trait FittedForecaster: Send + Sync {
    /// `m` paths for calendar indices `origin..origin + h`, reading
    /// `history` only before `origin`.
    fn forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
        m: usize,
        seed: u64,
    ) -> Result<EnsembleForecast>;

    fn parameter_count(&self) -> usize;
}

fn default_order() -> usize {
    DEFAULT_MAX_ORDER
}

/// Declarative choice of forecaster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ForecasterSpec {
    Arx {
        #[serde(default)]
        config: Box<ModelConfig>,
        #[serde(default)]
        simulation: SimulationOptions,
    },
    NaiveMean,
    NaiveFm,
    NaiveMrw,
    /// AR(p) on the hour-of-day adjusted series.
    ArD {
        #[serde(default = "default_order")]
        p_max: usize,
    },
    /// AR(p) on the hour-of-week adjusted series.
    ArW {
        #[serde(default = "default_order")]
        p_max: usize,
    },
}

struct Arx {
    model: DemandModel,
    simulation: SimulationOptions,
}

impl Forecaster for ForecasterSpec {
    fn fit(
        &self,
        series: &TimeSeries,
        ctx: &CalendarContext,
        window: Range<usize>,
    ) -> Result<Box<dyn FittedForecaster>> {
        let naive = |kind| -> Result<Box<dyn FittedForecaster>> {
            let values = series.window(window.clone())?;
            Ok(Box::new(fit_naive(&values, window.start, ctx, kind)?))
        };
        let ar = |variant, p_max| -> Result<Box<dyn FittedForecaster>> {
            let values = series.window(window.clone())?;
            Ok(Box::new(fit_seasonal_ar(&values, window.start, ctx, variant, p_max)?))
        };
        match self {
            ForecasterSpec::Arx { config, simulation } => Ok(Box::new(Arx {
                model: DemandModel::fit(series, ctx, window.clone(), config)?,
                simulation: *simulation,
            })),
            ForecasterSpec::NaiveMean => naive(NaiveKind::Mean),
            ForecasterSpec::NaiveFm => naive(NaiveKind::Fm),
            ForecasterSpec::NaiveMrw => naive(NaiveKind::Mrw),
            ForecasterSpec::ArD { p_max } => ar(SeasonalVariant::Daily, *p_max),
            ForecasterSpec::ArW { p_max } => ar(SeasonalVariant::Weekly, *p_max),
        }
    }
}

impl FittedForecaster for Arx {
    fn forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
        m: usize,
        seed: u64,
    ) -> Result<EnsembleForecast> {
        Ok(simulate_with(&self.model, ctx, history, origin, h, m, seed, self.simulation)?)
    }

    fn parameter_count(&self) -> usize {
        self.model.parameter_count()
    }
}

impl FittedForecaster for NaiveModel {
    fn forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
        m: usize,
        seed: u64,
    ) -> Result<EnsembleForecast> {
        Ok(NaiveModel::forecast(self, history, ctx, origin, h, m, seed)?)
    }

    fn parameter_count(&self) -> usize {
        NaiveModel::parameter_count(self)
    }
}

impl FittedForecaster for SeasonalArModel {
    fn forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
        m: usize,
        seed: u64,
    ) -> Result<EnsembleForecast> {
        Ok(SeasonalArModel::forecast(self, history, ctx, origin, h, m, seed)?)
    }

    fn parameter_count(&self) -> usize {
        SeasonalArModel::parameter_count(self)
    }
}
