//! Study configuration, read from a TOML file.
//!
//! ```toml
//! output_dir = "out"
//! calibration_hours = 17520
//! n_origins = 1000
//! horizon = 24
//! ensemble_size = 1000
//! reference = "ar_w"
//!
//! [data]
//! path = "demand.csv"
//! holidays = "default"   # or "none", or a holiday CSV path
//!
//! [[models]]
//! name = "arx"
//! kind = "arx"
//!
//! [[models]]
//! name = "ar_w"
//! kind = "ar_w"
//! p_max = 1500
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use hydrocast::ensemble::SimulationOptions;
use hydrocast::features::LagSets;
use hydrocast::forecaster::ForecasterSpec;
use hydrocast::model::{ModelConfig, VarianceTarget};
use hydrocast::series::{CsvSchema, HolidayCalendar};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub path: PathBuf,
    #[serde(default = "default_timestamp_column")]
    pub timestamp_column: String,
    #[serde(default = "default_demand_column")]
    pub demand_column: String,
    /// Offset that timezone-aware timestamps are converted to.
    #[serde(default)]
    pub utc_offset_hours: i32,
    /// `"default"` for the built-in calendar, `"none"`, or a CSV path.
    #[serde(default = "default_holidays")]
    pub holidays: String,
}

fn default_timestamp_column() -> String {
    "timestamp".into()
}

fn default_demand_column() -> String {
    "demand".into()
}

fn default_holidays() -> String {
    "default".into()
}

impl DataConfig {
    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            timestamp_column: self.timestamp_column.clone(),
            demand_column: self.demand_column.clone(),
            fixed_offset_hours: self.utc_offset_hours,
        }
    }

    pub fn calendar(&self) -> Result<HolidayCalendar> {
        match self.holidays.as_str() {
            "default" => Ok(HolidayCalendar::german_default()),
            "none" => Ok(HolidayCalendar::empty()),
            path => HolidayCalendar::from_csv_path(Path::new(path)).map_err(|e| CliError::Core(e.into())),
        }
    }
}

/// One forecaster of a study. `kind` selects the model family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub name: String,
    #[serde(flatten)]
    pub spec: ModelSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ModelSpec {
    /// Lasso ARX-ARCH model. `lags` replaces the default lag sets;
    /// `config` replaces the whole model configuration.
    Arx {
        #[serde(default)]
        lags: Option<LagSets>,
        #[serde(default)]
        variance_target: Option<VarianceTarget>,
        #[serde(default)]
        config: Option<Box<ModelConfig>>,
        #[serde(default)]
        floor_at_zero: bool,
    },
    NaiveMean,
    NaiveFm,
    NaiveMrw,
    ArD {
        #[serde(default = "default_order")]
        p_max: usize,
    },
    ArW {
        #[serde(default = "default_order")]
        p_max: usize,
    },
}

fn default_order() -> usize {
    hydrocast::benchmarks::DEFAULT_MAX_ORDER
}

impl ModelSpec {
    pub fn forecaster(&self) -> ForecasterSpec {
        match self {
            ModelSpec::Arx {
                lags,
                variance_target,
                config,
                floor_at_zero,
            } => {
                let mut cfg = match (config, lags) {
                    (Some(c), _) => (**c).clone(),
                    (None, Some(l)) => ModelConfig::from_lags(l),
                    (None, None) => ModelConfig::default(),
                };
                if let Some(t) = variance_target {
                    cfg.variance_target = *t;
                }
                ForecasterSpec::Arx {
                    config: Box::new(cfg),
                    simulation: SimulationOptions {
                        floor_at_zero: *floor_at_zero,
                    },
                }
            }
            ModelSpec::NaiveMean => ForecasterSpec::NaiveMean,
            ModelSpec::NaiveFm => ForecasterSpec::NaiveFm,
            ModelSpec::NaiveMrw => ForecasterSpec::NaiveMrw,
            ModelSpec::ArD { p_max } => ForecasterSpec::ArD { p_max: *p_max },
            ModelSpec::ArW { p_max } => ForecasterSpec::ArW { p_max: *p_max },
        }
    }
}

/// Settings of the storage exceedance analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageConfig {
    /// Cumulative demand threshold.
    pub capacity: f64,
    /// Number of leading forecast hours that are summed.
    pub window: usize,
    /// Model whose ensembles are rearranged; defaults to the first model.
    #[serde(default)]
    pub model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub data: DataConfig,
    pub output_dir: PathBuf,
    /// Hours before the first origin; origins are spread over the rest.
    pub calibration_hours: usize,
    #[serde(default = "default_origins")]
    pub n_origins: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_ensemble")]
    pub ensemble_size: usize,
    /// Required before a study runs; usually given on the command line.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Fixed re-estimation window in hours; the full history is used if
    /// absent.
    #[serde(default)]
    pub window_hours: Option<usize>,
    #[serde(default)]
    pub reference: Option<String>,
    /// Number of equidistant pinball levels.
    #[serde(default = "default_levels")]
    pub quantile_levels: usize,
    /// Fan-chart, rank-correlation and histogram data are written for the
    /// first `plot_origins` origins.
    #[serde(default = "default_plot_origins")]
    pub plot_origins: usize,
    pub models: Vec<ModelEntry>,
    #[serde(default)]
    pub storage: Option<StorageConfig>,
}

fn default_origins() -> usize {
    1000
}

fn default_horizon() -> usize {
    24
}

fn default_ensemble() -> usize {
    1000
}

fn default_levels() -> usize {
    99
}

fn default_plot_origins() -> usize {
    1
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    /// Reads `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
        self.data.path = join(&self.data.path);
        self.output_dir = join(&self.output_dir);
        if !matches!(self.data.holidays.as_str(), "default" | "none") {
            self.data.holidays = join(Path::new(&self.data.holidays)).to_string_lossy().into_owned();
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(config_error("at least one model is required"));
        }
        let mut names = BTreeSet::new();
        for m in &self.models {
            if m.name.is_empty() || m.name.contains([',', '"', '\n']) {
                return Err(config_error(format!("invalid model name `{}`", m.name)));
            }
            if !names.insert(m.name.as_str()) {
                return Err(config_error(format!("model `{}` listed twice", m.name)));
            }
            if let ForecasterSpec::Arx { config, .. } = m.spec.forecaster() {
                config
                    .validate()
                    .map_err(|e| config_error(format!("model `{}`: {e}", m.name)))?;
            }
        }
        if let Some(r) = &self.reference {
            if !names.contains(r.as_str()) {
                return Err(config_error(format!("reference model `{r}` is not in the model list")));
            }
        }
        if let Some(s) = &self.storage {
            if let Some(m) = &s.model {
                if !names.contains(m.as_str()) {
                    return Err(config_error(format!("storage model `{m}` is not in the model list")));
                }
            }
            if s.window == 0 || s.window > self.horizon {
                return Err(config_error(format!(
                    "storage window {} must lie in 1..={}",
                    s.window, self.horizon
                )));
            }
            if !s.capacity.is_finite() {
                return Err(config_error("storage capacity must be finite"));
            }
        }
        for (what, v) in [
            ("horizon", self.horizon),
            ("ensemble_size", self.ensemble_size),
            ("n_origins", self.n_origins),
            ("quantile_levels", self.quantile_levels),
            ("calibration_hours", self.calibration_hours),
        ] {
            if v == 0 {
                return Err(config_error(format!("{what} must be positive")));
            }
        }
        if let Some(w) = self.window_hours {
            if w == 0 || w > self.calibration_hours {
                return Err(config_error(format!(
                    "window_hours {w} must lie in 1..={} (the history before the first origin)",
                    self.calibration_hours
                )));
            }
        }
        Ok(())
    }

    pub fn model(&self, name: &str) -> Result<&ModelEntry> {
        self.models
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| config_error(format!("unknown model `{name}`")))
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| config_error("a seed is required (pass --seed)"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        output_dir = "out"
        calibration_hours = 1000
        [data]
        path = "demand.csv"
        [[models]]
        name = "arx"
        kind = "arx"
        lags = { mean = [1, 24], variance = [1], interaction = [1] }
        [[models]]
        name = "ar_w"
        kind = "ar_w"
        p_max = 100
    "#;

    #[test]
    fn defaults_and_model_kinds() {
        let cfg = StudyConfig::from_toml(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!((cfg.horizon, cfg.ensemble_size, cfg.n_origins), (24, 1000, 1000));
        assert_eq!(cfg.data.holidays, "default");
        assert_eq!(cfg.models[1].spec.forecaster(), ForecasterSpec::ArW { p_max: 100 });
        match cfg.models[0].spec.forecaster() {
            ForecasterSpec::Arx { config, .. } => assert_eq!(config.mean_spec.max_lag(), 24),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_reference_and_bad_windows() {
        let mut cfg = StudyConfig::from_toml(MINIMAL).unwrap();
        cfg.reference = Some("missing".into());
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        cfg.reference = None;
        cfg.window_hours = Some(5000);
        assert!(cfg.validate().is_err());
        cfg.window_hours = None;
        cfg.storage = Some(StorageConfig {
            capacity: 1.0,
            window: 25,
            model: None,
        });
        assert!(cfg.validate().is_err());
        assert!(StudyConfig::from_toml("output_dir = 3").is_err());
        let unknown_kind = MINIMAL.replace("kind = \"ar_w\"", "kind = \"lstm\"");
        assert!(StudyConfig::from_toml(&unknown_kind).is_err());
    }

    #[test]
    fn relative_paths_follow_the_config_file() {
        let mut cfg = StudyConfig::from_toml(MINIMAL).unwrap();
        cfg.resolve_paths(Path::new("/data/run"));
        assert_eq!(cfg.data.path, PathBuf::from("/data/run/demand.csv"));
        assert_eq!(cfg.output_dir, PathBuf::from("/data/run/out"));
        assert_eq!(cfg.data.holidays, "default");
    }
}
