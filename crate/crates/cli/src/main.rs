use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hydrocast::ensemble::DependenceMode;
use hydrocast::series::CsvSchema;
use hydrocast_cli::commands;
use hydrocast_cli::config::{StorageConfig, StudyConfig};
use hydrocast_cli::storage::run_storage_analysis;
use hydrocast_cli::study::run_study;
use hydrocast_cli::{CliError, Result};

/// Probabilistic short-term demand forecasting.
#[derive(Debug, Parser)]
#[command(name = "hydrocast", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a synthetic ARX-ARCH demand series.
    SimulateData {
        /// TOML file with the process parameters; defaults apply otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Overrides the configured number of hours.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a demand CSV onto the hourly grid and report its extent.
    Ingest {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "timestamp")]
        timestamp_column: String,
        #[arg(long, default_value = "demand")]
        demand_column: String,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        utc_offset: i32,
        /// Write the normalized series here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit one configured model and write its estimates.
    Fit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: String,
        /// End (exclusive) of the estimation window; defaults to the
        /// first study origin.
        #[arg(long)]
        end: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit and simulate one ensemble forecast.
    Forecast {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long)]
        seed: u64,
        /// Index of the first forecast hour; defaults to the first study
        /// origin.
        #[arg(long)]
        origin: Option<usize>,
        #[arg(long, default_value = "standard")]
        mode: DependenceMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a rolling-origin study over all configured models.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        n_origins: Option<usize>,
        #[arg(long)]
        ensemble_size: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Exceedance probabilities of cumulative demand per dependence mode.
    Storage {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        capacity: Option<f64>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score long-format ensembles against realized values.
    Score {
        /// CSV with columns origin,path,h,value.
        #[arg(long)]
        ensemble: PathBuf,
        /// CSV with columns origin,h,value.
        #[arg(long)]
        actuals: PathBuf,
        #[arg(long, default_value_t = 99)]
        levels: usize,
        /// Written to standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Data(e.to_string()))
}

fn write_or_print(out: Option<&PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SimulateData {
            config,
            seed,
            length,
            out,
        } => {
            let mut cfg = commands::load_synthetic_config(config.as_deref())?;
            if let Some(n) = length {
                cfg.length = n;
            }
            let n = commands::simulate_data(&cfg, seed, &out)?;
            eprintln!("wrote {n} hours to {}", out.display());
        }
        Command::Ingest {
            data,
            timestamp_column,
            demand_column,
            utc_offset,
            out,
        } => {
            let schema = CsvSchema {
                timestamp_column,
                demand_column,
                fixed_offset_hours: utc_offset,
            };
            let summary = commands::ingest(&data, &schema, out.as_deref())?;
            println!("{}", to_json(&summary)?);
        }
        Command::Fit {
            config,
            model,
            end,
            out,
        } => {
            let cfg = StudyConfig::load(&config)?;
            let summary = commands::fit(&cfg, &model, end, &out)?;
            println!("{}", to_json(&summary)?);
        }
        Command::Forecast {
            config,
            model,
            seed,
            origin,
            mode,
            out,
        } => {
            let cfg = StudyConfig::load(&config)?;
            let ens = commands::forecast(&cfg, &model, origin, seed, mode, &out)?;
            eprintln!(
                "wrote {} paths of {} hours to {}",
                ens.n_paths(),
                ens.horizon(),
                out.display()
            );
        }
        Command::Study {
            config,
            seed,
            output,
            n_origins,
            ensemble_size,
            horizon,
        } => {
            let mut cfg = StudyConfig::load(&config)?;
            cfg.seed = Some(seed);
            if let Some(o) = output {
                cfg.output_dir = o;
            }
            if let Some(n) = n_origins {
                cfg.n_origins = n;
            }
            if let Some(m) = ensemble_size {
                cfg.ensemble_size = m;
            }
            if let Some(h) = horizon {
                cfg.horizon = h;
            }
            let outcome = run_study(&cfg)?;
            eprintln!(
                "wrote {} files to {}",
                outcome.manifest.files.len() + 1,
                cfg.output_dir.display()
            );
        }
        Command::Storage {
            config,
            seed,
            capacity,
            window,
            model,
            output,
        } => {
            let mut cfg = StudyConfig::load(&config)?;
            cfg.seed = Some(seed);
            let base = cfg.storage.clone();
            let storage = StorageConfig {
                capacity: capacity
                    .or(base.as_ref().map(|s| s.capacity))
                    .ok_or_else(|| CliError::Config("a storage capacity is required".into()))?,
                window: window.or(base.as_ref().map(|s| s.window)).unwrap_or(cfg.horizon),
                model: model.or(base.and_then(|s| s.model)),
            };
            cfg.storage = Some(storage.clone());
            let table = run_storage_analysis(&cfg, &storage)?;
            let dir = output.unwrap_or_else(|| cfg.output_dir.clone());
            let mut out = hydrocast_cli::manifest::OutputDir::create(&dir)?;
            out.write("storage.csv", &table.to_csv()?)?;
            out.write("storage.json", (to_json(&table)? + "\n").as_bytes())?;
            print!("{}", String::from_utf8_lossy(&table.to_csv()?));
        }
        Command::Score {
            ensemble,
            actuals,
            levels,
            out,
        } => {
            let csv = commands::score(&ensemble, &actuals, levels)?;
            write_or_print(out.as_ref(), &csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
