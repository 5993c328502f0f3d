//! CSV renderings of study results.

use hydrocast::series::TimeSeries;

use crate::error::{CliError, Result};
use crate::study::{StudyAggregate, TaskResult, FAN_LEVELS, INTERVALS};

fn writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

fn row<I, S>(w: &mut csv::Writer<Vec<u8>>, fields: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields).map_err(|e| CliError::Data(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn per_origin_csv(names: &[&str], series: &TimeSeries, origins: &[usize], tasks: &[TaskResult]) -> Result<Vec<u8>> {
    let mut w = writer();
    row(
        &mut w,
        ["model", "origin", "timestamp", "es", "pb", "mae", "rmse", "ns", "monotone_quantiles", "parameters"],
    )?;
    for t in tasks {
        let origin = origins[t.origin];
        let s = &t.scores;
        row(
            &mut w,
            [
                names[t.model].to_string(),
                origin.to_string(),
                series.timestamp(origin).format("%Y-%m-%dT%H:%M:%S").to_string(),
                s.es.to_string(),
                s.pb.to_string(),
                s.mae.to_string(),
                s.rmse.to_string(),
                opt(s.ns),
                s.monotone_quantiles.to_string(),
                t.parameter_count.to_string(),
            ],
        )?;
    }
    finish(w)
}

pub fn per_horizon_csv(agg: &StudyAggregate) -> Result<Vec<u8>> {
    let mut w = writer();
    let mut header: Vec<String> = ["model", "h", "mae", "rmse", "ns", "pb"].map(String::from).to_vec();
    header.extend(INTERVALS.iter().map(|c| format!("coverage_{}", (c * 100.0).round())));
    row(&mut w, header)?;
    for (s, m) in agg.report.summaries.iter().zip(&agg.models) {
        let c = &s.per_horizon;
        for h in 0..agg.horizon {
            let mut fields = vec![
                s.model.clone(),
                (h + 1).to_string(),
                c.mae[h].to_string(),
                c.rmse[h].to_string(),
                opt(c.ns[h]),
                c.pb[h].to_string(),
            ];
            fields.extend(m.coverage.iter().map(|cov| cov[h].to_string()));
            row(&mut w, fields)?;
        }
    }
    finish(w)
}

pub fn per_quantile_csv(agg: &StudyAggregate, levels: &[f64]) -> Result<Vec<u8>> {
    let mut w = writer();
    row(&mut w, ["model", "tau", "pb"])?;
    for s in &agg.report.summaries {
        for (tau, pb) in levels.iter().zip(&s.per_quantile) {
            row(&mut w, [s.model.clone(), tau.to_string(), pb.to_string()])?;
        }
    }
    finish(w)
}

/// One row per model with mean scores and improvements over the
/// reference model in percent.
pub fn summary_csv(agg: &StudyAggregate) -> Result<Vec<u8>> {
    let mut w = writer();
    row(
        &mut w,
        [
            "model",
            "origins",
            "es",
            "pb",
            "mae",
            "rmse",
            "ns",
            "es_improvement",
            "pb_improvement",
            "mae_improvement",
            "rmse_improvement",
            "mean_parameters",
        ],
    )?;
    for (s, m) in agg.report.summaries.iter().zip(&agg.models) {
        let imp = s.improvement;
        row(
            &mut w,
            [
                s.model.clone(),
                s.n_origins.to_string(),
                s.es.to_string(),
                s.pb.to_string(),
                s.mae.to_string(),
                s.rmse.to_string(),
                opt(s.ns),
                opt(imp.map(|i| i.es)),
                opt(imp.map(|i| i.pb)),
                opt(imp.map(|i| i.mae)),
                opt(imp.map(|i| i.rmse)),
                m.mean_parameters.to_string(),
            ],
        )?;
    }
    finish(w)
}

pub fn dm_csv(agg: &StudyAggregate) -> Result<Vec<u8>> {
    let mut w = writer();
    row(
        &mut w,
        ["metric", "model_a", "model_b", "statistic", "p_a_better", "p_b_better", "error"],
    )?;
    for d in &agg.report.dm {
        let r = d.result;
        row(
            &mut w,
            [
                d.metric.clone(),
                d.model_a.clone(),
                d.model_b.clone(),
                opt(r.map(|r| r.statistic)),
                opt(r.map(|r| r.p_less)),
                opt(r.map(|r| r.p_greater)),
                d.error.clone().unwrap_or_default(),
            ],
        )?;
    }
    finish(w)
}

pub fn fan_rows(
    w: &mut csv::Writer<Vec<u8>>,
    model: &str,
    origin: usize,
    mean: &[f64],
    fan: &[Vec<f64>],
) -> Result<()> {
    for (h, mu) in mean.iter().enumerate() {
        let mut fields = vec![model.to_string(), origin.to_string(), (h + 1).to_string(), mu.to_string()];
        fields.extend(fan.iter().map(|q| q[h].to_string()));
        row(w, fields)?;
    }
    Ok(())
}

pub fn fan_header() -> Vec<String> {
    let mut header: Vec<String> = ["model", "origin", "h", "mean"].map(String::from).to_vec();
    header.extend(FAN_LEVELS.iter().map(|l| format!("q{:02}", (l * 100.0).round())));
    header
}

pub fn fan_csv(names: &[&str], origins: &[usize], tasks: &[TaskResult]) -> Result<Vec<u8>> {
    let mut w = writer();
    row(&mut w, fan_header())?;
    for t in tasks {
        if let Some(p) = &t.plot {
            fan_rows(&mut w, names[t.model], origins[t.origin], &p.mean, &p.fan)?;
        }
    }
    finish(w)
}

pub fn rank_correlation_csv(names: &[&str], origins: &[usize], tasks: &[TaskResult]) -> Result<Vec<u8>> {
    let mut w = writer();
    row(&mut w, ["model", "origin", "h_i", "h_j", "rho"])?;
    for t in tasks {
        if let Some(p) = &t.plot {
            for (i, r) in p.rank_correlation.iter().enumerate() {
                for (j, rho) in r.iter().enumerate() {
                    row(
                        &mut w,
                        [
                            names[t.model].to_string(),
                            origins[t.origin].to_string(),
                            (i + 1).to_string(),
                            (j + 1).to_string(),
                            rho.to_string(),
                        ],
                    )?;
                }
            }
        }
    }
    finish(w)
}

pub fn histogram_csv(names: &[&str], origins: &[usize], tasks: &[TaskResult]) -> Result<Vec<u8>> {
    let mut w = writer();
    row(&mut w, ["model", "origin", "mode", "bin", "lower", "upper", "count"])?;
    for t in tasks {
        if let Some(p) = &t.plot {
            for (mode, hist) in &p.histograms {
                for (b, count) in hist.counts.iter().enumerate() {
                    row(
                        &mut w,
                        [
                            names[t.model].to_string(),
                            origins[t.origin].to_string(),
                            mode.to_string(),
                            (b + 1).to_string(),
                            hist.edges[b].to_string(),
                            hist.edges[b + 1].to_string(),
                            count.to_string(),
                        ],
                    )?;
                }
            }
        }
    }
    finish(w)
}
