//! Parallel ensemble execution and the `report.json` / `samples.csv` writers.

use std::fs;
use std::path::Path;

use micbench_core::sampling::{
    aggregate, evaluate_sample, EnsembleConfig, EnsembleReport, SampleOutcome,
};
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::fmt;

/// Evaluates every sample on a pool of `threads` workers (all cores when
/// `None`). Outcomes are collected by index, so the result does not depend
/// on the thread count.
pub fn run(
    config: &EnsembleConfig,
    threads: Option<usize>,
) -> Result<(EnsembleReport, Vec<SampleOutcome>)> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("thread count must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let outcomes: Vec<SampleOutcome> = pool.install(|| {
        (0..config.n_samples)
            .into_par_iter()
            .map(|i| evaluate_sample(config, i))
            .collect()
    });
    Ok((aggregate(config, &outcomes), outcomes))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-sample rows preceded by a `# cond_max=...` comment line.
pub fn samples_csv(config: &EnsembleConfig, outcomes: &[SampleOutcome]) -> Vec<u8> {
    let mut out = format!("# cond_max={}\n", fmt::num(config.cond_max)).into_bytes();
    let mut writer = csv::Writer::from_writer(&mut out);
    writer
        .write_record(["index", "seed", "check", "margin", "violation", "error"])
        .expect("in-memory write");
    for o in outcomes {
        for r in &o.records {
            writer
                .write_record([
                    o.index.to_string(),
                    o.seed.to_string(),
                    r.check.clone(),
                    r.margin.map(fmt::num).unwrap_or_default(),
                    r.violation.to_string(),
                    r.error.clone().unwrap_or_default(),
                ])
                .expect("in-memory write");
        }
    }
    writer.flush().expect("in-memory write");
    drop(writer);
    out
}

pub fn report_json(report: &EnsembleReport) -> String {
    serde_json::to_string_pretty(report).expect("serializable report") + "\n"
}

/// Writes `report.json` and `samples.csv` under `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    report: &EnsembleReport,
    outcomes: &[SampleOutcome],
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_file(&dir.join("report.json"), report_json(report).as_bytes())?;
    write_file(
        &dir.join("samples.csv"),
        &samples_csv(&report.config, outcomes),
    )
}

/// One CSV row per check: `check,evaluated,min_margin,max_margin,mean_margin,violations,errors,worst_seed`.
pub fn summary_table(report: &EnsembleReport) -> String {
    let opt = |x: Option<f64>| x.map(fmt::num).unwrap_or_default();
    let mut s = String::from(
        "check,evaluated,min_margin,max_margin,mean_margin,violations,errors,worst_seed\n",
    );
    for c in &report.summaries {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.check,
            c.evaluated,
            opt(c.min_margin),
            opt(c.max_margin),
            opt(c.mean_margin),
            c.violations,
            c.errors,
            c.worst_seed.map(|x| x.to_string()).unwrap_or_default()
        ));
    }
    s
}
