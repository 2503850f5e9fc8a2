//! Runs every (instance, method, repeat) combination and aggregates errors,
//! failure rates and timings per method.

use std::io::Write;
use std::time::Instant;

use magsac_core::metrics::is_failure;
use magsac_core::{run_estimation, EngineConfig, EngineError, EstimationReport, SamplerKind};
use rayon::prelude::*;
use thiserror::Error;

use crate::format::format_g;
use crate::instance::ProblemInstance;
use crate::method::MethodSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub instance: String,
    pub method: String,
    pub repeat: usize,
    pub seed: u64,
    /// Pixels; RMSE on labeled inliers for H, SGD for F. Infinite when no
    /// model was found, NaN when the instance has no usable ground truth.
    pub error: f64,
    pub failure: bool,
    pub iterations: usize,
    pub inliers: usize,
    pub status: String,
    /// Wall time of the estimation call alone.
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub runs: usize,
    pub median_error: f64,
    /// Percent of runs flagged as failures.
    pub failure_rate: f64,
    pub mean_time_ms: f64,
    pub median_iterations: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfSeries {
    pub method: String,
    /// (error, fraction of runs with error ≤ this), errors ascending.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutput {
    /// Sorted by instance, method and repeat.
    pub records: Vec<BenchmarkRecord>,
    /// Sorted by method id.
    pub summary: Vec<SummaryRow>,
    pub cdf: Vec<CdfSeries>,
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchmarkError {
    #[error("no instances to run")]
    NoInstances,
    #[error("no methods to run")]
    NoMethods,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one repeat on one instance. It depends only on the master seed,
/// the instance id and the repeat index, so every method sees the same seeds
/// and editing one instance leaves the others' seeds alone.
pub fn task_seed(master: u64, instance_id: &str, repeat: usize) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a(instance_id.as_bytes())) ^ repeat as u64)
}

/// Engine configuration for a method on an instance. PROSAC ranks points by
/// their order in the instance, first best.
pub fn configure(method: &MethodSpec, instance: &ProblemInstance, seed: u64) -> Option<EngineConfig> {
    let kind = instance.kind?;
    let mut config = method.engine_config(kind, seed);
    if method.sampler == SamplerKind::Prosac {
        config.ordering = Some((0..instance.points.len()).map(|i| -(i as f64)).collect());
    }
    Some(config)
}

/// Runs the estimator and fills in its wall time.
pub fn estimate(instance: &ProblemInstance, config: &EngineConfig) -> Result<EstimationReport, EngineError> {
    let start = Instant::now();
    let result = run_estimation(&instance.points, instance.sizes, config);
    let elapsed = start.elapsed();
    result.map(|mut r| {
        r.wall_time = elapsed;
        r
    })
}

pub fn run_single(instance: &ProblemInstance, method: &MethodSpec, repeat: usize, seed: u64) -> BenchmarkRecord {
    let mut record = BenchmarkRecord {
        instance: instance.id.clone(),
        method: method.id.clone(),
        repeat,
        seed,
        error: f64::INFINITY,
        failure: true,
        iterations: 0,
        inliers: 0,
        status: String::new(),
        wall_time_ms: 0.0,
    };
    let Some(config) = configure(method, instance, seed) else {
        record.error = f64::NAN;
        record.status = "unknown-model-kind".to_owned();
        return record;
    };
    let start = Instant::now();
    let result = run_estimation(&instance.points, instance.sizes, &config);
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(report) => {
            record.iterations = report.iterations;
            record.inliers = report.inlier_count;
            record.error = match &instance.truth {
                Some(truth) => truth.error_of(&report.model, &instance.points).unwrap_or(f64::NAN),
                None => f64::NAN,
            };
            record.failure = is_failure(record.error, &instance.sizes);
            record.status = if record.error.is_nan() { "no-ground-truth" } else { "ok" }.to_owned();
        }
        Err(EngineError::NoModelFound) => {
            record.iterations = config.max_iterations;
            record.status = "no-model".to_owned();
        }
        Err(e) => {
            record.status = format!("error: {e}");
        }
    }
    record
}

pub fn run_benchmark(
    instances: &[ProblemInstance],
    methods: &[MethodSpec],
    repeats: usize,
    master_seed: u64,
) -> Result<BenchmarkOutput, BenchmarkError> {
    if instances.is_empty() {
        return Err(BenchmarkError::NoInstances);
    }
    if methods.is_empty() {
        return Err(BenchmarkError::NoMethods);
    }
    let tasks: Vec<(usize, usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..methods.len()).flat_map(move |m| (0..repeats).map(move |r| (i, m, r))))
        .collect();
    let mut records: Vec<BenchmarkRecord> = tasks
        .par_iter()
        .map(|&(i, m, r)| {
            let instance = &instances[i];
            run_single(instance, &methods[m], r, task_seed(master_seed, &instance.id, r))
        })
        .collect();
    records.sort_by(|a, b| (&a.instance, &a.method, a.repeat).cmp(&(&b.instance, &b.method, b.repeat)));
    let summary = summarize(&records);
    let cdf = cdf(&records);
    Ok(BenchmarkOutput { records, summary, cdf })
}

/// Median with the mean of the two middle values for even counts; NaN
/// values sort last.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn methods_of(records: &[BenchmarkRecord]) -> Vec<&str> {
    let mut methods: Vec<&str> = records.iter().map(|r| r.method.as_str()).collect();
    methods.sort_unstable();
    methods.dedup();
    methods
}

/// Aggregates per method, ordered by method id.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<SummaryRow> {
    methods_of(records)
        .into_iter()
        .map(|method| {
            let rows: Vec<&BenchmarkRecord> = records.iter().filter(|r| r.method == method).collect();
            let runs = rows.len();
            let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
            let iterations: Vec<f64> = rows.iter().map(|r| r.iterations as f64).collect();
            let failures = rows.iter().filter(|r| r.failure).count();
            SummaryRow {
                method: method.to_owned(),
                runs,
                median_error: median(&errors),
                failure_rate: 100.0 * failures as f64 / runs as f64,
                mean_time_ms: rows.iter().map(|r| r.wall_time_ms).sum::<f64>() / runs as f64,
                median_iterations: median(&iterations),
            }
        })
        .collect()
}

pub fn cdf(records: &[BenchmarkRecord]) -> Vec<CdfSeries> {
    methods_of(records)
        .into_iter()
        .map(|method| {
            let mut errors: Vec<f64> = records.iter().filter(|r| r.method == method).map(|r| r.error).collect();
            errors.sort_by(|a, b| a.total_cmp(b));
            let n = errors.len() as f64;
            CdfSeries {
                method: method.to_owned(),
                points: errors
                    .into_iter()
                    .enumerate()
                    .map(|(i, e)| (e, (i + 1) as f64 / n))
                    .collect(),
            }
        })
        .collect()
}

/// Records without timings, so identical seeds give identical bytes.
pub fn write_records_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "instance",
        "method",
        "repeat",
        "seed",
        "error",
        "failure",
        "iterations",
        "inliers",
        "status",
    ])?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.method.clone(),
            r.repeat.to_string(),
            r.seed.to_string(),
            format_g(r.error),
            u8::from(r.failure).to_string(),
            r.iterations.to_string(),
            r.inliers.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timing_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "method", "repeat", "wall_time_ms"])?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.method.clone(),
            r.repeat.to_string(),
            format_g(r.wall_time_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cdf_csv<W: Write>(series: &[CdfSeries], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "error", "fraction"])?;
    for s in series {
        for &(e, f) in &s.points {
            w.write_record([s.method.clone(), format_g(e), format_g(f)])?;
        }
    }
    w.flush()?;
    Ok(())
}

const SUMMARY_HEADER: [&str; 6] = [
    "method",
    "runs",
    "median_error_px",
    "failure_rate_pct",
    "mean_time_ms",
    "median_iterations",
];

fn summary_cells(row: &SummaryRow) -> [String; 6] {
    [
        row.method.clone(),
        row.runs.to_string(),
        format_g(row.median_error),
        format_g(row.failure_rate),
        format_g(row.mean_time_ms),
        format_g(row.median_iterations),
    ]
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        w.write_record(summary_cells(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Column-aligned summary; the method column is left-aligned, numbers right.
pub fn summary_text(rows: &[SummaryRow]) -> String {
    let table: Vec<[String; 6]> = std::iter::once(SUMMARY_HEADER.map(str::to_owned))
        .chain(rows.iter().map(summary_cells))
        .collect();
    let mut widths = [0usize; 6];
    for row in &table {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| {
                if i == 0 {
                    format!("{cell:<width$}", width = widths[i])
                } else {
                    format!("{cell:>width$}", width = widths[i])
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
