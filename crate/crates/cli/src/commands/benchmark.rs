//! Convergence benchmark: uniform squares at the quadrant point, GS against
//! BGS, a fixed number of iterations each.

use std::fmt::Write as _;

use holobgs::profiles::{quadrant_point, uniform_square};
use holobgs::{run, Algorithm, ConvergenceTrace, IterationConfig, RealImage};
use rayon::prelude::*;

use super::{create_output_dir, write_output};
use crate::error::{CliError, CliResult};
use crate::manifest::BenchmarkManifest;

pub const CSV_FILE: &str = "benchmark.csv";
pub const DATA_FILE: &str = "benchmark.dat";
pub const THREADS_ENV: &str = "HOLOBGS_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub algorithm: Algorithm,
    pub square_size: usize,
    pub trace: ConvergenceTrace,
}

impl Curve {
    pub fn label(&self) -> String {
        format!("{}{}", self.algorithm, self.square_size)
    }
}

pub fn validate(m: &BenchmarkManifest) -> CliResult<()> {
    if m.field_size < 4 {
        return Err(CliError::validation(format!(
            "field size {} is too small",
            m.field_size
        )));
    }
    if m.max_iterations == 0 {
        return Err(CliError::validation("iterations must be at least 1"));
    }
    if m.square_sizes.is_empty() {
        return Err(CliError::validation("no square sizes given"));
    }
    for &s in &m.square_sizes {
        if s == 0 || 2 * s >= m.field_size {
            return Err(CliError::validation(format!(
                "square size {s} must be positive and below half the field size {}",
                m.field_size
            )));
        }
    }
    Ok(())
}

/// Reads the parallelism cap from `HOLOBGS_THREADS`; unset means rayon's default.
pub fn thread_cap() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::validation(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn run_curve(
    n: usize,
    size: usize,
    algorithm: Algorithm,
    iterations: usize,
    source: &RealImage,
) -> CliResult<Curve> {
    let (cx, cy) = quadrant_point(n, n);
    let target = uniform_square(n, n, size, cx, cy)?;
    let cfg = IterationConfig {
        max_iterations: iterations,
        stop_on_convergence: false,
        ..IterationConfig::new(algorithm)
    };
    let (state, _) = run(&target, source, &cfg)?;
    Ok(Curve {
        algorithm,
        square_size: size,
        trace: state.trace,
    })
}

/// Runs every square size with GS and BGS; curves come back ordered by
/// square size (as given), GS before BGS, regardless of scheduling.
pub fn run_benchmark(m: &BenchmarkManifest) -> CliResult<Vec<Curve>> {
    validate(m)?;
    let n = m.field_size;
    let source = RealImage::filled(n, n, 1.0)?;
    let jobs: Vec<(usize, Algorithm)> = m
        .square_sizes
        .iter()
        .flat_map(|&s| [(s, Algorithm::Gs), (s, Algorithm::Bgs)])
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(cap) = thread_cap()? {
        builder = builder.num_threads(cap);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(size, alg)| run_curve(n, size, alg, m.max_iterations, &source))
            .collect()
    })
}

/// One row per curve and iteration.
pub fn benchmark_csv(curves: &[Curve]) -> String {
    let mut out = String::from("algorithm,square_size,iteration,first_order_std,field_change\n");
    for c in curves {
        for r in c.trace.records() {
            let _ = writeln!(
                out,
                "{},{},{},{:.9e},{:.9e}",
                c.algorithm, c.square_size, r.iteration, r.first_order_std, r.field_change
            );
        }
    }
    out
}

/// Whitespace separated columns for gnuplot: iteration, then the first-order
/// std of every curve.
pub fn gnuplot_data(curves: &[Curve]) -> String {
    let mut out = String::from("# iteration");
    for c in curves {
        out.push(' ');
        out.push_str(&c.label());
    }
    out.push('\n');
    let rows = curves.iter().map(|c| c.trace.len()).max().unwrap_or(0);
    for i in 0..rows {
        let _ = write!(out, "{}", i + 1);
        for c in curves {
            match c.trace.records().get(i) {
                Some(r) => {
                    let _ = write!(out, " {:.9e}", r.first_order_std);
                }
                None => out.push_str(" NaN"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn summary(curves: &[Curve]) -> String {
    let mut out = String::new();
    for c in curves {
        if let Some(last) = c.trace.last() {
            let _ = writeln!(
                out,
                "{}: first_order_std at iteration {} = {:.6e}",
                c.label(),
                last.iteration,
                last.first_order_std
            );
        }
    }
    out
}

pub fn cmd_benchmark(m: &BenchmarkManifest) -> CliResult<Vec<Curve>> {
    let curves = run_benchmark(m)?;
    create_output_dir(&m.output_dir)?;
    write_output(
        &m.output_dir.join(CSV_FILE),
        benchmark_csv(&curves).as_bytes(),
    )?;
    write_output(
        &m.output_dir.join(DATA_FILE),
        gnuplot_data(&curves).as_bytes(),
    )?;
    Ok(curves)
}
