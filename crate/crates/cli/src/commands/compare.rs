//! Side-by-side GS/BGS comparison at a fixed iteration count.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use holobgs::imageio::ImageFileFormat;
use holobgs::metrics::DEFAULT_MASK_THRESHOLD;
use holobgs::{
    first_order_std, intensity_outside, reconstruct, rms_error, run, target_support_mask,
    Algorithm, IterationConfig, RealImage,
};

use super::{create_output_dir, display_view, load_target, png_bytes, write_output};
use crate::error::{CliError, CliResult};
use crate::manifest::CompareManifest;

pub const METRICS_FILE: &str = "compare_metrics.csv";
const PANEL_GAP: usize = 2;

#[derive(Debug, Clone)]
pub struct AlgorithmOutcome {
    pub algorithm: Algorithm,
    pub recon: RealImage,
    pub first_order_std: f64,
    pub rms_error: f64,
    /// Total intensity outside the target mask (DC and twin included).
    pub outside_intensity: f64,
}

#[derive(Debug, Clone)]
pub struct TargetComparison {
    pub name: String,
    /// Target in DC-at-origin layout.
    pub target: RealImage,
    pub outcomes: [AlgorithmOutcome; 2],
}

/// Runs GS and BGS for exactly `iterations` steps each and scores the
/// binarized results over the target support.
pub fn compare_target(
    target: &RealImage,
    source: &RealImage,
    iterations: usize,
) -> CliResult<[AlgorithmOutcome; 2]> {
    let mask = target_support_mask(target, DEFAULT_MASK_THRESHOLD)?;
    let outcome = |algorithm| -> CliResult<AlgorithmOutcome> {
        let cfg = IterationConfig {
            max_iterations: iterations,
            stop_on_convergence: false,
            ..IterationConfig::new(algorithm)
        };
        let (_, pattern) = run(target, source, &cfg)?;
        let recon = reconstruct(&pattern, source, None)?;
        Ok(AlgorithmOutcome {
            algorithm,
            first_order_std: first_order_std(&recon, &mask)?,
            rms_error: rms_error(&recon, target, &mask)?,
            outside_intensity: intensity_outside(&recon, &mask)?,
            recon,
        })
    };
    Ok([outcome(Algorithm::Gs)?, outcome(Algorithm::Bgs)?])
}

/// Image files in `dir`, sorted by name.
pub fn list_targets(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?
            .path();
        if path.is_file() && ImageFileFormat::from_path(&path).is_ok() {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::validation(format!(
            "no targets found in {}",
            dir.display()
        )));
    }
    Ok(paths)
}

fn unit_panel(img: &RealImage) -> CliResult<RealImage> {
    let max = img.max();
    Ok(if max > 0.0 {
        img.scaled(1.0 / max)?
    } else {
        img.clone()
    })
}

/// `target | GS | BGS`, each panel scaled to its own maximum, in the
/// centered view.
pub fn panel_row(c: &TargetComparison) -> CliResult<RealImage> {
    let (w, h) = c.target.dims();
    let panels = [
        unit_panel(&c.target.centered())?,
        unit_panel(&display_view(&c.outcomes[0].recon)?)?,
        unit_panel(&display_view(&c.outcomes[1].recon)?)?,
    ];
    let total_w = 3 * w + 2 * PANEL_GAP;
    let mut data = vec![0.0; total_w * h];
    for (i, panel) in panels.iter().enumerate() {
        let x0 = i * (w + PANEL_GAP);
        for (y, row) in panel.data().chunks_exact(w).enumerate() {
            data[y * total_w + x0..y * total_w + x0 + w].copy_from_slice(row);
        }
    }
    Ok(RealImage::new(total_w, h, data)?)
}

pub fn metrics_csv(results: &[TargetComparison], iterations: usize) -> String {
    let mut out =
        String::from("target,algorithm,iterations,first_order_std,rms_error,outside_intensity\n");
    for c in results {
        for o in &c.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{:.9e},{:.9e},{:.9e}",
                c.name,
                o.algorithm,
                iterations,
                o.first_order_std,
                o.rms_error,
                o.outside_intensity
            );
        }
    }
    out
}

pub fn summary(results: &[TargetComparison]) -> String {
    let mut out = String::new();
    for c in results {
        let [gs, bgs] = &c.outcomes;
        let _ = writeln!(
            out,
            "{}: rms_error gs {:.6e}, bgs {:.6e}",
            c.name, gs.rms_error, bgs.rms_error
        );
    }
    out
}

pub fn cmd_compare(m: &CompareManifest) -> CliResult<Vec<TargetComparison>> {
    if m.iterations == 0 {
        return Err(CliError::validation("iterations must be at least 1"));
    }
    let paths = list_targets(&m.targets_dir)?;
    let mut stems = BTreeSet::new();
    let mut results = Vec::with_capacity(paths.len());
    for path in &paths {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("target")
            .to_string();
        if !stems.insert(name.clone()) {
            return Err(CliError::validation(format!(
                "two targets share the name {name:?}"
            )));
        }
        let target = load_target(path)?;
        let (w, h) = target.dims();
        let source = m.source.intensity(w, h)?;
        let outcomes = compare_target(&target, &source, m.iterations)?;
        results.push(TargetComparison {
            name,
            target,
            outcomes,
        });
    }

    let mut files = Vec::with_capacity(results.len() + 1);
    for c in &results {
        let path = m.output_dir.join(format!("{}_compare.png", c.name));
        files.push((path.clone(), png_bytes(&panel_row(c)?, false, &path)?));
    }
    files.push((
        m.output_dir.join(METRICS_FILE),
        metrics_csv(&results, m.iterations).into_bytes(),
    ));

    create_output_dir(&m.output_dir)?;
    for (path, bytes) in files {
        write_output(&path, &bytes)?;
    }
    Ok(results)
}
