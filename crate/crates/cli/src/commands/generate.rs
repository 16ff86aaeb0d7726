use holobgs::imageio::{encode_pattern, load_phase_map};
use holobgs::metrics::DEFAULT_MASK_THRESHOLD;
use holobgs::{
    algorithms::compensate_and_binarize_with, first_order_std, reconstruct, rms_error, run,
    target_support_mask, AlgorithmState, BinaryPattern, PhaseMap, RealImage,
};

use super::{create_output_dir, display_view, load_target, png_bytes, write_output};
use crate::error::CliResult;
use crate::manifest::GenerateManifest;

pub const PATTERN_FILE: &str = "pattern.pbm";
pub const RECON_FILE: &str = "recon.png";
pub const TRACE_FILE: &str = "trace.csv";

#[derive(Debug, Clone)]
pub struct GenerateReport {
    pub state: AlgorithmState,
    pub pattern: BinaryPattern,
    /// Simulated image plane (DC at origin), through the aberration if one was given.
    pub recon: RealImage,
    pub target: RealImage,
    pub first_order_std: f64,
    pub rms_error: f64,
}

impl GenerateReport {
    pub fn summary(&self) -> String {
        format!(
            "iterations: {}\nconverged_at: {}\nfirst_order_std: {:.9e}\nrms_error: {:.9e}\n",
            self.state.iteration,
            self.state
                .converged_at
                .map_or("none".to_string(), |k| k.to_string()),
            self.first_order_std,
            self.rms_error
        )
    }
}

/// Computes the hologram without touching the filesystem beyond reading inputs.
pub fn generate(m: &GenerateManifest) -> CliResult<GenerateReport> {
    let target = load_target(&m.target)?.rolled(m.offset[0] as isize, m.offset[1] as isize);
    let (w, h) = target.dims();
    let source = m.source.intensity(w, h)?;
    let aberration: Option<PhaseMap> = m.phase_map.as_deref().map(load_phase_map).transpose()?;
    if let Some(ab) = &aberration {
        if ab.dims() != (w, h) {
            return Err(holobgs::Error::DimensionMismatch {
                expected: (w, h),
                found: ab.dims(),
            }
            .into());
        }
    }

    let (state, plain) = run(&target, &source, &m.iterations)?;
    let theta = m.iterations.theta_convention;
    let pattern = match (&aberration, m.compensation) {
        (Some(ab), Some(sign)) => compensate_and_binarize_with(&state.field, ab, sign, theta)?,
        (Some(_), None) | (None, _) => plain,
    };
    let recon = reconstruct(&pattern, &source, aberration.as_ref())?;
    let mask = target_support_mask(&target, DEFAULT_MASK_THRESHOLD)?;
    Ok(GenerateReport {
        first_order_std: first_order_std(&recon, &mask)?,
        rms_error: rms_error(&recon, &target, &mask)?,
        state,
        pattern,
        recon,
        target,
    })
}

pub fn cmd_generate(m: &GenerateManifest) -> CliResult<GenerateReport> {
    let report = generate(m)?;
    let recon_path = m.output_dir.join(RECON_FILE);
    let recon_png = png_bytes(&display_view(&report.recon)?, true, &recon_path)?;

    create_output_dir(&m.output_dir)?;
    write_output(
        &m.output_dir.join(PATTERN_FILE),
        &encode_pattern(&report.pattern),
    )?;
    write_output(&recon_path, &recon_png)?;
    write_output(
        &m.output_dir.join(TRACE_FILE),
        report.state.trace.to_csv().as_bytes(),
    )?;
    Ok(report)
}
