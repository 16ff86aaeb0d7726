use holobgs::imageio::{load_pattern, load_phase_map};
use holobgs::metrics::DEFAULT_MASK_THRESHOLD;
use holobgs::{first_order_std, reconstruct, rms_error, target_support_mask, RealImage};

use super::{create_output_dir, display_view, load_target, png_bytes, write_output};
use crate::error::CliResult;
use crate::manifest::ReconstructManifest;

pub const RECON_FILE: &str = "recon.png";

#[derive(Debug, Clone)]
pub struct ReconstructReport {
    pub recon: RealImage,
    /// `(first_order_std, rms_error)` when a target was supplied.
    pub metrics: Option<(f64, f64)>,
}

impl ReconstructReport {
    pub fn summary(&self) -> String {
        match self.metrics {
            Some((std, rms)) => format!("first_order_std: {std:.9e}\nrms_error: {rms:.9e}\n"),
            None => format!("total_intensity: {:.9e}\n", self.recon.sum()),
        }
    }
}

pub fn reconstruct_pattern(m: &ReconstructManifest) -> CliResult<ReconstructReport> {
    let pattern = load_pattern(&m.pattern)?;
    let (w, h) = pattern.dims();
    let source = m.source.intensity(w, h)?;
    let aberration = m.phase_map.as_deref().map(load_phase_map).transpose()?;
    let target = m.target.as_deref().map(load_target).transpose()?;

    let recon = reconstruct(&pattern, &source, aberration.as_ref())?;
    let metrics = match &target {
        Some(t) => {
            let mask = target_support_mask(t, DEFAULT_MASK_THRESHOLD)?;
            Some((
                first_order_std(&recon, &mask)?,
                rms_error(&recon, t, &mask)?,
            ))
        }
        None => None,
    };
    Ok(ReconstructReport { recon, metrics })
}

pub fn cmd_reconstruct(m: &ReconstructManifest) -> CliResult<ReconstructReport> {
    let report = reconstruct_pattern(m)?;
    let path = m.output_dir.join(RECON_FILE);
    let png = png_bytes(&display_view(&report.recon)?, true, &path)?;
    create_output_dir(&m.output_dir)?;
    write_output(&path, &png)?;
    Ok(report)
}
