//! Command implementations. Each command validates and loads all of its
//! inputs before it creates the output directory, so a failed run leaves
//! nothing behind.

pub mod benchmark;
pub mod compare;
pub mod generate;
pub mod reconstruct;

use std::fs;
use std::path::Path;

use holobgs::imageio::{encode_intensity, load_intensity, write_atomic, BitDepth, ImageFileFormat};
use holobgs::RealImage;

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// Runs a resolved-or-not manifest and returns the text summary to print.
pub fn execute(mut manifest: RunManifest) -> CliResult<String> {
    manifest.resolve_paths()?;
    match &manifest {
        RunManifest::Generate(m) => generate::cmd_generate(m).map(|r| r.summary()),
        RunManifest::Reconstruct(m) => reconstruct::cmd_reconstruct(m).map(|r| r.summary()),
        RunManifest::Benchmark(m) => benchmark::cmd_benchmark(m).map(|c| benchmark::summary(&c)),
        RunManifest::Compare(m) => compare::cmd_compare(m).map(|r| compare::summary(&r)),
    }
    .and_then(|summary| {
        manifest.save()?;
        Ok(summary)
    })
}

/// Loads a target intensity stored in the centered (DC at image center)
/// view and returns it in DC-at-origin layout.
pub fn load_target(path: &Path) -> CliResult<RealImage> {
    let format = ImageFileFormat::from_path(path)?;
    Ok(load_intensity(path, format)?.uncentered())
}

/// Centered copy of a reconstruction with the DC pixel clipped to the
/// brightest other pixel, so the first order is visible after normalizing.
pub fn display_view(recon: &RealImage) -> CliResult<RealImage> {
    let mut data = recon.data().to_vec();
    let rest_max = data[1..].iter().copied().fold(0.0, f64::max);
    data[0] = data[0].min(rest_max);
    Ok(RealImage::new(recon.width(), recon.height(), data)?.centered())
}

pub fn png_bytes(img: &RealImage, normalize: bool, path: &Path) -> CliResult<Vec<u8>> {
    Ok(encode_intensity(
        img,
        path,
        ImageFileFormat::Png,
        normalize,
        BitDepth::Eight,
    )?)
}

pub fn create_output_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("{}: {e}", dir.display())))
}

pub fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    Ok(write_atomic(path, bytes)?)
}
