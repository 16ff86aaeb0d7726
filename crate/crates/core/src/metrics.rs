//! Fourier-plane forward model and reconstruction quality metrics.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{self, BinaryPattern, ComplexField, PhaseMap, RealImage};

/// Fraction of the target maximum that defines the first-order region.
pub const DEFAULT_MASK_THRESHOLD: f64 = 0.5;

/// Header row of the trace CSV.
pub const TRACE_CSV_HEADER: &str = "iteration,field_change,first_order_std,rms_error";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub field_change: f64,
    pub first_order_std: f64,
    pub rms_error: f64,
}

/// Per-iteration metrics, indices strictly increasing from 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn push(&mut self, record: TraceRecord) -> Result<()> {
        let expected_min = self.records.last().map_or(1, |r| r.iteration + 1);
        if record.iteration < expected_min {
            return Err(Error::InvalidConfig(format!(
                "trace iteration {} after {}",
                record.iteration,
                expected_min - 1
            )));
        }
        for (name, v) in [
            ("field_change", record.field_change),
            ("first_order_std", record.first_order_std),
            ("rms_error", record.rms_error),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "trace {name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Record for a 1-based iteration index.
    pub fn at(&self, iteration: usize) -> Option<&TraceRecord> {
        self.records.iter().find(|r| r.iteration == iteration)
    }

    /// CSV text with [`TRACE_CSV_HEADER`]; floats in `{:.9e}` (10 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:.9e},{:.9e},{:.9e}",
                r.iteration, r.field_change, r.first_order_std, r.rms_error
            );
        }
        out
    }
}

/// Membership flags for the region over which metrics are evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl RegionMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width * height != data.len() {
            return Err(Error::DataLength {
                width,
                height,
                found: data.len(),
            });
        }
        if !data.iter().any(|&b| b) {
            return Err(Error::EmptyMask);
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    fn check(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: dims,
            });
        }
        Ok(())
    }

    fn select<'a>(&'a self, img: &'a RealImage) -> impl Iterator<Item = f64> + 'a {
        img.data()
            .iter()
            .zip(&self.data)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v)
    }
}

/// Image-plane intensity `|DFT(√source · pattern · e^{i·aberration})|²`.
///
/// `source` is an intensity. The result keeps the DC term at `(0, 0)`.
pub fn reconstruct(
    pattern: &BinaryPattern,
    source: &RealImage,
    aberration: Option<&PhaseMap>,
) -> Result<RealImage> {
    source.ensure_same_dims(pattern.dims())?;
    let (w, h) = pattern.dims();
    let data: Vec<Complex64> = match aberration {
        Some(ab) => {
            ab.ensure_same_dims(pattern.dims())?;
            pattern
                .data()
                .iter()
                .zip(source.data())
                .zip(ab.data())
                .map(|((&p, &s), &phi)| {
                    if p == 1 {
                        Complex64::from_polar(s.sqrt(), phi)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect()
        }
        None => pattern
            .data()
            .iter()
            .zip(source.data())
            .map(|(&p, &s)| Complex64::new(if p == 1 { s.sqrt() } else { 0.0 }, 0.0))
            .collect(),
    };
    let spectrum = field::dft2(&ComplexField::new(w, h, data)?);
    RealImage::new(w, h, spectrum.data().iter().map(|c| c.norm_sqr()).collect())
}

/// Pixels where `target ≥ threshold_fraction · max(target)`.
pub fn target_support_mask(target: &RealImage, threshold_fraction: f64) -> Result<RegionMask> {
    if !(threshold_fraction > 0.0 && threshold_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "mask threshold must lie in (0, 1], got {threshold_fraction}"
        )));
    }
    target.require_nonzero("target")?;
    let cutoff = threshold_fraction * target.max();
    let (w, h) = target.dims();
    RegionMask::new(w, h, target.data().iter().map(|&v| v >= cutoff).collect())
}

fn masked_mean(img: &RealImage, mask: &RegionMask) -> f64 {
    mask.select(img).sum::<f64>() / mask.count() as f64
}

/// Population standard deviation over the mask divided by the mean over the mask.
pub fn first_order_std(recon: &RealImage, mask: &RegionMask) -> Result<f64> {
    mask.check(recon.dims())?;
    let mean = masked_mean(recon, mask);
    if mean <= 0.0 {
        return Err(Error::ZeroMean("reconstruction"));
    }
    let var = mask.select(recon).map(|v| (v - mean).powi(2)).sum::<f64>() / mask.count() as f64;
    Ok(var.sqrt() / mean)
}

/// RMS over the mask of the difference between `recon` and `target`, each
/// first scaled to unit mean over the mask.
pub fn rms_error(recon: &RealImage, target: &RealImage, mask: &RegionMask) -> Result<f64> {
    recon.ensure_same_dims(target.dims())?;
    mask.check(recon.dims())?;
    let recon_mean = masked_mean(recon, mask);
    if recon_mean <= 0.0 {
        return Err(Error::ZeroMean("reconstruction"));
    }
    let target_mean = masked_mean(target, mask);
    if target_mean <= 0.0 {
        return Err(Error::ZeroMean("target"));
    }
    let sum_sq: f64 = mask
        .select(recon)
        .zip(mask.select(target))
        .map(|(r, t)| (r / recon_mean - t / target_mean).powi(2))
        .sum();
    Ok((sum_sq / mask.count() as f64).sqrt())
}

/// Total intensity outside the mask, a proxy for stray light around the image.
pub fn intensity_outside(recon: &RealImage, mask: &RegionMask) -> Result<f64> {
    mask.check(recon.dims())?;
    Ok(recon
        .data()
        .iter()
        .zip(mask.data())
        .filter(|(_, &m)| !m)
        .map(|(&v, _)| v)
        .sum())
}
