//! Synthetic targets, illumination profiles and aberrations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PhaseMap, RealImage};

/// Uniform square of side `size` centered on `(cx, cy)`, in DC-at-origin
/// coordinates. Pixels wrap around the grid edges.
pub fn uniform_square(
    width: usize,
    height: usize,
    size: usize,
    cx: usize,
    cy: usize,
) -> Result<RealImage> {
    if size == 0 || size > width || size > height {
        return Err(Error::InvalidConfig(format!(
            "square size {size} does not fit a {width}x{height} grid"
        )));
    }
    let x0 = (cx + width - size / 2) % width;
    let y0 = (cy + height - size / 2) % height;
    let inside = |p: usize, start: usize, n: usize| (p + n - start) % n < size;
    RealImage::from_fn(width, height, |x, y| {
        (inside(x, x0, width) && inside(y, y0, height)) as u8 as f64
    })
}

/// The `(width/4, height/4)` point, where benchmark targets sit so that the
/// first order stays clear of the DC term and of its conjugate twin.
pub fn quadrant_point(width: usize, height: usize) -> (usize, usize) {
    (width / 4, height / 4)
}

/// Illumination intensity on the mirror plane.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SourceProfile {
    #[default]
    Uniform,
    /// Centered Gaussian beam, intensity `exp(−2r²/waist²)`, waist in pixels.
    Gaussian { waist: f64 },
}

impl SourceProfile {
    pub fn intensity(&self, width: usize, height: usize) -> Result<RealImage> {
        match *self {
            SourceProfile::Uniform => RealImage::filled(width, height, 1.0),
            SourceProfile::Gaussian { waist } => {
                if !(waist > 0.0 && waist.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "gaussian waist must be positive, got {waist}"
                    )));
                }
                let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
                RealImage::from_fn(width, height, |x, y| {
                    let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    (-2.0 * r2 / (waist * waist)).exp()
                })
            }
        }
    }
}

/// Defocus-like aberration: `span · r² / r_max²` about the grid center, where
/// `r_max` is the center-to-corner distance, so phases run from 0 at the
/// center to `span` at the corners before wrapping.
pub fn quadratic_aberration(width: usize, height: usize, span: f64) -> Result<PhaseMap> {
    let (cx, cy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
    let r2_max = cx * cx + cy * cy;
    PhaseMap::from_fn(width, height, |x, y| {
        let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
        span * r2 / r2_max
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_is_centered_with_exact_size() {
        let t = uniform_square(256, 256, 17, 64, 64).unwrap();
        assert_eq!(t.sum(), 289.0);
        assert_eq!(t.get(56, 56), 1.0);
        assert_eq!(t.get(72, 72), 1.0);
        assert_eq!(t.get(55, 64), 0.0);
        assert_eq!(t.get(73, 64), 0.0);

        let one = uniform_square(8, 8, 1, 2, 2).unwrap();
        assert_eq!(one.sum(), 1.0);
        assert_eq!(one.get(2, 2), 1.0);
    }

    #[test]
    fn square_wraps_at_edges() {
        let t = uniform_square(8, 8, 3, 0, 0).unwrap();
        assert_eq!(t.sum(), 9.0);
        assert_eq!(t.get(7, 7), 1.0);
        assert_eq!(t.get(1, 1), 1.0);
    }

    #[test]
    fn square_must_fit() {
        assert!(uniform_square(8, 8, 0, 2, 2).is_err());
        assert!(uniform_square(8, 8, 9, 2, 2).is_err());
    }

    #[test]
    fn gaussian_peaks_at_center() {
        let g = SourceProfile::Gaussian { waist: 3.0 }
            .intensity(9, 9)
            .unwrap();
        assert_eq!(g.get(4, 4), 1.0);
        assert!((g.get(7, 4) - (-2.0f64).exp()).abs() < 1e-15);
        assert!(SourceProfile::Gaussian { waist: 0.0 }
            .intensity(4, 4)
            .is_err());
    }

    #[test]
    fn quadratic_aberration_spans_requested_range() {
        let ab = quadratic_aberration(9, 9, 3.0).unwrap();
        assert_eq!(ab.get(4, 4), 0.0);
        assert!((ab.get(0, 0) - 3.0).abs() < 1e-12);
    }
}
