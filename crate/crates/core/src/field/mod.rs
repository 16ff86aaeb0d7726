//! Grid containers shared by every stage of the pipeline, plus the 2D
//! Fourier transforms that link the mirror plane to the image plane.
//!
//! All grids are row-major with the origin at the top-left pixel. Fourier
//! domain grids keep the DC term at index `(0, 0)`; [`RealImage::centered`]
//! gives the quadrant-swapped view used for files and display.

mod transform;

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use transform::{amplitude, combine, dft2, idft2, phase};

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn check_dims(width: usize, height: usize, len: usize, min: usize) -> Result<()> {
    if width < min || height < min {
        return Err(Error::TooSmall { width, height, min });
    }
    if width * height != len {
        return Err(Error::DataLength {
            width,
            height,
            found: len,
        });
    }
    Ok(())
}

/// Cyclic shift: output pixel `(x + dx, y + dy)` takes input pixel `(x, y)`.
fn roll<T: Copy>(data: &[T], width: usize, height: usize, dx: isize, dy: isize) -> Vec<T> {
    let sx = dx.rem_euclid(width as isize) as usize;
    let sy = dy.rem_euclid(height as isize) as usize;
    let mut out = data.to_vec();
    for y in 0..height {
        let ty = (y + sy) % height;
        for x in 0..width {
            out[ty * width + (x + sx) % width] = data[y * width + x];
        }
    }
    out
}

macro_rules! grid_accessors {
    ($ty:ty, $elem:ty) => {
        impl $ty {
            pub fn width(&self) -> usize {
                self.width
            }

            pub fn height(&self) -> usize {
                self.height
            }

            /// `(width, height)`
            pub fn dims(&self) -> (usize, usize) {
                (self.width, self.height)
            }

            pub fn data(&self) -> &[$elem] {
                &self.data
            }

            pub fn into_data(self) -> Vec<$elem> {
                self.data
            }

            pub fn get(&self, x: usize, y: usize) -> $elem {
                self.data[y * self.width + x]
            }

            pub fn len(&self) -> usize {
                self.data.len()
            }

            pub fn is_empty(&self) -> bool {
                self.data.is_empty()
            }

            #[allow(dead_code)]
            pub(crate) fn ensure_same_dims(&self, other: (usize, usize)) -> Result<()> {
                if self.dims() != other {
                    return Err(Error::DimensionMismatch {
                        expected: self.dims(),
                        found: other,
                    });
                }
                Ok(())
            }
        }
    };
}

/// Complex amplitudes on a grid of at least 2x2 pixels. Values are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    width: usize,
    height: usize,
    data: Vec<Complex64>,
}

grid_accessors!(ComplexField, Complex64);

impl ComplexField {
    pub const MIN_SIZE: usize = 2;

    pub fn new(width: usize, height: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dims(width, height, data.len(), Self::MIN_SIZE)?;
        if let Some(index) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                what: "complex field",
                index,
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(
            width,
            height,
            vec![Complex64::new(0.0, 0.0); width * height],
        )
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Caller guarantees the invariants; used for outputs of operations on
    /// already valid fields.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(width * height, data.len());
        Self {
            width,
            height,
            data,
        }
    }

    pub(crate) fn first_non_finite(&self) -> Option<usize> {
        self.data.iter().position(|c| !c.is_finite())
    }

    /// Sum of `|z|²` over all pixels.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `‖self − other‖ / ‖other‖`; zero when both are zero, infinite when
    /// only `other` is.
    pub fn relative_change(&self, other: &ComplexField) -> Result<f64> {
        other.ensure_same_dims(self.dims())?;
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let base = other.l2_norm();
        Ok(if base > 0.0 {
            diff / base
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        })
    }
}

/// Nonnegative, finite real values on a grid (intensities or amplitudes).
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

grid_accessors!(RealImage, f64);

impl RealImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len(), 1)?;
        for (index, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "real image",
                    index,
                });
            }
            if v < 0.0 {
                return Err(Error::Negative {
                    what: "real image",
                    index,
                    value: v,
                });
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(width * height, data.len());
        Self {
            width,
            height,
            data,
        }
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Fails with [`Error::AllZero`] if every pixel is zero.
    pub fn require_nonzero(&self, what: &'static str) -> Result<()> {
        if self.data.iter().all(|&v| v == 0.0) {
            return Err(Error::AllZero(what));
        }
        Ok(())
    }

    /// Per-pixel square root; converts intensity to amplitude.
    pub fn sqrt(&self) -> RealImage {
        Self::from_parts(
            self.width,
            self.height,
            self.data.iter().map(|v| v.sqrt()).collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Result<RealImage> {
        Self::new(
            self.width,
            self.height,
            self.data.iter().map(|v| v * factor).collect(),
        )
    }

    /// Cyclic shift by `(dx, dy)` pixels.
    pub fn rolled(&self, dx: isize, dy: isize) -> RealImage {
        Self::from_parts(
            self.width,
            self.height,
            roll(&self.data, self.width, self.height, dx, dy),
        )
    }

    /// Moves the DC pixel `(0, 0)` to the grid center `(width/2, height/2)`.
    pub fn centered(&self) -> RealImage {
        self.rolled((self.width / 2) as isize, (self.height / 2) as isize)
    }

    /// Inverse of [`RealImage::centered`], also for odd sizes.
    pub fn uncentered(&self) -> RealImage {
        self.rolled(-((self.width / 2) as isize), -((self.height / 2) as isize))
    }
}

/// Phases in radians, stored wrapped to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

grid_accessors!(PhaseMap, f64);

impl PhaseMap {
    /// Accepts any finite phases and wraps them.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height, data.len(), 1)?;
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "phase map",
                index,
            });
        }
        Ok(Self::from_parts(
            width,
            height,
            data.into_iter().map(wrap_phase).collect(),
        ))
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert!(data.iter().all(|v| (0.0..TAU).contains(v)));
        Self {
            width,
            height,
            data,
        }
    }

    /// `2π − φ`, wrapped.
    pub fn negated(&self) -> PhaseMap {
        Self::from_parts(
            self.width,
            self.height,
            self.data.iter().map(|&v| wrap_phase(-v)).collect(),
        )
    }
}

/// Mirror states, 1 = on, 0 = off.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryPattern {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

grid_accessors!(BinaryPattern, u8);

impl BinaryPattern {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len(), 1)?;
        if let Some(index) = data.iter().position(|&v| v > 1) {
            return Err(Error::NotBinary {
                index,
                value: data[index],
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, on: bool) -> Result<Self> {
        Self::new(width, height, vec![on as u8; width * height])
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<u8>) -> Self {
        debug_assert!(data.iter().all(|&v| v <= 1));
        Self {
            width,
            height,
            data,
        }
    }

    /// Swaps on and off mirrors.
    pub fn complement(&self) -> BinaryPattern {
        Self::from_parts(
            self.width,
            self.height,
            self.data.iter().map(|v| 1 - v).collect(),
        )
    }

    pub fn count_on(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }
}
