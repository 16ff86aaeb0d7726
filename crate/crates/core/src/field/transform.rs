use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::{wrap_phase, ComplexField, PhaseMap, RealImage};
use crate::error::Result;

/// Forward 2D DFT, `X[k,l] = 1/√(WH) Σ x[n,m] e^{-2πi(kn/W + lm/H)}`.
///
/// Unitary scaling, DC at `(0, 0)`, arbitrary (non power of two) sizes.
pub fn dft2(f: &ComplexField) -> ComplexField {
    transform(f, FftDirection::Forward)
}

/// Inverse of [`dft2`], with the same `1/√(WH)` scaling.
pub fn idft2(f: &ComplexField) -> ComplexField {
    transform(f, FftDirection::Inverse)
}

fn transform(f: &ComplexField, direction: FftDirection) -> ComplexField {
    let (w, h) = f.dims();
    // planner and scratch are per call so concurrent callers share nothing
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft(w, direction);
    let col_fft = planner.plan_fft(h, direction);

    let mut rows = f.data().to_vec();
    row_fft.process(&mut rows);

    let mut cols = transpose(&rows, w, h);
    col_fft.process(&mut cols);

    let scale = 1.0 / ((w * h) as f64).sqrt();
    let mut out = transpose(&cols, h, w);
    for v in &mut out {
        *v *= scale;
    }
    ComplexField::from_parts(w, h, out)
}

/// Transposes a row-major `width x height` buffer into a row-major
/// `height x width` buffer.
fn transpose(src: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    for y in 0..height {
        for x in 0..width {
            dst[x * height + y] = src[y * width + x];
        }
    }
    dst
}

/// Per-pixel modulus.
pub fn amplitude(f: &ComplexField) -> RealImage {
    RealImage::from_parts(
        f.width(),
        f.height(),
        f.data().iter().map(|c| c.norm()).collect(),
    )
}

/// Per-pixel argument in `[0, 2π)`; zero-amplitude pixels get phase 0.
pub fn phase(f: &ComplexField) -> PhaseMap {
    PhaseMap::from_parts(
        f.width(),
        f.height(),
        f.data()
            .iter()
            .map(|c| {
                if c.re == 0.0 && c.im == 0.0 {
                    0.0
                } else {
                    wrap_phase(c.arg())
                }
            })
            .collect(),
    )
}

/// Per-pixel `amp · e^{i·ph}`. Zero amplitude gives exactly zero.
pub fn combine(amp: &RealImage, ph: &PhaseMap) -> Result<ComplexField> {
    amp.ensure_same_dims(ph.dims())?;
    let data = amp
        .data()
        .iter()
        .zip(ph.data())
        .map(|(&a, &p)| {
            if a == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(a, p)
            }
        })
        .collect();
    ComplexField::new(amp.width(), amp.height(), data)
}
