#![allow(dead_code)]

use std::f64::consts::PI;

use holobgs::ComplexField;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct-summation 2D DFT with unitary scaling. `sign` is -1 for forward.
pub fn naive_dft2(width: usize, height: usize, data: &[Complex64], sign: f64) -> Vec<Complex64> {
    let scale = 1.0 / ((width * height) as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); width * height];
    for l in 0..height {
        for k in 0..width {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..height {
                for x in 0..width {
                    // reduce the index product first to keep the angle small
                    let frac = ((k * x) % width) as f64 / width as f64
                        + ((l * y) % height) as f64 / height as f64;
                    acc += data[y * width + x] * Complex64::from_polar(1.0, sign * 2.0 * PI * frac);
                }
            }
            out[l * width + k] = acc * scale;
        }
    }
    out
}

pub fn relative_l2(got: &[Complex64], want: &[Complex64]) -> f64 {
    let num: f64 = got.iter().zip(want).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = want.iter().map(|b| b.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn random_field(width: usize, height: usize, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexField::from_fn(width, height, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .unwrap()
}
