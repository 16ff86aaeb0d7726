//! Binary hologram synthesis for digital micromirror devices.
//!
//! A target intensity in the lens focal plane is turned into an on/off
//! mirror pattern by iterating between the mirror plane and the image plane
//! with either the classic Gerchberg-Saxton loop or its binarized variant,
//! which applies the mirror on/off constraint inside every iteration. The
//! crate also simulates the focal-plane image of a pattern, pre-compensates
//! a measured wavefront aberration, and scores reconstructions.

pub mod algorithms;
pub mod error;
pub mod field;
pub mod imageio;
pub mod metrics;
pub mod profiles;

pub use algorithms::{
    bgs_step, binarize_field, compensate_and_binarize, gs_step, run, Algorithm, AlgorithmState,
    CompensationSign, InitialPhase, IterationConfig, ThetaConvention,
};
pub use error::{Error, ErrorKind, Result};
pub use field::{
    amplitude, combine, dft2, idft2, phase, BinaryPattern, ComplexField, PhaseMap, RealImage,
};
pub use metrics::{
    first_order_std, intensity_outside, reconstruct, rms_error, target_support_mask,
    ConvergenceTrace, RegionMask, TraceRecord,
};
