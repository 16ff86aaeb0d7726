//! Gerchberg-Saxton (GS) and binarized Gerchberg-Saxton (BGS) iterations.
//!
//! Both engines cycle between the mirror plane and the image plane:
//!
//! 1. `A = IDFT(T)` (seed, with a configurable initial phase)
//! 2. `B = Amp(S)·e^{iφ(A)}` for GS, or `B = Amp(S)·θ(φ(A))` for BGS
//! 3. `C = DFT(B)`
//! 4. `D = Amp(T)·e^{iφ(C)}`
//! 5. `A = IDFT(D)`
//! 6. stop when the relative change of `A` falls below the tolerance
//!
//! BGS differs only in step 2, where the source amplitude is gated by the
//! same phase threshold that later turns `A` into a mirror pattern, so the
//! binary constraint of the device is part of every iteration.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, wrap_phase, BinaryPattern, ComplexField, PhaseMap, RealImage};
use crate::metrics::{self, ConvergenceTrace, TraceRecord, DEFAULT_MASK_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gs,
    Bgs,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gs => "gs",
            Algorithm::Bgs => "bgs",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which side of the π threshold switches a mirror on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaConvention {
    /// θ(x) = 1 for x < π, 0 otherwise.
    #[default]
    OnBelowPi,
    /// θ(x) = 1 for x ≥ π, 0 otherwise.
    OnAtOrAbovePi,
}

impl ThetaConvention {
    /// Evaluates θ on a phase already wrapped to `[0, 2π)`.
    pub fn is_on(self, wrapped_phase: f64) -> bool {
        match self {
            ThetaConvention::OnBelowPi => wrapped_phase < PI,
            ThetaConvention::OnAtOrAbovePi => wrapped_phase >= PI,
        }
    }
}

/// Phase attached to the target amplitude before the seeding IDFT.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialPhase {
    #[default]
    Zero,
    /// Uniform phases in `[0, 2π)` from a ChaCha8 stream.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    /// Threshold on `‖A_k − A_{k−1}‖ / ‖A_{k−1}‖`.
    pub convergence_tolerance: f64,
    /// When false the loop always runs `max_iterations` steps; the first
    /// converged iteration is still reported.
    pub stop_on_convergence: bool,
    pub theta_convention: ThetaConvention,
    pub initial_phase: InitialPhase,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Bgs,
            max_iterations: 30,
            convergence_tolerance: 1e-4,
            stop_on_convergence: true,
            theta_convention: ThetaConvention::OnBelowPi,
            initial_phase: InitialPhase::Zero,
        }
    }
}

impl IterationConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.convergence_tolerance > 0.0 && self.convergence_tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "convergence_tolerance must be positive and finite, got {}",
                self.convergence_tolerance
            )));
        }
        Ok(())
    }
}

/// Working state of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmState {
    /// Latest step-5 output (or the seed before any step).
    pub field: ComplexField,
    pub iteration: usize,
    pub trace: ConvergenceTrace,
    /// First iteration whose field change was within tolerance.
    pub converged_at: Option<usize>,
}

/// GS step 2: `B = Amp(S)·e^{iφ(A)}`.
pub fn gs_source_stage(a: &ComplexField, source_amp: &RealImage) -> Result<ComplexField> {
    field::combine(source_amp, &field::phase(a))
}

/// BGS step 2: `B = Amp(S)·θ(φ(A))`, a real nonnegative field.
pub fn bgs_source_stage(
    a: &ComplexField,
    source_amp: &RealImage,
    theta: ThetaConvention,
) -> Result<ComplexField> {
    source_amp.ensure_same_dims(a.dims())?;
    let ph = field::phase(a);
    let data = source_amp
        .data()
        .iter()
        .zip(ph.data())
        .map(|(&s, &p)| Complex64::new(if theta.is_on(p) { s } else { 0.0 }, 0.0))
        .collect();
    ComplexField::new(a.width(), a.height(), data)
}

/// Steps 3 to 5: `IDFT(Amp(T)·e^{iφ(DFT(B))})`.
fn image_plane_stage(b: &ComplexField, target_amp: &RealImage) -> Result<ComplexField> {
    target_amp.ensure_same_dims(b.dims())?;
    let c = field::dft2(b);
    let d = field::combine(target_amp, &field::phase(&c))?;
    Ok(field::idft2(&d))
}

/// One GS iteration (steps 2 to 5). `source_amp` and `target_amp` are amplitudes.
pub fn gs_step(
    a: &ComplexField,
    source_amp: &RealImage,
    target_amp: &RealImage,
) -> Result<ComplexField> {
    a.ensure_same_dims(target_amp.dims())?;
    let b = gs_source_stage(a, source_amp)?;
    image_plane_stage(&b, target_amp)
}

/// One BGS iteration (steps 2 to 5). `source_amp` and `target_amp` are amplitudes.
pub fn bgs_step(
    a: &ComplexField,
    source_amp: &RealImage,
    target_amp: &RealImage,
    theta: ThetaConvention,
) -> Result<ComplexField> {
    a.ensure_same_dims(target_amp.dims())?;
    let b = bgs_source_stage(a, source_amp, theta)?;
    image_plane_stage(&b, target_amp)
}

/// Step 1: `IDFT(Amp(T)·e^{i·φ₀})` with φ₀ from the config.
pub fn seed_field(target_amp: &RealImage, initial: InitialPhase) -> Result<ComplexField> {
    let (w, h) = target_amp.dims();
    let phase0 = match initial {
        InitialPhase::Zero => PhaseMap::zeros(w, h)?,
        InitialPhase::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            PhaseMap::new(w, h, (0..w * h).map(|_| rng.gen_range(0.0..TAU)).collect())?
        }
    };
    Ok(field::idft2(&field::combine(target_amp, &phase0)?))
}

/// Runs GS or BGS from the target and source INTENSITIES.
///
/// Each iteration is traced with the field change and with the quality of
/// the pattern that binarizing the current field would produce (simulated
/// through [`metrics::reconstruct`] without aberration, scored over the
/// target support at [`DEFAULT_MASK_THRESHOLD`]).
pub fn run(
    target: &RealImage,
    source: &RealImage,
    cfg: &IterationConfig,
) -> Result<(AlgorithmState, BinaryPattern)> {
    cfg.validate()?;
    target.ensure_same_dims(source.dims())?;
    target.require_nonzero("target")?;
    source.require_nonzero("source")?;
    let (w, h) = target.dims();
    if w < ComplexField::MIN_SIZE || h < ComplexField::MIN_SIZE {
        return Err(Error::TooSmall {
            width: w,
            height: h,
            min: ComplexField::MIN_SIZE,
        });
    }

    let target_amp = target.sqrt();
    let source_amp = source.sqrt();
    let mask = metrics::target_support_mask(target, DEFAULT_MASK_THRESHOLD)?;
    let zero_correction = PhaseMap::zeros(w, h)?;

    let mut state = AlgorithmState {
        field: seed_field(&target_amp, cfg.initial_phase)?,
        iteration: 0,
        trace: ConvergenceTrace::default(),
        converged_at: None,
    };

    while state.iteration < cfg.max_iterations {
        let iteration = state.iteration + 1;
        let next = match cfg.algorithm {
            Algorithm::Gs => gs_step(&state.field, &source_amp, &target_amp)?,
            Algorithm::Bgs => {
                bgs_step(&state.field, &source_amp, &target_amp, cfg.theta_convention)?
            }
        };
        if next.first_non_finite().is_some() {
            return Err(Error::Diverged { iteration });
        }
        let field_change = next.relative_change(&state.field)?;
        if !field_change.is_finite() {
            return Err(Error::Diverged { iteration });
        }

        let pattern = binarize_field_with(&next, &zero_correction, cfg.theta_convention)?;
        let recon = metrics::reconstruct(&pattern, source, None)?;
        state.trace.push(TraceRecord {
            iteration,
            field_change,
            first_order_std: metrics::first_order_std(&recon, &mask)?,
            rms_error: metrics::rms_error(&recon, target, &mask)?,
        })?;
        state.field = next;
        state.iteration = iteration;

        if field_change <= cfg.convergence_tolerance {
            state.converged_at.get_or_insert(iteration);
            if cfg.stop_on_convergence {
                break;
            }
        }
    }

    let pattern = binarize_field_with(&state.field, &zero_correction, cfg.theta_convention)?;
    Ok((state, pattern))
}

/// Final binarization: a mirror is on where `wrap(φ(A) + correction) < π`.
pub fn binarize_field(a: &ComplexField, correction: &PhaseMap) -> Result<BinaryPattern> {
    binarize_field_with(a, correction, ThetaConvention::OnBelowPi)
}

/// [`binarize_field`] with an explicit threshold convention.
pub fn binarize_field_with(
    a: &ComplexField,
    correction: &PhaseMap,
    theta: ThetaConvention,
) -> Result<BinaryPattern> {
    a.ensure_same_dims(correction.dims())?;
    let ph = field::phase(a);
    let data = ph
        .data()
        .iter()
        .zip(correction.data())
        .map(|(&p, &c)| theta.is_on(wrap_phase(p + c)) as u8)
        .collect();
    BinaryPattern::new(a.width(), a.height(), data)
}

/// How a measured aberration enters the correction before binarization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompensationSign {
    Add,
    /// Pre-distorts with the conjugate so the optics cancel it.
    #[default]
    Subtract,
}

pub fn compensate_and_binarize(
    a: &ComplexField,
    aberration: &PhaseMap,
    sign: CompensationSign,
) -> Result<BinaryPattern> {
    compensate_and_binarize_with(a, aberration, sign, ThetaConvention::OnBelowPi)
}

pub fn compensate_and_binarize_with(
    a: &ComplexField,
    aberration: &PhaseMap,
    sign: CompensationSign,
    theta: ThetaConvention,
) -> Result<BinaryPattern> {
    match sign {
        CompensationSign::Add => binarize_field_with(a, aberration, theta),
        CompensationSign::Subtract => binarize_field_with(a, &aberration.negated(), theta),
    }
}
