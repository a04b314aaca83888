//! Fourier-domain quantum OCT signal laboratory.
//!
//! This crate synthesizes two-dimensional joint spectra of multilayer
//! dispersive objects from a closed-form coincidence model and removes
//! A-scan artefacts with two independent algorithms:
//!
//! 1. complex (analytic-signal) averaging of the joint spectrum's
//!    diagonals with Kaiser weighting ([`algo_avg`]), and
//! 2. a two-dimensional Fourier transform of the full joint spectrum
//!    followed by diagonal extraction ([`algo_2dfft`]).
//!
//! The pipeline is `model` (types, frequency grid) -> `synth` (transfer
//! function, joint spectrum) -> `stack` (diagonal extraction, FFT stack)
//! -> `algo_avg` / `algo_2dfft` (A-scans) -> `analyze` (peaks, artefact
//! prediction, suppression metrics, brute-force DFT oracles).
//!
//! All types are immutable after construction and all operations are pure
//! functions; results are bit-reproducible for fixed inputs regardless of
//! the `QOCT_THREADS` parallelism cap.

pub mod algo_2dfft;
pub mod algo_avg;
pub mod analyze;
mod fft;
pub mod model;
pub mod stack;
pub mod synth;

pub use algo_2dfft::{FourierMap, Frame};
pub use algo_avg::{AScan, AScanMeta, AlgorithmId, Weighting};
pub use analyze::{ArtefactPrediction, Peak, PeakList, SuppressionReport};
pub use model::{FrequencyGrid, LayerSegment, ObjectSpec, SourceSpec, SPEED_OF_LIGHT};
pub use stack::{DiagonalStack, FftStack, RowWindow};
pub use synth::{JointSpectrum, NoiseSpec, SynthOptions, TransferFunction};

/// Errors produced by invalid inputs to any operation in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid source spec: {0}")]
    InvalidSource(String),
    #[error("invalid object spec: {0}")]
    InvalidObject(String),
    #[error("grid length mismatch: expected {expected}, got {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("invalid diagonal count {k} for grid size {n}: must be odd and 1 <= K <= N/2")]
    InvalidDiagonalCount { k: usize, n: usize },
    #[error("weight window length {window} does not match row count {rows}")]
    WindowMismatch { window: usize, rows: usize },
    #[error("input too short: {len} samples, need at least {min}")]
    InputTooShort { len: usize, min: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("amplitude is identically zero")]
    ZeroAmplitude,
    #[error("input length {len} exceeds the brute-force oracle cap {cap}")]
    SizeCap { len: usize, cap: usize },
    #[error("depth axes do not match")]
    AxisMismatch,
    #[error("operation requires an axis-aligned map")]
    WrongFrame,
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
