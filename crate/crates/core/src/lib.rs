//! Sinusoidal analysis and resynthesis of speech and audio with three
//! parameter estimators: an FFT peak-picking sinusoidal model, an ESPRIT
//! estimator for exponentially damped sinusoids, and the extended adaptive
//! quasi-harmonic model. Synthetic generators with exact ground truth and an
//! SRER benchmark harness sit on top.

pub mod eaqhm;
pub mod edsm;
pub mod error;
pub mod generators;
pub mod harness;
pub mod pitch;
pub mod signal;
pub mod sm;

pub use error::{Error, Result};
