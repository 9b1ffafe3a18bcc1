//! Shared signal primitives: sampled signals, analysis windows, frame grids,
//! partial tracks with their interpolation schemes, track synthesis and the
//! SRER quality measure.

mod framing;
mod interp;
mod phase;
mod srer;
mod synthesis;
mod track;
mod window;

pub use framing::FrameGrid;
pub use interp::{interp_amplitude_linear, interp_frequency_spline, linear_interp, NaturalSpline};
pub use phase::{phase_by_freq_integration, phase_cubic_mq, wrap_phase, PhaseAnchor, PhaseBoundary};
pub use srer::{population_std, srer, srer_slices, SRER_CEILING_DB};
pub use synthesis::{synthesize_tracks, track_instantaneous, InstantaneousTrack, PhaseMode};
pub use track::{Anchor, PartialTrack};
pub use window::{make_window, WindowKind, WindowVector};

use crate::error::{Error, Result};

/// A real-valued mono signal together with its sampling rate in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    fs: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::usage(format!("sample rate must be positive, got {fs}")));
        }
        if samples.is_empty() {
            return Err(Error::usage("signal must contain at least one sample"));
        }
        if let Some(n) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::usage(format!("non-finite sample at index {n}")));
        }
        Ok(Self { samples, fs })
    }

    pub fn zeros(len: usize, fs: f64) -> Result<Self> {
        Self::new(vec![0.0; len], fs)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; a signal holds at least one sample.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Returns a copy scaled by `gain`.
    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * gain).collect(),
            fs: self.fs,
        }
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }
}
