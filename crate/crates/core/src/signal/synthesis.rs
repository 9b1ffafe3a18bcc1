use rayon::prelude::*;

use crate::error::Result;

use super::{
    interp_amplitude_linear, interp_frequency_spline, phase_by_freq_integration, phase_cubic_mq, PartialTrack,
    PhaseAnchor, PhaseBoundary, SampledSignal,
};

/// How a track's instantaneous phase is rebuilt from its anchors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    /// Spline-interpolated frequency, integrated and pulled onto anchor phases.
    FreqIntegration,
    /// Cubic phase polynomials between consecutive anchors.
    Cubic,
}

/// Per-sample amplitude and phase of one track over its live span.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousTrack {
    /// First sample index of the live span.
    pub start: usize,
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
}

impl InstantaneousTrack {
    pub fn len(&self) -> usize {
        self.amplitude.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitude.is_empty()
    }

    pub fn value(&self, i: usize) -> f64 {
        self.amplitude[i] * self.phase[i].cos()
    }
}

/// Evaluates a track on the sample grid `0..len`; `None` when its live span
/// contains no sample.
pub fn track_instantaneous(
    track: &PartialTrack,
    len: usize,
    fs: f64,
    mode: PhaseMode,
) -> Result<Option<InstantaneousTrack>> {
    if len == 0 {
        return Ok(None);
    }
    let first = (track.birth() * fs - 1e-9).ceil().max(0.0);
    let last = (track.death() * fs + 1e-9).floor().min((len - 1) as f64);
    if first > last {
        return Ok(None);
    }
    let (start, end) = (first as usize, last as usize);
    let times: Vec<f64> = (start..=end).map(|n| n as f64 / fs).collect();
    let amplitude = interp_amplitude_linear(track.anchors(), &times)?;
    let offset = start as f64;
    let phase = match mode {
        PhaseMode::FreqIntegration => {
            let freq = interp_frequency_spline(track.anchors(), &times)?;
            let anchors: Vec<PhaseAnchor> = track
                .anchors()
                .iter()
                .map(|a| PhaseAnchor {
                    position: a.time * fs - offset,
                    phase: a.phase,
                })
                .collect();
            phase_by_freq_integration(&freq, fs, &anchors)?
        }
        PhaseMode::Cubic => {
            let boundaries: Vec<PhaseBoundary> = track
                .anchors()
                .iter()
                .map(|a| PhaseBoundary {
                    position: a.time * fs - offset,
                    phase: a.phase,
                    frequency: a.frequency,
                })
                .collect();
            phase_cubic_mq(&boundaries, fs, times.len())?
        }
    };
    Ok(Some(InstantaneousTrack {
        start,
        amplitude,
        phase,
    }))
}

/// Sum of `A_k(t) cos(phi_k(t))` over every track's live span.
pub fn synthesize_tracks(tracks: &[PartialTrack], len: usize, fs: f64, mode: PhaseMode) -> Result<SampledSignal> {
    let parts = tracks
        .par_iter()
        .map(|t| track_instantaneous(t, len, fs, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![0.0; len];
    for part in parts.into_iter().flatten() {
        for i in 0..part.len() {
            out[part.start + i] += part.value(i);
        }
    }
    SampledSignal::new(out, fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{srer, Anchor};
    use std::f64::consts::TAU;

    fn constant_track(amp: f64, freq: f64, phase: f64, duration: f64) -> PartialTrack {
        PartialTrack::new(vec![
            Anchor::new(0.0, amp, freq, phase),
            Anchor::new(duration, amp, freq, phase + TAU * freq * duration),
        ])
        .unwrap()
    }

    #[test]
    fn constant_track_is_pure_cosine() {
        let fs = 16000.0;
        for mode in [PhaseMode::FreqIntegration, PhaseMode::Cubic] {
            let t = constant_track(1.0, 100.0, 0.0, 0.1);
            let y = synthesize_tracks(&[t], 1601, fs, mode).unwrap();
            for (n, v) in y.samples().iter().enumerate() {
                assert!((v - (TAU * 100.0 * n as f64 / fs).cos()).abs() < 1e-9, "{mode:?} {n}");
            }
        }
    }

    #[test]
    fn empty_set_is_silence() {
        let y = synthesize_tracks(&[], 100, 8000.0, PhaseMode::Cubic).unwrap();
        assert!(y.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn track_outside_signal_is_ignored() {
        let t = PartialTrack::new(vec![Anchor::new(1.0, 1.0, 10.0, 0.0), Anchor::new(2.0, 1.0, 10.0, 0.0)]).unwrap();
        assert!(track_instantaneous(&t, 100, 1000.0, PhaseMode::Cubic)
            .unwrap()
            .is_none());
    }

    #[test]
    fn synthesis_is_additive() {
        let fs = 8000.0;
        let a = constant_track(0.5, 300.0, 0.2, 0.05);
        let b = PartialTrack::new(vec![
            Anchor::new(0.01, 0.0, 700.0, 1.0),
            Anchor::new(0.02, 0.8, 720.0, -2.0),
            Anchor::new(0.04, 0.3, 690.0, 0.5),
        ])
        .unwrap();
        for mode in [PhaseMode::FreqIntegration, PhaseMode::Cubic] {
            let both = synthesize_tracks(&[a.clone(), b.clone()], 400, fs, mode).unwrap();
            let ya = synthesize_tracks(std::slice::from_ref(&a), 400, fs, mode).unwrap();
            let yb = synthesize_tracks(std::slice::from_ref(&b), 400, fs, mode).unwrap();
            for i in 0..400 {
                assert!((both.samples()[i] - ya.samples()[i] - yb.samples()[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stationary_frames_resynthesize_cubic() {
        // 100 Hz tone sampled at 1 ms frame boundaries
        let fs = 16000.0;
        let len = 16000;
        let x: Vec<f64> = (0..len)
            .map(|n| 0.8 * (TAU * 100.0 * n as f64 / fs + 0.3).cos())
            .collect();
        let anchors: Vec<Anchor> = (0..=1000)
            .map(|i| {
                let t = i as f64 * 1e-3;
                Anchor::new(t, 0.8, 100.0, crate::signal::wrap_phase(TAU * 100.0 * t + 0.3))
            })
            .collect();
        let track = PartialTrack::new(anchors).unwrap();
        let y = synthesize_tracks(&[track], len, fs, PhaseMode::Cubic).unwrap();
        let db = srer(&SampledSignal::new(x, fs).unwrap(), &y).unwrap();
        assert!(db > 60.0, "{db}");
    }
}
