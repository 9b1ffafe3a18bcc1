//! FFT-based sinusoidal model: spectral peak picking, greedy partial
//! tracking and resynthesis with cubic phase interpolation.

use std::f64::consts::TAU;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{
    make_window, synthesize_tracks, wrap_phase, Anchor, FrameGrid, PartialTrack, PhaseMode, SampledSignal, WindowKind,
    WindowVector,
};

/// Peaks weaker than this many dB below the strongest peak of the frame are
/// ignored.
pub const PEAK_FLOOR_DB: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    pub frequency: f64,
    pub amplitude: f64,
    /// Phase at the frame center.
    pub phase: f64,
    /// Fractional FFT bin.
    pub bin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmConfig {
    pub fft_size: usize,
    pub window: WindowKind,
    /// Window length in samples; must be odd so the frame has a center
    /// sample.
    pub window_len: usize,
    /// Hop in samples.
    pub hop: usize,
    pub max_peaks: usize,
    /// Largest frequency step (Hz) a track may take between frames.
    pub max_jump: f64,
}

impl SmConfig {
    /// Hann window of `window_ms` (rounded to the nearest odd length),
    /// 2048-point FFT, at most 100 peaks.
    pub fn new(fs: f64, window_ms: f64, hop_ms: f64) -> Self {
        let len = (window_ms * 1e-3 * fs).round().max(1.0) as usize;
        Self {
            fft_size: 2048,
            window: WindowKind::Hann,
            window_len: len | 1,
            hop: ((hop_ms * 1e-3 * fs).round() as usize).max(1),
            max_peaks: 100,
            max_jump: 30.0,
        }
    }

    pub fn with_window(mut self, kind: WindowKind) -> Self {
        self.window = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "SM window length {} must be odd",
                self.window_len
            )));
        }
        if self.fft_size < self.window_len {
            return Err(Error::Config(format!(
                "FFT size {} shorter than window {}",
                self.fft_size, self.window_len
            )));
        }
        if self.max_peaks == 0 || self.hop == 0 {
            return Err(Error::Config("max_peaks and hop must be at least 1".into()));
        }
        if !(self.max_jump > 0.0) {
            return Err(Error::Config("max_jump must be positive".into()));
        }
        Ok(())
    }
}

/// Windowed, zero-padded, zero-phase spectrum analyzer with a cached plan.
pub struct PeakPicker {
    window: WindowVector,
    fft: Arc<dyn Fft<f64>>,
    fft_size: usize,
    max_peaks: usize,
    fs: f64,
}

impl PeakPicker {
    pub fn new(window: WindowVector, fft_size: usize, max_peaks: usize, fs: f64) -> Result<Self> {
        if window.len() > fft_size {
            return Err(Error::usage(format!(
                "frame of {} samples exceeds FFT size {fft_size}",
                window.len()
            )));
        }
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        Ok(Self {
            window,
            fft,
            fft_size,
            max_peaks,
            fs,
        })
    }

    pub fn peaks(&self, frame: &[f64]) -> Result<Vec<SpectralPeak>> {
        self.peaks_with_gain(frame, self.window.sum())
    }

    /// Peaks with amplitudes normalized by `gain` instead of the full
    /// window sum; used for edge frames that only partly overlap the
    /// signal.
    pub fn peaks_with_gain(&self, frame: &[f64], gain: f64) -> Result<Vec<SpectralPeak>> {
        let m = self.window.len();
        if frame.len() != m {
            return Err(Error::usage(format!("frame has {} samples, window {m}", frame.len())));
        }
        let n = self.fft_size;
        // Rotate so the window center lands on index 0.
        let center = (m - 1) / 2;
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (i, (&x, &w)) in frame.iter().zip(self.window.values()).enumerate() {
            let idx = (i + n - center) % n;
            buf[idx] = Complex::new(x * w, 0.0);
        }
        self.fft.process(&mut buf);

        let half = n / 2;
        let mag: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
        let top = mag[1..half].iter().copied().fold(0.0, f64::max);
        if top <= 0.0 {
            return Ok(Vec::new());
        }
        let floor = top * 10f64.powf(-PEAK_FLOOR_DB / 20.0);
        let mut maxima: Vec<usize> = (1..half)
            .filter(|&k| mag[k] >= floor && mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
            .collect();
        maxima.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]));
        maxima.truncate(self.max_peaks);

        let mut peaks: Vec<SpectralPeak> = maxima
            .into_iter()
            .map(|k| {
                let (a, b, c) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
                let denom = a - 2.0 * b + c;
                let p = if denom < 0.0 {
                    (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
                } else {
                    0.0
                };
                let peak_log = b - 0.25 * (a - c) * p;
                let neighbour = if p >= 0.0 { k + 1 } else { k - 1 };
                let ph0 = buf[k].arg();
                let step = wrap_phase(buf[neighbour].arg() - ph0);
                let bin = k as f64 + p;
                SpectralPeak {
                    frequency: bin * self.fs / n as f64,
                    amplitude: 2.0 * peak_log.exp() / gain,
                    phase: wrap_phase(ph0 + p.abs() * step),
                    bin,
                }
            })
            .collect();
        peaks.sort_by(|x, y| x.frequency.total_cmp(&y.frequency));
        Ok(peaks)
    }
}

/// Peaks of one frame. `frame.len()` must equal the window length.
pub fn analyze_frame_fft(
    frame: &[f64],
    window: &WindowVector,
    fft_size: usize,
    max_peaks: usize,
    fs: f64,
) -> Result<Vec<SpectralPeak>> {
    PeakPicker::new(window.clone(), fft_size, max_peaks, fs)?.peaks(frame)
}

/// Peaks found at one frame center.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakFrame {
    pub time: f64,
    pub peaks: Vec<SpectralPeak>,
}

/// Greedy nearest-frequency tracking. Candidate (track, peak) pairs within
/// `max_jump` are matched in order of increasing distance. A peak left over
/// starts a track that fades in from zero one hop earlier; a track left over
/// fades out to zero one hop later. `hop` is in seconds.
pub fn track_partials(frames: &[PeakFrame], max_jump: f64, hop: f64) -> Vec<PartialTrack> {
    struct Live {
        anchors: Vec<Anchor>,
    }
    let mut live: Vec<Live> = Vec::new();
    let mut done: Vec<Vec<Anchor>> = Vec::new();

    for (fi, frame) in frames.iter().enumerate() {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ti, track) in live.iter().enumerate() {
            let last = track.anchors.last().expect("live tracks are never empty").frequency;
            for (pi, peak) in frame.peaks.iter().enumerate() {
                let d = (peak.frequency - last).abs();
                if d <= max_jump {
                    pairs.push((d, ti, pi));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut track_next: Vec<Option<usize>> = vec![None; live.len()];
        let mut peak_used = vec![false; frame.peaks.len()];
        for (_, ti, pi) in pairs {
            if track_next[ti].is_none() && !peak_used[pi] {
                track_next[ti] = Some(pi);
                peak_used[pi] = true;
            }
        }

        let mut next_live = Vec::with_capacity(live.len());
        for (track, next) in live.into_iter().zip(track_next) {
            let mut anchors = track.anchors;
            match next {
                Some(pi) => {
                    let p = frame.peaks[pi];
                    anchors.push(Anchor::new(frame.time, p.amplitude, p.frequency, p.phase));
                    next_live.push(Live { anchors });
                }
                None => {
                    let last = *anchors.last().expect("live tracks are never empty");
                    let t = last.time + hop;
                    anchors.push(Anchor::new(
                        t,
                        0.0,
                        last.frequency,
                        wrap_phase(last.phase + TAU * last.frequency * hop),
                    ));
                    done.push(anchors);
                }
            }
        }
        for (pi, p) in frame.peaks.iter().enumerate() {
            if peak_used[pi] {
                continue;
            }
            let mut anchors = Vec::with_capacity(2);
            if fi > 0 && frame.time - hop >= 0.0 {
                anchors.push(Anchor::new(
                    frame.time - hop,
                    0.0,
                    p.frequency,
                    wrap_phase(p.phase - TAU * p.frequency * hop),
                ));
            }
            anchors.push(Anchor::new(frame.time, p.amplitude, p.frequency, p.phase));
            next_live.push(Live { anchors });
        }
        live = next_live;
    }
    done.extend(live.into_iter().map(|l| l.anchors));

    let mut tracks: Vec<PartialTrack> = done
        .into_iter()
        .map(|a| PartialTrack::new(a).expect("tracking emits increasing anchor times"))
        .collect();
    tracks.sort_by(|a, b| {
        a.birth()
            .total_cmp(&b.birth())
            .then(a.anchors()[0].frequency.total_cmp(&b.anchors()[0].frequency))
    });
    tracks
}

/// Per-frame peaks on the uniform grid, frames zero-padded at the edges.
pub fn sm_peaks(signal: &SampledSignal, config: &SmConfig) -> Result<Vec<PeakFrame>> {
    config.validate()?;
    if signal.len() < config.window_len {
        return Err(Error::usage(format!(
            "signal of {} samples is shorter than the {}-sample window",
            signal.len(),
            config.window_len
        )));
    }
    let window = make_window(config.window, config.window_len)?;
    let picker = PeakPicker::new(window, config.fft_size, config.max_peaks, signal.fs())?;
    let half = config.window_len / 2;
    let grid = FrameGrid::uniform(signal.len(), config.hop, half)?;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let frame = grid.padded(i, signal.samples());
            let inside = grid.clipped(i, signal.len());
            let offset = inside.start + half - grid.centers()[i];
            let gain: f64 = picker.window.values()[offset..offset + inside.len()].iter().sum();
            Ok(PeakFrame {
                time: grid.centers()[i] as f64 / signal.fs(),
                peaks: picker.peaks_with_gain(&frame, gain)?,
            })
        })
        .collect()
}

pub fn sm_analyze(signal: &SampledSignal, config: &SmConfig) -> Result<Vec<PartialTrack>> {
    let frames = sm_peaks(signal, config)?;
    let hop = config.hop as f64 / signal.fs();
    let mut tracks = track_partials(&frames, config.max_jump, hop);
    // Ramps may reach past the signal; such anchors are harmless for
    // synthesis but must stay below Nyquist.
    tracks.retain(|t| t.anchors().iter().all(|a| a.frequency < signal.fs() / 2.0));
    Ok(tracks)
}

/// Linear amplitudes and cubic phase between anchors.
pub fn sm_synthesize(tracks: &[PartialTrack], len: usize, fs: f64) -> Result<SampledSignal> {
    synthesize_tracks(tracks, len, fs, PhaseMode::Cubic)
}
