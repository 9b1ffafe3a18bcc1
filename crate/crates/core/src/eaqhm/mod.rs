//! Extended adaptive Quasi-Harmonic Model: harmonic initialization followed
//! by repeated least-squares fits on basis functions built from the current
//! amplitude and phase tracks, with per-frame frequency corrections.

mod ls;

pub use ls::{build_ls_system, freq_correction, ls_solve, solve_real, BasisFunctionSet, LsSystem, QhmFrameSolution};

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::F0Track;
use crate::signal::{
    interp_frequency_spline, make_window, srer_slices, synthesize_tracks, track_instantaneous, Anchor, FrameGrid,
    InstantaneousTrack, PartialTrack, PhaseMode, SampledSignal, WindowKind,
};

/// Analysis window length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WindowLength {
    /// Multiple of the local pitch period.
    Periods(f64),
    /// Fixed length; rounded up to odd.
    Samples(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EaqhmConfig {
    pub init_window: WindowKind,
    pub adapt_window: WindowKind,
    pub window: WindowLength,
    pub hop_ms: f64,
    pub max_adaptations: usize,
    /// Adaptation stops once an iteration gains less than this (dB).
    pub threshold_db: f64,
    /// Reference for the conditioning guard; the local f0 when unset.
    pub f_min: Option<f64>,
    /// Bound on the condition number of the scaled normal equations.
    pub max_condition: f64,
}

impl Default for EaqhmConfig {
    fn default() -> Self {
        Self {
            init_window: WindowKind::Blackman,
            adapt_window: WindowKind::Hamming,
            window: WindowLength::Periods(3.0),
            hop_ms: 1.0,
            max_adaptations: 10,
            threshold_db: 0.1,
            f_min: None,
            max_condition: 1e12,
        }
    }
}

impl EaqhmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hop_ms.is_finite() && self.hop_ms > 0.0) {
            return Err(Error::Config(format!("hop must be positive, got {} ms", self.hop_ms)));
        }
        match self.window {
            WindowLength::Periods(p) if !(p.is_finite() && p > 0.0) => {
                return Err(Error::Config(format!(
                    "window must span a positive number of periods, got {p}"
                )))
            }
            WindowLength::Samples(0) => return Err(Error::Config("window must be at least one sample".into())),
            _ => {}
        }
        if let Some(f) = self.f_min {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!("f_min must be positive, got {f}")));
            }
        }
        if !(self.threshold_db >= 0.0) {
            return Err(Error::Config("SRER threshold must be non-negative".into()));
        }
        if !(self.max_condition > 1.0) {
            return Err(Error::Config("condition bound must exceed 1".into()));
        }
        Ok(())
    }

    /// Shortest window (samples) the conditioning guard admits where the
    /// local f0 is `f0`.
    pub fn min_window_samples(&self, fs: f64, f0: f64) -> f64 {
        2.0 * fs / self.f_min.unwrap_or(f0)
    }

    fn half_length(&self, fs: f64, f0: f64) -> usize {
        match self.window {
            WindowLength::Periods(p) => (p * fs / f0 / 2.0).round().max(1.0) as usize,
            WindowLength::Samples(n) => n / 2,
        }
    }

    fn admits(&self, frame_len: usize, fs: f64, f0: f64) -> bool {
        frame_len as f64 >= self.min_window_samples(fs, f0) * (1.0 - 1e-9)
    }

    fn grid(&self, signal: &SampledSignal, f0: &F0Track) -> Result<(FrameGrid, Vec<f64>)> {
        let fs = signal.fs();
        let hop = (self.hop_ms * 1e-3 * fs).round().max(1.0) as usize;
        let probe = FrameGrid::uniform(signal.len(), hop, 0)?;
        let times: Vec<f64> = probe.centers().iter().map(|&c| c as f64 / fs).collect();
        let f0s = f0
            .f0_at_many(&times)
            .ok_or_else(|| Error::analysis("f0 track has no voiced frame"))?;
        if let Some(bad) = f0s.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
            return Err(Error::usage(format!("f0 track holds a non-positive value {bad}")));
        }
        let halves: Vec<usize> = f0s.iter().map(|&f| self.half_length(fs, f)).collect();
        let grid = FrameGrid::new(probe.centers().to_vec(), halves, hop)?;
        Ok((grid, f0s))
    }
}

/// Output of the adaptation loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EaqhmResult {
    pub tracks: Vec<PartialTrack>,
    /// SRER (dB) of the initial tracks followed by every accepted iteration.
    pub history: Vec<f64>,
    /// Iterations run, including a final rejected one.
    pub adaptations: usize,
    /// Frames skipped in the last accepted iteration.
    pub skipped_frames: usize,
}

impl EaqhmResult {
    pub fn final_srer(&self) -> f64 {
        *self.history.last().expect("history holds the initial SRER")
    }
}

/// Harmonic initialization: per frame, a least-squares fit of stationary
/// exponentials at `k f0` for `k = 1..=partials`, giving one track per
/// harmonic with anchors `(2|a_k|, k f0, arg a_k)`.
///
/// Harmonics at or above Nyquist in a frame get a zero-amplitude anchor.
/// Frames failing the window guard or the condition bound are left out; if
/// none remain the result is [`Error::IllConditioned`].
pub fn init_harmonic(
    signal: &SampledSignal,
    f0: &F0Track,
    partials: usize,
    config: &EaqhmConfig,
) -> Result<Vec<PartialTrack>> {
    config.validate()?;
    if partials == 0 {
        return Err(Error::usage("at least one harmonic is required"));
    }
    let fs = signal.fs();
    let x = signal.samples();
    let (grid, f0s) = config.grid(signal, f0)?;

    let frames: Vec<std::result::Result<Vec<(f64, f64, f64)>, f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let c = grid.centers()[i];
            let half = grid.half_lengths()[i];
            let f0_l = f0s[i];
            if !config.admits(2 * half + 1, fs, f0_l) {
                return Err(f64::INFINITY);
            }
            let range = grid.clipped(i, x.len());
            let window = make_window(config.init_window, 2 * half + 1).expect("odd positive length");
            let w: Vec<f64> = range.clone().map(|n| window.values()[n + half - c]).collect();
            let times: Vec<f64> = range.clone().map(|n| (n as f64 - c as f64) / fs).collect();
            let live: Vec<f64> = (1..=partials)
                .map(|k| k as f64 * f0_l)
                .take_while(|&f| f < fs / 2.0)
                .collect();
            let basis = BasisFunctionSet::stationary(times, &live);
            match solve_real(&x[range], &basis, &w, false, config.max_condition) {
                Ok(sol) => Ok((1..=partials)
                    .map(|k| match sol.a.get(k) {
                        Some(a) => (2.0 * a.norm(), k as f64 * f0_l, a.arg()),
                        None => (0.0, clip_frequency(k as f64 * f0_l, fs), 0.0),
                    })
                    .collect()),
                Err(Error::IllConditioned { condition }) => Err(condition),
                Err(e) => panic!("harmonic frame solve failed unexpectedly: {e}"),
            }
        })
        .collect();

    let kept: Vec<usize> = (0..frames.len()).filter(|&i| frames[i].is_ok()).collect();
    let skipped = frames.len() - kept.len();
    if kept.is_empty() {
        let worst = frames
            .iter()
            .filter_map(|f| f.as_ref().err())
            .fold(0.0f64, |m, &c| m.max(c));
        return Err(Error::IllConditioned { condition: worst });
    }
    if skipped > 0 {
        log::warn!("harmonic initialization skipped {skipped} of {} frames", frames.len());
    }
    (0..partials)
        .map(|k| {
            let anchors = kept
                .iter()
                .map(|&i| {
                    let (amp, freq, phase) = frames[i].as_ref().expect("kept frames solved")[k];
                    Anchor::new(grid.centers()[i] as f64 / fs, amp, freq, phase)
                })
                .collect();
            PartialTrack::new(anchors)
        })
        .collect()
}

fn clip_frequency(f: f64, fs: f64) -> f64 {
    f.clamp(1e-6 * fs, (0.5 - 1e-6) * fs)
}

/// Tracks rewritten with one anchor per frame center, sampled from their
/// interpolated amplitude, frequency and phase. Centers outside a track's
/// span get zero amplitude.
fn resample_to_grid(tracks: &[PartialTrack], grid: &FrameGrid, len: usize, fs: f64) -> Result<Vec<PartialTrack>> {
    let times: Vec<f64> = grid.centers().iter().map(|&c| c as f64 / fs).collect();
    tracks
        .par_iter()
        .map(|track| {
            let aligned = track.len() == times.len()
                && track
                    .anchors()
                    .iter()
                    .zip(&times)
                    .all(|(a, &t)| (a.time - t).abs() < 1e-12);
            if aligned {
                return Ok(track.clone());
            }
            let inst = track_instantaneous(track, len, fs, PhaseMode::FreqIntegration)?;
            let freq = interp_frequency_spline(track.anchors(), &times)?;
            let anchors = grid
                .centers()
                .iter()
                .zip(&times)
                .zip(freq)
                .map(|((&c, &t), f)| {
                    let f = clip_frequency(f, fs);
                    match &inst {
                        Some(s) if c >= s.start && c < s.start + s.len() => Anchor::new(
                            t,
                            s.amplitude[c - s.start],
                            f,
                            crate::signal::wrap_phase(s.phase[c - s.start]),
                        ),
                        _ => Anchor::new(t, 0.0, f, 0.0),
                    }
                })
                .collect();
            PartialTrack::new(anchors)
        })
        .collect()
}

/// Instantaneous frequency (Hz) of a track's phase at sample `c`. The phase
/// correction toward anchor phases bends the slope away from the
/// interpolated frequency, so the mismatch estimate is relative to this.
fn basis_frequency(s: &InstantaneousTrack, c: usize, fs: f64) -> f64 {
    let i = c - s.start;
    let lo = i.saturating_sub(1);
    let hi = (i + 1).min(s.len() - 1);
    if hi == lo {
        return 0.0;
    }
    (s.phase[hi] - s.phase[lo]) * fs / (TAU * (hi - lo) as f64)
}

struct FrameUpdate {
    /// `(track, amplitude, frequency, phase)` for every active track.
    anchors: Vec<(usize, f64, f64, f64)>,
}

fn adapt_frame(
    i: usize,
    x: &[f64],
    grid: &FrameGrid,
    f0_l: f64,
    tracks: &[PartialTrack],
    inst: &[Option<InstantaneousTrack>],
    config: &EaqhmConfig,
    fs: f64,
) -> Option<FrameUpdate> {
    let c = grid.centers()[i];
    let half = grid.half_lengths()[i];
    if !config.admits(2 * half + 1, fs, f0_l) {
        return None;
    }
    let range = grid.clipped(i, x.len());
    // One-sided edge frames cannot pin down the slope terms; they only
    // refresh amplitude and phase.
    let with_slope = config.admits(range.len(), fs, f0_l);
    let peak = inst
        .iter()
        .flatten()
        .filter(|s| c >= s.start && c < s.start + s.len())
        .map(|s| s.amplitude[c - s.start])
        .fold(0.0f64, f64::max);
    let mut active = Vec::new();
    let mut partials = Vec::new();
    for (j, s) in inst.iter().enumerate() {
        let Some(s) = s else { continue };
        if c < s.start || c >= s.start + s.len() {
            continue;
        }
        let a_c = s.amplitude[c - s.start];
        let phi_c = s.phase[c - s.start];
        if !(a_c > 1e-12 * peak) || tracks[j].anchors()[i].frequency >= fs / 2.0 {
            continue;
        }
        let (amp, phase): (Vec<f64>, Vec<f64>) = range
            .clone()
            .map(|n| {
                if n >= s.start && n < s.start + s.len() {
                    (s.amplitude[n - s.start] / a_c, s.phase[n - s.start] - phi_c)
                } else {
                    (0.0, 0.0)
                }
            })
            .unzip();
        active.push((j, basis_frequency(s, c, fs)));
        partials.push((amp, phase));
    }
    if active.is_empty() {
        return None;
    }
    let window = make_window(config.adapt_window, 2 * half + 1).expect("odd positive length");
    let w: Vec<f64> = range.clone().map(|n| window.values()[n + half - c]).collect();
    let times: Vec<f64> = range.clone().map(|n| (n as f64 - c as f64) / fs).collect();
    let basis = BasisFunctionSet::new(times, partials).expect("basis built on the frame grid");
    let sol = match solve_real(&x[range], &basis, &w, with_slope, config.max_condition) {
        Ok(sol) => sol,
        Err(Error::IllConditioned { condition }) => {
            log::debug!("frame {i} skipped, condition {condition:.3e}");
            return None;
        }
        Err(e) => panic!("adaptive frame solve failed unexpectedly: {e}"),
    };
    let anchors = active
        .iter()
        .enumerate()
        .map(|(m, &(j, f_basis))| {
            let a = sol.a[m + 1];
            let eta = sol.eta[m + 1].clamp(-f0_l / 2.0, f0_l / 2.0);
            let f = clip_frequency(f_basis + eta, fs);
            (j, 2.0 * a.norm(), f, a.arg())
        })
        .collect();
    Some(FrameUpdate { anchors })
}

/// Adaptation loop. Each iteration rebuilds the basis of every frame from
/// the current tracks, re-solves the least-squares system with the slope
/// terms, corrects anchor frequencies by the estimated mismatch and resets
/// amplitudes and phases from the frame-center coefficients.
///
/// Stops when an iteration gains less than the threshold, lowers the SRER
/// (that iterate is discarded), or the iteration budget is spent. The best
/// tracks are returned, aligned to the analysis frame centers.
pub fn adapt(
    signal: &SampledSignal,
    initial: &[PartialTrack],
    f0: &F0Track,
    config: &EaqhmConfig,
) -> Result<EaqhmResult> {
    config.validate()?;
    let fs = signal.fs();
    let x = signal.samples();
    let len = x.len();
    let (grid, f0s) = config.grid(signal, f0)?;
    let mut current = resample_to_grid(initial, &grid, len, fs)?;
    let mut best = srer_slices(x, eaqhm_synthesize(&current, len, fs)?.samples())?;
    let mut history = vec![best];
    let mut adaptations = 0;
    let mut skipped_frames = 0;

    for iteration in 1..=config.max_adaptations {
        adaptations = iteration;
        let inst = current
            .par_iter()
            .map(|t| track_instantaneous(t, len, fs, PhaseMode::FreqIntegration))
            .collect::<Result<Vec<_>>>()?;
        let updates: Vec<Option<FrameUpdate>> = (0..grid.len())
            .into_par_iter()
            .map(|i| adapt_frame(i, x, &grid, f0s[i], &current, &inst, config, fs))
            .collect();
        let skipped = updates.iter().filter(|u| u.is_none()).count();
        if skipped == updates.len() {
            return Err(Error::analysis("every frame was skipped during adaptation"));
        }

        let mut anchors: Vec<Vec<Anchor>> = current.iter().map(|t| t.anchors().to_vec()).collect();
        for (i, update) in updates.iter().enumerate() {
            for &(j, amp, freq, phase) in update.iter().flat_map(|u| &u.anchors) {
                let a = &mut anchors[j][i];
                a.amplitude = amp;
                a.frequency = freq;
                a.phase = phase;
            }
        }
        let next = anchors.into_iter().map(PartialTrack::new).collect::<Result<Vec<_>>>()?;
        let score = srer_slices(x, eaqhm_synthesize(&next, len, fs)?.samples())?;
        log::debug!("adaptation {iteration}: {score:.2} dB ({skipped} frames skipped)");
        if score < best {
            break;
        }
        let gain = score - best;
        current = next;
        best = score;
        history.push(score);
        skipped_frames = skipped;
        if gain < config.threshold_db {
            break;
        }
    }
    Ok(EaqhmResult {
        tracks: current,
        history,
        adaptations,
        skipped_frames,
    })
}

/// Harmonic count covering the band up to Nyquist at the lowest voiced f0.
pub fn full_band_partials(f0: &F0Track, fs: f64) -> Result<usize> {
    let (lo, _) = f0
        .voiced_range()
        .ok_or_else(|| Error::analysis("f0 track has no voiced frame"))?;
    Ok(((fs / (2.0 * lo)).floor() as usize).max(1))
}

/// Initialization followed by adaptation; `partials` defaults to the full band.
pub fn eaqhm_analyze(
    signal: &SampledSignal,
    f0: &F0Track,
    partials: Option<usize>,
    config: &EaqhmConfig,
) -> Result<EaqhmResult> {
    let k = match partials {
        Some(k) => k,
        None => full_band_partials(f0, signal.fs())?,
    };
    let init = init_harmonic(signal, f0, k, config)?;
    adapt(signal, &init, f0, config)
}

pub fn eaqhm_synthesize(tracks: &[PartialTrack], len: usize, fs: f64) -> Result<SampledSignal> {
    synthesize_tracks(tracks, len, fs, PhaseMode::FreqIntegration)
}

/// Stationary harmonic tracks at `k f0` with the given amplitudes and
/// phases at `t = 0`; handy for initializing from known parameters.
pub fn harmonic_tracks(f0: f64, amplitudes: &[f64], phases: &[f64], duration: f64) -> Result<Vec<PartialTrack>> {
    amplitudes
        .iter()
        .zip(phases)
        .enumerate()
        .map(|(k, (&a, &p))| {
            let f = (k + 1) as f64 * f0;
            PartialTrack::new(vec![
                Anchor::new(0.0, a, f, p),
                Anchor::new(duration, a, f, crate::signal::wrap_phase(p + TAU * f * duration)),
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{AmFmSpec, VibratoSpec};
    use crate::signal::srer;

    fn tone(f: f64, amp: f64, phase: f64, fs: f64, secs: f64) -> SampledSignal {
        let n = (fs * secs) as usize;
        SampledSignal::new(
            (0..n).map(|i| amp * (TAU * f * i as f64 / fs + phase).cos()).collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn single_harmonic_amplitude() {
        let s = tone(200.0, 0.8, 0.4, 16000.0, 0.3);
        let f0 = F0Track::constant(200.0, 0.3, 0.01);
        let tracks = init_harmonic(&s, &f0, 1, &EaqhmConfig::default()).unwrap();
        assert_eq!(tracks.len(), 1);
        for a in tracks[0].anchors() {
            assert!((a.amplitude - 0.8).abs() < 0.008, "{a:?}");
            assert_eq!(a.frequency, 200.0);
        }
        let mid = tracks[0].anchors()[150];
        let expected = crate::signal::wrap_phase(TAU * 200.0 * mid.time + 0.4);
        assert!((crate::signal::wrap_phase(mid.phase - expected)).abs() < 1e-6);
    }

    #[test]
    fn silence_gives_zero_amplitudes() {
        let s = SampledSignal::zeros(4000, 16000.0).unwrap();
        let f0 = F0Track::constant(150.0, 0.25, 0.01);
        let tracks = init_harmonic(&s, &f0, 5, &EaqhmConfig::default()).unwrap();
        assert!(tracks.iter().flat_map(|t| t.anchors()).all(|a| a.amplitude == 0.0));
    }

    #[test]
    fn harmonic_signal_initializes_well() {
        let spec = AmFmSpec {
            rho: 0.0,
            duration: 0.5,
            ..AmFmSpec::default()
        };
        let (s, _) = spec.generate().unwrap();
        let f0 = F0Track::constant(150.0, 0.5, 0.01);
        let tracks = init_harmonic(&s, &f0, 10, &EaqhmConfig::default()).unwrap();
        let y = eaqhm_synthesize(&tracks, s.len(), s.fs()).unwrap();
        assert!(srer(&s, &y).unwrap() > 30.0);
    }

    #[test]
    fn harmonics_above_nyquist_are_silent() {
        let s = tone(1000.0, 0.5, 0.0, 8000.0, 0.1);
        let f0 = F0Track::constant(1000.0, 0.1, 0.01);
        let tracks = init_harmonic(&s, &f0, 6, &EaqhmConfig::default()).unwrap();
        for t in &tracks[4..] {
            assert!(t.anchors().iter().all(|a| a.amplitude == 0.0 && a.frequency < 4000.0));
        }
    }

    #[test]
    fn guard_rejects_short_windows() {
        let s = tone(200.0, 1.0, 0.0, 16000.0, 0.2);
        let f0 = F0Track::constant(200.0, 0.2, 0.01);
        let short = EaqhmConfig {
            window: WindowLength::Periods(1.5),
            ..EaqhmConfig::default()
        };
        assert!(matches!(
            init_harmonic(&s, &f0, 3, &short),
            Err(Error::IllConditioned { .. })
        ));
        let fixed = EaqhmConfig {
            window: WindowLength::Samples(159),
            ..EaqhmConfig::default()
        };
        assert!(fixed.min_window_samples(16000.0, 200.0) == 160.0);
        assert!(init_harmonic(&s, &f0, 3, &fixed).is_err());
        let ok = EaqhmConfig {
            window: WindowLength::Samples(161),
            ..EaqhmConfig::default()
        };
        assert!(init_harmonic(&s, &f0, 3, &ok).is_ok());
        let explicit = EaqhmConfig {
            f_min: Some(50.0),
            ..ok
        };
        assert!(init_harmonic(&s, &f0, 3, &explicit).is_err());
    }

    #[test]
    fn adapt_needs_an_admissible_frame() {
        let s = tone(200.0, 1.0, 0.0, 16000.0, 0.2);
        let f0 = F0Track::constant(200.0, 0.2, 0.01);
        let init = harmonic_tracks(200.0, &[1.0], &[0.0], 0.2).unwrap();
        let short = EaqhmConfig {
            window: WindowLength::Periods(1.0),
            ..EaqhmConfig::default()
        };
        assert!(matches!(adapt(&s, &init, &f0, &short), Err(Error::Analysis(_))));
    }

    #[test]
    fn exact_harmonic_converges_quickly() {
        let spec = AmFmSpec {
            rho: 0.0,
            duration: 0.5,
            ..AmFmSpec::default()
        };
        let (s, _) = spec.generate().unwrap();
        let f0 = F0Track::constant(150.0, 0.5, 0.01);
        let res = eaqhm_analyze(&s, &f0, Some(10), &EaqhmConfig::default()).unwrap();
        assert!(res.adaptations <= 2, "{res:?}");
        assert!(res.history.windows(2).all(|w| w[1] >= w[0]));
        assert!(res.final_srer() > 30.0);
    }

    #[test]
    fn adaptation_improves_a_mistuned_start() {
        let fs = 16000.0;
        let s = tone(205.0, 1.0, 0.3, fs, 0.3);
        let f0 = F0Track::constant(200.0, 0.3, 0.01);
        let init = harmonic_tracks(200.0, &[1.0], &[0.0], 0.3).unwrap();
        let res = adapt(&s, &init, &f0, &EaqhmConfig::default()).unwrap();
        assert!(res.history.windows(2).all(|w| w[1] >= w[0]), "{:?}", res.history);
        assert!(res.adaptations <= 10);
        assert!(res.final_srer() > 40.0, "{:?}", res.history);
        let mid = res.tracks[0].anchors()[150];
        assert!((mid.frequency - 205.0).abs() < 0.1, "{mid:?}");
    }

    #[test]
    fn vibrato_adaptation_beats_initialization() {
        let spec = VibratoSpec {
            partials: 6,
            duration: 0.4,
            ..VibratoSpec::default()
        };
        let (s, _) = spec.generate().unwrap();
        let f0 = F0Track::from_fn(|t| spec.f0_at(t), 0.4, 0.005);
        let res = eaqhm_analyze(&s, &f0, Some(6), &EaqhmConfig::default()).unwrap();
        assert!(res.history.len() >= 2);
        assert!(res.final_srer() > res.history[0] + 3.0, "{:?}", res.history);
    }

    #[test]
    fn synthesis_basics() {
        let one = harmonic_tracks(440.0, &[0.5], &[0.0], 0.1).unwrap();
        let y = eaqhm_synthesize(&one, 1600, 16000.0).unwrap();
        for (n, v) in y.samples().iter().enumerate() {
            assert!((v - 0.5 * (TAU * 440.0 * n as f64 / 16000.0).cos()).abs() < 1e-9);
        }
        let silent = eaqhm_synthesize(&[], 100, 16000.0).unwrap();
        assert!(silent.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ground_truth_amfm_tracks_resynthesize() {
        let spec = AmFmSpec {
            duration: 0.5,
            ..AmFmSpec::default()
        };
        let (s, _) = spec.generate().unwrap();
        let y = eaqhm_synthesize(&spec.tracks(16), s.len(), s.fs()).unwrap();
        assert!(srer(&s, &y).unwrap() > 40.0);
    }

    #[test]
    fn full_band_count() {
        let f0 = F0Track::from_fn(|t| 150.0 + 50.0 * t, 1.0, 0.01);
        assert_eq!(full_band_partials(&f0, 16000.0).unwrap(), 53);
    }
}
