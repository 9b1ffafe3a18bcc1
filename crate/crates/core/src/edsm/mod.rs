//! Exponentially damped sinusoidal model.
//!
//! Each non-overlapping rectangular frame is modeled as a sum of complex
//! exponentials `alpha_k z_k^n`. Poles come from ESPRIT on the frame's Hankel
//! matrix, amplitudes from a Vandermonde least-squares fit, and synthesis
//! evaluates the exponentials frame by frame. Poles are kept in per-sample
//! units (`z = e^(delta + i omega)`, `n` in samples).

mod amplitudes;
mod components;
mod esprit;
mod hankel;

pub use amplitudes::{vandermonde, vandermonde_amplitudes, AmplitudeFit, CONDITION_WARNING};
pub use components::{poles_to_components, DampedSinusoid, Pole, WindowUnitParams};
pub use esprit::{
    esprit_poles, esprit_poles_with_tolerance, signal_subspace, EspritPoles, SignalSubspace, RANK_TOLERANCE,
};
pub use hankel::build_hankel;

use nalgebra::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitch::F0Track;
use crate::signal::SampledSignal;

/// Largest per-sample |damping| used at synthesis time.
pub const MAX_SYNTH_DAMPING: f64 = 0.2;

/// Hankel geometry for one frame: `rows + cols - 1 = len`, both larger than
/// the number of exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelConfig {
    pub len: usize,
    pub cols: usize,
    pub rows: usize,
    pub exponentials: usize,
}

impl HankelConfig {
    /// Default split `cols = len / 2`, with the order capped so both
    /// dimensions exceed it.
    pub fn for_frame(len: usize, requested_exponentials: usize) -> Self {
        let cols = (len / 2).max(1);
        let rows = len + 1 - cols;
        let cap = cols.min(rows).saturating_sub(1);
        Self {
            len,
            cols,
            rows,
            exponentials: requested_exponentials.min(cap),
        }
    }
}

/// Number of sinusoids sought per frame.
#[derive(Debug, Clone)]
pub enum EdsmOrder {
    Fixed(usize),
    /// `floor(fs / (2 f0))` with f0 read at the frame center.
    FullBand(F0Track),
}

#[derive(Debug, Clone)]
pub struct EdsmConfig {
    /// Frame length in samples; frames do not overlap.
    pub window_len: usize,
    pub order: EdsmOrder,
}

/// Analysis result for one frame.
#[derive(Debug, Clone)]
pub struct EdsmFrame {
    pub start: usize,
    /// Samples the frame covers in the signal.
    pub len: usize,
    /// Length the poles were estimated on (`len`, or the zero-padded length).
    pub analysis_len: usize,
    pub requested_order: usize,
    pub effective_order: usize,
    pub poles: Vec<Complex<f64>>,
    pub alphas: Vec<Complex<f64>>,
    pub components: Vec<DampedSinusoid>,
    pub condition: f64,
}

/// Serializable per-frame parameter dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdsmFrameReport {
    pub start: usize,
    pub len: usize,
    pub requested_order: usize,
    pub effective_order: usize,
    pub components: Vec<DampedSinusoid>,
}

impl From<&EdsmFrame> for EdsmFrameReport {
    fn from(f: &EdsmFrame) -> Self {
        Self {
            start: f.start,
            len: f.len,
            requested_order: f.requested_order,
            effective_order: f.effective_order,
            components: f.components.clone(),
        }
    }
}

/// Fits poles and amplitudes to one frame with at most `k_exp`
/// exponentials.
///
/// The order is capped by the Hankel shape and the numerical rank. Short
/// frames of closely spaced partials leave the trailing singular vectors
/// poorly determined, and ESPRIT poles computed from them can miss the
/// signal entirely, so every order up to the cap is tried and the one whose
/// synthesized frame has the smallest error is kept.
pub fn analyze_frame(frame: &[f64], k_exp: usize, fs: f64) -> Result<(EspritPoles, AmplitudeFit, Vec<DampedSinusoid>)> {
    let cfg = HankelConfig::for_frame(frame.len(), k_exp);
    let sub = signal_subspace(frame, cfg.cols, RANK_TOLERANCE)?;
    let cap = cfg.exponentials.min(sub.rank());
    let mut best: Option<(f64, usize, Vec<Complex<f64>>, AmplitudeFit)> = None;
    for k in (1..=cap).rev() {
        // Amplitudes are fitted to the poles synthesis will actually use.
        let poles: Vec<Complex<f64>> = sub.poles(k)?.into_iter().map(clamp_pole).collect();
        let fit = vandermonde_amplitudes(frame, &poles)?;
        let err = frame_error(frame, &poles, &fit.alphas);
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, k, poles, fit));
        }
        if err == 0.0 {
            break;
        }
    }
    let (k, poles, fit) = match best {
        Some((_, k, poles, fit)) => (k, poles, fit),
        None => (0, Vec::new(), vandermonde_amplitudes(frame, &[])?),
    };
    if k < cfg.exponentials {
        log::debug!("EDSM frame order {k} of {} requested", cfg.exponentials);
    }
    let components = poles_to_components(&poles, &fit.alphas, fs);
    let est = EspritPoles {
        poles,
        requested_order: cfg.exponentials,
        effective_order: k,
        singular_values: sub.singular_values,
    };
    Ok((est, fit, components))
}

/// Squared error of the synthesized frame, clamped poles included.
fn frame_error(frame: &[f64], poles: &[Complex<f64>], alphas: &[Complex<f64>]) -> f64 {
    let mut y = vec![0.0; frame.len()];
    for (z, alpha) in poles.iter().zip(alphas) {
        let z = clamp_pole(*z);
        let mut p = *alpha;
        for v in y.iter_mut() {
            *v += p.re;
            p *= z;
        }
    }
    frame.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn edsm_analyze(signal: &SampledSignal, config: &EdsmConfig) -> Result<Vec<EdsmFrame>> {
    let l = config.window_len;
    if l < 2 {
        return Err(Error::usage("EDSM window must span at least two samples"));
    }
    let fs = signal.fs();
    let x = signal.samples();
    let starts: Vec<usize> = (0..x.len()).step_by(l).collect();

    let sinusoids_at = |start: usize, len: usize| -> Result<usize> {
        match &config.order {
            EdsmOrder::Fixed(k) => Ok(*k),
            EdsmOrder::FullBand(track) => {
                let center = (start as f64 + 0.5 * len as f64) / fs;
                let f0 = track
                    .f0_at(center)
                    .ok_or_else(|| Error::analysis("f0 track has no voiced frames"))?;
                Ok((fs / (2.0 * f0)).floor() as usize)
            }
        }
    };

    starts
        .par_iter()
        .map(|&start| {
            let len = l.min(x.len() - start);
            let k_exp = HankelConfig::for_frame(l, 2 * sinusoids_at(start, len)?).exponentials;
            // A short trailing frame is analyzed at its own length with the
            // order re-capped to its Hankel shape; only a frame too short to
            // carry a single exponential is zero-padded to a full window.
            let mut samples = x[start..start + len].to_vec();
            let k_exp = if len < l && HankelConfig::for_frame(len, k_exp).exponentials == 0 {
                samples.resize(l, 0.0);
                k_exp
            } else {
                HankelConfig::for_frame(len, k_exp).exponentials
            };
            let (est, fit, components) = analyze_frame(&samples, k_exp, fs)?;
            Ok(EdsmFrame {
                start,
                len,
                analysis_len: samples.len(),
                requested_order: est.requested_order,
                effective_order: est.effective_order,
                poles: est.poles,
                alphas: fit.alphas,
                components,
                condition: fit.condition,
            })
        })
        .collect()
}

/// Evaluates `Re(sum alpha_k z_k^n)` frame by frame. Poles are clamped to
/// `|ln |z|| <= MAX_SYNTH_DAMPING`.
pub fn edsm_synthesize(frames: &[EdsmFrame], len: usize, fs: f64) -> Result<SampledSignal> {
    let (re, _) = edsm_synthesize_complex(frames, len)?;
    SampledSignal::new(re, fs)
}

/// Real and imaginary parts of the frame-wise exponential sum. The
/// imaginary part vanishes when poles come in conjugate pairs.
pub fn edsm_synthesize_complex(frames: &[EdsmFrame], len: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut expected = 0;
    for f in frames {
        if f.start != expected {
            return Err(Error::usage(format!(
                "EDSM frames not contiguous: expected start {expected}, got {}",
                f.start
            )));
        }
        expected = f.start + f.len;
    }
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    for f in frames {
        let end = (f.start + f.len).min(len);
        if f.start >= end {
            continue;
        }
        for (z, alpha) in f.poles.iter().zip(&f.alphas) {
            let z = clamp_pole(*z);
            let mut p = *alpha;
            for n in f.start..end {
                re[n] += p.re;
                im[n] += p.im;
                p *= z;
            }
        }
    }
    Ok((re, im))
}

fn clamp_pole(z: Complex<f64>) -> Complex<f64> {
    let r = z.norm();
    let (lo, hi) = ((-MAX_SYNTH_DAMPING).exp(), MAX_SYNTH_DAMPING.exp());
    if r > hi || r < lo {
        z * (r.clamp(lo, hi) / r)
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::srer;
    use std::f64::consts::TAU;

    #[test]
    fn hankel_config_caps_order() {
        let c = HankelConfig::for_frame(53, 106);
        assert_eq!((c.cols, c.rows), (26, 28));
        assert_eq!(c.cols + c.rows - 1, 53);
        assert_eq!(c.exponentials, 25);
        assert_eq!(HankelConfig::for_frame(100, 6).exponentials, 6);
    }

    #[test]
    fn stationary_tone_frames() {
        let fs = 16000.0;
        let x: Vec<f64> = (0..1600)
            .map(|n| 0.9 * (TAU * 100.0 * n as f64 / fs + 0.2).cos())
            .collect();
        let s = SampledSignal::new(x, fs).unwrap();
        let frames = edsm_analyze(
            &s,
            &EdsmConfig {
                window_len: 120,
                order: EdsmOrder::Fixed(1),
            },
        )
        .unwrap();
        assert_eq!(frames.len(), 14);
        for f in &frames {
            assert_eq!(f.components.len(), 1);
            let c = f.components[0];
            assert!(c.damping.abs() < 1e-9);
            assert!((c.frequency - 100.0).abs() < 1e-6);
            assert!((c.amplitude - 0.9).abs() < 1e-8);
        }
        let y = edsm_synthesize(&frames, s.len(), fs).unwrap();
        assert!(srer(&s, &y).unwrap() > 100.0);
    }

    #[test]
    fn silence_has_zero_order() {
        let s = SampledSignal::zeros(300, 8000.0).unwrap();
        let frames = edsm_analyze(
            &s,
            &EdsmConfig {
                window_len: 64,
                order: EdsmOrder::Fixed(3),
            },
        )
        .unwrap();
        assert!(frames.iter().all(|f| f.effective_order == 0 && f.components.is_empty()));
        let y = edsm_synthesize(&frames, 300, 8000.0).unwrap();
        assert!(y.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn trailing_frame_handling() {
        let fs = 8000.0;
        let x: Vec<f64> = (0..210).map(|n| (TAU * 500.0 * n as f64 / fs).cos()).collect();
        let s = SampledSignal::new(x, fs).unwrap();
        // 210 = 3 * 64 + 18; the tail keeps its length, order re-capped to 8
        let frames = edsm_analyze(
            &s,
            &EdsmConfig {
                window_len: 64,
                order: EdsmOrder::Fixed(5),
            },
        )
        .unwrap();
        let last = frames.last().unwrap();
        assert_eq!((last.len, last.analysis_len, last.requested_order), (18, 18, 8));
        // 2 trailing samples cannot carry an exponential: padded to 64
        let s2 = SampledSignal::new(s.samples()[..194].to_vec(), fs).unwrap();
        let frames2 = edsm_analyze(
            &s2,
            &EdsmConfig {
                window_len: 64,
                order: EdsmOrder::Fixed(1),
            },
        )
        .unwrap();
        let last = frames2.last().unwrap();
        assert_eq!((last.len, last.analysis_len), (2, 64));
        assert_eq!(edsm_synthesize(&frames2, 194, fs).unwrap().len(), 194);
        let y = edsm_synthesize(&frames, 210, fs).unwrap();
        assert_eq!(y.len(), 210);
    }

    #[test]
    fn full_band_order_follows_f0() {
        let fs = 16000.0;
        let track = F0Track::constant(400.0, 1.0, 0.01);
        let x: Vec<f64> = (0..800).map(|n| (TAU * 400.0 * n as f64 / fs).cos()).collect();
        let s = SampledSignal::new(x, fs).unwrap();
        let frames = edsm_analyze(
            &s,
            &EdsmConfig {
                window_len: 200,
                order: EdsmOrder::FullBand(track),
            },
        )
        .unwrap();
        // 16000 / 800 = 20 sinusoids -> 40 exponentials, within the 99 cap
        assert!(frames.iter().all(|f| f.requested_order == 40));
        assert!(frames.iter().all(|f| f.effective_order == 2));
    }

    #[test]
    fn gain_scaling() {
        let fs = 16000.0;
        let x: Vec<f64> = (0..256)
            .map(|n| {
                let n = n as f64;
                (-0.002 * n).exp() * (0.3 * n + 0.1).cos() + 0.5 * (0.001 * n).exp() * (1.1 * n).cos()
            })
            .collect();
        let (a, fa, _) = analyze_frame(&x, 4, fs).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let (b, fb, _) = analyze_frame(&x2, 4, fs).unwrap();
        let key = |z: &Complex<f64>| (z.im * 1e6).round() as i64;
        let mut pa: Vec<_> = a.poles.iter().zip(&fa.alphas).collect();
        let mut pb: Vec<_> = b.poles.iter().zip(&fb.alphas).collect();
        pa.sort_by_key(|p| key(p.0));
        pb.sort_by_key(|p| key(p.0));
        for ((za, aa), (zb, ab)) in pa.iter().zip(&pb) {
            assert!((*za - *zb).norm() < 1e-10);
            assert!((*ab * 2.0 - **ab).norm() > 0.0);
            assert!((**aa * 2.0 - **ab).norm() < 1e-9 * ab.norm());
        }
    }

    #[test]
    fn non_contiguous_frames_rejected() {
        let s = SampledSignal::new((0..100).map(|n| (n as f64 * 0.2).sin()).collect(), 1000.0).unwrap();
        let mut frames = edsm_analyze(
            &s,
            &EdsmConfig {
                window_len: 40,
                order: EdsmOrder::Fixed(1),
            },
        )
        .unwrap();
        frames.remove(1);
        assert!(edsm_synthesize(&frames, 100, 1000.0).is_err());
    }
}
