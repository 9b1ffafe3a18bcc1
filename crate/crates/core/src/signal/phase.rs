use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Wraps a phase into `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi - TAU * (phi / TAU).round();
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

/// Measured phase at a (possibly fractional) sample position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAnchor {
    pub position: f64,
    pub phase: f64,
}

/// Phase and frequency (Hz) at a frame boundary, for cubic interpolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBoundary {
    pub position: f64,
    pub phase: f64,
    pub frequency: f64,
}

/// Integrates a per-sample frequency track (Hz) into a phase track with the
/// cumulative trapezoidal rule, then pulls the result onto the measured
/// anchor phases: the residual at each anchor (mod 2pi, unwrapped along the
/// anchors) is spread linearly between consecutive anchors and held outside
/// them. Without anchors the phase starts at zero.
pub fn phase_by_freq_integration(freq: &[f64], fs: f64, anchors: &[PhaseAnchor]) -> Result<Vec<f64>> {
    if let Some(n) = freq.iter().position(|f| !f.is_finite()) {
        return Err(Error::usage(format!("non-finite frequency at sample {n}")));
    }
    if freq.is_empty() {
        return Ok(Vec::new());
    }
    let step = TAU / fs;
    let mut phase = Vec::with_capacity(freq.len());
    let mut acc = 0.0;
    phase.push(acc);
    for w in freq.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * step;
        phase.push(acc);
    }
    if anchors.is_empty() {
        return Ok(phase);
    }

    let integrated_at = |p: f64| -> f64 {
        let last = phase.len() - 1;
        if p <= 0.0 {
            // extrapolate with the first sample's frequency
            return phase[0] + p * freq[0] * step;
        }
        if p >= last as f64 {
            return phase[last] + (p - last as f64) * freq[last] * step;
        }
        let i = p.floor() as usize;
        let w = p - i as f64;
        if w == 0.0 {
            phase[i]
        } else {
            // quadratic within the sample: frequency varies linearly
            let f = freq[i] + w * (freq[i + 1] - freq[i]);
            phase[i] + 0.5 * (freq[i] + f) * w * step
        }
    };

    let mut residuals = Vec::with_capacity(anchors.len());
    let mut prev: Option<f64> = None;
    for a in anchors {
        let r = wrap_phase(a.phase - integrated_at(a.position));
        let r = match prev {
            Some(p) => p + wrap_phase(r - p),
            None => r,
        };
        residuals.push(r);
        prev = Some(r);
    }
    let positions: Vec<f64> = anchors.iter().map(|a| a.position).collect();
    let grid: Vec<f64> = (0..phase.len()).map(|n| n as f64).collect();
    let correction = super::linear_interp(&positions, &residuals, &grid);
    Ok(phase.iter().zip(correction).map(|(p, c)| p + c).collect())
}

/// Cubic phase interpolation between consecutive frame boundaries with the
/// minimal-|M| unwrapping rule; phase and its derivative (2 pi f / fs) are
/// matched at both ends of every segment. Output covers sample positions
/// `0..len`; positions outside the boundary span continue linearly.
pub fn phase_cubic_mq(boundaries: &[PhaseBoundary], fs: f64, len: usize) -> Result<Vec<f64>> {
    if boundaries.is_empty() {
        return Err(Error::usage("cubic phase needs at least one boundary"));
    }
    if boundaries.windows(2).any(|w| w[1].position <= w[0].position) {
        return Err(Error::usage("frame boundaries must be strictly increasing"));
    }
    let omega = |b: &PhaseBoundary| TAU * b.frequency / fs;

    // (alpha, beta) per segment, after unwrapping
    let coeffs: Vec<(f64, f64)> = boundaries.windows(2).map(|w| cubic_coeffs(&w[0], &w[1], fs)).collect();

    let first = &boundaries[0];
    let last = &boundaries[boundaries.len() - 1];
    let mut seg = 0;
    let out = (0..len)
        .map(|n| {
            let p = n as f64;
            if p <= first.position {
                return first.phase + omega(first) * (p - first.position);
            }
            if p >= last.position {
                // continue from the end of the last cubic so the track stays smooth
                return match boundaries.len() {
                    1 => last.phase + omega(last) * (p - last.position),
                    _ => {
                        let end = eval_segment(
                            &boundaries[boundaries.len() - 2],
                            coeffs[coeffs.len() - 1],
                            last.position,
                            fs,
                        );
                        end + omega(last) * (p - last.position)
                    }
                };
            }
            while boundaries[seg + 1].position < p {
                seg += 1;
            }
            eval_segment(&boundaries[seg], coeffs[seg], p, fs)
        })
        .collect();
    Ok(out)
}

/// Quadratic and cubic coefficients of the phase polynomial between two
/// boundaries, using the integer unwrapping `M` that minimizes the cubic's
/// curvature.
fn cubic_coeffs(b0: &PhaseBoundary, b1: &PhaseBoundary, fs: f64) -> (f64, f64) {
    let t = b1.position - b0.position;
    let w0 = TAU * b0.frequency / fs;
    let w1 = TAU * b1.frequency / fs;
    let m = ((b0.phase + w0 * t - b1.phase + 0.5 * (w1 - w0) * t) / TAU).round();
    let d = b1.phase - b0.phase - w0 * t + TAU * m;
    let alpha = 3.0 / (t * t) * d - (w1 - w0) / t;
    let beta = -2.0 / (t * t * t) * d + (w1 - w0) / (t * t);
    (alpha, beta)
}

fn eval_segment(b0: &PhaseBoundary, (alpha, beta): (f64, f64), p: f64, fs: f64) -> f64 {
    let t = p - b0.position;
    b0.phase + TAU * b0.frequency / fs * t + alpha * t * t + beta * t * t * t
}
