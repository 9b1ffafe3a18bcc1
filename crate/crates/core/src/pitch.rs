//! Fundamental-frequency tracking by normalized autocorrelation.
//!
//! Supplies the f0 tracks that drive harmonic initialization, pitch-adaptive
//! windows and model orders. Tracks are exchanged as two-column CSV
//! (`time`, `f0`), with `0` marking unvoiced frames, so any external
//! estimator can be dropped in.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{linear_interp, SampledSignal};

/// Normalized autocorrelation peaks below this mark a frame unvoiced.
pub const VOICING_THRESHOLD: f64 = 0.3;
const MEDIAN_SPAN: usize = 5;
/// Smallest lag whose correlation reaches this fraction of the best one wins;
/// keeps the estimator off sub-octaves.
const FIRST_PEAK_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Anchor {
    pub time: f64,
    /// Hz; unvoiced anchors carry the nearest voiced value.
    pub f0: f64,
    pub voiced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F0Track {
    pub anchors: Vec<F0Anchor>,
    pub f_min: f64,
    pub f_max: f64,
}

impl F0Track {
    /// Voiced track at a fixed f0 with anchors every `hop` seconds.
    pub fn constant(f0: f64, duration: f64, hop: f64) -> Self {
        Self::from_fn(|_| f0, duration, hop)
    }

    /// Voiced track sampling `f0(t)` every `hop` seconds over `[0, duration]`.
    pub fn from_fn(f0: impl Fn(f64) -> f64, duration: f64, hop: f64) -> Self {
        let n = (duration / hop).ceil() as usize;
        let anchors: Vec<F0Anchor> = (0..=n)
            .map(|i| {
                let t = (i as f64 * hop).min(duration);
                F0Anchor {
                    time: t,
                    f0: f0(t),
                    voiced: true,
                }
            })
            .collect::<Vec<_>>();
        let mut anchors = anchors;
        anchors.dedup_by(|a, b| a.time == b.time);
        let f_min = anchors.iter().map(|a| a.f0).fold(f64::INFINITY, f64::min);
        let f_max = anchors.iter().map(|a| a.f0).fold(0.0, f64::max);
        Self { anchors, f_min, f_max }
    }

    pub fn has_voiced(&self) -> bool {
        self.anchors.iter().any(|a| a.voiced)
    }

    /// f0 at time `t`, linearly interpolated between anchors; `None` when
    /// the track has no voiced frame.
    pub fn f0_at(&self, t: f64) -> Option<f64> {
        if !self.has_voiced() {
            return None;
        }
        let xs: Vec<f64> = self.anchors.iter().map(|a| a.time).collect();
        let ys: Vec<f64> = self.anchors.iter().map(|a| a.f0).collect();
        Some(linear_interp(&xs, &ys, &[t])[0])
    }

    /// Evaluates f0 at many increasing times at once.
    pub fn f0_at_many(&self, times: &[f64]) -> Option<Vec<f64>> {
        if !self.has_voiced() {
            return None;
        }
        let xs: Vec<f64> = self.anchors.iter().map(|a| a.time).collect();
        let ys: Vec<f64> = self.anchors.iter().map(|a| a.f0).collect();
        Some(linear_interp(&xs, &ys, times))
    }

    pub fn voiced_range(&self) -> Option<(f64, f64)> {
        let voiced = self.anchors.iter().filter(|a| a.voiced).map(|a| a.f0);
        let (lo, hi) = voiced.fold((f64::INFINITY, 0.0_f64), |(lo, hi), f| (lo.min(f), hi.max(f)));
        (hi > 0.0).then_some((lo, hi))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
        w.write_record(["time", "f0"])?;
        for a in &self.anchors {
            let f0 = if a.voiced { a.f0 } else { 0.0 };
            w.write_record([a.time.to_string(), f0.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a two-column CSV (header optional). Non-positive or NaN f0
    /// values are unvoiced and inherit the nearest voiced value.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_path(path)
            .map_err(|e| csv_io(path, e))?;
        let mut anchors = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Format {
                    path: path.into(),
                    reason: format!("line {} has fewer than two columns", i + 1),
                });
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            let (time, f0) = match parsed {
                (Ok(t), Ok(f)) => (t, f),
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::Format {
                        path: path.into(),
                        reason: format!("line {} is not numeric", i + 1),
                    })
                }
            };
            let voiced = f0.is_finite() && f0 > 0.0;
            anchors.push(F0Anchor {
                time,
                f0: if voiced { f0 } else { 0.0 },
                voiced,
            });
        }
        if anchors.windows(2).any(|w| w[0].time >= w[1].time) {
            return Err(Error::Format {
                path: path.into(),
                reason: "times must be strictly increasing".into(),
            });
        }
        inherit_unvoiced(&mut anchors);
        let (f_min, f_max) = anchors
            .iter()
            .filter(|a| a.voiced)
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), a| (lo.min(a.f0), hi.max(a.f0)));
        Ok(Self { anchors, f_min, f_max })
    }
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.into(),
            reason: format!("{other:?}"),
        },
    }
}

/// Unvoiced anchors take the f0 of the nearest voiced anchor.
fn inherit_unvoiced(anchors: &mut [F0Anchor]) {
    let voiced: Vec<usize> = (0..anchors.len()).filter(|&i| anchors[i].voiced).collect();
    if voiced.is_empty() {
        return;
    }
    for i in 0..anchors.len() {
        if anchors[i].voiced {
            continue;
        }
        let j = voiced.partition_point(|&v| v < i);
        let nearest = match (j.checked_sub(1).map(|p| voiced[p]), voiced.get(j)) {
            (Some(a), Some(&b)) => {
                if i - a <= b - i {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        anchors[i].f0 = anchors[nearest].f0;
    }
}

/// Per-frame normalized autocorrelation f0 estimate over lags
/// `[fs/f_max, fs/f_min]`, parabolic lag refinement, voicing by correlation
/// threshold and a five-frame median smoother.
pub fn estimate_f0(signal: &SampledSignal, f_min: f64, f_max: f64, hop_ms: f64) -> Result<F0Track> {
    let fs = signal.fs();
    if f_min < 40.0 || f_max >= fs / 2.0 || f_min >= f_max {
        return Err(Error::usage(format!(
            "invalid f0 search range [{f_min}, {f_max}] Hz for fs = {fs} Hz"
        )));
    }
    if !(hop_ms > 0.0) {
        return Err(Error::usage("hop must be positive"));
    }
    let x = signal.samples();
    let lag_min = (fs / f_max).floor().max(1.0) as usize;
    let lag_max = (fs / f_min).ceil() as usize;
    if (x.len() as f64) < 2.0 * fs / f_min {
        return Err(Error::usage(format!(
            "signal of {:.4} s shorter than two periods of f_min",
            signal.duration()
        )));
    }
    let window = (2 * lag_max).min(x.len().saturating_sub(lag_max + 1)).max(lag_max);
    let span = window + lag_max + 1;
    let hop = ((hop_ms * 1e-3 * fs).round() as usize).max(1);

    let mut raw = Vec::new();
    let mut center = 0;
    while center < x.len() {
        let start = center.saturating_sub(span / 2).min(x.len().saturating_sub(span));
        let seg = &x[start..(start + span).min(x.len())];
        let est = frame_f0(seg, window, lag_min, lag_max);
        let voiced = est.map(|(_, r)| r >= VOICING_THRESHOLD).unwrap_or(false);
        let f0 = est.map(|(lag, _)| fs / lag).unwrap_or(0.0);
        raw.push(F0Anchor {
            time: center as f64 / fs,
            f0: if voiced { f0.clamp(f_min, f_max) } else { 0.0 },
            voiced,
        });
        center += hop;
    }

    let smoothed: Vec<f64> = (0..raw.len())
        .map(|i| {
            if !raw[i].voiced {
                return 0.0;
            }
            let lo = i.saturating_sub(MEDIAN_SPAN / 2);
            let hi = (i + MEDIAN_SPAN / 2 + 1).min(raw.len());
            let mut v: Vec<f64> = raw[lo..hi].iter().filter(|a| a.voiced).map(|a| a.f0).collect();
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        })
        .collect();
    for (a, f) in raw.iter_mut().zip(smoothed) {
        a.f0 = f;
    }
    inherit_unvoiced(&mut raw);
    Ok(F0Track {
        anchors: raw,
        f_min,
        f_max,
    })
}

/// Returns `(fractional lag, correlation)` of the selected peak.
fn frame_f0(seg: &[f64], window: usize, lag_min: usize, lag_max: usize) -> Option<(f64, f64)> {
    if seg.len() < window + lag_max + 1 {
        return None;
    }
    let head = &seg[..window];
    let e0: f64 = head.iter().map(|v| v * v).sum();
    if e0 <= 0.0 {
        return None;
    }
    // r[lag - lag_min + 1] for lags lag_min-1 ..= lag_max+1 (neighbors for refinement)
    let lo = lag_min.saturating_sub(1).max(1);
    let corr: Vec<f64> = (lo..=lag_max + 1)
        .map(|lag| {
            let tail = &seg[lag..lag + window];
            let num: f64 = head.iter().zip(tail).map(|(a, b)| a * b).sum();
            let e1: f64 = tail.iter().map(|v| v * v).sum();
            if e1 > 0.0 {
                num / (e0 * e1).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let at = |lag: usize| corr[lag - lo];
    let best = (lag_min..=lag_max).map(at).fold(f64::NEG_INFINITY, f64::max);
    if best <= 0.0 {
        return Some((lag_max as f64, best.max(0.0)));
    }
    let lag = (lag_min..=lag_max)
        .find(|&l| {
            let r = at(l);
            r >= FIRST_PEAK_RATIO * best && r >= at(l - 1).max(0.0) && r >= at(l + 1)
        })
        .unwrap_or_else(|| (lag_min..=lag_max).max_by(|&a, &b| at(a).total_cmp(&at(b))).unwrap());
    let (a, b, c) = (at(lag - 1), at(lag), at(lag + 1));
    let denom = a - 2.0 * b + c;
    let shift = if denom < 0.0 {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Some((lag as f64 + shift, b))
}

/// Mean of `1/f0` over voiced anchors, in seconds.
pub fn average_pitch_period(track: &F0Track) -> Result<f64> {
    let periods: Vec<f64> = track.anchors.iter().filter(|a| a.voiced).map(|a| 1.0 / a.f0).collect();
    if periods.is_empty() {
        return Err(Error::analysis("no voiced frames in f0 track"));
    }
    Ok(periods.iter().sum::<f64>() / periods.len() as f64)
}
