//! Synthetic test signals with exact ground truth.
//!
//! Every generator returns the signal together with the exact per-partial
//! trajectories (or damped-sinusoid parameters) that produced it, so
//! estimators can be scored against the truth rather than against each
//! other.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edsm::DampedSinusoid;
use crate::error::{Error, Result};
use crate::signal::{wrap_phase, Anchor, PartialTrack, SampledSignal};

/// How the damping factor of the chirp segment is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChirpEnvelope {
    /// `e^(-d t)` taken literally; with `d = -2` the envelope grows.
    Literal,
    /// `e^(-|d| t)`: always decaying.
    Decaying,
}

/// One second of a stationary tone at `f_start`, followed by a linear chirp
/// `f_start -> f_end` of the same length with an exponential envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChirpSpec {
    pub f_start: f64,
    pub f_end: f64,
    /// Length of each of the two segments, seconds.
    pub duration: f64,
    /// Damping `d` in 1/s.
    pub damping: f64,
    pub fs: f64,
    pub envelope: ChirpEnvelope,
}

impl ChirpSpec {
    pub fn standard(fs: f64) -> Self {
        Self {
            f_start: 100.0,
            f_end: 1000.0,
            duration: 1.0,
            damping: -2.0,
            fs,
            envelope: ChirpEnvelope::Literal,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.fs < 4000.0 {
            return Err(Error::Config(format!("chirp needs fs >= 4 kHz, got {}", self.fs)));
        }
        if !(0.0 < self.f_start && self.f_start <= self.f_end && self.f_end < self.fs / 2.0) {
            return Err(Error::Config("chirp needs 0 < f_start <= f_end < fs/2".into()));
        }
        if !(self.duration > 0.0) {
            return Err(Error::Config("chirp duration must be positive".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        (2.0 * self.duration * self.fs).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        if t < self.duration {
            self.f_start
        } else {
            let tau = t - self.duration;
            self.f_start + (self.f_end - self.f_start) * tau / self.duration
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        if t < self.duration {
            return 1.0;
        }
        let tau = t - self.duration;
        match self.envelope {
            ChirpEnvelope::Literal => (-self.damping * tau).exp(),
            ChirpEnvelope::Decaying => (-self.damping.abs() * tau).exp(),
        }
    }

    /// Unwrapped phase; continuous across the junction.
    pub fn phase(&self, t: f64) -> f64 {
        if t < self.duration {
            TAU * self.f_start * t
        } else {
            let tau = t - self.duration;
            let slope = (self.f_end - self.f_start) / self.duration;
            TAU * (self.f_start * self.duration + self.f_start * tau + 0.5 * slope * tau * tau)
        }
    }

    pub fn minimum_period(&self) -> f64 {
        1.0 / self.f_start
    }

    /// Ground-truth track with an anchor every `step` samples (and at the
    /// last sample).
    pub fn track(&self, step: usize) -> PartialTrack {
        let len = self.len();
        let anchors = anchor_indices(len, step)
            .map(|n| {
                let t = n as f64 / self.fs;
                Anchor::new(
                    t,
                    self.envelope(t),
                    self.instantaneous_frequency(t),
                    wrap_phase(self.phase(t)),
                )
            })
            .collect();
        PartialTrack::new(anchors).expect("chirp anchors are valid")
    }

    pub fn generate(&self) -> Result<(SampledSignal, PartialTrack)> {
        self.validate()?;
        let samples = (0..self.len())
            .map(|n| {
                let t = n as f64 / self.fs;
                self.envelope(t) * self.phase(t).cos()
            })
            .collect();
        Ok((SampledSignal::new(samples, self.fs)?, self.track(1)))
    }
}

/// Stationary 100 Hz tone plus exponentially modulated 100 -> 1000 Hz chirp.
pub fn gen_stationary_plus_chirp(fs: f64) -> Result<(SampledSignal, PartialTrack)> {
    ChirpSpec::standard(fs).generate()
}

/// Harmonic AM-FM signal
/// `sum_k A_k cos(2 pi k f0 t + k rho cos(2 pi fc t))`, `A_k = 1/2 + r_k / k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmFmSpec {
    pub partials: usize,
    pub f0: f64,
    pub fc: f64,
    pub rho: f64,
    pub duration: f64,
    pub fs: f64,
    pub seed: u64,
}

impl Default for AmFmSpec {
    fn default() -> Self {
        Self {
            partials: 10,
            f0: 150.0,
            fc: 300.0,
            rho: 0.01,
            duration: 1.0,
            fs: 16000.0,
            seed: 0,
        }
    }
}

impl AmFmSpec {
    fn validate(&self) -> Result<()> {
        if self.partials == 0 {
            return Err(Error::Config("AM-FM signal needs at least one partial".into()));
        }
        if !(self.rho >= 0.0) || !(self.f0 > 0.0) || !(self.duration > 0.0) {
            return Err(Error::Config("AM-FM needs f0 > 0, rho >= 0, duration > 0".into()));
        }
        let k = self.partials as f64;
        if k * self.f0 + k * self.rho * self.fc >= self.fs / 2.0 {
            return Err(Error::Config(format!(
                "highest partial reaches {} Hz, above Nyquist",
                k * self.f0 + k * self.rho * self.fc
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        (self.duration * self.fs).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A_k` for `k = 1..=K`; `r_k` drawn once per partial from the seed.
    pub fn amplitudes(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (1..=self.partials)
            .map(|k| 0.5 + rng.random::<f64>() / k as f64)
            .collect()
    }

    pub fn phase(&self, k: usize, t: f64) -> f64 {
        let k = k as f64;
        TAU * k * self.f0 * t + k * self.rho * (TAU * self.fc * t).cos()
    }

    pub fn frequency(&self, k: usize, t: f64) -> f64 {
        let k = k as f64;
        k * self.f0 - k * self.rho * self.fc * (TAU * self.fc * t).sin()
    }

    pub fn minimum_period(&self) -> f64 {
        1.0 / self.f0
    }

    pub fn tracks(&self, step: usize) -> Vec<PartialTrack> {
        let amps = self.amplitudes();
        (1..=self.partials)
            .map(|k| {
                let anchors = anchor_indices(self.len(), step)
                    .map(|n| {
                        let t = n as f64 / self.fs;
                        Anchor::new(t, amps[k - 1], self.frequency(k, t), wrap_phase(self.phase(k, t)))
                    })
                    .collect();
                PartialTrack::new(anchors).expect("AM-FM anchors are valid")
            })
            .collect()
    }

    pub fn generate(&self) -> Result<(SampledSignal, Vec<PartialTrack>)> {
        self.validate()?;
        let amps = self.amplitudes();
        let samples = (0..self.len())
            .map(|n| {
                let t = n as f64 / self.fs;
                (1..=self.partials).map(|k| amps[k - 1] * self.phase(k, t).cos()).sum()
            })
            .collect();
        Ok((SampledSignal::new(samples, self.fs)?, self.tracks(1)))
    }
}

pub fn gen_amfm(spec: &AmFmSpec) -> Result<(SampledSignal, Vec<PartialTrack>)> {
    spec.generate()
}

/// One component of a damped sum: `a e^(-d t) cos(2 pi f t + phi)`, `t` in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedComponentSpec {
    pub amplitude: f64,
    /// 1/s; positive decays.
    pub damping: f64,
    pub frequency: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DampedSumSpec {
    pub components: Vec<DampedComponentSpec>,
    pub duration: f64,
    pub fs: f64,
}

impl DampedSumSpec {
    /// Decaying harmonic series (plucked-string-like): amplitudes `1/k`,
    /// damping growing with the harmonic number.
    pub fn plucked(f0: f64, partials: usize, duration: f64, fs: f64) -> Self {
        let components = (1..=partials)
            .map(|k| DampedComponentSpec {
                amplitude: 1.0 / k as f64,
                damping: 2.0 + 1.5 * k as f64,
                frequency: k as f64 * f0,
                phase: 0.3 * k as f64,
            })
            .collect();
        Self {
            components,
            duration,
            fs,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.fs > 0.0 && self.duration > 0.0) {
            return Err(Error::Config("damped sum needs fs > 0 and duration > 0".into()));
        }
        for c in &self.components {
            if c.amplitude < 0.0 || !(0.0..self.fs / 2.0).contains(&c.frequency) {
                return Err(Error::Config(format!("invalid damped component {c:?}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        (self.duration * self.fs).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Components in per-sample pole units.
    pub fn sinusoids(&self) -> Vec<DampedSinusoid> {
        self.components
            .iter()
            .map(|c| DampedSinusoid {
                amplitude: c.amplitude,
                damping: -c.damping / self.fs,
                frequency: c.frequency,
                phase: c.phase,
            })
            .collect()
    }

    pub fn tracks(&self, step: usize) -> Vec<PartialTrack> {
        self.components
            .iter()
            .map(|c| {
                let anchors = anchor_indices(self.len(), step)
                    .map(|n| {
                        let t = n as f64 / self.fs;
                        Anchor::new(
                            t,
                            c.amplitude * (-c.damping * t).exp(),
                            c.frequency,
                            wrap_phase(TAU * c.frequency * t + c.phase),
                        )
                    })
                    .collect();
                PartialTrack::new(anchors).expect("damped anchors are valid")
            })
            .collect()
    }

    pub fn generate(&self) -> Result<(SampledSignal, Vec<DampedSinusoid>)> {
        self.validate()?;
        let samples = (0..self.len())
            .map(|n| {
                let t = n as f64 / self.fs;
                self.components
                    .iter()
                    .map(|c| c.amplitude * (-c.damping * t).exp() * (TAU * c.frequency * t + c.phase).cos())
                    .sum()
            })
            .collect();
        Ok((SampledSignal::new(samples, self.fs)?, self.sinusoids()))
    }
}

pub fn gen_damped_sum(spec: &DampedSumSpec) -> Result<(SampledSignal, Vec<DampedSinusoid>)> {
    spec.generate()
}

/// Harmonic tone with sinusoidal vibrato: partial `k` has amplitude
/// `1/k` and frequency `k f0 (1 + depth sin(2 pi rate t))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VibratoSpec {
    pub f0: f64,
    pub partials: usize,
    pub rate: f64,
    /// Relative frequency excursion.
    pub depth: f64,
    pub duration: f64,
    pub fs: f64,
}

impl Default for VibratoSpec {
    fn default() -> Self {
        Self {
            f0: 200.0,
            partials: 15,
            rate: 5.5,
            depth: 0.02,
            duration: 1.0,
            fs: 16000.0,
        }
    }
}

impl VibratoSpec {
    pub fn len(&self) -> usize {
        (self.duration * self.fs).round() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn f0_at(&self, t: f64) -> f64 {
        self.f0 * (1.0 + self.depth * (TAU * self.rate * t).sin())
    }

    fn fundamental_phase(&self, t: f64) -> f64 {
        TAU * self.f0 * t - self.f0 * self.depth / self.rate * ((TAU * self.rate * t).cos() - 1.0)
    }

    pub fn tracks(&self, step: usize) -> Vec<PartialTrack> {
        (1..=self.partials)
            .map(|k| {
                let kf = k as f64;
                let anchors = anchor_indices(self.len(), step)
                    .map(|n| {
                        let t = n as f64 / self.fs;
                        Anchor::new(
                            t,
                            1.0 / kf,
                            kf * self.f0_at(t),
                            wrap_phase(kf * self.fundamental_phase(t)),
                        )
                    })
                    .collect();
                PartialTrack::new(anchors).expect("vibrato anchors are valid")
            })
            .collect()
    }

    pub fn generate(&self) -> Result<(SampledSignal, Vec<PartialTrack>)> {
        let top = self.partials as f64 * self.f0 * (1.0 + self.depth);
        if self.partials == 0 || top >= self.fs / 2.0 {
            return Err(Error::Config(format!("vibrato partials reach {top} Hz, above Nyquist")));
        }
        let samples = (0..self.len())
            .map(|n| {
                let t = n as f64 / self.fs;
                let p = self.fundamental_phase(t);
                (1..=self.partials).map(|k| (k as f64 * p).cos() / k as f64).sum()
            })
            .collect();
        Ok((SampledSignal::new(samples, self.fs)?, self.tracks(1)))
    }
}

fn anchor_indices(len: usize, step: usize) -> impl Iterator<Item = usize> {
    let step = step.max(1);
    let last = len.saturating_sub(1);
    (0..len)
        .step_by(step)
        .chain((!last.is_multiple_of(step)).then_some(last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{srer, synthesize_tracks, PhaseMode};

    #[test]
    fn chirp_shape() {
        let spec = ChirpSpec::standard(16000.0);
        let (x, track) = spec.generate().unwrap();
        assert_eq!(x.len(), 32000);
        assert_eq!(spec.instantaneous_frequency(0.0), 100.0);
        assert!((spec.instantaneous_frequency(2.0) - 1000.0).abs() < 1e-12);
        assert_eq!(spec.envelope(1.0), 1.0);
        assert!((spec.envelope(2.0) - 2.0f64.exp()).abs() < 1e-12);
        assert_eq!(track.len(), 32000);
        let decaying = ChirpSpec {
            envelope: ChirpEnvelope::Decaying,
            ..spec.clone()
        };
        assert!((decaying.envelope(2.0) - (-2.0f64).exp()).abs() < 1e-12);
        // phase continuity at the junction
        let eps = 1e-9;
        assert!((spec.phase(1.0 - eps) - spec.phase(1.0)).abs() < 1e-5);
        assert!(ChirpSpec::standard(2000.0).generate().is_err());
    }

    #[test]
    fn amfm_defaults_and_bounds() {
        let spec = AmFmSpec::default();
        let (x, tracks) = spec.generate().unwrap();
        assert_eq!(x.len(), 16000);
        assert_eq!(tracks.len(), 10);
        for (k, a) in spec.amplitudes().iter().enumerate() {
            let k = (k + 1) as f64;
            assert!(*a >= 0.5 && *a <= 0.5 + 1.0 / k);
        }
        // peak deviation k rho fc = 3k Hz, reached at sin(2 pi fc t) = -1
        let t_peak = 0.75 / spec.fc;
        for k in 1..=10 {
            let dev = spec.frequency(k, t_peak) - k as f64 * spec.f0;
            assert!((dev - 3.0 * k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn amfm_reproducible_and_seeded() {
        let a = AmFmSpec::default().generate().unwrap().0;
        let b = AmFmSpec::default().generate().unwrap().0;
        assert_eq!(a.samples(), b.samples());
        let c = AmFmSpec {
            seed: 99,
            ..AmFmSpec::default()
        }
        .generate()
        .unwrap()
        .0;
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn amfm_without_modulation_is_harmonic() {
        let spec = AmFmSpec {
            rho: 0.0,
            ..AmFmSpec::default()
        };
        let tracks = spec.tracks(100);
        for (k, t) in tracks.iter().enumerate() {
            assert!(t.anchors().iter().all(|a| a.frequency == (k + 1) as f64 * 150.0));
        }
    }

    #[test]
    fn damped_sum_basics() {
        let fs = 8000.0;
        let one = |c: DampedComponentSpec| DampedSumSpec {
            components: vec![c],
            duration: 0.1,
            fs,
        };
        let c1 = DampedComponentSpec {
            amplitude: 1.0,
            damping: 0.0,
            frequency: 100.0,
            phase: 0.0,
        };
        let (x, _) = one(c1).generate().unwrap();
        for (n, v) in x.samples().iter().enumerate() {
            assert!((v - (TAU * 100.0 * n as f64 / fs).cos()).abs() < 1e-12);
        }
        let c2 = DampedComponentSpec {
            amplitude: 0.7,
            damping: 30.0,
            frequency: 440.0,
            phase: 1.0,
        };
        let (y, truth) = one(c2).generate().unwrap();
        for (n, v) in y.samples().iter().enumerate() {
            assert!(v.abs() <= 0.7 * (-30.0 * n as f64 / fs).exp() + 1e-15);
        }
        assert!((truth[0].damping + 30.0 / fs).abs() < 1e-15);
        let both = DampedSumSpec {
            components: vec![c1, c2],
            duration: 0.1,
            fs,
        }
        .generate()
        .unwrap()
        .0;
        for i in 0..x.len() {
            assert!((both.samples()[i] - x.samples()[i] - y.samples()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_truth_resynthesizes_exactly() {
        let (x, track) = gen_stationary_plus_chirp(16000.0).unwrap();
        let y = synthesize_tracks(&[track], x.len(), x.fs(), PhaseMode::FreqIntegration).unwrap();
        assert!(srer(&x, &y).unwrap() > 100.0);

        let (x, tracks) = gen_amfm(&AmFmSpec::default()).unwrap();
        let y = synthesize_tracks(&tracks, x.len(), x.fs(), PhaseMode::FreqIntegration).unwrap();
        assert!(srer(&x, &y).unwrap() > 100.0);

        let spec = VibratoSpec::default();
        let (x, tracks) = spec.generate().unwrap();
        let y = synthesize_tracks(&tracks, x.len(), x.fs(), PhaseMode::FreqIntegration).unwrap();
        assert!(srer(&x, &y).unwrap() > 100.0);
    }

    #[test]
    fn amfm_tracks_at_one_ms_anchors() {
        // 1 ms anchors limit the frequency spline (300 Hz modulation), yet
        // the anchor phases keep the resynthesis above 40 dB.
        let spec = AmFmSpec::default();
        let (x, _) = spec.generate().unwrap();
        let y = synthesize_tracks(&spec.tracks(16), x.len(), x.fs(), PhaseMode::FreqIntegration).unwrap();
        let db = srer(&x, &y).unwrap();
        assert!(db > 40.0, "{db}");
    }
}
