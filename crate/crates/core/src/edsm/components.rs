use std::f64::consts::{PI, TAU};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

/// Complex pole `z = e^(delta + i omega)` in per-sample units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole(pub Complex<f64>);

impl Pole {
    pub fn from_parts(damping: f64, omega: f64) -> Self {
        Pole(Complex::new(damping, omega).exp())
    }

    /// `delta = ln |z|` per sample; positive grows, negative decays.
    pub fn damping(&self) -> f64 {
        self.0.norm().ln()
    }

    /// `omega = arg z` in `(-pi, pi]` rad/sample.
    pub fn omega(&self) -> f64 {
        self.0.arg()
    }
}

/// One real exponentially damped sinusoid
/// `a e^(delta n) cos(2 pi f n / fs + phi)`, `n` in samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedSinusoid {
    pub amplitude: f64,
    /// per-sample damping exponent
    pub damping: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// Parameters in whole-window units, as used when a frame of length `L`
/// writes its poles as `e^((delta + i omega) / L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowUnitParams {
    pub amplitude: f64,
    pub damping: f64,
    pub omega: f64,
    pub phase: f64,
}

impl DampedSinusoid {
    pub fn value(&self, n: f64, fs: f64) -> f64 {
        self.amplitude * (self.damping * n).exp() * (TAU * self.frequency / fs * n + self.phase).cos()
    }

    /// Pole/complex-amplitude form: a conjugate pair for oscillating
    /// components, a single real pole at DC or Nyquist.
    pub fn to_poles(&self, fs: f64) -> Vec<(Pole, Complex<f64>)> {
        let omega = TAU * self.frequency / fs;
        let on_axis = self.frequency == 0.0 || (omega - PI).abs() < 1e-12;
        if on_axis {
            let z = Pole::from_parts(self.damping, omega);
            let z = Pole(Complex::new(z.0.re, 0.0));
            vec![(z, Complex::new(self.amplitude * self.phase.cos(), 0.0))]
        } else {
            let z = Pole::from_parts(self.damping, omega);
            let alpha = Complex::from_polar(self.amplitude / 2.0, self.phase);
            vec![(z, alpha), (Pole(z.0.conj()), alpha.conj())]
        }
    }

    /// Two-case amplitude convention with window-normalized damping:
    /// `alpha = a e^(-delta + i phi)` for `delta >= 0`, `a e^(i phi)` otherwise.
    pub fn window_units(&self, frame_len: usize) -> WindowUnitParams {
        let l = frame_len as f64;
        let damping = self.damping * l;
        let amplitude = if damping >= 0.0 {
            self.amplitude * damping.exp()
        } else {
            self.amplitude
        };
        WindowUnitParams {
            amplitude,
            damping,
            omega: TAU * self.frequency * l,
            phase: self.phase,
        }
    }
}

/// Relative tolerance on `|Im z|` below which a pole is treated as real.
const REAL_POLE_TOL: f64 = 1e-9;

/// Merges conjugate pole pairs into real damped sinusoids. Real poles become
/// DC (or Nyquist) components; a complex pole without a conjugate partner is
/// kept on its own with amplitude `|alpha|`.
pub fn poles_to_components(poles: &[Complex<f64>], alphas: &[Complex<f64>], fs: f64) -> Vec<DampedSinusoid> {
    assert_eq!(poles.len(), alphas.len(), "poles and amplitudes must align");
    let mut used = vec![false; poles.len()];
    let mut out = Vec::new();
    for i in 0..poles.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = poles[i];
        let alpha = alphas[i];
        let pole = Pole(z);
        if z.im.abs() <= REAL_POLE_TOL * z.norm() {
            let re = alpha.re;
            out.push(DampedSinusoid {
                amplitude: re.abs(),
                damping: pole.damping(),
                frequency: if z.re >= 0.0 { 0.0 } else { fs / 2.0 },
                phase: if re >= 0.0 { 0.0 } else { PI },
            });
            continue;
        }
        let partner = (0..poles.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (poles[a] - z.conj()).norm().total_cmp(&(poles[b] - z.conj()).norm()))
            .filter(|&j| (poles[j] - z.conj()).norm() <= 1e-6 * z.norm().max(1e-300));
        let (amplitude, upper_alpha, upper) = match partner {
            Some(j) => {
                used[j] = true;
                let (up_alpha, up) = if z.im > 0.0 { (alpha, z) } else { (alphas[j], poles[j]) };
                (alpha.norm() + alphas[j].norm(), up_alpha, up)
            }
            None if z.im > 0.0 => (alpha.norm(), alpha, z),
            None => (alpha.norm(), alpha.conj(), z.conj()),
        };
        out.push(DampedSinusoid {
            amplitude,
            damping: Pole(upper).damping(),
            frequency: Pole(upper).omega() * fs / TAU,
            phase: upper_alpha.arg(),
        });
    }
    out.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    out
}
