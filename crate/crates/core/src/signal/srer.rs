use crate::error::{Error, Result};

use super::SampledSignal;

/// Value reported when the reconstruction error is exactly zero.
pub const SRER_CEILING_DB: f64 = 300.0;

/// Population standard deviation (mean removed, divided by N).
pub fn population_std(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Signal-to-reconstruction-error ratio in dB:
/// `20 log10(std(x) / std(x - s))`.
pub fn srer(original: &SampledSignal, reconstructed: &SampledSignal) -> Result<f64> {
    if original.fs() != reconstructed.fs() {
        return Err(Error::usage(format!(
            "sample rates differ: {} vs {}",
            original.fs(),
            reconstructed.fs()
        )));
    }
    srer_slices(original.samples(), reconstructed.samples())
}

pub fn srer_slices(original: &[f64], reconstructed: &[f64]) -> Result<f64> {
    if original.len() != reconstructed.len() {
        return Err(Error::usage(format!(
            "length mismatch: {} vs {}",
            original.len(),
            reconstructed.len()
        )));
    }
    let signal_std = population_std(original);
    if signal_std == 0.0 {
        return Err(Error::usage("SRER undefined for a constant original signal"));
    }
    let error: Vec<f64> = original.iter().zip(reconstructed).map(|(x, s)| x - s).collect();
    let error_std = population_std(&error);
    if error_std == 0.0 {
        return Ok(SRER_CEILING_DB);
    }
    Ok(20.0 * (signal_std / error_std).log10())
}
