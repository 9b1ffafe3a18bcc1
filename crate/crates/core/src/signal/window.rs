use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Hamming,
    Hann,
    Blackman,
    Rectangular,
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(WindowKind::Hamming),
            "hann" | "hanning" => Ok(WindowKind::Hann),
            "blackman" => Ok(WindowKind::Blackman),
            "rectangular" | "rect" | "boxcar" => Ok(WindowKind::Rectangular),
            other => Err(Error::Config(format!("unknown window kind '{other}'"))),
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            WindowKind::Hamming => "hamming",
            WindowKind::Hann => "hann",
            WindowKind::Blackman => "blackman",
            WindowKind::Rectangular => "rectangular",
        };
        f.write_str(name)
    }
}

/// Sampled analysis window (symmetric, `L - 1` denominator convention).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowVector {
    kind: WindowKind,
    values: Vec<f64>,
}

impl WindowVector {
    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of the window weights (coherent gain times length).
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn make_window(kind: WindowKind, length: usize) -> Result<WindowVector> {
    if length == 0 {
        return Err(Error::usage("window length must be at least 1"));
    }
    if length == 1 {
        return Ok(WindowVector {
            kind,
            values: vec![1.0],
        });
    }
    let denom = (length - 1) as f64;
    let values = (0..length)
        .map(|n| {
            let x = 2.0 * PI * n as f64 / denom;
            let w = match kind {
                WindowKind::Rectangular => 1.0,
                WindowKind::Hamming => 0.54 - 0.46 * x.cos(),
                WindowKind::Hann => 0.5 - 0.5 * x.cos(),
                WindowKind::Blackman => 0.42 - 0.5 * x.cos() + 0.08 * (2.0 * x).cos(),
            };
            w.clamp(0.0, 1.0)
        })
        .collect::<Vec<_>>();
    // cos() is not exactly symmetric in floating point; mirror the first half.
    let mut values = values;
    for n in 0..length / 2 {
        values[length - 1 - n] = values[n];
    }
    Ok(WindowVector { kind, values })
}
