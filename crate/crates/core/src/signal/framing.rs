use std::ops::Range;

use crate::error::{Error, Result};

/// Frame centers with per-frame half support `T`; frame `i` covers
/// `[center - T, center + T]`, clipped to the signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGrid {
    centers: Vec<usize>,
    half_lengths: Vec<usize>,
    hop: usize,
}

impl FrameGrid {
    pub fn new(centers: Vec<usize>, half_lengths: Vec<usize>, hop: usize) -> Result<Self> {
        if hop == 0 {
            return Err(Error::usage("hop must be at least one sample"));
        }
        if centers.len() != half_lengths.len() {
            return Err(Error::usage("centers and half lengths differ in count"));
        }
        if centers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("frame centers must be strictly increasing"));
        }
        Ok(Self {
            centers,
            half_lengths,
            hop,
        })
    }

    /// Centers every `hop` samples from 0, with the last sample always
    /// included so the grid spans the whole signal.
    pub fn uniform(signal_len: usize, hop: usize, half_length: usize) -> Result<Self> {
        let centers = uniform_centers(signal_len, hop)?;
        let half_lengths = vec![half_length; centers.len()];
        Self::new(centers, half_lengths, hop)
    }

    /// Same centers as [`FrameGrid::uniform`] with a half length per center.
    pub fn adaptive(signal_len: usize, hop: usize, half_length_at: impl Fn(usize) -> usize) -> Result<Self> {
        let centers = uniform_centers(signal_len, hop)?;
        let half_lengths = centers.iter().map(|&c| half_length_at(c)).collect();
        Self::new(centers, half_lengths, hop)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn half_lengths(&self) -> &[usize] {
        &self.half_lengths
    }

    /// Sample range of frame `i` clipped to `[0, signal_len)`.
    pub fn clipped(&self, i: usize, signal_len: usize) -> Range<usize> {
        let c = self.centers[i];
        let t = self.half_lengths[i];
        let start = c.saturating_sub(t);
        let end = (c + t + 1).min(signal_len);
        start..end
    }

    /// Full `2T + 1` support of frame `i`, zero outside the signal.
    pub fn padded(&self, i: usize, samples: &[f64]) -> Vec<f64> {
        let c = self.centers[i] as isize;
        let t = self.half_lengths[i] as isize;
        (c - t..=c + t)
            .map(|n| {
                if n < 0 || n as usize >= samples.len() {
                    0.0
                } else {
                    samples[n as usize]
                }
            })
            .collect()
    }
}

fn uniform_centers(signal_len: usize, hop: usize) -> Result<Vec<usize>> {
    if hop == 0 {
        return Err(Error::usage("hop must be at least one sample"));
    }
    if signal_len == 0 {
        return Err(Error::usage("cannot frame an empty signal"));
    }
    let mut centers: Vec<usize> = (0..signal_len).step_by(hop).collect();
    if *centers.last().unwrap() != signal_len - 1 {
        centers.push(signal_len - 1);
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_spans_signal() {
        let g = FrameGrid::uniform(50, 16, 8).unwrap();
        assert_eq!(g.centers(), &[0, 16, 32, 48, 49]);
        assert_eq!(g.clipped(0, 50), 0..9);
        assert_eq!(g.clipped(4, 50), 41..50);
        let x: Vec<f64> = (0..50).map(|n| n as f64).collect();
        let f = g.padded(0, &x);
        assert_eq!(f.len(), 17);
        assert_eq!(&f[..8], &[0.0; 8]);
        assert_eq!(f[8], 0.0);
        assert_eq!(f[9], 1.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(FrameGrid::uniform(10, 0, 2).is_err());
        assert!(FrameGrid::new(vec![3, 3], vec![1, 1], 1).is_err());
    }
}
