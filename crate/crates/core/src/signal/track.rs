use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One measured point of a partial: time (s), linear amplitude,
/// frequency (Hz) and phase (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub time: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Anchor {
    pub fn new(time: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Self {
            time,
            amplitude,
            frequency,
            phase,
        }
    }
}

/// Instantaneous amplitude/frequency/phase trajectory of one sinusoid,
/// sampled at strictly increasing anchor times. The track is live between
/// its first and last anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrack")]
pub struct PartialTrack {
    anchors: Vec<Anchor>,
}

#[derive(Deserialize)]
struct RawTrack {
    anchors: Vec<Anchor>,
}

impl TryFrom<RawTrack> for PartialTrack {
    type Error = Error;

    fn try_from(raw: RawTrack) -> Result<Self> {
        PartialTrack::new(raw.anchors)
    }
}

impl PartialTrack {
    pub fn new(anchors: Vec<Anchor>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::usage("a partial track needs at least one anchor"));
        }
        for a in &anchors {
            check_anchor(a)?;
        }
        if anchors.windows(2).any(|w| w[0].time >= w[1].time) {
            return Err(Error::usage("anchor times must be strictly increasing"));
        }
        Ok(Self { anchors })
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn anchors_mut(&mut self) -> &mut [Anchor] {
        &mut self.anchors
    }

    pub fn into_anchors(self) -> Vec<Anchor> {
        self.anchors
    }

    pub fn birth(&self) -> f64 {
        self.anchors[0].time
    }

    pub fn death(&self) -> f64 {
        self.anchors[self.anchors.len() - 1].time
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn push(&mut self, anchor: Anchor) -> Result<()> {
        check_anchor(&anchor)?;
        if anchor.time <= self.death() {
            return Err(Error::usage("anchor times must be strictly increasing"));
        }
        self.anchors.push(anchor);
        Ok(())
    }

    /// Checks that every frequency lies in `[0, fs/2]`.
    pub fn validate(&self, fs: f64) -> Result<()> {
        match self.anchors.iter().find(|a| a.frequency > fs / 2.0 + 1e-9) {
            Some(a) => Err(Error::usage(format!(
                "anchor frequency {} Hz above Nyquist {} Hz",
                a.frequency,
                fs / 2.0
            ))),
            None => Ok(()),
        }
    }
}

fn check_anchor(a: &Anchor) -> Result<()> {
    if !(a.time.is_finite() && a.amplitude.is_finite() && a.frequency.is_finite() && a.phase.is_finite()) {
        return Err(Error::usage("anchor values must be finite"));
    }
    if a.amplitude < 0.0 {
        return Err(Error::usage("anchor amplitude must be non-negative"));
    }
    if a.frequency < 0.0 {
        return Err(Error::usage("anchor frequency must be non-negative"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PartialTrack::new(vec![]).is_err());
        let a = Anchor::new(0.0, 1.0, 100.0, 0.0);
        let b = Anchor::new(0.0, 1.0, 100.0, 0.0);
        assert!(PartialTrack::new(vec![a, b]).is_err());
        assert!(PartialTrack::new(vec![Anchor::new(0.0, -1.0, 100.0, 0.0)]).is_err());
        let mut t = PartialTrack::new(vec![a]).unwrap();
        assert!(t.push(Anchor::new(0.1, 0.5, 120.0, 1.0)).is_ok());
        assert!(t.push(Anchor::new(0.05, 0.5, 120.0, 1.0)).is_err());
        assert_eq!(t.birth(), 0.0);
        assert_eq!(t.death(), 0.1);
        assert!(t.validate(200.0).is_err());
        assert!(t.validate(16000.0).is_ok());
    }

    #[test]
    fn json_rejects_invalid_track() {
        let bad = r#"{"anchors":[{"time":1.0,"amplitude":1.0,"frequency":1.0,"phase":0.0},
                                 {"time":0.5,"amplitude":1.0,"frequency":1.0,"phase":0.0}]}"#;
        assert!(serde_json::from_str::<PartialTrack>(bad).is_err());
    }
}
