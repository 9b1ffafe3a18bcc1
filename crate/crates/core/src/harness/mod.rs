//! Experiment plumbing: audio I/O, window-size sweeps, multi-model
//! comparisons and CSV/JSON export.

mod compare;
mod export;
mod sweep;
mod wav;

pub use compare::{
    run_comparison, run_comparison_inputs, stand_in_inputs, ComparisonConfig, ComparisonInput, ComparisonRow,
    ModelScore, RowStatus,
};
pub use export::{
    read_tracks_json, sig6, write_comparison_csv, write_curve_csv, write_curve_json, write_json, write_tracks_json,
    AnalysisParams,
};
pub use sweep::{run_window_sweep, CellStatus, ModelPartials, SrerCurve, SrerRow, SweepSource, SweepSpec};
pub use wav::{read_wav, write_wav};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::eaqhm::{eaqhm_analyze, eaqhm_synthesize, EaqhmConfig, EaqhmResult};
use crate::edsm::{edsm_analyze, edsm_synthesize, EdsmConfig, EdsmFrame};
use crate::error::{Error, Result};
use crate::pitch::F0Track;
use crate::signal::{srer, PartialTrack, SampledSignal};
use crate::sm::{sm_analyze, sm_synthesize, SmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sm,
    Edsm,
    Eaqhm,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Sm, Model::Edsm, Model::Eaqhm];

    /// Synthesis parameters stored per partial and frame: amplitude,
    /// frequency and phase, plus damping for EDSM.
    pub fn parameters_per_partial(self) -> usize {
        match self {
            Model::Sm | Model::Eaqhm => 3,
            Model::Edsm => 4,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Sm => "sm",
            Model::Edsm => "edsm",
            Model::Eaqhm => "eaqhm",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sm" => Ok(Model::Sm),
            "edsm" => Ok(Model::Edsm),
            "eaqhm" => Ok(Model::Eaqhm),
            other => Err(Error::Config(format!(
                "unknown model '{other}' (expected sm, edsm or eaqhm)"
            ))),
        }
    }
}

/// Per-model analysis settings for one run.
#[derive(Debug, Clone)]
pub enum ModelConfig {
    Sm(SmConfig),
    Edsm(EdsmConfig),
    /// eaQHM needs an f0 track; `partials` of `None` covers the full band.
    Eaqhm {
        config: EaqhmConfig,
        f0: F0Track,
        partials: Option<usize>,
    },
}

impl ModelConfig {
    pub fn model(&self) -> Model {
        match self {
            ModelConfig::Sm(_) => Model::Sm,
            ModelConfig::Edsm(_) => Model::Edsm,
            ModelConfig::Eaqhm { .. } => Model::Eaqhm,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ModelOutput {
    Tracks(Vec<PartialTrack>),
    Edsm(Vec<EdsmFrame>),
    Eaqhm(EaqhmResult),
}

impl ModelOutput {
    /// Total stored synthesis parameters.
    pub fn parameter_count(&self) -> usize {
        match self {
            ModelOutput::Tracks(t) => 3 * t.iter().map(PartialTrack::len).sum::<usize>(),
            ModelOutput::Eaqhm(r) => 3 * r.tracks.iter().map(PartialTrack::len).sum::<usize>(),
            ModelOutput::Edsm(frames) => 4 * frames.iter().map(|f| f.components.len()).sum::<usize>(),
        }
    }
}

/// Analysis, resynthesis and score of one model on one signal.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub model: Model,
    pub output: ModelOutput,
    pub resynthesis: SampledSignal,
    pub srer_db: f64,
    /// Wall time of analysis plus synthesis.
    pub seconds: f64,
}

pub fn run_model(signal: &SampledSignal, config: &ModelConfig) -> Result<ModelRun> {
    let start = Instant::now();
    let (len, fs) = (signal.len(), signal.fs());
    let (output, resynthesis) = match config {
        ModelConfig::Sm(c) => {
            let tracks = sm_analyze(signal, c)?;
            let y = sm_synthesize(&tracks, len, fs)?;
            (ModelOutput::Tracks(tracks), y)
        }
        ModelConfig::Edsm(c) => {
            let frames = edsm_analyze(signal, c)?;
            let y = edsm_synthesize(&frames, len, fs)?;
            (ModelOutput::Edsm(frames), y)
        }
        ModelConfig::Eaqhm { config, f0, partials } => {
            let res = eaqhm_analyze(signal, f0, *partials, config)?;
            let y = eaqhm_synthesize(&res.tracks, len, fs)?;
            (ModelOutput::Eaqhm(res), y)
        }
    };
    let srer_db = srer(signal, &resynthesis)?;
    Ok(ModelRun {
        model: config.model(),
        output,
        resynthesis,
        srer_db,
        seconds: start.elapsed().as_secs_f64(),
    })
}
