use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eaqhm::{EaqhmConfig, WindowLength};
use crate::edsm::{EdsmConfig, EdsmOrder};
use crate::error::{Error, Result};
use crate::generators::{AmFmSpec, ChirpSpec};
use crate::pitch::{estimate_f0, F0Track};
use crate::signal::{SampledSignal, WindowKind};
use crate::sm::SmConfig;

use super::{read_wav, run_model, Model, ModelConfig};

/// f0 search range used when a WAV source needs pitch estimation.
const WAV_F0_RANGE: (f64, f64) = (60.0, 800.0);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepSource {
    Chirp(ChirpSpec),
    AmFm(AmFmSpec),
    Wav(PathBuf),
}

/// Partials sought per model; `None` covers the band up to Nyquist
/// (at most 100 peaks for SM).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelPartials {
    pub sm: Option<usize>,
    pub edsm: Option<usize>,
    pub eaqhm: Option<usize>,
}

impl ModelPartials {
    pub fn uniform(k: Option<usize>) -> Self {
        Self {
            sm: k,
            edsm: k,
            eaqhm: k,
        }
    }

    pub fn get(&self, model: Model) -> Option<usize> {
        match model {
            Model::Sm => self.sm,
            Model::Edsm => self.edsm,
            Model::Eaqhm => self.eaqhm,
        }
    }
}

/// SRER as a function of the analysis window length, expressed in
/// multiples of the signal's shortest period `T_min`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub source: SweepSource,
    pub models: Vec<Model>,
    pub multiples: Vec<f64>,
    /// Seconds.
    pub t_min: f64,
    pub hop_ms: f64,
    pub partials: ModelPartials,
}

impl SweepSpec {
    /// Stationary tone plus chirp, one partial per model.
    pub fn chirp(spec: ChirpSpec) -> Self {
        Self {
            t_min: spec.minimum_period(),
            source: SweepSource::Chirp(spec),
            models: Model::ALL.to_vec(),
            multiples: default_multiples(),
            hop_ms: 1.0,
            partials: ModelPartials::uniform(Some(1)),
        }
    }

    /// Harmonic AM-FM signal, full band for every model.
    pub fn amfm(spec: AmFmSpec) -> Self {
        Self {
            t_min: spec.minimum_period(),
            source: SweepSource::AmFm(spec),
            models: Model::ALL.to_vec(),
            multiples: default_multiples(),
            hop_ms: 1.0,
            partials: ModelPartials::uniform(None),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.multiples.is_empty() || self.multiples.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::Config("window multiples must be positive".into()));
        }
        if self.multiples.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("window multiples must be strictly ascending".into()));
        }
        if !(self.t_min.is_finite() && self.t_min > 0.0) {
            return Err(Error::Config(format!("T_min must be positive, got {}", self.t_min)));
        }
        if !(self.hop_ms.is_finite() && self.hop_ms > 0.0) {
            return Err(Error::Config("hop must be positive".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no model selected".into()));
        }
        Ok(())
    }
}

/// `0.5, 1.0, ..., 5.0`.
pub fn default_multiples() -> Vec<f64> {
    (1..=10).map(|i| 0.5 * i as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    IllConditioned,
    Failed,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Ok => "ok",
            CellStatus::IllConditioned => "ill_conditioned",
            CellStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrerRow {
    pub model: Model,
    pub multiple: f64,
    pub window_samples: usize,
    /// `None` unless the status is ok.
    pub srer_db: Option<f64>,
    pub status: CellStatus,
}

impl SrerRow {
    /// SRER with failed cells drawn at zero.
    pub fn plotted_srer(&self) -> f64 {
        self.srer_db.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrerCurve {
    pub t_min: f64,
    pub fs: f64,
    pub rows: Vec<SrerRow>,
}

impl SrerCurve {
    /// Rows of one model in ascending window order.
    pub fn model_rows(&self, model: Model) -> Vec<&SrerRow> {
        self.rows.iter().filter(|r| r.model == model).collect()
    }

    pub fn get(&self, model: Model, multiple: f64) -> Option<&SrerRow> {
        self.rows
            .iter()
            .find(|r| r.model == model && (r.multiple - multiple).abs() < 1e-9)
    }
}

struct Prepared {
    signal: SampledSignal,
    f0: F0Track,
}

fn prepare(source: &SweepSource, hop_ms: f64) -> Result<Prepared> {
    let hop = hop_ms * 1e-3;
    match source {
        SweepSource::Chirp(spec) => {
            let (signal, _) = spec.generate()?;
            let duration = signal.duration();
            let f0 = F0Track::from_fn(|t| spec.instantaneous_frequency(t), duration, hop);
            Ok(Prepared { signal, f0 })
        }
        SweepSource::AmFm(spec) => {
            let (signal, _) = spec.generate()?;
            let f0 = F0Track::constant(spec.f0, signal.duration(), hop);
            Ok(Prepared { signal, f0 })
        }
        SweepSource::Wav(path) => {
            let signal = read_wav(path)?;
            let f0 = estimate_f0(&signal, WAV_F0_RANGE.0, WAV_F0_RANGE.1, hop_ms)?;
            Ok(Prepared { signal, f0 })
        }
    }
}

fn cell_config(model: Model, window: usize, spec: &SweepSpec, input: &Prepared) -> ModelConfig {
    let fs = input.signal.fs();
    let partials = spec.partials.get(model);
    match model {
        Model::Sm => {
            let mut c = SmConfig::new(fs, spec.t_min * 1e3, spec.hop_ms).with_window(WindowKind::Hamming);
            c.window_len = window;
            c.fft_size = c.fft_size.max(window.next_power_of_two());
            if let Some(k) = partials {
                c.max_peaks = k;
            }
            ModelConfig::Sm(c)
        }
        Model::Edsm => ModelConfig::Edsm(EdsmConfig {
            window_len: window,
            order: match partials {
                Some(k) => EdsmOrder::Fixed(k),
                None => EdsmOrder::FullBand(input.f0.clone()),
            },
        }),
        Model::Eaqhm => ModelConfig::Eaqhm {
            config: EaqhmConfig {
                window: WindowLength::Samples(window),
                hop_ms: spec.hop_ms,
                f_min: Some(1.0 / spec.t_min),
                ..EaqhmConfig::default()
            },
            f0: input.f0.clone(),
            partials,
        },
    }
}

/// Window length for multiple `m`: odd and centered for the frame-centered
/// models, the nearest integer for EDSM's non-overlapping frames.
fn window_samples(model: Model, multiple: f64, t_min: f64, fs: f64) -> usize {
    let span = multiple * t_min * fs;
    match model {
        Model::Edsm => (span.round() as usize).max(2),
        Model::Sm | Model::Eaqhm => 2 * (span / 2.0).round() as usize + 1,
    }
}

/// Runs every (model, multiple) cell. Cells run in parallel; rows come back
/// in sweep order. A failing cell is recorded with its status and never
/// aborts the sweep.
pub fn run_window_sweep(spec: &SweepSpec) -> Result<SrerCurve> {
    spec.validate()?;
    let input = prepare(&spec.source, spec.hop_ms)?;
    let fs = input.signal.fs();
    let cells: Vec<(Model, f64)> = spec
        .models
        .iter()
        .flat_map(|&m| spec.multiples.iter().map(move |&k| (m, k)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(model, multiple)| {
            let window = window_samples(model, multiple, spec.t_min, fs);
            let config = cell_config(model, window, spec, &input);
            let (srer_db, status) = match run_model(&input.signal, &config) {
                Ok(run) => (Some(run.srer_db), CellStatus::Ok),
                Err(Error::IllConditioned { condition }) => {
                    log::info!("{model} at {multiple} T_min: ill-conditioned ({condition:.3e})");
                    (None, CellStatus::IllConditioned)
                }
                Err(e) => {
                    log::warn!("{model} at {multiple} T_min failed: {e}");
                    (None, CellStatus::Failed)
                }
            };
            SrerRow {
                model,
                multiple,
                window_samples: window,
                srer_db,
                status,
            }
        })
        .collect();
    Ok(SrerCurve {
        t_min: spec.t_min,
        fs,
        rows,
    })
}
