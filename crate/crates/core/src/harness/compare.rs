use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::eaqhm::EaqhmConfig;
use crate::edsm::{EdsmConfig, EdsmOrder};
use crate::error::Result;
use crate::generators::{AmFmSpec, DampedSumSpec, VibratoSpec};
use crate::pitch::{average_pitch_period, estimate_f0, F0Track};
use crate::signal::SampledSignal;
use crate::sm::SmConfig;

use super::{read_wav, run_model, Model, ModelConfig};

/// Settings for the per-file model comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonConfig {
    pub sm_window_ms: f64,
    pub sm_hop_ms: f64,
    pub sm_fft_size: usize,
    pub sm_max_peaks: usize,
    pub eaqhm: EaqhmConfig,
    /// EDSM frame length as a fraction of the average pitch period.
    pub edsm_period_fraction: f64,
    pub f0_min: f64,
    pub f0_max: f64,
    pub f0_hop_ms: f64,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        Self {
            sm_window_ms: 30.0,
            sm_hop_ms: 1.0,
            sm_fft_size: 2048,
            sm_max_peaks: 100,
            eaqhm: EaqhmConfig::default(),
            edsm_period_fraction: 0.75,
            f0_min: 60.0,
            f0_max: 500.0,
            f0_hop_ms: 1.0,
        }
    }
}

/// One signal to compare, with an optional known f0 track.
#[derive(Debug, Clone)]
pub struct ComparisonInput {
    pub id: String,
    pub signal: SampledSignal,
    pub f0: Option<F0Track>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// No usable f0 track; no model was run.
    Unanalyzable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub model: Model,
    pub srer_db: Option<f64>,
    pub parameters_per_partial: usize,
    pub parameter_count: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub id: String,
    pub status: RowStatus,
    pub scores: Vec<ModelScore>,
}

impl ComparisonRow {
    pub fn srer(&self, model: Model) -> Option<f64> {
        self.scores.iter().find(|s| s.model == model).and_then(|s| s.srer_db)
    }
}

fn model_configs(signal: &SampledSignal, f0: &F0Track, config: &ComparisonConfig) -> Result<Vec<ModelConfig>> {
    let fs = signal.fs();
    let mut sm = SmConfig::new(fs, config.sm_window_ms, config.sm_hop_ms);
    sm.fft_size = config.sm_fft_size.max(sm.window_len.next_power_of_two());
    sm.max_peaks = config.sm_max_peaks;
    let period = average_pitch_period(f0)?;
    let edsm = EdsmConfig {
        window_len: ((config.edsm_period_fraction * period * fs).round() as usize).max(2),
        order: EdsmOrder::FullBand(f0.clone()),
    };
    Ok(vec![
        ModelConfig::Sm(sm),
        ModelConfig::Edsm(edsm),
        ModelConfig::Eaqhm {
            config: config.eaqhm.clone(),
            f0: f0.clone(),
            partials: None,
        },
    ])
}

fn compare_one(input: &ComparisonInput, config: &ComparisonConfig) -> ComparisonRow {
    let f0 = match &input.f0 {
        Some(f0) => Ok(f0.clone()),
        None => estimate_f0(&input.signal, config.f0_min, config.f0_max, config.f0_hop_ms),
    };
    let configs = f0.and_then(|f0| {
        if f0.has_voiced() {
            model_configs(&input.signal, &f0, config)
        } else {
            Err(crate::error::Error::analysis("no voiced frame"))
        }
    });
    let configs = match configs {
        Ok(c) => c,
        Err(e) => {
            log::warn!("{}: no usable f0 ({e})", input.id);
            return ComparisonRow {
                id: input.id.clone(),
                status: RowStatus::Unanalyzable,
                scores: Vec::new(),
            };
        }
    };
    let scores = configs
        .iter()
        .map(|c| {
            let model = c.model();
            match run_model(&input.signal, c) {
                Ok(run) => ModelScore {
                    model,
                    srer_db: Some(run.srer_db),
                    parameters_per_partial: model.parameters_per_partial(),
                    parameter_count: run.output.parameter_count(),
                    seconds: run.seconds,
                    error: None,
                },
                Err(e) => ModelScore {
                    model,
                    srer_db: None,
                    parameters_per_partial: model.parameters_per_partial(),
                    parameter_count: 0,
                    seconds: 0.0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    ComparisonRow {
        id: input.id.clone(),
        status: RowStatus::Ok,
        scores,
    }
}

/// Runs SM, EDSM and eaQHM on every input; rows follow input order. Models
/// run one after another so the recorded wall times do not compete.
pub fn run_comparison_inputs(inputs: &[ComparisonInput], config: &ComparisonConfig) -> Vec<ComparisonRow> {
    inputs.iter().map(|i| compare_one(i, config)).collect()
}

/// Synthetic quasi-harmonic signals used when no recordings are at hand: a
/// harmonic tone with vibrato, the default AM-FM signal and a plucked damped
/// sum. f0 is left to the estimator, as for WAV input.
pub fn stand_in_inputs() -> Result<Vec<ComparisonInput>> {
    let (vibrato, _) = VibratoSpec::default().generate()?;
    let (amfm, _) = AmFmSpec::default().generate()?;
    let (damped, _) = DampedSumSpec::plucked(220.0, 8, 1.0, 16000.0).generate()?;
    Ok([("vibrato", vibrato), ("amfm", amfm), ("damped", damped)]
        .into_iter()
        .map(|(id, signal)| ComparisonInput {
            id: id.into(),
            signal,
            f0: None,
        })
        .collect())
}

/// [`run_comparison_inputs`] over WAV files, f0 estimated per file. The row
/// id is the file stem.
pub fn run_comparison(files: &[PathBuf], config: &ComparisonConfig) -> Result<Vec<ComparisonRow>> {
    let inputs = files
        .iter()
        .map(|path| {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok(ComparisonInput {
                id,
                signal: read_wav(path)?,
                f0: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(run_comparison_inputs(&inputs, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_list_gives_empty_table() {
        assert!(run_comparison(&[], &ComparisonConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn silence_is_unanalyzable() {
        let input = ComparisonInput {
            id: "quiet".into(),
            signal: SampledSignal::zeros(8000, 16000.0).unwrap(),
            f0: None,
        };
        let rows = run_comparison_inputs(&[input], &ComparisonConfig::default());
        assert_eq!(rows[0].status, RowStatus::Unanalyzable);
        assert!(rows[0].scores.is_empty());
    }

    #[test]
    fn parameter_counts_differ_by_one() {
        for m in Model::ALL {
            let expected = if m == Model::Edsm { 4 } else { 3 };
            assert_eq!(m.parameters_per_partial(), expected);
        }
        assert_eq!(
            Model::Edsm.parameters_per_partial(),
            Model::Sm.parameters_per_partial() + 1
        );
        assert_eq!(
            Model::Edsm.parameters_per_partial(),
            Model::Eaqhm.parameters_per_partial() + 1
        );
    }
}
