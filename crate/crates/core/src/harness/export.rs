use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::edsm::EdsmFrameReport;
use crate::error::{Error, Result};
use crate::signal::PartialTrack;

use super::{ComparisonRow, Model, ModelOutput, ModelRun, SrerCurve};

/// Formats `v` with six significant digits in plain decimal notation.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// One row per (model, multiple); non-ok cells are written with SRER 0.
pub fn write_curve_csv(curve: &SrerCurve, path: impl AsRef<Path>) -> Result<()> {
    if curve.rows.is_empty() {
        return Err(Error::usage("refusing to write an empty SRER curve"));
    }
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["model", "multiple", "window_ms", "window_samples", "srer_db", "status"])?;
    for r in &curve.rows {
        w.write_record([
            r.model.to_string(),
            sig6(r.multiple),
            sig6(r.window_samples as f64 / curve.fs * 1e3),
            r.window_samples.to_string(),
            sig6(r.plotted_srer()),
            r.status.as_str().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_curve_json(curve: &SrerCurve, path: impl AsRef<Path>) -> Result<()> {
    write_json(curve, path)
}

/// Comparison table; empty cells mark models that produced no SRER. Wall
/// times vary between runs and are only written when `timing` is set.
pub fn write_comparison_csv(rows: &[ComparisonRow], path: impl AsRef<Path>, timing: bool) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    let mut header = vec!["id".to_string(), "status".to_string()];
    for m in Model::ALL {
        header.push(format!("{m}_srer_db"));
        header.push(format!("{m}_params_per_partial"));
        header.push(format!("{m}_params"));
        if timing {
            header.push(format!("{m}_seconds"));
        }
    }
    w.write_record(&header)?;
    for row in rows {
        let status = match row.status {
            super::RowStatus::Ok => "ok",
            super::RowStatus::Unanalyzable => "unanalyzable",
        };
        let mut rec = vec![row.id.clone(), status.to_string()];
        for m in Model::ALL {
            let score = row.scores.iter().find(|s| s.model == m);
            rec.push(score.and_then(|s| s.srer_db).map(sig6).unwrap_or_default());
            rec.push(m.parameters_per_partial().to_string());
            rec.push(score.map(|s| s.parameter_count.to_string()).unwrap_or_default());
            if timing {
                rec.push(score.map(|s| sig6(s.seconds)).unwrap_or_default());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Pretty-printed JSON.
pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

pub fn write_tracks_json(tracks: &[PartialTrack], path: impl AsRef<Path>) -> Result<()> {
    write_json(tracks, path)
}

pub fn read_tracks_json(path: impl AsRef<Path>) -> Result<Vec<PartialTrack>> {
    read_json(path.as_ref())
}

/// Parameter file written by `analyze`, tagged by model.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum AnalysisParams {
    Sm {
        fs: f64,
        length: usize,
        srer_db: f64,
        tracks: Vec<PartialTrack>,
    },
    Edsm {
        fs: f64,
        length: usize,
        srer_db: f64,
        frames: Vec<EdsmFrameReport>,
    },
    Eaqhm {
        fs: f64,
        length: usize,
        srer_db: f64,
        history: Vec<f64>,
        adaptations: usize,
        tracks: Vec<PartialTrack>,
    },
}

impl AnalysisParams {
    pub fn from_run(run: &ModelRun) -> Self {
        let fs = run.resynthesis.fs();
        let length = run.resynthesis.len();
        let srer_db = run.srer_db;
        match &run.output {
            ModelOutput::Tracks(tracks) => AnalysisParams::Sm {
                fs,
                length,
                srer_db,
                tracks: tracks.clone(),
            },
            ModelOutput::Edsm(frames) => AnalysisParams::Edsm {
                fs,
                length,
                srer_db,
                frames: frames.iter().map(EdsmFrameReport::from).collect(),
            },
            ModelOutput::Eaqhm(res) => AnalysisParams::Eaqhm {
                fs,
                length,
                srer_db,
                history: res.history.clone(),
                adaptations: res.adaptations,
                tracks: res.tracks.clone(),
            },
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }
}
