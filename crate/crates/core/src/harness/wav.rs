use std::path::Path;

use hound::{SampleFormat, WavSpec};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

const PCM16_SCALE: f64 = 32768.0;

fn wav_error(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) => Error::io(path, e),
        other => Error::Wav {
            path: path.to_path_buf(),
            source: other,
        },
    }
}

/// Reads a mono WAV file: 16-bit PCM is mapped to `[-1, 1)` by dividing by
/// 32768, 32-bit float is taken as is.
pub fn read_wav(path: impl AsRef<Path>) -> Result<SampledSignal> {
    let path = path.as_ref();
    let mut reader = hound::WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: format!("{} channels; only mono is supported", spec.channels),
        });
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / PCM16_SCALE))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        (format, bits) => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                reason: format!("{bits}-bit {format:?} samples; expected 16-bit PCM or 32-bit float"),
            })
        }
    };
    if samples.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: "no samples".into(),
        });
    }
    SampledSignal::new(samples, spec.sample_rate as f64)
}

/// Writes 16-bit mono PCM. Samples are scaled by 32768, rounded to the
/// nearest integer and clipped to the 16-bit range, so any input in
/// `[-1, 1 - 1/32768]` reads back within half a quantization step.
pub fn write_wav(path: impl AsRef<Path>, signal: &SampledSignal) -> Result<()> {
    let path = path.as_ref();
    let fs = signal.fs();
    if fs.fract() != 0.0 || fs > u32::MAX as f64 {
        return Err(Error::usage(format!("WAV needs an integer sample rate, got {fs}")));
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: fs as u32,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &s in signal.samples() {
        let q = (s * PCM16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        writer.write_sample(q).map_err(|e| wav_error(path, e))?;
    }
    writer.finalize().map_err(|e| wav_error(path, e))
}
