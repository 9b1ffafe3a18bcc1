use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sinemodel::eaqhm::{EaqhmConfig, WindowLength};
use sinemodel::edsm::{EdsmConfig, EdsmOrder};
use sinemodel::generators::{AmFmSpec, ChirpSpec, DampedSumSpec, VibratoSpec};
use sinemodel::harness::{
    read_wav, run_comparison, run_comparison_inputs, run_model, run_window_sweep, stand_in_inputs,
    write_comparison_csv, write_curve_csv, write_curve_json, write_json, write_wav, AnalysisParams, ComparisonConfig,
    ComparisonRow, Model, ModelConfig, ModelPartials, SweepSpec,
};
use sinemodel::pitch::{average_pitch_period, estimate_f0, F0Track};
use sinemodel::signal::{srer, PartialTrack, SampledSignal};
use sinemodel::sm::SmConfig;
use sinemodel::Error;

/// Peak level generated signals are scaled to when they would clip.
const GEN_PEAK: f64 = 0.9;

#[derive(Parser)]
#[command(name = "sinemodel", version, about = "Sinusoidal analysis/resynthesis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenSignal {
    Chirp,
    Amfm,
    Damped,
    Vibrato,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepSignal {
    Chirp,
    Amfm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Sm,
    Edsm,
    Eaqhm,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Sm => Model::Sm,
            ModelArg::Edsm => Model::Edsm,
            ModelArg::Eaqhm => Model::Eaqhm,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic test signal, optionally with its ground truth.
    Gen {
        #[arg(long, value_enum)]
        signal: GenSignal,
        /// Seed for randomized generators (AM-FM amplitudes).
        #[arg(long, env = "SINEMODEL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16000)]
        fs: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Estimate an f0 track.
    Pitch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        fmin: f64,
        #[arg(long, default_value_t = 500.0)]
        fmax: f64,
        #[arg(long, default_value_t = 1.0)]
        hop: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analyze a file with one model and resynthesize it.
    #[command(group(ArgGroup::new("win").args(["window", "window_periods"])))]
    Analyze {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long = "in")]
        input: PathBuf,
        /// f0 track (CSV: time, f0); estimated when absent and needed.
        #[arg(long)]
        f0: Option<PathBuf>,
        /// Window length in ms.
        #[arg(long)]
        window: Option<f64>,
        /// Window length in local (eaQHM) or average (SM, EDSM) pitch periods.
        #[arg(long)]
        window_periods: Option<f64>,
        /// Hop in ms (SM, eaQHM).
        #[arg(long)]
        hop: Option<f64>,
        /// Partials per frame; the full band when absent.
        #[arg(long)]
        partials: Option<usize>,
        #[arg(long)]
        max_adapt: Option<usize>,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        resynth: PathBuf,
    },
    /// Signal-to-reconstruction-error ratio between two files.
    Srer {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// SRER versus window length on a synthetic signal.
    Sweep {
        #[arg(long, value_enum)]
        signal: SweepSignal,
        #[arg(long, value_delimiter = ',', default_value = "sm,edsm,eaqhm")]
        models: Vec<ModelArg>,
        /// `start:step:end` or a comma-separated list, in multiples of T_min.
        #[arg(long, default_value = "0.5:0.5:5")]
        multiples: String,
        /// Partials per model; the signal's default when absent.
        #[arg(long)]
        partials: Option<usize>,
        #[arg(long, env = "SINEMODEL_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16000)]
        fs: u32,
        #[arg(long)]
        out: PathBuf,
        /// Also write the curve as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare all three models on a list of recordings.
    #[command(group(ArgGroup::new("inputs").args(["list", "stand_ins"]).required(true)))]
    Compare {
        /// Text file with one WAV path per line (relative to the list file).
        #[arg(long)]
        list: Option<PathBuf>,
        /// Use the built-in synthetic stand-ins instead of recordings.
        #[arg(long)]
        stand_ins: bool,
        #[arg(long)]
        out: PathBuf,
        /// Add wall-clock columns (not reproducible between runs).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) | Error::Config(_) => 2,
        e if e.is_io() => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> sinemodel::Result<()> {
    match command {
        Command::Gen {
            signal,
            seed,
            fs,
            out,
            truth,
        } => gen(signal, seed, fs as f64, &out, truth.as_deref()),
        Command::Pitch {
            input,
            fmin,
            fmax,
            hop,
            out,
        } => {
            let signal = read_wav(&input)?;
            let track = estimate_f0(&signal, fmin, fmax, hop)?;
            track.write_csv(&out)
        }
        Command::Analyze {
            model,
            input,
            f0,
            window,
            window_periods,
            hop,
            partials,
            max_adapt,
            params,
            resynth,
        } => {
            let signal = read_wav(&input)?;
            let opts = AnalyzeOptions {
                f0,
                window,
                window_periods,
                hop,
                partials,
                max_adapt,
            };
            let config = analyze_config(model.into(), &signal, &opts)?;
            let run = run_model(&signal, &config)?;
            write_json(&AnalysisParams::from_run(&run), &params)?;
            write_wav(&resynth, &run.resynthesis)?;
            println!("{} SRER: {:.2} dB", run.model, run.srer_db);
            Ok(())
        }
        Command::Srer { reference, test } => {
            let a = read_wav(&reference)?;
            let b = read_wav(&test)?;
            if a.fs() != b.fs() {
                return Err(Error::Usage(format!("sample rates differ: {} vs {}", a.fs(), b.fs())));
            }
            println!("{:.4}", srer(&a, &b)?);
            Ok(())
        }
        Command::Sweep {
            signal,
            models,
            multiples,
            partials,
            seed,
            fs,
            out,
            json,
        } => {
            let fs = fs as f64;
            let mut spec = match signal {
                SweepSignal::Chirp => SweepSpec::chirp(ChirpSpec::standard(fs)),
                SweepSignal::Amfm => SweepSpec::amfm(AmFmSpec {
                    seed,
                    fs,
                    ..AmFmSpec::default()
                }),
            };
            spec.models = models.into_iter().map(Model::from).collect();
            spec.multiples = parse_multiples(&multiples)?;
            if partials.is_some() {
                spec.partials = ModelPartials::uniform(partials);
            }
            let curve = run_window_sweep(&spec)?;
            write_curve_csv(&curve, &out)?;
            if let Some(path) = json {
                write_curve_json(&curve, path)?;
            }
            Ok(())
        }
        Command::Compare {
            list,
            out,
            timing,
            json,
            ..
        } => {
            let config = ComparisonConfig::default();
            let rows = match list {
                Some(list) => run_comparison(&read_list(&list)?, &config)?,
                None => run_comparison_inputs(&stand_in_inputs()?, &config),
            };
            write_comparison_csv(&rows, &out, timing)?;
            if let Some(path) = json {
                write_json(&rows, path)?;
            }
            print_table(&rows);
            Ok(())
        }
    }
}

fn scale_to_fit(signal: SampledSignal) -> (SampledSignal, f64) {
    let peak = signal.peak();
    if peak > GEN_PEAK {
        let gain = GEN_PEAK / peak;
        (signal.scaled(gain), gain)
    } else {
        (signal, 1.0)
    }
}

fn scale_tracks(mut tracks: Vec<PartialTrack>, gain: f64) -> Vec<PartialTrack> {
    for t in &mut tracks {
        for a in t.anchors_mut() {
            a.amplitude *= gain;
        }
    }
    tracks
}

fn gen(kind: GenSignal, seed: u64, fs: f64, out: &Path, truth: Option<&Path>) -> sinemodel::Result<()> {
    let (signal, truth_json) = match kind {
        GenSignal::Chirp => {
            let (s, track) = ChirpSpec::standard(fs).generate()?;
            let (s, g) = scale_to_fit(s);
            (
                s,
                json!({ "signal": "chirp", "fs": fs, "gain": g, "tracks": scale_tracks(vec![track], g) }),
            )
        }
        GenSignal::Amfm => {
            let spec = AmFmSpec {
                seed,
                fs,
                ..AmFmSpec::default()
            };
            let (s, tracks) = spec.generate()?;
            let (s, g) = scale_to_fit(s);
            (
                s,
                json!({ "signal": "amfm", "fs": fs, "seed": seed, "gain": g, "tracks": scale_tracks(tracks, g) }),
            )
        }
        GenSignal::Damped => {
            let (s, mut sinusoids) = DampedSumSpec::plucked(220.0, 8, 1.0, fs).generate()?;
            let (s, g) = scale_to_fit(s);
            for d in &mut sinusoids {
                d.amplitude *= g;
            }
            (
                s,
                json!({ "signal": "damped", "fs": fs, "gain": g, "sinusoids": sinusoids }),
            )
        }
        GenSignal::Vibrato => {
            let (s, tracks) = VibratoSpec {
                fs,
                ..VibratoSpec::default()
            }
            .generate()?;
            let (s, g) = scale_to_fit(s);
            (
                s,
                json!({ "signal": "vibrato", "fs": fs, "gain": g, "tracks": scale_tracks(tracks, g) }),
            )
        }
    };
    write_wav(out, &signal)?;
    if let Some(path) = truth {
        write_json(&truth_json, path)?;
    }
    Ok(())
}

struct AnalyzeOptions {
    f0: Option<PathBuf>,
    window: Option<f64>,
    window_periods: Option<f64>,
    hop: Option<f64>,
    partials: Option<usize>,
    max_adapt: Option<usize>,
}

fn load_f0(opts: &AnalyzeOptions, signal: &SampledSignal) -> sinemodel::Result<F0Track> {
    let defaults = ComparisonConfig::default();
    let track = match &opts.f0 {
        Some(path) => F0Track::read_csv(path)?,
        None => estimate_f0(signal, defaults.f0_min, defaults.f0_max, defaults.f0_hop_ms)?,
    };
    if !track.has_voiced() {
        return Err(Error::Analysis("f0 track has no voiced frame".into()));
    }
    Ok(track)
}

fn analyze_config(model: Model, signal: &SampledSignal, opts: &AnalyzeOptions) -> sinemodel::Result<ModelConfig> {
    let fs = signal.fs();
    let defaults = ComparisonConfig::default();
    for (name, v) in [
        ("window", opts.window),
        ("window-periods", opts.window_periods),
        ("hop", opts.hop),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Usage(format!("--{name} must be positive")));
            }
        }
    }
    match model {
        Model::Sm => {
            let window_ms = match (opts.window, opts.window_periods) {
                (Some(ms), _) => ms,
                (None, Some(p)) => p * average_pitch_period(&load_f0(opts, signal)?)? * 1e3,
                (None, None) => defaults.sm_window_ms,
            };
            let mut c = SmConfig::new(fs, window_ms, opts.hop.unwrap_or(defaults.sm_hop_ms));
            c.fft_size = c.fft_size.max(c.window_len.next_power_of_two());
            c.max_peaks = opts.partials.unwrap_or(defaults.sm_max_peaks);
            Ok(ModelConfig::Sm(c))
        }
        Model::Edsm => {
            if opts.hop.is_some() {
                log::warn!("EDSM frames do not overlap; --hop is ignored");
            }
            let needs_f0 = opts.window.is_none() || opts.partials.is_none();
            let f0 = if needs_f0 { Some(load_f0(opts, signal)?) } else { None };
            let window_len = match (opts.window, opts.window_periods) {
                (Some(ms), _) => ms * 1e-3 * fs,
                (None, p) => {
                    let period = average_pitch_period(f0.as_ref().expect("loaded above"))?;
                    p.unwrap_or(defaults.edsm_period_fraction) * period * fs
                }
            };
            let order = match opts.partials {
                Some(k) => EdsmOrder::Fixed(k),
                None => EdsmOrder::FullBand(f0.expect("loaded above")),
            };
            Ok(ModelConfig::Edsm(EdsmConfig {
                window_len: (window_len.round() as usize).max(2),
                order,
            }))
        }
        Model::Eaqhm => {
            let mut config = EaqhmConfig::default();
            if let Some(ms) = opts.window {
                config.window = WindowLength::Samples((ms * 1e-3 * fs).round() as usize | 1);
            }
            if let Some(p) = opts.window_periods {
                config.window = WindowLength::Periods(p);
            }
            if let Some(h) = opts.hop {
                config.hop_ms = h;
            }
            if let Some(n) = opts.max_adapt {
                config.max_adaptations = n;
            }
            Ok(ModelConfig::Eaqhm {
                config,
                f0: load_f0(opts, signal)?,
                partials: opts.partials,
            })
        }
    }
}

/// Parses `start:step:end` (inclusive) or `a,b,c`.
fn parse_multiples(text: &str) -> sinemodel::Result<Vec<f64>> {
    let bad = || Error::Usage(format!("cannot parse window multiples '{text}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if !(step > 0.0 && start > 0.0 && end >= start) {
                return Err(bad());
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| start + step * i as f64).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn read_list(list: &Path) -> sinemodel::Result<Vec<PathBuf>> {
    let text = fs::read_to_string(list).map_err(|e| Error::Io {
        path: list.into(),
        source: e,
    })?;
    let base = list.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect())
}

fn print_table(rows: &[ComparisonRow]) {
    println!("{:<20} {:>10} {:>10} {:>10}", "id", "sm", "edsm", "eaqhm");
    for row in rows {
        let cell = |m| row.srer(m).map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<20} {:>10} {:>10} {:>10}",
            row.id,
            cell(Model::Sm),
            cell(Model::Edsm),
            cell(Model::Eaqhm)
        );
    }
}
