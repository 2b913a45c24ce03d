//! Command-line front end. Exit codes: 0 ok, 2 usage, 3 I/O, 4 format,
//! 5 numeric.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dccrn::framing::{make_synthesis_window, FrameConfig, SynthesisMode, WindowKind};
use dccrn::io::{load_weights, read_wav, save_weights, write_wav, AudioBuffer};
use dccrn::metrics::{LossConfig, MetricReport, Reduction};
use dccrn::model::{
    count_parameters, enhance_offline, identity_mask_weights, random_weights, InitOptions, Model,
    ModelConfig, Variant,
};
use dccrn::streaming::{latency_comparison, latency_probe, StreamEngine, StreamMode};
use dccrn::{Error, Result, Summation};

#[derive(Parser)]
#[command(name = "dccrn", version, about = "Streaming DCCRN speech enhancement")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SumArg {
    Partial,
    Full,
}

impl From<SumArg> for Summation {
    fn from(s: SumArg) -> Self {
        match s {
            SumArg::Partial => Summation::Partial,
            SumArg::Full => Summation::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Baseline,
    Proposed,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Hann,
    Rectangular,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enhance a WAV file offline.
    Enhance {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the summation of an overlapped-prediction model.
        #[arg(long, value_enum)]
        summation: Option<SumArg>,
    },
    /// Process a WAV file in chunks and report latency and real-time factor.
    Stream {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u64).range(1..))]
        chunk: u64,
        /// Allow non-causal models by simulating their look-ahead.
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter counts of every variant of an architecture.
    Params {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Algorithmic latency of an architecture.
    Latency {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// SI-SDR, improvement and loss values as JSON.
    Metrics {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        noisy: PathBuf,
        #[arg(long)]
        enhanced: PathBuf,
        #[arg(long, value_parser = parse_gamma)]
        gamma: Option<f64>,
        /// Sum the magnitude L1 term instead of averaging per bin.
        #[arg(long)]
        sum_l1: bool,
    },
    /// Dump a synthesis window as CSV.
    Windows {
        /// Model or frame configuration JSON; defaults to 512/128 Hann.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: SumArg,
        #[arg(long)]
        dump: PathBuf,
        /// Override the analysis window.
        #[arg(long, value_enum)]
        window: Option<WindowArg>,
    },
    /// Write a weight file with seeded random or identity-mask weights.
    Init {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "proposed")]
        preset: Preset,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mask-head weights that pass the input through unchanged.
        #[arg(long)]
        identity: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_gamma(s: &str) -> std::result::Result<f64, String> {
    let g: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&g) {
        Ok(g)
    } else {
        Err(format!("{g} is outside [0, 1]"))
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn model_config(path: Option<&Path>, preset: Preset) -> Result<ModelConfig> {
    match path {
        Some(p) => ModelConfig::from_json(&read_text(p)?),
        None => Ok(ModelConfig::adopted(match preset {
            Preset::Baseline => Variant::BASELINE,
            Preset::Proposed => Variant::PROPOSED,
        })),
    }
}

fn frame_config(path: Option<&Path>) -> Result<FrameConfig> {
    let Some(p) = path else {
        return Ok(FrameConfig::default());
    };
    let text = read_text(p)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let frame = if value.get("frame").is_some() {
        ModelConfig::from_json(&text)?.frame
    } else {
        serde_json::from_value::<FrameConfig>(value)?
    };
    frame.validate()?;
    Ok(frame)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Enhance {
            weights,
            input,
            out,
            summation,
        } => {
            let (mut cfg, store) = load_weights(&weights)?;
            if let Some(s) = summation {
                cfg.summation = s.into();
            }
            let model = Model::from_weights(&cfg, &store)?;
            let audio = read_wav(&input)?;
            let y = enhance_offline(&model, &audio.samples)?;
            write_wav(&out, &AudioBuffer::new(y, audio.sample_rate, audio.format))?;
            eprintln!(
                "enhanced {} samples ({}, {} parameters)",
                audio.samples.len(),
                cfg.variant().label(),
                model.parameter_count()
            );
        }
        Cmd::Stream {
            weights,
            input,
            chunk,
            simulate,
            out,
        } => {
            let chunk = chunk as usize;
            let (cfg, store) = load_weights(&weights)?;
            let model = Model::from_weights(&cfg, &store)?;
            let audio = read_wav(&input)?;
            let mode = if simulate {
                StreamMode::OfflineSimulation
            } else {
                StreamMode::RealTime
            };
            let mut engine = StreamEngine::new(&model, mode)?;
            let mut y = Vec::with_capacity(audio.samples.len());
            let mut first_output_at = None;
            let mut fed = 0;
            for c in audio.samples.chunks(chunk) {
                let o = engine.push(c)?;
                fed += c.len();
                if first_output_at.is_none() && !o.is_empty() {
                    first_output_at = Some(fed);
                }
                y.extend(o);
            }
            y.extend(engine.flush()?);
            let stats = engine.stats();
            let latency = latency_probe(&cfg);
            let report = serde_json::json!({
                "schema": "dccrn.stream.v1",
                "variant": cfg.variant().label(),
                "mode": if simulate { "offline_simulation" } else { "real_time" },
                "chunk": chunk,
                "samples_in": stats.samples_in,
                "samples_out": y.len(),
                "frames": stats.frames,
                "first_output_after_samples": first_output_at,
                "algorithmic_latency_samples": engine.latency_samples(),
                "algorithmic_latency_ms": latency.algorithmic_latency_ms,
                "lookahead_subframes": latency.lookahead_subframes,
                "warm_up_samples": engine.warm_up().end,
                "tail": engine.tail().map(|r| [r.start, r.end]),
                "busy_seconds": stats.busy.as_secs_f64(),
                "real_time_factor": stats.real_time_factor(),
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            if let Some(p) = out {
                write_wav(&p, &AudioBuffer::new(y, audio.sample_rate, audio.format))?;
            }
        }
        Cmd::Params { config } => {
            let base = model_config(config.as_deref(), Preset::Proposed)?;
            let reference = count_parameters(&base.with_variant(Variant::BASELINE)?);
            println!("{:<42} {:>12} {:>9} {:>10}", "variant", "parameters", "millions", "vs mask NC");
            for v in Variant::table(base.summation) {
                let n = count_parameters(&base.with_variant(v)?);
                println!(
                    "{:<42} {:>12} {:>9.3} {:>+9.1}%",
                    v.label(),
                    n,
                    n as f64 / 1e6,
                    (n as f64 / reference as f64 - 1.0) * 100.0
                );
            }
        }
        Cmd::Latency { config } => {
            let cfg = model_config(config.as_deref(), Preset::Proposed)?;
            let report = serde_json::json!({
                "schema": "dccrn.latency.v1",
                "config": latency_probe(&cfg),
                "comparison": latency_comparison(&cfg)?,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Cmd::Metrics {
            clean,
            noisy,
            enhanced,
            gamma,
            sum_l1,
        } => {
            let (c, n, e) = (read_wav(&clean)?, read_wav(&noisy)?, read_wav(&enhanced)?);
            let mut loss = LossConfig::default();
            if let Some(g) = gamma {
                loss.gamma = g;
            }
            if sum_l1 {
                loss.reduction = Reduction::Sum;
            }
            let report = MetricReport::compute(&c.samples, &n.samples, &e.samples, &loss)?;
            println!("{}", report.to_json());
        }
        Cmd::Windows {
            config,
            mode,
            dump,
            window,
        } => {
            let mut frame = frame_config(config.as_deref())?;
            match window {
                Some(WindowArg::Hann) => frame.window = WindowKind::Hann,
                Some(WindowArg::Rectangular) => frame.window = WindowKind::Rectangular,
                None => {}
            }
            let mode = match mode {
                SumArg::Partial => SynthesisMode::PartialSum,
                SumArg::Full => SynthesisMode::FullSum,
            };
            let l = make_synthesis_window(&frame, mode)?;
            let g = frame.analysis_window();
            let mut csv = String::from("n,analysis,synthesis\n");
            for (n, (a, s)) in g.iter().zip(&l.taps).enumerate() {
                csv.push_str(&format!("{n},{a:.17e},{s:.17e}\n"));
            }
            write_out(&dump, &csv)?;
        }
        Cmd::Init {
            config,
            preset,
            seed,
            identity,
            out,
        } => {
            let cfg = model_config(config.as_deref(), preset)?;
            let store = if identity {
                identity_mask_weights(&cfg)?
            } else {
                random_weights(&cfg, InitOptions::seeded(seed))
            };
            save_weights(&out, &cfg, &store)?;
            eprintln!(
                "wrote {} ({}, {} tensors, {} parameters)",
                out.display(),
                cfg.variant().label(),
                store.len(),
                count_parameters(&cfg)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
