//! Command-line interface: ingest data files, run detection, emit
//! reports and plot-ready diagnostics, generate synthetic benchmarks,
//! and sweep scenario parameters.
//!
//! Exit codes: 0 success, 2 validation/usage error, 3 numerical failure.
//! The `HAVOK_DETECT_LOG` environment variable sets the log level.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;

use crate::detector::{run_pipeline, DetectionReport};
use crate::error::{Error, Result};
use crate::io::{
    read_series, write_histogram_csv, write_report, write_series_csv, write_spectrum_csv,
    write_trace_csv, ColumnSel, InputFormat, InputSpec,
};
use crate::series::{AutoOr, PipelineConfig, TimeSeries};
use crate::synth::{
    bit_error_rate, error_ratio, gen_calcium, gen_periodic_anomaly, gen_pulse_train,
    spread_windows, CalciumParams, GroundTruth, PeriodicAnomalyParams, PulseTrainParams,
};
use crate::threshold::{calibrate, CalibrationOptions};

#[derive(Parser)]
#[command(
    name = "havok-detect",
    version,
    about = "Model-free event detection for noisy univariate time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect events in a recorded series and write a JSON report.
    Detect(DetectArgs),
    /// Generate a synthetic benchmark series with ground truth.
    Synth(SynthArgs),
    /// Sweep a scenario parameter and tabulate detection metrics.
    Bench(BenchArgs),
}

#[derive(Args)]
struct DetectArgs {
    /// Input data file.
    #[arg(long)]
    input: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Value column, by header name or zero-based index.
    #[arg(long, default_value = "0")]
    column: ColumnSel,
    /// Truth-flag column (0/1 per row); used only for scoring.
    #[arg(long)]
    truth_column: Option<ColumnSel>,
    /// Sample period in seconds.
    #[arg(long)]
    ts: f64,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include the full decision traces in the report JSON.
    #[arg(long)]
    include_traces: bool,
    /// Write plot-ready CSVs (decision trace, singular spectrum,
    /// histogram with fitted curve) into this directory.
    #[arg(long)]
    dump_traces: Option<PathBuf>,
    /// Embedding memory length M.
    #[arg(long = "M", conflicts_with = "auto")]
    memory: Option<usize>,
    /// Analysis order r.
    #[arg(long = "r", conflicts_with = "auto")]
    order: Option<usize>,
    /// Sector half-width L/2, in samples.
    #[arg(long = "L", conflicts_with = "auto")]
    sector_halfwidth: Option<usize>,
    /// Resolve every parameter from the data (the default when no fixed
    /// values are given).
    #[arg(long)]
    auto: bool,
    /// Use sector medians instead of means (robust to impulsive noise).
    #[arg(long)]
    robust: bool,
    /// Threshold on |d - d0| so negative-going events are caught too.
    #[arg(long)]
    two_sided: bool,
    /// Envelope the decision signal with the analytic-signal magnitude.
    #[arg(long)]
    hilbert: bool,
    /// Pulse template file (single-column CSV); features are built from
    /// the normalized cross-correlation with it.
    #[arg(long)]
    matched_filter: Option<PathBuf>,
    /// Histogram bin count for threshold calibration.
    #[arg(long)]
    bins: Option<usize>,
    /// Seed echoed into the report (detection itself is deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable the running-median detrend stage.
    #[arg(long)]
    no_detrend: bool,
    /// Minimum spacing between reported events, in samples.
    #[arg(long)]
    min_separation: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    #[value(name = "json-lines", alias = "jsonl")]
    JsonLines,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => InputFormat::Csv,
            FormatArg::JsonLines => InputFormat::JsonLines,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Calcium,
    Ecg,
    Mud,
}

#[derive(Args)]
struct SynthArgs {
    /// Which benchmark scenario to generate.
    #[arg(value_enum)]
    scenario: Scenario,
    /// Output data CSV (value column plus a 0/1 truth column).
    #[arg(long)]
    out: PathBuf,
    /// Also write the truth summary (event indices; bits or windows) here.
    #[arg(long)]
    truth_out: Option<PathBuf>,
    /// Write the pulse template here (mud scenario).
    #[arg(long)]
    pulse_out: Option<PathBuf>,
    /// Number of samples (calcium, ecg).
    #[arg(long)]
    n: Option<usize>,
    /// Sample period in seconds.
    #[arg(long)]
    ts: Option<f64>,
    /// Spike rate in Hz (calcium).
    #[arg(long)]
    rate: Option<f64>,
    /// Noise level.
    #[arg(long)]
    noise: Option<f64>,
    /// Number of anomaly windows (ecg).
    #[arg(long)]
    windows: Option<usize>,
    /// Beat period in samples (ecg).
    #[arg(long)]
    beat_period: Option<usize>,
    /// Morphology distortion strength (ecg).
    #[arg(long)]
    morph: Option<f64>,
    /// Number of bit slots (mud).
    #[arg(long)]
    slots: Option<usize>,
    /// Samples per slot (mud).
    #[arg(long)]
    slot_len: Option<usize>,
    /// Baseline drift amplitude (mud, calcium random-walk step).
    #[arg(long)]
    drift: Option<f64>,
    /// Impulsive outlier rate (mud).
    #[arg(long)]
    impulsive: Option<f64>,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Which benchmark scenario to sweep.
    #[arg(value_enum)]
    scenario: Scenario,
    /// Sweep specification `param=v1,v2,...` (e.g. `noise=0.05,0.1,0.2`).
    /// Params: noise (all), rate (calcium), morph (ecg), drift or
    /// impulsive (mud).
    #[arg(long)]
    sweep: String,
    /// Seeds per sweep point.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Output CSV table (param, value, mean, std, metric).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse args from the process environment and run; returns the exit code.
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter("HAVOK_DETECT_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(args) => cmd_detect(&args),
        Command::Synth(args) => cmd_synth(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                3
            }
        }
    }
}

fn load_matched_filter(path: &Path) -> Result<Vec<f64>> {
    let loaded = read_series(&InputSpec {
        path: path.to_path_buf(),
        format: InputFormat::Csv,
        value_column: ColumnSel::Index(0),
        sample_period: 1.0,
        truth_column: None,
    })?;
    Ok(loaded.series.samples().to_vec())
}

fn cmd_detect(args: &DetectArgs) -> Result<()> {
    let spec = InputSpec {
        path: args.input.clone(),
        format: args.format.into(),
        value_column: args.column.clone(),
        sample_period: args.ts,
        truth_column: args.truth_column.clone(),
    };
    let loaded = read_series(&spec)?;
    info!(
        "loaded {} samples from {}",
        loaded.series.len(),
        args.input.display()
    );

    let matched_filter = args
        .matched_filter
        .as_ref()
        .map(|p| load_matched_filter(p))
        .transpose()?;

    let config = PipelineConfig {
        sector_halfwidth: args.sector_halfwidth.map_or(AutoOr::Auto, AutoOr::Fixed),
        memory: args.memory.map_or(AutoOr::Auto, AutoOr::Fixed),
        order: args.order.map_or(AutoOr::Auto, AutoOr::Fixed),
        robust_median: args.robust,
        matched_filter,
        use_hilbert: args.hilbert,
        min_event_separation: args.min_separation.map_or(AutoOr::Auto, AutoOr::Fixed),
        histogram_bins: args.bins.map_or(AutoOr::Auto, AutoOr::Fixed),
        rng_seed: args.seed,
        two_sided: args.two_sided,
        detrend: !args.no_detrend,
        ..PipelineConfig::default()
    };

    let report = run_pipeline(&loaded.series, &config)?;
    print_report_summary(&report);

    if let Some(truth_indices) = &loaded.truth_indices {
        let truth = GroundTruth {
            event_indices: truth_indices.clone(),
            ..GroundTruth::default()
        };
        let er = error_ratio(&report.events, &truth, report.sector_halfwidth);
        println!(
            "error ratio vs truth column: {er:.4} ({} true events, tolerance {} samples)",
            truth_indices.len(),
            report.sector_halfwidth
        );
    }

    if let Some(out) = &args.out {
        write_report(out, &report, args.include_traces)?;
        info!("report written to {}", out.display());
    }
    if let Some(dir) = &args.dump_traces {
        std::fs::create_dir_all(dir)?;
        write_trace_csv(&dir.join("decision_trace.csv"), &report)?;
        write_spectrum_csv(&dir.join("singular_spectrum.csv"), &report.singular_values)?;
        let cal = calibrate(
            report.trace.d.samples(),
            &CalibrationOptions {
                bins: config.histogram_bins,
                kappa: config.detachment_excess,
                run: config.detachment_run,
                method: config.threshold_method,
            },
        )?;
        write_histogram_csv(&dir.join("histogram_fit.csv"), &cal.histogram, &report.threshold)?;
        info!("diagnostics written to {}", dir.display());
    }
    Ok(())
}

fn print_report_summary(report: &DetectionReport) {
    println!(
        "M={} r={} L/2={} threshold={:.6} dominance={:.2}",
        report.memory,
        report.order,
        report.sector_halfwidth,
        report.threshold.threshold,
        report.dominance_ratio
    );
    println!("{} event(s)", report.events.len());
    for e in report.events.iter().take(20) {
        println!(
            "  peak @ {} (onset {}, end {}, value {:.4})",
            e.peak_index, e.onset_index, e.end_index, e.peak_value
        );
    }
    if report.events.len() > 20 {
        println!("  ... {} more", report.events.len() - 20);
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
}

fn write_truth_summary(path: &Path, truth: &GroundTruth) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "event_index")?;
    for i in &truth.event_indices {
        writeln!(out, "{i}")?;
    }
    if let Some(windows) = &truth.event_windows {
        writeln!(out, "window_start,window_end")?;
        for (a, b) in windows {
            writeln!(out, "{a},{b}")?;
        }
    }
    if let Some(bits) = &truth.bits {
        writeln!(out, "bits")?;
        for b in bits {
            writeln!(out, "{b}")?;
        }
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let (series, truth, label): (TimeSeries, GroundTruth, &str) = match args.scenario {
        Scenario::Calcium => {
            let mut params = CalciumParams {
                seed: args.seed,
                ..CalciumParams::default()
            };
            if let Some(n) = args.n {
                params.n_samples = n;
            }
            if let Some(ts) = args.ts {
                params.sample_period = ts;
            }
            if let Some(rate) = args.rate {
                params.rate_hz = rate;
            }
            if let Some(noise) = args.noise {
                params.noise_rms = noise;
            }
            if let Some(drift) = args.drift {
                params.baseline_step = drift;
            }
            let (series, truth) = gen_calcium(&params)?;
            (series, truth, "spikes")
        }
        Scenario::Ecg => {
            let mut params = PeriodicAnomalyParams {
                seed: args.seed,
                ..PeriodicAnomalyParams::default()
            };
            if let Some(n) = args.n {
                params.n_samples = n;
            }
            if let Some(ts) = args.ts {
                params.sample_period = ts;
            }
            if let Some(beat) = args.beat_period {
                params.beat_period = beat;
            }
            if let Some(noise) = args.noise {
                params.noise_rms = noise;
            }
            if let Some(morph) = args.morph {
                params.morph_distortion = morph;
            }
            let count = args.windows.unwrap_or(3);
            params.windows = spread_windows(params.n_samples, params.beat_period, count, 2);
            let (series, truth) = gen_periodic_anomaly(&params)?;
            (series, truth, "anomaly windows")
        }
        Scenario::Mud => {
            let mut params = PulseTrainParams {
                seed: args.seed,
                ..PulseTrainParams::default()
            };
            if let Some(slots) = args.slots {
                params.n_slots = slots;
            }
            if let Some(slot_len) = args.slot_len {
                params.slot_len = slot_len;
            }
            if let Some(ts) = args.ts {
                params.sample_period = ts;
            }
            if let Some(noise) = args.noise {
                params.noise_rms = noise;
            }
            if let Some(drift) = args.drift {
                params.drift_amplitude = drift;
            }
            if let Some(rate) = args.impulsive {
                params.impulsive_rate = rate;
            }
            if let Some(path) = &args.pulse_out {
                let pulse = TimeSeries::new(params.pulse.clone(), params.sample_period)?;
                write_series_csv(path, &pulse, None)?;
            }
            let (series, truth) = gen_pulse_train(&params)?;
            (series, truth, "pulses")
        }
    };

    write_series_csv(&args.out, &series, Some(&truth))?;
    if let Some(path) = &args.truth_out {
        write_truth_summary(path, &truth)?;
    }

    let n = series.len();
    let events = truth.event_indices.len();
    let signal_peak = series
        .samples()
        .iter()
        .fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    println!(
        "wrote {n} samples ({events} {label}, peak value {signal_peak:.3}) to {}",
        args.out.display()
    );
    Ok(())
}

struct SweepOutcome {
    value: f64,
    metric: f64,
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let (param, values) = parse_sweep(&args.sweep)?;
    if args.trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;

    let metric_name = match args.scenario {
        Scenario::Mud => "ber",
        _ => "er",
    };
    let tasks: Vec<(f64, u64)> = values
        .iter()
        .flat_map(|v| (0..args.trials as u64).map(move |s| (*v, s)))
        .collect();
    let scenario = args.scenario;
    let param_name = param.clone();
    let outcomes: Vec<Result<SweepOutcome>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(value, seed)| {
                run_trial(scenario, &param_name, value, seed)
                    .map(|metric| SweepOutcome { value, metric })
            })
            .collect()
    });

    let mut table: Vec<(f64, f64, f64)> = Vec::new();
    for &v in &values {
        let mut metrics = Vec::new();
        for outcome in &outcomes {
            match outcome {
                Ok(o) if o.value == v => metrics.push(o.metric),
                Ok(_) => {}
                Err(e) => return Err(Error::Numerical(format!("trial failed: {e}"))),
            }
        }
        let mean = metrics.iter().sum::<f64>() / metrics.len() as f64;
        let var = metrics.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>()
            / metrics.len() as f64;
        table.push((v, mean, var.sqrt()));
    }

    println!("{param},mean_{metric_name},std_{metric_name},trials");
    for (v, mean, std) in &table {
        println!("{v},{mean:.6},{std:.6},{}", args.trials);
    }
    if let Some(path) = &args.out {
        use std::io::Write;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{param},mean_{metric_name},std_{metric_name},trials")?;
        for (v, mean, std) in &table {
            writeln!(out, "{v},{mean:.6},{std:.6},{}", args.trials)?;
        }
    }
    Ok(())
}

fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>)> {
    let (param, rest) = spec.split_once('=').ok_or_else(|| {
        Error::InvalidConfig(format!("sweep '{spec}' must look like param=v1,v2,..."))
    })?;
    let values: Vec<f64> = rest
        .split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("sweep value '{v}' is not a number"))
            })
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::InvalidConfig("sweep has no values".into()));
    }
    Ok((param.to_string(), values))
}

fn run_trial(scenario: Scenario, param: &str, value: f64, seed: u64) -> Result<f64> {
    match scenario {
        Scenario::Calcium => {
            let mut params = CalciumParams {
                seed,
                ..CalciumParams::default()
            };
            match param {
                "noise" => params.noise_rms = value,
                "rate" => params.rate_hz = value,
                "drift" => params.baseline_step = value,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown calcium sweep parameter '{other}'"
                    )))
                }
            }
            let (series, truth) = gen_calcium(&params)?;
            let report = run_pipeline(&series, &PipelineConfig::default())?;
            Ok(error_ratio(&report.events, &truth, report.sector_halfwidth))
        }
        Scenario::Ecg => {
            let mut params = PeriodicAnomalyParams {
                seed,
                ..PeriodicAnomalyParams::default()
            };
            params.windows = spread_windows(params.n_samples, params.beat_period, 3, 2);
            match param {
                "noise" => params.noise_rms = value,
                "morph" => params.morph_distortion = value,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown ecg sweep parameter '{other}'"
                    )))
                }
            }
            let (series, truth) = gen_periodic_anomaly(&params)?;
            let config = PipelineConfig {
                memory: AutoOr::Fixed(80),
                order: AutoOr::Fixed(2),
                use_hilbert: true,
                min_event_separation: AutoOr::Fixed(params.beat_period),
                ..PipelineConfig::default()
            };
            let report = run_pipeline(&series, &config)?;
            Ok(error_ratio(
                &report.events,
                &truth,
                params.beat_period + params.beat_period / 2,
            ))
        }
        Scenario::Mud => {
            let mut params = PulseTrainParams {
                seed,
                ..PulseTrainParams::default()
            };
            match param {
                "noise" => params.noise_rms = value,
                "drift" => params.drift_amplitude = value,
                "impulsive" => params.impulsive_rate = value,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown mud sweep parameter '{other}'"
                    )))
                }
            }
            let (series, truth) = gen_pulse_train(&params)?;
            let config = mud_detect_config(&params);
            let report = run_pipeline(&series, &config)?;
            bit_error_rate(&report.events, &truth, params.slot_len)
        }
    }
}

/// The reference detection configuration for the pulse-train scenario:
/// matched filter, robust sector medians, memory 20, order 2, windows
/// sized to the slot structure.
pub fn mud_detect_config(params: &PulseTrainParams) -> PipelineConfig {
    PipelineConfig {
        memory: AutoOr::Fixed(20),
        order: AutoOr::Fixed(2),
        robust_median: true,
        matched_filter: Some(params.pulse.clone()),
        sector_halfwidth: AutoOr::Fixed((params.pulse.len() / 2).max(2)),
        min_event_separation: AutoOr::Fixed(params.slot_len / 2),
        detrend_window: AutoOr::Fixed(10 * params.slot_len + 1),
        ..PipelineConfig::default()
    }
}
