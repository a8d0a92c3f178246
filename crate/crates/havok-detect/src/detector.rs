//! End-to-end pipeline orchestration: automatic parameter selection,
//! event extraction from the thresholded decision signal, and report
//! assembly.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{self, DecisionTrace, LinearModel};
use crate::embedding::{self, ModeDecomposition};
use crate::error::{Error, Result};
use crate::features::{self, FeatureOptions};
use crate::series::{
    validate, AutoOr, FeatureBank, PipelineConfig, TimeSeries,
};
use crate::threshold::{self, CalibrationOptions, ThresholdModel};

/// Memory lengths tried by the automatic grid search.
pub const DEFAULT_MEMORY_GRID: [usize; 7] = [2, 4, 8, 16, 20, 40, 80];
/// Analysis orders tried by the automatic grid search.
///
/// The default pins r = 2: a higher order lets the state absorb
/// oscillatory mode pairs, which always improves the reconstruction MSE
/// but replaces the physically meaningful second mode in the decision
/// signal with a noisier one and degrades detection. Callers who want
/// the order searched can pass a wider grid to [`select_order`].
pub const DEFAULT_ORDER_GRID: [usize; 1] = [2];

/// A detected event: a maximal threshold-crossing run of the decision
/// signal, indexed in the coordinates of the original series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub onset_index: usize,
    pub peak_index: usize,
    pub end_index: usize,
    /// Decision-signal value at the peak.
    pub peak_value: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// Single-sample crossing.
    Point,
    /// Multi-sample run.
    Interval,
}

/// Everything the pipeline learned about one series.
#[derive(Debug, Clone)]
pub struct DetectionReport {
    pub events: Vec<Event>,
    pub trace: DecisionTrace,
    pub threshold: ThresholdModel,
    /// Resolved memory length M.
    pub memory: usize,
    /// Resolved analysis order r.
    pub order: usize,
    /// Resolved sector half-width L/2.
    pub sector_halfwidth: usize,
    /// Resolved minimum event separation.
    pub min_event_separation: usize,
    /// Full singular spectrum of the embedding.
    pub singular_values: Vec<f64>,
    /// sigma_1 / sigma_2 (infinite when sigma_2 vanishes).
    pub dominance_ratio: f64,
    /// Trajectory index 0 corresponds to this original-series index.
    pub alignment_offset: usize,
    /// Echo of the caller's configuration.
    pub config: PipelineConfig,
    pub warnings: Vec<String>,
}

/// Sector half-width from the smallest expected interval between two
/// stimuli: `L/2 = floor(interval / (2 T_s))`, at least 2.
pub fn select_sector_halfwidth(min_stimulus_interval: f64, sample_period: f64) -> Result<usize> {
    if !(min_stimulus_interval > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "minimal stimulus interval must be positive, got {min_stimulus_interval}"
        )));
    }
    if !(sample_period > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "sample period must be positive, got {sample_period}"
        )));
    }
    let halfwidth = (min_stimulus_interval / (2.0 * sample_period)).floor() as usize;
    Ok(halfwidth.max(2))
}

/// Normalized free-run reconstruction error of one grid point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridScore {
    pub memory: usize,
    pub order: usize,
    /// `||v_hat - v||^2 / ||v||^2` over the state modes.
    pub mse: f64,
}

fn score_order(d: &ModeDecomposition, r: usize) -> Result<f64> {
    let traj = embedding::trajectory(d, r)?;
    let model = dynamics::fit_linear_model(&traj)?;
    let s0: Vec<f64> = traj[..r - 1].iter().map(|t| t.samples()[0]).collect();
    let recon = dynamics::reconstruct(&model, &traj[r - 1], &s0)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (mode, hat) in traj[..r - 1].iter().zip(&recon) {
        for (v, vh) in mode.samples().iter().zip(hat.samples()) {
            num += (v - vh) * (v - vh);
            den += v * v;
        }
    }
    if den <= 0.0 || !num.is_finite() {
        return Err(Error::Numerical("degenerate reconstruction score".into()));
    }
    Ok(num / den)
}

/// Pick `(M, r)` over a grid by minimizing the normalized mean squared
/// error between the decomposed state modes and their free-run linear
/// reconstruction. Ties break toward smaller M, then smaller r.
pub fn select_order(
    bank: &FeatureBank,
    memory_grid: &[usize],
    order_grid: &[usize],
) -> Result<(usize, usize)> {
    let (m, r, _) = select_order_scored(bank, memory_grid, order_grid)?;
    Ok((m, r))
}

/// [`select_order`] returning the per-point scores as well.
pub fn select_order_scored(
    bank: &FeatureBank,
    memory_grid: &[usize],
    order_grid: &[usize],
) -> Result<(usize, usize, Vec<GridScore>)> {
    if memory_grid.is_empty() || order_grid.is_empty() {
        return Err(Error::InvalidConfig("empty parameter grid".into()));
    }
    let mut memories: Vec<usize> = memory_grid.to_vec();
    memories.sort_unstable();
    memories.dedup();
    let mut orders: Vec<usize> = order_grid.to_vec();
    orders.sort_unstable();
    orders.dedup();

    let n = bank.len();
    let f = bank.feature_count();
    let max_order = *orders.last().unwrap();

    // The grid is embarrassingly parallel; scores are collected in grid
    // order so the argmin matches a serial run exactly.
    let per_memory: Vec<(Vec<(usize, usize)>, Vec<GridScore>)> = memories
        .par_iter()
        .map(|&m| {
            let mut in_bounds = Vec::new();
            let mut scores = Vec::new();
            let rows = f * m;
            if m == 0 || n < m || n - m + 1 <= rows {
                return (in_bounds, scores);
            }
            for &r in &orders {
                if r >= 2 && r < rows {
                    in_bounds.push((m, r));
                }
            }
            if in_bounds.is_empty() {
                return (in_bounds, scores);
            }
            let hankel = match embedding::build_hankel(bank, m) {
                Ok(h) => h,
                Err(_) => return (in_bounds, scores),
            };
            let d = match embedding::decompose_leading(&hankel, max_order.min(rows)) {
                Ok(d) => d,
                Err(_) => return (in_bounds, scores),
            };
            for &(m, r) in &in_bounds {
                if let Ok(mse) = score_order(&d, r) {
                    scores.push(GridScore {
                        memory: m,
                        order: r,
                        mse,
                    });
                }
            }
            (in_bounds, scores)
        })
        .collect();

    let mut in_bounds = Vec::new();
    let mut scores = Vec::new();
    for (b, s) in per_memory {
        in_bounds.extend(b);
        scores.extend(s);
    }
    if let Some(best) = scores
        .iter()
        .min_by(|a, b| a.mse.partial_cmp(&b.mse).unwrap_or(std::cmp::Ordering::Equal))
    {
        return Ok((best.memory, best.order, scores.clone()));
    }
    // degenerate data can leave every score undefined (zero-variance
    // modes); fall back to the most parsimonious in-bounds point
    in_bounds
        .first()
        .map(|&(m, r)| (m, r, scores))
        .ok_or_else(|| Error::InvalidConfig("no valid (M, r) grid point for this series".into()))
}

/// Turn threshold crossings of the decision signal into events.
///
/// Maximal runs with `d >= d_th` (or `|d - center| >= d_th - center` in
/// two-sided mode) become one event each; runs closer than
/// `min_separation` merge; the peak is the earliest argmax of the run.
/// Indices are in decision-signal coordinates.
pub fn extract_events(
    d: &TimeSeries,
    d_th: f64,
    center: f64,
    min_separation: usize,
    two_sided: bool,
) -> Vec<Event> {
    let x = d.samples();
    let magnitude = |v: f64| if two_sided { (v - center).abs() } else { v };
    let cut = if two_sided { d_th - center } else { d_th };

    // maximal runs above the cut
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &v) in x.iter().enumerate() {
        if magnitude(v) >= cut {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            runs.push((s, i - 1));
        }
    }
    if let Some(s) = start {
        runs.push((s, x.len() - 1));
    }

    // merge runs separated by less than min_separation
    let mut merged: Vec<(usize, usize)> = Vec::new();
    for run in runs {
        match merged.last_mut() {
            Some(prev) if run.0 - prev.1 < min_separation.max(1) => prev.1 = run.1,
            _ => merged.push(run),
        }
    }

    merged
        .into_iter()
        .map(|(onset, end)| {
            let mut peak = onset;
            let mut best = f64::NEG_INFINITY;
            for i in onset..=end {
                let m = magnitude(x[i]);
                if m > best {
                    best = m;
                    peak = i;
                }
            }
            Event {
                onset_index: onset,
                peak_index: peak,
                end_index: end,
                peak_value: x[peak],
                kind: if onset == end {
                    EventKind::Point
                } else {
                    EventKind::Interval
                },
            }
        })
        .collect()
}

fn resolve_halfwidth(config: &PipelineConfig, n: usize) -> usize {
    let halfwidth = match config.sector_halfwidth {
        AutoOr::Fixed(h) => h,
        AutoOr::Auto => match config.min_event_separation {
            AutoOr::Fixed(sep) if sep >= 2 => (sep / 2).max(2),
            _ => (n / 1000).clamp(4, 64),
        },
    };
    // keep L = 2*halfwidth strictly below the series length
    halfwidth.clamp(1, (n - 1) / 2)
}

fn resolve_detrend_window(config: &PipelineConfig, halfwidth: usize, n: usize) -> usize {
    match config.detrend_window {
        AutoOr::Fixed(w) => w,
        AutoOr::Auto => (16 * halfwidth + 1).clamp(33, (n / 4).max(33)),
    }
}

fn zero_model(order: usize, sample_period: f64) -> LinearModel {
    let p = order - 1;
    LinearModel::from_parts(
        nalgebra::DMatrix::zeros(p, p),
        nalgebra::DVector::zeros(p),
        sample_period,
    )
    .expect("zero model dimensions are valid")
}

/// Run the full pipeline on one series.
///
/// Stages: optional detrend, feature bank, (auto) parameter selection,
/// Hankel embedding and SVD, linear model and decision signal, threshold
/// calibration, event extraction. Event indices refer to the original
/// series via the alignment offset `floor(M/2)`.
pub fn run_pipeline(y: &TimeSeries, config: &PipelineConfig) -> Result<DetectionReport> {
    let config = validate(config, y).map_err(|e| e.in_stage("validate"))?;
    let n = y.len();
    let mut warnings = Vec::new();

    let halfwidth = resolve_halfwidth(&config, n);
    let min_separation = config.min_event_separation.unwrap_or(halfwidth);

    let working = if config.detrend {
        let window = resolve_detrend_window(&config, halfwidth, n);
        features::detrend(y, window).map_err(|e| e.in_stage("detrend"))?
    } else {
        y.clone()
    };

    let bank = features::build_feature_bank(
        &working,
        &FeatureOptions {
            sector_halfwidth: halfwidth,
            robust: config.robust_median,
            matched_filter: config.matched_filter.as_deref(),
            standardize: config.standardize,
        },
    )
    .map_err(|e| e.in_stage("features"))?;

    let (memory, order) = match (config.memory, config.order) {
        (AutoOr::Fixed(m), AutoOr::Fixed(r)) => (m, r),
        (m, r) => {
            let memory_grid: Vec<usize> = match m {
                AutoOr::Fixed(m) => vec![m],
                AutoOr::Auto => DEFAULT_MEMORY_GRID.to_vec(),
            };
            let order_grid: Vec<usize> = match r {
                AutoOr::Fixed(r) => vec![r],
                AutoOr::Auto => DEFAULT_ORDER_GRID.to_vec(),
            };
            select_order(&bank, &memory_grid, &order_grid)
                .map_err(|e| e.in_stage("order-selection"))?
        }
    };

    let hankel = embedding::build_hankel(&bank, memory).map_err(|e| e.in_stage("embedding"))?;
    let modes = embedding::decompose(&hankel).map_err(|e| e.in_stage("embedding"))?;
    if order >= modes.sigma().len() {
        return Err(Error::InvalidConfig(format!(
            "order r={order} out of range for {} retained modes",
            modes.sigma().len()
        ))
        .in_stage("embedding"));
    }
    // The envelope path works on unit-norm modes: an oscillatory pair
    // then traces a circle and its envelope stays flat between events,
    // while sigma scaling would turn it into an ellipse whose envelope
    // ripples at the oscillation rate.
    let scaling = if config.use_hilbert {
        embedding::ModeScaling::Unit
    } else {
        embedding::ModeScaling::Sigma
    };
    let traj = embedding::trajectory_scaled(&modes, order, scaling)
        .map_err(|e| e.in_stage("embedding"))?;

    let model = if modes.sigma()[0] == 0.0 {
        warnings.push("input has no variation; skipping the dynamics fit".into());
        zero_model(order, y.sample_period())
    } else {
        match dynamics::fit_linear_model(&traj) {
            Ok(m) => m,
            Err(e @ Error::Numerical(_)) => {
                warnings.push(format!("dynamics fit degenerated ({e}); using a zero model"));
                zero_model(order, y.sample_period())
            }
            Err(e) => return Err(e.in_stage("dynamics")),
        }
    };

    let max_state = traj[0]
        .samples()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let trace = dynamics::decision_signal(&traj, &model, config.use_hilbert)
        .map_err(|e| e.in_stage("dynamics"))?;

    let calibration = threshold::calibrate(
        trace.d.samples(),
        &CalibrationOptions {
            bins: config.histogram_bins,
            kappa: config.detachment_excess,
            run: config.detachment_run,
            method: config.threshold_method,
        },
    )
    .map_err(|e| e.in_stage("threshold"))?;
    warnings.extend(calibration.warnings.iter().cloned());
    let model_th = calibration.model;

    let offset = modes.alignment_offset();
    let mut events = extract_events(
        &trace.d,
        model_th.threshold,
        model_th.mean,
        min_separation,
        config.two_sided,
    );
    if config.use_hilbert {
        // the analytic-signal envelope wraps around on a finite record,
        // so its first and last stretch are unreliable
        let guard = memory.min(trace.d.len() / 8);
        let last = trace.d.len() - 1;
        events.retain(|e| e.peak_index >= guard && e.peak_index + guard <= last);
    }
    for e in &mut events {
        e.onset_index += offset;
        e.peak_index += offset;
        e.end_index += offset;
    }

    // divergence diagnostic on the reconstructed state, reported rather
    // than raised
    if model.propagator().nrows() >= 1 {
        let s0: Vec<f64> = traj[..order - 1].iter().map(|t| t.samples()[0]).collect();
        if let Ok(recon) = dynamics::reconstruct(&model, &traj[order - 1], &s0) {
            let max_recon = recon
                .iter()
                .flat_map(|t| t.samples())
                .fold(0.0f64, |m, v| m.max(v.abs()));
            if max_recon > 100.0 * max_state.max(1e-300) {
                warnings.push(format!(
                    "linear reconstruction diverges (max amplitude {max_recon:.3e} vs state {max_state:.3e})"
                ));
            }
        }
    }

    Ok(DetectionReport {
        events,
        trace,
        threshold: model_th,
        memory,
        order,
        sector_halfwidth: halfwidth,
        min_event_separation: min_separation,
        singular_values: modes.sigma().to_vec(),
        dominance_ratio: embedding::dominance_ratio(&modes),
        alignment_offset: offset,
        config,
        warnings,
    })
}

#[derive(Serialize)]
struct EventDoc<'a> {
    onset_index: usize,
    peak_index: usize,
    end_index: usize,
    peak_value: f64,
    kind: &'a EventKind,
}

#[derive(Serialize)]
struct TraceDoc {
    v: Vec<f64>,
    r_force: Vec<f64>,
    d: Vec<f64>,
    hilbert_applied: bool,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema_version: u32,
    n_samples: usize,
    sample_period: f64,
    memory: usize,
    order: usize,
    sector_halfwidth: usize,
    min_event_separation: usize,
    alignment_offset: usize,
    singular_values: &'a [f64],
    dominance_ratio: Option<f64>,
    threshold: &'a ThresholdModel,
    events: Vec<EventDoc<'a>>,
    warnings: &'a [String],
    config: &'a PipelineConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    traces: Option<TraceDoc>,
}

impl DetectionReport {
    /// Serialize the report as versioned JSON. Trace arrays are included
    /// only when `include_traces` is set.
    pub fn to_json(&self, include_traces: bool) -> String {
        let doc = ReportDoc {
            schema_version: 1,
            n_samples: self.trace.d.len() + self.memory - 1,
            sample_period: self.trace.d.sample_period(),
            memory: self.memory,
            order: self.order,
            sector_halfwidth: self.sector_halfwidth,
            min_event_separation: self.min_event_separation,
            alignment_offset: self.alignment_offset,
            singular_values: &self.singular_values,
            dominance_ratio: if self.dominance_ratio.is_finite() {
                Some(self.dominance_ratio)
            } else {
                None
            },
            threshold: &self.threshold,
            events: self
                .events
                .iter()
                .map(|e| EventDoc {
                    onset_index: e.onset_index,
                    peak_index: e.peak_index,
                    end_index: e.end_index,
                    peak_value: e.peak_value,
                    kind: &e.kind,
                })
                .collect(),
            warnings: &self.warnings,
            config: &self.config,
            traces: include_traces.then(|| TraceDoc {
                v: self.trace.v.samples().to_vec(),
                r_force: self.trace.r_force.samples().to_vec(),
                d: self.trace.d.samples().to_vec(),
                hilbert_applied: self.trace.hilbert_applied,
            }),
        };
        serde_json::to_string_pretty(&doc).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(samples: Vec<f64>) -> TimeSeries {
        TimeSeries::new(samples, 1.0).unwrap()
    }

    #[test]
    fn sector_halfwidth_formula() {
        // interval 0.4 s at Ts = 0.0167 s: floor(0.4 / 0.0334) = 11
        assert_eq!(select_sector_halfwidth(0.4, 0.0167).unwrap(), 11);
        // interval 2 s at 10 Hz
        assert_eq!(select_sector_halfwidth(2.0, 0.1).unwrap(), 10);
        // shorter than 4 sample periods clamps to 2
        assert_eq!(select_sector_halfwidth(0.05, 0.1).unwrap(), 2);
        assert!(select_sector_halfwidth(0.0, 0.1).is_err());
    }

    #[test]
    fn extract_single_peak() {
        let d = ts(vec![0.0, 0.0, 5.0, 0.0, 0.0]);
        let events = extract_events(&d, 1.0, 0.0, 1, false);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].peak_index, 2);
        assert_eq!(events[0].onset_index, 2);
        assert_eq!(events[0].end_index, 2);
        assert_eq!(events[0].kind, EventKind::Point);
        assert_eq!(events[0].peak_value, 5.0);
    }

    #[test]
    fn extract_merges_close_runs() {
        let d = ts(vec![0.0, 3.0, 3.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 2.0, 0.0]);
        // gap of 2 between runs (3..=3, 4..=4 below threshold); min_sep 4 merges
        // the first two runs but not the third (gap 4)
        let events = extract_events(&d, 1.5, 0.0, 4, false);
        assert_eq!(events.len(), 2, "{events:?}");
        assert_eq!(events[0].onset_index, 1);
        assert_eq!(events[0].end_index, 5);
        assert_eq!(events[0].peak_index, 5);
        assert_eq!(events[0].kind, EventKind::Interval);
        assert_eq!(events[1].onset_index, 9);
    }

    #[test]
    fn extract_empty_when_below_threshold() {
        let d = ts(vec![0.1, 0.2, 0.3, 0.2]);
        assert!(extract_events(&d, 1.0, 0.0, 1, false).is_empty());
    }

    #[test]
    fn extract_two_sided_catches_negative_excursions() {
        let d = ts(vec![0.0, -5.0, 0.0, 5.0, 0.0]);
        let one = extract_events(&d, 2.0, 0.0, 1, false);
        assert_eq!(one.len(), 1);
        let two = extract_events(&d, 2.0, 0.0, 1, true);
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].peak_index, 1);
        assert_eq!(two[0].peak_value, -5.0);
    }

    #[test]
    fn extract_peak_tie_resolves_to_earliest() {
        let d = ts(vec![0.0, 3.0, 3.0, 3.0, 0.0]);
        let events = extract_events(&d, 1.0, 0.0, 1, false);
        assert_eq!(events[0].peak_index, 1);
    }

    #[test]
    fn select_order_single_point_grid() {
        let samples: Vec<f64> = (0..200)
            .map(|i| (i as f64 * 0.21).sin() + 0.3 * (i as f64 * 0.07).cos())
            .collect();
        let bank = features::build_feature_bank(
            &ts(samples),
            &FeatureOptions {
                sector_halfwidth: 4,
                standardize: true,
                ..FeatureOptions::default()
            },
        )
        .unwrap();
        let (m, r) = select_order(&bank, &[8], &[2]).unwrap();
        assert_eq!((m, r), (8, 2));
    }

    #[test]
    fn select_order_skips_invalid_points() {
        let samples: Vec<f64> = (0..100).map(|i| (i as f64 * 0.21).sin()).collect();
        let bank = features::build_feature_bank(
            &ts(samples),
            &FeatureOptions {
                sector_halfwidth: 4,
                standardize: true,
                ..FeatureOptions::default()
            },
        )
        .unwrap();
        // M=40 would need 160 rows from 61 columns: invalid, silently skipped
        let (m, _r) = select_order(&bank, &[4, 40], &[2]).unwrap();
        assert_eq!(m, 4);
        // nothing valid at all
        assert!(select_order(&bank, &[40], &[2]).is_err());
    }

    #[test]
    fn pipeline_constant_input_is_quiet() {
        let y = TimeSeries::new(vec![2.5; 600], 0.1).unwrap();
        let config = PipelineConfig {
            memory: AutoOr::Fixed(4),
            order: AutoOr::Fixed(2),
            sector_halfwidth: AutoOr::Fixed(5),
            ..PipelineConfig::default()
        };
        let report = run_pipeline(&y, &config).unwrap();
        assert!(report.events.is_empty());
        assert!(report.threshold.no_anomaly);
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn pipeline_report_round_trips_as_json() {
        let samples: Vec<f64> = (0..400)
            .map(|i| {
                let base = (i as f64 * 0.05).sin() * 0.05;
                if i % 120 == 60 {
                    base + 1.0
                } else {
                    base
                }
            })
            .collect();
        let y = TimeSeries::new(samples, 0.1).unwrap();
        let config = PipelineConfig {
            memory: AutoOr::Fixed(4),
            order: AutoOr::Fixed(2),
            sector_halfwidth: AutoOr::Fixed(6),
            ..PipelineConfig::default()
        };
        let report = run_pipeline(&y, &config).unwrap();
        let json = report.to_json(false);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["schema_version"], 1);
        assert_eq!(value["memory"], 4);
        assert!(value["traces"].is_null());
        let with_traces = report.to_json(true);
        let value: serde_json::Value = serde_json::from_str(&with_traces).unwrap();
        assert!(value["traces"]["d"].is_array());
    }

    #[test]
    fn pipeline_events_are_separated_and_sorted() {
        let mut samples = vec![0.0; 900];
        for (i, s) in samples.iter_mut().enumerate() {
            *s = ((i * 7919) % 1000) as f64 / 5000.0; // mild deterministic noise
        }
        for spike in [150usize, 450, 750] {
            for k in 0..20 {
                samples[spike + k] += (1.0 - k as f64 / 20.0).max(0.0);
            }
        }
        let y = TimeSeries::new(samples, 0.1).unwrap();
        let config = PipelineConfig {
            memory: AutoOr::Fixed(4),
            order: AutoOr::Fixed(2),
            sector_halfwidth: AutoOr::Fixed(10),
            ..PipelineConfig::default()
        };
        let report = run_pipeline(&y, &config).unwrap();
        assert!(!report.events.is_empty());
        for pair in report.events.windows(2) {
            assert!(pair[1].onset_index > pair[0].onset_index);
            assert!(
                pair[1].onset_index - pair[0].onset_index >= report.min_event_separation,
                "events too close: {pair:?}"
            );
        }
        for e in &report.events {
            assert!(e.onset_index <= e.peak_index && e.peak_index <= e.end_index);
            assert!(e.peak_value >= report.threshold.threshold);
        }
    }
}
