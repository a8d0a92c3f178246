//! Core data types shared by every stage: sampled series, feature banks,
//! and the pipeline configuration.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A uniformly sampled real-valued series.
///
/// Time is implicit: sample `i` sits at `start_time + i * sample_period`.
/// Construction rejects NaN/Inf samples, fewer than two samples, and
/// non-positive sample periods, so downstream code never re-checks.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    sample_period: f64,
    start_time: f64,
}

impl TimeSeries {
    /// Build a series starting at time zero.
    pub fn new(samples: Vec<f64>, sample_period: f64) -> Result<Self> {
        Self::with_start_time(samples, sample_period, 0.0)
    }

    /// Build a series with an explicit start time.
    pub fn with_start_time(samples: Vec<f64>, sample_period: f64, start_time: f64) -> Result<Self> {
        if !(sample_period > 0.0) || !sample_period.is_finite() {
            return Err(Error::InvalidSeries(format!(
                "sample period must be positive and finite, got {sample_period}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite sample {} at index {pos}",
                samples[pos]
            )));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidSeries(format!(
                "non-finite start time {start_time}"
            )));
        }
        Ok(Self {
            samples,
            sample_period,
            start_time,
        })
    }

    /// Derive a new series with the same sampling as `self`.
    pub fn like(&self, samples: Vec<f64>) -> Result<Self> {
        Self::with_start_time(samples, self.sample_period, self.start_time)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    /// Time coordinate of sample `i`.
    pub fn time_at(&self, i: usize) -> f64 {
        self.start_time + i as f64 * self.sample_period
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// An ordered set of equally sampled feature series derived from one raw
/// series, together with the sector half-width used to build them.
#[derive(Debug, Clone)]
pub struct FeatureBank {
    features: Vec<TimeSeries>,
    labels: Vec<String>,
    sector_halfwidth: usize,
}

impl FeatureBank {
    /// Validate and assemble a bank. All members must share length and
    /// sample period; the label list must match the feature list.
    pub fn new(
        features: Vec<TimeSeries>,
        labels: Vec<String>,
        sector_halfwidth: usize,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidConfig("feature bank is empty".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::InvalidConfig(format!(
                "{} features but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if sector_halfwidth == 0 {
            return Err(Error::InvalidConfig(
                "sector half-width must be positive".into(),
            ));
        }
        let len = features[0].len();
        let period = features[0].sample_period();
        for (i, f) in features.iter().enumerate() {
            if f.len() != len {
                return Err(Error::InvalidConfig(format!(
                    "feature '{}' has length {} but '{}' has {}",
                    labels[i],
                    f.len(),
                    labels[0],
                    len
                )));
            }
            if f.sample_period() != period {
                return Err(Error::InvalidConfig(format!(
                    "feature '{}' sample period {} differs from {}",
                    labels[i],
                    f.sample_period(),
                    period
                )));
            }
        }
        Ok(Self {
            features,
            labels,
            sector_halfwidth,
        })
    }

    pub fn features(&self) -> &[TimeSeries] {
        &self.features
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    /// Length shared by every member series.
    pub fn len(&self) -> usize {
        self.features[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sample_period(&self) -> f64 {
        self.features[0].sample_period()
    }

    pub fn sector_halfwidth(&self) -> usize {
        self.sector_halfwidth
    }
}

/// A value that is either resolved automatically from the data or pinned
/// by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AutoOr<T> {
    #[default]
    Auto,
    Fixed(T),
}

impl<T: Copy> AutoOr<T> {
    pub fn fixed(self) -> Option<T> {
        match self {
            AutoOr::Auto => None,
            AutoOr::Fixed(v) => Some(v),
        }
    }

    pub fn is_auto(self) -> bool {
        matches!(self, AutoOr::Auto)
    }

    /// The fixed value, or `fallback` when auto.
    pub fn unwrap_or(self, fallback: T) -> T {
        match self {
            AutoOr::Auto => fallback,
            AutoOr::Fixed(v) => v,
        }
    }
}

impl<T: Serialize> Serialize for AutoOr<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AutoOr::Auto => serializer.serialize_str("auto"),
            AutoOr::Fixed(v) => v.serialize(serializer),
        }
    }
}

impl<T> From<T> for AutoOr<T> {
    fn from(v: T) -> Self {
        AutoOr::Fixed(v)
    }
}

/// Which calibrated threshold drives event extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    /// Breaking point where the empirical density detaches from the
    /// fitted Gaussian core (default).
    #[default]
    Detachment,
    /// Location parameter of the fitted Gaussian-plus-exponential mixture.
    MixtureFit,
}

/// Full pipeline configuration. Every `AutoOr` field resolves from the
/// data when left on `Auto`.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    /// Half-width of the left/right feature sectors, in samples (L/2).
    pub sector_halfwidth: AutoOr<usize>,
    /// Delay-embedding memory length M.
    pub memory: AutoOr<usize>,
    /// Analysis order r (state dimension r-1 plus one forcing mode).
    pub order: AutoOr<usize>,
    /// Use sector medians instead of sector means in the feature bank.
    pub robust_median: bool,
    /// Optional pulse template; when present the feature bank is built
    /// from the normalized cross-correlation of the input with it.
    pub matched_filter: Option<Vec<f64>>,
    /// Envelope the decision signal with the analytic-signal magnitude.
    pub use_hilbert: bool,
    /// Minimum spacing between reported events, in samples. Auto = L/2.
    pub min_event_separation: AutoOr<usize>,
    /// Histogram bin count for threshold calibration.
    pub histogram_bins: AutoOr<usize>,
    /// Seed for synthetic paths; detection itself is deterministic.
    pub rng_seed: u64,
    /// Standardize each feature to zero mean, unit variance before
    /// embedding. The bank mixes incommensurate units, so this is on by
    /// default.
    pub standardize: bool,
    /// Remove a slow running-median baseline before feature construction.
    pub detrend: bool,
    /// Running-median window for detrending, in samples. Auto derives
    /// from the sector half-width.
    pub detrend_window: AutoOr<usize>,
    /// Threshold on |d - d0| instead of d alone, for signals whose events
    /// may be negative-going.
    pub two_sided: bool,
    /// Density-excess factor over the fitted core that marks detachment.
    pub detachment_excess: f64,
    /// Consecutive bins that must exceed the detachment factor.
    pub detachment_run: usize,
    /// Which calibrated threshold to use for extraction.
    pub threshold_method: ThresholdMethod,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sector_halfwidth: AutoOr::Auto,
            memory: AutoOr::Auto,
            order: AutoOr::Auto,
            robust_median: false,
            matched_filter: None,
            use_hilbert: false,
            min_event_separation: AutoOr::Auto,
            histogram_bins: AutoOr::Auto,
            rng_seed: 0,
            standardize: true,
            detrend: true,
            detrend_window: AutoOr::Auto,
            two_sided: false,
            detachment_excess: 3.0,
            detachment_run: 2,
            threshold_method: ThresholdMethod::Detachment,
        }
    }
}

/// Number of features the default bank produces.
pub const DEFAULT_FEATURE_COUNT: usize = 4;

/// Check a configuration against a concrete series. Auto fields stay
/// symbolic; fixed fields are bounds-checked against the series length.
pub fn validate(config: &PipelineConfig, y: &TimeSeries) -> Result<PipelineConfig> {
    let n = y.len();
    let feature_count = DEFAULT_FEATURE_COUNT;

    if let AutoOr::Fixed(halfwidth) = config.sector_halfwidth {
        if halfwidth == 0 {
            return Err(Error::InvalidConfig(
                "sector half-width must be positive".into(),
            ));
        }
        let l = 2 * halfwidth;
        if l >= n {
            return Err(Error::InvalidConfig(format!(
                "series too short: sector width L={l} needs more than {l} samples, got {n}"
            )));
        }
    }

    if let AutoOr::Fixed(m) = config.memory {
        if m == 0 {
            return Err(Error::InvalidConfig("memory M must be positive".into()));
        }
        // Tall-in-time regime: all Hankel rows must fit strictly inside
        // the column count.
        let rows = feature_count * m;
        let cols = n.saturating_sub(m - 1);
        if cols <= rows {
            return Err(Error::InvalidConfig(format!(
                "series too short: memory M={m} with {feature_count} features needs \
                 {rows} < N - M + 1 = {cols} columns (N = {n})"
            )));
        }
    }

    if let AutoOr::Fixed(r) = config.order {
        if r < 2 {
            return Err(Error::InvalidConfig(format!(
                "order r must be at least 2, got {r}"
            )));
        }
        if let AutoOr::Fixed(m) = config.memory {
            let retained = feature_count * m;
            if r >= retained {
                return Err(Error::InvalidConfig(format!(
                    "order r={r} must be below the {retained} retained singular values \
                     (M={m}, {feature_count} features)"
                )));
            }
        }
    }

    if let Some(w) = &config.matched_filter {
        if w.is_empty() {
            return Err(Error::InvalidConfig("matched filter is empty".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "matched filter contains non-finite values".into(),
            ));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidConfig("matched filter is all zeros".into()));
        }
        if w.len() > n {
            return Err(Error::InvalidConfig(format!(
                "matched filter ({} samples) is longer than the series ({n})",
                w.len()
            )));
        }
    }

    if let AutoOr::Fixed(bins) = config.histogram_bins {
        if bins == 0 {
            return Err(Error::InvalidConfig(
                "histogram bin count must be positive".into(),
            ));
        }
    }

    if !(config.detachment_excess > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "detachment excess factor must exceed 1, got {}",
            config.detachment_excess
        )));
    }
    if config.detachment_run == 0 {
        return Err(Error::InvalidConfig(
            "detachment run length must be positive".into(),
        ));
    }

    Ok(config.clone())
}
