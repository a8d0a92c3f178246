//! Multivariate basis functions derived from a raw series: local
//! convexity, mean shift between neighboring sectors, sector energy
//! ratio, plus matched-filter pretreatment and detrending.

use crate::error::{Error, Result};
use crate::series::{FeatureBank, TimeSeries};

/// The pair of index sectors flanking a center sample: `left` covers
/// `[n - L/2, n)` and `right` covers `(n, n + L/2]`, both truncated to
/// the series bounds and both excluding the center itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorPair {
    pub left: std::ops::Range<usize>,
    pub right: std::ops::Range<usize>,
}

impl SectorPair {
    /// Sectors around index `n` for a series of length `len`.
    pub fn at(n: usize, halfwidth: usize, len: usize) -> Self {
        let left = n.saturating_sub(halfwidth)..n;
        let right = (n + 1).min(len)..(n + 1 + halfwidth).min(len);
        Self { left, right }
    }
}

fn check_sector_args(y: &TimeSeries, l: usize) -> Result<usize> {
    if l == 0 || l % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "sector width L must be even and positive, got {l}"
        )));
    }
    if l >= y.len() {
        return Err(Error::InvalidConfig(format!(
            "sector width L={l} must be below the series length {}",
            y.len()
        )));
    }
    Ok(l / 2)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(scratch: &mut Vec<f64>, values: &[f64]) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(values);
    let mid = scratch.len() / 2;
    scratch.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    if scratch.len() % 2 == 1 {
        scratch[mid]
    } else {
        0.5 * (scratch[mid - 1] + scratch[mid])
    }
}

/// Center value minus the average level of the two flanking sectors.
///
/// Interior samples use the exact two-sector average `(sum_L + sum_R)/L`;
/// near the edges the sectors truncate and the normalizer shrinks to the
/// available count. With `robust`, each sector's mean is replaced by its
/// median and the two are averaged.
pub fn local_convexity(y: &TimeSeries, l: usize, robust: bool) -> Result<TimeSeries> {
    let halfwidth = check_sector_args(y, l)?;
    let x = y.samples();
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut scratch = Vec::with_capacity(halfwidth);
    for i in 0..n {
        let s = SectorPair::at(i, halfwidth, n);
        let (left, right) = (&x[s.left], &x[s.right]);
        let level = if robust {
            match (left.is_empty(), right.is_empty()) {
                (false, false) => {
                    0.5 * (median(&mut scratch, left) + median(&mut scratch, right))
                }
                (false, true) => median(&mut scratch, left),
                (true, false) => median(&mut scratch, right),
                (true, true) => x[i],
            }
        } else {
            let count = left.len() + right.len();
            if count == 0 {
                x[i]
            } else {
                (left.iter().sum::<f64>() + right.iter().sum::<f64>()) / count as f64
            }
        };
        out.push(x[i] - level);
    }
    y.like(out)
}

/// Sum over the right sector minus sum over the left sector.
///
/// Computed as `(mean_R - mean_L) * L/2` so that truncated edge sectors
/// stay balanced (a constant series maps to zero everywhere). An empty
/// sector falls back to the center value as its level. With `robust` the
/// sector means become sector medians, same scaling.
pub fn mean_difference(y: &TimeSeries, l: usize, robust: bool) -> Result<TimeSeries> {
    let halfwidth = check_sector_args(y, l)?;
    let x = y.samples();
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut scratch = Vec::with_capacity(halfwidth);
    let stat = |scratch: &mut Vec<f64>, v: &[f64], center: f64| -> f64 {
        if v.is_empty() {
            center
        } else if robust {
            median(scratch, v)
        } else {
            mean(v)
        }
    };
    for i in 0..n {
        let s = SectorPair::at(i, halfwidth, n);
        let left = stat(&mut scratch, &x[s.left], x[i]);
        let right = stat(&mut scratch, &x[s.right], x[i]);
        out.push((right - left) * halfwidth as f64);
    }
    y.like(out)
}

/// Ratio of the right sector's mean squared value to the left sector's.
///
/// A degenerate denominator (below `1e-12 * max(y)^2`) or an empty sector
/// yields 1.0, the "no change" value. With `robust` the mean of squares
/// becomes the median of squares.
pub fn energy_ratio(y: &TimeSeries, l: usize, robust: bool) -> Result<TimeSeries> {
    let halfwidth = check_sector_args(y, l)?;
    let x = y.samples();
    let n = x.len();
    let max_abs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * max_abs * max_abs;
    let mut out = Vec::with_capacity(n);
    let mut scratch = Vec::with_capacity(halfwidth);
    let mut squares = Vec::with_capacity(halfwidth);
    let energy = |scratch: &mut Vec<f64>, squares: &mut Vec<f64>, v: &[f64]| -> Option<f64> {
        if v.is_empty() {
            return None;
        }
        squares.clear();
        squares.extend(v.iter().map(|a| a * a));
        Some(if robust {
            median(scratch, squares)
        } else {
            mean(squares)
        })
    };
    for i in 0..n {
        let s = SectorPair::at(i, halfwidth, n);
        let num = energy(&mut scratch, &mut squares, &x[s.right]);
        let den = energy(&mut scratch, &mut squares, &x[s.left]);
        let ratio = match (num, den) {
            (Some(num), Some(den)) if den > eps => num / den,
            _ => 1.0,
        };
        out.push(ratio);
    }
    y.like(out)
}

/// Cross-correlate the series with a pulse template at every alignment,
/// normalized by the template energy so a clean, noise-free copy of the
/// template peaks at exactly 1.0.
///
/// Alignment `n` overlays `w[0]` on `y[n]`; samples past the end of the
/// series are treated as zero, so the output keeps the input length.
pub fn matched_filter_refine(y: &TimeSeries, w: &[f64]) -> Result<TimeSeries> {
    if w.is_empty() {
        return Err(Error::InvalidConfig("matched filter is empty".into()));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "matched filter contains non-finite values".into(),
        ));
    }
    let energy: f64 = w.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::InvalidConfig("matched filter is all zeros".into()));
    }
    let x = y.samples();
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let upto = w.len().min(n - i);
        let dot: f64 = x[i..i + upto].iter().zip(&w[..upto]).map(|(a, b)| a * b).sum();
        out.push(dot / energy);
    }
    y.like(out)
}

/// Subtract a slow running-median baseline.
///
/// `window` is clamped to the series length and forced odd so interior
/// medians are single order statistics; truncated edge windows average
/// the two central values when the count comes out even.
pub fn detrend(y: &TimeSeries, window: usize) -> Result<TimeSeries> {
    let x = y.samples();
    let n = x.len();
    let window = window.clamp(1, if n % 2 == 1 { n } else { n - 1 });
    let window = if window % 2 == 0 { window + 1 } else { window };
    let half = window / 2;
    let mut out = Vec::with_capacity(n);
    let mut scratch: Vec<f64> = Vec::with_capacity(window);
    for i in 0..n {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        scratch.clear();
        scratch.extend_from_slice(&x[lo..hi]);
        let count = scratch.len();
        let mid = count / 2;
        let (below, med, _) =
            scratch.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
        let baseline = if count % 2 == 1 {
            *med
        } else {
            // even count: average the upper middle with the max of the
            // lower partition
            let lower = below.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
            0.5 * (lower + *med)
        };
        out.push(x[i] - baseline);
    }
    y.like(out)
}

/// Scale a series to zero mean and unit variance. A (numerically)
/// constant series maps to all zeros.
pub fn standardize(y: &TimeSeries) -> TimeSeries {
    let x = y.samples();
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    let max_abs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let samples = if std <= 1e-12 * max_abs.max(1.0) {
        vec![0.0; x.len()]
    } else {
        x.iter().map(|v| (v - mean) / std).collect()
    };
    y.like(samples).expect("standardized series stays finite")
}

/// Resolved options for building a feature bank (no auto fields left).
#[derive(Debug, Clone, Default)]
pub struct FeatureOptions<'a> {
    /// Sector half-width L/2 in samples.
    pub sector_halfwidth: usize,
    /// Sector medians instead of sector means.
    pub robust: bool,
    /// Optional pulse template applied before feature construction.
    pub matched_filter: Option<&'a [f64]>,
    /// Standardize each feature to zero mean, unit variance.
    pub standardize: bool,
}

/// Labels of the default bank, in order.
pub const FEATURE_LABELS: [&str; 4] = ["raw", "convexity", "mean_shift", "energy_ratio"];

/// Build the default four-feature bank from a raw series.
///
/// When a matched filter is present the features are computed from the
/// refined (correlated) series rather than the raw one.
pub fn build_feature_bank(y: &TimeSeries, opts: &FeatureOptions) -> Result<FeatureBank> {
    if opts.sector_halfwidth == 0 {
        return Err(Error::InvalidConfig(
            "sector half-width must be positive".into(),
        ));
    }
    let l = 2 * opts.sector_halfwidth;
    let refined;
    let base = match opts.matched_filter {
        Some(w) => {
            refined = matched_filter_refine(y, w)?;
            &refined
        }
        None => y,
    };
    let mut features = vec![
        base.clone(),
        local_convexity(base, l, opts.robust)?,
        mean_difference(base, l, opts.robust)?,
        energy_ratio(base, l, opts.robust)?,
    ];
    if opts.standardize {
        for f in &mut features {
            *f = standardize(f);
        }
    }
    FeatureBank::new(
        features,
        FEATURE_LABELS.iter().map(|s| s.to_string()).collect(),
        opts.sector_halfwidth,
    )
}
