//! Automatic decision-threshold calibration from the amplitude histogram
//! of the decision signal: a symmetry-based rough cut, a truncation-
//! corrected Gaussian core fit, the detachment (breaking) point where the
//! empirical density leaves the core, and a full Gaussian-plus-shifted-
//! exponential mixture fit.

use crate::error::{Error, Result};
use crate::series::{AutoOr, ThresholdMethod};

/// Relative-asymmetry bound for the symmetric-core scan.
const TAU_SYM: f64 = 0.5;
/// Density floor protecting the relative asymmetry against empty bins.
const EPS_P: f64 = 1e-6;
/// Consecutive offsets that must exceed `TAU_SYM` before the core is
/// declared asymmetric at that width.
const SYM_RUN: usize = 2;

fn normal_pdf(z: f64) -> f64 {
    (-(0.5) * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Amplitude histogram with a normalized density view.
#[derive(Debug, Clone)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    density: Vec<f64>,
    total: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Ascending bin edges, one more than the bin count.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Density normalized so that `sum(density * width) = 1`.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn bin_width(&self) -> f64 {
        (self.edges[self.bins()] - self.edges[0]) / self.bins() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// Index of the densest bin; ties resolve to the lowest index.
    pub fn mode_bin(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.counts.iter().enumerate() {
            if *c > self.counts[best] {
                best = i;
            }
        }
        best
    }

    /// Quantile from the piecewise-uniform density.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let target = q * self.total as f64;
        let mut acc = 0.0;
        for (i, c) in self.counts.iter().enumerate() {
            let next = acc + *c as f64;
            if next >= target && *c > 0 {
                let frac = (target - acc) / *c as f64;
                return self.edges[i] + frac * (self.edges[i + 1] - self.edges[i]);
            }
            acc = next;
        }
        self.edges[self.bins()]
    }

    /// Robust spread estimate from the interquartile range.
    pub fn robust_std(&self) -> f64 {
        (self.quantile(0.75) - self.quantile(0.25)) / 1.349
    }

    /// Median of the mass restricted to `[lo, hi]`, treating each bin as
    /// uniform. Falls back to the window midpoint when the window is
    /// empty.
    pub fn median_within(&self, lo: f64, hi: f64) -> f64 {
        let width = self.bin_width();
        let overlap = |i: usize| -> f64 {
            let a = self.edges[i].max(lo);
            let b = self.edges[i + 1].min(hi);
            if b > a {
                self.counts[i] as f64 * (b - a) / width
            } else {
                0.0
            }
        };
        let total: f64 = (0..self.bins()).map(overlap).sum();
        if total <= 0.0 {
            return 0.5 * (lo + hi);
        }
        let target = 0.5 * total;
        let mut acc = 0.0;
        for i in 0..self.bins() {
            let w = overlap(i);
            if w > 0.0 && acc + w >= target {
                let a = self.edges[i].max(lo);
                let b = self.edges[i + 1].min(hi);
                return a + (target - acc) / w * (b - a);
            }
            acc += w;
        }
        0.5 * (lo + hi)
    }

    /// Linearly interpolated density at an arbitrary point; zero outside
    /// the sampled range.
    pub fn density_at(&self, x: f64) -> f64 {
        let bins = self.bins();
        let width = self.bin_width();
        let first = self.center(0);
        let last = self.center(bins - 1);
        if x < self.edges[0] || x > self.edges[bins] {
            return 0.0;
        }
        if x <= first {
            return self.density[0];
        }
        if x >= last {
            return self.density[bins - 1];
        }
        let pos = (x - first) / width;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.density[i] * (1.0 - frac) + self.density[i + 1] * frac
    }
}

fn sample_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Histogram of a sample set. `Auto` bins use a Freedman-Diaconis-style
/// rule `ceil(range / (2 IQR N^(-1/3)))` clamped to `[20, 200]`; an
/// all-equal sample widens the range by ±0.5 so the edges stay defined.
pub fn build_histogram(samples: &[f64], bins: AutoOr<usize>) -> Result<Histogram> {
    let n = samples.len();
    if n < 10 {
        return Err(Error::InvalidConfig(format!(
            "histogram needs at least 10 samples, got {n}"
        )));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries(
            "histogram input has non-finite samples".into(),
        ));
    }
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let degenerate = !((max - min) > 0.0);
    let (lo, hi) = if degenerate {
        (min - 0.5, max + 0.5)
    } else {
        (min, max)
    };

    let bin_count = match bins {
        AutoOr::Fixed(b) => {
            if b == 0 {
                return Err(Error::InvalidConfig("bin count must be positive".into()));
            }
            b
        }
        AutoOr::Auto => {
            if degenerate {
                20
            } else {
                let mut sorted = samples.to_vec();
                sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                let iqr = sample_quantile(&sorted, 0.75) - sample_quantile(&sorted, 0.25);
                if iqr > 0.0 {
                    let width = 2.0 * iqr * (n as f64).powf(-1.0 / 3.0);
                    ((hi - lo) / width).ceil().clamp(20.0, 200.0) as usize
                } else {
                    ((n as f64).sqrt().ceil().clamp(20.0, 200.0)) as usize
                }
            }
        }
    };

    let width = (hi - lo) / bin_count as f64;
    let mut counts = vec![0u64; bin_count];
    for &x in samples {
        let mut idx = ((x - lo) / width) as usize;
        if idx >= bin_count {
            idx = bin_count - 1;
        }
        counts[idx] += 1;
    }
    let edges: Vec<f64> = (0..=bin_count).map(|i| lo + i as f64 * width).collect();
    let density: Vec<f64> = counts
        .iter()
        .map(|c| *c as f64 / (n as f64 * width))
        .collect();
    Ok(Histogram {
        edges,
        counts,
        density,
        total: n,
    })
}

/// Result of the symmetry-based rough threshold scan.
#[derive(Debug, Clone, Copy)]
pub struct RoughThreshold {
    /// The rough cut itself (a bin center above the center).
    pub value: f64,
    /// Estimated distribution center d0: the densest bin refined by the
    /// median of the surrounding core mass.
    pub center: f64,
    /// True when no candidate had a symmetric core and the fallback
    /// `center + 2 * robust sigma` was returned instead.
    pub fallback: bool,
}

/// Widest interval around the center on which the density is still
/// mirror-symmetric.
///
/// The center d0 starts at the densest bin and is refined by the median
/// of the mass within 1.5 robust sigmas of it, which keeps it stable
/// against bin-level noise and one-sided tails. Candidate cuts are bin
/// centers above d0; for each one the offsets between d0 and the
/// candidate are checked for relative asymmetry
/// `|p(d0-delta) - p(d0+delta)| / max(p(d0+delta), eps)`, and the
/// candidate survives while no [`SYM_RUN`] consecutive offsets exceed
/// [`TAU_SYM`]. The largest surviving candidate is returned, so a
/// one-sided tail caps the scan at its onset while sampling noise on a
/// clean core does not.
pub fn rough_threshold(h: &Histogram) -> Result<RoughThreshold> {
    if h.bins() < 20 {
        return Err(Error::InvalidConfig(format!(
            "rough threshold needs at least 20 bins, got {}",
            h.bins()
        )));
    }
    let coarse = h.center(h.mode_bin());
    let sigma_r = h.robust_std();
    let center = h.median_within(coarse - 1.5 * sigma_r, coarse + 1.5 * sigma_r);
    let width = h.bin_width();

    // Offset (in bins) at which a sustained asymmetry run completes.
    let max_offset = ((h.edges()[h.bins()] - center) / width).floor() as usize;
    let mut run = 0usize;
    let mut bad_offset: Option<usize> = None;
    for j in 1..=max_offset {
        let delta = j as f64 * width;
        let upper = h.density_at(center + delta);
        let lower = h.density_at(center - delta);
        let asym = (lower - upper).abs() / upper.max(EPS_P);
        if asym > TAU_SYM {
            run += 1;
            if run >= SYM_RUN {
                bad_offset = Some(j);
                break;
            }
        } else {
            run = 0;
        }
    }

    // Largest admissible offset, then the largest bin center within it.
    let last_good = match bad_offset {
        None => max_offset,
        Some(j) => j.saturating_sub(SYM_RUN),
    };
    let limit = center + last_good as f64 * width;
    let candidate = (0..h.bins())
        .rev()
        .map(|i| h.center(i))
        .find(|c| *c > center && *c <= limit);
    match candidate {
        Some(value) => Ok(RoughThreshold {
            value,
            center,
            fallback: false,
        }),
        None => Ok(RoughThreshold {
            value: center + 2.0 * sigma_r,
            center,
            fallback: true,
        }),
    }
}

/// Gaussian core fitted to the samples inside the inclusion region.
#[derive(Debug, Clone, Copy)]
pub struct GaussianCore {
    pub mean: f64,
    pub std: f64,
    /// Implied total Gaussian weight: core sample fraction divided by the
    /// Gaussian mass inside the inclusion region. Scales the fitted curve
    /// when comparing against the empirical density.
    pub scale: f64,
    /// Samples that fell inside the inclusion region.
    pub core_count: usize,
}

impl GaussianCore {
    /// Fitted (scaled) core density at `x`.
    pub fn density(&self, x: f64) -> f64 {
        self.scale * normal_pdf((x - self.mean) / self.std) / self.std
    }
}

/// Fit mean and deviation of the Gaussian core from the samples inside
/// `[center - w, center + w]` where `w = d_hat - center`, correcting the
/// truncation bias by iterating the truncated-normal moment equations
/// (at most 20 rounds, relative tolerance 1e-6).
pub fn fit_gaussian_core(samples: &[f64], d_hat: f64, center: f64) -> Result<GaussianCore> {
    let w = d_hat - center;
    if !(w > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "inclusion half-width must be positive (d_hat={d_hat}, center={center})"
        )));
    }
    let lo = center - w;
    let hi = center + w;
    let core: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|v| *v >= lo && *v <= hi)
        .collect();
    if core.len() < 30 {
        return Err(Error::Numerical(format!(
            "too few core samples inside [{lo:.4}, {hi:.4}]: {}",
            core.len()
        )));
    }
    let n = core.len() as f64;
    let m = core.iter().sum::<f64>() / n;
    let s2 = core.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
    let s = s2.sqrt();
    if s <= 1e-12 * m.abs().max(1.0) {
        return Err(Error::Numerical(
            "too few core samples / zero variance in the inclusion region".into(),
        ));
    }

    // Invert the truncated-normal moment map: given observed (m, s) on
    // [lo, hi], find (mu, sigma) whose truncated moments match.
    let mut mu = m;
    let mut sigma = s;
    for _ in 0..20 {
        let alpha = (lo - mu) / sigma;
        let beta = (hi - mu) / sigma;
        let z = (normal_cdf(beta) - normal_cdf(alpha)).max(1e-12);
        let shift = (normal_pdf(alpha) - normal_pdf(beta)) / z;
        let varfac =
            (1.0 + (alpha * normal_pdf(alpha) - beta * normal_pdf(beta)) / z - shift * shift)
                .max(1e-3);
        let sigma_new = s / varfac.sqrt();
        let mu_new = m - sigma_new * shift;
        let delta = ((mu_new - mu).abs() + (sigma_new - sigma).abs()) / sigma.max(1e-300);
        mu = mu_new;
        sigma = sigma_new;
        if delta < 1e-6 {
            break;
        }
    }

    let alpha = (lo - mu) / sigma;
    let beta = (hi - mu) / sigma;
    let mass = (normal_cdf(beta) - normal_cdf(alpha)).max(1e-12);
    let scale = (core.len() as f64 / samples.len() as f64) / mass;
    Ok(GaussianCore {
        mean: mu,
        std: sigma,
        scale,
        core_count: core.len(),
    })
}

/// Detachment-point search result.
#[derive(Debug, Clone, Copy)]
pub struct Detachment {
    /// Breaking point of the amplitude distribution: first bin center of
    /// the qualifying run, or `mean + 4 sigma` when nothing detaches.
    pub value: f64,
    /// True when no bin run exceeded the core, i.e. nothing to detect.
    pub no_anomaly: bool,
}

/// Minimum total count a qualifying detachment run must carry. In the
/// far tail the fitted density is essentially zero, so a single stray
/// sample already exceeds any density factor; demanding a few actual
/// counts keeps pure-noise histograms from producing phantom breaks.
const DETACH_MIN_COUNT: u64 = 4;

/// Smallest bin center above `mean + sigma` where the empirical density
/// exceeds the fitted core by factor `kappa` for `run` consecutive bins
/// carrying at least [`DETACH_MIN_COUNT`] samples between them.
pub fn detachment_threshold(
    h: &Histogram,
    core: &GaussianCore,
    kappa: f64,
    run: usize,
) -> Detachment {
    let start = core.mean + core.std;
    let density = h.density();
    let mut streak = 0usize;
    let mut streak_count = 0u64;
    let mut first_of_streak = 0usize;
    for i in 0..h.bins() {
        let c = h.center(i);
        if c < start {
            continue;
        }
        let fitted = core.density(c);
        if density[i] > kappa * fitted && density[i] > 0.0 {
            if streak == 0 {
                first_of_streak = i;
                streak_count = 0;
            }
            streak += 1;
            streak_count += h.counts()[i];
            if streak >= run && streak_count >= DETACH_MIN_COUNT {
                return Detachment {
                    value: h.center(first_of_streak),
                    no_anomaly: false,
                };
            }
        } else {
            streak = 0;
        }
    }
    Detachment {
        value: core.mean + 4.0 * core.std,
        no_anomaly: true,
    }
}

/// Calibrated threshold model: Gaussian core weight/location/spread, the
/// exponential tail decay and its onset (the decision threshold).
#[derive(Debug, Clone, serde::Serialize)]
pub struct ThresholdModel {
    /// Weight of the Gaussian component, in [0, 1].
    pub weight_gauss: f64,
    /// Gaussian mean (center of the quiet core).
    pub mean: f64,
    /// Gaussian standard deviation.
    pub std: f64,
    /// Exponential decay constant of the tail.
    pub decay: f64,
    /// Decision threshold: onset of the shifted exponential tail.
    pub threshold: f64,
    /// How the threshold was determined.
    pub method: ThresholdMethod,
    /// The preferred estimator degraded and a simpler one was used.
    pub fallback: bool,
    /// Nothing detached from the core; the threshold is a guard value
    /// and no events should be expected.
    pub no_anomaly: bool,
}

impl ThresholdModel {
    /// Mixture density implied by the model parameters.
    pub fn density(&self, x: f64) -> f64 {
        let gauss = self.weight_gauss * normal_pdf((x - self.mean) / self.std) / self.std;
        let tail = if x >= self.threshold && self.decay > 0.0 {
            (1.0 - self.weight_gauss) * self.decay * (-self.decay * (x - self.threshold)).exp()
        } else {
            0.0
        };
        gauss + tail
    }
}

fn tail_stats(samples: &[f64], threshold: f64, sigma: f64) -> (usize, f64) {
    let mut count = 0usize;
    let mut excess = 0.0;
    for &v in samples {
        if v >= threshold {
            count += 1;
            excess += v - threshold;
        }
    }
    let decay = if count > 0 && excess > 0.0 {
        count as f64 / excess
    } else {
        1.0 / sigma.max(1e-12)
    };
    (count, decay)
}

fn detachment_model(
    samples: &[f64],
    core: &GaussianCore,
    det: &Detachment,
    fallback: bool,
) -> ThresholdModel {
    let (tail_count, decay) = tail_stats(samples, det.value, core.std);
    let weight = 1.0 - tail_count as f64 / samples.len() as f64;
    let threshold = det.value.max(core.mean + 1e-9 * core.std.max(1e-300));
    ThresholdModel {
        weight_gauss: weight.clamp(0.0, 1.0),
        mean: core.mean,
        std: core.std,
        decay,
        threshold,
        method: ThresholdMethod::Detachment,
        fallback,
        no_anomaly: det.no_anomaly,
    }
}

/// Maximum-likelihood fit of the five-parameter Gaussian-plus-shifted-
/// exponential mixture, by EM alternation on the component parameters
/// with a profiled tail onset.
///
/// Initialization comes from the rough threshold, the core fit, and the
/// detachment point; the onset is constrained to stay within two core
/// deviations of the detachment estimate. Non-convergence within 200
/// iterations falls back to the detachment-based model with a flag.
pub fn fit_mixture(samples: &[f64], bins: AutoOr<usize>) -> Result<ThresholdModel> {
    fit_mixture_with(samples, bins, 3.0, 2)
}

/// [`fit_mixture`] with explicit detachment parameters for the
/// initialization stage.
pub fn fit_mixture_with(
    samples: &[f64],
    bins: AutoOr<usize>,
    kappa: f64,
    run: usize,
) -> Result<ThresholdModel> {
    if samples.len() < 500 {
        return Err(Error::InvalidConfig(format!(
            "mixture fit needs at least 500 samples, got {}",
            samples.len()
        )));
    }
    let hist = build_histogram(samples, bins)?;
    let rough = rough_threshold(&hist)?;
    let core = fit_gaussian_core(samples, rough.value, rough.center)?;
    let det = detachment_threshold(&hist, &core, kappa, run);

    let n = samples.len() as f64;
    let (tail_count, mut decay) = tail_stats(samples, det.value, core.std);
    let mut weight = (1.0 - tail_count as f64 / n).clamp(1e-6, 1.0 - 1e-6);
    let mut mean = core.mean;
    let mut std = core.std;
    let mut onset = det.value;
    let onset_lo = det.value - 2.0 * core.std;
    let onset_hi = det.value + 2.0 * core.std;

    let mut responsibilities = vec![0.0f64; samples.len()];
    let mut iterations = 0usize;
    let mut converged = false;
    let spread = {
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (max - min).max(1e-12)
    };

    'outer: for _pass in 0..4 {
        // EM rounds at fixed onset
        loop {
            if iterations >= 200 {
                break 'outer;
            }
            iterations += 1;
            let mut sum_g = 0.0;
            for (gamma, &x) in responsibilities.iter_mut().zip(samples) {
                let g = weight * normal_pdf((x - mean) / std) / std;
                let e = if x >= onset {
                    (1.0 - weight) * decay * (-(decay) * (x - onset)).exp()
                } else {
                    0.0
                };
                *gamma = if g + e > 0.0 { g / (g + e) } else { 1.0 };
                sum_g += *gamma;
            }
            let new_weight = (sum_g / n).clamp(1e-6, 1.0 - 1e-6);
            let new_mean =
                responsibilities.iter().zip(samples).map(|(g, x)| g * x).sum::<f64>() / sum_g;
            let var = responsibilities
                .iter()
                .zip(samples)
                .map(|(g, x)| g * (x - new_mean) * (x - new_mean))
                .sum::<f64>()
                / sum_g;
            let new_std = var.sqrt().max(1e-9 * spread);
            let tail_mass: f64 = responsibilities.iter().map(|g| 1.0 - g).sum();
            let tail_excess: f64 = responsibilities
                .iter()
                .zip(samples)
                .filter(|(_, x)| **x >= onset)
                .map(|(g, x)| (1.0 - g) * (x - onset))
                .sum();
            let new_decay = if tail_excess > 0.0 {
                (tail_mass / tail_excess).clamp(1e-6 / spread, 1e9 / spread)
            } else {
                decay
            };

            let delta = ((new_mean - mean).abs() + (new_std - std).abs()) / std
                + (new_weight - weight).abs()
                + (new_decay - decay).abs() / decay.max(1e-300);
            mean = new_mean;
            std = new_std;
            weight = new_weight;
            decay = new_decay;
            if delta < 1e-7 {
                converged = true;
                break;
            }
        }

        // Profile the onset over its constrained interval.
        let lo = onset_lo.max(mean + 0.1 * std);
        let hi = onset_hi.max(lo);
        let grid = 80usize;
        let mut best = (f64::NEG_INFINITY, onset);
        for gi in 0..=grid {
            let cand = lo + (hi - lo) * gi as f64 / grid as f64;
            let mut ll = 0.0;
            for &x in samples {
                let g = weight * normal_pdf((x - mean) / std) / std;
                let e = if x >= cand {
                    (1.0 - weight) * decay * (-(decay) * (x - cand)).exp()
                } else {
                    0.0
                };
                ll += (g + e).max(1e-300).ln();
            }
            if ll > best.0 {
                best = (ll, cand);
            }
        }
        let moved = (best.1 - onset).abs();
        onset = best.1;
        if converged && moved < (hi - lo) / grid as f64 * 0.5 + 1e-12 {
            break;
        }
        converged = false;
    }

    if !converged {
        return Ok(detachment_model(samples, &core, &det, true));
    }

    let onset = onset.clamp(onset_lo, onset_hi);
    let threshold = onset.max(mean + 1e-9 * std.max(1e-300));
    // A weight this close to one means there is no real tail to fit.
    let degenerate = weight > 0.99;
    Ok(ThresholdModel {
        weight_gauss: weight,
        mean,
        std,
        decay,
        threshold,
        method: ThresholdMethod::MixtureFit,
        fallback: degenerate,
        no_anomaly: det.no_anomaly,
    })
}

/// Options for the end-to-end calibration used by the detector.
#[derive(Debug, Clone)]
pub struct CalibrationOptions {
    pub bins: AutoOr<usize>,
    pub kappa: f64,
    pub run: usize,
    pub method: ThresholdMethod,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            bins: AutoOr::Auto,
            kappa: 3.0,
            run: 2,
            method: ThresholdMethod::Detachment,
        }
    }
}

/// Calibration output: the model plus human-readable warnings about any
/// degraded steps.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub model: ThresholdModel,
    pub histogram: Histogram,
    pub core: Option<GaussianCore>,
    pub warnings: Vec<String>,
}

/// Full calibration chain: histogram, rough symmetric cut, core fit,
/// detachment point, and optionally the mixture refinement. Degenerate
/// signals (constant, near-constant) produce a guarded no-anomaly model
/// instead of an error.
pub fn calibrate(samples: &[f64], opts: &CalibrationOptions) -> Result<Calibration> {
    let hist = build_histogram(samples, opts.bins)?;
    let mut warnings = Vec::new();

    let rough = match rough_threshold(&hist) {
        Ok(r) => r,
        Err(e) => return Err(e),
    };
    if rough.fallback {
        warnings.push("rough threshold fell back to mode + 2 robust sigma".into());
    }

    let core = match fit_gaussian_core(samples, rough.value, rough.center) {
        Ok(c) => c,
        Err(e) => {
            // constant or nearly constant decision signal: nothing to detect
            warnings.push(format!("degenerate decision signal ({e}); no events expected"));
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let model = ThresholdModel {
                weight_gauss: 1.0,
                mean,
                std: 0.0,
                decay: 1.0,
                threshold: mean + 1.0,
                method: ThresholdMethod::Detachment,
                fallback: true,
                no_anomaly: true,
            };
            return Ok(Calibration {
                model,
                histogram: hist,
                core: None,
                warnings,
            });
        }
    };

    let det = detachment_threshold(&hist, &core, opts.kappa, opts.run);
    if det.no_anomaly {
        warnings.push("no detachment point found; decision signal looks event-free".into());
    }

    let model = match opts.method {
        ThresholdMethod::Detachment => detachment_model(samples, &core, &det, false),
        ThresholdMethod::MixtureFit => match fit_mixture_with(samples, opts.bins, opts.kappa, opts.run)
        {
            Ok(m) => {
                if m.fallback {
                    warnings.push("mixture fit degenerated; see fallback flag".into());
                }
                m
            }
            Err(e) => {
                warnings.push(format!("mixture fit unavailable ({e}); using detachment"));
                detachment_model(samples, &core, &det, true)
            }
        },
    };

    Ok(Calibration {
        model,
        histogram: hist,
        core: Some(core),
        warnings,
    })
}
