//! Synthetic benchmark generators mirroring the three application
//! scenarios (calcium transients, periodic beats with morphology
//! anomalies, pulse-train telemetry under drift and impulsive noise),
//! plus event- and bit-level scoring metrics.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::detector::Event;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Labels accompanying a generated series.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    /// Onset sample of each event, strictly increasing.
    pub event_indices: Vec<usize>,
    /// Interval anomalies as `(start, end)` index pairs, when the
    /// scenario has extended events.
    pub event_windows: Option<Vec<(usize, usize)>>,
    /// Transmitted bit per slot, for the telemetry scenario.
    pub bits: Option<Vec<u8>>,
}

// ---------------------------------------------------------------------
// calcium transients
// ---------------------------------------------------------------------

/// Parameters of the synthetic fluorescence scenario.
#[derive(Debug, Clone)]
pub struct CalciumParams {
    pub n_samples: usize,
    pub sample_period: f64,
    /// Mean firing rate in Hz.
    pub rate_hz: f64,
    /// Smallest allowed interval between two spikes, seconds.
    pub min_interval_s: f64,
    /// Kernel rise time constant, seconds.
    pub tau_rise: f64,
    /// Kernel decay time constant, seconds.
    pub tau_decay: f64,
    /// White noise level relative to the unit spike amplitude.
    pub noise_rms: f64,
    /// Per-sample standard deviation of the Brownian baseline walk.
    pub baseline_step: f64,
    /// Constant fluorescence level the transients ride on.
    pub dc_level: f64,
    /// Apply the soft saturation `s / (1 + s)` to the clean transient sum.
    pub saturation: bool,
    pub seed: u64,
}

impl Default for CalciumParams {
    fn default() -> Self {
        Self {
            n_samples: 14_400,
            sample_period: 1.0 / 60.0,
            rate_hz: 0.21,
            min_interval_s: 0.6,
            tau_rise: 0.05,
            tau_decay: 0.3,
            noise_rms: 0.1,
            baseline_step: 0.003,
            dc_level: 2.0,
            saturation: false,
            seed: 0,
        }
    }
}

/// Double-exponential transient normalized to a unit sampled peak.
fn transient_kernel(n: usize, sample_period: f64, tau_rise: f64, tau_decay: f64) -> Vec<f64> {
    let mut kernel: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * sample_period;
            (-t / tau_decay).exp() - (-t / tau_rise).exp()
        })
        .collect();
    let peak = kernel.iter().cloned().fold(0.0f64, f64::max).max(1e-300);
    for v in &mut kernel {
        *v /= peak;
    }
    kernel
}

/// Clean transient sum for a known spike train (no noise, no baseline);
/// overlapping transients add linearly before the optional saturation.
pub fn calcium_from_spikes(spike_indices: &[usize], params: &CalciumParams) -> Result<TimeSeries> {
    if !(params.tau_rise > 0.0 && params.tau_decay > params.tau_rise) {
        return Err(Error::InvalidConfig(format!(
            "need 0 < tau_rise < tau_decay, got {} and {}",
            params.tau_rise, params.tau_decay
        )));
    }
    let n = params.n_samples;
    // kernel support: long enough for the slow exponential to die out
    let k_len = ((8.0 * params.tau_decay / params.sample_period).ceil() as usize).min(n);
    let kernel = transient_kernel(k_len, params.sample_period, params.tau_rise, params.tau_decay);
    let mut clean = vec![0.0f64; n];
    for &s in spike_indices {
        for (k, kv) in kernel.iter().enumerate() {
            if s + k >= n {
                break;
            }
            clean[s + k] += kv;
        }
    }
    if params.saturation {
        for v in &mut clean {
            *v /= 1.0 + *v;
        }
    }
    TimeSeries::new(clean, params.sample_period)
}

/// Generate a noisy fluorescence trace: a renewal spike train (minimum
/// interval plus exponential waiting time) convolved with the transient
/// kernel, a Brownian baseline walk, and white measurement noise.
pub fn gen_calcium(params: &CalciumParams) -> Result<(TimeSeries, GroundTruth)> {
    if !(params.rate_hz > 0.0) {
        return Err(Error::InvalidConfig("rate must be positive".into()));
    }
    let mean_interval = 1.0 / params.rate_hz;
    if mean_interval <= params.min_interval_s {
        return Err(Error::InvalidConfig(format!(
            "rate {} Hz leaves no room for the {} s minimum interval",
            params.rate_hz, params.min_interval_s
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // renewal process: refractory gap plus exponential remainder keeps the
    // mean interval at 1/rate
    let exp_mean = mean_interval - params.min_interval_s;
    let horizon = params.n_samples as f64 * params.sample_period;
    let mut spikes = Vec::new();
    let mut t = 0.0f64;
    loop {
        let wait = params.min_interval_s - exp_mean * (1.0 - rng.random::<f64>()).ln();
        t += wait;
        if t >= horizon {
            break;
        }
        spikes.push((t / params.sample_period).round() as usize);
    }
    spikes.retain(|s| *s < params.n_samples);
    spikes.dedup();

    let clean = calcium_from_spikes(&spikes, params)?;
    let noise = Normal::new(0.0, params.noise_rms.max(0.0)).map_err(|e| {
        Error::InvalidConfig(format!("bad noise level {}: {e}", params.noise_rms))
    })?;
    let mut baseline = 0.0f64;
    let step = Normal::new(0.0, params.baseline_step.max(0.0))
        .map_err(|e| Error::InvalidConfig(format!("bad baseline step: {e}")))?;
    let samples: Vec<f64> = clean
        .samples()
        .iter()
        .map(|v| {
            baseline += if params.baseline_step > 0.0 {
                step.sample(&mut rng)
            } else {
                0.0
            };
            let eps = if params.noise_rms > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            params.dc_level + v + baseline + eps
        })
        .collect();

    Ok((
        TimeSeries::new(samples, params.sample_period)?,
        GroundTruth {
            event_indices: spikes,
            event_windows: None,
            bits: None,
        },
    ))
}

// ---------------------------------------------------------------------
// periodic beats with morphology anomalies
// ---------------------------------------------------------------------

/// Parameters of the synthetic beat-train scenario.
#[derive(Debug, Clone)]
pub struct PeriodicAnomalyParams {
    pub n_samples: usize,
    pub sample_period: f64,
    /// Beat length in samples.
    pub beat_period: usize,
    /// Anomaly windows as `(start, end)` sample index pairs.
    pub windows: Vec<(usize, usize)>,
    /// Strength of the morphology distortion inside the windows.
    pub morph_distortion: f64,
    pub noise_rms: f64,
    pub seed: u64,
}

impl Default for PeriodicAnomalyParams {
    fn default() -> Self {
        Self {
            n_samples: 2160,
            sample_period: 1.0,
            beat_period: 72,
            windows: Vec::new(),
            morph_distortion: 0.5,
            noise_rms: 0.05,
            seed: 0,
        }
    }
}

/// Evenly spread `count` anomaly windows of `width_beats` whole beats,
/// snapped to beat boundaries and away from the series edges. Helper for
/// the CLI and benches.
pub fn spread_windows(
    n_samples: usize,
    beat_period: usize,
    count: usize,
    width_beats: usize,
) -> Vec<(usize, usize)> {
    if count == 0 || beat_period == 0 {
        return Vec::new();
    }
    let width = width_beats.max(1) * beat_period;
    let margin = n_samples / 10;
    let usable = n_samples.saturating_sub(2 * margin + width);
    (0..count)
        .map(|i| {
            let start = margin + usable * (2 * i + 1) / (2 * count);
            let start = (start / beat_period) * beat_period; // snap to a beat
            (start, (start + width - 1).min(n_samples - 1))
        })
        .collect()
}

fn beat_template(phase: f64) -> f64 {
    let lobe = |center: f64, width: f64, amp: f64| {
        let z = (phase - center) / width;
        amp * (-0.5 * z * z).exp()
    };
    // smooth respiratory/repolarization baseline plus the P-QRS-T lobes;
    // widths are fractions of the beat, roughly physiological at this
    // resolution
    0.35 * (2.0 * std::f64::consts::PI * (phase - 0.42)).sin()
        + lobe(0.15, 0.05, 0.18)   // P
        + lobe(0.26, 0.025, -0.12) // Q
        + lobe(0.30, 0.04, 1.0)    // R
        + lobe(0.34, 0.025, -0.2)  // S
        + lobe(0.55, 0.08, 0.4)    // T
}

/// Generate a repeating stereotyped beat with morphology distortion
/// (amplitude boost and phase warp) inside the anomaly windows. With zero
/// distortion the output is purely periodic and the truth reports no
/// windows.
pub fn gen_periodic_anomaly(
    params: &PeriodicAnomalyParams,
) -> Result<(TimeSeries, GroundTruth)> {
    let n = params.n_samples;
    if params.beat_period < 8 || params.beat_period >= n {
        return Err(Error::InvalidConfig(format!(
            "beat period {} out of range for {n} samples",
            params.beat_period
        )));
    }
    let mut sorted = params.windows.clone();
    sorted.sort_unstable();
    for w in &sorted {
        if w.0 >= w.1 || w.1 >= n {
            return Err(Error::InvalidConfig(format!(
                "window ({}, {}) out of bounds",
                w.0, w.1
            )));
        }
    }
    for pair in sorted.windows(2) {
        if pair[1].0 <= pair[0].1 {
            return Err(Error::InvalidConfig(format!(
                "windows ({}, {}) and ({}, {}) overlap",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise = Normal::new(0.0, params.noise_rms.max(0.0))
        .map_err(|e| Error::InvalidConfig(format!("bad noise level: {e}")))?;
    let morph = params.morph_distortion;
    let in_window = |i: usize| sorted.iter().any(|w| i >= w.0 && i <= w.1);

    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let phase = (i % params.beat_period) as f64 / params.beat_period as f64;
            let clean = if morph != 0.0 && in_window(i) {
                let warped = (phase + morph * 0.15 * (2.0 * std::f64::consts::PI * phase).sin())
                    .rem_euclid(1.0);
                (1.0 + morph) * beat_template(warped)
            } else {
                beat_template(phase)
            };
            let eps = if params.noise_rms > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            clean + eps
        })
        .collect();

    let truth = if morph == 0.0 {
        GroundTruth::default()
    } else {
        GroundTruth {
            event_indices: sorted.iter().map(|w| w.0).collect(),
            event_windows: Some(sorted),
            bits: None,
        }
    };
    Ok((TimeSeries::new(samples, params.sample_period)?, truth))
}

// ---------------------------------------------------------------------
// pulse-train telemetry
// ---------------------------------------------------------------------

/// Parameters of the synthetic telemetry scenario.
#[derive(Debug, Clone)]
pub struct PulseTrainParams {
    pub n_slots: usize,
    /// Samples per bit slot.
    pub slot_len: usize,
    /// Transmitted bits; generated 50/50 from the seed when absent.
    pub bits: Option<Vec<u8>>,
    /// Pulse template placed at the start of each one-slot.
    pub pulse: Vec<f64>,
    /// Peak magnitude of the slow baseline drift.
    pub drift_amplitude: f64,
    pub noise_rms: f64,
    /// Per-sample probability of replacement by a 10x impulsive spike.
    pub impulsive_rate: f64,
    pub sample_period: f64,
    pub seed: u64,
}

impl Default for PulseTrainParams {
    fn default() -> Self {
        Self {
            n_slots: 200,
            slot_len: 40,
            bits: None,
            pulse: default_pulse_shape(32),
            drift_amplitude: 1.0,
            noise_rms: 0.25,
            impulsive_rate: 0.002,
            sample_period: 0.1,
            seed: 0,
        }
    }
}

/// Raised-cosine pulse of the given width with unit peak.
pub fn default_pulse_shape(width: usize) -> Vec<f64> {
    let w = width.max(2);
    (0..w)
        .map(|k| {
            let x = k as f64 / (w - 1) as f64;
            (std::f64::consts::PI * x).sin().powi(2)
        })
        .collect()
}

/// Generate a pulse-position telemetry record: one-bits place the pulse
/// at their slot start, on top of a scaled integrated-random-walk drift,
/// white noise, and sparse 10x impulsive outliers.
pub fn gen_pulse_train(params: &PulseTrainParams) -> Result<(TimeSeries, GroundTruth)> {
    if params.pulse.len() > params.slot_len {
        return Err(Error::InvalidConfig(format!(
            "pulse ({} samples) is longer than a slot ({})",
            params.pulse.len(),
            params.slot_len
        )));
    }
    if params.n_slots == 0 || params.slot_len == 0 {
        return Err(Error::InvalidConfig("empty slot structure".into()));
    }
    let n = params.n_slots * params.slot_len;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let bits: Vec<u8> = match &params.bits {
        Some(b) => {
            if b.len() != params.n_slots {
                return Err(Error::InvalidConfig(format!(
                    "{} bits for {} slots",
                    b.len(),
                    params.n_slots
                )));
            }
            b.clone()
        }
        None => (0..params.n_slots)
            .map(|_| if rng.random::<bool>() { 1 } else { 0 })
            .collect(),
    };

    let mut samples = vec![0.0f64; n];
    for (s, bit) in bits.iter().enumerate() {
        if *bit == 1 {
            let start = s * params.slot_len;
            for (k, p) in params.pulse.iter().enumerate() {
                samples[start + k] += p;
            }
        }
    }

    // slow drift: integrated random walk scaled to the requested peak
    if params.drift_amplitude > 0.0 {
        let mut velocity = 0.0f64;
        let mut position = 0.0f64;
        let mut drift = Vec::with_capacity(n);
        for _ in 0..n {
            velocity += rng.random::<f64>() - 0.5;
            position += velocity;
            drift.push(position);
        }
        let max = drift.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
        for (x, d) in samples.iter_mut().zip(&drift) {
            *x += d / max * params.drift_amplitude;
        }
    }

    if params.noise_rms > 0.0 {
        let noise = Normal::new(0.0, params.noise_rms)
            .map_err(|e| Error::InvalidConfig(format!("bad noise level: {e}")))?;
        for x in &mut samples {
            *x += noise.sample(&mut rng);
        }
    }

    if params.impulsive_rate > 0.0 {
        for x in &mut samples {
            if rng.random::<f64>() < params.impulsive_rate {
                *x = if rng.random::<bool>() { 10.0 } else { -10.0 };
            }
        }
    }

    let truth = GroundTruth {
        event_indices: bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == 1)
            .map(|(s, _)| s * params.slot_len)
            .collect(),
        event_windows: None,
        bits: Some(bits),
    };
    Ok((TimeSeries::new(samples, params.sample_period)?, truth))
}

// ---------------------------------------------------------------------
// scoring
// ---------------------------------------------------------------------

/// Maximum one-to-one matching between two sorted index sets under a
/// `|a - b| <= tol` constraint (two-pointer sweep; optimal on a line).
pub fn match_count(detected: &[usize], truth: &[usize], tol: usize) -> usize {
    let mut a: Vec<usize> = detected.to_vec();
    let mut b: Vec<usize> = truth.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut matched) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        let da = a[i] as i64;
        let db = b[j] as i64;
        if (da - db).abs() as usize <= tol {
            matched += 1;
            i += 1;
            j += 1;
        } else if da < db {
            i += 1;
        } else {
            j += 1;
        }
    }
    matched
}

/// Event-level error ratio: misses plus false positives over the number
/// of true events. Peaks match truth onsets one-to-one within
/// `tol_samples`; with no true events any detection scores 1.0.
pub fn error_ratio(events: &[Event], truth: &GroundTruth, tol_samples: usize) -> f64 {
    let peaks: Vec<usize> = events.iter().map(|e| e.peak_index).collect();
    let matched = match_count(&peaks, &truth.event_indices, tol_samples);
    let misses = truth.event_indices.len() - matched;
    let false_pos = peaks.len() - matched;
    (misses + false_pos) as f64 / truth.event_indices.len().max(1) as f64
}

/// Slot-level bit error rate. A slot decodes to 1 when at least one event
/// peak falls in its decision window, centered on the nominal pulse
/// position (the slot start).
pub fn bit_error_rate(events: &[Event], truth: &GroundTruth, slot_len: usize) -> Result<f64> {
    let bits = truth
        .bits
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("ground truth carries no slot bits".into()))?;
    if slot_len == 0 {
        return Err(Error::InvalidConfig("slot length must be positive".into()));
    }
    let n_slots = bits.len();
    let mut decoded = vec![0u8; n_slots];
    for e in events {
        let slot = (e.peak_index + slot_len / 2) / slot_len;
        if slot < n_slots {
            decoded[slot] = 1;
        }
    }
    let wrong = decoded.iter().zip(bits).filter(|(d, b)| d != b).count();
    Ok(wrong as f64 / n_slots as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::EventKind;
    use approx::assert_relative_eq;

    fn event_at(peak: usize) -> Event {
        Event {
            onset_index: peak.saturating_sub(1),
            peak_index: peak,
            end_index: peak + 1,
            peak_value: 1.0,
            kind: EventKind::Interval,
        }
    }

    #[test]
    fn calcium_single_spike_equals_kernel() {
        let params = CalciumParams {
            n_samples: 600,
            noise_rms: 0.0,
            baseline_step: 0.0,
            ..CalciumParams::default()
        };
        let clean = calcium_from_spikes(&[100], &params).unwrap();
        let kernel = transient_kernel(
            ((8.0 * params.tau_decay / params.sample_period).ceil()) as usize,
            params.sample_period,
            params.tau_rise,
            params.tau_decay,
        );
        assert_eq!(clean.samples()[99], 0.0);
        for (k, kv) in kernel.iter().enumerate().take(400) {
            assert_relative_eq!(clean.samples()[100 + k], *kv, epsilon = 1e-12);
        }
        let peak = clean.samples().iter().cloned().fold(f64::MIN, f64::max);
        assert_relative_eq!(peak, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn calcium_overlapping_spikes_add() {
        let params = CalciumParams {
            n_samples: 600,
            noise_rms: 0.0,
            baseline_step: 0.0,
            ..CalciumParams::default()
        };
        let one = calcium_from_spikes(&[100], &params).unwrap();
        let shifted = calcium_from_spikes(&[101], &params).unwrap();
        let both = calcium_from_spikes(&[100, 101], &params).unwrap();
        for i in 0..600 {
            assert_relative_eq!(
                both.samples()[i],
                one.samples()[i] + shifted.samples()[i],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn calcium_saturation_compresses() {
        let params = CalciumParams {
            n_samples: 600,
            noise_rms: 0.0,
            baseline_step: 0.0,
            saturation: true,
            ..CalciumParams::default()
        };
        let sat = calcium_from_spikes(&[100, 102, 104], &params).unwrap();
        let max = sat.samples().iter().cloned().fold(f64::MIN, f64::max);
        assert!(max < 1.0, "saturated peak {max} should stay below 1");
    }

    #[test]
    fn calcium_generator_is_deterministic_and_spaced() {
        let params = CalciumParams {
            seed: 7,
            ..CalciumParams::default()
        };
        let (a, ta) = gen_calcium(&params).unwrap();
        let (b, tb) = gen_calcium(&params).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_eq!(ta.event_indices, tb.event_indices);
        // ~50 spikes at the default rate over 240 s
        let count = ta.event_indices.len();
        assert!((30..=75).contains(&count), "spike count {count}");
        let min_gap = (params.min_interval_s / params.sample_period) as usize;
        for w in ta.event_indices.windows(2) {
            assert!(w[1] - w[0] + 1 >= min_gap, "gap {} too small", w[1] - w[0]);
        }
    }

    #[test]
    fn periodic_zero_distortion_is_clean() {
        let params = PeriodicAnomalyParams {
            windows: spread_windows(2160, 72, 3, 2),
            morph_distortion: 0.0,
            noise_rms: 0.0,
            ..PeriodicAnomalyParams::default()
        };
        let (y, truth) = gen_periodic_anomaly(&params).unwrap();
        assert!(truth.event_windows.is_none());
        assert!(truth.event_indices.is_empty());
        // purely periodic
        let s = y.samples();
        for i in 0..s.len() - 72 {
            assert_relative_eq!(s[i], s[i + 72], epsilon = 1e-12);
        }
    }

    #[test]
    fn periodic_anomaly_bookkeeping_and_deviation() {
        let window = (700usize, 900usize);
        let params = PeriodicAnomalyParams {
            windows: vec![window],
            morph_distortion: 0.5,
            noise_rms: 0.0,
            seed: 3,
            ..PeriodicAnomalyParams::default()
        };
        let (y, truth) = gen_periodic_anomaly(&params).unwrap();
        assert_eq!(truth.event_windows.as_deref(), Some(&[window][..]));

        // deviation from the clean template is larger inside the window
        let clean = gen_periodic_anomaly(&PeriodicAnomalyParams {
            windows: vec![],
            noise_rms: 0.0,
            ..params.clone()
        })
        .unwrap()
        .0;
        let dev = |range: std::ops::Range<usize>| {
            let mut acc = 0.0;
            for i in range.clone() {
                let d = y.samples()[i] - clean.samples()[i];
                acc += d * d;
            }
            (acc / range.len() as f64).sqrt()
        };
        assert!(dev(window.0..window.1) > 10.0 * dev(100..300));
    }

    #[test]
    fn periodic_rejects_bad_windows() {
        let mut params = PeriodicAnomalyParams::default();
        params.windows = vec![(100, 300), (250, 400)];
        assert!(gen_periodic_anomaly(&params).is_err());
        params.windows = vec![(100, 5000)];
        assert!(gen_periodic_anomaly(&params).is_err());
    }

    #[test]
    fn pulse_train_places_pulses_at_slot_starts() {
        let params = PulseTrainParams {
            n_slots: 3,
            slot_len: 40,
            bits: Some(vec![1, 0, 1]),
            drift_amplitude: 0.0,
            noise_rms: 0.0,
            impulsive_rate: 0.0,
            ..PulseTrainParams::default()
        };
        let (y, truth) = gen_pulse_train(&params).unwrap();
        assert_eq!(truth.event_indices, vec![0, 80]);
        let s = y.samples();
        let pulse = &params.pulse;
        for (k, p) in pulse.iter().enumerate() {
            assert_relative_eq!(s[k], *p, epsilon = 1e-12);
            assert_relative_eq!(s[80 + k], *p, epsilon = 1e-12);
        }
        for i in 40..80 {
            assert_eq!(s[i], 0.0);
        }
    }

    #[test]
    fn pulse_train_zero_bits_is_drift_only() {
        let params = PulseTrainParams {
            n_slots: 10,
            slot_len: 40,
            bits: Some(vec![0; 10]),
            drift_amplitude: 1.0,
            noise_rms: 0.0,
            impulsive_rate: 0.0,
            seed: 5,
            ..PulseTrainParams::default()
        };
        let (y, _) = gen_pulse_train(&params).unwrap();
        let max = y.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_relative_eq!(max, 1.0, epsilon = 1e-9); // scaled drift peak
    }

    #[test]
    fn pulse_train_impulse_count_matches_rate() {
        let params = PulseTrainParams {
            n_slots: 250,
            slot_len: 40, // N = 10000
            bits: Some(vec![0; 250]),
            drift_amplitude: 0.0,
            noise_rms: 0.0,
            impulsive_rate: 0.001,
            seed: 11,
            ..PulseTrainParams::default()
        };
        let (y, _) = gen_pulse_train(&params).unwrap();
        let count = y.samples().iter().filter(|v| v.abs() == 10.0).count();
        assert!((4..=20).contains(&count), "impulse count {count}");
    }

    #[test]
    fn pulse_rejects_oversized_pulse() {
        let params = PulseTrainParams {
            slot_len: 10,
            pulse: default_pulse_shape(16),
            ..PulseTrainParams::default()
        };
        assert!(gen_pulse_train(&params).is_err());
    }

    #[test]
    fn error_ratio_hand_cases() {
        let truth = GroundTruth {
            event_indices: (0..10).map(|i| i * 100).collect(),
            ..GroundTruth::default()
        };
        // perfect detection
        let events: Vec<Event> = truth.event_indices.iter().map(|i| event_at(*i)).collect();
        assert_eq!(error_ratio(&events, &truth, 5), 0.0);

        // 9 matched, 1 extra: (1 miss + 1 false positive) / 10
        let mut events: Vec<Event> = truth.event_indices[..9]
            .iter()
            .map(|i| event_at(*i))
            .collect();
        events.push(event_at(5000));
        assert_relative_eq!(error_ratio(&events, &truth, 5), 0.2);

        // zero truth events, one detection
        let none = GroundTruth::default();
        assert_eq!(error_ratio(&[event_at(3)], &none, 5), 1.0);
        assert_eq!(error_ratio(&[], &none, 5), 0.0);
    }

    #[test]
    fn matching_is_optimal_versus_brute_force() {
        // exhaustive bitmask matching as the oracle on small instances
        fn brute_force(a: &[usize], b: &[usize], tol: usize) -> usize {
            fn rec(a: &[usize], b: &[usize], tol: usize, i: usize, used: u32) -> usize {
                if i == a.len() {
                    return 0;
                }
                let mut best = rec(a, b, tol, i + 1, used);
                for (j, bv) in b.iter().enumerate() {
                    if used & (1 << j) != 0 {
                        continue;
                    }
                    if (a[i] as i64 - *bv as i64).abs() as usize <= tol {
                        best = best.max(1 + rec(a, b, tol, i + 1, used | (1 << j)));
                    }
                }
                best
            }
            rec(a, b, tol, 0, 0)
        }

        let mut state = 12345u64;
        let mut next = |m: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 33) as usize) % m
        };
        for _case in 0..200 {
            let na = next(8);
            let nb = next(8);
            let tol = next(6);
            let a: Vec<usize> = (0..na).map(|_| next(60)).collect();
            let b: Vec<usize> = (0..nb).map(|_| next(60)).collect();
            let mut a_sorted = a.clone();
            a_sorted.sort_unstable();
            let mut b_sorted = b.clone();
            b_sorted.sort_unstable();
            assert_eq!(
                match_count(&a, &b, tol),
                brute_force(&a_sorted, &b_sorted, tol),
                "a={a_sorted:?} b={b_sorted:?} tol={tol}"
            );
            // order independence
            let mut a_rev = a.clone();
            a_rev.reverse();
            assert_eq!(match_count(&a, &b, tol), match_count(&a_rev, &b, tol));
        }
    }

    #[test]
    fn bit_error_rate_hand_cases() {
        let bits: Vec<u8> = (0..100).map(|i| (i % 3 == 0) as u8).collect();
        let truth = GroundTruth {
            event_indices: vec![],
            event_windows: None,
            bits: Some(bits.clone()),
        };
        let slot_len = 40;

        // perfect decoding: one event per one-bit at the slot start
        let events: Vec<Event> = bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == 1)
            .map(|(s, _)| event_at(s * slot_len))
            .collect();
        assert_eq!(bit_error_rate(&events, &truth, slot_len).unwrap(), 0.0);

        // one slot wrong out of 100
        let mut one_off = events.clone();
        one_off.pop();
        assert_relative_eq!(
            bit_error_rate(&one_off, &truth, slot_len).unwrap(),
            0.01
        );

        // all flipped: events exactly in the zero slots
        let flipped: Vec<Event> = bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == 0)
            .map(|(s, _)| event_at(s * slot_len))
            .collect();
        assert_eq!(bit_error_rate(&flipped, &truth, slot_len).unwrap(), 1.0);

        // peaks jittered inside the centered window still decode
        let jittered: Vec<Event> = bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b == 1)
            .map(|(s, _)| event_at(s * slot_len + slot_len / 2 - 1))
            .collect();
        assert_eq!(bit_error_rate(&jittered, &truth, slot_len).unwrap(), 0.0);

        assert!(bit_error_rate(&events, &GroundTruth::default(), slot_len).is_err());
    }
}
