//! Pulse-train decoding under drift and impulsive noise.
//!
//! Generates a telemetry record (pulse-coded bits on a wandering
//! baseline with heavy-tailed outliers), decodes it with the matched
//! filter plus robust-median features, and compares against the
//! filter-off ablation.
//!
//! ```bash
//! cargo run --release -p havok-detect --example mud_pulses
//! ```

use havok_detect::cli::mud_detect_config;
use havok_detect::detector::run_pipeline;
use havok_detect::synth::{bit_error_rate, gen_pulse_train, PulseTrainParams};

fn main() -> havok_detect::Result<()> {
    let params = PulseTrainParams {
        seed: 11,
        ..PulseTrainParams::default()
    };
    let (trace, truth) = gen_pulse_train(&params)?;
    let ones = truth.bits.as_ref().unwrap().iter().filter(|b| **b == 1).count();
    println!(
        "{} slots x {} samples, {} one-bits, drift amplitude {}, noise {}",
        params.n_slots, params.slot_len, ones, params.drift_amplitude, params.noise_rms
    );

    let config = mud_detect_config(&params);
    let report = run_pipeline(&trace, &config)?;
    let ber = bit_error_rate(&report.events, &truth, params.slot_len)?;
    println!(
        "matched filter on : {} events, BER {:.4} (threshold {:.4})",
        report.events.len(),
        ber,
        report.threshold.threshold
    );

    let ablation = havok_detect::PipelineConfig {
        matched_filter: None,
        ..config
    };
    let report_off = run_pipeline(&trace, &ablation)?;
    let ber_off = bit_error_rate(&report_off.events, &truth, params.slot_len)?;
    println!(
        "matched filter off: {} events, BER {:.4}",
        report_off.events.len(),
        ber_off
    );
    Ok(())
}
