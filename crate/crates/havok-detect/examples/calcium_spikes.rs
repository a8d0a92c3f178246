//! Spike detection on a synthetic fluorescence trace.
//!
//! Generates four minutes of noisy calcium-style data with a known spike
//! train, runs the full detection pipeline with automatic parameter
//! selection, and scores the result against the ground truth.
//!
//! ```bash
//! cargo run --release -p havok-detect --example calcium_spikes
//! ```

use havok_detect::detector::run_pipeline;
use havok_detect::synth::{error_ratio, gen_calcium, CalciumParams};
use havok_detect::PipelineConfig;

fn main() -> havok_detect::Result<()> {
    let params = CalciumParams {
        noise_rms: 0.1,
        seed: 42,
        ..CalciumParams::default()
    };
    let (trace, truth) = gen_calcium(&params)?;
    println!(
        "generated {} samples at {:.1} Hz with {} spikes",
        trace.len(),
        1.0 / trace.sample_period(),
        truth.event_indices.len()
    );

    let config = PipelineConfig::default(); // everything on auto
    let report = run_pipeline(&trace, &config)?;

    println!(
        "selected M={} r={} L/2={}  dominance sigma1/sigma2 = {:.1}",
        report.memory, report.order, report.sector_halfwidth, report.dominance_ratio
    );
    println!(
        "threshold {:.4} ({} events, no_anomaly={})",
        report.threshold.threshold,
        report.events.len(),
        report.threshold.no_anomaly
    );

    let tol = report.sector_halfwidth;
    let er = error_ratio(&report.events, &truth, tol);
    println!("error ratio vs ground truth (tol {tol} samples): {er:.3}");
    for w in &report.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
