//! Delay embedding and mode extraction.
//!
//! Stacks the feature bank into the time-feature Hankel matrix, runs the
//! SVD, and prints the singular spectrum, the mode-dominance ratio, and
//! the leading trajectory modes. Also shows the raw-series embedding
//! whose first mode tracks the fluorescence level, making the spectrum
//! strongly dominant.
//!
//! ```bash
//! cargo run --release -p havok-detect --example hankel_modes
//! ```

use havok_detect::embedding::{build_hankel, decompose, dominance_ratio, trajectory};
use havok_detect::features::{build_feature_bank, FeatureOptions};
use havok_detect::series::FeatureBank;
use havok_detect::synth::{gen_calcium, CalciumParams};

fn main() -> havok_detect::Result<()> {
    let (trace, _) = gen_calcium(&CalciumParams {
        seed: 5,
        ..CalciumParams::default()
    })?;

    // detection-style embedding: standardized four-feature bank
    let bank = build_feature_bank(
        &trace,
        &FeatureOptions {
            sector_halfwidth: 14,
            standardize: true,
            ..FeatureOptions::default()
        },
    )?;
    let hankel = build_hankel(&bank, 4)?;
    println!(
        "standardized bank: {} x {} Hankel matrix",
        hankel.rows(),
        hankel.cols()
    );
    let modes = decompose(&hankel)?;
    println!(
        "  sigma[0..8] = {:?}",
        modes.sigma()[..8]
            .iter()
            .map(|s| (s * 10.0).round() / 10.0)
            .collect::<Vec<_>>()
    );
    println!("  dominance sigma1/sigma2 = {:.2}", dominance_ratio(&modes));

    let traj = trajectory(&modes, 2)?;
    let peak = traj[0]
        .samples()
        .iter()
        .fold(f64::NEG_INFINITY, |m, v| m.max(*v));
    println!(
        "  v1: {} samples, aligned at offset {}, peak {:.2}",
        traj[0].len(),
        modes.alignment_offset(),
        peak
    );

    // raw-series embedding: the level mode towers over the rest
    let raw = FeatureBank::new(vec![trace.clone()], vec!["raw".into()], 2)?;
    let modes = decompose(&build_hankel(&raw, 4)?)?;
    println!(
        "raw-series embedding: dominance sigma1/sigma2 = {:.1}",
        dominance_ratio(&modes)
    );
    Ok(())
}
