//! The multivariate basis functions, feature by feature.
//!
//! Shows what each derived series (local convexity, mean shift, energy
//! ratio) looks like around an isolated transient, with and without the
//! robust median variant in the presence of an impulsive outlier.
//!
//! ```bash
//! cargo run --release -p havok-detect --example feature_bank
//! ```

use havok_detect::features::{build_feature_bank, FeatureOptions};
use havok_detect::synth::{calcium_from_spikes, CalciumParams};

fn main() -> havok_detect::Result<()> {
    let params = CalciumParams {
        n_samples: 240,
        ..CalciumParams::default()
    };
    let clean = calcium_from_spikes(&[100], &params)?;

    let bank = build_feature_bank(
        &clean,
        &FeatureOptions {
            sector_halfwidth: 10,
            standardize: false,
            ..FeatureOptions::default()
        },
    )?;

    println!("features around the transient at sample 100 (L/2 = 10):");
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "n", "raw", "convex", "shift", "energy");
    for n in (85..135).step_by(5) {
        print!("{n:>6}");
        for f in bank.features() {
            print!(" {:>10.4}", f.samples()[n]);
        }
        println!();
    }

    // robust medians shrug off an impulsive outlier
    let mut samples = clean.samples().to_vec();
    samples[60] = 25.0;
    let spiky = clean.like(samples)?;
    for robust in [false, true] {
        let bank = build_feature_bank(
            &spiky,
            &FeatureOptions {
                sector_halfwidth: 10,
                robust,
                standardize: false,
                ..FeatureOptions::default()
            },
        )?;
        let shift = &bank.features()[2];
        let near_outlier = shift.samples()[52].abs();
        println!(
            "mean-shift magnitude near the outlier, robust={robust}: {near_outlier:.3}"
        );
    }
    Ok(())
}
