//! Self-calibrating threshold, step by step.
//!
//! Draws samples from a Gaussian core with a shifted-exponential tail,
//! then walks the calibration chain: histogram, symmetric-core rough
//! cut, truncation-corrected core fit, detachment point, and the full
//! mixture fit.
//!
//! ```bash
//! cargo run --release -p havok-detect --example threshold_calibration
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};

use havok_detect::series::AutoOr;
use havok_detect::threshold::{
    build_histogram, detachment_threshold, fit_gaussian_core, fit_mixture, rough_threshold,
};

fn main() -> havok_detect::Result<()> {
    // weight 0.9 Gaussian core, tail onset 3, decay 2
    let (weight, onset, decay) = (0.9, 3.0, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let gauss = Normal::new(0.0, 1.0).unwrap();
    let tail = Exp::new(decay).unwrap();
    let samples: Vec<f64> = (0..50_000)
        .map(|_| {
            if rng.random::<f64>() < weight {
                gauss.sample(&mut rng)
            } else {
                onset + tail.sample(&mut rng)
            }
        })
        .collect();

    let hist = build_histogram(&samples, AutoOr::Auto)?;
    println!("histogram: {} bins, width {:.4}", hist.bins(), hist.bin_width());

    let rough = rough_threshold(&hist)?;
    println!(
        "rough cut at {:.3} around center {:.3} (fallback: {})",
        rough.value, rough.center, rough.fallback
    );

    let core = fit_gaussian_core(&samples, rough.value, rough.center)?;
    println!(
        "core fit: mean {:.4}, sigma {:.4}, implied weight {:.3} ({} samples)",
        core.mean, core.std, core.scale, core.core_count
    );

    let det = detachment_threshold(&hist, &core, 3.0, 2);
    println!(
        "detachment point {:.3} (no_anomaly: {})",
        det.value, det.no_anomaly
    );

    let model = fit_mixture(&samples, AutoOr::Auto)?;
    println!(
        "mixture fit: w={:.3} mean={:.3} sigma={:.3} decay={:.3} threshold={:.3}",
        model.weight_gauss, model.mean, model.std, model.decay, model.threshold
    );
    println!("generating values: w=0.9 mean=0 sigma=1 decay=2 onset=3");
    Ok(())
}
