//! Error ratio versus noise level on the spike benchmark.
//!
//! Runs the full auto-configured pipeline over a grid of noise levels
//! with several seeds each and prints a plot-ready table. The same sweep
//! is available from the command line:
//!
//! ```bash
//! havok-detect bench calcium --sweep noise=0.05,0.1,0.2,0.3 --trials 20
//! cargo run --release -p havok-detect --example noise_sweep
//! ```

use rayon::prelude::*;

use havok_detect::detector::run_pipeline;
use havok_detect::synth::{error_ratio, gen_calcium, CalciumParams};
use havok_detect::PipelineConfig;

fn main() {
    let trials = 8u64;
    println!("noise,mean_er,std_er");
    for noise in [0.05, 0.1, 0.2, 0.3] {
        let ers: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|seed| {
                let (trace, truth) = gen_calcium(&CalciumParams {
                    noise_rms: noise,
                    seed,
                    ..CalciumParams::default()
                })
                .expect("generator parameters are valid");
                let report = run_pipeline(&trace, &PipelineConfig::default())
                    .expect("pipeline runs on generated data");
                error_ratio(&report.events, &truth, report.sector_halfwidth)
            })
            .collect();
        let mean = ers.iter().sum::<f64>() / ers.len() as f64;
        let var = ers.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / ers.len() as f64;
        println!("{noise},{mean:.4},{:.4}", var.sqrt());
    }
}
