//! Deepest-curve location estimates under contamination (model L4), scored by
//! ISB, IVAR and MISE against the clean mean sin(2 pi t).
//!
//! `cargo run --release --example location_estimation`

use fdepth::datagen::{ModelGenerator, ModelId, ModelParams};
use fdepth::depth::{depth_sample, DepthConfig, DepthMethod};
use fdepth::tasks::{deepest_curve, location_metrics};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fdepth::Result<()> {
    let replications = 40;
    let gen = ModelGenerator::new(ModelId::L4, ModelParams { n: 100, epsilon: 0.1, ..ModelParams::default() })?;
    let mu = gen.clean_mean().expect("location models have a known mean");
    let methods = [DepthMethod::Rpd { u: 0.1 }, DepthMethod::Rpd { u: 0.5 }, DepthMethod::Fd, DepthMethod::Mbd];

    println!("model L4, eps = 0.1, R = {replications}; values x 1e3");
    println!("{:>10} {:>8} {:>8} {:>8}", "method", "ISB", "IVAR", "MISE");
    for method in methods {
        let mut estimates = Vec::with_capacity(replications);
        for r in 0..replications {
            let data = gen.generate(&mut ChaCha8Rng::seed_from_u64(r as u64))?;
            let config = DepthConfig { seed: 100 + r as u64, ..DepthConfig::default() };
            let depths = depth_sample(&data.sample, method, &config)?;
            estimates.push(deepest_curve(data.sample.curves(), &depths.values)?.clone());
        }
        let m = location_metrics(&estimates, &mu)?;
        println!("{:>10} {:8.3} {:8.3} {:8.3}", method.to_string(), 1e3 * m.isb, 1e3 * m.ivar, 1e3 * m.mise);
    }
    Ok(())
}
