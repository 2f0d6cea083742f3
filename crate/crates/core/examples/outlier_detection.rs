//! Rank a contaminated sample from model D5 (high-frequency outliers) by
//! several depths and report where the true outliers end up.
//!
//! `cargo run --release --example outlier_detection`

use fdepth::datagen::{generate_model, ModelId, ModelParams};
use fdepth::depth::{depth_sample, DepthConfig, DepthMethod};
use fdepth::tasks::OutlierReport;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fdepth::Result<()> {
    let params = ModelParams { n: 200, outliers: 20, ..ModelParams::default() };
    let data = generate_model(ModelId::D5, &params, &mut ChaCha8Rng::seed_from_u64(11))?;
    let config = DepthConfig { seed: 3, ..DepthConfig::default() };

    println!("model D5, n = {}, m = {} (ideal mean rank {:.3})", params.n, params.outliers, 21.0 / 400.0);
    for method in ["rpd:0.001", "rpd:0.1", "fd", "mbd", "id", "sd"] {
        let method: DepthMethod = method.parse()?;
        let depths = depth_sample(&data.sample, method, &config)?;
        let report = OutlierReport::new(&depths.values, &data.labels)?;
        println!("{:>10}  mean outlier rank {:.3}", method.to_string(), report.mean_outlier_rank);
    }
    Ok(())
}
