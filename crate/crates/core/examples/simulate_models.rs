//! Draw one sample from every simulation model and summarize it.
//!
//! `cargo run --release --example simulate_models`

use fdepth::datagen::{ModelFamily, ModelGenerator, ModelId, ModelParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fdepth::Result<()> {
    println!("{:<5} {:<15} {:>5} {:>9} {:>10} {:>10}", "model", "family", "n", "positive", "mean L2", "max |x|");
    for id in ModelId::ALL {
        let params = match id.family() {
            ModelFamily::Outlier => ModelParams { n: 100, outliers: 10, ..ModelParams::default() },
            ModelFamily::Classification => ModelParams { n: 50, ..ModelParams::default() },
            ModelFamily::TwoSample => ModelParams { n: 50, severity: 0.5, ..ModelParams::default() },
            ModelFamily::Contamination => ModelParams { n: 100, epsilon: 0.1, ..ModelParams::default() },
        };
        let data = ModelGenerator::new(id, params)?.generate(&mut ChaCha8Rng::seed_from_u64(1))?;
        let curves = data.sample.curves();
        let mean_norm = curves.iter().map(|c| c.norm()).sum::<f64>() / curves.len() as f64;
        let max_abs = curves.iter().flat_map(|c| c.values()).fold(0.0f64, |m, v| m.max(v.abs()));
        println!(
            "{:<5} {:<15} {:>5} {:>9} {:>10.3} {:>10.3}",
            id.to_string(),
            format!("{:?}", id.family()),
            curves.len(),
            data.positives(),
            mean_norm,
            max_abs
        );
    }
    Ok(())
}
