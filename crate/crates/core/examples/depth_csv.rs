//! Read curves from a dataset CSV, attach depth columns, and write it back.
//! This is what `fdepth depth` does; here the library is used directly.
//!
//! `cargo run --release --example depth_csv [input.csv]`

use fdepth::datagen::{generate_model, ModelId, ModelParams};
use fdepth::depth::{depth_sample, DepthConfig, DepthMethod};
use fdepth::experiment::{write_dataset, Dataset};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fdepth::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => {
            // No input given: simulate a small D1 sample with labelled outliers.
            let params = ModelParams { n: 12, grid_len: 6, outliers: 2, ..ModelParams::default() };
            let data = generate_model(ModelId::D1, &params, &mut ChaCha8Rng::seed_from_u64(4))?;
            let labels: Vec<String> = data.labels.iter().map(|&o| if o { "outlier" } else { "clean" }.into()).collect();
            write_dataset(&data.sample, Some(&labels))
        }
    };
    let dataset = Dataset::parse(&text)?;
    let methods = [DepthMethod::Fd, DepthMethod::Mbd, DepthMethod::Rpd { u: 0.1 }];
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for m in methods {
        names.push(format!("depth_{m}"));
        columns.push(depth_sample(&dataset.sample, m, &DepthConfig::default())?.values);
    }
    print!("{}", dataset.with_columns(&names, &columns));
    Ok(())
}
