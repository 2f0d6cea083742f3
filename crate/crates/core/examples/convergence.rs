//! Random RPD as a function of the number of directions M, for a central and
//! a peripheral curve relative to a Gaussian reference sample.
//!
//! `cargo run --release --example convergence`

use fdepth::depth::{DepthConfig, DirectionPool};
use fdepth::experiment::runners::{convergence_sample, convergence_targets};

fn main() -> fdepth::Result<()> {
    let sample = convergence_sample(50, 51, 2024, 0)?;
    let [central, peripheral] = convergence_targets(51)?;
    let checkpoints = [10, 100, 1_000, 10_000, 50_000];
    let config = DepthConfig { u: 0.1, pool_directions: 50_000, seed: 9, ..DepthConfig::default() };
    let pool = DirectionPool::build(&sample, &config)?;
    println!("beta_hat = {:.4}, acceptance rate = {:.3}", pool.beta_hat(), pool.acceptance_rate());

    let c = pool.depth_trace(&central, &checkpoints)?;
    let p = pool.depth_trace(&peripheral, &checkpoints)?;
    println!("{:>8} {:>10} {:>10}", "M", "central", "peripheral");
    for ((m, c), p) in checkpoints.iter().zip(&c).zip(&p) {
        println!("{m:>8} {c:>10.4} {p:>10.4}");
    }
    Ok(())
}
