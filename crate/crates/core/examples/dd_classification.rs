//! Max-depth and linear DD classification of model C3 (shape difference in
//! the coefficient covariance).
//!
//! `cargo run --release --example dd_classification`

use fdepth::datagen::{ModelGenerator, ModelId, ModelParams};
use fdepth::depth::{DepthConfig, DepthMethod, FittedDepth};
use fdepth::functional::FunctionalSample;
use fdepth::tasks::classify::{dd_transform_all, misclassification_rate};
use fdepth::tasks::{fit_linear_dd, Class, ClassifierModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn split(sample: &FunctionalSample, labels: &[bool]) -> fdepth::Result<(FunctionalSample, FunctionalSample)> {
    let pick = |want: bool| {
        sample.curves().iter().zip(labels).filter(|(_, &l)| l == want).map(|(c, _)| c.clone()).collect::<Vec<_>>()
    };
    Ok((FunctionalSample::new(pick(false))?, FunctionalSample::new(pick(true))?))
}

fn main() -> fdepth::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let train =
        ModelGenerator::new(ModelId::C3, ModelParams { n: 200, ..ModelParams::default() })?.generate(&mut rng)?;
    let test =
        ModelGenerator::new(ModelId::C3, ModelParams { n: 400, ..ModelParams::default() })?.generate(&mut rng)?;
    let (train_x, train_y) = split(&train.sample, &train.labels)?;
    let (test_x, test_y) = split(&test.sample, &test.labels)?;

    for method in [DepthMethod::Rpd { u: 0.001 }, DepthMethod::Mbd, DepthMethod::Fd] {
        let fx = FittedDepth::fit(&train_x, method, &DepthConfig { seed: 1, ..DepthConfig::default() })?;
        let fy = FittedDepth::fit(&train_y, method, &DepthConfig { seed: 2, ..DepthConfig::default() })?;
        let mut fit_points = dd_transform_all(train_x.curves(), &fx, &fy, Class::X)?;
        fit_points.extend(dd_transform_all(train_y.curves(), &fx, &fy, Class::Y)?);
        let mut points = dd_transform_all(test_x.curves(), &fx, &fy, Class::X)?;
        points.extend(dd_transform_all(test_y.curves(), &fx, &fy, Class::Y)?);

        let linear = fit_linear_dd(&fit_points)?;
        let max_err = misclassification_rate(&ClassifierModel::MaxDepth, &points, &mut rng);
        let dd_err = misclassification_rate(&linear, &points, &mut rng);
        println!(
            "{:>10}  max-depth {max_err:.3}   linear DD {dd_err:.3} (slope {:.3})",
            method.to_string(),
            linear.slope()
        );
    }
    Ok(())
}
