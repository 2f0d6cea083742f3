use rand::Rng;

use crate::depth::FittedDepth;
use crate::error::{FdError, Result};
use crate::functional::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Class {
    X,
    Y,
}

/// A curve's depths with respect to the two training samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DdPoint {
    pub depth_in_x: f64,
    pub depth_in_y: f64,
    pub true_label: Class,
}

/// DD-transform of `z` against depths fitted on the two training samples.
pub fn dd_transform(z: &GridFunction, fit_x: &FittedDepth, fit_y: &FittedDepth, label: Class) -> Result<DdPoint> {
    Ok(DdPoint { depth_in_x: fit_x.depth(z)?, depth_in_y: fit_y.depth(z)?, true_label: label })
}

/// DD-transform of many curves sharing one label; evaluated in parallel.
pub fn dd_transform_all(
    zs: &[GridFunction],
    fit_x: &FittedDepth,
    fit_y: &FittedDepth,
    label: Class,
) -> Result<Vec<DdPoint>> {
    let dx = fit_x.depths(zs)?;
    let dy = fit_y.depths(zs)?;
    Ok(dx
        .into_iter()
        .zip(dy)
        .map(|(depth_in_x, depth_in_y)| DdPoint { depth_in_x, depth_in_y, true_label: label })
        .collect())
}

/// Assign class `Y` iff `depth_in_y > slope * depth_in_x`; exact ties toss a coin.
/// The max-depth rule is the special case `slope = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassifierModel {
    MaxDepth,
    LinearDd { slope: f64 },
}

impl ClassifierModel {
    pub fn slope(&self) -> f64 {
        match self {
            ClassifierModel::MaxDepth => 1.0,
            ClassifierModel::LinearDd { slope } => *slope,
        }
    }
}

pub fn classify<R: Rng + ?Sized>(model: &ClassifierModel, point: &DdPoint, rng: &mut R) -> Class {
    let score = point.depth_in_y - model.slope() * point.depth_in_x;
    if score > 0.0 {
        Class::Y
    } else if score < 0.0 {
        Class::X
    } else if rng.random::<bool>() {
        Class::Y
    } else {
        Class::X
    }
}

/// Expected training misclassifications of the rule with the given slope,
/// counting each exact tie as half an error.
pub fn expected_errors(points: &[DdPoint], slope: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let score = p.depth_in_y - slope * p.depth_in_x;
            match (score.partial_cmp(&0.0), p.true_label) {
                (Some(std::cmp::Ordering::Greater), Class::Y) | (Some(std::cmp::Ordering::Less), Class::X) => 0.0,
                (Some(std::cmp::Ordering::Equal), _) => 0.5,
                _ => 1.0,
            }
        })
        .sum()
}

/// Fit the linear DD-classifier by minimizing training misclassification.
///
/// The decision of a point with `depth_in_x > 0` changes only where the
/// slope crosses its ratio `depth_in_y / depth_in_x`, so the error is
/// constant on the open intervals between consecutive distinct positive
/// ratios, plus `(0, r_1)` and `(r_k, inf)`. The first interval with minimal
/// error wins; the slope returned is its geometric midpoint (`r_1 / 2` and
/// `2 r_k` for the unbounded ends).
pub fn fit_linear_dd(train: &[DdPoint]) -> Result<ClassifierModel> {
    let has = |c: Class| train.iter().any(|p| p.true_label == c);
    if !has(Class::X) || !has(Class::Y) {
        return Err(FdError::Structural("linear DD fit needs training points from both classes".into()));
    }
    if let Some(p) = train.iter().find(|p| !(p.depth_in_x >= 0.0 && p.depth_in_y >= 0.0)) {
        return Err(FdError::Domain(format!("invalid DD point ({}, {})", p.depth_in_x, p.depth_in_y)));
    }
    // Error for slopes just above zero: every point with a positive ratio is
    // classified Y, points on the x-axis X, points on the y-axis Y.
    let mut errors = 0.0;
    let mut ratios: Vec<(f64, Class)> = Vec::new();
    for p in train {
        if p.depth_in_x > 0.0 {
            let r = p.depth_in_y / p.depth_in_x;
            if r > 0.0 {
                ratios.push((r, p.true_label));
                errors += if p.true_label == Class::Y { 0.0 } else { 1.0 };
            } else {
                errors += if p.true_label == Class::X { 0.0 } else { 1.0 };
            }
        } else if p.depth_in_y > 0.0 {
            errors += if p.true_label == Class::Y { 0.0 } else { 1.0 };
        } else {
            errors += 0.5;
        }
    }
    if ratios.is_empty() {
        return Ok(ClassifierModel::LinearDd { slope: 1.0 });
    }
    ratios.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Interval i is (r_{i-1}, r_i) with r_0 = 0 and r_{k+1} = inf.
    let mut best_err = errors;
    let mut best_interval = (0.0, ratios[0].0);
    let mut i = 0;
    while i < ratios.len() {
        let r = ratios[i].0;
        while i < ratios.len() && ratios[i].0 == r {
            // Crossing the ratio flips this point from Y to X.
            errors += if ratios[i].1 == Class::X { -1.0 } else { 1.0 };
            i += 1;
        }
        let upper = ratios.get(i).map_or(f64::INFINITY, |p| p.0);
        if errors < best_err {
            best_err = errors;
            best_interval = (r, upper);
        }
    }
    let slope = match best_interval {
        (lo, hi) if lo == 0.0 => hi / 2.0,
        (lo, hi) if hi.is_infinite() => 2.0 * lo,
        (lo, hi) => (lo * hi).sqrt(),
    };
    Ok(ClassifierModel::LinearDd { slope })
}

/// Fraction of `points` misclassified by `model`.
pub fn misclassification_rate<R: Rng + ?Sized>(model: &ClassifierModel, points: &[DdPoint], rng: &mut R) -> f64 {
    let wrong = points.iter().filter(|p| classify(model, p, rng) != p.true_label).count();
    wrong as f64 / points.len() as f64
}
