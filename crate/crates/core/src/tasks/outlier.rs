use crate::error::{FdError, Result};

/// Normalized depth ranks: `rank / n`, rank 1 being the least deep curve.
///
/// Ties keep input order, so the rank is invariant under any strictly
/// increasing transform of the depths.
pub fn rank_by_depth(depths: &[f64]) -> Vec<f64> {
    let n = depths.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| depths[a].total_cmp(&depths[b]));
    let mut ranks = vec![0.0; n];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = (r + 1) as f64 / n as f64;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub depth_ranks: Vec<f64>,
    /// Mean normalized rank of the curves flagged as true outliers.
    pub mean_outlier_rank: f64,
}

impl OutlierReport {
    pub fn new(depths: &[f64], is_outlier: &[bool]) -> Result<Self> {
        if depths.is_empty() {
            return Err(FdError::Structural("cannot rank an empty depth vector".into()));
        }
        if depths.len() != is_outlier.len() {
            return Err(FdError::Structural(format!(
                "{} depths but {} outlier labels",
                depths.len(),
                is_outlier.len()
            )));
        }
        let depth_ranks = rank_by_depth(depths);
        let (sum, count) =
            depth_ranks.iter().zip(is_outlier).filter(|(_, &o)| o).fold((0.0, 0usize), |(s, c), (r, _)| (s + r, c + 1));
        if count == 0 {
            return Err(FdError::Structural("no outliers to rank".into()));
        }
        Ok(OutlierReport { depth_ranks, mean_outlier_rank: sum / count as f64 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ranks_follow_depth_order() {
        assert_eq!(rank_by_depth(&[0.1, 0.5, 0.3]), vec![1.0 / 3.0, 1.0, 2.0 / 3.0]);
        assert_eq!(rank_by_depth(&[0.2; 4]), vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn ideal_detector() {
        let mut depths: Vec<f64> = (0..500).map(|i| 0.5 + i as f64 / 1000.0).collect();
        let mut labels = vec![false; 500];
        for i in 0..50 {
            depths[i * 10] = 0.01 + i as f64 * 1e-4;
            labels[i * 10] = true;
        }
        let report = OutlierReport::new(&depths, &labels).unwrap();
        assert!((report.mean_outlier_rank - 0.051).abs() < 1e-12);
    }

    #[test]
    fn all_outliers() {
        let n = 7;
        let report = OutlierReport::new(&[0.3, 0.1, 0.9, 0.5, 0.2, 0.4, 0.8], &vec![true; n]).unwrap();
        assert!((report.mean_outlier_rank - (1.0 + n as f64) / (2.0 * n as f64)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn invariant_under_increasing_transforms(d in prop::collection::vec(0.0f64..1.0, 1..40)) {
            let transformed: Vec<f64> = d.iter().map(|x| (3.0 * x).exp() - 7.0).collect();
            prop_assert_eq!(rank_by_depth(&d), rank_by_depth(&transformed));
            let mut sorted = rank_by_depth(&d);
            sorted.sort_by(f64::total_cmp);
            let expected: Vec<f64> = (1..=d.len()).map(|r| r as f64 / d.len() as f64).collect();
            prop_assert_eq!(sorted, expected);
        }
    }
}
