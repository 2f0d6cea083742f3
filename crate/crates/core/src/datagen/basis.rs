//! Basis systems on a grid: discrete-orthonormal Legendre polynomials, clamped
//! cubic B-splines, trigonometric functions, and Gram-Schmidt.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::error::{FdError, Result};
use crate::functional::{inner_product, Grid, GridFunction};

/// Largest tolerated deviation of a trigonometric Gram matrix from the
/// identity. Sampling both endpoints of [0, 1] duplicates one period point,
/// which perturbs the discrete inner products by up to `2/T` (about 0.0198 at
/// `T = 101`).
pub const TRIG_GRAM_TOLERANCE: f64 = 0.025;

/// Classical sequential Gram-Schmidt in the discrete inner product.
///
/// Each function is projected out twice ("twice is enough"), which keeps the
/// output orthonormal to rounding level even for nearly dependent inputs.
pub fn gram_schmidt(functions: &[GridFunction]) -> Result<Vec<GridFunction>> {
    let mut out: Vec<GridFunction> = Vec::with_capacity(functions.len());
    for (k, f) in functions.iter().enumerate() {
        let mut residual = f.clone();
        for _ in 0..2 {
            let source = residual.clone();
            for q in &out {
                let c = inner_product(&source, q)?;
                residual = residual.add_scaled(-c, q)?;
            }
        }
        let norm = residual.norm();
        if norm < 1e-10 {
            return Err(FdError::Numerical(format!(
                "function {} is numerically dependent on its predecessors (residual norm {norm:.3e})",
                k + 1
            )));
        }
        out.push(residual.scale(1.0 / norm));
    }
    Ok(out)
}

/// Maximum absolute deviation of the discrete Gram matrix from the identity.
pub fn gram_deviation(functions: &[GridFunction]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, a) in functions.iter().enumerate() {
        for (j, b) in functions.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((inner_product(a, b)? - target).abs());
        }
    }
    Ok(worst)
}

/// The first `count` shifted Legendre polynomials, orthonormalized on the grid.
/// `phi_1` is the constant 1 and `phi_k` has degree `k - 1`.
pub fn legendre_basis(grid: &Arc<Grid>, count: usize) -> Result<Vec<GridFunction>> {
    if count == 0 || count > 10 {
        return Err(FdError::Domain(format!("Legendre basis supports 1..=10 functions, got {count}")));
    }
    let raw: Vec<GridFunction> =
        (0..count).map(|degree| GridFunction::from_fn(grid, |t| shifted_legendre(degree, t))).collect();
    // Two passes keep the discrete Gram matrix at the identity to ~1e-15.
    gram_schmidt(&gram_schmidt(&raw)?)
}

/// `P_degree(2t - 1)` by the three-term recurrence.
fn shifted_legendre(degree: usize, t: f64) -> f64 {
    let x = 2.0 * t - 1.0;
    let (mut prev, mut cur) = (1.0, x);
    if degree == 0 {
        return prev;
    }
    for k in 1..degree {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Clamped B-spline basis with `n_knots` equispaced distinct knots on [0, 1]
/// and the given degree: `n_knots + degree - 1` functions, boundary knots of
/// multiplicity `degree + 1`, evaluated by the Cox-de Boor recursion.
///
/// With 21 knots and degree 3, function `k` (1-based) is supported on
/// `[(k - 4)/20, k/20]` intersected with [0, 1].
pub fn bspline_basis(grid: &Arc<Grid>, n_knots: usize, degree: usize) -> Result<Vec<GridFunction>> {
    if n_knots < 2 {
        return Err(FdError::Domain("a B-spline basis needs at least two knots".into()));
    }
    let knots = clamped_knots(n_knots, degree);
    let count = n_knots + degree - 1;
    Ok((0..count).map(|i| GridFunction::from_fn(grid, |t| bspline_value(&knots, degree, i, t))).collect())
}

fn clamped_knots(n_knots: usize, degree: usize) -> Vec<f64> {
    let interior = (0..n_knots).map(|j| j as f64 / (n_knots - 1) as f64);
    std::iter::repeat_n(0.0, degree).chain(interior).chain(std::iter::repeat_n(1.0, degree)).collect()
}

/// Value at `t` of the `i`-th (0-based) B-spline of the given degree.
fn bspline_value(knots: &[f64], degree: usize, i: usize, t: f64) -> f64 {
    // Half-open spans [k_j, k_{j+1}); the right end of the domain belongs to
    // the last nonempty span so that the basis sums to one at t = 1.
    let last = knots[knots.len() - 1];
    let span_contains = |j: usize| {
        let (a, b) = (knots[j], knots[j + 1]);
        if t == last {
            a < b && b == last
        } else {
            a <= t && t < b
        }
    };
    let mut basis: Vec<f64> = (0..=degree).map(|j| if span_contains(i + j) { 1.0 } else { 0.0 }).collect();
    for p in 1..=degree {
        for j in 0..=(degree - p) {
            let k = i + j;
            let left = {
                let den = knots[k + p] - knots[k];
                if den > 0.0 {
                    (t - knots[k]) / den * basis[j]
                } else {
                    0.0
                }
            };
            let right = {
                let den = knots[k + p + 1] - knots[k + 1];
                if den > 0.0 {
                    (knots[k + p + 1] - t) / den * basis[j + 1]
                } else {
                    0.0
                }
            };
            basis[j] = left + right;
        }
    }
    basis[0]
}

/// `1, sqrt2 sin(2 pi t), sqrt2 cos(2 pi t), sqrt2 sin(4 pi t), ...`
pub fn trig_basis(grid: &Arc<Grid>, count: usize) -> Result<Vec<GridFunction>> {
    if count == 0 {
        return Err(FdError::Domain("trigonometric basis needs at least one function".into()));
    }
    let basis: Vec<GridFunction> = (1..=count).map(|k| GridFunction::from_fn(grid, |t| trig_function(k, t))).collect();
    let deviation = gram_deviation(&basis)?;
    if deviation > TRIG_GRAM_TOLERANCE {
        return Err(FdError::Domain(format!(
            "{count} trigonometric functions alias on a {}-point grid (Gram deviation {deviation:.3e})",
            grid.len()
        )));
    }
    Ok(basis)
}

/// The `k`-th (1-based) trigonometric function.
pub fn trig_function(k: usize, t: f64) -> f64 {
    if k == 1 {
        return 1.0;
    }
    let m = (k / 2) as f64;
    if k.is_multiple_of(2) {
        SQRT_2 * (2.0 * m * PI * t).sin()
    } else {
        SQRT_2 * (2.0 * m * PI * t).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_properties() {
        let g = Grid::uniform(101).unwrap();
        let phi = legendre_basis(&g, 7).unwrap();
        assert!(phi[0].values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert!(phi[1].values()[50].abs() < 1e-12);
        assert!(inner_product(&phi[1], &phi[2]).unwrap().abs() < 1e-8);
        assert!(gram_deviation(&phi).unwrap() < 1e-8);
        assert!(legendre_basis(&g, 11).is_err());
    }

    #[test]
    fn legendre_degrees_via_finite_differences() {
        // The (d+1)-th forward difference of a degree-d polynomial vanishes.
        let g = Grid::uniform(41).unwrap();
        let phi = legendre_basis(&g, 6).unwrap();
        for (k, f) in phi.iter().enumerate() {
            let mut v = f.values().to_vec();
            for _ in 0..=k {
                v = v.windows(2).map(|w| w[1] - w[0]).collect();
            }
            assert!(v.iter().all(|d| d.abs() < 1e-6), "phi_{} not of degree {k}", k + 1);
        }
    }

    #[test]
    fn bspline_partition_of_unity_and_support() {
        let g = Grid::uniform(101).unwrap();
        let b = bspline_basis(&g, 21, 3).unwrap();
        assert_eq!(b.len(), 23);
        for k in 0..101 {
            let s: f64 = b.iter().map(|f| f.values()[k]).sum();
            assert!((s - 1.0).abs() < 1e-10, "sum {s} at point {k}");
        }
        let knots = clamped_knots(21, 3);
        let total: f64 = (0..23).map(|i| bspline_value(&knots, 3, i, 0.37)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(b[0].values()[0], 1.0);
        assert_eq!(b[0].values()[100], 0.0);
        assert_eq!(b[22].values()[100], 1.0);
        // B_11 lives on [7/20, 11/20].
        for (k, &t) in g.points().iter().enumerate() {
            let v = b[10].values()[k];
            if t <= 0.35 || t >= 0.55 {
                assert!(v.abs() < 1e-14, "B_11({t}) = {v}");
            } else {
                assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn bspline_matches_closed_form_uniform_cubic() {
        // Interior cubic B-spline on uniform knots h = 1/20 starting at 7/20.
        let knots = clamped_knots(21, 3);
        let h = 0.05;
        let reference = |t: f64| {
            let s = (t - 0.35) / h;
            match s {
                s if (0.0..1.0).contains(&s) => s.powi(3) / 6.0,
                s if (1.0..2.0).contains(&s) => (-3.0 * s.powi(3) + 12.0 * s * s - 12.0 * s + 4.0) / 6.0,
                s if (2.0..3.0).contains(&s) => (3.0 * s.powi(3) - 24.0 * s * s + 60.0 * s - 44.0) / 6.0,
                s if (3.0..4.0).contains(&s) => (4.0 - s).powi(3) / 6.0,
                _ => 0.0,
            }
        };
        for k in 0..=400 {
            let t = k as f64 / 400.0;
            assert!((bspline_value(&knots, 3, 10, t) - reference(t)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn trig_properties() {
        let g = Grid::uniform(101).unwrap();
        let phi = trig_basis(&g, 21).unwrap();
        assert!(phi[0].values().iter().all(|&v| v == 1.0));
        assert!((phi[1].values()[25] - SQRT_2).abs() < 1e-12);
        for (k, &t) in g.points().iter().enumerate() {
            assert!((phi[20].values()[k] - SQRT_2 * (20.0 * PI * t).cos()).abs() < 1e-12);
        }
        assert!(gram_deviation(&phi).unwrap() <= 2.0 / 101.0 + 1e-9);
        assert!(trig_basis(&Grid::uniform(11).unwrap(), 12).is_err());
    }

    #[test]
    fn gram_schmidt_examples() {
        let g = Grid::uniform(201).unwrap();
        let one = GridFunction::constant(&g, 1.0);
        let t = GridFunction::from_fn(&g, |s| s);
        let q = gram_schmidt(&[one.clone(), t]).unwrap();
        // {1, t} -> {1, sqrt3 (2t - 1)} up to the discretization of the norm.
        for (k, &s) in g.points().iter().enumerate() {
            assert!((q[1].values()[k] - 3f64.sqrt() * (2.0 * s - 1.0)).abs() < 0.02);
        }
        assert!(gram_deviation(&q).unwrap() < 1e-10);

        let ortho = legendre_basis(&g, 4).unwrap();
        let again = gram_schmidt(&ortho).unwrap();
        for (a, b) in ortho.iter().zip(&again) {
            assert!(a.values().iter().zip(b.values()).all(|(x, y)| (x - y).abs() < 1e-12));
        }
        assert!(matches!(gram_schmidt(&[one.clone(), one.scale(2.0)]), Err(FdError::Numerical(_))));
    }
}
