//! Small dense-vector helpers, one-dimensional searches and a couple of
//! quadratic solves.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a += s * b`
pub fn axpy(a: &mut [f64], s: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += s * y;
    }
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Stops once the bracket is narrower than `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    // endpoints can win when the minimum sits on the boundary
    [lo, mid, hi]
        .into_iter()
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(mid)
}

/// Finds `t` in `[lo, hi]` with `g(t) = 0` for a nonincreasing `g`, by
/// bisection down to `tol`. Returns the upper end of the final bracket.
pub fn bisect_decreasing<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Minimizes `½ wᵀA w − bᵀw` over `‖w‖₂ ≤ radius` for symmetric PSD `A`.
///
/// Works in the eigenbasis of `A`: the unconstrained (minimum-norm) solution
/// is returned when it fits, otherwise `w(μ) = (A + μI)⁻¹ b` with `μ > 0`
/// chosen by bisection so that `‖w(μ)‖ = radius`.
pub fn ball_least_squares(a: &DMatrix<f64>, b: &DVector<f64>, radius: f64) -> Vec<f64> {
    let eig = SymmetricEigen::new(a.clone());
    let c = eig.eigenvectors.transpose() * b;
    let lam = &eig.eigenvalues;
    let scale = lam.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let zero = 1e-12 * scale;
    let coords = |mu: f64| -> Vec<f64> {
        c.iter()
            .zip(lam.iter())
            .map(|(&ck, &lk)| {
                let denom = lk.max(0.0) + mu;
                if mu == 0.0 && denom <= zero {
                    0.0
                } else {
                    ck / denom
                }
            })
            .collect()
    };
    let to_primal = |z: Vec<f64>| -> Vec<f64> {
        (&eig.eigenvectors * DVector::from_vec(z)).iter().copied().collect()
    };
    let null_mass = c
        .iter()
        .zip(lam.iter())
        .any(|(&ck, &lk)| lk <= zero && ck.abs() > 1e-12 * (1.0 + b.norm()));
    if !null_mass {
        let z = coords(0.0);
        if norm2(&z) <= radius {
            return to_primal(z);
        }
    }
    let hi = (b.norm() / radius).max(f64::MIN_POSITIVE);
    let mu = bisect_decreasing(|mu| norm2(&coords(mu)) - radius, 0.0, hi, 1e-15);
    to_primal(coords(mu))
}

/// Solves `(A + λI) w = b` for symmetric PSD `A` and `λ > 0`.
pub fn ridge_solve(a: &DMatrix<f64>, b: &DVector<f64>, lambda: f64) -> Vec<f64> {
    let n = a.nrows();
    let shifted = a + DMatrix::identity(n, n) * lambda;
    match shifted.clone().cholesky() {
        Some(ch) => ch.solve(b).iter().copied().collect(),
        None => {
            let eig = SymmetricEigen::new(shifted);
            let c = eig.eigenvectors.transpose() * b;
            let z = c.component_div(&eig.eigenvalues.map(|x| x.max(lambda)));
            (&eig.eigenvectors * z).iter().copied().collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let x = golden_section(|t| (t - 0.3).powi(2), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        let edge = golden_section(|t| t, -1.0, 1.0, 1e-12);
        assert_eq!(edge, -1.0);
    }

    #[test]
    fn bisection_root() {
        let r = bisect_decreasing(|t| 2.0 - t * t, 0.0, 4.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ball_least_squares_cases() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        // interior solution
        let w = ball_least_squares(&a, &DVector::from_vec(vec![1.0, 0.5]), 10.0);
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        // boundary: unconstrained (2, 0) clipped to radius 1 along e₁
        let w = ball_least_squares(&a, &DVector::from_vec(vec![4.0, 0.0]), 1.0);
        assert!((w[0] - 1.0).abs() < 1e-12 && w[1].abs() < 1e-12);
        // singular with mass in the null space: must land on the sphere
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let w = ball_least_squares(&s, &DVector::from_vec(vec![0.0, 1.0]), 2.0);
        assert!((norm2(&w) - 2.0).abs() < 1e-9 && (w[1] - 2.0).abs() < 1e-9);
        // singular, consistent: minimum-norm solution
        let w = ball_least_squares(&s, &DVector::from_vec(vec![0.3, 0.0]), 2.0);
        assert!((w[0] - 0.3).abs() < 1e-12 && w[1].abs() < 1e-12);
    }

    #[test]
    fn ridge_matches_hand_solution() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let w = ridge_solve(&a, &DVector::from_vec(vec![1.0, 1.0]), 1.0);
        // (A + I)⁻¹(1,1) = (1/3, 1/3)
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-12 && (w[1] - 1.0 / 3.0).abs() < 1e-12);
    }
}
