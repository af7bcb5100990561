//! Gauss-Hermite nodes and weights (Golub-Welsch).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes `t_i` and weights `w_i` with `sum_i w_i f(t_i) ~ int e^{-t^2} f(t) dt`,
/// sorted by node.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    // Jacobi matrix of the physicists' Hermite recurrence
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mu0 = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], mu0 * eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize away eigensolver roundoff
    let m = pairs.len();
    for k in 0..m / 2 {
        let t = 0.5 * (pairs[m - 1 - k].0 - pairs[k].0);
        let w = 0.5 * (pairs[m - 1 - k].1 + pairs[k].1);
        pairs[k] = (-t, w);
        pairs[m - 1 - k] = (t, w);
    }
    if m % 2 == 1 {
        pairs[m / 2].0 = 0.0;
    }
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_gaussian_moments() {
        let (t, w) = gauss_hermite(40).unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let m0: f64 = w.iter().sum();
        let m2: f64 = t.iter().zip(&w).map(|(t, w)| w * t * t).sum();
        let m4: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(4)).sum();
        assert!((m0 - sqrt_pi).abs() < 1e-13);
        assert!((m2 - sqrt_pi / 2.0).abs() < 1e-13);
        assert!((m4 - 3.0 * sqrt_pi / 4.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_transform() {
        // int e^{-t^2} cos(2t) dt = sqrt(pi) e^{-1}
        let (t, w) = gauss_hermite(64).unwrap();
        let got: f64 = t.iter().zip(&w).map(|(t, w)| w * (2.0 * t).cos()).sum();
        assert!((got - std::f64::consts::PI.sqrt() * (-1.0f64).exp()).abs() < 1e-13);
    }
}
