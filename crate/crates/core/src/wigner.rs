//! Wigner function on a phase-space grid via displaced parity.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{displacement_block, FockState, StateRepr, C64};

pub const MAX_GRID: usize = 512;

/// `W(x, p) = Tr[D(alpha) Pi D(alpha)^dagger rho] / pi` with
/// `alpha = (x + i p) / sqrt 2`; rows follow `xs`, columns `ps`.
pub fn wigner_grid(state: &FockState, xs: &[f64], ps: &[f64]) -> Result<DMatrix<f64>> {
    if xs.len() > MAX_GRID || ps.len() > MAX_GRID {
        return Err(Error::InvalidArgument(format!(
            "grid {}x{} exceeds {MAX_GRID}x{MAX_GRID}",
            xs.len(),
            ps.len()
        )));
    }
    let dim = state.dim();
    let rho = match state.repr() {
        StateRepr::Mixed(r) => Some(r),
        StateRepr::Pure(_) => None,
    };
    let point = |x: f64, p: f64| -> f64 {
        let alpha = C64::new(x, p) / std::f64::consts::SQRT_2;
        // the displaced state needs rows beyond the input truncation
        let rows = ((dim as f64).sqrt() + alpha.norm() + 8.0).powi(2).ceil() as usize;
        let rows = rows.max(dim);
        // D(alpha)^dagger = D(-alpha)
        let d = displacement_block(-alpha, rows, dim);
        let par = |n: usize| if n % 2 == 0 { 1.0 } else { -1.0 };
        let w = match (state.amplitudes(), rho) {
            (Some(v), _) => {
                let u = &d * v;
                u.iter().enumerate().map(|(n, z)| par(n) * z.norm_sqr()).sum::<f64>()
            }
            (None, Some(r)) => {
                let m = &d * r * d.adjoint();
                (0..rows).map(|n| par(n) * m[(n, n)].re).sum()
            }
            (None, None) => unreachable!(),
        };
        w / std::f64::consts::PI
    };
    let vals: Vec<f64> = (0..xs.len() * ps.len())
        .into_par_iter()
        .map(|k| point(xs[k / ps.len()], ps[k % ps.len()]))
        .collect();
    Ok(DMatrix::from_row_slice(xs.len(), ps.len(), &vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, half: f64) -> Vec<f64> {
        (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn vacuum_peak_and_normalization() {
        let xs = grid(61, 6.0);
        let w = wigner_grid(&FockState::vacuum(20).unwrap(), &xs, &xs).unwrap();
        let (r, c) = w.iamax_full();
        assert_eq!((r, c), (30, 30));
        assert!((w[(30, 30)] - 1.0 / std::f64::consts::PI).abs() < 1e-12);
        let h = xs[1] - xs[0];
        let total = w.sum() * h * h;
        assert!((total - 1.0).abs() < 0.01, "{total}");
    }

    #[test]
    fn odd_state_negative_at_origin() {
        let s = FockState::basis(1, 10).unwrap().to_mixed();
        let w = wigner_grid(&s, &[0.0], &[0.0]).unwrap();
        assert!((w[(0, 0)] + 1.0 / std::f64::consts::PI).abs() < 1e-12);
        assert!(wigner_grid(&s, &vec![0.0; 513], &[0.0]).is_err());
    }
}
