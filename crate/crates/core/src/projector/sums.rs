use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::fock::{displacement_block, C64};
use crate::quadrature::gauss_hermite;

use super::spec::TAIL_TOL;

/// `e^{-dz}`.
pub fn q_analytic_sc(dz: f64) -> f64 {
    (-dz).exp()
}

/// `1 / s`.
pub fn q_analytic_gkp(s: f64) -> f64 {
    1.0 / s
}

/// Smallest cutoff whose Gaussian weight `exp(-(step L / gamma)^2)` is below
/// `tail_tol`.
pub fn lattice_cutoff(step: f64, gamma: f64, tail_tol: f64) -> usize {
    if gamma == 0.0 {
        return 0;
    }
    ((gamma / step) * (-tail_tol.ln()).sqrt()).floor() as usize + 1
}

// sum_{l,l'} w_l w_l' exp(-c (l + l')^2) / (sum_l w_l)^2 over |l| <= cutoff,
// w_l = exp(-(step l / gamma)^2).
fn overlap_double_sum(step: f64, gamma: f64, c: f64, cutoff: usize) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let w = |l: i64| (-(step * l as f64 / gamma).powi(2)).exp();
    let edge = w(cutoff as i64);
    if edge >= TAIL_TOL {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} leaves edge weight {edge:.2e} above {TAIL_TOL:.0e}"
        )));
    }
    let k = cutoff as i64;
    let ws: Vec<f64> = (-k..=k).map(w).collect();
    let norm: f64 = ws.iter().sum();
    let mut acc = 0.0;
    for (i, a) in ws.iter().enumerate() {
        for (j, b) in ws.iter().enumerate() {
            let s = (i + j) as f64 - 2.0 * k as f64;
            acc += a * b * (-c * s * s).exp();
        }
    }
    Ok(acc / (norm * norm))
}

/// Lattice double sum for the SC projection probability of `|xi, z>`.
pub fn q_sum_sc(xi: f64, gamma: f64, z: f64, cutoff: usize) -> Result<f64> {
    check_finite("z", z)?;
    let step = PI / (2.0 * xi);
    overlap_double_sum(step, gamma, 0.5 * (-2.0 * z).exp() * step * step, cutoff)
}

/// Lattice sum for the GKP projection probability with per-quadrature widths.
pub fn q_sum_gkp_rect(
    xi: f64,
    gamma1: f64,
    gamma2: f64,
    delta_sq: f64,
    cutoffs: (usize, usize),
) -> Result<f64> {
    check_finite("delta_sq", delta_sq)?;
    let (s1, s2) = (2.0 * xi, PI / xi);
    let f1 = overlap_double_sum(s1, gamma1, 0.5 * delta_sq * s1 * s1, cutoffs.0)?;
    let f2 = overlap_double_sum(s2, gamma2, 0.5 * delta_sq * s2 * s2, cutoffs.1)?;
    Ok(f1 * f2)
}

/// Square-shaped lattice sum with a common width `gamma0`.
pub fn q_sum_gkp(xi: f64, gamma0: f64, delta_sq: f64, cutoff: usize) -> Result<f64> {
    q_sum_gkp_rect(xi, gamma0, gamma0, delta_sq, (cutoff, cutoff))
}

/// Integral-replacement validity for SC projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Validity {
    /// `e^{2z} >= (pi / 2 xi)^2`
    pub cond1: bool,
    pub cond1_margin: f64,
    /// `dz >= e^{-2z} (pi / 2 xi)^2 / 2`
    pub cond2: bool,
    pub cond2_margin: f64,
}

pub fn validity(xi: f64, z: f64, dz: f64) -> Validity {
    let step_sq = (PI / (2.0 * xi)).powi(2);
    let m1 = (2.0 * z).exp() / step_sq;
    let m2 = dz / (0.5 * (-2.0 * z).exp() * step_sq);
    Validity {
        cond1: m1 >= 1.0,
        cond1_margin: m1,
        cond2: m2 >= 1.0,
        cond2_margin: m2,
    }
}

/// `s >= 1 + 2 xi delta_sq` for GKP; returns `(holds, margin)`.
pub fn gkp_validity(xi: f64, delta_sq: f64, s: f64) -> (bool, f64) {
    let m = (s - 1.0) / (2.0 * xi * delta_sq);
    (m >= 1.0, m)
}

/// `e^{-delta_sq a^dagger a}` on the first `dim` levels from the Gaussian
/// displacement integral
/// `1/(pi (1 - e^{-delta_sq})) int exp(-|alpha|^2 / (2 tanh(delta_sq/2))) D(alpha)`,
/// evaluated with a tensor Gauss-Hermite rule of `nodes^2` points.
pub fn envelope_by_displacements(delta_sq: f64, dim: usize, nodes: usize) -> Result<DMatrix<C64>> {
    check_dim(dim)?;
    if !(delta_sq > 0.0) {
        return Err(Error::InvalidArgument(format!("delta_sq must be > 0, got {delta_sq}")));
    }
    let c = 1.0 / (2.0 * (0.5 * delta_sq).tanh());
    let (t, w) = gauss_hermite(nodes)?;
    let scale = 1.0 / c.sqrt();
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for (tu, wu) in t.iter().zip(&w) {
        for (tv, wv) in t.iter().zip(&w) {
            let alpha = C64::new(tu * scale, tv * scale);
            acc += displacement_block(alpha, dim, dim).map(|z| z * (wu * wv));
        }
    }
    let pref = scale * scale / (PI * (-delta_sq).exp_m1().abs());
    Ok(acc.map(|z| z * pref))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::spec::gamma_from_dz;

    #[test]
    fn analytic_values() {
        assert_eq!(q_analytic_sc(0.0), 1.0);
        assert!((q_analytic_sc(1.0) - 0.36788).abs() < 1e-5);
        assert!((q_analytic_gkp(3.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sc_sum_convergence_pattern() {
        let z = -(0.3f64.ln());
        let g = gamma_from_dz(z, 1.0).unwrap();
        let good = q_sum_sc(0.9, g, z, lattice_cutoff(PI / 1.8, g, TAIL_TOL)).unwrap();
        assert!((good / (-1.0f64).exp() - 1.0).abs() < 0.05, "q = {good}");
        // below the first condition the sum departs from e^{-dz} at small dz
        let g = gamma_from_dz(z, 0.25).unwrap();
        let bad = q_sum_sc(0.3, g, z, lattice_cutoff(PI / 0.6, g, TAIL_TOL)).unwrap();
        assert!((bad / (-0.25f64).exp() - 1.0).abs() > 0.05, "q = {bad}");
        assert_eq!(q_sum_sc(0.9, 0.0, z, 0).unwrap(), 1.0);
        assert!(q_sum_sc(0.9, g, z, 1).is_err());
    }

    #[test]
    fn sc_sum_is_exact_for_squeezed_coherent_states() {
        use crate::codes::squeezed_coherent;
        use crate::projector::{projection_probability, sc_spec};
        let (xi, z) = (0.6, 0.8);
        let g = gamma_from_dz(z, 0.4).unwrap();
        let s = squeezed_coherent(xi, z, 160).unwrap();
        let dense = projection_probability(&s, &sc_spec(xi, g, TAIL_TOL).unwrap());
        let sum = q_sum_sc(xi, g, z, lattice_cutoff(PI / (2.0 * xi), g, TAIL_TOL)).unwrap();
        assert!((dense - sum).abs() < 1e-9, "{dense} vs {sum}");
    }

    #[test]
    fn gkp_sum_trend_and_structure() {
        let xi = (PI / 2.0).sqrt();
        let g = ((3.0 - 1.0) / 0.15f64).sqrt();
        let cut = lattice_cutoff(2.0 * xi, g, TAIL_TOL);
        let q = q_sum_gkp(xi, g, 0.15, cut).unwrap();
        assert!((q * 3.0 - 1.0).abs() < 0.1, "q = {q}");
        let single = q_sum_gkp_rect(xi, g, 0.0, 0.15, (cut, 0)).unwrap();
        assert!((q - single * single).abs() < 1e-14);
        assert_eq!(q_sum_gkp(xi, 0.0, 0.15, 0).unwrap(), 1.0);
    }

    #[test]
    fn validity_examples() {
        let z = -(0.3f64.ln());
        let v = validity(0.9, z, 1.0);
        assert!(v.cond1 && (v.cond1_margin - (1.0 / 0.09) / (PI / 1.8).powi(2)).abs() < 1e-12);
        assert!(!validity(0.3, z, 1.0).cond1);
        assert!(validity(0.9, z, 50.0).cond2);
        assert!(gkp_validity((PI / 2.0).sqrt(), 0.05, 2.0).0);
    }

    #[test]
    fn envelope_integral_matches_operator() {
        let d = 0.05;
        let m = envelope_by_displacements(d, 30, 24).unwrap();
        for n in 0..30 {
            for k in 0..30 {
                let want = if n == k { (-d * n as f64).exp() } else { 0.0 };
                let err = (m[(n, k)] - C64::new(want, 0.0)).norm();
                assert!(err < 0.01 * (-d * 29.0).exp(), "({n},{k}) err {err}");
            }
        }
    }
}
