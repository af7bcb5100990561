use nalgebra::DMatrix;

use super::apply::{ProjectionOutcome, Q_FLOOR, RETAIN_TOL};
use crate::error::{check_finite, Error, Result};
use crate::fock::{displacement_block, FockState, StateRepr, C64, I};
use crate::quadrature::gauss_hermite;

/// Doubling the node count may change `q` by at most this much.
pub const QUAD_TOL: f64 = 1e-8;
pub const MIN_QUAD_POINTS: usize = 64;

/// `delta z = ln(1 + gamma^2 e^{-2z}) / 2` reached by the vacuum projector.
pub fn vacuum_dz(z: f64, gamma: f64) -> f64 {
    0.5 * (gamma * gamma * (-2.0 * z).exp()).ln_1p()
}

// Nodes below this weight are dropped; they cannot move q at QUAD_TOL.
const NODE_FLOOR: f64 = 1e-30;

fn nodes(points: usize) -> Result<Vec<(f64, f64)>> {
    let (t, w) = gauss_hermite(points)?;
    let s = std::f64::consts::PI.sqrt();
    Ok(t.into_iter()
        .zip(w)
        .filter(|(_, w)| *w > NODE_FLOOR)
        .map(|(t, w)| (t, w / s))
        .collect())
}

// <P_g> for P_g = pi^{-1/2} int e^{-t^2} D(i g t) dt.
fn smeared_expectation(state: &FockState, g: f64, points: usize) -> Result<f64> {
    let n = state.dim();
    let mut acc = C64::new(0.0, 0.0);
    for (t, w) in nodes(points)? {
        let d = displacement_block(I * (g * t), n, n);
        acc += w * match state.repr() {
            StateRepr::Pure(v) => v.dotc(&(&d * v)),
            StateRepr::Mixed(r) => crate::fock::trace_product(&d, r),
        };
    }
    Ok(acc.re)
}

/// Projection probability of the Gaussian momentum-shift projector
/// `P ~ int exp(-y^2/gamma^2) D(i y) dy`; `P^2` is the same projector at
/// width `sqrt(2) gamma`.
pub fn vacuum_probability(state: &FockState, gamma: f64, points: usize) -> Result<f64> {
    check_finite("gamma", gamma)?;
    if gamma == 0.0 {
        return Ok(1.0);
    }
    if points < MIN_QUAD_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_QUAD_POINTS} quadrature points, got {points}"
        )));
    }
    let g2 = std::f64::consts::SQRT_2 * gamma.abs();
    let q = smeared_expectation(state, g2, points)?;
    let q2 = smeared_expectation(state, g2, 2 * points)?;
    if (q - q2).abs() > QUAD_TOL {
        return Err(Error::QuadratureNotConverged((q - q2).abs()));
    }
    Ok(q)
}

/// Apply the Gaussian momentum-shift projector on `dim` output levels.
pub fn vacuum_project(
    state: &FockState,
    gamma: f64,
    points: usize,
    dim: usize,
) -> Result<ProjectionOutcome> {
    let n = state.dim();
    if dim < n {
        return Err(Error::DimensionMismatch { left: dim, right: n });
    }
    let q = vacuum_probability(state, gamma, points)?;
    if !(q > Q_FLOOR) {
        return Err(Error::ProjectionAnnihilated(q));
    }
    let p = if gamma == 0.0 {
        DMatrix::<C64>::identity(dim, n)
    } else {
        let mut acc = DMatrix::<C64>::zeros(dim, n);
        for (t, w) in nodes(points)? {
            acc += displacement_block(I * (gamma.abs() * t), dim, n).map(|z| z * w);
        }
        acc
    };
    let (out, norm_sq) = match state.repr() {
        StateRepr::Pure(v) => {
            let w = &p * v;
            let ns = w.norm_squared();
            (FockState::pure(w)?, ns)
        }
        StateRepr::Mixed(r) => {
            let w = &p * r * p.adjoint();
            let tr = w.trace().re;
            (FockState::mixed(w)?, tr)
        }
    };
    let retained = norm_sq / q;
    if retained < 1.0 - RETAIN_TOL {
        return Err(Error::TruncationOverflow {
            dim,
            retained,
            tol: RETAIN_TOL,
        });
    }
    Ok(ProjectionOutcome {
        state: out,
        q,
        retained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::squeezed_coherent;
    use crate::fock::fidelity;

    #[test]
    fn zero_width_is_identity() {
        let s = squeezed_coherent(0.0, 0.3, 40).unwrap();
        let out = vacuum_project(&s, 0.0, 64, 40).unwrap();
        assert_eq!(out.q, 1.0);
        assert!(fidelity(&out.state, &s).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn exact_squeezing_increment() {
        let s = squeezed_coherent(0.0, 0.0, 80).unwrap();
        let out = vacuum_project(&s, 1.0, 64, 80).unwrap();
        let dz = vacuum_dz(0.0, 1.0);
        assert!((dz - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((out.q - 2f64.powf(-0.5)).abs() < 1e-6, "q = {}", out.q);
        let target = squeezed_coherent(0.0, dz, 80).unwrap();
        assert!(fidelity(&out.state, &target).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn too_few_points_rejected() {
        let s = squeezed_coherent(0.0, 0.0, 20).unwrap();
        assert!(vacuum_project(&s, 1.0, 16, 20).is_err());
    }
}
