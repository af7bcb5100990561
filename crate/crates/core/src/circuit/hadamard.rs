use nalgebra::DMatrix;

use super::{Gate2, HybridState};
use crate::error::{Error, Result};
use crate::fock::{self, displacement_block, FockOperator, FockState, C64};

/// Exact ancilla readouts of one Hadamard test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardOutcome {
    /// `h <X>`: `Re[h Tr(B_l rho B_l'^dagger)]`.
    pub ex_m: f64,
    /// `h <X (x) O>`: `Re[h Tr(O B_l rho B_l'^dagger)]`.
    pub ex_mo: f64,
    /// `e^{i phi}` picked up by the controlled gate and removed on the ancilla.
    pub phase: C64,
}

/// `D(zeta) R(theta)` on `dim` levels.
pub fn branch_operator_matrix(zeta: C64, theta: f64, dim: usize) -> Result<DMatrix<C64>> {
    let d = displacement_block(zeta, dim, dim);
    if theta == 0.0 {
        return Ok(d);
    }
    let r = fock::rotation(theta, dim)?;
    let mut out = d;
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= r.get(j, j);
    }
    Ok(out)
}

/// Ancilla `|+>`, unconditional `D(zeta_lp)`, controlled `D(zeta_l - zeta_lp)`,
/// ancilla phase `e^{-i phi}` with `phi = Im(dzeta conj(zeta_lp))`, X readout.
/// With `rotation = (theta, theta')` the branches also carry `R(theta)` and
/// `R(theta')`. The controlled gate is evaluated through the group law, so
/// the branches are exactly `D(zeta_l) R(theta) psi` and
/// `D(zeta_lp) R(theta') psi` on the truncated levels.
pub fn hadamard_test_exact(
    state: &FockState,
    zeta_l: C64,
    zeta_lp: C64,
    sign: f64,
    observable: Option<&FockOperator>,
    rotation: Option<(f64, f64)>,
) -> Result<HadamardOutcome> {
    hadamard_test_dephased(state, zeta_l, zeta_lp, sign, observable, rotation, 1.0)
}

/// Same circuit with the ancilla coherence shrunk by `e` before readout.
pub(crate) fn hadamard_test_dephased(
    state: &FockState,
    zeta_l: C64,
    zeta_lp: C64,
    sign: f64,
    observable: Option<&FockOperator>,
    rotation: Option<(f64, f64)>,
    e: f64,
) -> Result<HadamardOutcome> {
    let dim = state.dim();
    if let Some(o) = observable {
        if o.dim() != dim {
            return Err(Error::DimensionMismatch { left: o.dim(), right: dim });
        }
    }
    let (th, thp) = rotation.unwrap_or((0.0, 0.0));
    let dz = zeta_l - zeta_lp;
    let phase = C64::from_polar(1.0, (dz * zeta_lp.conj()).im);
    let b0 = branch_operator_matrix(zeta_lp, thp, dim)?;
    let b1 = branch_operator_matrix(zeta_l, th, dim)? * phase;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = HybridState::product([C64::new(s, 0.0), C64::new(s, 0.0)], state)?;
    h.apply_blockwise([Some(&b0), Some(&b1)])?;
    let comp: Gate2 = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), phase.conj()],
    ];
    h.apply_ancilla(&comp);
    h.dephase_ancilla(e);
    let herm = observable.map(|o| o.hermitian_part().into_matrix());
    let (x, xo) = h.ancilla_x(herm.as_ref());
    Ok(HadamardOutcome {
        ex_m: sign * x,
        ex_mo: sign * xo,
        phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{gkp_state, GkpParams};
    use crate::fock::{number, trace_product};

    #[test]
    fn equal_indices_give_trace() {
        let s = crate::codes::squeezed_coherent(0.6, 0.4, 50).unwrap();
        let z = C64::new(0.3, -0.2);
        let out = hadamard_test_exact(&s, z, z, 1.0, None, None).unwrap();
        assert!((out.ex_m - 1.0).abs() < 1e-8, "{}", out.ex_m);
        assert!((out.phase - C64::new(1.0, 0.0)).norm() < 1e-15);
        let colinear = hadamard_test_exact(&s, C64::new(0.0, 0.9), C64::new(0.0, -0.3), -1.0, None, None)
            .unwrap();
        assert_eq!(colinear.phase, C64::new(1.0, 0.0));
    }

    #[test]
    fn matches_dense_trace() {
        let p = GkpParams::square(0.2).unwrap();
        let s = gkp_state(&p, 0, 80).unwrap().to_mixed();
        let (zl, zlp) = (C64::new(2.0 * p.xi, 0.0), C64::new(0.0, std::f64::consts::PI / p.xi));
        let n = number(80).unwrap();
        let out = hadamard_test_exact(&s, zl, zlp, -1.0, Some(&n), Some((0.4, -0.1))).unwrap();
        let bl = branch_operator_matrix(zl, 0.4, 80).unwrap();
        let blp = branch_operator_matrix(zlp, -0.1, 80).unwrap();
        let x = &bl * s.density_matrix() * blp.adjoint();
        let want = -x.trace().re;
        let want_o = -trace_product(n.matrix(), &x).re;
        assert!((out.ex_m - want).abs() < 1e-12);
        assert!((out.ex_mo - want_o).abs() < 1e-10);
    }
}
