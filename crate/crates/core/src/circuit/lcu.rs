use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{Gate2, HybridState};
use crate::codes::CodeKind;
use crate::error::{check_finite, Error, Result};
use crate::fock::{displacement_block, FockState, C64, I};

/// Branch probabilities below this abort the run.
pub const BRANCH_FLOOR: f64 = 1e-12;

/// Repeated single-ancilla LCU: `M` repetitions of `Q0 Q0^dagger` (SC) or
/// `Q1 Q1^dagger Q2 Q2^dagger` (GKP), each factor one post-selected step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LcuConfig {
    pub kind: CodeKind,
    pub xi: f64,
    pub p0: f64,
    pub m: usize,
    /// Ancilla outcome kept after every step.
    pub postselect: u8,
}

impl LcuConfig {
    pub fn new(kind: CodeKind, xi: f64, p0: f64, m: usize) -> Result<Self> {
        check_finite("xi", xi)?;
        if xi <= 0.0 {
            return Err(Error::InvalidArgument(format!("xi must be > 0, got {xi}")));
        }
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::InvalidArgument(format!("p0 must be in (0,1), got {p0}")));
        }
        Ok(Self {
            kind,
            xi,
            p0,
            m,
            postselect: 0,
        })
    }

    /// `(zeta, sign)` of the steps in one repetition.
    pub fn steps(&self) -> Vec<(C64, f64)> {
        match self.kind {
            CodeKind::Sc => {
                let d = I * (PI / (2.0 * self.xi));
                vec![(d, -1.0), (-d, -1.0)]
            }
            CodeKind::Gkp => {
                let d1 = C64::new(2.0 * self.xi, 0.0);
                let d2 = I * (PI / self.xi);
                vec![(d1, 1.0), (-d1, 1.0), (d2, 1.0), (-d2, 1.0)]
            }
        }
    }
}

// R_y rotation taking |0> to sqrt(p0)|0> + sign sqrt(p1)|1>.
fn prep(p0: f64, sign: f64) -> Gate2 {
    let (c, s) = (p0.sqrt(), (1.0 - p0).sqrt() * sign);
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

fn unprep(p0: f64) -> Gate2 {
    let (c, s) = (p0.sqrt(), (1.0 - p0).sqrt());
    [
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [C64::new(-s, 0.0), C64::new(c, 0.0)],
    ]
}

/// Register operator realized by outcome `bit`: `p0 I + sign p1 D` for 0,
/// `sqrt(p0 p1) (sign D - I)` for 1.
pub fn branch_operator(zeta: C64, sign: f64, p0: f64, bit: u8, dim: usize) -> DMatrix<C64> {
    let d = displacement_block(zeta, dim, dim);
    let id = DMatrix::<C64>::identity(dim, dim);
    let p1 = 1.0 - p0;
    if bit == 0 {
        id * C64::new(p0, 0.0) + d * C64::new(sign * p1, 0.0)
    } else {
        (d * C64::new(sign, 0.0) - id) * C64::new((p0 * p1).sqrt(), 0.0)
    }
}

/// One LCU step on a freshly prepared ancilla: prep, controlled `D(zeta)`,
/// unprep, Z readout post-selected on `bit`. Any ancilla state carried in
/// is traced out first.
pub fn lcu_step(
    state: &HybridState,
    zeta: C64,
    sign: f64,
    p0: f64,
    bit: u8,
) -> Result<(HybridState, f64)> {
    if sign.abs() != 1.0 {
        return Err(Error::InvalidArgument(format!("sign must be +-1, got {sign}")));
    }
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::InvalidArgument(format!("p0 must be in (0,1], got {p0}")));
    }
    let reg = state.register()?;
    let mut h = HybridState::from_register(&reg)?;
    h.apply_ancilla(&prep(p0, sign));
    h.apply_controlled(&displacement_block(zeta, h.dim(), h.dim()))?;
    h.apply_ancilla(&unprep(p0));
    let (out, p) = h.postselect(bit, BRANCH_FLOOR)?;
    let mut anc = [C64::new(0.0, 0.0); 2];
    anc[bit as usize] = C64::new(1.0, 0.0);
    Ok((HybridState::product(anc, &out)?, p))
}

/// Run the configured repetitions on `state` embedded in `dim` levels;
/// returns the register and the product of branch probabilities.
pub fn lcu_project(state: &FockState, cfg: &LcuConfig, dim: usize) -> Result<(FockState, f64)> {
    let mut h = HybridState::from_register(&state.embed(dim)?)?;
    let mut total = 1.0;
    for _ in 0..cfg.m {
        for (zeta, sign) in cfg.steps() {
            let (next, p) = lcu_step(&h, zeta, sign, cfg.p0, cfg.postselect)?;
            h = next;
            total *= p;
        }
    }
    Ok((h.register()?, total))
}

/// Gaussian width `Gamma^2` matched by `M` repetitions: `(pi/xi)^2 M p0 p1`
/// for SC, `16 xi^2 M p0 p1` along the first GKP axis (`8 pi M p0 p1` when
/// square).
pub fn binomial_width(kind: CodeKind, xi: f64, p0: f64, m: usize) -> f64 {
    binomial_widths(kind, xi, p0, m).0
}

/// Per-axis widths; the second GKP axis is `4 (pi/xi)^2 M p0 p1`.
pub fn binomial_widths(kind: CodeKind, xi: f64, p0: f64, m: usize) -> (f64, f64) {
    let v = m as f64 * p0 * (1.0 - p0);
    match kind {
        CodeKind::Sc => {
            let g = (PI / xi).powi(2) * v;
            (g, g)
        }
        CodeKind::Gkp => (16.0 * xi * xi * v, 4.0 * (PI / xi).powi(2) * v),
    }
}

/// Smallest `M` whose width reaches `gamma_sq`.
pub fn min_repetitions(kind: CodeKind, xi: f64, p0: f64, gamma_sq: f64) -> usize {
    let per = binomial_width(kind, xi, p0, 1);
    if !(gamma_sq > 0.0) || !(per > 0.0) {
        return 0;
    }
    let mut m = (gamma_sq / per).ceil() as usize;
    // guard against the ceil landing one short through roundoff
    while binomial_width(kind, xi, p0, m) < gamma_sq {
        m += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{sc_state, ScParams};
    use crate::fock::fidelity;

    #[test]
    fn trivial_step_is_identity() {
        let reg = crate::codes::squeezed_coherent(0.4, 0.1, 30).unwrap();
        let h = HybridState::from_register(&reg).unwrap();
        let (out, p) = lcu_step(&h, C64::new(0.0, 0.0), 1.0, 1.0, 0).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
        assert!(fidelity(&out.register().unwrap(), &reg).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn branches_match_operators_and_sum_to_one() {
        let reg = crate::codes::squeezed_coherent(0.8, 0.3, 60).unwrap();
        let h = HybridState::from_register(&reg).unwrap();
        let zeta = C64::new(0.0, 0.7);
        let v = reg.amplitudes().unwrap();
        let mut tot = 0.0;
        for bit in [0u8, 1] {
            let (out, p) = lcu_step(&h, zeta, -1.0, 0.3, bit).unwrap();
            let w = branch_operator(zeta, -1.0, 0.3, bit, 60) * v;
            assert!((p - w.norm_squared()).abs() < 1e-12);
            let want = FockState::pure(w).unwrap();
            assert!(fidelity(&out.register().unwrap(), &want).unwrap() > 1.0 - 1e-12);
            tot += p;
        }
        assert!((tot - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_repetitions_is_identity() {
        let s = sc_state(&ScParams::new(1.2, 0.5).unwrap(), 0, 40).unwrap();
        let cfg = LcuConfig::new(CodeKind::Sc, 1.2, 0.5, 0).unwrap();
        let (out, p) = lcu_project(&s, &cfg, 40).unwrap();
        assert_eq!(p, 1.0);
        assert!(fidelity(&out, &s).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn widths() {
        let xi = (PI / 2.0).sqrt();
        assert_eq!(binomial_width(CodeKind::Sc, xi, 0.5, 0), 0.0);
        assert!((binomial_width(CodeKind::Sc, xi, 0.5, 16) - 8.0 * PI).abs() < 1e-12);
        assert!((binomial_width(CodeKind::Gkp, xi, 0.5, 10) - 20.0 * PI).abs() < 1e-12);
        let (a, b) = binomial_widths(CodeKind::Gkp, xi, 0.5, 10);
        assert!((a - b).abs() < 1e-12);
        assert_eq!(min_repetitions(CodeKind::Sc, xi, 0.5, 8.0 * PI), 16);
        assert_eq!(min_repetitions(CodeKind::Sc, xi, 0.5, 8.0 * PI + 1e-9), 17);
    }
}
