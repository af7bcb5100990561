//! Photon loss on the register and T1/T2 decay of the ancilla.

use nalgebra::DMatrix;

use crate::circuit::HadamardOutcome;
use crate::error::{check_finite, Error, Result};
use crate::fock::{FockOperator, FockState, StateRepr, C64};

/// RK4 stops refining once halving the step moves the result by less than
/// this in trace distance.
pub const RK4_TOL: f64 = 1e-8;
const MAX_HALVINGS: u32 = 16;

/// Loss strength `gamma t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParams {
    pub gamma_t: f64,
}

impl LossParams {
    pub fn new(gamma_t: f64) -> Result<Self> {
        check_finite("gamma_t", gamma_t)?;
        if gamma_t < 0.0 {
            return Err(Error::InvalidArgument(format!("gamma_t must be >= 0, got {gamma_t}")));
        }
        Ok(Self { gamma_t })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AncillaNoise {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Gate time per unit `|dzeta|` of the controlled displacement.
    pub time_per_unit_displacement: f64,
}

impl AncillaNoise {
    pub fn new(gamma1: f64, gamma2: f64, time_per_unit_displacement: f64) -> Result<Self> {
        for (n, v) in [("gamma1", gamma1), ("gamma2", gamma2)] {
            check_finite(n, v)?;
            if v < 0.0 {
                return Err(Error::InvalidArgument(format!("{n} must be >= 0, got {v}")));
            }
        }
        check_finite("time_per_unit_displacement", time_per_unit_displacement)?;
        if time_per_unit_displacement <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "time_per_unit_displacement must be > 0, got {time_per_unit_displacement}"
            )));
        }
        Ok(Self {
            gamma1,
            gamma2,
            time_per_unit_displacement,
        })
    }

    pub fn off() -> Self {
        Self {
            gamma1: 0.0,
            gamma2: 0.0,
            time_per_unit_displacement: 1.0,
        }
    }
}

/// `exp(-(gamma1/2 + 2 gamma2) t)` with `t` proportional to `|zeta_l - zeta_lp|`.
pub fn ancilla_decay(zeta_l: C64, zeta_lp: C64, noise: &AncillaNoise) -> f64 {
    let t = noise.time_per_unit_displacement * (zeta_l - zeta_lp).norm();
    (-(0.5 * noise.gamma1 + 2.0 * noise.gamma2) * t).exp()
}

/// Hadamard test whose ancilla coherences decay by `ancilla_decay` before
/// readout. Only the off-diagonal ancilla blocks enter the X readout, so both
/// values scale by the decay factor.
pub fn noisy_hadamard_test(
    state: &FockState,
    zeta_l: C64,
    zeta_lp: C64,
    sign: f64,
    observable: Option<&FockOperator>,
    noise: &AncillaNoise,
) -> Result<HadamardOutcome> {
    let mut out = crate::circuit::hadamard_test_exact(state, zeta_l, zeta_lp, sign, observable, None)?;
    let e = ancilla_decay(zeta_l, zeta_lp, noise);
    out.ex_m *= e;
    out.ex_mo *= e;
    Ok(out)
}

// ln n! for n < len.
fn ln_factorials(len: usize) -> Vec<f64> {
    let mut f = vec![0.0; len.max(1)];
    for n in 1..len {
        f[n] = f[n - 1] + (n as f64).ln();
    }
    f
}

/// Amplitude-damping Kraus family with transmissivity `eta = e^{-gamma t}`:
/// `K_k = sum_n sqrt(C(n,k) eta^{n-k} (1-eta)^k) |n-k><n|`.
pub fn photon_loss_kraus(state: &FockState, p: &LossParams) -> Result<FockState> {
    let rho = state.density_matrix();
    if p.gamma_t == 0.0 {
        return FockState::mixed(rho);
    }
    let dim = rho.nrows();
    let eta = (-p.gamma_t).exp();
    let (le, l1e) = (eta.ln(), (-p.gamma_t).exp_m1().abs().ln());
    let lf = ln_factorials(dim);
    // coef[k][n] for n >= k
    let coef = |n: usize, k: usize| {
        (0.5 * (lf[n] - lf[k] - lf[n - k] + (n - k) as f64 * le + k as f64 * l1e)).exp()
    };
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for k in 0..dim {
        let c: Vec<f64> = (k..dim).map(|n| coef(n, k)).collect();
        for m in 0..dim - k {
            for mp in 0..dim - k {
                out[(m, mp)] += rho[(m + k, mp + k)] * (c[m] * c[mp]);
            }
        }
    }
    FockState::mixed(out)
}

// d rho / d(gamma t) = a rho a^dagger - (n rho + rho n) / 2
fn lindblad_rhs(rho: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = rho.nrows();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for m in 0..dim {
        for mp in 0..dim {
            let mut v = -0.5 * (m + mp) as f64 * rho[(m, mp)];
            if m + 1 < dim && mp + 1 < dim {
                v += ((m + 1) as f64 * (mp + 1) as f64).sqrt() * rho[(m + 1, mp + 1)];
            }
            out[(m, mp)] = v;
        }
    }
    out
}

fn rk4(rho: &DMatrix<C64>, total: f64, steps: usize) -> DMatrix<C64> {
    let h = total / steps as f64;
    let mut r = rho.clone();
    for _ in 0..steps {
        let k1 = lindblad_rhs(&r);
        let k2 = lindblad_rhs(&(&r + &k1 * C64::new(0.5 * h, 0.0)));
        let k3 = lindblad_rhs(&(&r + &k2 * C64::new(0.5 * h, 0.0)));
        let k4 = lindblad_rhs(&(&r + &k3 * C64::new(h, 0.0)));
        r += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0);
    }
    r
}

/// Trace distance `||a - b||_1 / 2` of Hermitian matrices.
pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let d = a - b;
    let h = (&d + d.adjoint()) * C64::new(0.5, 0.0);
    0.5 * h.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
}

/// Lindblad photon loss by RK4, halving the step until the result moves by
/// less than `RK4_TOL` in trace distance.
pub fn photon_loss_rk4(state: &FockState, p: &LossParams) -> Result<FockState> {
    let rho = state.density_matrix();
    if p.gamma_t == 0.0 {
        return FockState::mixed(rho);
    }
    let dim = rho.nrows();
    // start inside the RK4 stability region of the fastest decay rate ~ dim
    let mut steps = ((p.gamma_t * dim as f64).ceil() as usize).max(4);
    let mut prev = rk4(&rho, p.gamma_t, steps);
    for _ in 0..MAX_HALVINGS {
        steps *= 2;
        let next = rk4(&rho, p.gamma_t, steps);
        let d = trace_distance(&prev, &next);
        prev = next;
        if d < RK4_TOL {
            return FockState::mixed(prev);
        }
    }
    Err(Error::StepControl(format!(
        "no convergence to {RK4_TOL:.0e} after {MAX_HALVINGS} halvings"
    )))
}

/// Photon loss of strength `gamma t`; the output is mixed.
pub fn photon_loss(state: &FockState, p: &LossParams) -> Result<FockState> {
    photon_loss_kraus(state, p)
}

/// `<a^dagger a>` of a state.
pub fn mean_photons(state: &FockState) -> f64 {
    match state.repr() {
        StateRepr::Pure(v) => v.iter().enumerate().map(|(n, z)| n as f64 * z.norm_sqr()).sum(),
        StateRepr::Mixed(r) => (0..r.nrows()).map(|n| n as f64 * r[(n, n)].re).sum(),
    }
}
