//! Dense linear algebra on the truncated oscillator space.

pub mod block;
pub mod expm;
mod operator;
mod state;

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

pub use block::{characteristic, displacement_block};
pub use operator::{FockOperator, OperatorKind};
pub use state::{expectation, expectation_real, fidelity, trace_product, FockState, StateRepr};

use crate::error::{check_dim, check_finite, Error, Result};

pub(crate) const I: C64 = C64::new(0.0, 1.0);

fn annihilation_matrix(dim: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `(a, a^dagger)` on `dim` levels.
pub fn ladder(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(dim)?;
    let a = annihilation_matrix(dim);
    let ad = a.adjoint();
    Ok((
        FockOperator::from_parts(a, OperatorKind::General),
        FockOperator::from_parts(ad, OperatorKind::General),
    ))
}

pub fn number(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    FockOperator::from_diagonal(
        (0..dim).map(|n| C64::new(n as f64, 0.0)).collect(),
        OperatorKind::Hermitian,
    )
}

/// Position `(a + a^dagger)/sqrt(2)` and momentum `(a - a^dagger)/(i sqrt(2))`.
pub fn quadratures(dim: usize) -> Result<(FockOperator, FockOperator)> {
    check_dim(dim)?;
    let a = annihilation_matrix(dim);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad).map(|z| z * s);
    let p = (&a - &ad).map(|z| z * s / I);
    Ok((
        FockOperator::from_parts(x, OperatorKind::Hermitian),
        FockOperator::from_parts(p, OperatorKind::Hermitian),
    ))
}

/// `D(zeta) = exp(zeta a^dagger - conj(zeta) a)` as the exponential of the
/// truncated generator; unitary at every truncation.
pub fn displacement(zeta: C64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    check_finite("displacement re", zeta.re)?;
    check_finite("displacement im", zeta.im)?;
    if zeta == C64::new(0.0, 0.0) {
        return FockOperator::identity(dim);
    }
    let a = annihilation_matrix(dim);
    let g = a.adjoint().map(|z| z * zeta) - a.map(|z| z * zeta.conj());
    Ok(FockOperator::from_parts(expm::expm(&g), OperatorKind::Unitary))
}

/// Exact number-basis block of the untruncated `D(zeta)`; not unitary.
pub fn displacement_exact(zeta: C64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    check_finite("displacement re", zeta.re)?;
    check_finite("displacement im", zeta.im)?;
    Ok(FockOperator::from_parts(
        displacement_block(zeta, dim, dim),
        OperatorKind::General,
    ))
}

/// `S(z) = exp((conj(z) a^2 - z a^dagger^2)/2)` from the truncated generator.
pub fn squeeze(z: C64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    check_finite("squeeze re", z.re)?;
    check_finite("squeeze im", z.im)?;
    if z == C64::new(0.0, 0.0) {
        return FockOperator::identity(dim);
    }
    let a = annihilation_matrix(dim);
    let a2 = &a * &a;
    let ad2 = a2.adjoint();
    let g = (a2.map(|x| x * z.conj()) - ad2.map(|x| x * z)).map(|x| x * 0.5);
    Ok(FockOperator::from_parts(expm::expm(&g), OperatorKind::Unitary))
}

/// `exp(i theta a^dagger a)`.
pub fn rotation(theta: f64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    check_finite("rotation angle", theta)?;
    let diag: Vec<C64> = (0..dim)
        .map(|n| {
            // exact signs at multiples of pi keep parity an involution
            let phase = theta * n as f64;
            let k = phase / std::f64::consts::PI;
            if (k - k.round()).abs() < 1e-14 {
                let r = k.round() as i64;
                C64::new(if r.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                C64::from_polar(1.0, phase)
            }
        })
        .collect();
    let involution = diag.iter().all(|z| z.im == 0.0);
    FockOperator::from_diagonal(
        diag,
        if involution {
            OperatorKind::Involution
        } else {
            OperatorKind::Unitary
        },
    )
}

/// Photon-number parity `exp(i pi a^dagger a)`.
pub fn parity(dim: usize) -> Result<FockOperator> {
    rotation(std::f64::consts::PI, dim)
}

/// Envelope `exp(-delta_sq a^dagger a)`.
pub fn envelope(delta_sq: f64, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    check_finite("envelope parameter", delta_sq)?;
    if delta_sq < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "envelope parameter must be >= 0, got {delta_sq}"
        )));
    }
    FockOperator::from_diagonal(
        (0..dim)
            .map(|n| C64::new((-delta_sq * n as f64).exp(), 0.0))
            .collect(),
        if delta_sq == 0.0 {
            OperatorKind::Involution
        } else {
            OperatorKind::Hermitian
        },
    )
}

/// Truncation-convergence probe: build the operator at `dim` and `2 dim` and
/// return the largest difference of matrix elements `<m|A|n>` with `m < dim`
/// and `n < dim / 2`.
pub fn truncation_delta<F>(build: F, dim: usize) -> Result<f64>
where
    F: Fn(usize) -> Result<FockOperator>,
{
    truncation_delta_on(build, dim, dim / 2)
}

/// As `truncation_delta`, probing only states supported below `support`.
/// Squeezing spreads number states by roughly `e^{2r}`, so its probe needs a
/// lower support than `dim / 2` to be meaningful.
pub fn truncation_delta_on<F>(build: F, dim: usize, support: usize) -> Result<f64>
where
    F: Fn(usize) -> Result<FockOperator>,
{
    if support == 0 || support > dim {
        return Err(Error::InvalidArgument(format!(
            "probe support {support} outside 1..={dim}"
        )));
    }
    let small = build(dim)?;
    let large = build(2 * dim)?;
    let mut worst = 0.0f64;
    for n in 0..support {
        for m in 0..dim {
            worst = worst.max((small.get(m, n) - large.get(m, n)).norm());
        }
    }
    Ok(worst)
}

/// `truncation_delta` with a tolerance; fails loudly above it.
pub fn check_truncation<F>(what: &str, build: F, dim: usize, tol: f64) -> Result<f64>
where
    F: Fn(usize) -> Result<FockOperator>,
{
    let delta = truncation_delta(build, dim)?;
    if delta > tol {
        return Err(Error::TruncationNotConverged {
            what: what.to_string(),
            dim,
            dim2: 2 * dim,
            delta,
            tol,
        });
    }
    Ok(delta)
}
