use nalgebra::DMatrix;
use rayon::prelude::*;

use super::spec::{ProjectorSpec, Term};
use crate::error::{check_dim, Error, Result};
use crate::fock::{self, displacement_block, FockOperator, FockState, OperatorKind, StateRepr, C64};

/// Projection probabilities below this count as annihilation.
pub const Q_FLOOR: f64 = 1e-12;
/// Largest fraction of the projected norm allowed to fall outside the
/// output truncation.
pub const RETAIN_TOL: f64 = 1e-6;

// Fixed chunk count keeps the summation order independent of the thread pool.
const CHUNKS: usize = 16;

/// Exact `rows x cols` block of `sum_l p_l h_l D(zeta_l)`.
pub fn assemble_block(spec: &ProjectorSpec, rows: usize, cols: usize) -> DMatrix<C64> {
    let per = spec.terms.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<DMatrix<C64>> = spec
        .terms
        .par_chunks(per)
        .map(|chunk| {
            let mut acc = DMatrix::<C64>::zeros(rows, cols);
            for t in chunk {
                let c = t.weight * t.sign;
                acc += displacement_block(t.zeta, rows, cols).map(|z| z * c);
            }
            acc
        })
        .collect();
    let mut total = DMatrix::<C64>::zeros(rows, cols);
    for p in partials {
        total += p;
    }
    total
}

/// Dense smeared projector on `dim` levels.
pub fn assemble(spec: &ProjectorSpec, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    FockOperator::new(assemble_block(spec, dim, dim), OperatorKind::Hermitian)
}

fn term_expectation(t: &Term, state: &FockState) -> C64 {
    let n = state.dim();
    match state.repr() {
        StateRepr::Pure(v) => fock::characteristic(v, t.zeta),
        StateRepr::Mixed(r) => fock::trace_product(&displacement_block(t.zeta, n, n), r),
    }
}

/// `<sum_l p_l h_l D(zeta_l)>` on a state, exact for states supported inside
/// their truncation.
pub fn spec_expectation(spec: &ProjectorSpec, state: &FockState) -> C64 {
    let vals: Vec<C64> = spec
        .terms
        .par_iter()
        .map(|t| term_expectation(t, state) * (t.weight * t.sign))
        .collect();
    vals.into_iter().sum()
}

/// `q = <P^2>` from the input state alone.
pub fn projection_probability(state: &FockState, spec: &ProjectorSpec) -> f64 {
    spec_expectation(&spec.squared(), state).re
}

#[derive(Clone, Debug)]
pub struct ProjectionOutcome {
    pub state: FockState,
    pub q: f64,
    /// Fraction of `q` inside the output truncation.
    pub retained: f64,
}

/// `P|psi>` (or `P rho P`) on `dim` output levels, renormalized, with
/// `q = <psi|P^2|psi>`.
pub fn project(state: &FockState, spec: &ProjectorSpec, dim: usize) -> Result<ProjectionOutcome> {
    let n = state.dim();
    if dim < n {
        return Err(Error::DimensionMismatch { left: dim, right: n });
    }
    let q = projection_probability(state, spec);
    if !(q > Q_FLOOR) {
        return Err(Error::ProjectionAnnihilated(q));
    }
    let p = assemble_block(spec, dim, n);
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

/// Uniform average of `rotation(2 pi k / order)`, `k = 0..order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RotationSpec {
    pub order: usize,
}

pub fn rotation_spec(order: usize) -> Result<RotationSpec> {
    if order < 1 {
        return Err(Error::InvalidArgument("rotation order must be >= 1".into()));
    }
    Ok(RotationSpec { order })
}

impl RotationSpec {
    pub fn assemble(&self, dim: usize) -> Result<FockOperator> {
        check_dim(dim)?;
        let mut diag = vec![C64::new(0.0, 0.0); dim];
        for k in 0..self.order {
            let r = fock::rotation(2.0 * std::f64::consts::PI * k as f64 / self.order as f64, dim)?;
            for (n, d) in diag.iter_mut().enumerate() {
                *d += r.get(n, n) / self.order as f64;
            }
        }
        // the average is the indicator of n = 0 mod order; snap roundoff
        for d in diag.iter_mut() {
            *d = C64::new(d.re.round(), 0.0);
        }
        FockOperator::from_diagonal(diag, OperatorKind::Hermitian)
    }

    pub fn project(&self, state: &FockState) -> Result<ProjectionOutcome> {
        let p = self.assemble(state.dim())?;
        let (out, q) = match state.transform(&p) {
            Ok(x) => x,
            Err(Error::DegenerateInput(_)) => return Err(Error::ProjectionAnnihilated(0.0)),
            Err(e) => return Err(e),
        };
        if !(q > Q_FLOOR) {
            return Err(Error::ProjectionAnnihilated(q));
        }
        Ok(ProjectionOutcome {
            state: out,
            q,
            retained: 1.0,
        })
    }
}
