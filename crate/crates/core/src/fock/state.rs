use nalgebra::{DMatrix, DVector};

use super::operator::{max_abs, FockOperator};
use super::C64;
use crate::error::{check_dim, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum StateRepr {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// Pure or mixed state on the truncated number basis.
///
/// Constructors normalize; `norm` keeps the norm (pure) or trace (mixed) the
/// input had before normalization, which doubles as a truncation diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    repr: StateRepr,
    norm: f64,
}

impl FockState {
    pub fn pure(amplitudes: DVector<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "state vector has norm {norm:e}"
            )));
        }
        Ok(Self {
            repr: StateRepr::Pure(amplitudes.unscale(norm)),
            norm,
        })
    }

    pub fn mixed(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch {
                left: rho.nrows(),
                right: rho.ncols(),
            });
        }
        check_dim(rho.nrows())?;
        let tr = rho.trace().re;
        if !(tr > 1e-300) || !tr.is_finite() {
            return Err(Error::DegenerateInput(format!(
                "density matrix has trace {tr:e}"
            )));
        }
        Ok(Self {
            repr: StateRepr::Mixed(rho.unscale(tr)),
            norm: tr,
        })
    }

    pub fn basis(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::InvalidArgument(format!(
                "level {n} outside truncation {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Self::pure(v)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::basis(0, dim)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Self::mixed(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            StateRepr::Pure(v) => v.len(),
            StateRepr::Mixed(m) => m.nrows(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, StateRepr::Pure(_))
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    /// Norm (pure) or trace (mixed) before normalization.
    pub fn prior_norm(&self) -> f64 {
        self.norm
    }

    pub fn amplitudes(&self) -> Option<&DVector<C64>> {
        match &self.repr {
            StateRepr::Pure(v) => Some(v),
            StateRepr::Mixed(_) => None,
        }
    }

    pub fn density_matrix(&self) -> DMatrix<C64> {
        match &self.repr {
            StateRepr::Pure(v) => v * v.adjoint(),
            StateRepr::Mixed(m) => m.clone(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        Self {
            repr: StateRepr::Mixed(self.density_matrix()),
            norm: 1.0,
        }
    }

    /// Zero-pad into a larger truncation.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        let old = self.dim();
        if dim < old {
            return Err(Error::InvalidArgument(format!(
                "cannot embed dim {old} state into dim {dim}"
            )));
        }
        let repr = match &self.repr {
            StateRepr::Pure(v) => {
                let mut w = DVector::zeros(dim);
                w.rows_mut(0, old).copy_from(v);
                StateRepr::Pure(w)
            }
            StateRepr::Mixed(m) => {
                let mut w = DMatrix::zeros(dim, dim);
                w.view_mut((0, 0), (old, old)).copy_from(m);
                StateRepr::Mixed(w)
            }
        };
        Ok(Self {
            repr,
            norm: self.norm,
        })
    }

    /// Probability weight on levels `>= level`.
    pub fn tail_weight(&self, level: usize) -> f64 {
        match &self.repr {
            StateRepr::Pure(v) => v.iter().skip(level).map(|z| z.norm_sqr()).sum(),
            StateRepr::Mixed(m) => (level..m.nrows()).map(|k| m[(k, k)].re).sum(),
        }
    }

    /// Deviation from the normalization/Hermiticity/positivity invariants:
    /// returns `(norm_defect, hermiticity_defect, min_eigenvalue)`.
    pub fn invariant_defects(&self) -> (f64, f64, f64) {
        match &self.repr {
            StateRepr::Pure(v) => ((v.norm() - 1.0).abs(), 0.0, 0.0),
            StateRepr::Mixed(m) => {
                let tr = (m.trace() - C64::new(1.0, 0.0)).norm();
                let herm = max_abs(&(m - m.adjoint()));
                let h = (m + m.adjoint()).map(|z| z * 0.5);
                let min = h
                    .symmetric_eigenvalues()
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                (tr, herm, min)
            }
        }
    }

    /// Apply `A` as `A|psi>` or `A rho A^dagger`, without renormalizing the
    /// result; returns the state and the retained norm/trace.
    pub fn transform(&self, op: &FockOperator) -> Result<(Self, f64)> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: self.dim(),
            });
        }
        let m = op.matrix();
        match &self.repr {
            StateRepr::Pure(v) => {
                let w = m * v;
                let p = w.norm_squared();
                Ok((Self::pure(w)?, p))
            }
            StateRepr::Mixed(r) => {
                let w = m * r * m.adjoint();
                let p = w.trace().re;
                Ok((Self::mixed(w)?, p))
            }
        }
    }
}

/// `<psi|O|psi>` or `Tr[O rho]`.
pub fn expectation(state: &FockState, op: &FockOperator) -> Result<C64> {
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: op.dim(),
        });
    }
    let m = op.matrix();
    Ok(match state.repr() {
        StateRepr::Pure(v) => v.dotc(&(m * v)),
        StateRepr::Mixed(r) => trace_product(m, r),
    })
}

/// Real expectation for Hermitian observables, with the imaginary residue
/// reported alongside. Non-Hermitian operators yield the expectation of their
/// Hermitian part.
pub fn expectation_real(state: &FockState, op: &FockOperator) -> Result<(f64, f64)> {
    let e = expectation(state, op)?;
    let residue = if op.kind().is_hermitian() { e.im.abs() } else { 0.0 };
    Ok((e.re, residue))
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Fidelity between two states of which at least one is pure.
pub fn fidelity(s1: &FockState, s2: &FockState) -> Result<f64> {
    if s1.dim() != s2.dim() {
        return Err(Error::DimensionMismatch {
            left: s1.dim(),
            right: s2.dim(),
        });
    }
    let f = match (s1.repr(), s2.repr()) {
        (StateRepr::Pure(a), StateRepr::Pure(b)) => a.dotc(b).norm_sqr(),
        (StateRepr::Pure(a), StateRepr::Mixed(r)) | (StateRepr::Mixed(r), StateRepr::Pure(a)) => {
            a.dotc(&(r * a)).re
        }
        (StateRepr::Mixed(_), StateRepr::Mixed(_)) => {
            return Err(Error::Unsupported(
                "fidelity between two mixed states".into(),
            ))
        }
    };
    Ok(f.clamp(0.0, 1.0))
}
