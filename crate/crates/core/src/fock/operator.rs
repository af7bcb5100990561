use std::ops::Mul;

use nalgebra::{DMatrix, DVector};

use super::C64;
use crate::error::{check_dim, Error, Result};

/// What is known about an operator by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Hermitian,
    /// Both unitary and Hermitian, e.g. parity.
    Involution,
    General,
}

impl OperatorKind {
    pub fn is_unitary(self) -> bool {
        matches!(self, OperatorKind::Unitary | OperatorKind::Involution)
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, OperatorKind::Hermitian | OperatorKind::Involution)
    }
}

/// Dense operator on the number basis truncated to `dim` levels.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<C64>,
    kind: OperatorKind,
}

impl FockOperator {
    pub fn new(matrix: DMatrix<C64>, kind: OperatorKind) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: matrix.ncols(),
            });
        }
        check_dim(matrix.nrows())?;
        Ok(Self { matrix, kind })
    }

    pub(crate) fn from_parts(matrix: DMatrix<C64>, kind: OperatorKind) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix, kind }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_parts(DMatrix::identity(dim, dim), OperatorKind::Involution))
    }

    pub fn from_diagonal(diag: Vec<C64>, kind: OperatorKind) -> Result<Self> {
        check_dim(diag.len())?;
        Ok(Self::from_parts(
            DMatrix::from_diagonal(&DVector::from_vec(diag)),
            kind,
        ))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.matrix.adjoint(), self.kind)
    }

    pub fn scale(&self, c: C64) -> Self {
        let phase_only = (c.norm() - 1.0).abs() < 1e-15;
        let real = c.im == 0.0;
        let kind = match self.kind {
            OperatorKind::Involution if phase_only && real => OperatorKind::Involution,
            k if k.is_unitary() && phase_only => OperatorKind::Unitary,
            k if k.is_hermitian() && real => OperatorKind::Hermitian,
            _ => OperatorKind::General,
        };
        Self::from_parts(self.matrix.map(|z| z * c), kind)
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        if self.kind.is_hermitian() {
            return self.clone();
        }
        let m = (&self.matrix + self.matrix.adjoint()).map(|z| z * 0.5);
        Self::from_parts(m, OperatorKind::Hermitian)
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok(&self.matrix * v)
    }

    pub fn compose(&self, rhs: &FockOperator) -> Result<FockOperator> {
        if rhs.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        let kind = if self.kind.is_unitary() && rhs.kind.is_unitary() {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Ok(Self::from_parts(&self.matrix * &rhs.matrix, kind))
    }

    /// `max |U^dagger U - I|` over entries.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let p = self.matrix.adjoint() * &self.matrix;
        max_abs(&(p - DMatrix::<C64>::identity(n, n)))
    }

    /// `max |A - A^dagger|` over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Largest entrywise difference to another operator of the same dim.
    pub fn max_diff(&self, other: &FockOperator) -> f64 {
        assert_eq!(self.dim(), other.dim());
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Spectral norm for Hermitian operators (largest |eigenvalue|).
    pub fn hermitian_norm(&self) -> f64 {
        let h = self.hermitian_part();
        h.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        self.compose(rhs).expect("operator dims must match")
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
