//! Ancilla qubit coupled to the truncated oscillator.

pub(crate) mod hadamard;
mod lcu;

pub use hadamard::{branch_operator_matrix, hadamard_test_exact, HadamardOutcome};
pub use lcu::{
    binomial_width, binomial_widths, branch_operator, lcu_project, lcu_step, min_repetitions,
    LcuConfig,
};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fock::{FockState, StateRepr, C64};

/// 2x2 ancilla gate, row-major.
pub type Gate2 = [[C64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum HybridRepr {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

/// Ancilla (x) register on `2 dim` levels. Index `a * dim + n` holds ancilla
/// bit `a` and photon number `n`: the whole `|0>` block comes first.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridState {
    dim: usize,
    repr: HybridRepr,
}

fn mix(u: &Gate2, x: &[DVector<C64>; 2]) -> [DVector<C64>; 2] {
    [
        &x[0] * u[0][0] + &x[1] * u[0][1],
        &x[0] * u[1][0] + &x[1] * u[1][1],
    ]
}

impl HybridState {
    /// `ancilla (x) register`; the ancilla amplitudes are normalized here.
    pub fn product(ancilla: [C64; 2], register: &FockState) -> Result<Self> {
        let dim = register.dim();
        let an = (ancilla[0].norm_sqr() + ancilla[1].norm_sqr()).sqrt();
        if !(an > 0.0) {
            return Err(Error::DegenerateInput("ancilla amplitudes vanish".into()));
        }
        let a = [ancilla[0] / an, ancilla[1] / an];
        let repr = match register.repr() {
            StateRepr::Pure(v) => {
                let mut w = DVector::zeros(2 * dim);
                w.rows_mut(0, dim).copy_from(&(v * a[0]));
                w.rows_mut(dim, dim).copy_from(&(v * a[1]));
                HybridRepr::Pure(w)
            }
            StateRepr::Mixed(r) => {
                let mut w = DMatrix::zeros(2 * dim, 2 * dim);
                for i in 0..2 {
                    for j in 0..2 {
                        w.view_mut((i * dim, j * dim), (dim, dim))
                            .copy_from(&(r * (a[i] * a[j].conj())));
                    }
                }
                HybridRepr::Mixed(w)
            }
        };
        Ok(Self { dim, repr })
    }

    /// Ancilla in `|0>`.
    pub fn from_register(register: &FockState) -> Result<Self> {
        Self::product([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], register)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &HybridRepr {
        &self.repr
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, HybridRepr::Pure(_))
    }

    /// Norm squared (pure) or trace (mixed).
    pub fn trace(&self) -> f64 {
        match &self.repr {
            HybridRepr::Pure(v) => v.norm_squared(),
            HybridRepr::Mixed(m) => m.trace().re,
        }
    }

    fn halves(v: &DVector<C64>, dim: usize) -> [DVector<C64>; 2] {
        [v.rows(0, dim).into_owned(), v.rows(dim, dim).into_owned()]
    }

    fn join(x: [DVector<C64>; 2]) -> DVector<C64> {
        let dim = x[0].len();
        let mut w = DVector::zeros(2 * dim);
        w.rows_mut(0, dim).copy_from(&x[0]);
        w.rows_mut(dim, dim).copy_from(&x[1]);
        w
    }

    /// Block `rho_{ij}` of a mixed state.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<C64> {
        let d = self.dim;
        match &self.repr {
            HybridRepr::Pure(v) => {
                let x = Self::halves(v, d);
                &x[i] * x[j].adjoint()
            }
            HybridRepr::Mixed(m) => m.view((i * d, j * d), (d, d)).into_owned(),
        }
    }

    pub fn to_mixed(&self) -> Self {
        match &self.repr {
            HybridRepr::Pure(v) => Self {
                dim: self.dim,
                repr: HybridRepr::Mixed(v * v.adjoint()),
            },
            HybridRepr::Mixed(_) => self.clone(),
        }
    }

    pub fn apply_ancilla(&mut self, u: &Gate2) {
        let d = self.dim;
        match &mut self.repr {
            HybridRepr::Pure(v) => {
                let x = Self::halves(v, d);
                *v = Self::join(mix(u, &x));
            }
            HybridRepr::Mixed(m) => {
                let b = |i: usize, j: usize| m.view((i * d, j * d), (d, d)).into_owned();
                let old = [[b(0, 0), b(0, 1)], [b(1, 0), b(1, 1)]];
                for i in 0..2 {
                    for j in 0..2 {
                        let mut acc = DMatrix::<C64>::zeros(d, d);
                        for (k, row) in old.iter().enumerate() {
                            for (l, blk) in row.iter().enumerate() {
                                let c = u[i][k] * u[j][l].conj();
                                if c != C64::new(0.0, 0.0) {
                                    acc += blk * c;
                                }
                            }
                        }
                        m.view_mut((i * d, j * d), (d, d)).copy_from(&acc);
                    }
                }
            }
        }
    }

    /// Apply `op` to the register of the ancilla-`|1>` branch.
    pub fn apply_controlled(&mut self, op: &DMatrix<C64>) -> Result<()> {
        self.apply_blockwise([None, Some(op)])
    }

    /// Apply `op` to the register unconditionally.
    pub fn apply_register(&mut self, op: &DMatrix<C64>) -> Result<()> {
        self.apply_blockwise([Some(op), Some(op)])
    }

    pub(crate) fn apply_blockwise(&mut self, ops: [Option<&DMatrix<C64>>; 2]) -> Result<()> {
        let d = self.dim;
        for op in ops.iter().flatten() {
            if op.nrows() != d || op.ncols() != d {
                return Err(Error::DimensionMismatch { left: op.nrows(), right: d });
            }
        }
        match &mut self.repr {
            HybridRepr::Pure(v) => {
                for (a, op) in ops.iter().enumerate() {
                    if let Some(op) = op {
                        let x = *op * v.rows(a * d, d);
                        v.rows_mut(a * d, d).copy_from(&x);
                    }
                }
            }
            HybridRepr::Mixed(m) => {
                for i in 0..2 {
                    for j in 0..2 {
                        let mut blk = m.view((i * d, j * d), (d, d)).into_owned();
                        if let Some(op) = ops[i] {
                            blk = op * blk;
                        }
                        if let Some(op) = ops[j] {
                            blk *= op.adjoint();
                        }
                        m.view_mut((i * d, j * d), (d, d)).copy_from(&blk);
                    }
                }
            }
        }
        Ok(())
    }

    /// Shrink the ancilla coherences `rho_01`, `rho_10` by `e`; the state
    /// becomes mixed.
    pub fn dephase_ancilla(&mut self, e: f64) {
        if e == 1.0 {
            return;
        }
        *self = self.to_mixed();
        let d = self.dim;
        if let HybridRepr::Mixed(m) = &mut self.repr {
            for (i, j) in [(0, 1), (1, 0)] {
                let blk = m.view((i * d, j * d), (d, d)).map(|z| z * e);
                m.view_mut((i * d, j * d), (d, d)).copy_from(&blk);
            }
        }
    }

    /// `(<X (x) I>, <X (x) O>)` for Hermitian `O` (identity when `None`).
    pub fn ancilla_x(&self, obs: Option<&DMatrix<C64>>) -> (f64, f64) {
        let d = self.dim;
        match &self.repr {
            HybridRepr::Pure(v) => {
                let (v0, v1) = (v.rows(0, d), v.rows(d, d));
                let x = 2.0 * v0.dotc(&v1).re;
                let xo = match obs {
                    Some(o) => 2.0 * v0.dotc(&(o * v1)).re,
                    None => x,
                };
                (x, xo)
            }
            HybridRepr::Mixed(m) => {
                let r10 = m.view((d, 0), (d, d));
                let x = 2.0 * r10.trace().re;
                let xo = match obs {
                    Some(o) => 2.0 * (o * r10).trace().re,
                    None => x,
                };
                (x, xo)
            }
        }
    }

    /// Probability of reading `bit` on the ancilla in the Z basis.
    pub fn z_probability(&self, bit: u8) -> f64 {
        let d = self.dim;
        let a = bit as usize;
        match &self.repr {
            HybridRepr::Pure(v) => v.rows(a * d, d).norm_squared(),
            HybridRepr::Mixed(m) => m.view((a * d, a * d), (d, d)).trace().re,
        }
    }

    /// Measure the ancilla in Z and keep outcome `bit`: returns the
    /// renormalized register and the branch probability.
    pub fn postselect(&self, bit: u8, floor: f64) -> Result<(FockState, f64)> {
        if bit > 1 {
            return Err(Error::InvalidArgument(format!("ancilla bit must be 0 or 1, got {bit}")));
        }
        let p = self.z_probability(bit) / self.trace();
        if !(p >= floor) {
            return Err(Error::PostselectAnnihilated(p));
        }
        let d = self.dim;
        let a = bit as usize;
        let reg = match &self.repr {
            HybridRepr::Pure(v) => FockState::pure(v.rows(a * d, d).into_owned())?,
            HybridRepr::Mixed(m) => FockState::mixed(m.view((a * d, a * d), (d, d)).into_owned())?,
        };
        Ok((reg, p))
    }

    /// Register state with the ancilla traced out.
    pub fn register(&self) -> Result<FockState> {
        let d = self.dim;
        match &self.repr {
            HybridRepr::Pure(v) => {
                let (n0, n1) = (v.rows(0, d).norm_squared(), v.rows(d, d).norm_squared());
                // product with a basis ancilla stays pure
                if n1 == 0.0 {
                    return FockState::pure(v.rows(0, d).into_owned());
                }
                if n0 == 0.0 {
                    return FockState::pure(v.rows(d, d).into_owned());
                }
                FockState::mixed(self.block(0, 0) + self.block(1, 1))
            }
            HybridRepr::Mixed(_) => FockState::mixed(self.block(0, 0) + self.block(1, 1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fidelity;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn layout_and_postselection() {
        let reg = FockState::basis(1, 4).unwrap();
        let h = HybridState::product([c(0.6), c(0.8)], &reg).unwrap();
        match h.repr() {
            HybridRepr::Pure(v) => {
                assert!((v[1].re - 0.6).abs() < 1e-15 && (v[5].re - 0.8).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
        let (r, p) = h.postselect(1, 1e-12).unwrap();
        assert!((p - 0.64).abs() < 1e-14);
        assert!(fidelity(&r, &reg).unwrap() > 1.0 - 1e-14);
        assert!((h.z_probability(0) + h.z_probability(1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pure_and_mixed_paths_agree() {
        let reg = crate::codes::squeezed_coherent(0.5, 0.2, 20).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = HybridState::product([c(s), c(s)], &reg).unwrap();
        let mut b = a.to_mixed();
        let had: Gate2 = [[c(s), c(s)], [c(s), c(-s)]];
        let d = crate::fock::displacement_block(C64::new(0.1, 0.3), 20, 20);
        for h in [&mut a, &mut b] {
            h.apply_controlled(&d).unwrap();
            h.apply_ancilla(&had);
        }
        let diff = (a.to_mixed().block(0, 1) - b.block(0, 1)).norm();
        assert!(diff < 1e-13);
        let (xa, _) = a.ancilla_x(None);
        let (xb, _) = b.ancilla_x(None);
        assert!((xa - xb).abs() < 1e-13);
    }

    #[test]
    fn dephasing_scales_coherence_only() {
        let reg = FockState::vacuum(3).unwrap();
        let mut h = HybridState::product([c(1.0), c(1.0)], &reg).unwrap();
        assert!((h.ancilla_x(None).0 - 1.0).abs() < 1e-15);
        h.dephase_ancilla(0.25);
        assert!((h.ancilla_x(None).0 - 0.25).abs() < 1e-15);
        assert!((h.trace() - 1.0).abs() < 1e-15);
    }
}
