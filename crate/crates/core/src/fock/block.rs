//! Number-basis matrix elements of the untruncated displacement operator.
//!
//! `exp` of a truncated generator is only faithful for displacements well
//! inside the truncation. Lattice sums reach displacements far outside it,
//! so the projector machinery works with the exact top-left block
//! `<m|D(alpha)|n>`, `m < rows`, `n < cols`, of the infinite-dimensional
//! operator instead. Expectations `<psi|A|psi>` computed from these blocks are
//! exact whenever `psi` is supported inside the block.

use nalgebra::{DMatrix, DVector};

use super::C64;

/// Exact block of `D(alpha)` with the given shape.
///
/// For `m = n + k` the element is
/// `sqrt(n!/m!) alpha^k exp(-|alpha|^2/2) L_n^(k)(|alpha|^2)`; each diagonal
/// `k` is filled by the normalized three-term Laguerre recurrence in `n`,
/// which is stable for positive argument. Elements above the diagonal follow
/// from `<m|D(alpha)|n> = conj(<n|D(-alpha)|m>)`.
pub fn displacement_block(alpha: C64, rows: usize, cols: usize) -> DMatrix<C64> {
    let mut d = DMatrix::<C64>::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let x = alpha.norm_sqr();
    let r = alpha.norm();
    let phase = if r > 0.0 { alpha / r } else { C64::new(1.0, 0.0) };
    let big = rows.max(cols);
    let sq: Vec<f64> = (0..=big + 1).map(|k| (k as f64).sqrt()).collect();
    let mut ln_fact = vec![0.0f64; big + 1];
    for k in 1..=big {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    // phase^k for the lower diagonals, (-conj(phase))^k for the upper ones
    let mut lower_phase = C64::new(1.0, 0.0);
    let mut upper_phase = C64::new(1.0, 0.0);
    let neg_conj = -phase.conj();
    for k in 0..big {
        if k > 0 {
            lower_phase *= phase;
            upper_phase *= neg_conj;
        }
        let lower_len = rows.saturating_sub(k).min(cols);
        let upper_len = if k == 0 { 0 } else { cols.saturating_sub(k).min(rows) };
        if lower_len == 0 && upper_len == 0 {
            continue;
        }
        let len = lower_len.max(upper_len);
        let diag = laguerre_diagonal(k, x, r, len, &sq, &ln_fact);
        for n in 0..lower_len {
            d[(n + k, n)] = lower_phase * diag[n];
        }
        for n in 0..upper_len {
            d[(n, n + k)] = upper_phase * diag[n];
        }
    }
    d
}

// f_n = sqrt(n!/(n+k)!) r^k e^{-x/2} L_n^(k)(x), x = r^2, for n < len.
fn laguerre_diagonal(k: usize, x: f64, r: f64, len: usize, sq: &[f64], ln_fact: &[f64]) -> Vec<f64> {
    let mut f = vec![0.0f64; len];
    let ln_start = if r > 0.0 {
        k as f64 * r.ln() - 0.5 * x - 0.5 * ln_fact[k]
    } else if k == 0 {
        0.0
    } else {
        f64::NEG_INFINITY
    };
    let f0 = ln_start.exp();
    f[0] = f0;
    if len > 1 {
        f[1] = f0 * (1.0 + k as f64 - x) / sq[k + 1];
    }
    for n in 1..len.saturating_sub(1) {
        let nf = n as f64;
        let kf = k as f64;
        f[n + 1] = ((2.0 * nf + 1.0 + kf - x) * f[n] - (nf * (nf + kf)).sqrt() * f[n - 1])
            / ((nf + 1.0) * (nf + 1.0 + kf)).sqrt();
    }
    f
}

/// `<psi|D(alpha)|psi>` for a state supported on the first `psi.len()` levels.
///
/// Streams the diagonals of the block instead of forming it.
pub fn characteristic(psi: &DVector<C64>, alpha: C64) -> C64 {
    let n = psi.len();
    if n == 0 {
        return C64::new(0.0, 0.0);
    }
    let x = alpha.norm_sqr();
    let r = alpha.norm();
    let phase = if r > 0.0 { alpha / r } else { C64::new(1.0, 0.0) };
    let sq: Vec<f64> = (0..=n + 1).map(|k| (k as f64).sqrt()).collect();
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let neg_conj = -phase.conj();
    let (mut lower_phase, mut upper_phase) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        if k > 0 {
            lower_phase *= phase;
            upper_phase *= neg_conj;
        }
        let len = n - k;
        let diag = laguerre_diagonal(k, x, r, len, &sq, &ln_fact);
        // <m|D|m-k> and <m-k|D|m> share the same magnitude
        let (mut lo, mut up) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (j, f) in diag.iter().enumerate() {
            lo += psi[j + k].conj() * psi[j] * *f;
            if k > 0 {
                up += psi[j].conj() * psi[j + k] * *f;
            }
        }
        acc += lower_phase * lo + upper_phase * up;
    }
    acc
}
