//! Squeezed-cat and GKP code states, logical Paulis and finite-squeezing
//! decay factors.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::fock::{self, FockOperator, FockState, OperatorKind, C64, I};

/// Retained-norm tolerance for state constructors.
pub const NORM_TOL: f64 = 1e-6;
/// Largest allowed change of the GKP state when one more comb peak is added.
pub const COMB_TOL: f64 = 1e-8;
/// Envelope weight below which an outer comb peak is dropped.
pub const PEAK_WEIGHT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScParams {
    pub xi: f64,
    pub z: f64,
}

impl ScParams {
    pub fn new(xi: f64, z: f64) -> Result<Self> {
        check_finite("xi", xi)?;
        check_finite("z", z)?;
        if xi <= 0.0 {
            return Err(Error::InvalidArgument(format!("xi must be > 0, got {xi}")));
        }
        Ok(Self { xi, z })
    }

    /// Same code with squeezing `z + dz`.
    pub fn squeezed_by(&self, dz: f64) -> Self {
        Self {
            xi: self.xi,
            z: self.z + dz,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GkpParams {
    /// Position half-spacing; the momentum spacing is `pi / xi`.
    pub xi: f64,
    pub delta_sq: f64,
    /// Peaks `n` in `-comb_peaks..=comb_peaks`.
    pub comb_peaks: usize,
    pub comb_z: f64,
}

impl GkpParams {
    /// Square lattice, `xi = sqrt(pi/2)`.
    pub fn square(delta_sq: f64) -> Result<Self> {
        Self::rectangular((PI / 2.0).sqrt(), delta_sq)
    }

    /// Lattice with position half-spacing `xi`; comb defaults from `delta_sq`.
    pub fn rectangular(xi: f64, delta_sq: f64) -> Result<Self> {
        check_finite("xi", xi)?;
        check_finite("delta_sq", delta_sq)?;
        if xi <= 0.0 {
            return Err(Error::InvalidArgument(format!("xi must be > 0, got {xi}")));
        }
        if delta_sq <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "delta_sq must be > 0, got {delta_sq}"
            )));
        }
        Ok(Self {
            xi,
            delta_sq,
            comb_peaks: default_comb_peaks(xi, delta_sq),
            comb_z: default_comb_z(delta_sq),
        })
    }

    pub fn with_comb(mut self, peaks: usize, comb_z: f64) -> Result<Self> {
        check_finite("comb_z", comb_z)?;
        if peaks < 1 {
            return Err(Error::InvalidArgument("comb_peaks must be >= 1".into()));
        }
        self.comb_peaks = peaks;
        self.comb_z = comb_z;
        Ok(self)
    }

    /// Same lattice at envelope `delta_sq / s`, comb re-derived.
    pub fn narrowed_by(&self, s: f64) -> Result<Self> {
        Self::rectangular(self.xi, self.delta_sq / s)
    }
}

/// Peak squeezing for the comb: `e^{-2 comb_z} = delta_sq / 1000`.
pub fn default_comb_z(delta_sq: f64) -> f64 {
    -0.5 * (delta_sq / 1000.0).ln()
}

/// Smallest half-count whose outermost peak has envelope weight
/// `exp(-delta_sq (2 K xi)^2)` below `PEAK_WEIGHT`.
pub fn default_comb_peaks(xi: f64, delta_sq: f64) -> usize {
    let reach = (-PEAK_WEIGHT.ln() / delta_sq).sqrt();
    ((reach / (2.0 * xi)).ceil() as usize).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Code {
    Sc(ScParams),
    Gkp(GkpParams),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Sc,
    Gkp,
}

impl Code {
    pub fn kind(&self) -> CodeKind {
        match self {
            Code::Sc(_) => CodeKind::Sc,
            Code::Gkp(_) => CodeKind::Gkp,
        }
    }

    pub fn state(&self, mu: u8, dim: usize) -> Result<FockState> {
        match self {
            Code::Sc(p) => sc_state(p, mu, dim),
            Code::Gkp(p) => gkp_state(p, mu, dim),
        }
    }
}

/// Fock coefficients `<n|D(alpha)S(r)|0>`, `n < len`, for real `r`.
///
/// `D S |0>` is annihilated by `a cosh r + a^dagger sinh r - beta`, which gives
/// `cosh r sqrt(n+1) c_{n+1} = beta c_n - sinh r sqrt(n) c_{n-1}`. The running
/// values are kept with a separate log scale so far peaks, whose low
/// coefficients are below the float range, come out right.
pub fn squeezed_coherent_coeffs(alpha: C64, r: f64, len: usize) -> Vec<C64> {
    let (ch, sh) = (r.cosh(), r.sinh());
    let beta = alpha * ch + alpha.conj() * sh;
    // ln c_0 = -|alpha|^2/2 - conj(alpha)^2 tanh(r)/2 - ln(cosh r)/2
    let ln_c0 = -0.5 * alpha.norm_sqr() - 0.5 * alpha.conj().powi(2) * r.tanh()
        - C64::new(0.5 * ch.ln(), 0.0);
    let mut c = vec![C64::new(0.0, 0.0); len];
    if len == 0 {
        return c;
    }
    let mut log_scale = vec![0.0f64; len];
    c[0] = C64::from_polar(1.0, ln_c0.im);
    let mut scale = ln_c0.re;
    log_scale[0] = scale;
    let (mut prev, mut cur) = (C64::new(0.0, 0.0), c[0]);
    for n in 0..len - 1 {
        let nf = n as f64;
        let mut next = (beta * cur - sh * nf.sqrt() * prev) / (ch * (nf + 1.0).sqrt());
        let mag = next.norm().max(cur.norm());
        if mag > 1e100 || (mag < 1e-100 && mag > 0.0) {
            let s = mag.ln();
            next /= mag;
            cur /= mag;
            scale += s;
        }
        prev = cur;
        cur = next;
        c[n + 1] = cur;
        log_scale[n + 1] = scale;
    }
    for (v, s) in c.iter_mut().zip(&log_scale) {
        *v *= s.exp();
    }
    c
}

/// `D(xi) S(z) |0>` on `dim` levels.
pub fn squeezed_coherent(xi: f64, z: f64, dim: usize) -> Result<FockState> {
    check_dim(dim)?;
    check_finite("xi", xi)?;
    check_finite("z", z)?;
    let c = squeezed_coherent_coeffs(C64::new(xi, 0.0), z, dim);
    let v = DVector::from_vec(c);
    let retained = v.norm();
    if retained < 1.0 - NORM_TOL {
        return Err(Error::TruncationOverflow {
            dim,
            retained,
            tol: NORM_TOL,
        });
    }
    FockState::pure(v)
}

/// Squeezed cat `|xi,z> + (-1)^mu |-xi,z>`, normalized exactly.
pub fn sc_state(p: &ScParams, mu: u8, dim: usize) -> Result<FockState> {
    check_mu(mu)?;
    let plus = squeezed_coherent(p.xi, p.z, dim)?;
    let minus = squeezed_coherent(-p.xi, p.z, dim)?;
    let sign = if mu == 0 { 1.0 } else { -1.0 };
    let v = plus.amplitudes().unwrap() + minus.amplitudes().unwrap().map(|z| z * sign);
    if v.norm() < 1e-6 {
        return Err(Error::DegenerateInput(format!(
            "squeezed-cat branch mu={mu} vanishes at xi={}, z={}",
            p.xi, p.z
        )));
    }
    FockState::pure(v)
}

fn check_mu(mu: u8) -> Result<()> {
    if mu > 1 {
        return Err(Error::InvalidArgument(format!("logical index must be 0 or 1, got {mu}")));
    }
    Ok(())
}

// Enveloped comb with peaks n in -peaks..=peaks, coefficients up to `len`.
fn gkp_coeffs(p: &GkpParams, mu: u8, peaks: usize, len: usize) -> DVector<C64> {
    let mut v = DVector::<C64>::zeros(len);
    let k = peaks as i64;
    for n in -k..=k {
        let alpha = (2 * n + mu as i64) as f64 * p.xi;
        let c = squeezed_coherent_coeffs(C64::new(alpha, 0.0), p.comb_z, len);
        for (dst, src) in v.iter_mut().zip(c) {
            *dst += src;
        }
    }
    for (j, x) in v.iter_mut().enumerate() {
        *x *= (-p.delta_sq * j as f64).exp();
    }
    v
}

/// Approximate GKP state `e^{-delta_sq n} sum_n D((2n+mu) xi) S(comb_z) |0>`.
pub fn gkp_state(p: &GkpParams, mu: u8, dim: usize) -> Result<FockState> {
    check_dim(dim)?;
    check_mu(mu)?;
    let len = 2 * dim;
    let full = gkp_coeffs(p, mu, p.comb_peaks, len);
    let total = full.norm();
    if !(total > 0.0) {
        return Err(Error::DegenerateInput("GKP comb has zero weight".into()));
    }
    let head = full.rows(0, dim).into_owned();
    let retained = head.norm() / total;
    if retained < 1.0 - NORM_TOL {
        return Err(Error::TruncationOverflow {
            dim,
            retained,
            tol: NORM_TOL,
        });
    }
    let wider = gkp_coeffs(p, mu, p.comb_peaks + 1, len);
    let change = (full.unscale(total) - wider.unscale(wider.norm())).norm();
    if change > COMB_TOL {
        return Err(Error::CombNotConverged(change));
    }
    FockState::pure(head)
}

/// Logical Pauli operators of a code; `y = i x z`.
#[derive(Clone, Debug)]
pub struct LogicalSet {
    pub x: FockOperator,
    pub y: FockOperator,
    pub z: FockOperator,
    pub code: CodeKind,
}

impl LogicalSet {
    pub fn ops(&self) -> [&FockOperator; 3] {
        [&self.x, &self.y, &self.z]
    }
}

/// Displacement amplitudes of the logical Paulis `(X, Y, Z)` and their
/// prefactors: each Pauli is `prefactor * D(amplitude)`, except SC `Z` and
/// `Y`, which involve parity.
pub fn gkp_logical_amplitudes(p: &GkpParams) -> [C64; 3] {
    let x = C64::new(p.xi, 0.0);
    let z = I * (PI / (2.0 * p.xi));
    [x, x + z, z]
}

/// Stabilizer displacements: SC `-D(i pi/(2 xi))`, GKP `D(2 xi)` and
/// `D(i pi / xi)`, as `(sign, amplitude)` pairs.
pub fn stabilizers(code: &Code) -> Vec<(f64, C64)> {
    match code {
        Code::Sc(p) => vec![(-1.0, I * (PI / (2.0 * p.xi)))],
        Code::Gkp(p) => vec![
            (1.0, C64::new(2.0 * p.xi, 0.0)),
            (1.0, I * (PI / p.xi)),
        ],
    }
}

pub fn logical_set(code: &Code, dim: usize) -> Result<LogicalSet> {
    check_dim(dim)?;
    let (x, z) = match code {
        Code::Sc(p) => (
            fock::displacement(I * (PI / (4.0 * p.xi)), dim)?.scale(-I),
            fock::parity(dim)?,
        ),
        Code::Gkp(p) => {
            let [ax, _, az] = gkp_logical_amplitudes(p);
            (fock::displacement(ax, dim)?, fock::displacement(az, dim)?)
        }
    };
    let xz = x.compose(&z)?;
    let y = FockOperator::new(xz.into_matrix().map(|v| v * I), OperatorKind::Unitary)?;
    Ok(LogicalSet {
        x,
        y,
        z,
        code: code.kind(),
    })
}

/// `(|0_L> + e^{i pi/4} |1_L>)`, normalized.
pub fn magic_state(code: &Code, dim: usize) -> Result<FockState> {
    let zero = code.state(0, dim)?;
    let one = code.state(1, dim)?;
    let phase = C64::from_polar(1.0, PI / 4.0);
    let v = zero.amplitudes().unwrap() + one.amplitudes().unwrap().map(|z| z * phase);
    FockState::pure(v)
}

/// `cos(theta/2)|0_L> + e^{i phi} sin(theta/2)|1_L>` for the Bloch vector
/// `bloch` (normalized here).
pub fn logical_state(code: &Code, bloch: [f64; 3], dim: usize) -> Result<FockState> {
    let r = bloch.iter().map(|b| b * b).sum::<f64>().sqrt();
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("bad Bloch vector {bloch:?}")));
    }
    let theta = (bloch[2] / r).clamp(-1.0, 1.0).acos();
    let phi = bloch[1].atan2(bloch[0]);
    let zero = code.state(0, dim)?;
    let one = code.state(1, dim)?;
    let c1 = C64::from_polar((0.5 * theta).sin(), phi);
    let v = zero.amplitudes().unwrap() * C64::new((0.5 * theta).cos(), 0.0)
        + one.amplitudes().unwrap() * c1;
    FockState::pure(v)
}

/// Ideal logical Bloch vector of the magic state.
pub const MAGIC_BLOCH: [f64; 3] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];

/// Finite-squeezing decay of the logical expectations `(X, Y, Z)`.
pub fn decay_factors(code: &Code) -> (f64, f64, f64) {
    match code {
        Code::Sc(p) => {
            let h = (-0.5 * (PI / (4.0 * p.xi)).powi(2) * (-2.0 * p.z).exp()).exp();
            (h, h, 1.0)
        }
        Code::Gkp(p) => {
            let g1 = (-p.delta_sq * p.xi * p.xi / 2.0).exp();
            let g2 = (-p.delta_sq * p.xi * p.xi).exp();
            (g1, g2, g1)
        }
    }
}

/// Hermitian parts of the logical Paulis built from exact displacement
/// blocks; `<O>` on a state equals `logical_expectations`.
pub fn logical_observables(code: &Code, dim: usize) -> Result<[FockOperator; 3]> {
    check_dim(dim)?;
    let block = |a: C64| fock::displacement_block(a, dim, dim);
    let [x, y, z] = match code {
        Code::Sc(p) => {
            let d = block(I * (PI / (4.0 * p.xi)));
            let mut dp = d.clone();
            for (k, mut col) in dp.column_iter_mut().enumerate() {
                if k % 2 == 1 {
                    col.neg_mut();
                }
            }
            let par = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| {
                C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            }));
            [d.map(|v| v * -I), dp, par]
        }
        Code::Gkp(p) => gkp_logical_amplitudes(p).map(block),
    };
    let herm = |m: nalgebra::DMatrix<C64>| {
        FockOperator::new((&m + m.adjoint()).map(|v| v * 0.5), OperatorKind::Hermitian)
    };
    Ok([herm(x)?, herm(y)?, herm(z)?])
}

/// Real parts of the logical expectations `(X, Y, Z)` on a state, each
/// evaluated with the exact displacement block where a displacement appears.
pub fn logical_expectations(code: &Code, state: &FockState) -> Result<[f64; 3]> {
    let dim = state.dim();
    let rho = state.density_matrix();
    let par: Vec<f64> = (0..dim).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let tr = |d: &nalgebra::DMatrix<C64>, right_parity: bool| -> C64 {
        // Tr[D P rho] or Tr[D rho]
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            for k in 0..dim {
                let s = if right_parity { par[k] } else { 1.0 };
                acc += d[(i, k)] * s * rho[(k, i)];
            }
        }
        acc
    };
    match code {
        Code::Sc(p) => {
            let d = fock::displacement_block(I * (PI / (4.0 * p.xi)), dim, dim);
            let x = -I * tr(&d, false);
            let y = tr(&d, true);
            let z: f64 = (0..dim).map(|n| par[n] * rho[(n, n)].re).sum();
            Ok([x.re, y.re, z])
        }
        Code::Gkp(p) => {
            let amps = gkp_logical_amplitudes(p);
            let mut out = [0.0; 3];
            for (o, a) in out.iter_mut().zip(amps) {
                *o = tr(&fock::displacement_block(a, dim, dim), false).re;
            }
            Ok(out)
        }
    }
}

/// Real parts of the stabilizer expectations, same order as `stabilizers`.
pub fn stabilizer_expectations(code: &Code, state: &FockState) -> Result<Vec<f64>> {
    let dim = state.dim();
    let rho = state.density_matrix();
    stabilizers(code)
        .into_iter()
        .map(|(sign, a)| {
            let d = fock::displacement_block(a, dim, dim);
            Ok(sign * fock::trace_product(&d, &rho).re)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation, fidelity};

    #[test]
    fn coefficients_match_displaced_squeezed_vacuum() {
        // oracle: exact displacement block applied to the closed-form
        // squeezed vacuum (cosh r)^{-1/2} (-tanh r)^m sqrt((2m)!)/(2^m m!)
        let (alpha, r, len) = (C64::new(1.4, -0.6), 0.8f64, 120);
        let mut sv = DVector::<C64>::zeros(len);
        let mut amp = 1.0 / r.cosh().sqrt();
        for m in 0..len / 2 {
            if m > 0 {
                let mf = m as f64;
                amp *= -r.tanh() * ((2.0 * mf) * (2.0 * mf - 1.0)).sqrt() / (2.0 * mf);
            }
            sv[2 * m] = C64::new(amp, 0.0);
        }
        let want = fock::displacement_block(alpha, 60, len) * sv;
        let got = squeezed_coherent_coeffs(alpha, r, 60);
        for n in 0..60 {
            assert!((want[n] - got[n]).norm() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn far_peak_coefficients_are_finite_and_normalized() {
        let c = squeezed_coherent_coeffs(C64::new(25.0, 0.0), 3.0, 6000);
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-9, "norm = {norm}");
    }

    #[test]
    fn vacuum_and_coherent_limits() {
        let v = squeezed_coherent(0.0, 0.0, 8).unwrap();
        assert!((v.amplitudes().unwrap()[0].re - 1.0).abs() < 1e-15);
        let xi = (PI / 2.0).sqrt();
        let c = squeezed_coherent(xi, 0.0, 60).unwrap();
        let n = expectation(&c, &fock::number(60).unwrap()).unwrap().re;
        assert!((n - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn undersized_truncation_overflows() {
        assert!(matches!(
            squeezed_coherent(5.0, 0.0, 10),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn momentum_kick_overlap() {
        let (xi, z, y) = (0.9, 1.2, 0.5);
        let s = squeezed_coherent(xi, z, 120).unwrap();
        let got = fock::characteristic(s.amplitudes().unwrap(), I * y);
        let want = C64::from_polar((-(y * y) * (-2.0 * z).exp() / 2.0).exp(), 2.0 * xi * y);
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn cat_limits() {
        let p = ScParams::new(3.0, 0.0).unwrap();
        let s = sc_state(&p, 0, 80).unwrap();
        let a = squeezed_coherent(3.0, 0.0, 80).unwrap();
        let b = squeezed_coherent(-3.0, 0.0, 80).unwrap();
        let naive = (a.amplitudes().unwrap() + b.amplitudes().unwrap()).map(|z| z * FRAC_1_SQRT_2);
        let f = fidelity(&s, &FockState::pure(naive).unwrap()).unwrap();
        assert!(f > 1.0 - 1e-6);

        let tiny = ScParams { xi: 1e-9, z: 0.0 };
        assert!(matches!(sc_state(&tiny, 1, 10), Err(Error::DegenerateInput(_))));

        let q = ScParams::new(1.2, 0.7).unwrap();
        let even = sc_state(&q, 0, 80).unwrap();
        let z = expectation(&even, &fock::parity(80).unwrap()).unwrap().re;
        assert!((z - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gkp_stabilizer_and_parity() {
        let p = GkpParams::square(0.05).unwrap();
        let code = Code::Gkp(p);
        let s0 = gkp_state(&p, 0, 200).unwrap();
        let sx = stabilizer_expectations(&code, &s0).unwrap();
        let want = (-0.05 * PI).exp();
        assert!((sx[0] / want - 1.0).abs() < 0.02, "S_X = {}", sx[0]);
        assert!((sx[1] / want - 1.0).abs() < 0.02, "S_Z = {}", sx[1]);
        let par = expectation(&s0, &fock::parity(200).unwrap()).unwrap().re;
        assert!((par - 1.0).abs() < 1e-6, "parity = {par}");
        let s1 = gkp_state(&p, 1, 200).unwrap();
        let ov = s0.amplitudes().unwrap().dotc(s1.amplitudes().unwrap()).norm();
        assert!(ov < 1e-3, "overlap = {ov}");
    }

    #[test]
    fn gkp_too_few_peaks_is_reported() {
        let p = GkpParams::square(0.05).unwrap().with_comb(1, default_comb_z(0.05)).unwrap();
        assert!(matches!(gkp_state(&p, 0, 200), Err(Error::CombNotConverged(_))));
    }

    #[test]
    fn logical_algebra() {
        let dim = 80;
        let sc = Code::Sc(ScParams::new((PI / 2.0).sqrt(), 1.0).unwrap());
        let l = logical_set(&sc, dim).unwrap();
        for op in l.ops() {
            assert!(op.unitarity_defect() < 1e-10);
        }
        let xi = (PI / 2.0).sqrt();
        let x2 = l.x.compose(&l.x).unwrap();
        let want = fock::displacement(I * (PI / (2.0 * xi)), dim).unwrap().scale(C64::new(-1.0, 0.0));
        let err = (0..40)
            .flat_map(|m| (0..40).map(move |n| (m, n)))
            .map(|(m, n)| (x2.get(m, n) - want.get(m, n)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "err = {err}");
        for n in 0..dim {
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(l.z.get(n, n), C64::new(want, 0.0));
        }

        let gkp = Code::Gkp(GkpParams::square(0.05).unwrap());
        let g = logical_set(&gkp, 120).unwrap();
        let xz = g.x.compose(&g.z).unwrap();
        let zx = g.z.compose(&g.x).unwrap();
        let err = (0..50)
            .flat_map(|m| (0..50).map(move |n| (m, n)))
            .map(|(m, n)| (xz.get(m, n) + zx.get(m, n)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "anticommutator = {err}");
    }

    #[test]
    fn decay_factor_values() {
        let xi = (PI / 2.0).sqrt();
        let g = decay_factors(&Code::Gkp(GkpParams::square(0.05).unwrap()));
        assert!((g.0 - (-0.05 * PI / 4.0).exp()).abs() < 1e-12);
        assert!((g.1 - (-0.05 * PI / 2.0).exp()).abs() < 1e-12);
        assert!((g.0 - 0.9615).abs() < 1e-4 && (g.1 - 0.9245).abs() < 1e-4);
        let z = -0.5 * 0.05f64.ln();
        let h = decay_factors(&Code::Sc(ScParams::new(xi, z).unwrap()));
        let want = (-0.5 * (PI / (4.0 * xi)).powi(2) * 0.05).exp();
        assert!((h.0 - want).abs() < 1e-12 && h.2 == 1.0);
        let big = decay_factors(&Code::Sc(ScParams::new(xi, 40.0).unwrap()));
        assert!((big.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sc_magic_state_expectations() {
        let xi = (PI / 2.0).sqrt();
        let code = Code::Sc(ScParams::new(xi, -0.5 * 0.05f64.ln()).unwrap());
        let m = magic_state(&code, 150).unwrap();
        let e = logical_expectations(&code, &m).unwrap();
        let (h, _, _) = decay_factors(&code);
        assert!((e[0] / (h * FRAC_1_SQRT_2) - 1.0).abs() < 0.02, "X = {}", e[0]);
        assert!((e[1] / (h * FRAC_1_SQRT_2) - 1.0).abs() < 0.02, "Y = {}", e[1]);
        assert!(e[2].abs() < 1e-8, "Z = {}", e[2]);
    }

    #[test]
    fn observables_match_expectations() {
        let sc = Code::Sc(ScParams::new(1.1, 0.6).unwrap());
        let gkp = Code::Gkp(GkpParams::square(0.2).unwrap());
        for code in [sc, gkp] {
            let s = magic_state(&code, 90).unwrap();
            let want = logical_expectations(&code, &s).unwrap();
            let obs = logical_observables(&code, 90).unwrap();
            for (o, w) in obs.iter().zip(want) {
                assert!((expectation(&s, o).unwrap().re - w).abs() < 1e-12);
                assert!(o.hermiticity_defect() < 1e-15);
            }
        }
    }

    #[test]
    fn logical_state_bloch() {
        let code = Code::Sc(ScParams::new(2.0, 0.8).unwrap());
        let b = [0.36, -0.48, 0.8];
        let s = logical_state(&code, b, 120).unwrap();
        let e = logical_expectations(&code, &s).unwrap();
        let d = decay_factors(&code);
        for (k, dk) in [d.0, d.1, d.2].iter().enumerate() {
            assert!((e[k] - dk * b[k]).abs() < 1e-3, "{k}: {} vs {}", e[k], dk * b[k]);
        }
        let m = logical_state(&code, MAGIC_BLOCH, 120).unwrap();
        assert!(fidelity(&m, &magic_state(&code, 120).unwrap()).unwrap() > 1.0 - 1e-12);
    }
}
