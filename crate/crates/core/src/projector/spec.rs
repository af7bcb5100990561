use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{check_finite, Error, Result};
use crate::fock::{C64, I};
use crate::kv;

/// Dropped-weight tolerance for lattice sums.
pub const TAIL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectorKind {
    Identity,
    /// Gaussian weights on `(-1)^l D(i pi l / (2 xi))`.
    Sc,
    /// Gaussian weights on `D(2 xi l1 + i pi l2 / xi)`.
    Gkp,
    /// Exact term list of `(Q0 Q0^dagger)^M` (SC) or
    /// `(Q1 Q1^dagger Q2 Q2^dagger)^M` (GKP).
    BinomialSc,
    BinomialGkp,
}

impl ProjectorKind {
    pub fn name(self) -> &'static str {
        match self {
            ProjectorKind::Identity => "identity",
            ProjectorKind::Sc => "sc",
            ProjectorKind::Gkp => "gkp",
            ProjectorKind::BinomialSc => "binomial-sc",
            ProjectorKind::BinomialGkp => "binomial-gkp",
        }
    }
}

/// One displacement term `weight * sign * D(zeta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub index: (i64, i64),
    pub weight: f64,
    pub sign: f64,
    pub zeta: C64,
}

/// Parameters a spec was generated from; enough to regenerate it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorMeta {
    pub kind: ProjectorKind,
    pub xi: f64,
    /// `(Gamma, Gamma)` for SC, `(Gamma1, Gamma2)` for GKP.
    pub gamma: (f64, f64),
    /// `delta z` for SC, `s` for GKP, when the spec was built from a target.
    pub level: Option<f64>,
    pub cutoff: (usize, usize),
    pub tail_tol: f64,
    /// Binomial specs: `(p0, M)`.
    pub binomial: Option<(f64, usize)>,
}

/// Finite list of signed, weighted displacements on a lattice with
/// generators `steps`: term `(l1, l2)` sits at `l1 steps.0 + l2 steps.1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSpec {
    pub terms: Vec<Term>,
    pub meta: ProjectorMeta,
    pub steps: (C64, C64),
    /// Sign is `(-1)^(l1 * sign_parity.0 + l2 * sign_parity.1)`.
    pub sign_parity: (i64, i64),
}

/// `Gamma = e^z sqrt(e^{2 dz} - 1)`.
pub fn gamma_from_dz(z: f64, dz: f64) -> Result<f64> {
    check_finite("z", z)?;
    check_finite("dz", dz)?;
    if dz <= 0.0 {
        return Err(Error::InvalidArgument(format!("dz must be > 0, got {dz}")));
    }
    Ok(z.exp() * (2.0 * dz).exp_m1().sqrt())
}

/// `Gamma0 = sqrt((s - 1) / delta_sq)`.
pub fn gamma0_from_s(delta_sq: f64, s: f64) -> Result<f64> {
    check_finite("delta_sq", delta_sq)?;
    check_finite("s", s)?;
    if s <= 1.0 {
        return Err(Error::InvalidArgument(format!("s must be > 1, got {s}")));
    }
    if delta_sq <= 0.0 {
        return Err(Error::InvalidArgument(format!("delta_sq must be > 0, got {delta_sq}")));
    }
    Ok(((s - 1.0) / delta_sq).sqrt())
}

// Gaussian weights exp(-(step l)^2 / gamma^2) for |l| <= L, where L is the
// first index whose weight falls below `tail_tol`.
fn gaussian_1d(step: f64, gamma: f64, tail_tol: f64) -> (usize, Vec<f64>) {
    if gamma == 0.0 {
        return (0, vec![1.0]);
    }
    let w = |l: f64| (-(step * l / gamma).powi(2)).exp();
    let mut cutoff = 0usize;
    while w(cutoff as f64) >= tail_tol {
        cutoff += 1;
    }
    let ws = (-(cutoff as i64)..=cutoff as i64).map(|l| w(l as f64)).collect();
    (cutoff, ws)
}

// M-fold convolution of [p0 p1, p0^2 + p1^2, p0 p1], indices -M..=M.
fn binomial_1d(p0: f64, m: usize) -> Vec<f64> {
    let p1 = 1.0 - p0;
    let kernel = [p0 * p1, p0 * p0 + p1 * p1, p0 * p1];
    let mut dist = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; dist.len() + 2];
        for (i, d) in dist.iter().enumerate() {
            for (j, k) in kernel.iter().enumerate() {
                next[i + j] += d * k;
            }
        }
        dist = next;
    }
    dist
}

fn check_gamma(name: &str, g: f64) -> Result<()> {
    check_finite(name, g)?;
    if g < 0.0 {
        return Err(Error::InvalidArgument(format!("{name} must be >= 0, got {g}")));
    }
    Ok(())
}

fn check_tail(tail_tol: f64) -> Result<()> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tail_tol must be in (0,1), got {tail_tol}")));
    }
    Ok(())
}

fn check_xi(xi: f64) -> Result<()> {
    check_finite("xi", xi)?;
    if xi <= 0.0 {
        return Err(Error::InvalidArgument(format!("xi must be > 0, got {xi}")));
    }
    Ok(())
}

impl ProjectorSpec {
    pub fn identity() -> Self {
        Self {
            terms: vec![Term {
                index: (0, 0),
                weight: 1.0,
                sign: 1.0,
                zeta: C64::new(0.0, 0.0),
            }],
            meta: ProjectorMeta {
                kind: ProjectorKind::Identity,
                xi: 1.0,
                gamma: (0.0, 0.0),
                level: None,
                cutoff: (0, 0),
                tail_tol: TAIL_TOL,
                binomial: None,
            },
            steps: (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
            sign_parity: (0, 0),
        }
    }

    // Separable lattice from per-axis weights centred on index 0.
    fn from_axes(
        w1: &[f64],
        w2: &[f64],
        steps: (C64, C64),
        sign_parity: (i64, i64),
        meta: ProjectorMeta,
    ) -> Self {
        let c1 = (w1.len() / 2) as i64;
        let c2 = (w2.len() / 2) as i64;
        let total: f64 = w1.iter().sum::<f64>() * w2.iter().sum::<f64>();
        let mut terms = Vec::with_capacity(w1.len() * w2.len());
        for (i, a) in w1.iter().enumerate() {
            for (j, b) in w2.iter().enumerate() {
                let l1 = i as i64 - c1;
                let l2 = j as i64 - c2;
                let parity = (l1 * sign_parity.0 + l2 * sign_parity.1).rem_euclid(2);
                terms.push(Term {
                    index: (l1, l2),
                    weight: a * b / total,
                    sign: if parity == 0 { 1.0 } else { -1.0 },
                    zeta: steps.0 * l1 as f64 + steps.1 * l2 as f64,
                });
            }
        }
        Self {
            terms,
            meta,
            steps,
            sign_parity,
        }
    }

    pub fn kind(&self) -> ProjectorKind {
        self.meta.kind
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Spec of `P^2`. Lattice displacements compose without a phase, so the
    /// square is again a lattice spec whose weights are the self-convolution.
    pub fn squared(&self) -> Self {
        let mut acc: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for a in &self.terms {
            for b in &self.terms {
                let k = (a.index.0 + b.index.0, a.index.1 + b.index.1);
                *acc.entry(k).or_insert(0.0) += a.weight * a.sign * b.weight * b.sign;
            }
        }
        let terms = acc
            .into_iter()
            .map(|(k, c)| Term {
                index: k,
                weight: c.abs(),
                sign: if c < 0.0 { -1.0 } else { 1.0 },
                zeta: self.steps.0 * k.0 as f64 + self.steps.1 * k.1 as f64,
            })
            .filter(|t| t.weight > 0.0)
            .collect();
        let mut meta = self.meta;
        meta.cutoff = (2 * meta.cutoff.0, 2 * meta.cutoff.1);
        Self {
            terms,
            meta,
            steps: self.steps,
            sign_parity: self.sign_parity,
        }
    }

    /// `(sum of weights - 1, worst l <-> -l asymmetry)`.
    pub fn invariant_defects(&self) -> (f64, f64) {
        let total: f64 = self.terms.iter().map(|t| t.weight).sum();
        let map: BTreeMap<(i64, i64), (f64, f64)> = self
            .terms
            .iter()
            .map(|t| (t.index, (t.weight, t.sign)))
            .collect();
        let asym = self
            .terms
            .iter()
            .map(|t| match map.get(&(-t.index.0, -t.index.1)) {
                Some((w, s)) => (w * s - t.weight * t.sign).abs(),
                None => t.weight,
            })
            .fold(0.0, f64::max);
        ((total - 1.0).abs(), asym)
    }

    /// Plain-text `key = value` form; parsing regenerates the term list.
    pub fn to_kv(&self) -> String {
        let m = &self.meta;
        let mut s = String::new();
        let _ = writeln!(s, "code = {}", m.kind.name());
        let _ = writeln!(s, "xi = {}", m.xi);
        match m.binomial {
            Some((p0, reps)) => {
                let _ = writeln!(s, "p0 = {p0}");
                let _ = writeln!(s, "repetitions = {reps}");
            }
            None => {
                let _ = writeln!(s, "gamma1 = {}", m.gamma.0);
                let _ = writeln!(s, "gamma2 = {}", m.gamma.1);
                let _ = writeln!(s, "tail_tol = {}", m.tail_tol);
            }
        }
        let _ = writeln!(s, "cutoff1 = {}", m.cutoff.0);
        let _ = writeln!(s, "cutoff2 = {}", m.cutoff.1);
        if let Some(l) = m.level {
            let _ = writeln!(s, "level = {l}");
        }
        s
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let map = kv::parse(text)?;
        let code = kv::get_str(&map, "code")?;
        let mut spec = match code {
            "identity" => Self::identity(),
            "sc" => sc_spec(
                kv::get_f64(&map, "xi")?,
                kv::get_f64(&map, "gamma1")?,
                kv::get_f64(&map, "tail_tol")?,
            )?,
            "gkp" => gkp_spec(
                kv::get_f64(&map, "xi")?,
                kv::get_f64(&map, "gamma1")?,
                kv::get_f64(&map, "gamma2")?,
                kv::get_f64(&map, "tail_tol")?,
            )?,
            "binomial-sc" | "binomial-gkp" => {
                let xi = kv::get_f64(&map, "xi")?;
                let p0 = kv::get_f64(&map, "p0")?;
                let reps = kv::get_usize(&map, "repetitions")?;
                if code == "binomial-sc" {
                    binomial_sc_spec(xi, p0, reps)?
                } else {
                    binomial_gkp_spec(xi, p0, reps)?
                }
            }
            other => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("unknown projector code '{other}'"),
                })
            }
        };
        if let Some(v) = map.get("level") {
            spec.meta.level = Some(kv::parse_f64("level", v)?);
        }
        Ok(spec)
    }
}

/// SC smeared projector `sum_l p_l (-1)^l D(i pi l / (2 xi))`,
/// `p_l ~ exp(-(pi l / (2 xi))^2 / Gamma^2)`.
pub fn sc_spec(xi: f64, gamma: f64, tail_tol: f64) -> Result<ProjectorSpec> {
    check_xi(xi)?;
    check_gamma("gamma", gamma)?;
    check_tail(tail_tol)?;
    let step = PI / (2.0 * xi);
    let (cutoff, w) = gaussian_1d(step, gamma, tail_tol);
    let meta = ProjectorMeta {
        kind: ProjectorKind::Sc,
        xi,
        gamma: (gamma, gamma),
        level: None,
        cutoff: (cutoff, 0),
        tail_tol,
        binomial: None,
    };
    Ok(ProjectorSpec::from_axes(
        &w,
        &[1.0],
        (I * step, C64::new(0.0, 0.0)),
        (1, 0),
        meta,
    ))
}

/// SC projector raising the squeezing of `|xi, z>` by `dz`.
pub fn sc_spec_for(xi: f64, z: f64, dz: f64) -> Result<ProjectorSpec> {
    let mut spec = sc_spec(xi, gamma_from_dz(z, dz)?, TAIL_TOL)?;
    spec.meta.level = Some(dz);
    Ok(spec)
}

/// GKP smeared projector `sum p_{l1} p_{l2} D(2 xi l1 + i pi l2 / xi)`.
pub fn gkp_spec(xi: f64, gamma1: f64, gamma2: f64, tail_tol: f64) -> Result<ProjectorSpec> {
    check_xi(xi)?;
    check_gamma("gamma1", gamma1)?;
    check_gamma("gamma2", gamma2)?;
    check_tail(tail_tol)?;
    let (s1, s2) = (2.0 * xi, PI / xi);
    let (c1, w1) = gaussian_1d(s1, gamma1, tail_tol);
    let (c2, w2) = gaussian_1d(s2, gamma2, tail_tol);
    let meta = ProjectorMeta {
        kind: ProjectorKind::Gkp,
        xi,
        gamma: (gamma1, gamma2),
        level: None,
        cutoff: (c1, c2),
        tail_tol,
        binomial: None,
    };
    Ok(ProjectorSpec::from_axes(
        &w1,
        &w2,
        (C64::new(s1, 0.0), I * s2),
        (0, 0),
        meta,
    ))
}

/// GKP projector narrowing the envelope `delta_sq -> delta_sq / s`.
pub fn gkp_spec_for(xi: f64, delta_sq: f64, s: f64) -> Result<ProjectorSpec> {
    let g = gamma0_from_s(delta_sq, s)?;
    let mut spec = gkp_spec(xi, g, g, TAIL_TOL)?;
    spec.meta.level = Some(s);
    Ok(spec)
}

fn check_binomial(p0: f64) -> Result<()> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidArgument(format!("p0 must be in (0,1), got {p0}")));
    }
    Ok(())
}

/// Exact expansion of `(Q0 Q0^dagger)^M`, `Q0 = p0 I - p1 D(i pi / (2 xi))`.
pub fn binomial_sc_spec(xi: f64, p0: f64, m: usize) -> Result<ProjectorSpec> {
    check_xi(xi)?;
    check_binomial(p0)?;
    let w = binomial_1d(p0, m);
    let meta = ProjectorMeta {
        kind: ProjectorKind::BinomialSc,
        xi,
        gamma: (0.0, 0.0),
        level: None,
        cutoff: (m, 0),
        tail_tol: 0.0,
        binomial: Some((p0, m)),
    };
    Ok(ProjectorSpec::from_axes(
        &w,
        &[1.0],
        (I * (PI / (2.0 * xi)), C64::new(0.0, 0.0)),
        (1, 0),
        meta,
    ))
}

/// Exact expansion of `(Q1 Q1^dagger Q2 Q2^dagger)^M` with
/// `Q1 = p0 I + p1 D(2 xi)`, `Q2 = p0 I + p1 D(i pi / xi)`.
pub fn binomial_gkp_spec(xi: f64, p0: f64, m: usize) -> Result<ProjectorSpec> {
    check_xi(xi)?;
    check_binomial(p0)?;
    let w = binomial_1d(p0, m);
    let meta = ProjectorMeta {
        kind: ProjectorKind::BinomialGkp,
        xi,
        gamma: (0.0, 0.0),
        level: None,
        cutoff: (m, m),
        tail_tol: 0.0,
        binomial: Some((p0, m)),
    };
    Ok(ProjectorSpec::from_axes(
        &w,
        &w,
        (C64::new(2.0 * xi, 0.0), I * (PI / xi)),
        (0, 0),
        meta,
    ))
}
