//! Virtual projection: Monte-Carlo ratio estimator over sampled stabilizer
//! pairs and Hadamard tests.

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{displacement_block, trace_product, FockOperator, FockState, StateRepr, C64};
use crate::noise::{ancilla_decay, AncillaNoise};
use crate::projector::{ProjectorSpec, RETAIN_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Ancilla and observable outcomes replaced by their exact conditional
    /// expectations; only the index draws fluctuate.
    Exact,
    /// Ancilla outcomes drawn as +-1 and the observable outcome drawn from
    /// the spectrum of its Hermitian part.
    Shots,
}

/// Row-major `n x n` pair weights for one insertion and their normalizer `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTable {
    pub n: usize,
    pub weights: Vec<f64>,
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct VqedPlan {
    pub input: FockState,
    /// Gate applied before each insertion (`None` for identity).
    pub circuit: Vec<Option<FockOperator>>,
    pub insertions: Vec<ProjectorSpec>,
    pub observable: FockOperator,
    pub shots: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Ancilla decay acting physically on every Hadamard test.
    pub noise: AncillaNoise,
    /// Reweighted pair tables, one per insertion; independent draws from the
    /// spec weights when `None`.
    pub tables: Option<Vec<PairTable>>,
}

impl VqedPlan {
    /// One insertion on `input`, no gates, no noise.
    pub fn single(
        input: FockState,
        spec: ProjectorSpec,
        observable: FockOperator,
        shots: usize,
        seed: u64,
        mode: Mode,
    ) -> Self {
        Self {
            input,
            circuit: vec![None],
            insertions: vec![spec],
            observable,
            shots,
            seed,
            mode,
            noise: AncillaNoise::off(),
            tables: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.insertions.is_empty() {
            return Err(Error::InvalidArgument("plan needs at least one insertion".into()));
        }
        if self.shots < 1 {
            return Err(Error::InvalidArgument("plan needs at least one shot".into()));
        }
        if self.circuit.len() != self.insertions.len() {
            return Err(Error::InvalidArgument(format!(
                "{} gates for {} insertions",
                self.circuit.len(),
                self.insertions.len()
            )));
        }
        let dim = self.input.dim();
        let dims = self
            .circuit
            .iter()
            .flatten()
            .map(|g| g.dim())
            .chain(std::iter::once(self.observable.dim()));
        for d in dims {
            if d != dim {
                return Err(Error::DimensionMismatch { left: d, right: dim });
            }
        }
        if let Some(t) = &self.tables {
            if t.len() != self.insertions.len() {
                return Err(Error::InvalidArgument("one pair table per insertion required".into()));
            }
            for (tab, spec) in t.iter().zip(&self.insertions) {
                if tab.n != spec.len() || tab.weights.len() != tab.n * tab.n {
                    return Err(Error::InvalidArgument("pair table does not match its spec".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorResult {
    pub mean_m: f64,
    pub mean_mo: f64,
    pub ratio: f64,
    /// Variances of the means.
    pub var_m: f64,
    pub var_mo: f64,
    /// Delta-method variance of `ratio`.
    pub var_ratio: f64,
    pub shots: usize,
    /// `var_ratio * shots`: single-shot cost of the ratio.
    pub empirical_overhead: f64,
}

impl EstimatorResult {
    pub fn stderr_m(&self) -> f64 {
        self.var_m.sqrt()
    }

    pub fn stderr_ratio(&self) -> f64 {
        self.var_ratio.sqrt()
    }
}

fn compensation_phase(zl: C64, zlp: C64) -> C64 {
    C64::from_polar(1.0, ((zl - zlp) * zlp.conj()).im)
}

/// Draw `l` and `l'` independently from the spec weights; returns the term
/// indices, `h_l h_l'` and the compensation phase.
pub fn sample_pair<R: Rng + ?Sized>(spec: &ProjectorSpec, rng: &mut R) -> (usize, usize, f64, C64) {
    let w: Vec<f64> = spec.terms.iter().map(|t| t.weight).collect();
    let dist = WeightedIndex::new(&w).expect("spec weights are positive");
    let (l, lp) = (dist.sample(rng), dist.sample(rng));
    let (a, b) = (&spec.terms[l], &spec.terms[lp]);
    (l, lp, a.sign * b.sign, compensation_phase(a.zeta, b.zeta))
}

/// Pair table `p' = p_l p_l' / e / R`, `R = sum p_l p_l' / e`.
pub fn noise_compensated_probs<F>(spec: &ProjectorSpec, decay: F) -> Result<PairTable>
where
    F: Fn(C64, C64) -> f64,
{
    let n = spec.len();
    let mut weights = Vec::with_capacity(n * n);
    for a in &spec.terms {
        for b in &spec.terms {
            let e = decay(a.zeta, b.zeta);
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::InvalidArgument(format!("decay factor {e} outside (0,1]")));
            }
            weights.push(a.weight * b.weight / e);
        }
    }
    let r: f64 = weights.iter().sum();
    let norm: f64 = spec.terms.iter().map(|t| t.weight).sum::<f64>().powi(2);
    for w in weights.iter_mut() {
        *w /= r;
    }
    Ok(PairTable { n, weights, r: r / norm })
}

enum Sampler {
    Independent(WeightedIndex<f64>),
    Table(WeightedIndex<f64>, usize),
}

impl Sampler {
    fn new(spec: &ProjectorSpec, table: Option<&PairTable>) -> Result<Self> {
        let bad = |e| Error::InvalidArgument(format!("bad sampling weights: {e}"));
        Ok(match table {
            Some(t) => Sampler::Table(WeightedIndex::new(&t.weights).map_err(bad)?, t.n),
            None => {
                let w: Vec<f64> = spec.terms.iter().map(|t| t.weight).collect();
                Sampler::Independent(WeightedIndex::new(&w).map_err(bad)?)
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        match self {
            Sampler::Independent(d) => (d.sample(rng), d.sample(rng)),
            Sampler::Table(d, n) => {
                let k = d.sample(rng);
                (k / n, k % n)
            }
        }
    }
}

// Eigenbasis of the observable's Hermitian part.
struct Spectrum {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

// Draw an eigenvalue index from nonnegative weights summing to `total`.
fn draw_level(weights: impl Iterator<Item = f64>, total: f64, u: f64) -> usize {
    let target = u * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, w) in weights.enumerate() {
        if w > 0.0 {
            last = k;
            acc += w;
            if acc > target {
                return k;
            }
        }
    }
    last
}

// Single insertion on a pure state: every branch vector precomputed, in the
// observable's eigenbasis when outcomes are drawn.
struct Branches {
    a: Vec<DVector<C64>>,
    oa: Vec<DVector<C64>>,
    norm: Vec<f64>,
    coef: Vec<DVector<C64>>,
}

impl Branches {
    fn new(
        psi: &DVector<C64>,
        spec: &ProjectorSpec,
        obs: &DMatrix<C64>,
        spectrum: Option<&Spectrum>,
    ) -> Self {
        let dim = psi.len();
        let a: Vec<DVector<C64>> = spec
            .terms
            .par_iter()
            .map(|t| displacement_block(t.zeta, dim, dim) * psi)
            .collect();
        let oa: Vec<DVector<C64>> = a.par_iter().map(|v| obs * v).collect();
        let norm = a.iter().map(|v| v.norm_squared()).collect();
        let coef = match spectrum {
            Some(sp) => {
                let vh = sp.vectors.adjoint();
                a.par_iter().map(|v| &vh * v).collect()
            }
            None => Vec::new(),
        };
        Self { a, oa, norm, coef }
    }
}

struct Engine<'a> {
    plan: &'a VqedPlan,
    samplers: Vec<Sampler>,
    obs: DMatrix<C64>,
    spectrum: Option<Spectrum>,
    fast: Option<Branches>,
}

impl<'a> Engine<'a> {
    fn new(plan: &'a VqedPlan) -> Result<Self> {
        plan.validate()?;
        let samplers = plan
            .insertions
            .iter()
            .enumerate()
            .map(|(k, s)| Sampler::new(s, plan.tables.as_ref().map(|t| &t[k])))
            .collect::<Result<Vec<_>>>()?;
        let obs = plan.observable.hermitian_part().into_matrix();
        let spectrum = match plan.mode {
            Mode::Shots => {
                let e = obs.clone().symmetric_eigen();
                Some(Spectrum {
                    values: e.eigenvalues,
                    vectors: e.eigenvectors,
                })
            }
            Mode::Exact => None,
        };
        let fast = match (plan.insertions.len(), plan.input.repr()) {
            (1, StateRepr::Pure(v)) => {
                let psi = match &plan.circuit[0] {
                    Some(g) => g.apply(v)?,
                    None => v.clone(),
                };
                let b = Branches::new(&psi, &plan.insertions[0], &obs, spectrum.as_ref());
                // weighted norm lost by displacing past the truncation
                let lost: f64 = plan.insertions[0]
                    .terms
                    .iter()
                    .zip(&b.norm)
                    .map(|(t, n)| t.weight * (psi.norm_squared() - n).max(0.0))
                    .sum();
                if lost > RETAIN_TOL {
                    return Err(Error::TruncationOverflow {
                        dim: psi.len(),
                        retained: 1.0 - lost,
                        tol: RETAIN_TOL,
                    });
                }
                Some(b)
            }
            _ => None,
        };
        Ok(Self {
            plan,
            samplers,
            obs,
            spectrum,
            fast,
        })
    }

    fn pair_factor(&self, k: usize, l: usize, lp: usize) -> (f64, f64) {
        let spec = &self.plan.insertions[k];
        let (a, b) = (&spec.terms[l], &spec.terms[lp]);
        (a.sign * b.sign, ancilla_decay(a.zeta, b.zeta, &self.plan.noise))
    }

    fn shot(&self, index: usize) -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.plan.seed);
        rng.set_stream(index as u64);
        let pairs: Vec<(usize, usize)> = self.samplers.iter().map(|s| s.draw(&mut rng)).collect();
        match &self.fast {
            Some(b) => Ok(self.shot_fast(b, pairs[0], &mut rng)),
            None => self.shot_general(&pairs, &mut rng),
        }
    }

    fn shot_fast(&self, b: &Branches, (l, lp): (usize, usize), rng: &mut ChaCha8Rng) -> (f64, f64) {
        let (h, e) = self.pair_factor(0, l, lp);
        // branch 1 carries D(zeta_l), branch 0 carries D(zeta_l')
        let ov = b.a[lp].dotc(&b.a[l]).re;
        match (self.plan.mode, &self.spectrum) {
            (Mode::Shots, Some(sp)) => {
                let base = 0.25 * (b.norm[l] + b.norm[lp]);
                let (pp, pm) = (base + 0.5 * e * ov, base - 0.5 * e * ov);
                let x = if rng.random::<f64>() * (pp + pm) < pp { 1.0 } else { -1.0 };
                let px = if x > 0.0 { pp } else { pm };
                // post-readout register: (|b><b| + |a><a| + x e (|a><b| + h.c.)) / 4
                let (cl, clp) = (&b.coef[l], &b.coef[lp]);
                let w = cl.iter().zip(clp.iter()).map(|(u, v)| {
                    (0.25 * (u.norm_sqr() + v.norm_sqr()) + 0.5 * x * e * (v.conj() * u).re).max(0.0)
                });
                let k = draw_level(w, px, rng.random::<f64>());
                (h * x, h * x * sp.values[k])
            }
            _ => {
                let ovo = b.a[lp].dotc(&b.oa[l]).re;
                (h * e * ov, h * e * ovo)
            }
        }
    }

    fn shot_general(&self, pairs: &[(usize, usize)], rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
        let dim = self.plan.input.dim();
        let mut x = self.plan.input.density_matrix();
        let mut m = 1.0;
        for (k, &(l, lp)) in pairs.iter().enumerate() {
            if let Some(g) = &self.plan.circuit[k] {
                x = g.matrix() * &x * g.matrix().adjoint();
            }
            let spec = &self.plan.insertions[k];
            let bl = displacement_block(spec.terms[l].zeta, dim, dim);
            let blp = displacement_block(spec.terms[lp].zeta, dim, dim);
            let (h, e) = self.pair_factor(k, l, lp);
            let cross = &bl * &x * blp.adjoint();
            let cross = (&cross + cross.adjoint()) * C64::new(0.5 * e, 0.0);
            match self.plan.mode {
                Mode::Exact => {
                    x = cross * C64::new(h, 0.0);
                }
                Mode::Shots => {
                    let diag = (&blp * &x * blp.adjoint() + &bl * &x * bl.adjoint())
                        * C64::new(0.25, 0.0);
                    let half = cross * C64::new(0.5, 0.0);
                    let (pp, pm) = ((diag.trace() + half.trace()).re, (diag.trace() - half.trace()).re);
                    let s = if rng.random::<f64>() * (pp + pm) < pp { 1.0 } else { -1.0 };
                    let px = if s > 0.0 { pp } else { pm };
                    if !(px > 0.0) {
                        return Err(Error::PostselectAnnihilated(px));
                    }
                    x = (diag + half * C64::new(s, 0.0)) * C64::new(1.0 / px, 0.0);
                    m *= h * s;
                }
            }
        }
        Ok(match (self.plan.mode, &self.spectrum) {
            (Mode::Shots, Some(sp)) => {
                let y = sp.vectors.adjoint() * &x * &sp.vectors;
                let w = (0..y.nrows()).map(|k| y[(k, k)].re.max(0.0));
                let total: f64 = (0..y.nrows()).map(|k| y[(k, k)].re.max(0.0)).sum();
                let k = draw_level(w, total, rng.random::<f64>());
                (m, m * sp.values[k])
            }
            _ => (x.trace().re, trace_product(&self.obs, &x).re),
        })
    }
}

/// Run the estimator. Each shot draws from its own ChaCha stream keyed by the
/// shot index, so the result does not depend on the thread schedule.
pub fn run_vqed(plan: &VqedPlan) -> Result<EstimatorResult> {
    let engine = Engine::new(plan)?;
    let samples: Vec<(f64, f64)> = (0..plan.shots)
        .into_par_iter()
        .map(|i| engine.shot(i))
        .collect::<Result<_>>()?;
    summarize(&samples)
}

fn summarize(samples: &[(f64, f64)]) -> Result<EstimatorResult> {
    let n = samples.len() as f64;
    let (mut sm, mut so) = (0.0, 0.0);
    for (m, o) in samples {
        sm += m;
        so += o;
    }
    let (mean_m, mean_mo) = (sm / n, so / n);
    let (mut vm, mut vo, mut cov) = (0.0, 0.0, 0.0);
    for (m, o) in samples {
        let (dm, d_o) = (m - mean_m, o - mean_mo);
        vm += dm * dm;
        vo += d_o * d_o;
        cov += dm * d_o;
    }
    let dof = (n - 1.0).max(1.0);
    let (var_m, var_mo, cov) = (vm / dof / n, vo / dof / n, cov / dof / n);
    let stderr = var_m.sqrt();
    if !(mean_m.abs() > 3.0 * stderr) {
        return Err(Error::DenominatorDegenerate { mean: mean_m, stderr });
    }
    let ratio = mean_mo / mean_m;
    let var_ratio = (var_mo - 2.0 * ratio * cov + ratio * ratio * var_m) / (mean_m * mean_m);
    Ok(EstimatorResult {
        mean_m,
        mean_mo,
        ratio,
        var_m,
        var_mo,
        var_ratio,
        shots: samples.len(),
        empirical_overhead: var_ratio * n,
    })
}

/// Exact `(E[m], E[m o])` by summing over every index combination in exact
/// mode; intended for small specs.
pub fn enumerate_vqed(plan: &VqedPlan) -> Result<(f64, f64)> {
    let mut exact = plan.clone();
    exact.mode = Mode::Exact;
    let engine = Engine::new(&exact)?;
    let sizes: Vec<usize> = exact.insertions.iter().map(|s| s.len()).collect();
    let weight = |k: usize, l: usize, lp: usize| match &exact.tables {
        Some(t) => t[k].weights[l * t[k].n + lp],
        None => exact.insertions[k].terms[l].weight * exact.insertions[k].terms[lp].weight,
    };
    let mut idx = vec![(0usize, 0usize); sizes.len()];
    let (mut num, mut den) = (0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    loop {
        let w: f64 = idx.iter().enumerate().map(|(k, &(l, lp))| weight(k, l, lp)).product();
        let (m, mo) = match &engine.fast {
            Some(b) => engine.shot_fast(b, idx[0], &mut rng),
            None => engine.shot_general(&idx, &mut rng)?,
        };
        den += w * m;
        num += w * mo;
        // odometer over (l, l') of every insertion
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok((den, num));
            }
            idx[k].1 += 1;
            if idx[k].1 == sizes[k] {
                idx[k].1 = 0;
                idx[k].0 += 1;
                if idx[k].0 == sizes[k] {
                    idx[k].0 = 0;
                    k += 1;
                    continue;
                }
            }
            break;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverheadReport {
    pub empirical: f64,
    /// `baseline / q_ref^2`.
    pub predicted: f64,
    /// `empirical / predicted`.
    pub ratio: f64,
}

/// Compare the single-shot variance of the ratio with `baseline / q_ref^2`.
pub fn overhead(result: &EstimatorResult, q_ref: f64, baseline: f64) -> OverheadReport {
    let predicted = baseline / (q_ref * q_ref);
    OverheadReport {
        empirical: result.empirical_overhead,
        predicted,
        ratio: result.empirical_overhead / predicted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{sc_state, ScParams};
    use crate::fock::parity;

    #[test]
    fn identity_insertion() {
        let s = sc_state(&ScParams::new(1.0, 0.5).unwrap(), 0, 60).unwrap();
        let plan = VqedPlan::single(s, ProjectorSpec::identity(), parity(60).unwrap(), 50, 3, Mode::Shots);
        let r = run_vqed(&plan).unwrap();
        assert_eq!(r.mean_m, 1.0);
        assert!((r.ratio - 1.0).abs() < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (l, lp, h, ph) = sample_pair(&ProjectorSpec::identity(), &mut rng);
        assert_eq!((l, lp, h, ph), (0, 0, 1.0, C64::new(1.0, 0.0)));
    }

    #[test]
    fn compensation_table_trivial_cases() {
        let spec = crate::projector::sc_spec(1.0, 2.0, 1e-10).unwrap();
        let t = noise_compensated_probs(&spec, |_, _| 1.0).unwrap();
        assert!((t.r - 1.0).abs() < 1e-12);
        let t2 = noise_compensated_probs(&spec, |_, _| 0.5).unwrap();
        assert!((t2.r - 2.0).abs() < 1e-12);
        for (a, b) in t.weights.iter().zip(&t2.weights) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(noise_compensated_probs(&spec, |_, _| 0.0).is_err());
    }

    #[test]
    fn degenerate_denominator() {
        let r = summarize(&[(1.0, 0.0), (-1.0, 0.0), (1.0, 0.0), (-1.0, 0.0)]);
        assert!(matches!(r, Err(Error::DenominatorDegenerate { .. })));
    }
}
