use super::common::{bad, level_spec, observable, Params};
use super::Table;
use crate::codes::{magic_state, Code};
use crate::error::Result;
use crate::fock::{expectation, FockState};
use crate::noise::{ancilla_decay, AncillaNoise};
use crate::projector::{project, projection_probability, ProjectorSpec};
use crate::sampler::{noise_compensated_probs, run_vqed, Mode, VqedPlan};

fn mode(p: &Params) -> Result<Mode> {
    match p.str_or("mode", "shots") {
        "shots" => Ok(Mode::Shots),
        "exact" => Ok(Mode::Exact),
        other => Err(bad(format!("mode must be shots or exact, got '{other}'"))),
    }
}

// <O> after direct projection of `input` onto `out` levels.
fn direct(code: &Code, input: &FockState, spec: &ProjectorSpec, obs: &str, out: usize) -> Result<f64> {
    let o = project(input, spec, out)?;
    Ok(expectation(&o.state, &observable(code, obs, out)?)?.re)
}

/// `vqed-convergence`: keys `code`, code parameters, `dz_grid` or `s_grid`,
/// `shots`, `seed`, `dim`, optional `out_dim`, `mode` (shots|exact),
/// `observable` (x|y|z|stabilizer, default x).
///
/// The magic state (built on `dim` levels) is estimated on `out_dim`
/// levels. Columns: `level, q, mean_m, stderr_m, z_m, direct, ratio,
/// stderr_ratio, z_ratio, overhead, overhead_rel, q_scaling, scaling_ratio,
/// shots, trunc_delta`; `overhead_rel` and `q_scaling` are relative to the
/// first grid point and `scaling_ratio` is their quotient.
pub fn convergence(p: &Params) -> Result<Table> {
    let code = p.code()?;
    let mut grid = p.levels(&code)?;
    grid.sort_by(f64::total_cmp);
    let dim = p.dim()?;
    let out = p.out_dim()?;
    let shots = p.usize("shots")?;
    let seed = p.seed()?;
    let mode = mode(p)?;
    let obs = p.str_or("observable", "x");
    let input = magic_state(&code, dim)?;
    let input2 = magic_state(&code, 2 * dim)?;
    let wide = input.embed(out)?;
    let o = observable(&code, obs, out)?;
    let mut t = Table::new(
        "vqed-convergence",
        &[
            "level", "q", "mean_m", "stderr_m", "z_m", "direct", "ratio", "stderr_ratio", "z_ratio",
            "overhead", "overhead_rel", "q_scaling", "scaling_ratio", "shots", "trunc_delta",
        ],
        &["direct", "ratio"],
    );
    let mut first: Option<(f64, f64)> = None;
    for level in grid {
        let spec = level_spec(&code, level)?;
        let q = projection_probability(&input, &spec);
        let d = direct(&code, &input, &spec, obs, out)?;
        let d2 = direct(&code, &input2, &spec, obs, 2 * out)?;
        let plan = VqedPlan::single(wide.clone(), spec, o.clone(), shots, seed, mode);
        let r = run_vqed(&plan)?;
        let (q0, ov0) = *first.get_or_insert((q, r.empirical_overhead));
        let rel = r.empirical_overhead / ov0;
        let scaling = (q0 / q).powi(2);
        t.rows.push(vec![
            level,
            q,
            r.mean_m,
            r.stderr_m(),
            (r.mean_m - q) / r.stderr_m(),
            d,
            r.ratio,
            r.stderr_ratio(),
            (r.ratio - d) / r.stderr_ratio(),
            r.empirical_overhead,
            rel,
            scaling,
            rel / scaling,
            shots as f64,
            (d - d2).abs(),
        ]);
    }
    Ok(t)
}

/// `ancilla-noise`: SC keys `xi`, `z`, `dz`, `gamma_grid` (gamma1 = gamma2),
/// `shots`, `seed`, `dim`, optional `out_dim`, `time_unit` (gate time per
/// unit displacement, default 1), `observable` (default stabilizer).
///
/// Each grid point runs three estimators with the same seed: noiseless,
/// noisy with plain sampling and noisy with compensated pair sampling.
/// Columns: `gamma, r, direct, noisy_ratio, noisy_stderr, z_noisy,
/// comp_ratio, comp_stderr, z_comp, overhead_clean, overhead_comp,
/// overhead_ratio, r_sq, r_sq_ratio, trunc_delta`.
pub fn ancilla_noise(p: &Params) -> Result<Table> {
    let code = p.code()?;
    if !matches!(code, Code::Sc(_)) {
        return Err(bad("ancilla-noise is defined for code = sc".into()));
    }
    let dz = p.f64("dz")?;
    let grid = p.list("gamma_grid")?;
    let dim = p.dim()?;
    let out = p.out_dim()?;
    let shots = p.usize("shots")?;
    let seed = p.seed()?;
    let unit = p.f64_or("time_unit", 1.0)?;
    let obs = p.str_or("observable", "stabilizer");
    let input = code.state(0, dim)?;
    let spec = level_spec(&code, dz)?;
    let d = direct(&code, &input, &spec, obs, out)?;
    let d2 = direct(&code, &code.state(0, 2 * dim)?, &spec, obs, 2 * out)?;
    let o = observable(&code, obs, out)?;
    let base = VqedPlan::single(input.embed(out)?, spec.clone(), o, shots, seed, Mode::Shots);
    let clean = run_vqed(&base)?;
    let mut t = Table::new(
        "ancilla-noise",
        &[
            "gamma", "r", "direct", "noisy_ratio", "noisy_stderr", "z_noisy", "comp_ratio", "comp_stderr",
            "z_comp", "overhead_clean", "overhead_comp", "overhead_ratio", "r_sq", "r_sq_ratio",
            "trunc_delta",
        ],
        &["direct", "noisy_ratio", "comp_ratio"],
    );
    for g in grid {
        let noise = AncillaNoise::new(g, g, unit)?;
        let mut noisy = base.clone();
        noisy.noise = noise;
        let plain = run_vqed(&noisy)?;
        let table = noise_compensated_probs(&spec, |a, b| ancilla_decay(a, b, &noise))?;
        let r = table.r;
        noisy.tables = Some(vec![table]);
        let comp = run_vqed(&noisy)?;
        let ratio = comp.empirical_overhead / clean.empirical_overhead;
        t.rows.push(vec![
            g,
            r,
            d,
            plain.ratio,
            plain.stderr_ratio(),
            (plain.ratio - d) / plain.stderr_ratio(),
            comp.ratio,
            comp.stderr_ratio(),
            (comp.ratio - d) / comp.stderr_ratio(),
            clean.empirical_overhead,
            comp.empirical_overhead,
            ratio,
            r * r,
            ratio / (r * r),
            (d - d2).abs(),
        ]);
    }
    Ok(t)
}
