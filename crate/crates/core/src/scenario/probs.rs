use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use super::common::{level_spec, rel, target_code, Params};
use super::Table;
use crate::codes::{
    decay_factors, logical_expectations, magic_state, sc_state, squeezed_coherent, gkp_state, Code,
    GkpParams, ScParams,
};
use crate::error::Result;
use crate::fock::{expectation, quadratures, FockState};
use crate::projector::{
    gamma0_from_s, gamma_from_dz, gkp_spec_for, gkp_validity, lattice_cutoff, project,
    projection_probability, q_analytic_gkp, q_analytic_sc, q_sum_gkp, q_sum_sc, sc_spec_for,
    vacuum_dz, vacuum_project, validity, TAIL_TOL,
};

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn par_rows<F>(grid: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    grid.par_iter().map(|&v| f(v)).collect()
}

/// `fig2`: keys `delta_sq`, `dz_grid`, `dim`, optional `xi`.
///
/// Columns: `dz, q_inv_sc, ref_sc, dev_sc, q_inv_gkp, ref_gkp, dev_gkp,
/// trunc_delta`. GKP is projected at `s = e^{2 dz}`.
pub fn fig2(p: &Params) -> Result<Table> {
    let delta_sq = p.f64("delta_sq")?;
    let xi = p.xi()?;
    let z = -0.5 * delta_sq.ln();
    let grid = p.list("dz_grid")?;
    let dim = p.dim()?;
    let sc = Code::Sc(ScParams::new(xi, z)?);
    let gkp = Code::Gkp(GkpParams::rectangular(xi, delta_sq)?);
    let states = [
        (magic_state(&sc, dim)?, magic_state(&gkp, dim)?),
        (magic_state(&sc, 2 * dim)?, magic_state(&gkp, 2 * dim)?),
    ];
    let mut t = Table::new(
        "fig2",
        &["dz", "q_inv_sc", "ref_sc", "dev_sc", "q_inv_gkp", "ref_gkp", "dev_gkp", "trunc_delta"],
        &["q_inv_sc", "ref_sc", "q_inv_gkp", "ref_gkp"],
    );
    t.rows = par_rows(&grid, |dz| {
        let s_spec = sc_spec_for(xi, z, dz)?;
        let g_spec = gkp_spec_for(xi, delta_sq, (2.0 * dz).exp())?;
        let q = |k: usize| {
            (
                projection_probability(&states[k].0, &s_spec),
                projection_probability(&states[k].1, &g_spec),
            )
        };
        let ((qs, qg), (qs2, qg2)) = (q(0), q(1));
        let (rs, rg) = (dz.exp(), (2.0 * dz).exp());
        Ok(vec![
            dz,
            1.0 / qs,
            rs,
            rel(1.0 / qs, rs),
            1.0 / qg,
            rg,
            rel(1.0 / qg, rg),
            (qs - qs2).abs().max((qg - qg2).abs()),
        ])
    })?;
    Ok(t)
}

/// `sc-prob`: keys `xi`, `z` (or `delta_sq`), `dz_grid`, `dim`.
///
/// Columns: `dz, q_sum, q_dense, q_ref, dev_ref, dev_dense, cond1,
/// cond1_margin, cond2, cond2_margin, trunc_delta`. The dense value is the
/// projection probability of the even squeezed cat.
pub fn sc_prob(p: &Params) -> Result<Table> {
    let xi = p.xi()?;
    let z = p.sc_z()?;
    let grid = p.list("dz_grid")?;
    let dim = p.dim()?;
    let code = ScParams::new(xi, z)?;
    let states = [sc_state(&code, 0, dim)?, sc_state(&code, 0, 2 * dim)?];
    let mut t = Table::new(
        "sc-prob",
        &[
            "dz", "q_sum", "q_dense", "q_ref", "dev_ref", "dev_dense", "cond1", "cond1_margin",
            "cond2", "cond2_margin", "trunc_delta",
        ],
        &["q_sum", "q_dense", "q_ref"],
    );
    t.rows = par_rows(&grid, |dz| {
        let g = gamma_from_dz(z, dz)?;
        let step = std::f64::consts::PI / (2.0 * xi);
        let q_sum = q_sum_sc(xi, g, z, lattice_cutoff(step, g, TAIL_TOL))?;
        let spec = sc_spec_for(xi, z, dz)?;
        let qd = projection_probability(&states[0], &spec);
        let qd2 = projection_probability(&states[1], &spec);
        let q_ref = q_analytic_sc(dz);
        let v = validity(xi, z, dz);
        Ok(vec![
            dz,
            q_sum,
            qd,
            q_ref,
            rel(q_sum, q_ref),
            rel(q_sum, qd),
            flag(v.cond1),
            v.cond1_margin,
            flag(v.cond2),
            v.cond2_margin,
            (qd - qd2).abs(),
        ])
    })?;
    Ok(t)
}

/// `gkp-prob`: keys `delta_sq`, `s_grid`, `dim`, optional `xi`.
///
/// Columns: `s, q_sum, q_dense, q_ref, dev_ref, dev_dense, valid,
/// valid_margin, trunc_delta`. The dense value uses the `|0_L>` state.
pub fn gkp_prob(p: &Params) -> Result<Table> {
    let xi = p.xi()?;
    let delta_sq = p.f64("delta_sq")?;
    let grid = p.list("s_grid")?;
    let dim = p.dim()?;
    let code = GkpParams::rectangular(xi, delta_sq)?;
    let states = [gkp_state(&code, 0, dim)?, gkp_state(&code, 0, 2 * dim)?];
    let mut t = Table::new(
        "gkp-prob",
        &["s", "q_sum", "q_dense", "q_ref", "dev_ref", "dev_dense", "valid", "valid_margin", "trunc_delta"],
        &["q_sum", "q_dense", "q_ref"],
    );
    t.rows = par_rows(&grid, |s| {
        let g = gamma0_from_s(delta_sq, s)?;
        let pi_xi = std::f64::consts::PI / xi;
        let cutoff = lattice_cutoff(2.0 * xi, g, TAIL_TOL).max(lattice_cutoff(pi_xi, g, TAIL_TOL));
        let q_sum = q_sum_gkp(xi, g, delta_sq, cutoff)?;
        let spec = gkp_spec_for(xi, delta_sq, s)?;
        let qd = projection_probability(&states[0], &spec);
        let qd2 = projection_probability(&states[1], &spec);
        let q_ref = q_analytic_gkp(s);
        let (ok, margin) = gkp_validity(xi, delta_sq, s);
        Ok(vec![
            s,
            q_sum,
            qd,
            q_ref,
            rel(q_sum, q_ref),
            rel(q_sum, qd),
            flag(ok),
            margin,
            (qd - qd2).abs(),
        ])
    })?;
    Ok(t)
}

fn projected_paulis(code: &Code, input: &FockState, level: f64, out: usize) -> Result<([f64; 3], f64)> {
    let o = project(input, &level_spec(code, level)?, out)?;
    Ok((logical_expectations(code, &o.state)?, o.q))
}

/// `logical-pauli`: keys `code`, code parameters, `dz_grid` or `s_grid`,
/// `dim`, optional `out_dim`.
///
/// Columns: `level, x, y, z, x_ref, y_ref, z_ref, dev_x, dev_y, q,
/// trunc_delta`. The input is the magic state; references are the target
/// level's decay factors times `1/sqrt 2` (zero for `z`).
pub fn logical_pauli(p: &Params) -> Result<Table> {
    let code = p.code()?;
    let grid = p.levels(&code)?;
    let dim = p.dim()?;
    let out = p.out_dim()?;
    let inputs = [magic_state(&code, dim)?, magic_state(&code, 2 * dim)?];
    let mut t = Table::new(
        "logical-pauli",
        &["level", "x", "y", "z", "x_ref", "y_ref", "z_ref", "dev_x", "dev_y", "q", "trunc_delta"],
        &["x", "x_ref", "y", "y_ref"],
    );
    t.rows = par_rows(&grid, |level| {
        let (e, q) = projected_paulis(&code, &inputs[0], level, out)?;
        let (e2, _) = projected_paulis(&code, &inputs[1], level, 2 * out)?;
        let (dx, dy, _) = decay_factors(&target_code(&code, level)?);
        let r = [dx * FRAC_1_SQRT_2, dy * FRAC_1_SQRT_2, 0.0];
        let delta = (0..3).map(|k| (e[k] - e2[k]).abs()).fold(0.0, f64::max);
        Ok(vec![
            level,
            e[0],
            e[1],
            e[2],
            r[0],
            r[1],
            r[2],
            rel(e[0], r[0]),
            rel(e[1], r[1]),
            q,
            delta,
        ])
    })?;
    Ok(t)
}

fn vacuum_point(z: f64, gamma: f64, dim: usize, out: usize, points: usize) -> Result<(f64, f64)> {
    let input = squeezed_coherent(0.0, z, dim)?;
    let o = vacuum_project(&input, gamma, points, out)?;
    let (x, _) = quadratures(out)?;
    let x2 = expectation(&o.state, &x.compose(&x)?)?.re;
    Ok((-0.5 * (2.0 * x2).ln() - z, o.q))
}

/// `vacuum-exact`: keys `z_grid`, `gamma_grid`, `dim`, optional `out_dim`,
/// `points` (quadrature nodes, default 128).
///
/// Columns: `z, gamma, dz_ref, dz, dz_err, q, q_ref, q_err, trunc_delta`;
/// `dz` is read off `<x^2>` of the projected squeezed vacuum.
pub fn vacuum_exact(p: &Params) -> Result<Table> {
    let zs = p.list("z_grid")?;
    let gammas = p.list("gamma_grid")?;
    let dim = p.dim()?;
    let out = p.out_dim()?;
    let points = p.usize_or("points", 128)?;
    let pairs: Vec<(f64, f64)> = zs.iter().flat_map(|&z| gammas.iter().map(move |&g| (z, g))).collect();
    let mut t = Table::new(
        "vacuum-exact",
        &["z", "gamma", "dz_ref", "dz", "dz_err", "q", "q_ref", "q_err", "trunc_delta"],
        &["dz_ref", "dz"],
    );
    t.rows = pairs
        .par_iter()
        .map(|&(z, g)| {
            let (dz, q) = vacuum_point(z, g, dim, out, points)?;
            let (dz2, _) = vacuum_point(z, g, 2 * dim, 2 * out, points)?;
            let dz_ref = vacuum_dz(z, g);
            let q_ref = (-dz_ref).exp();
            Ok(vec![z, g, dz_ref, dz, (dz - dz_ref).abs(), q, q_ref, (q - q_ref).abs(), (dz - dz2).abs()])
        })
        .collect::<Result<_>>()?;
    Ok(t)
}
