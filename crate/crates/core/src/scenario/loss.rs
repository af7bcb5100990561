use rayon::prelude::*;

use super::common::{level_spec, random_bloch, Params};
use super::Table;
use crate::codes::{logical_expectations, logical_state, Code};
use crate::error::Result;
use crate::fock::FockState;
use crate::noise::{photon_loss, LossParams};
use crate::projector::{project, rotation_spec};

struct LossPoint {
    raw: [f64; 3],
    ps: [f64; 3],
    rot: Option<[f64; 3]>,
    q: f64,
}

fn loss_point(
    code: &Code,
    input: &FockState,
    level: f64,
    gamma_t: f64,
    out: usize,
    rotation: bool,
) -> Result<LossPoint> {
    let noisy = photon_loss(input, &LossParams::new(gamma_t)?)?;
    let spec = level_spec(code, level)?;
    let raw = logical_expectations(code, &noisy)?;
    let o = project(&noisy, &spec, out)?;
    let ps = logical_expectations(code, &o.state)?;
    let rot = if rotation {
        let r = rotation_spec(2)?.project(&noisy)?;
        let o2 = project(&r.state, &spec, out)?;
        Some(logical_expectations(code, &o2.state)?)
    } else {
        None
    };
    Ok(LossPoint { raw, ps, rot, q: o.q })
}

/// `photon-loss`: keys `code`, code parameters, `level` (dz for SC, s for
/// GKP), `gamma_grid` (loss strengths gamma t), `seed`, `dim`, optional
/// `out_dim`, `rotation` (order-2 rotation projection before PS, default on
/// for GKP).
///
/// The input is the logical state of a seeded random Bloch vector.
/// Columns: `gamma_t, ideal_x, ideal_y, ideal_z`, absolute errors
/// `raw_*`, `ps_*` (and `rot_*`), then `q, trunc_delta`.
pub fn photon_loss_scenario(p: &Params) -> Result<Table> {
    let code = p.code()?;
    let level = p.f64("level")?;
    let grid = p.list("gamma_grid")?;
    let dim = p.dim()?;
    let out = p.out_dim()?;
    let rotation = p.flag_or("rotation", matches!(code, Code::Gkp(_)))?;
    let bloch = random_bloch(p.seed()?);
    let inputs = [logical_state(&code, bloch, dim)?, logical_state(&code, bloch, 2 * dim)?];
    let mut cols = vec![
        "gamma_t", "ideal_x", "ideal_y", "ideal_z", "raw_x", "raw_y", "raw_z", "ps_x", "ps_y", "ps_z",
    ];
    if rotation {
        cols.extend(["rot_x", "rot_y", "rot_z"]);
    }
    cols.extend(["q", "trunc_delta"]);
    let mut t = Table::new("photon-loss", &cols, &["raw_x", "ps_x", "raw_y", "ps_y", "raw_z", "ps_z"]);
    t.rows = grid
        .par_iter()
        .map(|&g| {
            let a = loss_point(&code, &inputs[0], level, g, out, rotation)?;
            let b = loss_point(&code, &inputs[1], level, g, 2 * out, rotation)?;
            let err = |e: [f64; 3]| e.iter().zip(&bloch).map(|(x, i)| (x - i).abs()).collect::<Vec<_>>();
            let mut row = vec![g];
            row.extend(bloch);
            row.extend(err(a.raw));
            row.extend(err(a.ps));
            let mut delta = (0..3).map(|k| (a.ps[k] - b.ps[k]).abs()).fold(0.0, f64::max);
            if let (Some(r), Some(r2)) = (a.rot, b.rot) {
                row.extend(err(r));
                delta = (0..3).map(|k| (r[k] - r2[k]).abs()).fold(delta, f64::max);
            }
            row.push(a.q);
            row.push(delta);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(t)
}
