use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codes::{stabilizers, logical_observables, Code, GkpParams, ScParams};
use crate::error::{Error, Result};
use crate::fock::{displacement_block, FockOperator, OperatorKind};
use crate::kv::{self, KvMap};
use crate::projector::{gkp_spec_for, sc_spec_for, ProjectorSpec};

/// Smallest truncation any scenario accepts.
pub const MIN_DIM: usize = 20;

/// Typed access to a scenario's key-value parameters.
pub struct Params<'a> {
    map: &'a KvMap,
}

impl<'a> Params<'a> {
    pub fn new(map: &'a KvMap) -> Self {
        Self { map }
    }

    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        kv::get_f64(self.map, key)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.has(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        kv::get_usize(self.map, key)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        if self.has(key) {
            self.usize(key)
        } else {
            Ok(default)
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        kv::get_u64(self.map, key)
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        let v = kv::get_f64_list(self.map, key)?;
        if v.is_empty() {
            return Err(bad(format!("'{key}' is empty")));
        }
        Ok(v)
    }

    pub fn str_or(&self, key: &str, default: &'a str) -> &'a str {
        self.map.get(key).map(String::as_str).unwrap_or(default)
    }

    pub fn flag_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.map.get(key).map(String::as_str) {
            None => Ok(default),
            Some("1" | "true" | "yes") => Ok(true),
            Some("0" | "false" | "no") => Ok(false),
            Some(v) => Err(bad(format!("'{key}': '{v}' is not a boolean"))),
        }
    }

    pub fn xi(&self) -> Result<f64> {
        self.f64_or("xi", (PI / 2.0).sqrt())
    }

    pub fn dim(&self) -> Result<usize> {
        let d = self.usize("dim")?;
        if d < MIN_DIM {
            return Err(bad(format!("dim {d} below the minimum {MIN_DIM}")));
        }
        Ok(d)
    }

    /// Output truncation, defaulting to twice `dim`.
    pub fn out_dim(&self) -> Result<usize> {
        let d = self.dim()?;
        let o = self.usize_or("out_dim", 2 * d)?;
        if o < d {
            return Err(bad(format!("out_dim {o} below dim {d}")));
        }
        Ok(o)
    }

    /// SC squeezing from `z`, or `-ln(delta_sq)/2` when only `delta_sq` is given.
    pub fn sc_z(&self) -> Result<f64> {
        if self.has("z") {
            self.f64("z")
        } else {
            Ok(-0.5 * self.f64("delta_sq")?.ln())
        }
    }

    pub fn code(&self) -> Result<Code> {
        match self.str_or("code", "") {
            "sc" => Ok(Code::Sc(ScParams::new(self.xi()?, self.sc_z()?)?)),
            "gkp" => Ok(Code::Gkp(GkpParams::rectangular(self.xi()?, self.f64("delta_sq")?)?)),
            "" => Err(Error::Parse {
                line: 0,
                msg: "missing key 'code'".into(),
            }),
            other => Err(bad(format!("code must be sc or gkp, got '{other}'"))),
        }
    }

    /// Projector strength sweep: `dz_grid` for SC, `s_grid` for GKP.
    pub fn levels(&self, code: &Code) -> Result<Vec<f64>> {
        match code {
            Code::Sc(_) => self.list("dz_grid"),
            Code::Gkp(_) => self.list("s_grid"),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.u64("seed")
    }
}

pub fn bad(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

/// Projector reaching `level` (dz for SC, s for GKP).
pub fn level_spec(code: &Code, level: f64) -> Result<ProjectorSpec> {
    match code {
        Code::Sc(p) => sc_spec_for(p.xi, p.z, level),
        Code::Gkp(p) => gkp_spec_for(p.xi, p.delta_sq, level),
    }
}

/// Code reached after projecting at `level`.
pub fn target_code(code: &Code, level: f64) -> Result<Code> {
    Ok(match code {
        Code::Sc(p) => Code::Sc(p.squeezed_by(level)),
        Code::Gkp(p) => Code::Gkp(p.narrowed_by(level)?),
    })
}

/// Hermitian observable by name: `x`, `y`, `z` or `stabilizer` (the first
/// stabilizer).
pub fn observable(code: &Code, name: &str, dim: usize) -> Result<FockOperator> {
    let [x, y, z] = logical_observables(code, dim)?;
    match name {
        "x" => Ok(x),
        "y" => Ok(y),
        "z" => Ok(z),
        "stabilizer" => {
            let (sign, a) = stabilizers(code)[0];
            let d = displacement_block(a, dim, dim);
            let h = (&d + d.adjoint()).map(|v| v * (0.5 * sign));
            FockOperator::new(h, OperatorKind::Hermitian)
        }
        other => Err(bad(format!("unknown observable '{other}'"))),
    }
}

/// Uniform Bloch vector from the seed.
pub fn random_bloch(seed: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - c * c).sqrt();
    [s * phi.cos(), s * phi.sin(), c]
}

pub fn rel(x: f64, reference: f64) -> f64 {
    x / reference - 1.0
}
