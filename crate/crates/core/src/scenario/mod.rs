//! Named reproduction scenarios driven by flat key-value configs.

mod common;
mod loss;
mod probs;
mod svg;
mod vqed;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kv::{self, KvMap};

pub use common::Params;

/// Default bound on the dim vs 2 dim change of each row's headline value.
pub const TRUNC_TOL: f64 = 1e-6;

pub const SCENARIOS: [(&str, &str); 8] = [
    ("fig2", "q^-1 vs dz for SC and GKP magic states"),
    ("sc-prob", "SC lattice-sum probability vs dense and e^-dz"),
    ("gkp-prob", "GKP lattice-sum probability vs dense and 1/s"),
    ("logical-pauli", "logical Pauli expectations after projection vs decay factors"),
    ("photon-loss", "logical Pauli error under photon loss with and without PS"),
    ("vqed-convergence", "virtual PS estimator vs direct projection"),
    ("ancilla-noise", "ancilla decay bias and compensated sampling"),
    ("vacuum-exact", "Gaussian vacuum projector squeezing increment"),
];

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub name: String,
    pub params: KvMap,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn new(name: &str, params: KvMap, output_dir: impl Into<PathBuf>) -> Result<Self> {
        if !SCENARIOS.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidArgument(format!("unknown scenario '{name}'")));
        }
        Ok(Self {
            name: name.to_string(),
            params,
            output_dir: output_dir.into(),
        })
    }

    pub fn from_file(name: &str, path: &Path, output_dir: impl Into<PathBuf>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::new(name, kv::parse(&text)?, output_dir)
    }

    /// Replace or add a parameter.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }
}

/// One row per sweep point, numeric columns, first column the sweep value.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub scenario: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Columns drawn in the SVG plot against the first column.
    pub plot: Vec<String>,
}

impl Table {
    pub(crate) fn new(scenario: &str, columns: &[&str], plot: &[&str]) -> Self {
        Self {
            scenario: scenario.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot: plot.iter().map(|c| c.to_string()).collect(),
        }
    }

    pub fn index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    pub fn column(&self, column: &str) -> Option<Vec<f64>> {
        let k = self.index(column)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn get(&self, row: usize, column: &str) -> Option<f64> {
        Some(self.rows.get(row)?[self.index(column)?])
    }

    /// Sort rows by the leading columns so output never depends on the
    /// evaluation order.
    pub(crate) fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:.11e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_svg(&self) -> String {
        let xs: Vec<f64> = self.rows.iter().map(|r| r[0]).collect();
        let series: Vec<(String, Vec<f64>)> = self
            .plot
            .iter()
            .filter_map(|c| Some((c.clone(), self.column(c)?)))
            .collect();
        svg::line_chart(&self.scenario, &self.columns[0], &xs, &series)
    }
}

/// Run a scenario; fails with `TruncationNotConverged` when any row's
/// `trunc_delta` exceeds `trunc_tol`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Table> {
    let p = Params::new(&cfg.params);
    let mut table = match cfg.name.as_str() {
        "fig2" => probs::fig2(&p)?,
        "sc-prob" => probs::sc_prob(&p)?,
        "gkp-prob" => probs::gkp_prob(&p)?,
        "logical-pauli" => probs::logical_pauli(&p)?,
        "vacuum-exact" => probs::vacuum_exact(&p)?,
        "photon-loss" => loss::photon_loss_scenario(&p)?,
        "vqed-convergence" => vqed::convergence(&p)?,
        "ancilla-noise" => vqed::ancilla_noise(&p)?,
        other => return Err(Error::InvalidArgument(format!("unknown scenario '{other}'"))),
    };
    table.sort();
    for r in &table.rows {
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "{}: non-finite value in row at {}",
                cfg.name, r[0]
            )));
        }
    }
    let tol = p.f64_or("trunc_tol", TRUNC_TOL)?;
    let dim = p.usize("dim")?;
    if let Some(k) = table.index("trunc_delta") {
        for r in &table.rows {
            if r[k] > tol {
                return Err(Error::TruncationNotConverged {
                    what: format!("{} at {} = {}", cfg.name, table.columns[0], r[0]),
                    dim,
                    dim2: 2 * dim,
                    delta: r[k],
                    tol,
                });
            }
        }
    }
    Ok(table)
}

/// Write `<name>.csv` (and `<name>.svg`) into the output directory.
pub fn write_outputs(cfg: &ScenarioConfig, table: &Table, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut out = Vec::new();
    let csv = cfg.output_dir.join(format!("{}.csv", cfg.name));
    std::fs::write(&csv, table.to_csv())?;
    out.push(csv);
    if svg {
        let path = cfg.output_dir.join(format!("{}.svg", cfg.name));
        std::fs::write(&path, table.to_svg())?;
        out.push(path);
    }
    Ok(out)
}

/// Human-readable scenario list.
pub fn list() -> String {
    let mut s = String::new();
    for (n, d) in SCENARIOS {
        let _ = writeln!(s, "{n:<18} {d}");
    }
    s
}
