use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Everything that determines a run. Echoed into the manifest and hashed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub gnuplot: bool,
    pub command: Command,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {} does not match the schema: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Failure::Usage(format!("{name} must be positive, got {x}")))
            }
        };
        if self.threads == Some(0) {
            return Err(Failure::Usage("threads must be at least 1".into()));
        }
        match &self.command {
            Command::Subalg(a) => {
                positive("delta", a.delta)?;
                positive("closure_tol", a.closure_tol)?;
                if let Some(e) = a.eps {
                    positive("eps", e)?;
                }
            }
            Command::Dioph(a) => {
                positive("delta", a.delta)?;
                if a.fixture.is_none() && a.trials == 0 {
                    return Err(Failure::Usage("dioph needs --fixture or --trials > 0".into()));
                }
            }
            Command::Heights(a) => {
                if a.y.is_empty() && a.y_file.is_none() {
                    return Err(Failure::Usage("heights needs --y or --y-file".into()));
                }
            }
            Command::Count(a) => {
                if a.radii.is_empty() {
                    return Err(Failure::Usage("count needs at least one radius".into()));
                }
                positive("eps", a.eps)?;
            }
            Command::Flow(a) => {
                if a.t0 == 0 || a.t1 < a.t0 || a.m == 0 {
                    return Err(Failure::Usage("flow needs 1 ≤ T0 ≤ T1 and M ≥ 1".into()));
                }
            }
            Command::Linnik(a) => {
                if a.r != 3 {
                    return Err(Failure::Usage(format!("only r = 3 is supported, got {}", a.r)));
                }
                if a.grid == 0 {
                    return Err(Failure::Usage("grid must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Command {
    /// Generate a Lie subalgebra from approximate generators.
    Subalg(SubalgArgs),
    /// Exact kernel projection and singular value floors.
    Dioph(DiophArgs),
    /// Stabilizers, discriminants and heights of integral symmetric matrices.
    Heights(HeightsArgs),
    /// SL2(Z) lattice points in norm balls, ball volumes and φ₀ decay.
    Count(CountArgs),
    /// Horocycle discrepancy and genericity on the modular surface.
    Flow(FlowArgs),
    /// Integral points on det = d and their distribution.
    Linnik(LinnikArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Subalg(_) => "subalg",
            Command::Dioph(_) => "dioph",
            Command::Heights(_) => "heights",
            Command::Count(_) => "count",
            Command::Flow(_) => "flow",
            Command::Linnik(_) => "linnik",
        }
    }
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgArgs {
    /// Built-in algebra name or path to an algebra JSON file.
    #[arg(long, default_value = "sl3")]
    #[serde(default = "default_algebra")]
    pub algebra: String,
    /// JSON file with generators (list of coordinate vectors); defaults to the perturbed block-sl2 fixture.
    #[arg(long)]
    #[serde(default)]
    pub generators: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-2)]
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Tilt of the built-in fixture (defaults to δ³/10).
    #[arg(long)]
    #[serde(default)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    #[serde(default = "default_closure_tol")]
    pub closure_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn default_algebra() -> String {
    "sl3".into()
}
fn default_delta() -> f64 {
    1e-2
}
fn default_closure_tol() -> f64 {
    1e-9
}
fn default_cap() -> usize {
    100_000
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiophArgs {
    /// JSON fixture: {"matrix": [[..]], "vector": [..], "delta": x, "bound": optional claimed bound}.
    #[arg(long)]
    #[serde(default)]
    pub fixture: Option<PathBuf>,
    /// Randomized instances (n, m ≤ 5, |entries| ≤ 10) when no fixture is given.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-3)]
    #[serde(default = "default_dioph_delta")]
    pub delta: f64,
}

fn default_dioph_delta() -> f64 {
    1e-3
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightsArgs {
    /// Symmetric integer matrix as rows separated by ';', e.g. "1,0,0;0,1,0;0,0,-1". Repeatable.
    #[arg(long)]
    #[serde(default)]
    pub y: Vec<String>,
    /// JSON file with a list of integer matrices.
    #[arg(long)]
    #[serde(default)]
    pub y_file: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountArgs {
    #[arg(long, value_delimiter = ',', default_value = "10,20,50,100,200")]
    #[serde(default = "default_radii")]
    pub radii: Vec<u64>,
    /// Angular grid size for ball volumes.
    #[arg(long, default_value_t = 256)]
    #[serde(default = "default_points")]
    pub points: usize,
    /// φ₀(u(t)) is fitted over t = 1..=decay_max.
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_decay_max")]
    pub decay_max: u32,
    #[arg(long, default_value_t = 0.1)]
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_radii() -> Vec<u64> {
    vec![10, 20, 50, 100, 200]
}
fn default_points() -> usize {
    256
}
fn default_decay_max() -> u32 {
    1000
}
fn default_eps() -> f64 {
    0.1
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowArgs {
    /// "random" (from --seed) or "x,y,theta".
    #[arg(long, default_value = "random")]
    #[serde(default = "default_x")]
    pub x: String,
    /// "default" or ';'-separated list of height:c,w | bump:x,y,theta,r | const:v.
    #[arg(long, default_value = "default")]
    #[serde(default = "default_f")]
    pub f: String,
    #[arg(long = "T0", default_value_t = 5)]
    #[serde(default = "default_t0")]
    pub t0: u32,
    #[arg(long = "T1", default_value_t = 25)]
    #[serde(default = "default_t1")]
    pub t1: u32,
    #[arg(long = "M", default_value_t = 3)]
    #[serde(default = "default_m")]
    pub m: u32,
    /// Grid size for the Haar integrals μ(f).
    #[arg(long, default_value_t = 800)]
    #[serde(default = "default_mu_samples")]
    pub mu_samples: usize,
}

fn default_x() -> String {
    "random".into()
}
fn default_f() -> String {
    "default".into()
}
fn default_t0() -> u32 {
    5
}
fn default_t1() -> u32 {
    25
}
fn default_m() -> u32 {
    3
}
fn default_mu_samples() -> usize {
    800
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinnikArgs {
    #[arg(long, default_value_t = 3)]
    #[serde(default = "default_r")]
    pub r: usize,
    /// "a..b" (inclusive), comma list, or a file with one level per line.
    #[arg(long, default_value = "2..200")]
    #[serde(default = "default_d_list")]
    pub d_list: String,
    /// Keep every level of a range, not only the squarefree ones.
    #[arg(long)]
    #[serde(default)]
    pub all_levels: bool,
    /// "case-a" or five l:u sides in chart order (m11, m12, m13, m22, m23).
    #[arg(long = "box", default_value = "case-a")]
    #[serde(default = "default_box", rename = "box")]
    pub region: String,
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[arg(long, default_value_t = 8)]
    #[serde(default = "default_quad")]
    pub quad_points: usize,
    #[arg(long, default_value_t = 1_000_000)]
    #[serde(default = "default_cap_tuples")]
    pub cap: u64,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_square_part")]
    pub max_square_part: i64,
    /// Points per level passed through the orbit audit.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub audit: usize,
}

fn default_r() -> usize {
    3
}
fn default_d_list() -> String {
    "2..200".into()
}
fn default_box() -> String {
    "case-a".into()
}
fn default_grid() -> usize {
    2
}
fn default_quad() -> usize {
    8
}
fn default_cap_tuples() -> u64 {
    1_000_000
}
fn default_square_part() -> i64 {
    1
}
