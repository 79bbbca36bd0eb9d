//! Scenario configuration schema: strict JSON (unknown keys rejected), one
//! config type per experiment family.

use depolab::grid::{Boundary, Field1D, GridSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub boundary: BoundaryConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConfig {
    Periodic,
    Outflow,
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec, String> {
        if !(self.x_max > self.x_min) {
            return Err(format!("x_max = {} must exceed x_min = {}", self.x_max, self.x_min));
        }
        let boundary = match self.boundary {
            BoundaryConfig::Periodic => Boundary::Periodic,
            BoundaryConfig::Outflow => Boundary::Outflow,
        };
        GridSpec::new(
            self.x_min,
            (self.x_max - self.x_min) / self.n_cells as f64,
            self.n_cells,
            boundary,
        )
        .map_err(|e| e.to_string())
    }
}

/// Initial `(rho, u)` profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant { rho: f64, u: f64 },
    Riemann { left: [f64; 2], right: [f64; 2], jump_at: f64 },
    GaussianBump { base_rho: f64, amplitude: f64, center: f64, width: f64, u: f64 },
    Tabulated { x: Vec<f64>, rho: Vec<f64>, u: Vec<f64> },
}

impl InitialData {
    pub fn build(&self, grid: GridSpec) -> Result<Field1D, String> {
        match self {
            InitialData::Constant { rho, u } => {
                Ok(Field1D::from_fn(grid, |_| (*rho, *u)))
            }
            InitialData::Riemann { left, right, jump_at } => Ok(Field1D::from_fn(grid, |x| {
                if x < *jump_at {
                    (left[0], left[1])
                } else {
                    (right[0], right[1])
                }
            })),
            InitialData::GaussianBump { base_rho, amplitude, center, width, u } => {
                if !(*width > 0.0) {
                    return Err("gaussian width must be positive".into());
                }
                Ok(Field1D::from_fn(grid, |x| {
                    let arg = (x - center) / width;
                    (base_rho + amplitude * (-arg * arg).exp(), *u)
                }))
            }
            InitialData::Tabulated { x, rho, u } => {
                if x.len() < 2 || x.len() != rho.len() || x.len() != u.len() {
                    return Err("tabulated profile needs matching x/rho/u arrays".into());
                }
                if !x.windows(2).all(|w| w[1] > w[0]) {
                    return Err("tabulated x must be strictly increasing".into());
                }
                let interp = |xs: &[f64], ys: &[f64], q: f64| -> f64 {
                    let i = xs.partition_point(|&v| v < q).clamp(1, xs.len() - 1);
                    let t = (q - xs[i - 1]) / (xs[i] - xs[i - 1]);
                    ys[i - 1] + t.clamp(0.0, 1.0) * (ys[i] - ys[i - 1])
                };
                Ok(Field1D::from_fn(grid, |q| (interp(x, rho, q), interp(x, u, q))))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    LaxFriedrichs,
    Hll,
    Viscous { eps: f64 },
}

fn default_cfl() -> f64 {
    depolab::solvers::CFL_DEFAULT
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveScenario {
    pub grid: GridConfig,
    pub initial: InitialData,
    pub method: MethodConfig,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Fit a shock speed from the trajectory and record it in the manifest.
    #[serde(default)]
    pub measure_shock: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceScenario {
    pub grid: GridConfig,
    pub initial: InitialData,
    pub epsilons: Vec<f64>,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsConfig {
    pub fugacity: f64,
    pub tilt: f64,
    pub parity: u8,
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LatticeInit {
    /// i.i.d. draw from the Gibbs measure.
    Gibbs,
    /// No walkers at all; the dynamics is frozen.
    Empty,
    Explicit { n: Vec<u32>, z: Vec<i32> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BrickMode {
    Simulate { t_end: f64, record_times: Vec<f64> },
    Flux { samples: usize },
    Stationarity { t_end: f64, replicas: usize },
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BricklayerScenario {
    pub sites: usize,
    pub gibbs: GibbsConfig,
    pub init: LatticeInit,
    pub mode: BrickMode,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        if self.count == 0 {
            return Err("range count must be positive".into());
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.min + i as f64 * step).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TableGrid {
    /// Sweep the grand-canonical parameters directly.
    Fugacity { fugacity: Range, tilt: Range },
    /// Sweep macro states and invert per point (rectangular in `(rho, u)`,
    /// directly usable as a flux table).
    Macro { rho: Range, u: Range },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HydroTableScenario {
    pub beta: f64,
    pub parity: u8,
    pub grid: TableGrid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairConfig {
    Canonical,
    Similarity { alpha: f64, phi0: f64, dphi0: f64, y_min: f64, y_max: f64, step: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyScanScenario {
    pub pair: PairConfig,
    pub rho: Range,
    pub u: Range,
}
