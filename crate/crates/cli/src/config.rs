use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use circles_core::counting::{CountMode, Region};
use circles_core::packing::PackingSpec;
use serde::{Deserialize, Serialize};

/// Everything an experiment needs, read from a TOML file. Command-line flags
/// override the matching fields.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub packing: Option<PackingSpec>,
    pub t_max: Option<f64>,
    pub t_grid: Option<TGrid>,
    #[serde(default)]
    pub regions: Vec<NamedRegion>,
    pub grid: Option<GridConfig>,
    pub measure: Option<MeasureConfig>,
    pub mode: Option<CountMode>,
    pub out: Option<PathBuf>,
    /// Seed for randomised checks; recorded with every run.
    pub seed: Option<u64>,
}

/// Geometric sample of curvature bounds, `per_decade` points per factor of ten.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGrid {
    pub lo: f64,
    /// Defaults to `t_max`.
    pub hi: Option<f64>,
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
}

fn default_per_decade() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedRegion {
    pub name: String,
    pub region: Region,
}

/// Cell layout for measure grids; the window defaults to the packing's
/// bounding box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub cells: [usize; 2],
    pub min: Option<[f64; 2]>,
    pub max: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    /// Word length of the orbit used for the Patterson–Sullivan grid.
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Empirical curvature window `[T, κT]`.
    pub window: Option<[f64; 2]>,
    pub s_offset: Option<f64>,
    pub height_cut: Option<f64>,
}

fn default_depth() -> usize {
    12
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            depth: default_depth(),
            window: None,
            s_offset: None,
            height_cut: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                bail!("t_max must be positive and finite, got {t}");
            }
        }
        if let Some(g) = &self.t_grid {
            if !(g.lo > 0.0) || g.hi.is_some_and(|hi| !(hi > g.lo)) || g.per_decade == 0 {
                bail!("t_grid needs 0 < lo < hi and per_decade ≥ 1");
            }
        }
        for r in &self.regions {
            r.region
                .validate()
                .with_context(|| format!("region `{}`", r.name))?;
            if !r.region.is_bounded() {
                bail!("region `{}` is unbounded", r.name);
            }
        }
        if let Some(g) = &self.grid {
            if g.cells.contains(&0) {
                bail!("grid needs at least one cell in each direction");
            }
            if g.min.is_some() != g.max.is_some() {
                bail!("grid min and max must be given together");
            }
        }
        if let Some(w) = self.measure.as_ref().and_then(|m| m.window) {
            check_window(w)?;
        }
        Ok(())
    }
}

pub fn check_window(w: [f64; 2]) -> Result<()> {
    if !(w[0] > 0.0 && w[1] > w[0] && w[1].is_finite()) {
        bail!("window must satisfy 0 < T < KT, got {},{}", w[0], w[1]);
    }
    Ok(())
}

/// `NxM` → `[N, M]`.
pub fn parse_cells(s: &str) -> Result<[usize; 2], String> {
    let (nx, ny) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    let cells = [parse(nx)?, parse(ny)?];
    if cells.contains(&0) {
        return Err("cell counts must be positive".into());
    }
    Ok(cells)
}

/// `T,KT` → `[T, KT]`.
pub fn parse_window(s: &str) -> Result<[f64; 2], String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected T,KT, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let w = [parse(lo)?, parse(hi)?];
    check_window(w).map_err(|e| e.to_string())?;
    Ok(w)
}
