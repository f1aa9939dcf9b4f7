use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::OrbitPointSet;
use crate::counting::{count, CountMode, Region};
use crate::moebius::CircleGeometry;
use crate::packing::Packing;
use crate::tol;
use crate::{Error, Result};

/// A rectangular window split into `nx × ny` equal cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: [f64; 2],
    pub max: [f64; 2],
    pub nx: usize,
    pub ny: usize,
}

pub const DEFAULT_CELLS: usize = 16;
const DEFAULT_MARGIN: f64 = 0.05;

impl GridSpec {
    pub fn new(min: Complex64, max: Complex64, nx: usize, ny: usize) -> Result<Self> {
        if !(min.re < max.re && min.im < max.im) || nx == 0 || ny == 0 {
            return Err(Error::invalid(format!(
                "grid {nx}x{ny} over [{min}, {max}] is degenerate"
            )));
        }
        Ok(GridSpec {
            min: [min.re, min.im],
            max: [max.re, max.im],
            nx,
            ny,
        })
    }

    /// The packing's bounding box scaled by 1.05 about its center.
    pub fn around(packing: &Packing, nx: usize, ny: usize) -> Result<Self> {
        let (lo, hi) = packing
            .bounding_box()
            .ok_or_else(|| Error::invalid("packing has no bounded circles"))?;
        let mid = (lo + hi) / 2.0;
        let half = (hi - lo) / 2.0 * (1.0 + DEFAULT_MARGIN);
        Self::new(mid - half, mid + half, nx, ny)
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    fn cell_size(&self) -> (f64, f64) {
        (
            (self.max[0] - self.min[0]) / self.nx as f64,
            (self.max[1] - self.min[1]) / self.ny as f64,
        )
    }

    /// Row-major cell index (`iy · nx + ix`, `iy` counted from the bottom) of a
    /// point in the closed window; points on the top or right edge go to the
    /// last cell.
    pub fn cell_of(&self, z: Complex64) -> Option<usize> {
        if !(z.re >= self.min[0] && z.re <= self.max[0] && z.im >= self.min[1] && z.im <= self.max[1]) {
            return None;
        }
        let (w, h) = self.cell_size();
        let ix = (((z.re - self.min[0]) / w) as usize).min(self.nx - 1);
        let iy = (((z.im - self.min[1]) / h) as usize).min(self.ny - 1);
        Some(iy * self.nx + ix)
    }

    pub fn cell_center(&self, cell: usize) -> Complex64 {
        let (w, h) = self.cell_size();
        let (ix, iy) = (cell % self.nx, cell / self.nx);
        Complex64::new(
            self.min[0] + w * (ix as f64 + 0.5),
            self.min[1] + h * (iy as f64 + 0.5),
        )
    }

    /// `(min, max)` corners of a cell.
    pub fn cell_bounds(&self, cell: usize) -> (Complex64, Complex64) {
        let (w, h) = self.cell_size();
        let (ix, iy) = (cell % self.nx, cell / self.nx);
        let lo = Complex64::new(self.min[0] + w * ix as f64, self.min[1] + h * iy as f64);
        (lo, lo + Complex64::new(w, h))
    }
}

/// Cell weights over a [`GridSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureGrid {
    pub spec: GridSpec,
    /// Row-major, see [`GridSpec::cell_of`].
    pub weights: Vec<f64>,
    pub normalized: bool,
    /// Total mass before normalisation, when the grid was normalised here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_mass: Option<f64>,
}

impl MeasureGrid {
    pub fn new(spec: GridSpec, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != spec.cells() {
            return Err(Error::GridMismatch(format!(
                "{} weights for a {}x{} grid",
                weights.len(),
                spec.nx,
                spec.ny
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("cell weights must be finite and nonnegative"));
        }
        let normalized = (weights.iter().sum::<f64>() - 1.0).abs() <= tol::MEASURE_MASS;
        Ok(MeasureGrid {
            spec,
            weights,
            normalized,
            raw_mass: None,
        })
    }

    fn normalize(spec: GridSpec, mut weights: Vec<f64>, what: &str) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::EmptySupport(format!("{what}: no mass inside the grid window")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(MeasureGrid {
            spec,
            weights,
            normalized: true,
            raw_mass: Some(total),
        })
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight(&self, ix: usize, iy: usize) -> f64 {
        self.weights[iy * self.spec.nx + ix]
    }

    /// Mass of the cells whose centers lie in the region.
    pub fn mass_of(&self, region: &Region) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .filter(|(cell, _)| region.contains(self.spec.cell_center(*cell)))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Deep orbit atoms binned at their horizontal position with weight `e^{−s·d(j, γj)}`.
///
/// Only atoms with height below `height_cut` are used; they stand in for the
/// boundary atoms of the Patterson–Sullivan measure `ν_j`.
pub fn ps_measure_grid(orbit: &OrbitPointSet, s: f64, height_cut: f64, grid: &GridSpec) -> Result<MeasureGrid> {
    if !(s > 0.0) {
        return Err(Error::invalid(format!("exponent must be positive, got {s}")));
    }
    if !(height_cut > 0.0 && height_cut <= 1.0) {
        return Err(Error::invalid(format!("height cut must lie in (0, 1], got {height_cut}")));
    }
    let mut weights = vec![0.0; grid.cells()];
    let mut used = 0usize;
    for atom in orbit.atoms() {
        if atom.point.r < height_cut {
            if let Some(cell) = grid.cell_of(atom.point.z) {
                weights[cell] += (-s * atom.dist).exp();
                used += 1;
            }
        }
    }
    if used == 0 {
        return Err(Error::EmptySupport(format!(
            "no orbit point below height {height_cut} inside the window"
        )));
    }
    MeasureGrid::normalize(*grid, weights, "Patterson-Sullivan grid")
}

/// Reweights `ν_j` by the density `(|z|² + 1)^δ` and renormalises.
pub fn omega_from_ps(ps: &MeasureGrid, delta: f64) -> Result<MeasureGrid> {
    if !ps.normalized {
        return Err(Error::invalid("expected a normalised measure grid"));
    }
    let weights = ps
        .weights
        .iter()
        .enumerate()
        .map(|(cell, w)| w * (ps.spec.cell_center(cell).norm_sqr() + 1.0).powf(delta))
        .collect();
    MeasureGrid::normalize(ps.spec, weights, "reweighted grid")
}

/// Unit mass at the center of each circle with curvature in `[t, κ·t)`.
pub fn omega_empirical(packing: &Packing, grid: &GridSpec, t: f64, kappa: f64) -> Result<MeasureGrid> {
    if !(t > 0.0 && kappa > 1.0) {
        return Err(Error::invalid(format!("curvature window [{t}, {kappa}·{t}) is empty")));
    }
    let upper = kappa * t;
    if !(upper <= packing.t_bound()) {
        return Err(Error::UnderEnumerated {
            requested: upper,
            bound: packing.t_bound(),
        });
    }
    let mut weights = vec![0.0; grid.cells()];
    for entry in packing.iter() {
        if let CircleGeometry::Circle { center, .. } = entry.shape {
            let k = entry.curvature();
            if k >= t && k < upper {
                if let Some(cell) = grid.cell_of(center) {
                    weights[cell] += 1.0;
                }
            }
        }
    }
    MeasureGrid::normalize(*grid, weights, "empirical grid")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub pearson: f64,
    pub total_variation: f64,
}

/// Pearson correlation of the cell vectors and total variation `½ Σ |w₁ − w₂|`.
///
/// If either grid is constant the correlation is 1 when the grids are equal
/// and 0 otherwise.
pub fn compare_measures(m1: &MeasureGrid, m2: &MeasureGrid) -> Result<Comparison> {
    if m1.spec != m2.spec {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", m1.spec, m2.spec)));
    }
    if !(m1.normalized && m2.normalized) {
        return Err(Error::invalid("both grids must be normalised"));
    }
    let n = m1.weights.len() as f64;
    let (a, b) = (&m1.weights, &m2.weights);
    let total_variation = 0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    let pearson = if va > 0.0 && vb > 0.0 {
        cov / (va * vb).sqrt()
    } else if a == b {
        1.0
    } else {
        0.0
    };
    Ok(Comparison {
        pearson,
        total_variation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    /// `N_T(E) / (T^δ · ω(E))` per region.
    pub constants: Vec<f64>,
    /// `max/min − 1` over the constants.
    pub spread: f64,
}

/// The normalised constants `N_T(E)/(T^δ ω(E))`, which should not depend on `E`.
///
/// `ω(E)` is the mass of the cells whose centers lie in `E`, so regions should
/// be unions of grid cells. Counts use the `meets` mode.
pub fn constant_consistency(
    packing: &Packing,
    regions: &[Region],
    t: f64,
    delta: f64,
    omega: &MeasureGrid,
) -> Result<ConstantReport> {
    if regions.is_empty() {
        return Err(Error::invalid("no regions given"));
    }
    let mut constants = Vec::with_capacity(regions.len());
    for (i, region) in regions.iter().enumerate() {
        let mass = omega.mass_of(region);
        if !(mass > 0.0) {
            return Err(Error::EmptySupport(format!("region {i} carries no measure")));
        }
        let n = count(packing, region, t, CountMode::Meets)?;
        constants.push(n as f64 / (t.powf(delta) * mass));
    }
    let max = constants.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = constants.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ConstantReport {
        spread: if min > 0.0 { max / min - 1.0 } else { f64::INFINITY },
        constants,
    })
}
