//! The counting function `N_T(P, E)`, count series and power-law fits.

mod fit;
mod region;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fit::{fit_exponent, FitResult, FitWindow};
pub use region::Region;

use crate::packing::{PackedCircle, Packing};
use crate::{Error, Result};

/// Which circles a count includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// The circle meets the region.
    Meets,
    /// The center lies in the region; lines have no center and never count.
    Center,
    /// The whole circle lies in the region.
    Contained,
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meets" => Ok(CountMode::Meets),
            "center" => Ok(CountMode::Center),
            "contained" => Ok(CountMode::Contained),
            _ => Err(Error::invalid(format!("unknown count mode {s:?} (meets|center|contained)"))),
        }
    }
}

impl std::fmt::Display for CountMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CountMode::Meets => "meets",
            CountMode::Center => "center",
            CountMode::Contained => "contained",
        })
    }
}

fn selected(entry: &PackedCircle, region: &Region, mode: CountMode) -> bool {
    match mode {
        CountMode::Meets => region.meets(&entry.shape),
        CountMode::Contained => region.contains_curve(&entry.shape),
        CountMode::Center => match entry.shape {
            crate::moebius::CircleGeometry::Circle { center, .. } => region.contains(center),
            crate::moebius::CircleGeometry::Line { .. } => false,
        },
    }
}

fn check_bound(packing: &Packing, t: f64) -> Result<()> {
    if !(t <= packing.t_bound()) {
        return Err(Error::UnderEnumerated {
            requested: t,
            bound: packing.t_bound(),
        });
    }
    Ok(())
}

/// Sorted curvatures of the circles selected by `(region, mode)`.
fn selected_curvatures(packing: &Packing, region: &Region, mode: CountMode) -> Vec<f64> {
    let mut ks: Vec<f64> = packing
        .circles()
        .par_iter()
        .filter(|e| selected(e, region, mode))
        .map(|e| e.curvature())
        .collect();
    ks.par_sort_unstable_by(f64::total_cmp);
    ks
}

/// `N_T(P, E)`: the number of circles selected by `mode` with curvature `< T`.
pub fn count(packing: &Packing, region: &Region, t: f64, mode: CountMode) -> Result<u64> {
    check_bound(packing, t)?;
    Ok(packing
        .circles()
        .par_iter()
        .filter(|e| e.curvature() < t && selected(e, region, mode))
        .count() as u64)
}

/// `N_T` sampled on a grid of bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub t: Vec<f64>,
    pub n: Vec<u64>,
    pub mode: CountMode,
    pub region: Option<Region>,
}

impl CountSeries {
    /// Validates a series read from outside (strictly increasing T, nondecreasing N).
    pub fn new(t: Vec<f64>, n: Vec<u64>, mode: CountMode, region: Option<Region>) -> Result<Self> {
        if t.len() != n.len() {
            return Err(Error::invalid(format!("{} bounds but {} counts", t.len(), n.len())));
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("T grid must be strictly increasing"));
        }
        if n.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("counts must be nondecreasing in T"));
        }
        Ok(CountSeries { t, n, mode, region })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty T grid"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] > 0.0) {
        return Err(Error::invalid("T grid must be positive and strictly increasing"));
    }
    Ok(())
}

pub fn count_series(packing: &Packing, region: &Region, grid: &[f64], mode: CountMode) -> Result<CountSeries> {
    check_grid(grid)?;
    check_bound(packing, grid[grid.len() - 1])?;
    let ks = selected_curvatures(packing, region, mode);
    let n = grid.iter().map(|&t| ks.partition_point(|&k| k < t) as u64).collect();
    Ok(CountSeries {
        t: grid.to_vec(),
        n,
        mode,
        region: Some(region.clone()),
    })
}

/// `n` bounds `t_max·ratio^{-(n-1)}, …, t_max`.
pub fn geometric_grid(t_max: f64, ratio: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max / ratio.powi((n - 1 - i) as i32)).collect()
}

/// Default grid: 25 bounds in ratio `√2` ending at `t_max`.
pub fn default_grid(t_max: f64) -> Vec<f64> {
    geometric_grid(t_max, std::f64::consts::SQRT_2, 25)
}

/// Bounds from `t_lo` to `t_hi` inclusive with `per_decade` points per factor 10.
pub fn log_grid(t_lo: f64, t_hi: f64, per_decade: usize) -> Vec<f64> {
    let steps = ((t_hi / t_lo).log10() * per_decade as f64).round().max(1.0) as usize;
    let step = (t_hi / t_lo).ln() / steps as f64;
    (0..=steps)
        .map(|i| if i == steps { t_hi } else { t_lo * (step * i as f64).exp() })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub t: f64,
    pub numerator: u64,
    pub denominator: u64,
    /// `None` where the denominator count is zero.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    pub points: Vec<RatioPoint>,
}

impl RatioSeries {
    /// Ratio at the largest bound, if defined.
    pub fn last(&self) -> Option<f64> {
        self.points.last().and_then(|p| p.ratio)
    }

    /// `(max − min)/last` over the points with `T ≥ T_max/10`; `None` if any
    /// ratio there is undefined.
    pub fn final_decade_drift(&self) -> Option<f64> {
        let t_max = self.points.last()?.t;
        let tail: Option<Vec<f64>> = self
            .points
            .iter()
            .filter(|p| p.t >= t_max / 10.0)
            .map(|p| p.ratio)
            .collect();
        let tail = tail?;
        let last = *tail.last()?;
        let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        Some((max - min) / last)
    }

    pub fn undefined_count(&self) -> usize {
        self.points.iter().filter(|p| p.ratio.is_none()).count()
    }
}

/// `N_T(E1)/N_T(E2)` in `meets` mode along a grid.
pub fn ratio_series(packing: &Packing, e1: &Region, e2: &Region, grid: &[f64]) -> Result<RatioSeries> {
    let s1 = count_series(packing, e1, grid, CountMode::Meets)?;
    let s2 = count_series(packing, e2, grid, CountMode::Meets)?;
    let points = grid
        .iter()
        .zip(s1.n.iter().zip(&s2.n))
        .map(|(&t, (&a, &b))| RatioPoint {
            t,
            numerator: a,
            denominator: b,
            ratio: (b > 0).then(|| a as f64 / b as f64),
        })
        .collect();
    let out = RatioSeries { points };
    if out.undefined_count() > 0 {
        log::warn!("{} grid points have an empty denominator region", out.undefined_count());
    }
    Ok(out)
}

/// Counts by circle-meets-region and by center-in-region on the same grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualGap {
    pub t: Vec<f64>,
    pub meets: Vec<u64>,
    pub center: Vec<u64>,
}

impl DualGap {
    pub fn gaps(&self) -> Vec<u64> {
        self.meets.iter().zip(&self.center).map(|(a, b)| a.abs_diff(*b)).collect()
    }

    pub fn max_gap(&self) -> u64 {
        self.gaps().into_iter().max().unwrap_or(0)
    }
}

pub fn dual_count_gap(packing: &Packing, region: &Region, grid: &[f64]) -> Result<DualGap> {
    let meets = count_series(packing, region, grid, CountMode::Meets)?;
    let center = count_series(packing, region, grid, CountMode::Center)?;
    Ok(DualGap {
        t: grid.to_vec(),
        meets: meets.n,
        center: center.n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::{apollonian_enumerate, DescartesQuadruple};
    use num_complex::Complex64;

    fn gasket(t: f64) -> Packing {
        apollonian_enumerate(&DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap(), t).unwrap()
    }

    fn unit_disk() -> Region {
        Region::disk(Complex64::new(0.0, 0.0), 1.0)
    }

    #[test]
    fn count_beyond_bound_is_an_error() {
        let p = gasket(100.0);
        let err = count(&p, &unit_disk(), 200.0, CountMode::Meets).unwrap_err();
        assert!(matches!(err, Error::UnderEnumerated { .. }));
    }

    #[test]
    fn bounding_region_counts_everything() {
        let p = gasket(100.0);
        let big = Region::rectangle(Complex64::new(-2.0, -2.0), Complex64::new(2.0, 2.0));
        let all = p.iter().filter(|e| e.curvature() < 60.0).count() as u64;
        assert_eq!(count(&p, &big, 60.0, CountMode::Meets).unwrap(), all);
    }

    #[test]
    fn far_region_counts_nothing() {
        let p = gasket(100.0);
        let far = Region::disk(Complex64::new(5.0, 5.0), 1.0);
        assert_eq!(count(&p, &far, 100.0, CountMode::Meets).unwrap(), 0);
        let near = Region::disk(Complex64::new(0.0, -0.9), 0.01);
        assert_eq!(count(&p, &near, 0.5, CountMode::Meets).unwrap(), 0);
    }

    #[test]
    fn series_matches_pointwise_counts() {
        let p = gasket(400.0);
        let e = Region::halfplane(Complex64::new(0.0, -1.0), 0.0);
        let grid = geometric_grid(400.0, 2.0, 6);
        for mode in [CountMode::Meets, CountMode::Center, CountMode::Contained] {
            let s = count_series(&p, &e, &grid, mode).unwrap();
            for (t, n) in s.t.iter().zip(&s.n) {
                assert_eq!(*n, count(&p, &e, *t, mode).unwrap());
            }
            assert!(s.n.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn mode_sandwich() {
        let p = gasket(400.0);
        let e = unit_disk();
        let contained = count(&p, &e, 400.0, CountMode::Contained).unwrap();
        let center = count(&p, &e, 400.0, CountMode::Center).unwrap();
        let meets = count(&p, &e, 400.0, CountMode::Meets).unwrap();
        assert!(contained <= center && center <= meets);
        assert_eq!(meets, p.len() as u64);
    }

    #[test]
    fn identical_regions_give_unit_ratio() {
        let p = gasket(300.0);
        let e = Region::rectangle(Complex64::new(-0.5, -0.5), Complex64::new(0.5, 0.5));
        let r = ratio_series(&p, &e, &e, &default_grid(300.0)).unwrap();
        assert!(r.points.iter().all(|pt| pt.ratio.is_none() || pt.ratio == Some(1.0)));
        assert_eq!(r.last(), Some(1.0));
    }

    #[test]
    fn nested_regions_ratio_at_most_one() {
        let p = gasket(300.0);
        let inner = Region::disk(Complex64::new(0.3, 0.2), 0.3);
        let r = ratio_series(&p, &inner, &unit_disk(), &default_grid(300.0)).unwrap();
        assert!(r.points.iter().all(|pt| pt.ratio.is_none_or(|x| x <= 1.0)));
    }

    #[test]
    fn empty_denominator_is_flagged() {
        let p = gasket(50.0);
        let far = Region::disk(Complex64::new(5.0, 5.0), 1.0);
        let r = ratio_series(&p, &unit_disk(), &far, &[10.0, 50.0]).unwrap();
        assert_eq!(r.undefined_count(), 2);
        assert_eq!(r.final_decade_drift(), None);
    }

    #[test]
    fn gap_for_a_tiny_disk_is_at_most_one() {
        let p = gasket(2000.0);
        // inside the curvature-2 circle centered at 1/2, away from its children
        let e = Region::disk(Complex64::new(0.5, 0.0), 0.01);
        let g = dual_count_gap(&p, &e, &geometric_grid(2000.0, 2.0, 8)).unwrap();
        assert!(g.max_gap() <= 1, "{:?}", g);
    }

    #[test]
    fn grids() {
        let g = default_grid(1000.0);
        assert_eq!(g.len(), 25);
        assert_eq!(*g.last().unwrap(), 1000.0);
        let l = log_grid(10.0, 1e4, 4);
        assert_eq!(l.len(), 13);
        assert_eq!((l[0], l[12]), (10.0, 1e4));
        assert!(count_series(&gasket(10.0), &unit_disk(), &[2.0, 1.0], CountMode::Meets).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("center".parse::<CountMode>().unwrap(), CountMode::Center);
        assert!("inside".parse::<CountMode>().is_err());
    }
}
