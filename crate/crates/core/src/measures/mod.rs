//! Two approximations of the limiting distribution `ω` of small circles, and
//! the orbit-growth estimate of the critical exponent.
//!
//! The empirical side bins the centers of circles in a curvature window. The
//! orbit side bins deep points of `Γj` weighted by `e^{−s·d(j, γj)}`, a truncated
//! Patterson–Sullivan measure, and reweights by `(|z|² + 1)^δ`. Every grid is
//! normalised to mass one, so comparisons are scale-free.

mod grid;
mod orbit;

pub use grid::{
    compare_measures, constant_consistency, omega_empirical, omega_from_ps, ps_measure_grid, Comparison,
    ConstantReport, GridSpec, MeasureGrid, DEFAULT_CELLS,
};
pub use orbit::{
    critical_exponent_orbit, orbit_points, poincare_sum, EstimateMethod, ExponentEstimate, OrbitAtom,
    OrbitPointSet,
};

/// Default offset of `s` above the estimated exponent for Patterson–Sullivan grids.
pub const DEFAULT_S_OFFSET: f64 = 0.02;
/// Default height below which orbit points count as boundary atoms.
pub const DEFAULT_HEIGHT_CUT: f64 = 0.05;
