//! Numerical tolerances shared across the crate.
//!
//! Everything that compares floating-point values against a threshold pulls the
//! threshold from here, so the whole precision budget is visible in one place.

/// Algebraic identities evaluated in a handful of f64 operations
/// (group axioms, cocycle relations, normalisations).
pub const ALGEBRAIC: f64 = 1e-12;

/// Identities that pass through a composed numerical path, e.g. a product of
/// several matrices followed by the upper half-space action.
pub const COMPOSED: f64 = 1e-9;

/// Descartes relation residual, absolute, for quadruples of unit scale.
/// Larger quadruples are checked relative to the sum of squared curvatures.
pub const DESCARTES: f64 = 1e-9;

/// Involution check `g² = ±1` for generators flagged as involutions.
pub const INVOLUTION: f64 = 1e-10;

/// Geometric predicates on disks: tangency in Schottky validation and the
/// disjoint-or-nested test on enumerated circles.
pub const TANGENCY: f64 = 1e-9;

/// Two circles whose dedup coordinates (`log r` and the center measured in
/// radii) differ by at most this are the same circle. Images of deep words
/// carry rounding errors that grow with the word, so this is far above machine
/// precision, and far below the separation of distinct circles in a packing.
pub const DEDUP: f64 = 1e-6;

/// Quantisation step for canonical group-element keys (matrix entries).
pub const ELEMENT_GRID: f64 = 1e-7;

/// Hyperbolic quantisation step for orbit points in H³.
pub const ORBIT_POINT_GRID: f64 = 1e-6;

/// |a| below this (after normalising the discriminant to 1) is treated as a line.
pub const LINE: f64 = 1e-12;

/// Relative slack of region predicates. Regions are inflated by this fraction
/// of the coordinates involved, so boundary contacts (tangencies, centers on
/// a dividing line) are decided the same way after a similarity.
pub const REGION: f64 = 1e-12;

/// Normalised measure grids sum to one within this.
pub const MEASURE_MASS: f64 = 1e-12;
