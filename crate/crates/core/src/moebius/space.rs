use num_complex::Complex64;

use super::ExtComplex;
use crate::{Error, Result};

/// A point `z + r·j` of upper half-space H³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UHPoint {
    pub z: Complex64,
    pub r: f64,
}

impl UHPoint {
    /// The base point `j = (0, 1)`.
    pub const J: UHPoint = UHPoint {
        z: Complex64::new(0.0, 0.0),
        r: 1.0,
    };

    pub fn new(z: Complex64, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() || !z.is_finite() {
            return Err(Error::invalid(format!("height must be positive and finite, got {r}")));
        }
        Ok(UHPoint { z, r })
    }

    pub(crate) fn new_unchecked(z: Complex64, r: f64) -> Self {
        debug_assert!(r > 0.0, "non-positive height {r}");
        UHPoint { z, r }
    }
}

/// Hyperbolic distance in the upper half-space model.
///
/// Uses `cosh d = (|z₁−z₂|² + r₁² + r₂²)/(2r₁r₂)` rewritten through
/// `cosh d − 1 = 2 sinh²(d/2)`, which keeps full relative precision for
/// nearby points.
pub fn hyp_dist(x1: &UHPoint, x2: &UHPoint) -> f64 {
    let dz = (x1.z - x2.z).norm_sqr();
    let dr = x1.r - x2.r;
    let half = ((dz + dr * dr) / (4.0 * x1.r * x2.r)).sqrt();
    2.0 * half.asinh()
}

/// Busemann cocycle `β_ζ(x, y)`: the signed distance between the horospheres at `ζ`
/// through `x` and `y`, positive when `x` is farther from `ζ`.
pub fn busemann(zeta: ExtComplex, x: &UHPoint, y: &UHPoint) -> f64 {
    match zeta {
        ExtComplex::Infinity => (y.r / x.r).ln(),
        ExtComplex::Finite(p) => horo_height(p, x) - horo_height(p, y),
    }
}

/// `log((|ζ − p|² + r²)/r)`, the Busemann function at a finite `ζ` normalised to
/// vanish at `ζ + j`.
fn horo_height(zeta: Complex64, x: &UHPoint) -> f64 {
    (((zeta - x.z).norm_sqr() + x.r * x.r) / x.r).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MobiusMap;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn pt(x: f64, y: f64, r: f64) -> UHPoint {
        UHPoint::new(Complex64::new(x, y), r).unwrap()
    }

    #[test]
    fn distance_examples() {
        let x = pt(0.3, -0.2, 0.7);
        assert_eq!(hyp_dist(&x, &x), 0.0);
        assert_relative_eq!(hyp_dist(&UHPoint::J, &pt(0.0, 0.0, E)), 1.0, max_relative = 1e-15);
        let y = pt(2.0, 1.0, 0.01);
        assert_relative_eq!(hyp_dist(&x, &y), hyp_dist(&y, &x));
        // against the arcosh form
        let cosh = ((x.z - y.z).norm_sqr() + x.r * x.r + y.r * y.r) / (2.0 * x.r * y.r);
        assert_relative_eq!(hyp_dist(&x, &y), cosh.acosh(), max_relative = 1e-13);
    }

    #[test]
    fn h3_action_examples() {
        let x = pt(0.5, 1.5, 0.25);
        assert_eq!(MobiusMap::identity().apply_h3(&x), x);
        let t = 1.3;
        let y = MobiusMap::diagonal(t).apply_h3(&UHPoint::J);
        assert!(y.z.norm() < 1e-15);
        assert_relative_eq!(y.r, t.exp(), max_relative = 1e-14);
        let w = Complex64::new(-2.0, 0.75);
        let y = MobiusMap::translation(w).apply_h3(&x);
        assert!((y.z - (x.z + w)).norm() < 1e-15);
        assert_relative_eq!(y.r, x.r, max_relative = 1e-15);
    }

    #[test]
    fn busemann_examples() {
        let x = pt(0.0, 0.0, 2.0);
        let zero = ExtComplex::Finite(Complex64::new(0.0, 0.0));
        assert_relative_eq!(busemann(zero, &x, &UHPoint::J), 2f64.ln(), max_relative = 1e-15);
        assert_eq!(busemann(zero, &x, &x), 0.0);
        assert_eq!(busemann(ExtComplex::Infinity, &x, &x), 0.0);
    }

    #[test]
    fn busemann_at_infinity_matches_ray_limit() {
        let t = 30.0;
        let ray = pt(0.0, 0.0, f64::exp(t));
        for (x, y) in [(pt(0.3, 0.4, 0.2), UHPoint::J), (pt(-1.0, 2.0, 3.0), pt(0.5, 0.5, 0.01))] {
            let limit = hyp_dist(&x, &ray) - hyp_dist(&y, &ray);
            assert!((busemann(ExtComplex::Infinity, &x, &y) - limit).abs() < 1e-6);
        }
        let x = pt(0.3, 0.4, 0.2);
        assert!((t - hyp_dist(&x, &ray) - busemann(ExtComplex::Infinity, &UHPoint::J, &x)).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_height() {
        assert!(UHPoint::new(Complex64::new(0.0, 0.0), 0.0).is_err());
        assert!(UHPoint::new(Complex64::new(0.0, 0.0), -1.0).is_err());
    }
}
