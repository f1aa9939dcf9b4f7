//! Möbius transformations, upper half-space H³, and generalized circles.
//!
//! All types here are small `Copy` values and every operation is pure.

mod circle;
mod map;
mod space;

pub use circle::{CircleGeometry, DedupCoords, GeneralizedCircle};
pub use map::{ElementKey, MobiusMap};
pub use space::{busemann, hyp_dist, UHPoint};
pub(crate) use circle::dot as dot_product;

use num_complex::Complex64;

/// A point of the Riemann sphere `ℂ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub(crate) fn conj(self) -> Self {
        match self {
            ExtComplex::Finite(z) => ExtComplex::Finite(z.conj()),
            ExtComplex::Infinity => ExtComplex::Infinity,
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl From<f64> for ExtComplex {
    fn from(x: f64) -> Self {
        ExtComplex::Finite(Complex64::new(x, 0.0))
    }
}
