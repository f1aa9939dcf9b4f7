use num_complex::Complex64;

use super::ExtComplex;
use crate::tol;
use crate::{Error, Result};

/// A circle or line in Hermitian coordinates: the locus `a|z|² + b̄z + bz̄ + c = 0`.
///
/// Coefficients are scaled so that the discriminant `|b|² − ac` equals 1. The sign
/// of `a` carries orientation: the interior is where the form is negative, so
/// `a > 0` is a bounded disk and `a < 0` the outside of a circle. For circles the
/// center is `−b/a`, the radius `1/|a|` and the curvature `|a|`; `a = 0` is a line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralizedCircle {
    a: f64,
    b: Complex64,
    c: f64,
}

/// Geometric description of a [`GeneralizedCircle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CircleGeometry {
    Circle {
        center: Complex64,
        radius: f64,
        /// Signed curvature; negative when the interior is unbounded.
        signed_curvature: f64,
    },
    /// The line `{z : ⟨normal, z⟩ = offset}` with a unit normal.
    Line { normal: Complex64, offset: f64 },
}

impl CircleGeometry {
    pub fn curvature(&self) -> f64 {
        match self {
            CircleGeometry::Circle {
                signed_curvature, ..
            } => signed_curvature.abs(),
            CircleGeometry::Line { .. } => 0.0,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, CircleGeometry::Line { .. })
    }
}

/// Orientation-free coordinates of a circle, used to recognise the same circle
/// reached along different numerical paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DedupCoords {
    pub line: bool,
    pub x: [f64; 4],
}

impl DedupCoords {
    /// Sup-norm distance; infinite between a circle and a line.
    pub fn distance(&self, other: &DedupCoords) -> f64 {
        if self.line != other.line {
            return f64::INFINITY;
        }
        self.x
            .iter()
            .zip(other.x.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl GeneralizedCircle {
    /// The unit circle `C₀`.
    pub const UNIT: GeneralizedCircle = GeneralizedCircle {
        a: 1.0,
        b: Complex64::new(0.0, 0.0),
        c: -1.0,
    };

    /// Builds a circle from raw coefficients, rescaling the discriminant to 1.
    pub fn new(a: f64, b: Complex64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::invalid("circle coefficients must be finite"));
        }
        let disc = b.norm_sqr() - a * c;
        if !(disc > 0.0) {
            return Err(Error::invalid(format!(
                "coefficients ({a}, {b}, {c}) have discriminant {disc} and define no real circle"
            )));
        }
        Ok(Self::scaled(a, b, c, disc))
    }

    pub(crate) fn renormalized(a: f64, b: Complex64, c: f64) -> Self {
        let disc = b.norm_sqr() - a * c;
        Self::scaled(a, b, c, disc)
    }

    /// The circle `(a, b, c)` with `c` chosen so that `|b|² − ac = 1`.
    pub(crate) fn from_unit_discriminant(a: f64, b: Complex64) -> Self {
        GeneralizedCircle {
            a,
            b,
            c: (b.norm_sqr() - 1.0) / a,
        }
    }

    fn scaled(a: f64, b: Complex64, c: f64, disc: f64) -> Self {
        let s = disc.sqrt();
        let mut circle = GeneralizedCircle {
            a: a / s,
            b: b / s,
            c: c / s,
        };
        if circle.a.abs() < tol::LINE {
            circle.a = 0.0;
        }
        circle
    }

    /// Positively oriented circle (bounded interior).
    pub fn from_center_radius(center: Complex64, radius: f64) -> Self {
        assert!(radius > 0.0 && radius.is_finite(), "radius must be positive, got {radius}");
        let a = 1.0 / radius;
        let b = -center * a;
        GeneralizedCircle {
            a,
            b,
            c: (b.norm_sqr() - 1.0) / a,
        }
    }

    /// Circle with signed curvature `k` (negative for an unbounded interior).
    pub fn from_curvature_center(k: f64, center: Complex64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() || !center.is_finite() {
            return Err(Error::invalid(format!("curvature {k} does not define a circle")));
        }
        Ok(Self::from_curvature_product(k, center * k))
    }

    /// Circle from its signed curvature and curvature×center product, the
    /// coordinates used by Descartes quadruples. Here `b = −k·center` exactly.
    pub(crate) fn from_curvature_product(k: f64, product: Complex64) -> Self {
        let b = -product;
        GeneralizedCircle {
            a: k,
            b,
            c: (b.norm_sqr() - 1.0) / k,
        }
    }

    /// The line `⟨normal, z⟩ = offset`; the normal need not be unit length.
    /// The interior is the half-plane `⟨normal, z⟩ < offset`.
    pub fn line(normal: Complex64, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(Error::invalid("line needs a nonzero finite normal"));
        }
        Ok(GeneralizedCircle {
            a: 0.0,
            b: normal / n,
            c: -2.0 * offset / n,
        })
    }

    /// The generalized circle through three distinct points of the sphere.
    pub fn through_points(p1: ExtComplex, p2: ExtComplex, p3: ExtComplex) -> Result<Self> {
        let pts = [p1, p2, p3];
        let finite: Vec<Complex64> = pts.iter().filter_map(|p| p.finite()).collect();
        match finite.len() {
            3 => {
                // null vector of rows (|z|², x, y, 1) by signed 3×3 minors
                let rows: Vec<[f64; 4]> = finite.iter().map(|z| [z.norm_sqr(), z.re, z.im, 1.0]).collect();
                let minor = |skip: usize| {
                    let cols: Vec<usize> = (0..4).filter(|&k| k != skip).collect();
                    let m = |i: usize, j: usize| rows[i][cols[j]];
                    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
                };
                let v = [minor(0), -minor(1), minor(2), -minor(3)];
                let circle = Self::new(v[0], Complex64::new(v[1] / 2.0, v[2] / 2.0), v[3]);
                circle.map_err(|_| Error::invalid("points are not distinct"))
            }
            2 => {
                let (u, w) = (finite[0], finite[1]);
                let dir = w - u;
                if dir.norm() == 0.0 {
                    return Err(Error::invalid("points are not distinct"));
                }
                let normal = dir * Complex64::i();
                Self::line(normal, dot(normal, u))
            }
            _ => Err(Error::invalid("points are not distinct")),
        }
    }

    pub fn coefficients(&self) -> (f64, Complex64, f64) {
        (self.a, self.b, self.c)
    }

    pub fn is_line(&self) -> bool {
        self.a == 0.0
    }

    /// Unsigned curvature; zero for lines.
    pub fn curvature(&self) -> f64 {
        self.a.abs()
    }

    pub fn signed_curvature(&self) -> f64 {
        self.a
    }

    /// Value of the defining form; negative inside.
    pub fn eval(&self, z: Complex64) -> f64 {
        self.a * z.norm_sqr() + 2.0 * (self.b.conj() * z).re + self.c
    }

    pub fn reversed(&self) -> Self {
        GeneralizedCircle {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }

    pub fn geometry(&self) -> CircleGeometry {
        if self.is_line() {
            // 2⟨b, z⟩ + c = 0 with |b| = 1
            CircleGeometry::Line {
                normal: self.b,
                offset: -self.c / 2.0,
            }
        } else {
            CircleGeometry::Circle {
                center: -self.b / self.a,
                radius: 1.0 / self.a.abs(),
                signed_curvature: self.a,
            }
        }
    }

    /// Orientation-free dedup coordinates.
    ///
    /// A circle is described by the top of its hemisphere in upper half-space:
    /// `log r` and the center in units of `r`. Distances in these coordinates are
    /// comparable to hyperbolic distances, so small circles are resolved as
    /// finely as large ones. A line is described by its foot point from the
    /// origin and the doubled angle of its normal, which are continuous and
    /// blind to orientation.
    pub fn dedup_coords(&self) -> DedupCoords {
        match self.geometry() {
            CircleGeometry::Circle { center, radius, .. } => DedupCoords {
                line: false,
                x: [radius.ln(), center.re / radius, center.im / radius, 0.0],
            },
            CircleGeometry::Line { normal, offset } => {
                let foot = normal * offset;
                let twice = 2.0 * normal.arg();
                DedupCoords {
                    line: true,
                    x: [foot.re, foot.im, twice.cos(), twice.sin()],
                }
            }
        }
    }

    /// Same circle as a point set, ignoring orientation.
    pub fn approx_eq_unoriented(&self, other: &Self, tol: f64) -> bool {
        let close = |s: f64| {
            (self.a - s * other.a).abs() <= tol * (1.0 + self.a.abs())
                && (self.b - other.b * s).norm() <= tol * (1.0 + self.b.norm())
                && (self.c - s * other.c).abs() <= tol * (1.0 + self.c.abs())
        };
        close(1.0) || close(-1.0)
    }
}

pub(crate) fn dot(u: Complex64, v: Complex64) -> f64 {
    u.re * v.re + u.im * v.im
}
