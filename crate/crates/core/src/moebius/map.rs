use num_complex::Complex64;

use super::{ExtComplex, GeneralizedCircle, UHPoint};
use crate::tol;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An element of PSL₂(ℂ), optionally composed with complex conjugation.
///
/// A holomorphic map acts by `z ↦ (az + b)/(cz + d)`. When `reversing` is set the
/// map is `z ↦ (a z̄ + b)/(c z̄ + d)`: an orientation-reversing conformal map such as
/// the inversion in a circle. The reversing maps are needed for reflection groups
/// (the Apollonian dual-circle group is generated by four inversions); the
/// orientation-preserving maps are exactly the products of an even number of them.
///
/// The matrix is kept with determinant 1 and a canonical overall sign, so `M` and
/// `-M` produce identical values and compare equal.
#[derive(Clone, Copy, Debug)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    reversing: bool,
}

/// Quantised matrix entries plus orientation; used to hash group elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ElementKey([i64; 8], bool);

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: ONE,
        b: ZERO,
        c: ZERO,
        d: ONE,
        reversing: false,
    };

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    /// Builds a holomorphic map from matrix entries, rescaling to determinant 1.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::normalized(a, b, c, d, false)
            .ok_or_else(|| Error::invalid("matrix is singular or not finite"))
    }

    /// Same as [`MobiusMap::new`] but for `z ↦ (a z̄ + b)/(c z̄ + d)`.
    pub fn new_reversing(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        Self::normalized(a, b, c, d, true)
            .ok_or_else(|| Error::invalid("matrix is singular or not finite"))
    }

    /// `a_t = diag(e^{t/2}, e^{-t/2})`, translation by `t` along the vertical geodesic.
    pub fn diagonal(t: f64) -> Self {
        let h = (t / 2.0).exp();
        Self::normalized(Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(1.0 / h, 0.0), false)
            .expect("diagonal matrix is invertible")
    }

    /// `n_w: z ↦ z + w`.
    pub fn translation(w: Complex64) -> Self {
        Self::normalized(ONE, w, ZERO, ONE, false).expect("unipotent matrix is invertible")
    }

    /// `n⁻_w`, the lower unipotent matrix `[[1, 0], [w, 1]]`.
    pub fn lower_unipotent(w: Complex64) -> Self {
        Self::normalized(ONE, ZERO, w, ONE, false).expect("unipotent matrix is invertible")
    }

    /// `diag(e^{iθ}, e^{-iθ})`: rotation by `2θ` about the origin.
    pub fn rotation(theta: f64) -> Self {
        let u = Complex64::from_polar(1.0, theta);
        Self::normalized(u, ZERO, ZERO, u.conj(), false).expect("rotation is invertible")
    }

    /// `z ↦ λz + p`, i.e. `n_p · a_{log λ}`.
    pub fn similarity(lambda: f64, shift: Complex64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("similarity ratio must be positive, got {lambda}")));
        }
        Ok(Self::translation(shift).compose(&Self::diagonal(lambda.ln())))
    }

    /// Complex conjugation `z ↦ z̄`, the reflection in the real axis.
    pub fn conjugation() -> Self {
        MobiusMap {
            reversing: true,
            ..Self::IDENTITY
        }
    }

    /// Inversion (reflection) in a generalized circle. Fixes the circle pointwise
    /// and swaps its two complementary disks.
    pub fn inversion(circle: &GeneralizedCircle) -> Self {
        let (a, b, c) = circle.coefficients();
        // z ↦ (−b z̄ − c)/(a z̄ + b̄); determinant −(|b|² − ac) = −1
        Self::normalized(-b, Complex64::new(-c, 0.0), Complex64::new(a, 0.0), b.conj(), true)
            .expect("normalized circle has nonzero discriminant")
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn is_reversing(&self) -> bool {
        self.reversing
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn neg(&self) -> Self {
        MobiusMap {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            reversing: self.reversing,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let [p, q, r, s] = if self.reversing {
            [other.a.conj(), other.b.conj(), other.c.conj(), other.d.conj()]
        } else {
            other.entries()
        };
        let a = self.a * p + self.b * r;
        let b = self.a * q + self.b * s;
        let c = self.c * p + self.d * r;
        let d = self.c * q + self.d * s;
        MobiusMap::normalized(a, b, c, d, self.reversing ^ other.reversing)
            .expect("product of invertible matrices is invertible")
    }

    pub fn inverse(&self) -> MobiusMap {
        let (a, b, c, d) = (self.d, -self.b, -self.c, self.a);
        let m = if self.reversing {
            MobiusMap {
                a: a.conj(),
                b: b.conj(),
                c: c.conj(),
                d: d.conj(),
                reversing: true,
            }
        } else {
            MobiusMap {
                a,
                b,
                c,
                d,
                reversing: false,
            }
        };
        m.canonical_sign()
    }

    /// Action on the Riemann sphere.
    pub fn apply_boundary(&self, z: ExtComplex) -> ExtComplex {
        let z = if self.reversing { z.conj() } else { z };
        match z {
            ExtComplex::Infinity => {
                if self.c == ZERO {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(w) => {
                let den = self.c * w + self.d;
                if den.norm_sqr() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * w + self.b) / den)
                }
            }
        }
    }

    /// Poincaré extension to upper half-space.
    pub fn apply_h3(&self, x: &UHPoint) -> UHPoint {
        let z = if self.reversing { x.z.conj() } else { x.z };
        let r2 = x.r * x.r;
        let czd = self.c * z + self.d;
        let den = czd.norm_sqr() + self.c.norm_sqr() * r2;
        let num = (self.a * z + self.b) * czd.conj() + self.a * self.c.conj() * r2;
        UHPoint::new_unchecked(num / den, x.r / den)
    }

    /// Image of a generalized circle, with discriminant 1.
    ///
    /// The interior (the side where the defining form is negative) is carried to
    /// the interior of the image, for reversing maps as well.
    pub fn transform_circle(&self, circle: &GeneralizedCircle) -> GeneralizedCircle {
        let (a, b, c) = circle.coefficients();
        // Hermitian matrix H = [[a, b], [b̄, c]]; conjugation swaps b and b̄
        let b = if self.reversing { b.conj() } else { b };
        // N = g⁻¹ for the holomorphic part, H' = N* H N
        let (p, q, r, s) = (self.d, -self.b, -self.c, self.a);
        let hp = a * p + b * r;
        let hq = a * q + b * s;
        let hr = b.conj() * p + c * r;
        let hs = b.conj() * q + c * s;
        let a2 = (p.conj() * hp + r.conj() * hr).re;
        let b2 = p.conj() * hq + r.conj() * hs;
        let c2 = (q.conj() * hq + s.conj() * hs).re;
        if a2.abs() < tol::LINE * (1.0 + b2.norm()) {
            return GeneralizedCircle::renormalized(a2, b2, c2);
        }
        // det N = 1 preserves the discriminant; recomputing |b'|² − a'c' would
        // cancel catastrophically for small image circles
        GeneralizedCircle::from_unit_discriminant(a2, b2)
    }

    /// Entry-wise comparison up to the projective sign.
    pub fn approx_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        if self.reversing != other.reversing {
            return false;
        }
        let close = |sign: f64| {
            self.entries()
                .iter()
                .zip(other.entries())
                .all(|(x, y)| (x - y * sign).norm() <= tol * (1.0 + x.norm()))
        };
        close(1.0) || close(-1.0)
    }

    pub fn key(&self) -> ElementKey {
        let q = |x: f64| (x / tol::ELEMENT_GRID).round() as i64;
        let e = self.canonical_sign().entries();
        ElementKey(
            [
                q(e[0].re),
                q(e[0].im),
                q(e[1].re),
                q(e[1].im),
                q(e[2].re),
                q(e[2].im),
                q(e[3].re),
                q(e[3].im),
            ],
            self.reversing,
        )
    }

    fn normalized(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
        reversing: bool,
    ) -> Option<Self> {
        let det = a * d - b * c;
        if !(det.norm() > 0.0) || ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return None;
        }
        let s = det.sqrt();
        Some(
            MobiusMap {
                a: a / s,
                b: b / s,
                c: c / s,
                d: d / s,
                reversing,
            }
            .canonical_sign(),
        )
    }

    /// The first entry (in a, b, c, d order) that is not negligible gets a
    /// nonnegative real part, with ties on the imaginary axis broken by a
    /// nonnegative imaginary part.
    fn canonical_sign(self) -> Self {
        let entries = self.entries();
        let scale = entries.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let Some(lead) = entries.iter().find(|x| x.norm() > tol::ALGEBRAIC * scale) else {
            return self;
        };
        let eps = tol::ALGEBRAIC * lead.norm();
        let flip = lead.re < -eps || (lead.re.abs() <= eps && lead.im < 0.0);
        if flip {
            MobiusMap {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
                reversing: self.reversing,
            }
        } else {
            self
        }
    }
}

impl PartialEq for MobiusMap {
    /// Exact projective equality.
    fn eq(&self, other: &Self) -> bool {
        self.reversing == other.reversing
            && (self.entries() == other.entries()
                || self.entries().iter().zip(other.entries()).all(|(x, y)| *x == -y))
    }
}

impl Default for MobiusMap {
    fn default() -> Self {
        Self::IDENTITY
    }
}
