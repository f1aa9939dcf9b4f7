use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::moebius::CircleGeometry;
use crate::tol;
use crate::{Error, Result};

/// A planar region built from closed primitives and boolean combinations.
///
/// Rectangles and disks are closed; a half-plane is `{z : ⟨normal, z⟩ ≤ offset}`.
/// The complement of a region is taken as the closure of the set complement, so
/// every region is closed and its boundary has empty interior. Curve predicates
/// work on the set of curve parameters lying in the region; a curve running
/// exactly along the boundary of a complement is therefore treated as outside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    Rectangle { min: [f64; 2], max: [f64; 2] },
    Disk { center: [f64; 2], radius: f64 },
    Halfplane { normal: [f64; 2], offset: f64 },
    Union { parts: Vec<Region> },
    Intersection { parts: Vec<Region> },
    Complement { inner: Box<Region> },
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Region {
    pub fn rectangle(min: Complex64, max: Complex64) -> Self {
        Region::Rectangle {
            min: pair(min),
            max: pair(max),
        }
    }

    pub fn disk(center: Complex64, radius: f64) -> Self {
        Region::Disk {
            center: pair(center),
            radius,
        }
    }

    pub fn halfplane(normal: Complex64, offset: f64) -> Self {
        Region::Halfplane {
            normal: pair(normal),
            offset,
        }
    }

    pub fn union(parts: Vec<Region>) -> Self {
        Region::Union { parts }
    }

    pub fn intersection(parts: Vec<Region>) -> Self {
        Region::Intersection { parts }
    }

    pub fn complement(inner: Region) -> Self {
        Region::Complement { inner: Box::new(inner) }
    }

    /// Syntactic boundedness: rectangles and disks are bounded, half-planes and
    /// complements are not. An intersection is bounded if any part is.
    pub fn is_bounded(&self) -> bool {
        match self {
            Region::Rectangle { .. } | Region::Disk { .. } => true,
            Region::Halfplane { .. } | Region::Complement { .. } => false,
            Region::Union { parts } => parts.iter().all(Region::is_bounded),
            Region::Intersection { parts } => parts.iter().any(Region::is_bounded),
        }
    }

    /// Rejects degenerate primitives (empty rectangles, nonpositive radii, zero normals).
    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Rectangle { min, max } => {
                if !(min[0] < max[0] && min[1] < max[1]) || !min.iter().chain(max).all(|x| x.is_finite()) {
                    return Err(Error::invalid(format!("rectangle {min:?}..{max:?} is degenerate")));
                }
            }
            Region::Disk { center, radius } => {
                if !(*radius > 0.0 && radius.is_finite()) || !center.iter().all(|x| x.is_finite()) {
                    return Err(Error::invalid(format!("disk radius must be positive, got {radius}")));
                }
            }
            Region::Halfplane { normal, offset } => {
                if !(cx(*normal).norm() > 0.0) || !offset.is_finite() {
                    return Err(Error::invalid("half-plane needs a nonzero normal"));
                }
            }
            Region::Union { parts } | Region::Intersection { parts } => {
                if parts.is_empty() {
                    return Err(Error::invalid("boolean combination of no regions"));
                }
                parts.iter().try_for_each(Region::validate)?;
            }
            Region::Complement { inner } => inner.validate()?,
        }
        Ok(())
    }

    /// Point membership, with the slack of [`tol::REGION`].
    pub fn contains(&self, z: Complex64) -> bool {
        let slack = |scale: f64| tol::REGION * (z.norm() + scale);
        match self {
            Region::Rectangle { min, max } => {
                let d = slack(cx(*min).norm().max(cx(*max).norm()));
                min[0] - d <= z.re && z.re <= max[0] + d && min[1] - d <= z.im && z.im <= max[1] + d
            }
            Region::Disk { center, radius } => {
                let p = cx(*center);
                (z - p).norm() <= radius + slack(p.norm() + radius)
            }
            Region::Halfplane { normal, offset } => {
                let n = cx(*normal);
                (n.conj() * z).re / n.norm() <= offset + slack(offset.abs())
            }
            Region::Union { parts } => parts.iter().any(|r| r.contains(z)),
            Region::Intersection { parts } => parts.iter().all(|r| r.contains(z)),
            Region::Complement { inner } => !inner.contains(z),
        }
    }

    /// Whether the circle (the curve, not the disk it bounds) meets the region.
    pub fn meets(&self, shape: &CircleGeometry) -> bool {
        !self.trace(shape).is_empty()
    }

    /// Whether the whole circle lies in the region. Lines are never contained
    /// in a bounded region, and are only contained in regions covering them.
    pub fn contains_curve(&self, shape: &CircleGeometry) -> bool {
        self.trace(shape).is_full()
    }

    /// Parameters of the curve that lie in the region.
    fn trace(&self, shape: &CircleGeometry) -> Intervals {
        match self {
            Region::Rectangle { min, max } => {
                let sides = [
                    (Complex64::new(-1.0, 0.0), -min[0]),
                    (Complex64::new(1.0, 0.0), max[0]),
                    (Complex64::new(0.0, -1.0), -min[1]),
                    (Complex64::new(0.0, 1.0), max[1]),
                ];
                sides
                    .iter()
                    .fold(Intervals::full(shape), |acc, &(n, off)| acc.intersect(&halfplane_trace(shape, n, off)))
            }
            Region::Disk { center, radius } => disk_trace(shape, cx(*center), *radius),
            Region::Halfplane { normal, offset } => {
                let n = cx(*normal);
                halfplane_trace(shape, n / n.norm(), *offset)
            }
            Region::Union { parts } => parts
                .iter()
                .fold(Intervals::empty(shape), |acc, r| acc.union(&r.trace(shape))),
            Region::Intersection { parts } => parts
                .iter()
                .fold(Intervals::full(shape), |acc, r| acc.intersect(&r.trace(shape))),
            Region::Complement { inner } => inner.trace(shape).complement(),
        }
    }

    /// Image under `z ↦ λz + shift`.
    pub fn transformed(&self, lambda: f64, shift: Complex64) -> Region {
        let map = |p: [f64; 2]| pair(cx(p) * lambda + shift);
        match self {
            Region::Rectangle { min, max } => Region::Rectangle {
                min: map(*min),
                max: map(*max),
            },
            Region::Disk { center, radius } => Region::Disk {
                center: map(*center),
                radius: radius * lambda,
            },
            Region::Halfplane { normal, offset } => {
                let n = cx(*normal);
                Region::Halfplane {
                    normal: *normal,
                    offset: offset * lambda + (n.conj() * shift).re / n.norm(),
                }
            }
            Region::Union { parts } => Region::Union {
                parts: parts.iter().map(|r| r.transformed(lambda, shift)).collect(),
            },
            Region::Intersection { parts } => Region::Intersection {
                parts: parts.iter().map(|r| r.transformed(lambda, shift)).collect(),
            },
            Region::Complement { inner } => Region::Complement {
                inner: Box::new(inner.transformed(lambda, shift)),
            },
        }
    }
}

/// Size of a curve for the purpose of [`tol::REGION`].
fn curve_scale(shape: &CircleGeometry) -> f64 {
    match *shape {
        CircleGeometry::Circle { center, radius, .. } => center.norm() + radius,
        CircleGeometry::Line { offset, .. } => offset.abs(),
    }
}

/// Closed subsets of a curve's parameter domain, as sorted disjoint intervals.
/// Circles use the angle in `[0, 2π]`, lines the arclength along the line.
#[derive(Clone, Debug)]
struct Intervals {
    lo: f64,
    hi: f64,
    parts: Vec<(f64, f64)>,
}

impl Intervals {
    fn domain(shape: &CircleGeometry) -> (f64, f64) {
        match shape {
            CircleGeometry::Circle { .. } => (0.0, TAU),
            CircleGeometry::Line { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn empty(shape: &CircleGeometry) -> Self {
        let (lo, hi) = Self::domain(shape);
        Intervals { lo, hi, parts: vec![] }
    }

    fn full(shape: &CircleGeometry) -> Self {
        let (lo, hi) = Self::domain(shape);
        Intervals {
            lo,
            hi,
            parts: vec![(lo, hi)],
        }
    }

    fn from_parts(lo: f64, hi: f64, mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|(a, b)| a <= b);
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut parts: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match parts.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => parts.push((a, b)),
            }
        }
        Intervals { lo, hi, parts }
    }

    fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    fn is_full(&self) -> bool {
        self.parts.len() == 1 && self.parts[0] == (self.lo, self.hi)
    }

    fn union(&self, other: &Intervals) -> Intervals {
        let raw = self.parts.iter().chain(&other.parts).copied().collect();
        Self::from_parts(self.lo, self.hi, raw)
    }

    fn intersect(&self, other: &Intervals) -> Intervals {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a1, b1) = self.parts[i];
            let (a2, b2) = other.parts[j];
            let (a, b) = (a1.max(a2), b1.min(b2));
            if a <= b {
                out.push((a, b));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Intervals {
            lo: self.lo,
            hi: self.hi,
            parts: out,
        }
    }

    /// Closure of the complement within the domain.
    fn complement(&self) -> Intervals {
        let mut out = Vec::new();
        let mut start = self.lo;
        for &(a, b) in &self.parts {
            if a > start {
                out.push((start, a));
            }
            start = b;
        }
        if start < self.hi {
            out.push((start, self.hi));
        }
        Intervals {
            lo: self.lo,
            hi: self.hi,
            parts: out,
        }
    }
}

/// Angles `θ` with `cos(θ − φ) ≤ u`, as intervals in `[0, 2π]`.
fn arc_below(phi: f64, u: f64) -> Vec<(f64, f64)> {
    if u >= 1.0 {
        return vec![(0.0, TAU)];
    }
    if u < -1.0 {
        return vec![];
    }
    let alpha = u.acos();
    let start = (phi + alpha).rem_euclid(TAU);
    let end = start + TAU - 2.0 * alpha;
    if end <= TAU {
        vec![(start, end)]
    } else {
        vec![(start, TAU), (0.0, end - TAU)]
    }
}

/// Parametrisation of a line: `base + t·direction` with unit direction.
fn line_frame(normal: Complex64, offset: f64) -> (Complex64, Complex64) {
    (normal * offset, normal * Complex64::i())
}

fn halfplane_trace(shape: &CircleGeometry, n: Complex64, offset: f64) -> Intervals {
    let (lo, hi) = Intervals::domain(shape);
    let offset = offset + tol::REGION * (curve_scale(shape) + offset.abs());
    let parts = match *shape {
        CircleGeometry::Circle { center, radius, .. } => {
            // ⟨n, c⟩ + r cos(θ − arg n) ≤ offset
            let u = (offset - (n.conj() * center).re) / radius;
            arc_below(n.arg(), u)
        }
        CircleGeometry::Line { normal, offset: line_offset } => {
            let (base, dir) = line_frame(normal, line_offset);
            let slope = (n.conj() * dir).re;
            let at0 = (n.conj() * base).re;
            if slope.abs() < tol::LINE {
                if at0 <= offset {
                    vec![(lo, hi)]
                } else {
                    vec![]
                }
            } else {
                let t = (offset - at0) / slope;
                if slope > 0.0 {
                    vec![(lo, t)]
                } else {
                    vec![(t, hi)]
                }
            }
        }
    };
    Intervals::from_parts(lo, hi, parts)
}

fn disk_trace(shape: &CircleGeometry, p: Complex64, rho: f64) -> Intervals {
    let (lo, hi) = Intervals::domain(shape);
    let rho = rho + tol::REGION * (curve_scale(shape) + p.norm() + rho);
    let parts = match *shape {
        CircleGeometry::Circle { center, radius, .. } => {
            let v = center - p;
            let d = v.norm();
            if d == 0.0 {
                if radius <= rho {
                    vec![(lo, hi)]
                } else {
                    vec![]
                }
            } else {
                // |v + r e^{iθ}|² ≤ ρ² ⇔ cos(θ − (arg v + π)) ≥ −u ⇔ cos(θ − arg v) ≤ u
                let u = (rho * rho - d * d - radius * radius) / (2.0 * radius * d);
                arc_below(v.arg(), u)
            }
        }
        CircleGeometry::Line { normal, offset } => {
            let (base, dir) = line_frame(normal, offset);
            let w = base - p;
            let half_b = (dir.conj() * w).re;
            let disc = half_b * half_b - (w.norm_sqr() - rho * rho);
            if disc < 0.0 {
                vec![]
            } else {
                let s = disc.sqrt();
                vec![(-half_b - s, -half_b + s)]
            }
        }
    };
    Intervals::from_parts(lo, hi, parts)
}
