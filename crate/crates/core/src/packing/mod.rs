//! Circle packings: Apollonian gaskets, Schottky pairings, generic group orbits.

mod bouquet;
mod descartes;
mod group;
mod index;
mod orbit;
mod spec;

pub use bouquet::{detect_bouquet, BouquetReport, DEFAULT_MIN_FAMILY};
pub use descartes::{apollonian_enumerate, DescartesQuadruple};
pub use group::{schottky_build, Alphabet, Disk, Generator, GroupPresentation};
pub use orbit::{orbit_enumerate, EnumerateOptions, DEFAULT_PATIENCE};
pub use spec::{CircleSpec, DiskPairSpec, GeneratorSpec, PackingSpec};

use num_complex::Complex64;

use crate::moebius::{CircleGeometry, GeneralizedCircle, MobiusMap};
use index::CircleIndex;
use crate::Result;

/// One circle of a packing with its cached geometry and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct PackedCircle {
    pub circle: GeneralizedCircle,
    pub shape: CircleGeometry,
    /// Generation at which the circle was first produced; 0 for seeds.
    pub word_len: u32,
    /// Index of the circle it was generated from, when known.
    pub parent: Option<u32>,
}

impl PackedCircle {
    pub fn new(circle: GeneralizedCircle, word_len: u32, parent: Option<u32>) -> Self {
        PackedCircle {
            shape: circle.geometry(),
            circle,
            word_len,
            parent,
        }
    }

    pub fn curvature(&self) -> f64 {
        self.shape.curvature()
    }

    pub fn is_seed(&self) -> bool {
        self.word_len == 0
    }
}

/// Counters collected while a packing is enumerated.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnumerationStats {
    /// Descartes quadruples produced (Apollonian enumeration only).
    pub quadruples: u64,
    /// Largest |(Σk)² − 2Σk²| over all produced quadruples.
    pub max_curvature_residual: f64,
    /// Largest |(Σkz)² − 2Σ(kz)²| over all produced quadruples.
    pub max_center_residual: f64,
    /// Group elements (or quadruples) that were expanded.
    pub nodes_expanded: u64,
    /// Insertions that matched a circle already present.
    pub duplicate_hits: u64,
    /// Largest dedup-coordinate distance between two merged circles.
    pub max_merge_distance: f64,
}

/// A finite, deduplicated set of circles with curvature below a recorded bound
/// (plus the seed circles, which are always retained).
#[derive(Clone, Debug)]
pub struct Packing {
    circles: Vec<PackedCircle>,
    index: CircleIndex,
    t_bound: f64,
    source: Option<PackingSpec>,
    pub stats: EnumerationStats,
}

impl Packing {
    pub fn new(t_bound: f64) -> Self {
        Packing {
            circles: Vec::new(),
            index: CircleIndex::default(),
            t_bound,
            source: None,
            stats: EnumerationStats::default(),
        }
    }

    /// Builds a packing from already-deduplicated entries, e.g. when reading a file.
    pub fn from_entries(entries: Vec<PackedCircle>, t_bound: f64) -> Result<Self> {
        let mut packing = Packing::new(t_bound);
        for (row, entry) in entries.into_iter().enumerate() {
            if packing.index.find(&entry.circle).is_some() {
                return Err(crate::Error::Parse {
                    line: row + 2,
                    message: "duplicate circle".into(),
                });
            }
            packing.index.push(&entry.circle);
            packing.circles.push(entry);
        }
        Ok(packing)
    }

    /// Insert-if-absent. Returns the index of the circle and whether it was new.
    pub fn insert(&mut self, circle: GeneralizedCircle, word_len: u32, parent: Option<u32>) -> (u32, bool) {
        if let Some((idx, dist)) = self.index.find(&circle) {
            self.stats.duplicate_hits += 1;
            self.stats.max_merge_distance = self.stats.max_merge_distance.max(dist);
            return (idx, false);
        }
        let idx = self.index.push(&circle);
        self.circles.push(PackedCircle::new(circle, word_len, parent));
        (idx, true)
    }

    pub fn contains(&self, circle: &GeneralizedCircle) -> bool {
        self.index.find(circle).is_some()
    }

    /// Index of the stored circle matching `circle`, if any.
    pub fn find(&self, circle: &GeneralizedCircle) -> Option<u32> {
        self.index.find(circle).map(|(i, _)| i)
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn circles(&self) -> &[PackedCircle] {
        &self.circles
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PackedCircle> {
        self.circles.iter()
    }

    /// Curvature bound up to which the packing is complete.
    pub fn t_bound(&self) -> f64 {
        self.t_bound
    }

    pub fn source(&self) -> Option<&PackingSpec> {
        self.source.as_ref()
    }

    pub fn set_source(&mut self, spec: PackingSpec) {
        self.source = Some(spec);
    }

    /// Whether both packings hold the same circles, up to the dedup tolerance.
    pub fn same_circles(&self, other: &Packing) -> bool {
        self.len() == other.len() && self.circles.iter().all(|e| other.contains(&e.circle))
    }

    /// Reorders circles by (signed curvature, cx, cy); lines come first, ordered
    /// by (nx, ny, offset). Parent links are remapped.
    pub fn sort_canonical(&mut self) {
        let mut order: Vec<usize> = (0..self.circles.len()).collect();
        order.sort_by(|&i, &j| sort_key(&self.circles[i].shape).cmp_total(&sort_key(&self.circles[j].shape)));
        let mut new_pos = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_pos[old] = new as u32;
        }
        let mut sorted: Vec<PackedCircle> = order.iter().map(|&i| self.circles[i].clone()).collect();
        for entry in &mut sorted {
            entry.parent = entry.parent.map(|p| new_pos[p as usize]);
        }
        self.index = CircleIndex::default();
        for entry in &sorted {
            self.index.push(&entry.circle);
        }
        self.circles = sorted;
    }

    /// Axis-aligned bounding box `(min, max)` of all circles; lines are ignored.
    pub fn bounding_box(&self) -> Option<(Complex64, Complex64)> {
        let mut bbox: Option<(Complex64, Complex64)> = None;
        for entry in &self.circles {
            if let CircleGeometry::Circle { center, radius, .. } = entry.shape {
                let lo = center - Complex64::new(radius, radius);
                let hi = center + Complex64::new(radius, radius);
                bbox = Some(match bbox {
                    None => (lo, hi),
                    Some((a, b)) => (
                        Complex64::new(a.re.min(lo.re), a.im.min(lo.im)),
                        Complex64::new(b.re.max(hi.re), b.im.max(hi.im)),
                    ),
                });
            }
        }
        bbox
    }

    /// Image under `z ↦ λz + shift`. Curvatures scale by `1/λ`, and so does the bound.
    pub fn scaled(&self, lambda: f64, shift: Complex64) -> Result<Packing> {
        let g = MobiusMap::similarity(lambda, shift)?;
        let mut out = Packing::new(self.t_bound / lambda);
        for entry in &self.circles {
            out.insert(g.transform_circle(&entry.circle), entry.word_len, entry.parent);
        }
        Ok(out)
    }

    /// Checks the structural invariants: no two circles within the dedup
    /// tolerance, and every non-seed circle below the curvature bound.
    pub fn check_invariants(&self) -> Result<()> {
        let mut seen = CircleIndex::default();
        for entry in &self.circles {
            if seen.find(&entry.circle).is_some() {
                return Err(crate::Error::invalid("packing contains duplicate circles"));
            }
            seen.push(&entry.circle);
        }
        if let Some(bad) = self
            .circles
            .iter()
            .find(|e| !e.is_seed() && !(e.curvature() < self.t_bound))
        {
            return Err(crate::Error::invalid(format!(
                "circle of curvature {} exceeds bound {}",
                bad.curvature(),
                self.t_bound
            )));
        }
        Ok(())
    }
}

struct SortKey([f64; 4]);

impl SortKey {
    fn cmp_total(&self, other: &SortKey) -> std::cmp::Ordering {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn sort_key(shape: &CircleGeometry) -> SortKey {
    match *shape {
        CircleGeometry::Line { normal, offset } => SortKey([f64::NEG_INFINITY, normal.re, normal.im, offset]),
        CircleGeometry::Circle {
            center,
            signed_curvature,
            ..
        } => SortKey([signed_curvature, center.re, center.im, 0.0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn insert_is_idempotent() {
        let mut p = Packing::new(10.0);
        let circle = GeneralizedCircle::from_center_radius(c(0.1, 0.2), 0.5);
        assert_eq!(p.insert(circle, 0, None), (0, true));
        assert_eq!(p.insert(circle.reversed(), 3, Some(0)), (0, false));
        assert_eq!(p.len(), 1);
        assert_eq!(p.stats.duplicate_hits, 1);
        assert!(p.stats.max_merge_distance < 1e-15);
    }

    #[test]
    fn sort_remaps_parents() {
        let mut p = Packing::new(10.0);
        p.insert(GeneralizedCircle::from_center_radius(c(0.0, 0.0), 0.5), 0, None);
        p.insert(GeneralizedCircle::from_center_radius(c(3.0, 0.0), 1.0), 1, Some(0));
        p.sort_canonical();
        assert_eq!(p.circles()[0].curvature(), 1.0);
        assert_eq!(p.circles()[0].parent, Some(1));
        assert!(p.check_invariants().is_ok());
    }

    #[test]
    fn scaling_divides_curvature() {
        let mut p = Packing::new(10.0);
        p.insert(GeneralizedCircle::from_center_radius(c(1.0, 0.0), 0.25), 0, None);
        let q = p.scaled(2.0, c(0.5, 0.0)).unwrap();
        assert!((q.circles()[0].curvature() - 2.0).abs() < 1e-14);
        assert_eq!(q.t_bound(), 5.0);
    }
}
