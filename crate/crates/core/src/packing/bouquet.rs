use num_complex::Complex64;

use super::Packing;
use crate::moebius::CircleGeometry;

/// Minimum family size for the bouquet heuristic.
pub const DEFAULT_MIN_FAMILY: usize = 5;

/// Outcome of [`detect_bouquet`]: the verdict and the circles (packing indices)
/// forming the two tangent families, largest radius first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BouquetReport {
    pub detected: bool,
    pub families: [Vec<usize>; 2],
}

/// Finite-data check for a bouquet of tangent circles glued at `point`.
///
/// Circles passing within `tol` of the point are grouped by the direction from
/// the point to their center; circles sharing a direction are pairwise
/// internally tangent there. A bouquet needs two opposite families of at least
/// `min_family` circles each, with strictly decreasing radii that shrink at
/// least by half across the family.
pub fn detect_bouquet(packing: &Packing, point: Complex64, tol: f64, min_family: usize) -> BouquetReport {
    // (direction, radius, index)
    let mut through: Vec<(Complex64, f64, usize)> = Vec::new();
    for (i, entry) in packing.iter().enumerate() {
        if let CircleGeometry::Circle { center, radius, .. } = entry.shape {
            let offset = center - point;
            if (offset.norm() - radius).abs() <= tol {
                through.push((offset / offset.norm(), radius, i));
            }
        }
    }
    let angle_tol = tol.max(1e-9);
    let mut groups: Vec<(Complex64, Vec<(f64, usize)>)> = Vec::new();
    for (dir, radius, i) in through {
        match groups.iter_mut().find(|(d, _)| (*d - dir).norm() <= angle_tol) {
            Some((_, members)) => members.push((radius, i)),
            None => groups.push((dir, vec![(radius, i)])),
        }
    }
    let qualifies = |members: &mut Vec<(f64, usize)>| {
        members.sort_by(|a, b| b.0.total_cmp(&a.0));
        members.len() >= min_family
            && members.windows(2).all(|w| w[1].0 < w[0].0 - tol)
            && members.last().unwrap().0 <= 0.5 * members[0].0
    };
    for i in 0..groups.len() {
        if !qualifies(&mut groups[i].1) {
            continue;
        }
        for j in 0..groups.len() {
            if j != i && (groups[i].0 + groups[j].0).norm() <= angle_tol && qualifies(&mut groups[j].1) {
                return BouquetReport {
                    detected: true,
                    families: [
                        groups[i].1.iter().map(|m| m.1).collect(),
                        groups[j].1.iter().map(|m| m.1).collect(),
                    ],
                };
            }
        }
    }
    BouquetReport::default()
}
