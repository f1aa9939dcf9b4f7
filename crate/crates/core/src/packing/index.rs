use std::collections::HashMap;

use crate::moebius::{DedupCoords, GeneralizedCircle};
use crate::tol;

/// Cells are a few tolerances wide, so a query usually touches one cell.
const CELL: f64 = 4.0 * tol::DEDUP;

const NONE: u32 = u32::MAX;

/// Tolerant lookup of circles by their dedup coordinates.
///
/// Entries are bucketed on a grid; each bucket is a linked list threaded
/// through `next`. A query scans every bucket within `tol::DEDUP` of the query
/// point, so a match is never lost to a cell boundary.
#[derive(Clone, Debug, Default)]
pub(crate) struct CircleIndex {
    heads: HashMap<(bool, [i64; 4]), u32>,
    next: Vec<u32>,
    coords: Vec<DedupCoords>,
}

impl CircleIndex {
    /// Closest stored entry within tolerance, with its distance.
    pub fn find(&self, circle: &GeneralizedCircle) -> Option<(u32, f64)> {
        self.find_coords(&circle.dedup_coords())
    }

    pub fn find_coords(&self, q: &DedupCoords) -> Option<(u32, f64)> {
        let lo = q.x.map(|v| ((v - tol::DEDUP) / CELL).floor() as i64);
        let hi = q.x.map(|v| ((v + tol::DEDUP) / CELL).floor() as i64);
        let mut best: Option<(u32, f64)> = None;
        let mut cell = lo;
        loop {
            let mut at = self.heads.get(&(q.line, cell)).copied().unwrap_or(NONE);
            while at != NONE {
                let d = self.coords[at as usize].distance(q);
                if d <= tol::DEDUP && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((at, d));
                }
                at = self.next[at as usize];
            }
            // odometer over the box lo..=hi
            let mut k = 0;
            while k < 4 {
                if cell[k] < hi[k] {
                    cell[k] += 1;
                    break;
                }
                cell[k] = lo[k];
                k += 1;
            }
            if k == 4 {
                return best;
            }
        }
    }

    /// Appends an entry; its id is the current length.
    pub fn push(&mut self, circle: &GeneralizedCircle) -> u32 {
        let coords = circle.dedup_coords();
        let id = self.coords.len() as u32;
        let cell = coords.x.map(|v| (v / CELL).floor() as i64);
        let head = self.heads.entry((coords.line, cell)).or_insert(NONE);
        self.next.push(*head);
        *head = id;
        self.coords.push(coords);
        id
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matches_across_cell_boundaries() {
        let mut index = CircleIndex::default();
        let r = (CELL * 1000.0).exp();
        let a = GeneralizedCircle::from_center_radius(Complex64::new(0.0, 0.0), r);
        index.push(&a);
        for shift in [-0.5, 0.5] {
            let b = GeneralizedCircle::from_center_radius(Complex64::new(0.0, 0.0), r * (shift * tol::DEDUP).exp());
            assert_eq!(index.find(&b).map(|(i, _)| i), Some(0));
        }
        let far = GeneralizedCircle::from_center_radius(Complex64::new(0.0, 0.0), r * (3.0 * tol::DEDUP).exp());
        assert!(index.find(&far).is_none());
    }

    #[test]
    fn picks_the_closest_entry() {
        let mut index = CircleIndex::default();
        let base = GeneralizedCircle::from_center_radius(Complex64::new(0.25, 0.0), 0.5);
        let nudged = GeneralizedCircle::from_center_radius(Complex64::new(0.25 + 4e-7, 0.0), 0.5);
        index.push(&base);
        index.push(&nudged);
        let q = GeneralizedCircle::from_center_radius(Complex64::new(0.25 + 3e-7, 0.0), 0.5);
        assert_eq!(index.find(&q).map(|(i, _)| i), Some(1));
    }
}
