use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::moebius::{hyp_dist, MobiusMap, UHPoint};
use crate::packing::{Alphabet, GroupPresentation};
use crate::tol;
use crate::{Error, Result};

/// One orbit point `γj` with the length of the word that first reached it and
/// its distance from `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitAtom {
    pub point: UHPoint,
    pub word_len: u32,
    pub dist: f64,
}

/// The points `γj` for `γ` in a word ball, deduplicated.
#[derive(Clone, Debug, Default)]
pub struct OrbitPointSet {
    atoms: Vec<OrbitAtom>,
    max_word_len: u32,
}

impl OrbitPointSet {
    /// Builds a set from explicit atoms. The identity atom `(j, 0, 0)` is
    /// added if missing; distances are recomputed from the points.
    pub fn from_atoms(atoms: impl IntoIterator<Item = OrbitAtom>) -> Self {
        let mut out: Vec<OrbitAtom> = Vec::new();
        let mut has_identity = false;
        for mut atom in atoms {
            atom.dist = hyp_dist(&UHPoint::J, &atom.point);
            has_identity |= atom.word_len == 0;
            out.push(atom);
        }
        if !has_identity {
            out.insert(
                0,
                OrbitAtom {
                    point: UHPoint::J,
                    word_len: 0,
                    dist: 0.0,
                },
            );
        }
        let max_word_len = out.iter().map(|a| a.word_len).max().unwrap_or(0);
        OrbitPointSet { atoms: out, max_word_len }
    }

    pub fn atoms(&self) -> &[OrbitAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn max_word_len(&self) -> u32 {
        self.max_word_len
    }
}

/// Quantised hyperbolic-local coordinates of a point: `log r` and the
/// horizontal position in units of the height.
fn point_key(x: &UHPoint) -> [i64; 3] {
    let q = |v: f64| (v / tol::ORBIT_POINT_GRID).round() as i64;
    [q(x.r.ln()), q(x.z.re / x.r), q(x.z.im / x.r)]
}

fn atom_of(map: &MobiusMap, word_len: u32) -> OrbitAtom {
    let point = map.apply_h3(&UHPoint::J);
    OrbitAtom {
        point,
        word_len,
        dist: hyp_dist(&UHPoint::J, &point),
    }
}

/// Prefix depth below which words are expanded sequentially; deeper subtrees
/// run in parallel.
const SPLIT_DEPTH: usize = 3;

struct Walker<'a> {
    alphabet: &'a Alphabet,
    /// Letters fixing `j`; a word ending in one of them repeats its prefix's point.
    stabilizing: Vec<bool>,
    max_word_len: usize,
}

impl Walker<'_> {
    fn visit(&self, map: &MobiusMap, last: usize, depth: usize, out: &mut Vec<OrbitAtom>) {
        if !self.stabilizing[last] {
            out.push(atom_of(map, depth as u32));
        }
        if depth == self.max_word_len {
            return;
        }
        for letter in self.alphabet.successors(Some(last)) {
            self.visit(&map.compose(&self.alphabet.letters[letter]), letter, depth + 1, out);
        }
    }
}

/// `{γj : |γ| ≤ max_word_len}` over freely reduced words.
///
/// Words ending in a letter that fixes `j` are expanded but contribute no
/// point, which removes the duplicates coming from a stabiliser generated by
/// letters (for the Apollonian dual group, the reflection in the real axis).
/// Remaining coincidences are merged on a hyperbolic grid of
/// [`tol::ORBIT_POINT_GRID`]; each point keeps its shortest word length. Deep
/// words are walked depth-first in parallel and merged in a fixed order.
pub fn orbit_points(group: &GroupPresentation, max_word_len: usize) -> OrbitPointSet {
    let alphabet = group.alphabet();
    let stabilizing = alphabet
        .letters
        .iter()
        .map(|g| hyp_dist(&UHPoint::J, &g.apply_h3(&UHPoint::J)) < tol::COMPOSED)
        .collect();
    let walker = Walker {
        alphabet: &alphabet,
        stabilizing,
        max_word_len,
    };

    let mut raw = vec![atom_of(&MobiusMap::identity(), 0)];
    let mut level: Vec<(MobiusMap, Option<usize>)> = vec![(MobiusMap::identity(), None)];
    let split = SPLIT_DEPTH.min(max_word_len);
    for depth in 1..=split {
        let mut next = Vec::new();
        for (map, last) in &level {
            for letter in alphabet.successors(*last) {
                let g = map.compose(&alphabet.letters[letter]);
                if !walker.stabilizing[letter] {
                    raw.push(atom_of(&g, depth as u32));
                }
                next.push((g, Some(letter)));
            }
        }
        level = next;
    }
    let deeper: Vec<Vec<OrbitAtom>> = if max_word_len > split {
        level
            .par_iter()
            .map(|(map, last)| {
                let mut out = Vec::new();
                for letter in alphabet.successors(*last) {
                    walker.visit(&map.compose(&alphabet.letters[letter]), letter, split + 1, &mut out);
                }
                out
            })
            .collect()
    } else {
        Vec::new()
    };

    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut atoms: Vec<OrbitAtom> = Vec::new();
    for atom in raw.into_iter().chain(deeper.into_iter().flatten()) {
        match index.entry(point_key(&atom.point)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                let kept = &mut atoms[*e.get()];
                kept.word_len = kept.word_len.min(atom.word_len);
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(atoms.len());
                atoms.push(atom);
            }
        }
    }
    OrbitPointSet {
        atoms,
        max_word_len: max_word_len as u32,
    }
}

/// `Σ_γ e^{−s·d(x, γj)}` over the atoms.
pub fn poincare_sum(orbit: &OrbitPointSet, s: f64, x: &UHPoint) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::invalid(format!("exponent must be positive, got {s}")));
    }
    let at_j = *x == UHPoint::J;
    Ok(orbit
        .atoms
        .par_iter()
        .map(|a| {
            let d = if at_j { a.dist } else { hyp_dist(x, &a.point) };
            (-s * d).exp()
        })
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    OrbitGrowth,
    CircleCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub delta: f64,
    pub method: EstimateMethod,
    pub stderr: f64,
    /// Range of `R` (or of `log T` for circle counts) used by the fit.
    pub range: [f64; 2],
    /// Fit residuals in log space, one per sample.
    pub residuals: Vec<f64>,
}

const MIN_ATOMS: usize = 100;
const MIN_SPAN: f64 = 3.0;
const MIN_BALL: usize = 20;
const GRID_STEP: f64 = 0.25;

/// Slope of `log #{γ : d(j, γj) ≤ R}` against `R`.
///
/// The lower end of the range is the smallest `R` whose ball holds
/// 20 atoms. The word ball only contains the whole distance ball up to roughly
/// the closest point among the deepest words, so the upper end is the 1st
/// percentile of distances at the maximal word length.
pub fn critical_exponent_orbit(orbit: &OrbitPointSet) -> Result<ExponentEstimate> {
    if orbit.len() < MIN_ATOMS {
        return Err(Error::InsufficientData(format!(
            "{} orbit points, need {MIN_ATOMS}",
            orbit.len()
        )));
    }
    let mut dists: Vec<f64> = orbit.atoms.iter().map(|a| a.dist).collect();
    dists.par_sort_unstable_by(f64::total_cmp);
    let span = dists[dists.len() - 1] - dists[0];
    if span < MIN_SPAN {
        return Err(Error::InsufficientData(format!(
            "orbit distances span {span:.3}, need {MIN_SPAN}"
        )));
    }
    let r_lo = dists[MIN_BALL.min(dists.len()) - 1];
    let mut deepest: Vec<f64> = orbit
        .atoms
        .iter()
        .filter(|a| a.word_len == orbit.max_word_len)
        .map(|a| a.dist)
        .collect();
    deepest.sort_unstable_by(f64::total_cmp);
    let r_hi = if deepest.is_empty() {
        dists[dists.len() - 1]
    } else {
        deepest[deepest.len() / 100]
    };
    if !(r_hi - r_lo >= 4.0 * GRID_STEP) {
        return Err(Error::InsufficientData(format!(
            "complete distance range [{r_lo:.3}, {r_hi:.3}] too short"
        )));
    }
    let steps = ((r_hi - r_lo) / GRID_STEP).floor() as usize;
    let samples: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let r = r_lo + GRID_STEP * i as f64;
            let n = dists.partition_point(|&d| d <= r);
            (r, (n as f64).ln())
        })
        .collect();
    let n = samples.len() as f64;
    let xm = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let ym = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - xm).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - xm) * (s.1 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residuals: Vec<f64> = samples.iter().map(|s| s.1 - intercept - slope * s.0).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let stderr = if n > 2.0 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(ExponentEstimate {
        delta: slope,
        method: EstimateMethod::OrbitGrowth,
        stderr,
        range: [r_lo, r_lo + GRID_STEP * steps as f64],
        residuals,
    })
}
