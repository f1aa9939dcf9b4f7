use rayon::prelude::*;

use super::{GroupPresentation, Packing};
use crate::moebius::GeneralizedCircle;
use crate::tol;
use crate::{Error, Result};

/// Default number of consecutive unproductive expansions tolerated before a
/// branch is cut.
pub const DEFAULT_PATIENCE: u32 = 2;

/// Warn when merged duplicates were this far apart: the numerical drift is
/// then close enough to the dedup tolerance that some duplicates may be missed.
const MERGE_WARN: f64 = 0.1 * tol::DEDUP;

#[derive(Clone, Debug, Default)]
pub struct EnumerateOptions {
    /// Cut a branch once this many consecutive expansions produced no new
    /// circle below the curvature bound. `None` expands the full word ball.
    pub patience: Option<u32>,
    /// Worker threads for frontier expansion; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl EnumerateOptions {
    pub fn pruned() -> Self {
        EnumerateOptions {
            patience: Some(DEFAULT_PATIENCE),
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }
}

struct Node {
    circle: GeneralizedCircle,
    /// Letter that produced this circle; its inverse leads back to the parent.
    last: Option<usize>,
    unproductive: u32,
    /// Nearest ancestor stored in the packing.
    anchor: u32,
}

struct Candidate {
    circle: GeneralizedCircle,
    last: usize,
    keep: bool,
    known: bool,
    parent_unproductive: u32,
    anchor: u32,
}

/// Enumerates `{γ(C) : |γ| ≤ max_word_len, Curv(γC) < T} ∪ seeds`.
///
/// Circles are expanded level by level on the left (`C ↦ s(C)`), so every image
/// is computed one generator at a time from its parent circle. Applying a long
/// composed word to a seed loses far more precision, and duplicates then slip
/// past the dedup tolerance. A circle reached twice is expanded once, which
/// also takes care of relations and stabilisers. Lines are kept regardless of
/// the bound. Within a level the expansion runs in parallel against a
/// read-only snapshot of the packing, and results are merged in a fixed
/// order, so the output does not depend on the number of workers.
///
/// With `patience` set, a circle at or above the bound is still expanded, but
/// a branch is cut after `patience + 1` consecutive such circles. This is a
/// heuristic for general groups; for reflection groups with monotone curvature
/// (the Apollonian dual-circle group) it is exact.
pub fn orbit_enumerate(
    group: &GroupPresentation,
    seeds: &[GeneralizedCircle],
    t_bound: f64,
    max_word_len: usize,
    options: &EnumerateOptions,
) -> Result<Packing> {
    if !(t_bound > 0.0) {
        return Err(Error::invalid(format!("curvature bound must be positive, got {t_bound}")));
    }
    let run = || enumerate_levels(group, seeds, t_bound, max_word_len, options.patience);
    let packing = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    if packing.stats.max_merge_distance > MERGE_WARN {
        log::warn!(
            "merged duplicates up to {:.1e} apart (tolerance {:.0e}); the dedup tolerance may be too tight",
            packing.stats.max_merge_distance,
            tol::DEDUP
        );
    }
    log::debug!(
        "orbit enumeration: {} circles, {} duplicate hits, largest merge distance {:.1e}",
        packing.len(),
        packing.stats.duplicate_hits,
        packing.stats.max_merge_distance
    );
    Ok(packing)
}

fn enumerate_levels(
    group: &GroupPresentation,
    seeds: &[GeneralizedCircle],
    t_bound: f64,
    max_word_len: usize,
    patience: Option<u32>,
) -> Packing {
    let mut packing = Packing::new(t_bound);
    let alphabet = group.alphabet();
    let mut frontier: Vec<Node> = Vec::new();
    for seed in seeds {
        let (id, fresh) = packing.insert(*seed, 0, None);
        if fresh {
            frontier.push(Node {
                circle: *seed,
                last: None,
                unproductive: 0,
                anchor: id,
            });
        }
    }

    for level in 1..=max_word_len {
        if frontier.is_empty() || alphabet.letters.is_empty() {
            break;
        }
        packing.stats.nodes_expanded += frontier.len() as u64;
        let snapshot = &packing;
        let candidates: Vec<Vec<Candidate>> = frontier
            .par_iter()
            .map(|node| {
                alphabet
                    .successors(node.last)
                    .map(|letter| {
                        let circle = alphabet.letters[letter].transform_circle(&node.circle);
                        let keep = circle.is_line() || circle.curvature() < t_bound;
                        Candidate {
                            circle,
                            last: letter,
                            keep,
                            known: keep && snapshot.contains(&circle),
                            parent_unproductive: node.unproductive,
                            anchor: node.anchor,
                        }
                    })
                    .collect()
            })
            .collect();

        let mut next = Vec::new();
        for cand in candidates.into_iter().flatten() {
            if cand.known {
                packing.stats.duplicate_hits += 1;
                continue;
            }
            if cand.keep {
                let (id, fresh) = packing.insert(cand.circle, level as u32, Some(cand.anchor));
                if fresh {
                    next.push(Node {
                        circle: cand.circle,
                        last: Some(cand.last),
                        unproductive: 0,
                        anchor: id,
                    });
                }
                continue;
            }
            let unproductive = cand.parent_unproductive + 1;
            if patience.is_some_and(|p| unproductive > p) {
                continue;
            }
            next.push(Node {
                circle: cand.circle,
                last: Some(cand.last),
                unproductive,
                anchor: cand.anchor,
            });
        }
        frontier = next;
    }
    packing
}
