use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::{Generator, GroupPresentation, Packing};
use crate::moebius::{ExtComplex, GeneralizedCircle, MobiusMap};
use crate::tol;
use crate::{Error, Result};

/// Four mutually tangent circles in Descartes coordinates: signed curvatures
/// `kᵢ` and curvature×center products `wᵢ = kᵢzᵢ`.
///
/// Both `(Σk)² = 2Σk²` and `(Σw)² = 2Σw²` hold. Indices run over `0..4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescartesQuadruple {
    pub curvatures: [f64; 4],
    pub products: [Complex64; 4],
}

impl DescartesQuadruple {
    pub fn new(curvatures: [f64; 4], products: [Complex64; 4]) -> Result<Self> {
        let q = DescartesQuadruple { curvatures, products };
        q.check()?;
        Ok(q)
    }

    /// Places four mutually tangent circles with the given signed curvatures:
    /// the first centered at the origin, the second on the positive real axis,
    /// the third above the real axis, the fourth as the matching Descartes root.
    pub fn from_curvatures(k: [f64; 4]) -> Result<Self> {
        if k.iter().any(|&x| x == 0.0 || !x.is_finite()) {
            return Err(Error::invalid("placement needs four nonzero finite curvatures"));
        }
        if k.iter().filter(|&&x| x < 0.0).count() > 1 {
            return Err(Error::invalid("at most one curvature can be negative"));
        }
        let rho = k.map(|x| 1.0 / x);
        let dist = |i: usize, j: usize| (rho[i] + rho[j]).abs();
        let z0 = Complex64::new(0.0, 0.0);
        let d01 = dist(0, 1);
        let z1 = Complex64::new(d01, 0.0);
        let (d02, d12) = (dist(0, 2), dist(1, 2));
        let x = (d01 * d01 + d02 * d02 - d12 * d12) / (2.0 * d01);
        let z2 = Complex64::new(x, (d02 * d02 - x * x).max(0.0).sqrt());
        let w = [k[0] * z0, k[1] * z1, k[2] * z2];
        let base = w[0] + w[1] + w[2];
        let root = exact_sqrt(w[0] * w[1] + w[1] * w[2] + w[2] * w[0]) * 2.0;
        let zs = [z0, z1, z2];
        let tangency_error = |w3: Complex64| {
            let z = w3 / k[3];
            (0..3).map(|i| ((z - zs[i]).norm() - dist(i, 3)).abs()).sum::<f64>()
        };
        let (plus, minus) = (base + root, base - root);
        let (ep, em) = (tangency_error(plus), tangency_error(minus));
        let w3 = if (ep - em).abs() <= 1e-12 * (1.0 + ep.max(em)) {
            if plus.im >= minus.im {
                plus
            } else {
                minus
            }
        } else if ep < em {
            plus
        } else {
            minus
        };
        Self::new(k, [w[0], w[1], w[2], w3])
    }

    /// `(Σk)² − 2Σk²`.
    pub fn curvature_residual(&self) -> f64 {
        let s: f64 = self.curvatures.iter().sum();
        let sq: f64 = self.curvatures.iter().map(|k| k * k).sum();
        s * s - 2.0 * sq
    }

    /// `|(Σw)² − 2Σw²|`.
    pub fn center_residual(&self) -> f64 {
        let s: Complex64 = self.products.iter().sum();
        let sq: Complex64 = self.products.iter().map(|w| w * w).sum();
        (s * s - sq * 2.0).norm()
    }

    /// Validates both Descartes relations. The tolerance is absolute for
    /// unit-scale quadruples and relative to the sum of squares beyond that.
    pub fn check(&self) -> Result<()> {
        let cr = self.curvature_residual();
        let wr = self.center_residual();
        let k_scale: f64 = self.curvatures.iter().map(|k| k * k).sum::<f64>().max(1.0);
        let w_scale: f64 = self.products.iter().map(|w| w.norm_sqr()).sum::<f64>().max(1.0);
        let finite = self.curvatures.iter().all(|k| k.is_finite()) && self.products.iter().all(|w| w.is_finite());
        if !finite || cr.abs() > tol::DESCARTES * k_scale || wr > tol::DESCARTES * w_scale {
            return Err(Error::DescartesViolation {
                curvature_residual: cr,
                center_residual: wr,
            });
        }
        Ok(())
    }

    /// Swaps entry `i` for the other root of the Descartes equation:
    /// `kᵢ' = 2Σ_{j≠i} kⱼ − kᵢ`, and likewise for the products.
    pub fn reflect(&self, i: usize) -> Self {
        let mut q = *self;
        let ks: f64 = (0..4).filter(|&j| j != i).map(|j| self.curvatures[j]).sum();
        let ws: Complex64 = (0..4).filter(|&j| j != i).map(|j| self.products[j]).sum();
        q.curvatures[i] = 2.0 * ks - self.curvatures[i];
        q.products[i] = ws * 2.0 - self.products[i];
        q
    }

    /// Circle `i`, oriented so that a negative curvature has unbounded interior.
    pub fn circle(&self, i: usize) -> Result<GeneralizedCircle> {
        let k = self.curvatures[i];
        if k == 0.0 {
            return Err(Error::invalid("zero curvature entry is a line; its offset is not encoded"));
        }
        Ok(GeneralizedCircle::from_curvature_product(k, self.products[i]))
    }

    pub fn circles(&self) -> Result<[GeneralizedCircle; 4]> {
        Ok([self.circle(0)?, self.circle(1)?, self.circle(2)?, self.circle(3)?])
    }

    /// Tangency point of circles `i` and `j`: `(wᵢ + wⱼ)/(kᵢ + kⱼ)`.
    pub fn tangency_point(&self, i: usize, j: usize) -> ExtComplex {
        let k = self.curvatures[i] + self.curvatures[j];
        if k == 0.0 {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite((self.products[i] + self.products[j]) / k)
        }
    }

    /// Dual circle `i`: through the three tangency points not on circle `i`.
    /// It is orthogonal to the three other circles, and inversion in it swaps
    /// circle `i` with its Descartes reflection.
    pub fn dual_circle(&self, i: usize) -> Result<GeneralizedCircle> {
        let others: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        GeneralizedCircle::through_points(
            self.tangency_point(others[0], others[1]),
            self.tangency_point(others[0], others[2]),
            self.tangency_point(others[1], others[2]),
        )
    }

    /// The reflection group generated by inversions in the four dual circles.
    /// Its orbit of the four circles is the full Apollonian packing.
    pub fn dual_group(&self) -> Result<GroupPresentation> {
        let generators = (0..4)
            .map(|i| {
                Ok(Generator {
                    map: MobiusMap::inversion(&self.dual_circle(i)?),
                    involution: true,
                    label: Some(format!("dual-{i}")),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GroupPresentation::new(generators).map(|g| g.with_label("apollonian-dual"))
    }
}

/// Square root that is exact on the real axis, so integral quadruples keep
/// Gaussian-integer products.
fn exact_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

struct Frontier {
    quad: DescartesQuadruple,
    ids: [u32; 4],
    last: Option<usize>,
    depth: u32,
    newest: f64,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // min-heap on the curvature of the newest circle
    fn cmp(&self, other: &Self) -> Ordering {
        other.newest.total_cmp(&self.newest)
    }
}

/// All circles of the Apollonian packing generated by `root` with curvature
/// below `t_bound`, found by non-backtracking Descartes reflections expanded
/// lowest-curvature first.
///
/// The four root circles are always retained. Quadruple residuals are tracked
/// in [`Packing::stats`].
pub fn apollonian_enumerate(root: &DescartesQuadruple, t_bound: f64) -> Result<Packing> {
    root.check()?;
    if !(t_bound > 0.0) {
        return Err(Error::invalid(format!("curvature bound must be positive, got {t_bound}")));
    }
    let mut packing = Packing::new(t_bound);
    let mut ids = [0u32; 4];
    for (i, id) in ids.iter_mut().enumerate() {
        *id = packing.insert(root.circle(i)?, 0, None).0;
    }
    packing.stats.max_curvature_residual = root.curvature_residual().abs();
    packing.stats.max_center_residual = root.center_residual();

    let mut heap = BinaryHeap::new();
    heap.push(Frontier {
        quad: *root,
        ids,
        last: None,
        depth: 0,
        newest: f64::NEG_INFINITY,
    });
    while let Some(node) = heap.pop() {
        packing.stats.nodes_expanded += 1;
        for i in (0..4).filter(|&i| Some(i) != node.last) {
            let child = node.quad.reflect(i);
            let stats = &mut packing.stats;
            stats.quadruples += 1;
            stats.max_curvature_residual = stats.max_curvature_residual.max(child.curvature_residual().abs());
            stats.max_center_residual = stats.max_center_residual.max(child.center_residual());
            let k = child.curvatures[i];
            if k == 0.0 {
                return Err(Error::invalid("packing contains a line and is unbounded"));
            }
            if k >= t_bound {
                continue;
            }
            let (id, _) = packing.insert(child.circle(i)?, node.depth + 1, Some(node.ids[i]));
            let mut child_ids = node.ids;
            child_ids[i] = id;
            heap.push(Frontier {
                quad: child,
                ids: child_ids,
                last: Some(i),
                depth: node.depth + 1,
                newest: k,
            });
        }
    }
    Ok(packing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(k: [f64; 4], w: [Complex64; 4]) -> DescartesQuadruple {
        DescartesQuadruple::new(k, w).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reflect_examples() {
        let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
        let r = root.reflect(0);
        assert_eq!(r.curvatures, [15.0, 2.0, 2.0, 3.0]);
        assert_eq!(r.curvature_residual(), 0.0);
        assert_eq!(r.reflect(0), root);

        // two parallel lines y = ±1 with unit normals, two unit circles between them
        let strip = q([0.0, 0.0, 1.0, 1.0], [c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let s = strip.reflect(0);
        assert_eq!(s.curvatures, [4.0, 0.0, 1.0, 1.0]);
        assert_eq!(s.curvature_residual(), 0.0);
    }

    #[test]
    fn standard_placement() {
        let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(root.products, [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(root.center_residual(), 0.0);
        // the other orientation of the third circle is chosen by tangency
        let q = DescartesQuadruple::from_curvatures([2.0, 3.0, 6.0, 23.0]).unwrap();
        assert!(q.center_residual() < 1e-9);
    }

    #[test]
    fn rejects_invalid_quadruple() {
        assert!(matches!(
            DescartesQuadruple::new([1.0, 1.0, 1.0, 1.0], [c(0.0, 0.0); 4]),
            Err(Error::DescartesViolation { .. })
        ));
        assert!(DescartesQuadruple::from_curvatures([-1.0, -2.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn dual_circles_are_orthogonal_and_swap() {
        let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
        let circles = root.circles().unwrap();
        for i in 0..4 {
            let inv = MobiusMap::inversion(&root.dual_circle(i).unwrap());
            for (j, circle) in circles.iter().enumerate() {
                let image = inv.transform_circle(circle);
                let expected = if i == j { root.reflect(i).circle(i).unwrap() } else { *circle };
                assert!(image.approx_eq_unoriented(&expected, 1e-12), "dual {i} circle {j}");
                // orientation of the Descartes disks is preserved
                assert_eq!(image.signed_curvature().signum(), expected.signed_curvature().signum());
            }
        }
    }

    #[test]
    fn enumerate_below_smallest_curvature_keeps_root() {
        let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
        let p = apollonian_enumerate(&root, 1.5).unwrap();
        assert_eq!(p.len(), 4);
        let p = apollonian_enumerate(&root, 6.5).unwrap();
        // -1, 2, 2, 3, 3 and four circles of curvature 6
        assert_eq!(p.len(), 9);
    }

    #[test]
    fn enumerated_quadruples_satisfy_descartes() {
        let root = DescartesQuadruple::from_curvatures([-1.0, 2.0, 2.0, 3.0]).unwrap();
        let p = apollonian_enumerate(&root, 500.0).unwrap();
        assert!(p.stats.quadruples > 0);
        assert_eq!(p.stats.max_curvature_residual, 0.0);
        assert_eq!(p.stats.max_center_residual, 0.0);
        assert!(p.check_invariants().is_ok());
    }
}
