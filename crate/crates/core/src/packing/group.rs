use num_complex::Complex64;

use crate::moebius::{GeneralizedCircle, MobiusMap};
use crate::tol;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub map: MobiusMap,
    /// `g² = ±1`; such generators are their own inverse letter.
    pub involution: bool,
    pub label: Option<String>,
}

impl Generator {
    pub fn new(map: MobiusMap) -> Self {
        Generator {
            map,
            involution: false,
            label: None,
        }
    }

    pub fn involution(map: MobiusMap) -> Self {
        Generator {
            map,
            involution: true,
            label: None,
        }
    }
}

/// A finite generating set for a group of (anti-)Möbius maps.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroupPresentation {
    generators: Vec<Generator>,
    label: Option<String>,
}

/// Letters available to words: every generator, plus the inverse of each
/// non-involution generator.
#[derive(Clone, Debug)]
pub struct Alphabet {
    pub letters: Vec<MobiusMap>,
    /// `inverse[i]` is the letter that cancels letter `i`.
    pub inverse: Vec<usize>,
}

impl Alphabet {
    /// Letters that may follow `last` in a freely reduced word.
    pub fn successors(&self, last: Option<usize>) -> impl Iterator<Item = usize> + '_ {
        let banned = last.map(|l| self.inverse[l]);
        (0..self.letters.len()).filter(move |&i| Some(i) != banned)
    }
}

impl GroupPresentation {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.involution && !g.map.compose(&g.map).approx_eq(&MobiusMap::identity(), tol::INVOLUTION) {
                return Err(Error::invalid(format!("generator {i} is flagged as an involution but g² ≠ ±1")));
            }
        }
        Ok(GroupPresentation {
            generators,
            label: None,
        })
    }

    pub fn empty() -> Self {
        GroupPresentation::default()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Same group with the generators in a different order.
    pub fn permuted(&self, order: &[usize]) -> Self {
        GroupPresentation {
            generators: order.iter().map(|&i| self.generators[i].clone()).collect(),
            label: self.label.clone(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        let mut letters = Vec::new();
        let mut inverse = Vec::new();
        for g in &self.generators {
            let i = letters.len();
            letters.push(g.map);
            if g.involution {
                inverse.push(i);
            } else {
                letters.push(g.map.inverse());
                inverse.push(i + 1);
                inverse.push(i);
            }
        }
        Alphabet { letters, inverse }
    }
}

/// A closed disk in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(Error::invalid(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Disk { center, radius })
    }

    pub fn boundary(&self) -> GeneralizedCircle {
        GeneralizedCircle::from_center_radius(self.center, self.radius)
    }

    fn separated_from(&self, other: &Disk) -> bool {
        (self.center - other.center).norm() > self.radius + other.radius + tol::TANGENCY
    }
}

/// Schottky generators pairing each `Dᵢ` with `Dᵢ'`.
///
/// Each generator is `σ ∘ ρ ∘ ι`: inversion `ι` in `∂Dᵢ`, reflection `ρ` in the
/// line through the two centers, and the similarity `σ: z ↦ cᵢ' + (rᵢ'/rᵢ)(z − cᵢ)`.
/// It maps the interior of `Dᵢ` onto the exterior of `Dᵢ'` and preserves the
/// axis through the two centers. Seeds are the `2k` boundary circles.
pub fn schottky_build(pairs: &[(Disk, Disk)]) -> Result<(GroupPresentation, Vec<GeneralizedCircle>)> {
    let disks: Vec<Disk> = pairs.iter().flat_map(|(d, e)| [*d, *e]).collect();
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            if !disks[i].separated_from(&disks[j]) {
                return Err(Error::OverlappingDisks { first: i, second: j });
            }
        }
    }
    let mut generators = Vec::with_capacity(pairs.len());
    for (k, (d, e)) in pairs.iter().enumerate() {
        let axis_dir = (e.center - d.center) / (e.center - d.center).norm();
        let axis = GeneralizedCircle::line(axis_dir * Complex64::i(), crate::moebius::dot_product(axis_dir * Complex64::i(), d.center))?;
        let iota = MobiusMap::inversion(&d.boundary());
        let rho = MobiusMap::inversion(&axis);
        let ratio = e.radius / d.radius;
        let sigma = MobiusMap::similarity(ratio, e.center - d.center * ratio)?;
        let map = sigma.compose(&rho).compose(&iota);
        debug_assert!(!map.is_reversing());
        generators.push(Generator {
            map,
            involution: false,
            label: Some(format!("schottky-{k}")),
        });
    }
    let group = GroupPresentation::new(generators)?.with_label("schottky");
    Ok((group, disks.iter().map(Disk::boundary).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{ExtComplex, GeneralizedCircle};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pair(a: Complex64, ra: f64, b: Complex64, rb: f64) -> (Disk, Disk) {
        (Disk::new(a, ra).unwrap(), Disk::new(b, rb).unwrap())
    }

    #[test]
    fn symmetric_pair_maps_boundary_to_boundary() {
        let (group, seeds) = schottky_build(&[pair(c(-2.0, 0.0), 1.0, c(2.0, 0.0), 1.0)]).unwrap();
        let g = group.generators()[0].map;
        // refit the image of three boundary points
        let pts: Vec<ExtComplex> = [0.3, 2.0, 4.0]
            .iter()
            .map(|&t| g.apply_boundary((c(-2.0, 0.0) + Complex64::from_polar(1.0, t)).into()))
            .collect();
        let refit = GeneralizedCircle::through_points(pts[0], pts[1], pts[2]).unwrap();
        assert!(refit.approx_eq_unoriented(&seeds[1], 1e-9));
        assert!(g.transform_circle(&seeds[0]).approx_eq_unoriented(&seeds[1], 1e-9));
    }

    #[test]
    fn interior_goes_to_exterior() {
        let pairs = [pair(c(-2.0, 0.0), 1.0, c(2.0, 0.5), 0.5)];
        let (group, seeds) = schottky_build(&pairs).unwrap();
        let g = group.generators()[0].map;
        for z in [c(-2.0, 0.0), c(-2.5, 0.3), c(-1.2, -0.1)] {
            let w = g.apply_boundary(z.into());
            match w {
                ExtComplex::Infinity => {}
                ExtComplex::Finite(w) => assert!(seeds[1].eval(w) > 0.0, "image {w} not outside D'"),
            }
        }
        // and the inverse takes the interior of D' outside D
        let inv = g.inverse();
        for z in [c(2.0, 0.5), c(2.2, 0.4)] {
            let w = inv.apply_boundary(z.into()).finite().unwrap();
            assert!(seeds[0].eval(w) > 0.0);
        }
        // the axis through the centers is preserved
        let axis = GeneralizedCircle::through_points(c(-2.0, 0.0).into(), c(2.0, 0.5).into(), ExtComplex::Infinity).unwrap();
        assert!(g.transform_circle(&axis).approx_eq_unoriented(&axis, 1e-12));
    }

    #[test]
    fn overlapping_disks_rejected() {
        let err = schottky_build(&[pair(c(-0.5, 0.0), 1.0, c(0.5, 0.0), 1.0)]).unwrap_err();
        assert!(matches!(err, Error::OverlappingDisks { .. }));
        // tangent disks are rejected too
        assert!(schottky_build(&[pair(c(-1.0, 0.0), 1.0, c(1.0, 0.0), 1.0)]).is_err());
    }

    #[test]
    fn involution_flag_is_checked() {
        let g = MobiusMap::translation(c(1.0, 0.0));
        assert!(GroupPresentation::new(vec![Generator::involution(g)]).is_err());
        let alphabet = GroupPresentation::new(vec![Generator::new(g)]).unwrap().alphabet();
        assert_eq!(alphabet.letters.len(), 2);
        assert_eq!(alphabet.successors(Some(0)).collect::<Vec<_>>(), vec![0]);
    }
}
