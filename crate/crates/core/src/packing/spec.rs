use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    apollonian_enumerate, orbit_enumerate, schottky_build, DescartesQuadruple, Disk, EnumerateOptions, Generator,
    GroupPresentation, Packing,
};
use crate::moebius::{GeneralizedCircle, MobiusMap};
use crate::{Error, Result};

/// Serializable description of how a packing is generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PackingSpec {
    /// Apollonian packing from a root Descartes quadruple. Without explicit
    /// centers the circles are placed by [`DescartesQuadruple::from_curvatures`].
    Apollonian {
        curvatures: [f64; 4],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        centers: Option<[[f64; 2]; 4]>,
    },
    Schottky {
        pairs: Vec<DiskPairSpec>,
        max_word_len: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        patience: Option<u32>,
    },
    Generators {
        generators: Vec<GeneratorSpec>,
        seeds: Vec<CircleSpec>,
        max_word_len: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        patience: Option<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskPairSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub partner_center: [f64; 2],
    pub partner_radius: f64,
}

/// A generator: either a matrix `[[a, b], [c, d]]` with complex entries as
/// `[re, im]`, or the inversion in a circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Matrix {
        a: [f64; 2],
        b: [f64; 2],
        c: [f64; 2],
        d: [f64; 2],
        #[serde(default)]
        reversing: bool,
        #[serde(default)]
        involution: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Inversion {
        circle: CircleSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum CircleSpec {
    Circle { center: [f64; 2], radius: f64 },
    Line { normal: [f64; 2], offset: f64 },
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl CircleSpec {
    pub fn to_circle(&self) -> Result<GeneralizedCircle> {
        match *self {
            CircleSpec::Circle { center, radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!("circle radius must be positive, got {radius}")));
                }
                Ok(GeneralizedCircle::from_center_radius(cx(center), radius))
            }
            CircleSpec::Line { normal, offset } => GeneralizedCircle::line(cx(normal), offset),
        }
    }
}

impl GeneratorSpec {
    pub fn to_generator(&self) -> Result<Generator> {
        match self {
            GeneratorSpec::Matrix {
                a,
                b,
                c,
                d,
                reversing,
                involution,
                label,
            } => {
                let (a, b, c, d) = (cx(*a), cx(*b), cx(*c), cx(*d));
                let map = if *reversing {
                    MobiusMap::new_reversing(a, b, c, d)?
                } else {
                    MobiusMap::new(a, b, c, d)?
                };
                Ok(Generator {
                    map,
                    involution: *involution,
                    label: label.clone(),
                })
            }
            GeneratorSpec::Inversion { circle, label } => Ok(Generator {
                map: MobiusMap::inversion(&circle.to_circle()?),
                involution: true,
                label: label.clone(),
            }),
        }
    }
}

impl PackingSpec {
    pub fn root_quadruple(&self) -> Result<Option<DescartesQuadruple>> {
        match self {
            PackingSpec::Apollonian { curvatures, centers } => Ok(Some(match centers {
                None => DescartesQuadruple::from_curvatures(*curvatures)?,
                Some(centers) => {
                    let products = std::array::from_fn(|i| cx(centers[i]) * curvatures[i]);
                    DescartesQuadruple::new(*curvatures, products)?
                }
            })),
            _ => Ok(None),
        }
    }

    /// The group whose orbit generates the packing, with the seed circles.
    pub fn group_and_seeds(&self) -> Result<(GroupPresentation, Vec<GeneralizedCircle>)> {
        match self {
            PackingSpec::Apollonian { .. } => {
                let root = self.root_quadruple()?.expect("apollonian spec has a root");
                Ok((root.dual_group()?, root.circles()?.to_vec()))
            }
            PackingSpec::Schottky { pairs, .. } => {
                let disks = pairs
                    .iter()
                    .map(|p| Ok((Disk::new(cx(p.center), p.radius)?, Disk::new(cx(p.partner_center), p.partner_radius)?)))
                    .collect::<Result<Vec<_>>>()?;
                schottky_build(&disks)
            }
            PackingSpec::Generators { generators, seeds, .. } => {
                let gens = generators.iter().map(GeneratorSpec::to_generator).collect::<Result<Vec<_>>>()?;
                let seeds = seeds.iter().map(CircleSpec::to_circle).collect::<Result<Vec<_>>>()?;
                Ok((GroupPresentation::new(gens)?, seeds))
            }
        }
    }

    /// Generates the packing up to curvature `t_bound`.
    pub fn build(&self, t_bound: f64, threads: Option<usize>) -> Result<Packing> {
        let mut packing = match self {
            PackingSpec::Apollonian { .. } => {
                let root = self.root_quadruple()?.expect("apollonian spec has a root");
                apollonian_enumerate(&root, t_bound)?
            }
            PackingSpec::Schottky {
                max_word_len, patience, ..
            }
            | PackingSpec::Generators {
                max_word_len, patience, ..
            } => {
                let (group, seeds) = self.group_and_seeds()?;
                let options = EnumerateOptions {
                    patience: *patience,
                    threads,
                };
                orbit_enumerate(&group, &seeds, t_bound, *max_word_len, &options)?
            }
        };
        packing.set_source(self.clone());
        Ok(packing)
    }
}
