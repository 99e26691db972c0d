//! Turns a validated manifest into fans, skeleta and regions.

use std::collections::BTreeMap;

use schober_core::builtin::{builtin_example, FanData};
use schober_core::fan::{Fan, StackyFan};
use schober_core::lattice::{Lattice, LatticeMap};
use schober_core::linalg::Q;
use schober_core::models::{Example, ExampleKind, MarkedRegion};
use schober_core::sheaf::{HalfSpace, Region};
use schober_core::skeleton::{fltz_skeleton, stacky_fltz_skeleton, torsion_shift_classes, Skeleton};
use schober_core::{Error, Result};

use crate::manifest::{FanDecl, Manifest, Rat, RegionDecl, SkeletonDecl, Windows};

pub struct Recipe {
    pub parts: Vec<String>,
    pub union: bool,
}

/// Everything a manifest declares, built.
pub struct Workspace {
    pub name: String,
    pub windows: Windows,
    pub fans: BTreeMap<String, FanData>,
    pub skeleta: BTreeMap<String, Skeleton>,
    pub regions: BTreeMap<String, MarkedRegion>,
    /// The inputs of each union or intersection skeleton.
    pub recipes: BTreeMap<String, Recipe>,
    pub example: Option<Example>,
}

fn rats(v: &[Rat]) -> Result<Vec<Q>> {
    v.iter().map(|r| r.value().ok_or_else(|| Error::Invalid(format!("malformed rational {r:?}")))).collect()
}

pub fn build_fan(d: &FanDecl) -> Result<FanData> {
    if let Some(name) = &d.builtin {
        return builtin_example(name);
    }
    let cones = d.cones.as_deref().ok_or_else(|| Error::Invalid("fan needs `builtin` or `cones`".into()))?;
    let dim = cones.iter().flatten().map(Vec::len).next().unwrap_or(0);
    match &d.matrix {
        None => Ok(FanData::Plain(Fan::from_rays(&Lattice::new(dim, "N"), cones)?)),
        Some(m) => {
            let l = Lattice::new(dim, "L");
            let fan = Fan::from_rays(&l, cones)?;
            let map = LatticeMap::new(l, Lattice::new(m.len(), "N"), m.clone())?;
            Ok(FanData::Stacky(StackyFan::new(fan, map)?))
        }
    }
}

fn build_skeleton(d: &SkeletonDecl, fans: &BTreeMap<String, FanData>, done: &BTreeMap<String, Skeleton>) -> Result<Skeleton> {
    let get = |n: &str| done.get(n).ok_or_else(|| Error::UnknownName(n.to_string()));
    if let Some(f) = &d.fltz {
        let data = fans.get(f.get_ref()).ok_or_else(|| Error::UnknownName(f.get_ref().clone()))?;
        return match data.as_stacky() {
            Some(sf) => {
                let shifts = match &d.shifts {
                    Some(s) => s.iter().map(|v| rats(v)).collect::<Result<Vec<_>>>()?,
                    None => torsion_shift_classes(sf),
                };
                stacky_fltz_skeleton(sf, &shifts)
            }
            None => Ok(fltz_skeleton(data.cover_fan())),
        };
    }
    let (parts, union) = match (&d.union, &d.intersection) {
        (Some(p), _) => (p, true),
        (None, Some(p)) => (p, false),
        (None, None) => return Err(Error::Invalid("skeleton needs a recipe".into())),
    };
    let mut it = parts.iter();
    let first = it.next().ok_or_else(|| Error::Invalid("empty skeleton recipe".into()))?;
    let mut acc = get(first.get_ref())?.clone();
    for p in it {
        let s = get(p.get_ref())?;
        acc = if union { acc.union(s) } else { acc.intersection(s) };
    }
    Ok(acc)
}

pub fn build_region(name: &str, d: &RegionDecl) -> Result<MarkedRegion> {
    let mut hs = Vec::new();
    for c in &d.constraints {
        let b = c.bound.value().ok_or_else(|| Error::Invalid(format!("malformed bound in region {name}")))?;
        let h = match c.op.as_str() {
            ">=" => HalfSpace::geq(c.covector.clone(), b),
            ">" => HalfSpace::gt(c.covector.clone(), b),
            "<=" => HalfSpace::leq(c.covector.clone(), b),
            "<" => HalfSpace::lt(c.covector.clone(), b),
            op => return Err(Error::Invalid(format!("unknown operator `{op}` in region {name}"))),
        };
        hs.push(h);
    }
    Ok(MarkedRegion { name: name.to_string(), region: Region::new(hs), point: rats(&d.point)?, covector: d.covector.clone() })
}

impl Workspace {
    pub fn build(m: &Manifest) -> Result<Self> {
        let mut fans = BTreeMap::new();
        for (n, d) in &m.fans {
            fans.insert(n.clone(), build_fan(d)?);
        }
        let order = crate::manifest::skeleton_order(m).map_err(|c| Error::Invalid(format!("cycle through {c}")))?;
        let mut skeleta = BTreeMap::new();
        for n in order {
            let s = build_skeleton(&m.skeleta[&n], &fans, &skeleta)?;
            skeleta.insert(n, s);
        }
        let mut recipes = BTreeMap::new();
        for (n, d) in &m.skeleta {
            let (parts, union) = match (&d.union, &d.intersection) {
                (Some(p), _) => (p, true),
                (None, Some(p)) => (p, false),
                (None, None) => continue,
            };
            recipes.insert(n.clone(), Recipe { parts: parts.iter().map(|p| p.get_ref().clone()).collect(), union });
        }
        let mut regions = BTreeMap::new();
        for (n, d) in &m.regions {
            regions.insert(n.clone(), build_region(n, d)?);
        }
        let example = match &m.example {
            Some(e) => Some(Example::new(ExampleKind::parse(e.get_ref())?)?),
            None => None,
        };
        Ok(Self { name: m.name.clone(), windows: m.window.clone(), fans, skeleta, regions, recipes, example })
    }
}
