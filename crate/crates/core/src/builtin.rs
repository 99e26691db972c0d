//! The fans of the two worked examples: the A₁ surface singularity and the
//! conifold, with their crepant partial resolutions and common blowup.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{Fan, StackyFan};
use crate::lattice::{Lattice, LatticeMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FanData {
    Plain(Fan),
    Stacky(StackyFan),
}

impl FanData {
    /// The fan in the cover lattice (the fan itself for plain data).
    pub fn cover_fan(&self) -> &Fan {
        match self {
            FanData::Plain(f) => f,
            FanData::Stacky(s) => &s.fan,
        }
    }

    /// The fan of images in N.
    pub fn image_fan(&self) -> Result<Fan> {
        match self {
            FanData::Plain(f) => Ok(f.clone()),
            FanData::Stacky(s) => s.image_fan(),
        }
    }

    /// Matrix of the map from the cover lattice to N.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        match self {
            FanData::Plain(f) => {
                let n = f.ambient.rank;
                (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
            }
            FanData::Stacky(s) => s.map.matrix.clone(),
        }
    }

    pub fn as_plain(&self) -> Option<&Fan> {
        match self {
            FanData::Plain(f) => Some(f),
            FanData::Stacky(_) => None,
        }
    }

    pub fn as_stacky(&self) -> Option<&StackyFan> {
        match self {
            FanData::Stacky(s) => Some(s),
            FanData::Plain(_) => None,
        }
    }
}

pub const NAMES: [&str; 8] = ["surf.Σ0", "surf.Σ+", "surf.Σ-", "surf.ΣB", "coni.Σ0", "coni.Σ+", "coni.Σ-", "coni.ΣB"];

/// The lattice N of rank `n`.
pub fn lattice_n(n: usize) -> Lattice {
    Lattice::new(n, "N")
}

/// The cover lattice L of the surface stacky fans.
pub fn lattice_l() -> Lattice {
    Lattice::new(2, "L")
}

/// f: L → N with g₁ ↦ e₁ and g₂ ↦ e₁ + 2e₂.
pub fn surface_map() -> LatticeMap {
    LatticeMap::new(lattice_l(), lattice_n(2), vec![vec![1, 1], vec![0, 2]]).expect("shape is 2×2")
}

fn canonical_name(name: &str) -> String {
    name.replace("Sigma", "Σ").replace("S", "Σ").replace('_', "").replace("Σb", "ΣB")
}

fn v(x: &[i64]) -> Vec<i64> {
    x.to_vec()
}

/// Looks up one of the named example fans.
pub fn builtin_example(name: &str) -> Result<FanData> {
    let key = canonical_name(name);
    let n2 = lattice_n(2);
    let n3 = lattice_n(3);
    let (e1, e2) = (v(&[1, 0, 0]), v(&[0, 1, 0]));
    let e13 = v(&[1, 0, 1]);
    let e23 = v(&[0, 1, 1]);
    let w = v(&[1, 1, 1]);
    let data = match key.as_str() {
        "surf.Σ0" => FanData::Plain(Fan::from_rays(&n2, &[vec![v(&[1, 0]), v(&[1, 2])]])?),
        "surf.Σ+" => FanData::Plain(Fan::from_rays(&n2, &[vec![v(&[1, 0]), v(&[1, 1])], vec![v(&[1, 1]), v(&[1, 2])]])?),
        "surf.Σ-" => {
            let fan = Fan::from_rays(&lattice_l(), &[vec![v(&[1, 0]), v(&[0, 1])]])?;
            FanData::Stacky(StackyFan::new(fan, surface_map())?)
        }
        "surf.ΣB" => {
            let fan = Fan::from_rays(&lattice_l(), &[vec![v(&[1, 0]), v(&[1, 1])], vec![v(&[1, 1]), v(&[0, 1])]])?;
            FanData::Stacky(StackyFan::new(fan, surface_map())?)
        }
        "coni.Σ0" => FanData::Plain(Fan::from_rays(&n3, &[vec![e1.clone(), e2.clone(), e13.clone(), e23.clone()]])?),
        "coni.Σ+" => FanData::Plain(Fan::from_rays(
            &n3,
            &[vec![e1.clone(), e2.clone(), e13.clone()], vec![e2.clone(), e13.clone(), e23.clone()]],
        )?),
        "coni.Σ-" => FanData::Plain(Fan::from_rays(
            &n3,
            &[vec![e1.clone(), e2.clone(), e23.clone()], vec![e1.clone(), e13.clone(), e23.clone()]],
        )?),
        "coni.ΣB" => FanData::Plain(Fan::from_rays(
            &n3,
            &[
                vec![e1.clone(), e2.clone(), w.clone()],
                vec![e2.clone(), e23.clone(), w.clone()],
                vec![e23.clone(), e13.clone(), w.clone()],
                vec![e13.clone(), e1.clone(), w.clone()],
            ],
        )?),
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(data)
}

/// Shorthand for a builtin that is known to be a plain fan.
pub fn plain(name: &str) -> Fan {
    builtin_example(name).ok().and_then(|d| d.as_plain().cloned()).unwrap_or_else(|| panic!("{name} is a plain fan"))
}

/// Shorthand for a builtin that is known to be stacky.
pub fn stacky(name: &str) -> StackyFan {
    builtin_example(name).ok().and_then(|d| d.as_stacky().cloned()).unwrap_or_else(|| panic!("{name} is stacky"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::Cone;

    #[test]
    fn all_names_resolve() {
        for n in NAMES {
            builtin_example(n).unwrap();
        }
        assert!(matches!(builtin_example("surf.Σ7"), Err(Error::UnknownName(_))));
        assert_eq!(builtin_example("coni.Sigma+").unwrap(), builtin_example("coni.Σ+").unwrap());
    }

    #[test]
    fn conifold_plus_contains_flopping_curve_cone() {
        let f = plain("coni.Σ+");
        let n3 = lattice_n(3);
        let diag = Cone::new(&n3, &[vec![0, 1, 0], vec![1, 0, 1]]);
        assert!(f.cones.contains(&diag));
        assert_eq!(f.cones.len(), 12);
    }

    #[test]
    fn blowup_is_star_subdivision() {
        let b = plain("coni.ΣB");
        assert_eq!(plain("coni.Σ0").star_subdivide(&[1, 1, 1]).unwrap(), b);
        assert_eq!(b.maximal().len(), 4);
        let s = stacky("surf.ΣB");
        let minus = stacky("surf.Σ-");
        assert_eq!(minus.fan.star_subdivide(&[1, 1]).unwrap(), s.fan);
    }
}
