//! Fans, stacky fans, smoothness, refinement and star subdivision.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, BoxDomain};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::{cokernel_torsion, smith_normal_form, FiniteAbelianGroup, Lattice, LatticeMap};
use crate::linalg::{q, to_qvec, Q};

/// A finite set of cones closed under faces, sorted by (dimension, rays).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub ambient: Lattice,
    pub cones: Vec<Cone>,
}

/// Why a cone fails to be smooth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothFailure {
    NonSimplicial,
    Index(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoothness {
    pub smooth: bool,
    pub witness: Option<(Cone, SmoothFailure)>,
}

fn sort_key(c: &Cone) -> (usize, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    (c.dim(), c.rays.clone(), c.lineality.clone())
}

/// Returns a point of `target` (top-dimensional in its span) not covered by
/// the closed cones `pieces`, or `None` if they cover it.
pub fn uncovered_point(target: &Cone, pieces: &[&Cone]) -> Option<Vec<Q>> {
    let n = target.ambient.rank;
    let mut hs: Vec<(Vec<i64>, Q)> = Vec::new();
    for c in std::iter::once(target).chain(pieces.iter().copied()) {
        for f in c.facets.iter().chain(c.equations.iter()) {
            hs.push((f.clone(), q(0)));
        }
    }
    let arr = Arrangement::new(&hs, BoxDomain::cube(n, q(1))).expect("unit cube is a valid box");
    let d = target.dim();
    arr.cells
        .iter()
        .filter(|c| c.dim == d && target.contains_relint(&c.witness))
        .find(|c| !pieces.iter().any(|p| p.contains(&c.witness)))
        .map(|c| c.witness.clone())
}

impl Fan {
    /// Closes `cones` under faces and checks the fan axiom. Errors with the
    /// first pair of cones whose intersection is not a common face.
    pub fn from_cones(ambient: &Lattice, cones: Vec<Cone>) -> Result<Self> {
        let mut all: BTreeSet<(usize, Vec<Vec<i64>>, Vec<Vec<i64>>)> = BTreeSet::new();
        let mut list: Vec<Cone> = Vec::new();
        for c in cones {
            if c.ambient.rank != ambient.rank {
                return Err(Error::Invalid(format!("cone {:?} is not in {}", c.rays, ambient.label)));
            }
            for f in c.faces() {
                if all.insert(sort_key(&f)) {
                    list.push(f);
                }
            }
        }
        list.sort_by_key(sort_key);
        for c in &list {
            if !c.is_strongly_convex() {
                return Err(Error::Invalid(format!("cone {:?} contains a line", c.generators())));
            }
        }
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (a, b) = (&list[i], &list[j]);
                let x = a.intersect(b);
                if !x.is_face_of(a) || !x.is_face_of(b) {
                    return Err(Error::NotAFan { left: a.rays.clone(), right: b.rays.clone() });
                }
            }
        }
        Ok(Self { ambient: ambient.clone(), cones: list })
    }

    /// The fan generated by cones given as ray lists.
    pub fn from_rays(ambient: &Lattice, max_cones: &[Vec<Vec<i64>>]) -> Result<Self> {
        let cones = max_cones.iter().map(|r| Cone::new(ambient, r)).collect();
        Self::from_cones(ambient, cones)
    }

    pub fn rays(&self) -> Vec<Vec<i64>> {
        self.cones.iter().filter(|c| c.dim() == 1).map(|c| c.rays[0].clone()).collect()
    }

    pub fn ray_index(&self, ray: &[i64]) -> Option<usize> {
        self.rays().iter().position(|r| r == ray)
    }

    pub fn maximal(&self) -> Vec<&Cone> {
        self.cones.iter().filter(|c| !self.cones.iter().any(|d| d != *c && d.contains_cone(c) && d.dim() > c.dim())).collect()
    }

    pub fn index_of(&self, c: &Cone) -> Option<usize> {
        self.cones.iter().position(|d| d == c)
    }

    pub fn contains_vector(&self, v: &[i64]) -> bool {
        self.cones.iter().any(|c| c.contains_int(v))
    }

    /// Ranks of the rational Chow groups A_k, indexed by k: generators are
    /// orbit closures V(σ), and each cone τ with u ∈ τ⊥ gives the relation
    /// Σ ⟨u, n_σ⟩ [V(σ)] = 0 over the cones σ with τ as a facet.
    pub fn rational_chow_ranks(&self) -> Vec<usize> {
        let n = self.ambient.rank;
        (0..=n)
            .map(|k| {
                let d = n - k;
                let gens: Vec<&Cone> = self.cones.iter().filter(|c| c.dim() == d).collect();
                if gens.is_empty() {
                    return 0;
                }
                let mut rows = Vec::new();
                if d > 0 {
                    for tau in self.cones.iter().filter(|c| c.dim() == d - 1) {
                        for u in tau.perp() {
                            let row: Vec<Q> = gens
                                .iter()
                                .map(|s| {
                                    if !tau.is_face_of(s) {
                                        return q(0);
                                    }
                                    let r = s.rays.iter().find(|r| !tau.contains_int(r)).expect("σ has a ray outside its facet");
                                    q(crate::linalg::dot_ii(&u, r))
                                })
                                .collect();
                            rows.push(row);
                        }
                    }
                }
                gens.len() - crate::linalg::rank_q(&rows)
            })
            .collect()
    }

    /// Every cone simplicial with rays extending to a lattice basis.
    pub fn is_smooth(&self) -> Smoothness {
        for c in &self.cones {
            if c.is_zero() {
                continue;
            }
            if !c.is_simplicial() {
                return Smoothness { smooth: false, witness: Some((c.clone(), SmoothFailure::NonSimplicial)) };
            }
            let index: u64 = smith_normal_form(&c.rays).diagonal().iter().map(|d| d.unsigned_abs()).product();
            if index != 1 {
                return Smoothness { smooth: false, witness: Some((c.clone(), SmoothFailure::Index(index))) };
            }
        }
        Smoothness { smooth: true, witness: None }
    }

    /// Every cone of `self` lies in a cone of `coarse` and the supports agree.
    pub fn refines(&self, coarse: &Fan) -> bool {
        if self.ambient.rank != coarse.ambient.rank {
            return false;
        }
        if !self.cones.iter().all(|c| coarse.cones.iter().any(|d| d.contains_cone(c))) {
            return false;
        }
        coarse.maximal().into_iter().all(|big| {
            let pieces: Vec<&Cone> = self.cones.iter().filter(|c| c.dim() == big.dim() && big.contains_cone(c)).collect();
            uncovered_point(big, &pieces).is_none()
        })
    }

    /// Star subdivision at a primitive vector of the support.
    pub fn star_subdivide(&self, ray: &[i64]) -> Result<Fan> {
        if !self.contains_vector(ray) {
            return Err(Error::RayOutsideSupport { ray: ray.to_vec() });
        }
        let mut out = Vec::new();
        for c in &self.cones {
            if !c.contains_int(ray) {
                out.push(c.clone());
                continue;
            }
            for f in c.faces() {
                if !f.contains_int(ray) {
                    let mut g = f.rays.clone();
                    g.push(ray.to_vec());
                    out.push(Cone::new(&self.ambient, &g));
                }
            }
        }
        Fan::from_cones(&self.ambient, out)
    }

    /// The cone of the fan containing `x` in its relative interior.
    pub fn cone_containing(&self, x: &[i64]) -> Option<&Cone> {
        let xq = to_qvec(x);
        self.cones.iter().find(|c| c.contains_relint(&xq))
    }

    /// Smallest cone containing the given point (for pullbacks).
    pub fn carrier(&self, x: &[i64]) -> Option<&Cone> {
        self.cone_containing(x)
    }
}

/// A fan in a lattice L together with a map f: L → N of finite cokernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackyFan {
    pub fan: Fan,
    pub map: LatticeMap,
}

impl StackyFan {
    pub fn new(fan: Fan, map: LatticeMap) -> Result<Self> {
        if fan.ambient != map.source {
            return Err(Error::Invalid(format!("fan lives in {} but the map starts at {}", fan.ambient.label, map.source.label)));
        }
        if map.source.rank != map.target.rank {
            return Err(Error::Invalid("stacky map must be between lattices of equal rank".into()));
        }
        cokernel_torsion(&map)?;
        Ok(Self { fan, map })
    }

    /// The finite group ker(T_L → T_N) ≅ coker(f).
    pub fn group(&self) -> FiniteAbelianGroup {
        cokernel_torsion(&self.map).expect("validated at construction")
    }

    /// Images of the cones in N.
    pub fn image_fan(&self) -> Result<Fan> {
        let cones = self.fan.cones.iter().map(|c| c.image(&self.map.matrix, &self.map.target)).collect();
        Fan::from_cones(&self.map.target, cones)
    }

    /// Images f(u_ρ) of the rays (not necessarily primitive).
    pub fn ray_images(&self) -> Vec<Vec<i64>> {
        self.fan.rays().iter().map(|r| self.map.apply(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n2() -> Lattice {
        Lattice::new(2, "N")
    }

    #[test]
    fn chow_ranks_of_small_examples() {
        let l = n2();
        let p2 =
            Fan::from_rays(&l, &[vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![-1, -1]], vec![vec![-1, -1], vec![1, 0]]])
                .unwrap();
        assert_eq!(p2.rational_chow_ranks(), vec![1, 1, 1]);
        let plane = Fan::from_rays(&l, &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        assert_eq!(plane.rational_chow_ranks(), vec![0, 0, 1]);
        let get = |name: &str| crate::builtin::plain(name).rational_chow_ranks();
        assert_eq!(get("surf.Σ0"), vec![0, 0, 1]);
        assert_eq!(get("coni.Σ0"), vec![0, 0, 1, 1]);
        assert_eq!(get("coni.Σ+"), vec![0, 0, 1, 1]);
        assert_eq!(get("coni.ΣB").iter().sum::<usize>(), 4);
    }

    #[test]
    fn overlapping_cones_are_rejected() {
        let err = Fan::from_rays(&n2(), &[vec![vec![1, 0], vec![1, 2]], vec![vec![1, 1], vec![0, 1]]]).unwrap_err();
        assert!(matches!(err, Error::NotAFan { .. }));
    }

    #[test]
    fn refinement_and_subdivision() {
        let coarse = Fan::from_rays(&n2(), &[vec![vec![1, 0], vec![0, 1]]]).unwrap();
        let fine = coarse.star_subdivide(&[1, 1]).unwrap();
        assert_eq!(fine.maximal().len(), 2);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(fine.refines(&fine));
        assert_eq!(coarse.star_subdivide(&[1, 0]).unwrap(), coarse);
        assert!(matches!(coarse.star_subdivide(&[-1, 0]), Err(Error::RayOutsideSupport { .. })));
        let partial = Fan::from_rays(&n2(), &[vec![vec![1, 0], vec![1, 1]]]).unwrap();
        assert!(!partial.refines(&coarse));
    }

    #[test]
    fn smoothness_witness() {
        let f = Fan::from_rays(&n2(), &[vec![vec![1, 0], vec![1, 2]]]).unwrap();
        let s = f.is_smooth();
        assert!(!s.smooth);
        assert_eq!(s.witness.unwrap().1, SmoothFailure::Index(2));
    }
}
