//! Rational polyhedral cones with synchronized generator and facet descriptions.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{hermite_normal_form, kernel_lattice, saturate, Lattice};
use crate::linalg::{dot_ii, dot_iq, nullspace, primitive, primitive_from_q, rank_q, rref, to_qvec, Q};

/// A cone `lineality + cone(rays)` in a lattice. Rays are primitive and sorted;
/// `facets` are primitive inward normals taken inside the span of the cone and
/// `equations` is a saturated basis of the annihilator of that span.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cone {
    pub ambient: Lattice,
    pub rays: Vec<Vec<i64>>,
    pub lineality: Vec<Vec<i64>>,
    pub facets: Vec<Vec<i64>>,
    pub equations: Vec<Vec<i64>>,
}

fn rank_i(rows: &[Vec<i64>]) -> usize {
    let m: Vec<Vec<Q>> = rows.iter().map(|r| to_qvec(r)).collect();
    rank_q(&m)
}

/// Facet normals and equations of the cone generated by `gens`.
fn hrep_from_gens(gens: &[Vec<i64>], n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let gens: Vec<Vec<i64>> = gens.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
    let equations = hermite_normal_form(&kernel_lattice(&gens, n));
    let d = n - equations.len();
    if d == 0 {
        return (Vec::new(), equations);
    }
    let mut basis: Vec<Vec<Q>> = gens.iter().map(|g| to_qvec(g)).collect();
    let piv = rref(&mut basis);
    basis.truncate(piv.len());
    let mut facets: Vec<Vec<i64>> = Vec::new();
    for subset in (0..gens.len()).combinations(d - 1) {
        let s: Vec<Vec<i64>> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rank_i(&s) != d - 1 {
            continue;
        }
        // a = c·basis with s·a = 0
        let m: Vec<Vec<Q>> = s.iter().map(|g| basis.iter().map(|b| dot_iq(g, b)).collect()).collect();
        let ns = nullspace(&m, basis.len());
        if ns.len() != 1 {
            continue;
        }
        let a: Vec<Q> = (0..n).map(|j| ns[0].iter().zip(&basis).map(|(c, b)| c * &b[j]).sum()).collect();
        let a = primitive_from_q(&a);
        let vals: Vec<i64> = gens.iter().map(|g| dot_ii(&a, g)).collect();
        let cand = if vals.iter().all(|&v| v >= 0) && vals.iter().any(|&v| v > 0) {
            a
        } else if vals.iter().all(|&v| v <= 0) && vals.iter().any(|&v| v < 0) {
            a.iter().map(|x| -x).collect()
        } else {
            continue;
        };
        if !facets.contains(&cand) {
            facets.push(cand);
        }
    }
    facets.sort();
    (facets, equations)
}

/// Extreme rays and lineality basis of {x : ineqs·x ≥ 0, eqs·x = 0}.
fn vrep_from_hrep(ineqs: &[Vec<i64>], eqs: &[Vec<i64>], n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let mut all: Vec<Vec<i64>> = ineqs.to_vec();
    all.extend(eqs.iter().cloned());
    let lineality = hermite_normal_form(&kernel_lattice(&all, n));
    let mut base: Vec<Vec<i64>> = eqs.to_vec();
    base.extend(lineality.iter().cloned());
    let base_rank = rank_i(&base);
    if base_rank + 1 > n {
        return (Vec::new(), lineality);
    }
    let k = n - 1 - base_rank;
    let mut rays: Vec<Vec<i64>> = Vec::new();
    for subset in (0..ineqs.len()).combinations(k) {
        let mut rows = base.clone();
        rows.extend(subset.iter().map(|&i| ineqs[i].clone()));
        if rank_i(&rows) != n - 1 {
            continue;
        }
        let q: Vec<Vec<Q>> = rows.iter().map(|r| to_qvec(r)).collect();
        let ns = nullspace(&q, n);
        let x = primitive_from_q(&ns[0]);
        let vals: Vec<i64> = ineqs.iter().map(|a| dot_ii(a, &x)).collect();
        let cand = if vals.iter().all(|&v| v >= 0) {
            x
        } else if vals.iter().all(|&v| v <= 0) {
            x.iter().map(|v| -v).collect()
        } else {
            continue;
        };
        if !rays.contains(&cand) {
            rays.push(cand);
        }
    }
    rays.sort();
    (rays, lineality)
}

impl Cone {
    /// The cone generated by `gens` (any integer vectors).
    pub fn new(ambient: &Lattice, gens: &[Vec<i64>]) -> Self {
        let n = ambient.rank;
        let (facets, equations) = hrep_from_gens(gens, n);
        let (rays, lineality) = vrep_from_hrep(&facets, &equations, n);
        Self { ambient: ambient.clone(), rays, lineality, facets, equations }
    }

    /// The cone {x : ineqs·x ≥ 0, eqs·x = 0}.
    pub fn from_hrep(ambient: &Lattice, ineqs: &[Vec<i64>], eqs: &[Vec<i64>]) -> Self {
        let (rays, lineality) = vrep_from_hrep(ineqs, eqs, ambient.rank);
        Self::new(ambient, &Self::generators_of(&rays, &lineality))
    }

    fn generators_of(rays: &[Vec<i64>], lineality: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let mut g = rays.to_vec();
        for l in lineality {
            g.push(l.clone());
            g.push(l.iter().map(|x| -x).collect());
        }
        g
    }

    pub fn zero(ambient: &Lattice) -> Self {
        Self::new(ambient, &[])
    }

    pub fn whole(ambient: &Lattice) -> Self {
        let n = ambient.rank;
        let gens: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(ambient, &Self::generators_of(&[], &gens))
    }

    pub fn generators(&self) -> Vec<Vec<i64>> {
        Self::generators_of(&self.rays, &self.lineality)
    }

    pub fn dim(&self) -> usize {
        self.ambient.rank - self.equations.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_strongly_convex() && self.rays.len() == self.dim()
    }

    pub fn contains_int(&self, x: &[i64]) -> bool {
        self.equations.iter().all(|e| dot_ii(e, x) == 0) && self.facets.iter().all(|f| dot_ii(f, x) >= 0)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.equations.iter().all(|e| dot_iq(e, x).is_zero()) && self.facets.iter().all(|f| !dot_iq(f, x).is_negative())
    }

    pub fn contains_relint(&self, x: &[Q]) -> bool {
        self.equations.iter().all(|e| dot_iq(e, x).is_zero()) && self.facets.iter().all(|f| dot_iq(f, x).is_positive())
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        other.generators().iter().all(|g| self.contains_int(g))
    }

    /// An integer point in the relative interior.
    pub fn relint_point(&self) -> Vec<i64> {
        let n = self.ambient.rank;
        (0..n).map(|j| self.rays.iter().map(|r| r[j]).sum()).collect()
    }

    /// −σ.
    pub fn neg(&self) -> Cone {
        let g: Vec<Vec<i64>> = self.generators().iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        Cone::new(&self.ambient, &g)
    }

    /// Image under an integer matrix (target × source) into `target`.
    pub fn image(&self, matrix: &[Vec<i64>], target: &Lattice) -> Cone {
        let g: Vec<Vec<i64>> = self.generators().iter().map(|r| matrix.iter().map(|row| dot_ii(row, r)).collect()).collect();
        Cone::new(target, &g)
    }

    pub fn intersect(&self, other: &Cone) -> Cone {
        let mut ineqs = self.facets.clone();
        ineqs.extend(other.facets.iter().cloned());
        let mut eqs = self.equations.clone();
        eqs.extend(other.equations.iter().cloned());
        Cone::from_hrep(&self.ambient, &ineqs, &eqs)
    }

    /// The smallest face containing the cone `inner` (which must lie in `self`).
    pub fn face_containing(&self, inner: &Cone) -> Cone {
        let gens = inner.generators();
        let tight: Vec<&Vec<i64>> = self.facets.iter().filter(|f| gens.iter().all(|g| dot_ii(f, g) == 0)).collect();
        let rays: Vec<Vec<i64>> = self.rays.iter().filter(|r| tight.iter().all(|f| dot_ii(f, r) == 0)).cloned().collect();
        Cone::new(&self.ambient, &Self::generators_of(&rays, &self.lineality))
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        other.contains_cone(self) && other.face_containing(self) == *self
    }

    /// All faces, including the cone itself and its minimal face.
    pub fn faces(&self) -> Vec<Cone> {
        let k = self.rays.len();
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << k) {
            let sub: Vec<Vec<i64>> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| self.rays[i].clone()).collect();
            let tight: Vec<&Vec<i64>> = self.facets.iter().filter(|f| sub.iter().all(|g| dot_ii(f, g) == 0)).collect();
            let closure: Vec<Vec<i64>> = self.rays.iter().filter(|r| tight.iter().all(|f| dot_ii(f, r) == 0)).cloned().collect();
            if closure == sub {
                out.push(Cone::new(&self.ambient, &Self::generators_of(&sub, &self.lineality)));
            }
        }
        out.sort();
        out
    }

    /// Saturated basis (Hermite normal form) of σ⊥ in the dual lattice.
    pub fn perp(&self) -> Vec<Vec<i64>> {
        saturate(&kernel_lattice(&self.generators(), self.ambient.rank), self.ambient.rank)
    }

    /// The dual cone {m : ⟨m, x⟩ ≥ 0 for x in σ}, in the dual lattice.
    pub fn dual(&self) -> Cone {
        let mut gens = self.facets.clone();
        for e in &self.equations {
            gens.push(e.clone());
            gens.push(e.iter().map(|x| -x).collect());
        }
        Cone::new(&self.ambient.dual(), &gens)
    }

    pub fn primitive_rays(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
        gens.iter().map(|g| primitive(g)).collect()
    }

    pub fn sign_of(&self, x: &[Q]) -> Vec<i8> {
        self.facets
            .iter()
            .map(|f| {
                let v = dot_iq(f, x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n2() -> Lattice {
        Lattice::new(2, "N")
    }

    fn n3() -> Lattice {
        Lattice::new(3, "N")
    }

    #[test]
    fn dual_of_surface_cone() {
        let c = Cone::new(&n2(), &[vec![1, 0], vec![1, 2]]);
        let d = c.dual();
        assert_eq!(d.rays, vec![vec![0, 1], vec![2, -1]]);
        assert_eq!(d.ambient.label, "N*");
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn dual_of_zero_is_everything() {
        let d = Cone::zero(&n2()).dual();
        assert!(!d.is_strongly_convex());
        assert_eq!(d.dim(), 2);
        assert!(d.facets.is_empty());
        let orth = Cone::new(&n3(), &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(orth.dual().rays, orth.rays);
    }

    #[test]
    fn perp_examples() {
        assert_eq!(Cone::new(&n2(), &[vec![1, 0]]).perp(), vec![vec![0, 1]]);
        assert!(Cone::new(&n2(), &[vec![1, 0], vec![0, 1]]).perp().is_empty());
        let p = Cone::new(&n3(), &[vec![1, 1, 1]]).perp();
        assert_eq!(p.len(), 2);
        for v in &p {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn face_counts() {
        let c = Cone::new(&n2(), &[vec![1, 0], vec![1, 2]]);
        assert_eq!(c.faces().len(), 4);
        let coni = Cone::new(&n3(), &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(coni.rays.len(), 4);
        assert_eq!(coni.facets.len(), 4);
        let faces = coni.faces();
        assert_eq!(faces.len(), 10);
        assert_eq!(faces.iter().filter(|f| f.dim() == 2).count(), 4);
        assert_eq!(Cone::zero(&n3()).faces().len(), 1);
    }

    #[test]
    fn non_extreme_generators_are_dropped() {
        let c = Cone::new(&n2(), &[vec![1, 0], vec![1, 1], vec![0, 1], vec![2, 0]]);
        assert_eq!(c.rays, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn intersections() {
        let a = Cone::new(&n2(), &[vec![1, 0], vec![1, 2]]);
        let b = Cone::new(&n2(), &[vec![1, 1], vec![0, 1]]);
        let i = a.intersect(&b);
        assert_eq!(i.rays, vec![vec![1, 1], vec![1, 2]]);
        assert!(i.is_face_of(&i));
        assert!(!i.is_face_of(&a));
    }
}
