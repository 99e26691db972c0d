//! Torus-equivariant coherent complexes on toric varieties and toric global
//! quotients, built from line bundles and pushforwards from affine charts,
//! with Hom computed character by character through the Čech complex.

use std::collections::{BTreeMap, HashMap};

use crate::builtin::FanData;
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::hom::{complex_cohomology, Graded};
use crate::linalg::{dot_ii, q, solve, to_qvec, Q};
use crate::torus::characters;

/// A T-divisor Σ a_ρ D_ρ, one coefficient per ray of the cover fan.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor(pub Vec<i64>);

impl Divisor {
    pub fn zero(n: usize) -> Self {
        Divisor(vec![0; n])
    }

    pub fn add(&self, o: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }
}

/// A toric variety given by a fan in a cover lattice and a finite-index map
/// to N (the identity for ordinary toric varieties).
#[derive(Debug, Clone)]
pub struct ToricVariety {
    pub name: String,
    pub fan: Fan,
    /// Matrix of f: L → N; characters m ∈ M act on the cover through fᵀm.
    pub map: Vec<Vec<i64>>,
    pub rays: Vec<Vec<i64>>,
    pub maximal: Vec<Cone>,
    /// Nonempty subsets of maximal cones with their intersections.
    cech: Vec<(Vec<usize>, Cone)>,
}

impl ToricVariety {
    pub fn new(name: &str, fan: Fan, map: Vec<Vec<i64>>) -> Self {
        let rays = fan.rays();
        let maximal: Vec<Cone> = fan.maximal().into_iter().cloned().collect();
        let k = maximal.len();
        let mut cech = Vec::new();
        for mask in 1u32..(1 << k) {
            let idx: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let mut c = maximal[idx[0]].clone();
            for &i in &idx[1..] {
                c = c.intersect(&maximal[i]);
            }
            cech.push((idx, c));
        }
        cech.sort_by_key(|(i, _)| (i.len(), i.clone()));
        Self { name: name.to_string(), fan, map, rays, maximal, cech }
    }

    pub fn from_data(name: &str, data: &FanData) -> Self {
        Self::new(name, data.cover_fan().clone(), data.matrix())
    }

    pub fn rank(&self) -> usize {
        self.map.len()
    }

    pub fn ray_index(&self, ray: &[i64]) -> Result<usize> {
        self.rays.iter().position(|r| r == ray).ok_or_else(|| Error::NotADivisorRay { ray: ray.to_vec() })
    }

    /// The prime divisor D_ρ.
    pub fn prime(&self, ray: &[i64]) -> Result<Divisor> {
        let mut d = Divisor::zero(self.rays.len());
        d.0[self.ray_index(ray)?] = 1;
        Ok(d)
    }

    /// Σ kᵢ D_{ρᵢ}.
    pub fn divisor(&self, terms: &[(Vec<i64>, i64)]) -> Result<Divisor> {
        let mut d = Divisor::zero(self.rays.len());
        for (r, k) in terms {
            d.0[self.ray_index(r)?] += k;
        }
        Ok(d)
    }

    pub fn zero_divisor(&self) -> Divisor {
        Divisor::zero(self.rays.len())
    }

    /// K = −Σ D_ρ.
    pub fn canonical(&self) -> Divisor {
        Divisor(vec![-1; self.rays.len()])
    }

    /// The character fᵀm of the cover torus.
    pub fn cover_character(&self, m: &[i64]) -> Vec<i64> {
        let n = self.map.len();
        (0..n).map(|j| (0..n).map(|i| self.map[i][j] * m[i]).sum()).collect()
    }

    /// f(u_ρ) for every ray.
    pub fn ray_images(&self) -> Vec<Vec<i64>> {
        self.rays.iter().map(|r| (0..self.map.len()).map(|i| dot_ii(&self.map[i], r)).collect()).collect()
    }

    pub fn cech(&self) -> &[(Vec<usize>, Cone)] {
        &self.cech
    }

    /// Every cone of the fan is smooth in the cover lattice.
    pub fn require_smooth(&self) -> Result<()> {
        let s = self.fan.is_smooth();
        match s.witness {
            Some((c, _)) => Err(Error::NonSmoothFan(c.rays)),
            None => Ok(()),
        }
    }
}

/// Pullback of a Cartier T-divisor along a toric morphism given by the lattice
/// map `phi` from the cover lattice of `src` to that of `tgt`.
pub fn pullback_divisor(src: &ToricVariety, tgt: &ToricVariety, phi: &[Vec<i64>], d: &Divisor) -> Result<Divisor> {
    // Cartier data on each maximal cone: ⟨m_σ, u_ρ⟩ = −a_ρ
    let mut data: Vec<(Cone, Vec<Q>)> = Vec::new();
    for sigma in &tgt.maximal {
        let rows: Vec<Vec<Q>> = sigma.rays.iter().map(|r| to_qvec(r)).collect();
        let rhs: Vec<Q> = sigma.rays.iter().map(|r| Ok(q(-d.0[tgt.ray_index(r)?]))).collect::<Result<_>>()?;
        let m = solve(&rows, &rhs).ok_or_else(|| Error::Invalid(format!("divisor is not Cartier on {:?}", sigma.rays)))?;
        data.push((sigma.clone(), m));
    }
    let mut out = Vec::with_capacity(src.rays.len());
    for u in &src.rays {
        let v: Vec<i64> = phi.iter().map(|row| dot_ii(row, u)).collect();
        let (_, m) = data.iter().find(|(s, _)| s.contains_int(&v)).ok_or_else(|| Error::RayOutsideSupport { ray: v.clone() })?;
        let a = -crate::linalg::dot_iq(&v, m);
        if !a.is_integer() {
            return Err(Error::Invalid(format!("pullback has non-integral coefficient at {u:?}")));
        }
        out.push(a.to_integer().try_into().map_err(|_| Error::Invalid("coefficient overflow".into()))?);
    }
    Ok(Divisor(out))
}

/// One term of an equivariant complex: O(D) in the given degree, or its
/// pushforward from the affine chart of a cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BTerm {
    pub degree: i32,
    pub divisor: Divisor,
    pub support: Option<Cone>,
}

/// A bounded complex of such terms; each map multiplies by the canonical
/// section of D_to − D_from, scaled by the coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BObject {
    pub terms: Vec<BTerm>,
    pub maps: Vec<(usize, usize, i64)>,
}

impl BObject {
    pub fn line_bundle(d: Divisor) -> Self {
        Self { terms: vec![BTerm { degree: 0, divisor: d, support: None }], maps: Vec::new() }
    }

    /// j_* O_{U_σ}(D).
    pub fn chart(sigma: &Cone, d: Divisor) -> Self {
        Self { terms: vec![BTerm { degree: 0, divisor: d, support: Some(sigma.clone()) }], maps: Vec::new() }
    }

    /// O_{D_ρ} ⊗ O(L) as O(L − D_ρ) → O(L) in degrees −1, 0.
    pub fn koszul(x: &ToricVariety, ray: &[i64], l: &Divisor) -> Result<Self> {
        let d = x.prime(ray)?;
        Ok(Self {
            terms: vec![
                BTerm { degree: -1, divisor: l.sub(&d), support: None },
                BTerm { degree: 0, divisor: l.clone(), support: None },
            ],
            maps: vec![(0, 1, 1)],
        })
    }

    /// O_{D₁ ∩ D₂} ⊗ O(L) by the Koszul complex of two sections.
    pub fn koszul2(x: &ToricVariety, r1: &[i64], r2: &[i64], l: &Divisor) -> Result<Self> {
        let d1 = x.prime(r1)?;
        let d2 = x.prime(r2)?;
        Ok(Self {
            terms: vec![
                BTerm { degree: -2, divisor: l.sub(&d1).sub(&d2), support: None },
                BTerm { degree: -1, divisor: l.sub(&d2), support: None },
                BTerm { degree: -1, divisor: l.sub(&d1), support: None },
                BTerm { degree: 0, divisor: l.clone(), support: None },
            ],
            maps: vec![(0, 1, 1), (0, 2, -1), (1, 3, 1), (2, 3, 1)],
        })
    }

    /// ⊗ O(D).
    pub fn twist(&self, d: &Divisor) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| BTerm { degree: t.degree, divisor: t.divisor.add(d), support: t.support.clone() })
                .collect(),
            maps: self.maps.clone(),
        }
    }

    /// [k].
    pub fn shift(&self, k: i32) -> Self {
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| BTerm { degree: t.degree - k, divisor: t.divisor.clone(), support: t.support.clone() })
                .collect(),
            maps: self.maps.iter().map(|&(a, b, c)| (a, b, c * s)).collect(),
        }
    }

    /// Degrees rise by one along maps, every map is a section of an
    /// effective divisor and d² = 0.
    pub fn validate(&self) -> Result<()> {
        let mut comp: HashMap<(usize, usize), i64> = HashMap::new();
        for &(a, b, c) in &self.maps {
            let (ta, tb) = (&self.terms[a], &self.terms[b]);
            if tb.degree != ta.degree + 1 {
                return Err(Error::Invalid(format!("map {a} → {b} does not raise the degree by one")));
            }
            if !tb.divisor.sub(&ta.divisor).is_effective() {
                return Err(Error::Invalid(format!("map {a} → {b} is not a section of an effective divisor")));
            }
            for &(b2, e, c2) in &self.maps {
                if b2 == b {
                    *comp.entry((a, e)).or_default() += c * c2;
                }
            }
        }
        if let Some(((a, e), _)) = comp.iter().find(|(_, &v)| v != 0) {
            return Err(Error::Invalid(format!("d² ≠ 0 from term {a} to term {e}")));
        }
        Ok(())
    }
}

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Is Hom(t1, t2) on the chart U_τ nonzero in cover character μ?
fn local_hom(x: &ToricVariety, tau: &Cone, t1: &BTerm, t2: &BTerm, mu: &[i64]) -> bool {
    let t = match &t2.support {
        None => tau.clone(),
        Some(s) => tau.intersect(s),
    };
    if let Some(s1) = &t1.support {
        if !s1.contains_cone(&t) {
            return false;
        }
    }
    t.rays.iter().all(|r| {
        let i = x.ray_index(r).expect("cones of the fan have fan rays");
        dot_ii(mu, r) >= t1.divisor.0[i] - t2.divisor.0[i]
    })
}

/// The character-m piece of RHom(A, B) on X.
pub fn hom_character(x: &ToricVariety, a: &BObject, b: &BObject, m: &[i64]) -> Graded {
    let mu = x.cover_character(m);
    let cech = x.cech();
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut keys = Vec::new();
    for (ci, (_, tau)) in cech.iter().enumerate() {
        for (ai, ta) in a.terms.iter().enumerate() {
            for (bi, tb) in b.terms.iter().enumerate() {
                if local_hom(x, tau, ta, tb, &mu) {
                    index.insert((ai, bi, ci), keys.len());
                    keys.push((ai, bi, ci));
                }
            }
        }
    }
    let pos: HashMap<&Vec<usize>, usize> = cech.iter().enumerate().map(|(i, (s, _))| (s, i)).collect();
    let kmax = x.maximal.len();
    let mut degrees = Vec::with_capacity(keys.len());
    let mut images = Vec::with_capacity(keys.len());
    for &(ai, bi, ci) in &keys {
        let hdeg = b.terms[bi].degree - a.terms[ai].degree;
        let subset = &cech[ci].0;
        degrees.push(hdeg + subset.len() as i32 - 1);
        let mut img = Vec::new();
        for &(from, to, c) in &b.maps {
            if from == bi {
                if let Some(&t) = index.get(&(ai, to, ci)) {
                    img.push((t, c));
                }
            }
        }
        for &(from, to, c) in &a.maps {
            if to == ai {
                if let Some(&t) = index.get(&(from, bi, ci)) {
                    img.push((t, -sign(hdeg) * c));
                }
            }
        }
        for j in 0..kmax {
            if subset.contains(&j) {
                continue;
            }
            let mut bigger = subset.clone();
            bigger.push(j);
            bigger.sort();
            let p = bigger.iter().position(|&v| v == j).expect("just inserted") as i32;
            if let Some(&t) = index.get(&(ai, bi, pos[&bigger])) {
                img.push((t, sign(hdeg) * sign(p)));
            }
        }
        images.push(img);
    }
    complex_cohomology(&degrees, &images)
}

/// Hom over the window [−r, r]ⁿ, keeping only characters with nonzero Hom.
pub fn hom_window(x: &ToricVariety, a: &BObject, b: &BObject, r: i64) -> BTreeMap<Vec<i64>, Graded> {
    use rayon::prelude::*;
    characters(x.rank(), r)
        .into_par_iter()
        .map(|m| {
            let h = hom_character(x, a, b, &m);
            (m, h)
        })
        .filter(|(_, h)| !h.is_zero())
        .collect()
}

/// Total Hom over all characters, for pairs with finite-dimensional Hom:
/// the window of radius `r` must have nothing on its outer ring.
pub fn total_hom(x: &ToricVariety, a: &BObject, b: &BObject, r: i64) -> Result<Graded> {
    let w = hom_window(x, a, b, r);
    if let Some((m, h)) = w.iter().find(|(m, _)| m.iter().any(|v| v.abs() == r)) {
        return Err(Error::WindowNotStable(format!("character {m:?} on the outer ring carries {h}")));
    }
    let mut out: BTreeMap<i32, usize> = BTreeMap::new();
    for h in w.values() {
        for (&k, &n) in &h.0 {
            *out.entry(k).or_default() += n;
        }
    }
    Ok(Graded(out))
}

/// χ(A, B) = Σ (−1)ᵏ dim Homᵏ(A, B).
pub fn euler_pairing(x: &ToricVariety, a: &BObject, b: &BObject, r: i64) -> Result<i64> {
    Ok(total_hom(x, a, b, r)?.euler())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_example;

    fn surface_plus() -> ToricVariety {
        ToricVariety::from_data("X+", &builtin_example("surf.Σ+").unwrap())
    }

    #[test]
    fn affine_plane_monomials() {
        let x = ToricVariety::from_data("X-", &builtin_example("surf.Σ-").unwrap());
        let o = BObject::line_bundle(x.zero_divisor());
        // invariants of the μ₂ action: characters m with fᵀm ≥ 0
        let h = hom_character(&x, &o, &o, &[1, 0]);
        assert_eq!(h, Graded::from_pairs(&[(0, 1)]));
        assert_eq!(hom_character(&x, &o, &o, &[0, 1]), Graded::from_pairs(&[(0, 1)]));
        assert!(hom_character(&x, &o, &o, &[-1, 1]).is_zero());
        assert!(hom_character(&x, &o, &o, &[1, -1]).is_zero());
    }

    #[test]
    fn exceptional_curve_is_rigid() {
        let x = surface_plus();
        let o_c = BObject::koszul(&x, &[1, 1], &x.zero_divisor()).unwrap();
        o_c.validate().unwrap();
        // End(O_C) = ℂ ⊕ ℂ[−2] on the A₁ resolution: C² = −2
        assert_eq!(total_hom(&x, &o_c, &o_c, 4).unwrap(), Graded::from_pairs(&[(0, 1), (1, 0), (2, 1)]));
        assert_eq!(euler_pairing(&x, &o_c, &o_c, 4).unwrap(), 2);
        let o = BObject::line_bundle(x.zero_divisor());
        assert!(matches!(total_hom(&x, &o, &o, 3), Err(Error::WindowNotStable(_))));
    }

    #[test]
    fn pullback_to_the_blowup() {
        let plus = surface_plus();
        let xb = ToricVariety::from_data("XB", &builtin_example("surf.ΣB").unwrap());
        let d = plus.prime(&[1, 0]).unwrap();
        let pulled = pullback_divisor(&xb, &plus, &xb.map, &d).unwrap();
        assert_eq!(pulled, xb.prime(&[1, 0]).unwrap());
    }
}
