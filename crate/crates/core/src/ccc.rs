//! The coherent-constructible functor on the objects used here, and its
//! character-by-character comparison with the coherent side.

use rayon::prelude::*;

use crate::bside::{hom_character, BObject, BTerm, ToricVariety};
use crate::cone::Cone;
use crate::error::Result;
use crate::hom::Graded;
use crate::linalg::{dot_ii, q};
use crate::sheaf::{HalfSpace, IndicatorComplex, Region};
use crate::torus::{characters, torus_hom};

/// Int P_τ(D) = {m : ⟨m, f(u_ρ)⟩ > −a_ρ for ρ ∈ τ}.
pub fn open_polytope(x: &ToricVariety, tau: &Cone, d: &crate::bside::Divisor) -> Region {
    let n = x.rank();
    let cons = tau
        .rays
        .iter()
        .map(|r| {
            let i = x.ray_index(r).expect("cones of the fan have fan rays");
            let image: Vec<i64> = (0..n).map(|k| dot_ii(&x.map[k], r)).collect();
            HalfSpace::gt(image, q(-d.0[i]))
        })
        .collect();
    Region::new(cons)
}

fn term_cone(tau: &Cone, t: &BTerm) -> Cone {
    match &t.support {
        None => tau.clone(),
        Some(s) => tau.intersect(s),
    }
}

/// κ of an equivariant complex: each term is replaced by its Čech complex
/// of open polytopes, in degree (term degree) + |I| − 1.
pub fn kappa(x: &ToricVariety, obj: &BObject) -> IndicatorComplex {
    if obj.terms.len() == 1 && obj.maps.is_empty() {
        if let Some(s) = &obj.terms[0].support {
            return IndicatorComplex::single(open_polytope(x, s, &obj.terms[0].divisor), obj.terms[0].degree);
        }
    }
    let cech = x.cech();
    let k = x.maximal.len();
    let mut terms = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (ti, t) in obj.terms.iter().enumerate() {
        for (subset, tau) in cech {
            index.insert((ti, subset.clone()), terms.len());
            terms.push((open_polytope(x, &term_cone(tau, t), &t.divisor), t.degree + subset.len() as i32 - 1));
        }
    }
    let mut diffs = Vec::new();
    for (ti, t) in obj.terms.iter().enumerate() {
        let eps = if t.degree.rem_euclid(2) == 0 { 1 } else { -1 };
        for (subset, _) in cech {
            let from = index[&(ti, subset.clone())];
            for &(a, b, c) in &obj.maps {
                if a == ti {
                    diffs.push((from, index[&(b, subset.clone())], c));
                }
            }
            for j in 0..k {
                if subset.contains(&j) {
                    continue;
                }
                let mut bigger = subset.clone();
                bigger.push(j);
                bigger.sort();
                let p = bigger.iter().position(|&v| v == j).expect("just inserted");
                let s = if p % 2 == 0 { 1 } else { -1 };
                diffs.push((from, index[&(ti, bigger)], eps * s));
            }
        }
    }
    IndicatorComplex { terms, diffs }
}

/// A character where the two sides disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub character: Vec<i64>,
    pub coherent: Graded,
    pub constructible: Graded,
}

#[derive(Debug, Clone)]
pub struct PairReport {
    pub source: String,
    pub target: String,
    pub characters: usize,
    pub nonzero: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Compares Hom(A, B)_m with Hom(κA, T_{−m} κB) on every character of the
/// window [−r, r]ⁿ.
pub fn compare_pair(x: &ToricVariety, a: (&str, &BObject), b: (&str, &BObject), r: i64) -> Result<PairReport> {
    let ka = kappa(x, a.1);
    let kb = kappa(x, b.1);
    let chars = characters(x.rank(), r);
    let results: Vec<Result<(Vec<i64>, Graded, Graded)>> = chars
        .par_iter()
        .map(|m| {
            let coh = hom_character(x, a.1, b.1, m);
            let con = torus_hom(&ka, &kb, m)?;
            Ok((m.clone(), coh, con))
        })
        .collect();
    let mut mismatches = Vec::new();
    let mut nonzero = 0;
    for res in results {
        let (m, coh, con) = res?;
        if !coh.is_zero() {
            nonzero += 1;
        }
        if coh != con {
            mismatches.push(Mismatch { character: m, coherent: coh, constructible: con });
        }
    }
    Ok(PairReport { source: a.0.to_string(), target: b.0.to_string(), characters: chars.len(), nonzero, mismatches })
}

/// All ordered pairs of a generator list.
pub fn compare_all(x: &ToricVariety, objects: &[(String, BObject)], r: i64) -> Result<Vec<PairReport>> {
    let mut out = Vec::new();
    for (na, a) in objects {
        for (nb, b) in objects {
            out.push(compare_pair(x, (na, a), (nb, b), r)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_example;

    #[test]
    fn line_bundles_on_the_resolved_surface() {
        let x = ToricVariety::from_data("X+", &builtin_example("surf.Σ+").unwrap());
        let o = BObject::line_bundle(x.zero_divisor());
        let o1 = BObject::line_bundle(x.prime(&[1, 0]).unwrap());
        for (a, b) in [(&o, &o), (&o, &o1), (&o1, &o)] {
            let rep = compare_pair(&x, ("a", a), ("b", b), 2).unwrap();
            assert!(rep.mismatches.is_empty(), "{:?}", rep.mismatches);
        }
    }
}
