//! Hom between sheaves pushed forward to the torus M_ℝ/M, one character at
//! a time, on boxes large enough to contain every vertex.

use std::sync::Arc;

use itertools::Itertools;
use num_traits::{Signed, Zero};

use crate::arrangement::{Arrangement, BoxDomain};
use crate::error::{Error, Result};
use crate::hom::{rhom, Graded};
use crate::linalg::{fmt_q, solve, to_qvec, Q};
use crate::sheaf::IndicatorComplex;

/// Largest absolute coordinate of a vertex of the arrangement of `hs`.
pub fn vertex_radius(hs: &[(Vec<i64>, Q)], n: usize) -> Q {
    let mut uniq: Vec<(Vec<i64>, Q)> = hs.to_vec();
    uniq.sort();
    uniq.dedup();
    let mut best = Q::zero();
    for idx in (0..uniq.len()).combinations(n) {
        let m: Vec<Vec<Q>> = idx.iter().map(|&i| to_qvec(&uniq[i].0)).collect();
        if crate::linalg::rank_q(&m) < n {
            continue;
        }
        let b: Vec<Q> = idx.iter().map(|&i| uniq[i].1.clone()).collect();
        if let Some(x) = solve(&m, &b) {
            for v in x {
                if v.abs() > best {
                    best = v.abs();
                }
            }
        }
    }
    best
}

/// RHom(F, T_{−m} G) on the cube (−s, s)ⁿ.
pub fn hom_on_box(f: &IndicatorComplex, g: &IndicatorComplex, m: &[i64], side: &Q) -> Result<Graded> {
    let n = m.len();
    let shift: Vec<Q> = m.iter().map(|&v| -Q::from_integer(v.into())).collect();
    let gt = g.translate(&shift);
    let mut hs = f.hyperplanes();
    hs.extend(gt.hyperplanes());
    let arr = Arc::new(Arrangement::new(&hs, BoxDomain::cube(n, side.clone()))?);
    rhom(&f.to_sheaf(&arr)?, &gt.to_sheaf(&arr)?)
}

/// The m-th graded piece of Hom_T(F, G): RHom(F, T_{−m} G) on a box of side
/// one more than the vertex radius, checked against the doubled box.
pub fn torus_hom(f: &IndicatorComplex, g: &IndicatorComplex, m: &[i64]) -> Result<Graded> {
    let n = m.len();
    let shift: Vec<Q> = m.iter().map(|&v| -Q::from_integer(v.into())).collect();
    let mut hs = f.hyperplanes();
    hs.extend(g.translate(&shift).hyperplanes());
    let side = vertex_radius(&hs, n).ceil() + Q::from_integer(1.into());
    let double = &side * Q::from_integer(2.into());
    let small = hom_on_box(f, g, m, &side)?;
    let large = hom_on_box(f, g, m, &double)?;
    if small != large {
        return Err(Error::StabilizationFailed {
            character: m.to_vec(),
            side: fmt_q(&side),
            double: fmt_q(&double),
            small: small.to_string(),
            large: large.to_string(),
        });
    }
    Ok(small)
}

/// All characters of the cube [−r, r]ⁿ in lexicographic order.
pub fn characters(n: usize, r: i64) -> Vec<Vec<i64>> {
    (0..n).map(|_| -r..=r).multi_cartesian_product().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::sheaf::{HalfSpace, Region};

    fn quadrant() -> IndicatorComplex {
        IndicatorComplex::single(Region::new(vec![HalfSpace::gt(vec![1, 0], q(0)), HalfSpace::gt(vec![0, 1], q(0))]), 0)
    }

    #[test]
    fn open_orthant_reproduces_monomials() {
        // characters of Hom(O, O) on 𝔸² are the lattice points of the quadrant
        let f = quadrant();
        for m in characters(2, 2) {
            let h = torus_hom(&f, &f, &m).unwrap();
            let expected = if m[0] >= 0 && m[1] >= 0 { Graded::from_pairs(&[(0, 1)]) } else { Graded::default() };
            assert_eq!(h, expected, "character {m:?}");
        }
    }

    #[test]
    fn vertex_radius_of_two_lines() {
        let hs = vec![(vec![1, 0], q(3)), (vec![1, 1], q(0))];
        assert_eq!(vertex_radius(&hs, 2), q(3));
    }
}
