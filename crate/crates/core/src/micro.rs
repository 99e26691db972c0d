//! Microstalks and singular supports of cellular sheaves.

use std::sync::Arc;

use crate::arrangement::{Arrangement, BoxDomain};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::hom::{rhom, stalk_cohomology, Graded};
use crate::lattice::Lattice;
use crate::linalg::{dot_iq, dot_qq, fmt_qvec, nullspace, primitive_from_q, q, sign_q, to_qvec, Q};
use crate::sheaf::{CellSheaf, HalfSpace, IndicatorComplex, Region};
use crate::skeleton::Skeleton;

/// The germ of the arrangement at a point: hyperplanes through it, plus the
/// hyperplane ξ^⊥, with each local cell sent to the global cell it meets.
struct LocalChart {
    arr: Arc<Arrangement>,
    cell_map: Vec<usize>,
}

fn local_chart(global: &Arrangement, x: &[Q], extra: Option<&[i64]>) -> Result<LocalChart> {
    let n = global.dim;
    let base = global.sign_of(x);
    let through: Vec<usize> = (0..global.hyperplanes.len()).filter(|&i| base[i] == 0).collect();
    let mut hs: Vec<(Vec<i64>, Q)> = through.iter().map(|&i| (global.hyperplanes[i].normal.clone(), q(0))).collect();
    if let Some(xi) = extra {
        hs.push((xi.to_vec(), q(0)));
    }
    let arr = Arc::new(Arrangement::new(&hs, BoxDomain::cube(n, q(1)))?);
    let mut cell_map = Vec::with_capacity(arr.len());
    for cell in &arr.cells {
        let mut s = base.clone();
        for &i in &through {
            s[i] = sign_q(&dot_iq(&global.hyperplanes[i].normal, &cell.witness));
        }
        let id =
            global.cell_index(&s).ok_or_else(|| Error::Invalid(format!("local cell at {} has no global cell", fmt_qvec(x))))?;
        cell_map.push(id);
    }
    Ok(LocalChart { arr, cell_map })
}

/// Directions from a cell into its covers of one dimension more.
fn local_rays(arr: &Arrangement, c: usize) -> Vec<Vec<Q>> {
    let cell = &arr.cells[c];
    arr.up[c]
        .iter()
        .filter(|&&(d, _)| arr.cells[d].dim == cell.dim + 1)
        .map(|&(d, _)| arr.cells[d].witness.iter().zip(&cell.witness).map(|(a, b)| a - b).collect())
        .collect()
}

/// μ_{(x,ξ)}F = RΓ_{⟨ξ, y − x⟩ ≥ 0}(F)_x.
pub fn microstalk(f: &CellSheaf, x: &[Q], xi: &[i64]) -> Result<Graded> {
    let c = f.arr.locate(x)?;
    let cell = &f.arr.cells[c];
    let conormal = cell.basis.iter().all(|b| dot_iq(xi, b) == q(0));
    if conormal && xi.iter().any(|&v| v != 0) && local_rays(&f.arr, c).iter().any(|r| dot_iq(xi, r) == q(0)) {
        return Err(Error::NonGenericCovector { point: fmt_qvec(x), covector: format!("{xi:?}") });
    }
    raw_microstalk(f, x, xi)
}

fn raw_microstalk(f: &CellSheaf, x: &[Q], xi: &[i64]) -> Result<Graded> {
    if xi.iter().all(|&v| v == 0) {
        return Ok(stalk_cohomology(f.stalk_at(x)?));
    }
    let chart = local_chart(&f.arr, x, Some(xi))?;
    let local = f.pullback(chart.arr.clone(), &chart.cell_map)?;
    let half = Region::new(vec![HalfSpace::geq(xi.to_vec(), q(0))]);
    let test = IndicatorComplex::single(half, 0).to_sheaf(&chart.arr)?;
    rhom(&test, &local)
}

/// One piece of a singular support: the cell, times a closed cone of
/// covectors conormal to it.
#[derive(Debug, Clone)]
pub struct SsPiece {
    pub cell: usize,
    pub point: Vec<Q>,
    pub directions: Vec<Vec<Q>>,
    pub kappa: Cone,
    /// An interior covector and its microstalk.
    pub covector: Vec<i64>,
    pub microstalk: Graded,
}

/// The singular support over the box, as closed chamber cones of the local
/// covector fans together with zero-section pieces over the support.
pub fn singular_support(f: &CellSheaf) -> Result<Vec<SsPiece>> {
    let arr = &f.arr;
    let n = arr.dim;
    let ambient = Lattice::new(n, "N");
    let mut out = Vec::new();
    for c in 0..arr.len() {
        let cell = &arr.cells[c];
        let stalk = stalk_cohomology(&f.stalks[c]);
        if !stalk.is_zero() {
            out.push(SsPiece {
                cell: c,
                point: cell.witness.clone(),
                directions: cell.basis.clone(),
                kappa: Cone::zero(&ambient),
                covector: vec![0; n],
                microstalk: stalk,
            });
        }
        if cell.dim == n {
            continue;
        }
        let locally_constant = arr.star[c].iter().all(|&d| (0..arr.up[d].len()).all(|k| f.cover_is_qis(d, k)));
        if locally_constant {
            continue;
        }
        // integer basis of the conormal space N_c = L_c^⊥
        let normal_basis: Vec<Vec<i64>> = nullspace(&cell.basis, n).iter().map(|v| primitive_from_q(v)).collect();
        let k = normal_basis.len();
        let rays: Vec<Vec<i64>> = local_rays(arr, c).iter().map(|r| primitive_from_q(r)).collect();
        let walls: Vec<(Vec<i64>, Q)> = rays
            .iter()
            .map(|r| {
                let w: Vec<Q> = normal_basis.iter().map(|b| q(crate::linalg::dot_ii(b, r))).collect();
                (primitive_from_q(&w), q(0))
            })
            .filter(|(w, _)| w.iter().any(|&v| v != 0))
            .collect();
        let chambers = Arrangement::new(&walls, BoxDomain::cube(k, q(1)))?;
        let eqs: Vec<Vec<i64>> = cell.basis.iter().map(|b| primitive_from_q(b)).collect();
        for ch in chambers.cells.iter().filter(|ch| ch.dim == k) {
            let xi_q: Vec<Q> = (0..n).map(|i| normal_basis.iter().zip(&ch.witness).map(|(b, t)| q(b[i]) * t).sum()).collect();
            let xi = primitive_from_q(&xi_q);
            let mu = raw_microstalk(f, &cell.witness, &xi)?;
            if mu.is_zero() {
                continue;
            }
            let ineqs: Vec<Vec<i64>> = rays
                .iter()
                .filter_map(|r| {
                    let s = sign_q(&dot_qq(&to_qvec(&xi), &to_qvec(r)));
                    (s != 0).then(|| r.iter().map(|&v| v * s as i64).collect())
                })
                .collect();
            out.push(SsPiece {
                cell: c,
                point: cell.witness.clone(),
                directions: cell.basis.clone(),
                kappa: Cone::from_hrep(&ambient, &ineqs, &eqs),
                covector: xi,
                microstalk: mu,
            });
        }
    }
    Ok(out)
}

/// The first piece of SS(F) outside the lift of the skeleton, if any.
pub fn ss_outside(f: &CellSheaf, skeleton: &Skeleton) -> Result<Option<SsPiece>> {
    Ok(singular_support(f)?.into_iter().find(|p| !skeleton.contains_conormal(&p.point, &p.directions, &p.kappa)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn closed_half_line_points_inward() {
        let arr = Arc::new(Arrangement::new(&[(vec![1], q(0))], BoxDomain::cube(1, q(1))).unwrap());
        let f = IndicatorComplex::single(Region::new(vec![HalfSpace::geq(vec![1], q(0))]), 0).to_sheaf(&arr).unwrap();
        assert_eq!(microstalk(&f, &[q(0)], &[1]).unwrap(), Graded::from_pairs(&[(0, 1)]));
        assert!(microstalk(&f, &[q(0)], &[-1]).unwrap().is_zero());
        // the open half line has its covector on the other side, one degree up
        let g = IndicatorComplex::single(Region::new(vec![HalfSpace::gt(vec![1], q(0))]), 0).to_sheaf(&arr).unwrap();
        assert_eq!(microstalk(&g, &[q(0)], &[-1]).unwrap(), Graded::from_pairs(&[(1, 1)]));
        assert!(microstalk(&g, &[q(0)], &[1]).unwrap().is_zero());
        let ss = singular_support(&f).unwrap();
        assert_eq!(ss.iter().filter(|p| !p.kappa.is_zero()).count(), 1);
        assert!(microstalk(&f, &[qr(1, 2)], &[1]).unwrap().is_zero());
    }

    #[test]
    fn non_generic_covector_is_rejected() {
        let arr = Arc::new(Arrangement::new(&[(vec![1, 0], q(0)), (vec![0, 1], q(0))], BoxDomain::cube(2, q(1))).unwrap());
        let f = IndicatorComplex::single(Region::everything(), 0).to_sheaf(&arr).unwrap();
        assert!(matches!(microstalk(&f, &[q(0), q(0)], &[1, 0]), Err(Error::NonGenericCovector { .. })));
        assert!(microstalk(&f, &[q(0), q(0)], &[1, 1]).unwrap().is_zero());
        assert!(singular_support(&f).unwrap().iter().all(|p| p.kappa.is_zero()));
    }
}
