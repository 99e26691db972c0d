//! Strategies and property bodies shared by the property suite and the
//! acceptance run.
#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use schober_core::arrangement::{Arrangement, BoxDomain};
use schober_core::builtin::plain;
use schober_core::fan::Fan;
use schober_core::hom::rhom;
use schober_core::lattice::{det_int, mat_mul, smith_normal_form};
use schober_core::linalg::{q, qr, Q};
use schober_core::micro::microstalk;
use schober_core::sheaf::{HalfSpace, IndicatorComplex, Region};
use schober_core::skeleton::{fltz_skeleton, Skeleton};

pub fn walls() -> Vec<(Vec<i64>, Q)> {
    vec![(vec![1, 0], q(0)), (vec![0, 1], q(0)), (vec![1, 1], qr(1, 2))]
}

pub fn region(choice: &[u8]) -> Region {
    let mut cs = Vec::new();
    for ((a, b), &c) in walls().iter().zip(choice) {
        match c {
            1 => cs.push(HalfSpace::geq(a.clone(), b.clone())),
            2 => cs.push(HalfSpace::gt(a.clone(), b.clone())),
            3 => cs.push(HalfSpace::leq(a.clone(), b.clone())),
            4 => cs.push(HalfSpace::lt(a.clone(), b.clone())),
            _ => {}
        }
    }
    Region::new(cs)
}

pub fn object(a: &[u8], b: &[u8], shift: i32) -> IndicatorComplex {
    IndicatorComplex::single(region(a), 0).direct_sum(&IndicatorComplex::single(region(b), shift))
}

/// Extra walls that avoid the point (0, 1/4) used for microstalks.
pub fn extra_wall() -> impl Strategy<Value = (Vec<i64>, Q)> {
    (prop::sample::select(vec![vec![1, 2], vec![2, -1], vec![1, -1]]), -2i64..3).prop_map(|(n, k)| (n, qr(k, 3)))
}

pub fn choice() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..5, 3)
}

pub fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-6i64..7, cols), rows)
}

/// Products of elementary matrices.
pub fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec((0..n, 0..n, -3i64..4), 0..6).prop_map(move |ops| {
        let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        for (i, j, c) in ops {
            if i != j {
                let row = m[j].clone();
                for (x, y) in m[i].iter_mut().zip(row) {
                    *x += c * y;
                }
            }
        }
        m
    })
}

pub fn subfan(name: &str, keep: &[bool]) -> Option<Fan> {
    let f = plain(name);
    let max: Vec<Vec<Vec<i64>>> =
        f.maximal().iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(c, _)| c.rays.clone()).collect();
    if max.is_empty() {
        return None;
    }
    Some(Fan::from_rays(&f.ambient, &max).unwrap())
}

pub fn skeleton_piece(name: &str, keep: &[bool]) -> Skeleton {
    let s = fltz_skeleton(&plain(name));
    let strata = s.strata.iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(x, _)| x.clone()).collect();
    Skeleton::new(s.rank, strata)
}

pub fn refinement(a: &[u8], b: &[u8], c: &[u8], shift: i32, extra: &[(Vec<i64>, Q)]) -> Result<(), TestCaseError> {
    let coarse = Arc::new(Arrangement::new(&walls(), BoxDomain::cube(2, q(1))).unwrap());
    let mut all = walls();
    all.extend(extra.iter().cloned());
    let fine = Arc::new(Arrangement::new(&all, BoxDomain::cube(2, q(1))).unwrap());
    let f = object(a, b, shift).to_sheaf(&coarse).unwrap();
    let g = IndicatorComplex::single(region(c), 0).to_sheaf(&coarse).unwrap();
    let (ff, gf) = (f.refine(fine.clone()).unwrap(), g.refine(fine).unwrap());
    prop_assert_eq!(rhom(&f, &g).unwrap(), rhom(&ff, &gf).unwrap());
    let x = [q(0), qr(1, 4)];
    for xi in [[1, 0], [-1, 0]] {
        prop_assert_eq!(microstalk(&f, &x, &xi).unwrap(), microstalk(&ff, &x, &xi).unwrap());
    }
    Ok(())
}

/// ℂ_X → ℂ_K → Cone, paired against a test object on both sides.
pub fn cone_euler(k: &[u8], t: &[u8]) -> Result<(), TestCaseError> {
    let arr = Arc::new(Arrangement::new(&walls(), BoxDomain::cube(2, q(1))).unwrap());
    let x = IndicatorComplex::single(Region::everything(), 0);
    let kk = IndicatorComplex::single(region(k), 0);
    let cone = x.cone(&kk, &[(0, 0, 1)]).to_sheaf(&arr).unwrap();
    let (xs, ks) = (x.to_sheaf(&arr).unwrap(), kk.to_sheaf(&arr).unwrap());
    let ts = IndicatorComplex::single(region(t), 0).to_sheaf(&arr).unwrap();
    let chi = |a: &_, b: &_| rhom(a, b).unwrap().euler();
    prop_assert_eq!(chi(&ts, &cone), chi(&ts, &ks) - chi(&ts, &xs));
    prop_assert_eq!(chi(&cone, &ts), chi(&ks, &ts) - chi(&xs, &ts));
    Ok(())
}

pub fn smith_form(m: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let snf = smith_normal_form(m);
    prop_assert_eq!(mat_mul(&mat_mul(&snf.u, m), &snf.v), snf.d.clone());
    prop_assert_eq!(det_int(&snf.u).abs(), 1);
    prop_assert_eq!(det_int(&snf.v).abs(), 1);
    for w in snf.diagonal().windows(2) {
        prop_assert_eq!(w[1] % w[0], 0);
    }
    for (i, row) in snf.d.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            prop_assert!(i == j || v == 0);
        }
    }
    Ok(())
}

pub fn canonical_idempotent(keep: &[bool], blowup: bool) -> Result<(), TestCaseError> {
    let s = skeleton_piece(if blowup { "coni.ΣB" } else { "coni.Σ+" }, keep);
    prop_assert_eq!(s.canonicalize(), s.clone());
    prop_assert!(s.equals(&s.canonicalize()));
    Ok(())
}
