//! The two-cell RHom complex against the bar complex on small arrangements.

use std::sync::Arc;

use proptest::prelude::*;
use schober_core::arrangement::{Arrangement, BoxDomain};
use schober_core::hom::{rhom, rhom_bar};
use schober_core::linalg::{q, qr, Q};
use schober_core::sheaf::{HalfSpace, IndicatorComplex, Region};

fn walls_2d() -> Vec<(Vec<i64>, Q)> {
    vec![(vec![1, 0], q(0)), (vec![0, 1], q(0)), (vec![1, 1], qr(1, 2))]
}

fn walls_1d() -> Vec<(Vec<i64>, Q)> {
    vec![(vec![1], q(0)), (vec![1], qr(1, 2))]
}

/// Each wall is ignored, or used as ≥, >, ≤ or <.
fn region(walls: &[(Vec<i64>, Q)], choice: &[u8]) -> Region {
    let mut cs = Vec::new();
    for ((a, b), &c) in walls.iter().zip(choice) {
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

fn check(walls: Vec<(Vec<i64>, Q)>, n: usize, a: Vec<u8>, b: Vec<u8>, c: Vec<u8>, shift: i32) {
    let arr = Arc::new(Arrangement::new(&walls, BoxDomain::cube(n, q(1))).unwrap());
    let f = IndicatorComplex::single(region(&walls, &a), 0).direct_sum(&IndicatorComplex::single(region(&walls, &b), shift));
    let g = IndicatorComplex::single(region(&walls, &c), 0);
    let fs = f.to_sheaf(&arr).unwrap();
    let gs = g.to_sheaf(&arr).unwrap();
    assert_eq!(rhom(&fs, &gs).unwrap(), rhom_bar(&fs, &gs).unwrap());
    assert_eq!(rhom(&gs, &fs).unwrap(), rhom_bar(&gs, &fs).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_cell_matches_bar_in_dimension_one(
        a in prop::collection::vec(0u8..5, 2),
        b in prop::collection::vec(0u8..5, 2),
        c in prop::collection::vec(0u8..5, 2),
        shift in -1i32..2,
    ) {
        check(walls_1d(), 1, a, b, c, shift);
    }

    #[test]
    fn two_cell_matches_bar_in_dimension_two(
        a in prop::collection::vec(0u8..5, 3),
        b in prop::collection::vec(0u8..5, 3),
        c in prop::collection::vec(0u8..5, 3),
        shift in -1i32..2,
    ) {
        check(walls_2d(), 2, a, b, c, shift);
    }

    #[test]
    fn cone_of_restriction_to_closed_set(choice in prop::collection::vec(prop::sample::select(vec![1u8, 3]), 3)) {
        // ℂ_X → ℂ_K for a closed region K, versus a random test object
        let walls = walls_2d();
        let arr = Arc::new(Arrangement::new(&walls, BoxDomain::cube(2, q(1))).unwrap());
        let x = IndicatorComplex::single(Region::everything(), 0);
        let k = IndicatorComplex::single(region(&walls, &choice), 0);
        let cone = x.cone(&k, &[(0, 0, 1)]).to_sheaf(&arr).unwrap();
        for test in [vec![2u8, 0, 0], vec![1, 3, 0], vec![0, 0, 4]] {
            let t = IndicatorComplex::single(region(&walls, &test), 0).to_sheaf(&arr).unwrap();
            prop_assert_eq!(rhom(&t, &cone).unwrap(), rhom_bar(&t, &cone).unwrap());
            prop_assert_eq!(rhom(&cone, &t).unwrap(), rhom_bar(&cone, &t).unwrap());
        }
    }
}
