//! Randomized self-consistency of the engines.

mod common;

use common::*;
use proptest::prelude::*;
use schober_core::builtin::plain;
use schober_core::lattice::{cokernel_torsion, det_int, dual_map, mat_mul, Lattice, LatticeMap};
use schober_core::skeleton::fltz_skeleton;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rhom_and_microstalks_survive_refinement(
        a in choice(), b in choice(), c in choice(), shift in -1i32..2,
        extra in prop::collection::vec(extra_wall(), 1..3),
    ) {
        refinement(&a, &b, &c, shift, &extra)?;
    }

    #[test]
    fn euler_characteristic_is_additive_on_cones(
        k in prop::collection::vec(prop::sample::select(vec![0u8, 1, 3]), 3),
        t in choice(),
    ) {
        cone_euler(&k, &t)?;
    }

    #[test]
    fn smith_form_factors_the_matrix(m in int_matrix(3, 3)) {
        smith_form(&m)?;
    }

    #[test]
    fn cokernel_torsion_ignores_base_change(m in int_matrix(2, 2), u in unimodular(2), v in unimodular(2)) {
        prop_assume!(det_int(&m) != 0);
        let l = Lattice::new(2, "L");
        let n = Lattice::new(2, "N");
        let f = LatticeMap::new(l.clone(), n.clone(), m.clone()).unwrap();
        let g = LatticeMap::new(l, n, mat_mul(&mat_mul(&u, &m), &v)).unwrap();
        let t = cokernel_torsion(&f).unwrap();
        prop_assert_eq!(t.order(), det_int(&m).unsigned_abs());
        prop_assert_eq!(t, cokernel_torsion(&g).unwrap());
    }

    #[test]
    fn dual_map_is_an_involution(m in int_matrix(2, 3)) {
        let f = LatticeMap::new(Lattice::new(3, "L"), Lattice::new(2, "N"), m).unwrap();
        prop_assert_eq!(dual_map(&dual_map(&f)).matrix, f.matrix);
    }
}

proptest! {
    // skeleton operations are the expensive part; fewer cases suffice here
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn canonical_forms_are_idempotent(keep in prop::collection::vec(any::<bool>(), 1..12), blowup in any::<bool>()) {
        canonical_idempotent(&keep, blowup)?;
    }

    #[test]
    fn skeleta_grow_with_the_fan(keep in prop::collection::vec(any::<bool>(), 4)) {
        if let Some(sub) = subfan("coni.ΣB", &keep) {
            let full = fltz_skeleton(&plain("coni.ΣB"));
            prop_assert!(full.contains(&fltz_skeleton(&sub)).is_ok());
        }
    }

    #[test]
    fn union_and_intersection_laws(ka in prop::collection::vec(any::<bool>(), 1..8), kb in prop::collection::vec(any::<bool>(), 1..8)) {
        let a = skeleton_piece("coni.Σ+", &ka);
        let b = skeleton_piece("coni.Σ-", &kb);
        let u = a.union(&b);
        let i = a.intersection(&b);
        prop_assert!(u.equals(&b.union(&a)));
        prop_assert!(i.equals(&b.intersection(&a)));
        prop_assert!(u.contains(&a).is_ok() && u.contains(&b).is_ok());
        prop_assert!(a.contains(&i).is_ok() && b.contains(&i).is_ok());
        prop_assert!(a.union(&a).equals(&a));
    }
}
