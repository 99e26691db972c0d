//! The second A-side decomposition of the conifold, ⟨Sh(Λ₊), F_D'⟩.

use schober_core::ccc::kappa;
use schober_core::models::{Example, ExampleKind, Named, Side};
use schober_core::schober::{constructible_hom, euler_matrix};
use schober_core::sheaf::IndicatorComplex;

#[test]
fn conifold_plus_side_is_semiorthogonal() {
    let ex = Example::new(ExampleKind::Conifold).unwrap();
    let mut objs: Vec<Named<IndicatorComplex>> =
        ex.chart_generators(Side::Plus).into_iter().map(|(n, g)| (n, kappa(&ex.xp, &g))).collect();
    let sky = ex.skyscraper(Side::Plus);
    objs.push((sky.name.clone(), sky.complex()));
    let names: Vec<String> = objs.iter().map(|o| o.0.clone()).collect();
    let em = euler_matrix(&names, &constructible_hom(&objs), 3, 2).unwrap();
    assert_eq!(em.characters, 125);
    assert!(em.sod(&[0, 1], &[2]).holds);
    assert!(em.is_block_triangular(2));
    assert!(!em.sod(&[2], &[0, 1]).holds);
}
