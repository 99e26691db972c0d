//! Acceptance run: one line per criterion, with every threshold fixed below.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use schober_core::builtin::{builtin_example, plain, surface_map};
use schober_core::ccc::{compare_all, kappa};
use schober_core::fan::SmoothFailure;
use schober_core::hom::{rhom, Graded};
use schober_core::lattice::cokernel_torsion;
use schober_core::linalg::q;
use schober_core::micro::microstalk;
use schober_core::models::{skeleta, Example, ExampleKind, MarkedRegion, Named, Side};
use schober_core::schober::{
    coherent_hom, constructible_hom, euler_matrix, flop_check, orthogonal_shift_check, pushout_rank_check,
    quotient_generator_check, weight_matrices_equivalent, window_rank_check, EulerMatrix,
};
use schober_core::sheaf::{CellSheaf, IndicatorComplex};
use schober_core::{Error, Result};

const KINDS: [ExampleKind; 2] = [ExampleKind::Conifold, ExampleKind::Surface];
const SIDES: [Side; 2] = [Side::Plus, Side::Minus];

/// Character windows: [−3, 3]² has 49 characters and [−2, 2]³ has 125.
const CCC_WINDOW_2D: i64 = 3;
const CCC_WINDOW_3D: i64 = 2;
const MIN_CHARACTERS_2D: usize = 49;
const MIN_CHARACTERS_3D: usize = 125;
/// Window for coherent Homs on X_B.
const B_WINDOW: i64 = 3;
/// Window in which total Homs on X_B must already be stable.
const TOTAL_WINDOW: i64 = 5;
/// Half side of the box for sheaves of half-open polytopes.
const BOX: i64 = 3;
const REFINEMENT_CASES: u32 = 64;
const MIN_REFINEMENT_CASES: u32 = 50;
const ALGEBRA_CASES: u32 = 64;
const SKELETON_CASES: u32 = 12;

/// Individual checks of one criterion; the criterion passes when all do.
#[derive(Default)]
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push((name.into(), ok));
    }
}

fn window(ex: &Example) -> i64 {
    if ex.rank() == 2 {
        CCC_WINDOW_2D
    } else {
        CCC_WINDOW_3D
    }
}

fn rays(fan: &schober_core::fan::Fan) -> BTreeSet<BTreeSet<Vec<i64>>> {
    fan.maximal().iter().map(|c| c.rays.iter().cloned().collect()).collect()
}

fn literal(cones: &[&[[i64; 3]]]) -> BTreeSet<BTreeSet<Vec<i64>>> {
    cones.iter().map(|c| c.iter().map(|r| r.to_vec()).collect()).collect()
}

fn literal2(cones: &[&[[i64; 2]]]) -> BTreeSet<BTreeSet<Vec<i64>>> {
    cones.iter().map(|c| c.iter().map(|r| r.to_vec()).collect()).collect()
}

fn image(name: &str) -> Result<schober_core::fan::Fan> {
    builtin_example(name)?.image_fan()
}

fn criterion_1(c: &mut Checks) -> Result<()> {
    let (e1, e2, e13, e23, w) = ([1, 0, 0], [0, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]);
    c.check("coni.Σ0 rays", rays(&plain("coni.Σ0")) == literal(&[&[e1, e2, e13, e23]]));
    c.check("coni.Σ+ cones", rays(&plain("coni.Σ+")) == literal(&[&[e1, e2, e13], &[e2, e13, e23]]));
    c.check("coni.Σ- cones", rays(&plain("coni.Σ-")) == literal(&[&[e1, e2, e23], &[e1, e13, e23]]));
    c.check("coni.ΣB cones", rays(&plain("coni.ΣB")) == literal(&[&[e1, e2, w], &[e2, e23, w], &[e23, e13, w], &[e13, e1, w]]));
    c.check("surf.Σ0 cone", rays(&plain("surf.Σ0")) == literal2(&[&[[1, 0], [1, 2]]]));
    c.check("surf.Σ+ cones", rays(&plain("surf.Σ+")) == literal2(&[&[[1, 0], [1, 1]], &[[1, 1], [1, 2]]]));
    let sm = builtin_example("surf.Σ-")?;
    let sb = builtin_example("surf.ΣB")?;
    c.check("surf.Σ- cover cone", rays(sm.cover_fan()) == literal2(&[&[[1, 0], [0, 1]]]));
    c.check("surf.ΣB cover cones", rays(sb.cover_fan()) == literal2(&[&[[1, 0], [1, 1]], &[[1, 1], [0, 1]]]));
    c.check("surface stacky map", sm.matrix() == vec![vec![1, 1], vec![0, 2]] && sb.matrix() == sm.matrix());

    let s0 = plain("surf.Σ0").is_smooth();
    c.check("surf.Σ0 singular of index 2", !s0.smooth && matches!(s0.witness, Some((_, SmoothFailure::Index(2)))));
    let c0 = plain("coni.Σ0").is_smooth();
    c.check("coni.Σ0 non-simplicial", !c0.smooth && matches!(c0.witness, Some((_, SmoothFailure::NonSimplicial))));
    for name in ["surf.Σ+", "surf.Σ-", "surf.ΣB", "coni.Σ+", "coni.Σ-", "coni.ΣB"] {
        c.check(format!("{name} smooth at cover level"), builtin_example(name)?.cover_fan().is_smooth().smooth);
    }
    for p in ["surf", "coni"] {
        let zero = image(&format!("{p}.Σ0"))?;
        for s in ["Σ+", "Σ-"] {
            let side = image(&format!("{p}.{s}"))?;
            c.check(format!("{p}.{s} refines {p}.Σ0"), side.refines(&zero));
            c.check(format!("{p}.ΣB refines {p}.{s}"), image(&format!("{p}.ΣB"))?.refines(&side));
        }
    }
    c.check("star subdivision of coni.Σ0 at e1+e2+e3", plain("coni.Σ0").star_subdivide(&[1, 1, 1])? == plain("coni.ΣB"));
    Ok(())
}

fn criterion_2(c: &mut Checks) -> Result<()> {
    let t = cokernel_torsion(&surface_map())?;
    c.check(format!("coker torsion {t}"), t.invariant_factors == vec![2]);
    Ok(())
}

fn criterion_3(c: &mut Checks) -> Result<()> {
    for kind in KINDS {
        let k = kind.name();
        let s = skeleta(kind)?;
        c.check(format!("{k}: Λ_B ⊇ ⋃Λ±"), s.blowup.contains(&s.union).is_ok());
        c.check(format!("{k}: Λ_B ≠ ⋃Λ±"), s.blowup.strictly_contains(&s.union).is_some());
        c.check(
            format!("{k}: (⋃Λ±)∞ = ⋃Λ±∞"),
            s.union.infinity_part().equals(&s.plus.infinity_part().union(&s.minus.infinity_part())),
        );
        c.check(
            format!("{k}: (⋂Λ±)∞ = ⋂Λ±∞"),
            s.intersection.infinity_part().equals(&s.plus.infinity_part().intersection(&s.minus.infinity_part())),
        );
        for (n, sk) in
            [("Λ+", &s.plus), ("Λ-", &s.minus), ("Λ_B", &s.blowup), ("Λ0", &s.zero), ("⋃Λ±", &s.union), ("⋂Λ±", &s.intersection)]
        {
            c.check(format!("{k}: {n} Lagrangian"), sk.all_lagrangian());
        }
    }
    let union = skeleta(ExampleKind::Conifold)?.union;
    c.check("conifold ⋃Λ± is not the skeleton of a fan", union.is_fltz_of_its_cones()?.is_err());
    Ok(())
}

fn region_sheaf(r: &MarkedRegion, n: usize) -> Result<CellSheaf> {
    let c = r.complex();
    let arr = std::sync::Arc::new(schober_core::arrangement::Arrangement::new(
        &c.hyperplanes(),
        schober_core::arrangement::BoxDomain::cube(n, q(BOX)),
    )?);
    c.to_sheaf(&arr)
}

fn criterion_4(c: &mut Checks) -> Result<()> {
    let one = Graded::from_pairs(&[(0, 1)]);
    let con = Example::new(ExampleKind::Conifold)?;
    let surf = Example::new(ExampleKind::Surface)?;
    let regions = [
        (Example::uncorrected_region(), 3),
        (con.skyscraper(Side::Minus), 3),
        (con.skyscraper(Side::Plus), 3),
        (surf.skyscraper(Side::Minus), 2),
        (surf.skyscraper(Side::Plus), 2),
    ];
    for (r, n) in regions {
        let f = region_sheaf(&r, n)?;
        let end = rhom(&f, &f)?;
        let mu = microstalk(&f, &r.point, &r.covector)?;
        c.check(format!("{}: End {end}, microstalk {mu}", r.name), end == one && mu == one);
    }
    Ok(())
}

fn criterion_5(c: &mut Checks) -> Result<()> {
    for kind in KINDS {
        let ex = Example::new(kind)?;
        let r = window(&ex);
        let min = if ex.rank() == 2 { MIN_CHARACTERS_2D } else { MIN_CHARACTERS_3D };
        for side in SIDES {
            let reports = compare_all(ex.variety(side), &ex.chart_generators(side), r)?;
            let bad: usize = reports.iter().map(|p| p.mismatches.len()).sum();
            let chars = reports[0].characters;
            c.check(
                format!("{} {}: {} pairs over {chars} characters, {bad} mismatches", kind.name(), side.label(), reports.len()),
                bad == 0 && chars >= min,
            );
        }
    }
    Ok(())
}

/// Declared order passes with a block-triangular Euler matrix; reversed order fails.
fn sod_checks(c: &mut Checks, label: &str, em: &EulerMatrix, split: usize) {
    let k = em.names.len();
    let left: Vec<usize> = (0..split).collect();
    let right: Vec<usize> = (split..k).collect();
    let v = em.sod(&left, &right);
    c.check(format!("{label}: semiorthogonal over {} characters", v.characters), v.holds);
    c.check(format!("{label}: Euler matrix block-triangular"), em.is_block_triangular(split));
    let rev = em.sod(&right, &left);
    let w = rev.witness.as_ref().map(|w| format!(" (Hom({}, {}) = {} at {:?})", w.source, w.target, w.hom, w.character));
    c.check(format!("{label}: reversed order fails{}", w.unwrap_or_default()), !rev.holds);
}

fn criterion_6(c: &mut Checks) -> Result<()> {
    for kind in KINDS {
        let ex = Example::new(kind)?;
        for side in SIDES {
            let mut objs: Vec<Named<_>> = Vec::new();
            for (n, g) in ex.generators(side) {
                objs.push((format!("p{}*{n}", side.label()), ex.pullback(side, &g)?));
            }
            objs.push((format!("E{}", side.label()), ex.exceptional_object(side)?));
            let names: Vec<String> = objs.iter().map(|o| o.0.clone()).collect();
            let em = euler_matrix(&names, &coherent_hom(&ex.xb, &objs), ex.rank(), B_WINDOW)?;
            sod_checks(c, &format!("{} B-side ⟨p{s}*D(X{s}), E{s}⟩", kind.name(), s = side.label()), &em, 2);
        }
    }
    // the conifold ⟨Sh(Λ₊), F_D'⟩ runs in its own test target
    for (kind, side) in
        [(ExampleKind::Conifold, Side::Minus), (ExampleKind::Surface, Side::Minus), (ExampleKind::Surface, Side::Plus)]
    {
        let ex = Example::new(kind)?;
        let x = ex.variety(side);
        let mut objs: Vec<Named<IndicatorComplex>> =
            ex.chart_generators(side).into_iter().map(|(n, g)| (n, kappa(x, &g))).collect();
        let split = objs.len();
        let sky = ex.skyscraper(side);
        objs.push((sky.name.clone(), sky.complex()));
        let names: Vec<String> = objs.iter().map(|o| o.0.clone()).collect();
        let em = euler_matrix(&names, &constructible_hom(&objs), ex.rank(), window(&ex))?;
        sod_checks(c, &format!("{} A-side ⟨Sh(Λ{}), {}⟩", kind.name(), side.label(), sky.name), &em, split);
    }
    Ok(())
}

fn criterion_7(c: &mut Checks) -> Result<()> {
    for kind in KINDS {
        let f = flop_check(&Example::new(kind)?, TOTAL_WINDOW)?;
        c.check(format!("{}: composites identity, forward {:?}", kind.name(), f.forward), f.composites_identity);
        c.check(format!("{}: unimodular", kind.name()), f.unimodular);
    }
    Ok(())
}

fn criterion_8(c: &mut Checks) -> Result<()> {
    for (kind, expected) in [(ExampleKind::Conifold, Some(-2)), (ExampleKind::Surface, Some(-1))] {
        let ex = Example::new(kind)?;
        let s = orthogonal_shift_check(&ex, false, TOTAL_WINDOW)?;
        c.check(
            format!("{}: Koszul {} = normal bundle {}, shift {:?}", kind.name(), s.direct, s.normal_route, s.shift),
            s.agree && s.shift == expected,
        );
        c.check(format!("{}: normal bundle consistent with End(O_E)", kind.name()), s.normal_bundle_consistent);
        let bad = orthogonal_shift_check(&ex, true, TOTAL_WINDOW)?;
        c.check(format!("{}: corrupted normal bundle {} disagrees", kind.name(), bad.normal_route), !bad.agree);
    }
    Ok(())
}

fn criterion_9(c: &mut Checks) -> Result<()> {
    let a = vec![vec![1, 1, -2, 0], vec![0, 0, -2, 1]];
    let b = vec![vec![1, 1, -1, 0], vec![0, 0, 1, -2]];
    c.check("weight matrices equivalent", weight_matrices_equivalent(&a, &b));
    c.check("rk F − 1 = 1", window_rank_check(2, 1)? == 1);
    c.check("2·rk G − 1 = 1", window_rank_check(1, 2)? == 1);
    Ok(())
}

fn criterion_10(c: &mut Checks) -> Result<()> {
    for kind in KINDS {
        let k = kind.name();
        let ex = Example::new(kind)?;
        let p = pushout_rank_check(&ex, TOTAL_WINDOW)?;
        c.check(
            format!("{k}: ranks {}/{}/{}/{}", p.rank_blowup, p.rank_plus, p.rank_minus, p.rank_p0),
            (p.rank_blowup, p.rank_plus, p.rank_minus, p.rank_p0) == (4, 2, 2, 3),
        );
        c.check(format!("{k}: quotient rank {} = rank X+", p.quotient_rank), p.quotient_rank == p.rank_plus);
        c.check(
            format!("{k}: iterated rank {} = direct rank {}", p.iterated_rank, p.direct_rank),
            p.iterated_rank == p.direct_rank,
        );
        let s = skeleta(kind)?;
        c.check(format!("{k}: ⋂Λ± = Λ0"), s.intersection.equals(&s.zero));
        for (side, small) in [(Side::Plus, &s.plus), (Side::Minus, &s.minus)] {
            let mut cands = Vec::new();
            for other in SIDES {
                let r = ex.skyscraper(other);
                cands.push((r.name.clone(), region_sheaf(&r, ex.rank())?));
            }
            for (n, g) in ex.chart_generators(side) {
                let kc = kappa(ex.variety(side), &g);
                let arr = std::sync::Arc::new(schober_core::arrangement::Arrangement::new(
                    &kc.hyperplanes(),
                    schober_core::arrangement::BoxDomain::cube(ex.rank(), q(BOX)),
                )?);
                cands.push((n, kc.to_sheaf(&arr)?));
            }
            let rep = quotient_generator_check(&s.union, small, &cands)?;
            let own = ex.skyscraper(side).name;
            c.check(
                format!(
                    "{k} ⋃Λ±/Λ{}: R-side {:?}, {}/{} new strata covered",
                    side.label(),
                    rep.r_side.iter().map(|r| &r.0).collect::<Vec<_>>(),
                    rep.covered,
                    rep.new_strata
                ),
                rep.consistent() && rep.new_strata == p.rank_p0 - p.rank_plus && rep.r_side.iter().any(|r| r.0 == own),
            );
        }
    }
    Ok(())
}

fn run_property<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>) -> bool {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).is_ok()
}

fn criterion_11(c: &mut Checks) -> Result<()> {
    use common::*;
    c.check("refinement case count", REFINEMENT_CASES >= MIN_REFINEMENT_CASES);
    let strat = (choice(), choice(), choice(), -1i32..2, prop::collection::vec(extra_wall(), 1..3));
    c.check(
        format!("rhom and microstalk refinement invariance ({REFINEMENT_CASES} cases)"),
        run_property(REFINEMENT_CASES, strat, |(a, b, cc, s, e)| refinement(&a, &b, &cc, s, &e)),
    );
    let strat = (prop::collection::vec(prop::sample::select(vec![0u8, 1, 3]), 3), choice());
    c.check(
        format!("cone Euler identity ({ALGEBRA_CASES} cases)"),
        run_property(ALGEBRA_CASES, strat, |(k, t)| cone_euler(&k, &t)),
    );
    c.check(
        format!("SNF factorization ({ALGEBRA_CASES} cases)"),
        run_property(ALGEBRA_CASES, int_matrix(3, 3), |m| smith_form(&m)),
    );
    let strat = (prop::collection::vec(any::<bool>(), 1..12), any::<bool>());
    c.check(
        format!("canonicalization idempotence ({SKELETON_CASES} cases)"),
        run_property(SKELETON_CASES, strat, |(k, b)| canonical_idempotent(&k, b)),
    );
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(&mut Checks) -> Result<()>); 11] = [
        ("toric data fidelity", criterion_1),
        ("kernel computation", criterion_2),
        ("skeleton algebra", criterion_3),
        ("microstalk anchor", criterion_4),
        ("CCC at generator level", criterion_5),
        ("SOD verification", criterion_6),
        ("flop equivalences at K level", criterion_7),
        ("orthogonal shift", criterion_8),
        ("VGIT arithmetic", criterion_9),
        ("rank ledger", criterion_10),
        ("engine self-consistency", criterion_11),
    ];
    let verbose = std::env::args().any(|a| a == "--verbose");
    let mut passed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut checks = Checks::default();
        let outcome: std::result::Result<(), Error> = run(&mut checks);
        let ok = outcome.is_ok() && checks.0.iter().all(|(_, ok)| *ok);
        passed += usize::from(ok);
        let good = checks.0.iter().filter(|(_, ok)| *ok).count();
        println!(
            "criterion {:>2} {} {title}: {good}/{} checks ({:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            checks.0.len(),
            start.elapsed().as_secs_f64()
        );
        if let Err(e) = &outcome {
            println!("    error: {e}");
        }
        for (name, ok) in &checks.0 {
            if verbose || !ok {
                println!("    [{}] {name}", if *ok { "ok" } else { "FAILED" });
            }
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
