//! Execution of manifest tasks.

use std::collections::BTreeMap;
use std::sync::Arc;

use schober_core::arrangement::{Arrangement, BoxDomain};
use schober_core::builtin::FanData;
use schober_core::ccc::{compare_all, kappa};
use schober_core::fan::SmoothFailure;
use schober_core::hom::{rhom, Graded};
use schober_core::lattice::{cokernel_torsion, FiniteAbelianGroup};
use schober_core::linalg::q;
use schober_core::micro::microstalk;
use schober_core::models::{Example, MarkedRegion, Named, Side};
use schober_core::schober::{
    coherent_hom, constructible_hom, euler_matrix, flop_check, orthogonal_shift_check, pushout_rank_check,
    quotient_generator_check, weight_matrices_equivalent, weight_matrix_reduce, window_rank_check, EulerMatrix,
};
use schober_core::sheaf::{CellSheaf, IndicatorComplex};
use schober_core::skeleton::Skeleton;
use schober_core::{Error, Result};

use crate::build::Workspace;
use crate::manifest::TaskDecl;
use crate::report::{CheckLine, TaskResult, Verdict};

/// The module a check belongs to, used by the per-module subcommands.
pub fn module_of(check: &str) -> &'static str {
    match check {
        "smooth" | "refines" | "star_subdivide" | "torsion" => "fan",
        "contains" | "infinity" | "equal" | "lagrangian" | "not_fltz" => "skeleton",
        "anchor" => "sheaf",
        "ccc" | "sod_coherent" => "ccc",
        _ => "schober",
    }
}

#[derive(Default)]
struct Outcome {
    checks: Vec<CheckLine>,
    witnesses: Vec<String>,
    certificates: BTreeMap<String, String>,
    window: Option<i64>,
}

impl Outcome {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(CheckLine { name: name.into(), ok });
    }

    fn witness(&mut self, w: impl Into<String>) {
        self.witnesses.push(w.into());
    }

    fn cert(&mut self, k: &str, v: impl ToString) {
        self.certificates.insert(k.to_string(), v.to_string());
    }
}

struct Ctx<'a> {
    ws: &'a Workspace,
    t: &'a TaskDecl,
}

fn name(r: &Option<toml::Spanned<String>>) -> &str {
    r.as_ref().map(|s| s.get_ref().as_str()).unwrap_or_default()
}

impl Ctx<'_> {
    fn fan(&self, r: &Option<toml::Spanned<String>>) -> &FanData {
        &self.ws.fans[name(r)]
    }

    fn skeleton(&self, r: &Option<toml::Spanned<String>>) -> &Skeleton {
        &self.ws.skeleta[name(r)]
    }

    fn example(&self) -> &Example {
        self.ws.example.as_ref().expect("validated: task needs an example")
    }

    fn side(&self) -> Side {
        if name(&self.t.side) == "-" {
            Side::Minus
        } else {
            Side::Plus
        }
    }

    fn expect_bool(&self, default: bool) -> bool {
        self.t.expect.as_ref().and_then(|v| v.as_bool()).unwrap_or(default)
    }

    fn expect_int(&self) -> Option<i64> {
        self.t.expect.as_ref().and_then(|v| v.as_integer())
    }

    fn expect_ints(&self) -> Option<Vec<i64>> {
        self.t.expect.as_ref()?.as_array()?.iter().map(|v| v.as_integer()).collect()
    }

    /// Expected graded dimensions as `[[degree, dim], ...]`.
    fn expect_graded(&self) -> Option<Graded> {
        let pairs: Option<Vec<(i32, usize)>> = self
            .t
            .expect
            .as_ref()?
            .as_array()?
            .iter()
            .map(|p| {
                let p = p.as_array()?;
                Some((i32::try_from(p.first()?.as_integer()?).ok()?, usize::try_from(p.get(1)?.as_integer()?).ok()?))
            })
            .collect();
        pairs.map(|p| Graded::from_pairs(&p))
    }

    fn boxed(&self, c: &IndicatorComplex, n: usize) -> Result<CellSheaf> {
        let arr = Arc::new(Arrangement::new(&c.hyperplanes(), BoxDomain::cube(n, q(self.ws.windows.r#box)))?);
        c.to_sheaf(&arr)
    }

    fn region_sheaf(&self, r: &MarkedRegion) -> Result<CellSheaf> {
        self.boxed(&r.complex(), r.covector.len())
    }
}

fn smoothness_label(data: &FanData) -> String {
    let s = data.cover_fan().is_smooth();
    match s.witness {
        _ if s.smooth => "smooth".into(),
        Some((_, SmoothFailure::NonSimplicial)) => "non-simplicial".into(),
        Some((_, SmoothFailure::Index(i))) => format!("index {i}"),
        None => "singular".into(),
    }
}

fn torsion(data: &FanData) -> Result<FiniteAbelianGroup> {
    match data.as_stacky() {
        Some(sf) => cokernel_torsion(&sf.map),
        None => Ok(FiniteAbelianGroup::trivial()),
    }
}

/// Declared order must hold with a block-triangular Euler matrix, and the
/// reversed order must fail.
fn sod_checks(o: &mut Outcome, em: &EulerMatrix, split: usize) {
    let k = em.names.len();
    let left: Vec<usize> = (0..split).collect();
    let right: Vec<usize> = (split..k).collect();
    let v = em.sod(&left, &right);
    if let Some(w) = &v.witness {
        o.witness(format!("Hom({}, {}) = {} at character {:?}", w.source, w.target, w.hom, w.character));
    }
    o.check(
        format!("⟨{}⟩ semiorthogonal over {} characters", v.left.join(", ") + " | " + &v.right.join(", "), v.characters),
        v.holds,
    );
    o.check("Euler matrix block-triangular", em.is_block_triangular(split));
    let rev = em.sod(&right, &left);
    o.check("reversed order fails", !rev.holds);
    if let Some(w) = &rev.witness {
        o.cert("reversed_witness", format!("Hom({}, {}) = {} at {:?}", w.source, w.target, w.hom, w.character));
    }
    if let Ok(m) = em.finite() {
        o.cert("euler_matrix", format!("{m:?}"));
    }
    o.cert("objects", em.names.join(", "));
}

fn run_check(cx: &Ctx) -> Result<Outcome> {
    let t = cx.t;
    let w = &cx.ws.windows;
    let mut o = Outcome::default();
    match t.check.get_ref().as_str() {
        "smooth" => {
            let got = smoothness_label(cx.fan(&t.fan));
            let want = t.expect.as_ref().and_then(|v| v.as_str()).unwrap_or("smooth").to_string();
            o.cert("smoothness", &got);
            if got != want {
                o.witness(format!("expected {want}, got {got}"));
            }
            o.check(format!("{} is {want}", name(&t.fan)), got == want);
        }
        "refines" => {
            let fine = cx.fan(&t.fine).image_fan()?;
            let coarse = cx.fan(&t.coarse).image_fan()?;
            let want = cx.expect_bool(true);
            o.check(format!("{} refines {} is {want}", name(&t.fine), name(&t.coarse)), fine.refines(&coarse) == want);
        }
        "star_subdivide" => {
            let ray = t.ray.clone().unwrap_or_default();
            let sub = cx.fan(&t.fan).image_fan()?.star_subdivide(&ray)?;
            let target = cx.fan(&t.right).image_fan()?;
            o.cert("cones", sub.maximal().len());
            let want = cx.expect_bool(true);
            o.check(
                format!("star subdivision of {} at {ray:?} equals {}", name(&t.fan), name(&t.right)),
                (sub == target) == want,
            );
        }
        "torsion" => {
            let g = torsion(cx.fan(&t.fan))?;
            let want: Vec<u64> = cx.expect_ints().unwrap_or_default().into_iter().map(|v| v as u64).collect();
            o.cert("cokernel_torsion", &g);
            if g.invariant_factors != want {
                o.witness(format!("invariant factors {:?}, expected {want:?}", g.invariant_factors));
            }
            o.check(format!("torsion {g}"), g.invariant_factors == want);
        }
        "contains" => {
            let (big, small) = (cx.skeleton(&t.big), cx.skeleton(&t.small));
            let want = cx.expect_bool(true);
            let held = big.contains(small);
            if let Err(wit) = &held {
                o.witness(format!("not contained: {wit}"));
            }
            o.check(format!("{} ⊇ {} is {want}", name(&t.big), name(&t.small)), held.is_ok() == want);
            if t.strict.unwrap_or(false) {
                let extra = big.strictly_contains(small);
                if let Some(wit) = &extra {
                    o.cert("strictness_witness", wit);
                }
                o.check("containment is strict", extra.is_some());
            }
        }
        "infinity" => {
            let l = name(&t.left);
            let decl = &cx.ws.skeleta[l];
            let recipe = cx.ws.recipes.get(l).ok_or_else(|| Error::UnknownName(l.to_string()))?;
            let mut it = recipe.parts.iter().map(|p| cx.ws.skeleta[p].infinity_part());
            let first = it.next().ok_or_else(|| Error::Invalid("empty recipe".into()))?;
            let combined = it.fold(first, |a, b| if recipe.union { a.union(&b) } else { a.intersection(&b) });
            let op = if recipe.union { "∪" } else { "∩" };
            o.check(format!("({l})∞ = {op} of the infinity parts"), decl.infinity_part().equals(&combined));
            o.cert("strata_at_infinity", decl.infinity_part().len());
        }
        "equal" => {
            let want = cx.expect_bool(true);
            let eq = cx.skeleton(&t.left).equals(cx.skeleton(&t.right));
            o.check(format!("{} = {} is {want}", name(&t.left), name(&t.right)), eq == want);
        }
        "lagrangian" => {
            for s in t.skeleta.iter().flatten() {
                let sk = &cx.ws.skeleta[s.get_ref()];
                o.check(format!("{} Lagrangian ({} strata)", s.get_ref(), sk.len()), sk.all_lagrangian());
            }
        }
        "not_fltz" => {
            let want = cx.expect_bool(true);
            let verdict = cx.skeleton(&t.left).is_fltz_of_its_cones()?;
            match &verdict {
                Err(why) => o.cert("obstruction", why),
                Ok(f) => o.cert("fan_cones", f.maximal().len()),
            }
            o.check(format!("{} is not the skeleton of a fan: {want}", name(&t.left)), verdict.is_err() == want);
        }
        "anchor" => {
            let r = &cx.ws.regions[name(&t.region)];
            let f = cx.region_sheaf(r)?;
            let end = rhom(&f, &f)?;
            let mu = microstalk(&f, &r.point, &r.covector)?;
            let want = cx.expect_graded().unwrap_or_else(|| Graded::from_pairs(&[(0, 1)]));
            o.window = Some(w.r#box);
            o.cert("end", &end);
            o.cert("microstalk", &mu);
            o.check(format!("End({}) = {end}", r.name), end == want);
            o.check(format!("microstalk at {:?} = {mu}", r.covector), mu == want);
        }
        "ccc" => {
            let ex = cx.example();
            let side = cx.side();
            let reports = compare_all(ex.variety(side), &ex.chart_generators(side), w.characters)?;
            let chars = reports.first().map_or(0, |p| p.characters);
            let nonzero: usize = reports.iter().map(|p| p.nonzero).sum();
            o.window = Some(w.characters);
            o.cert("pairs", reports.len());
            o.cert("characters", chars);
            o.cert("nonzero_entries", nonzero);
            o.cert("stabilization", "torus Homs agree between box sides s and 2s at every character");
            for p in &reports {
                for m in &p.mismatches {
                    o.witness(format!(
                        "Hom({}, {}) at {:?}: coherent {} vs constructible {}",
                        p.source, p.target, m.character, m.coherent, m.constructible
                    ));
                }
            }
            let bad: usize = reports.iter().map(|p| p.mismatches.len()).sum();
            o.check(format!("{} pairs agree on every character", reports.len()), bad == 0);
            if let Some(min) = t.min_characters {
                o.check(format!("{chars} characters ≥ {min}"), chars >= min);
            }
        }
        "sod_coherent" => {
            let ex = cx.example();
            let side = cx.side();
            let mut objs: Vec<Named<_>> = Vec::new();
            for (n, g) in ex.generators(side) {
                objs.push((format!("p{}*{n}", side.label()), ex.pullback(side, &g)?));
            }
            objs.push((format!("E{}", side.label()), ex.exceptional_object(side)?));
            let names: Vec<String> = objs.iter().map(|o| o.0.clone()).collect();
            let split = names.len() - 1;
            let em = euler_matrix(&names, &coherent_hom(&ex.xb, &objs), ex.rank(), w.coherent)?;
            o.window = Some(w.coherent);
            sod_checks(&mut o, &em, split);
        }
        "sod_constructible" => {
            let ex = cx.example();
            let side = cx.side();
            let x = ex.variety(side);
            let mut objs: Vec<Named<IndicatorComplex>> =
                ex.chart_generators(side).into_iter().map(|(n, g)| (n, kappa(x, &g))).collect();
            let split = objs.len();
            let sky = match &t.region {
                Some(r) => cx.ws.regions[r.get_ref()].clone(),
                None => ex.skyscraper(side),
            };
            objs.push((sky.name.clone(), sky.complex()));
            let names: Vec<String> = objs.iter().map(|o| o.0.clone()).collect();
            let em = euler_matrix(&names, &constructible_hom(&objs), ex.rank(), w.characters)?;
            o.window = Some(w.characters);
            sod_checks(&mut o, &em, split);
        }
        "flop" => {
            let f = flop_check(cx.example(), w.total)?;
            o.window = Some(w.total);
            o.cert("forward", format!("{:?}", f.forward));
            o.cert("backward", format!("{:?}", f.backward));
            o.check("both composites are the identity", f.composites_identity);
            if !f.composites_identity {
                o.witness(format!("composites {:?} and {:?}", f.forward_then_back, f.back_then_forward));
            }
            o.check("flop matrices unimodular", f.unimodular);
        }
        "shift" => {
            let ex = cx.example();
            let s = orthogonal_shift_check(ex, false, w.total)?;
            o.window = Some(w.total);
            o.cert("koszul_route", &s.direct);
            o.cert("normal_bundle_route", &s.normal_route);
            o.cert("shift", s.shift.map_or("none".into(), |k| k.to_string()));
            o.check(format!("Koszul {} = normal bundle {}", s.direct, s.normal_route), s.agree);
            o.check("normal bundle consistent with End(O_E)", s.normal_bundle_consistent);
            if let Some(k) = cx.expect_int() {
                o.check(format!("shift {:?} = {k}", s.shift), s.shift == Some(k as i32));
            }
            let bad = orthogonal_shift_check(ex, true, w.total)?;
            o.cert("corrupted_route", &bad.normal_route);
            o.check("corrupted normal bundle disagrees", !bad.agree);
        }
        "weights" => {
            let ws = t.weights.clone().unwrap_or_default();
            let base = ws.first().ok_or_else(|| Error::Invalid("`weights` is empty".into()))?;
            let red = weight_matrix_reduce(base);
            o.cert("canonical", format!("{:?}", red.canonical));
            let want = cx.expect_bool(true);
            for (i, other) in ws.iter().enumerate().skip(1) {
                let eq = weight_matrices_equivalent(base, other);
                if eq != want {
                    o.witness(format!("matrix {i} reduces to {:?}", weight_matrix_reduce(other).canonical));
                }
                o.check(format!("matrix {i} equivalent to matrix 0 is {want}"), eq == want);
            }
        }
        "window_rank" => {
            let (rk, wt) = (t.rank.unwrap_or_default(), t.weight.unwrap_or_default());
            let got = window_rank_check(rk, wt)?;
            o.cert("multiplicity", got);
            let want = cx.expect_int().unwrap_or(1);
            o.check(format!("{wt}·{rk} − 1 = {got}, expected {want}"), got == want);
        }
        "ledger" => {
            let p = pushout_rank_check(cx.example(), w.total)?;
            o.window = Some(w.total);
            let ranks = vec![p.rank_blowup as i64, p.rank_plus as i64, p.rank_minus as i64, p.rank_p0 as i64];
            o.cert("ranks", format!("{ranks:?}"));
            o.cert("orthogonal_rank", p.rank_orthogonal);
            o.cert("image_rank", p.rank_image);
            o.cert("evidence", "rank-level evidence only, not a proof of split generation");
            if let Some(want) = cx.expect_ints() {
                o.check(format!("ranks {ranks:?} = {want:?}"), ranks == want);
            }
            o.check(format!("quotient rank {} = rank X+ {}", p.quotient_rank, p.rank_plus), p.quotient_rank == p.rank_plus);
            o.check(
                format!("iterated rank {} = direct rank {}", p.iterated_rank, p.direct_rank),
                p.iterated_rank == p.direct_rank,
            );
            o.check("ledger internally consistent", p.consistent);
        }
        "quotient" => {
            let ex = cx.example();
            let side = cx.side();
            let mut cands = Vec::new();
            for other in [Side::Plus, Side::Minus] {
                let r = ex.skyscraper(other);
                cands.push((r.name.clone(), cx.region_sheaf(&r)?));
            }
            for (n, g) in ex.chart_generators(side) {
                let kc = kappa(ex.variety(side), &g);
                cands.push((n, cx.boxed(&kc, ex.rank())?));
            }
            let rep = quotient_generator_check(cx.skeleton(&t.big), cx.skeleton(&t.small), &cands)?;
            o.window = Some(w.r#box);
            for (n, at) in &rep.r_side {
                o.cert(&format!("r_side.{n}"), at);
            }
            o.cert("small_side", rep.small_side.join(", "));
            o.cert("new_strata", rep.new_strata);
            o.check(format!("{}/{} new strata covered by R-side candidates", rep.covered, rep.new_strata), rep.consistent());
            let own = ex.skyscraper(side).name;
            o.check(format!("{own} lies on the R-side"), rep.r_side.iter().any(|r| r.0 == own));
            if let Some(k) = cx.expect_int() {
                o.check(format!("{} new strata, expected {k}", rep.new_strata), rep.new_strata as i64 == k);
            }
        }
        other => return Err(Error::Invalid(format!("unknown check `{other}`"))),
    }
    Ok(o)
}

/// Runs one task; computation errors become an `error` verdict.
pub fn run_task(ws: &Workspace, t: &TaskDecl) -> TaskResult {
    let cx = Ctx { ws, t };
    let check = t.check.get_ref().clone();
    match run_check(&cx) {
        Ok(o) => {
            let ok = !o.checks.is_empty() && o.checks.iter().all(|c| c.ok);
            let mut witnesses = o.witnesses;
            if !ok && witnesses.is_empty() {
                witnesses = o.checks.iter().filter(|c| !c.ok).map(|c| format!("failed: {}", c.name)).collect();
            }
            if ok {
                witnesses.clear();
            }
            TaskResult {
                check_id: t.id.clone(),
                check,
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                checks: o.checks,
                witnesses,
                window: o.window,
                certificates: o.certificates,
            }
        }
        Err(e) => TaskResult {
            check_id: t.id.clone(),
            check,
            verdict: Verdict::Error,
            checks: Vec::new(),
            witnesses: vec![e.to_string()],
            window: None,
            certificates: BTreeMap::new(),
        },
    }
}
