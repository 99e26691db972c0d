//! Decategorified checks: Euler matrices, semiorthogonality with negative
//! controls, flop matrices on numerical K-groups, the orthogonal shift, the
//! VGIT weight-matrix arithmetic and the rank ledger of the push-out square.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::bside::{hom_character, total_hom, BObject, Divisor, ToricVariety};
use crate::error::{Error, Result};
use crate::hom::Graded;
use crate::lattice::{det_int, hermite_normal_form};
use crate::linalg::{inverse_q, q, rank_q, to_qvec, Q};
use crate::micro::{singular_support, SsPiece};
use crate::models::{Example, Named, Side};
use crate::sheaf::{CellSheaf, IndicatorComplex};
use crate::skeleton::Skeleton;
use crate::torus::{characters, torus_hom};

/// Graded Hom between two members of a generator list at a character.
pub type HomFn<'a> = dyn Fn(usize, usize, &[i64]) -> Result<Graded> + Sync + 'a;

/// Coherent Hom on a toric variety or global quotient.
pub fn coherent_hom<'a>(
    x: &'a ToricVariety,
    objs: &'a [Named<BObject>],
) -> impl Fn(usize, usize, &[i64]) -> Result<Graded> + Sync + 'a {
    move |i, j, m| Ok(hom_character(x, &objs[i].1, &objs[j].1, m))
}

/// Constructible Hom on the torus, one character at a time.
pub fn constructible_hom<'a>(objs: &'a [Named<IndicatorComplex>]) -> impl Fn(usize, usize, &[i64]) -> Result<Graded> + Sync + 'a {
    move |i, j, m| torus_hom(&objs[i].1, &objs[j].1, m)
}

/// Hom(gᵢ, gⱼ) over the window, keeping nonzero characters.
pub fn hom_table(hom: &HomFn, i: usize, j: usize, rank: usize, r: i64) -> Result<BTreeMap<Vec<i64>, Graded>> {
    let rows: Vec<Result<(Vec<i64>, Graded)>> =
        characters(rank, r).into_par_iter().map(|m| hom(i, j, &m).map(|h| (m, h))).collect();
    let mut out = BTreeMap::new();
    for row in rows {
        let (m, h) = row?;
        if !h.is_zero() {
            out.insert(m, h);
        }
    }
    Ok(out)
}

/// χ(gᵢ, gⱼ) with the window certificate: `entries[i][j]` is `None` when the
/// Hom reaches the outer ring of the window (infinite-dimensional total).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerMatrix {
    pub names: Vec<String>,
    pub window: i64,
    pub characters: usize,
    pub entries: Vec<Vec<Option<i64>>>,
    /// Number of characters with nonzero Hom.
    pub support: Vec<Vec<usize>>,
    /// The first character with nonzero Hom, in lexicographic order.
    pub first: Vec<Vec<Option<(Vec<i64>, String)>>>,
}

impl EulerMatrix {
    /// Every Hom from a member at index ≥ `split` to one below vanishes on the
    /// whole window.
    pub fn is_block_triangular(&self, split: usize) -> bool {
        (split..self.names.len()).all(|i| (0..split).all(|j| self.support[i][j] == 0))
    }

    /// Semiorthogonality of ⟨left, right⟩ read off the computed Homs.
    pub fn sod(&self, left: &[usize], right: &[usize]) -> SodVerdict {
        let witness = right.iter().flat_map(|&b| left.iter().map(move |&a| (b, a))).find_map(|(b, a)| {
            self.first[b][a].as_ref().map(|(m, h)| SodWitness {
                source: self.names[b].clone(),
                target: self.names[a].clone(),
                character: m.clone(),
                hom: h.clone(),
            })
        });
        SodVerdict {
            left: left.iter().map(|&i| self.names[i].clone()).collect(),
            right: right.iter().map(|&i| self.names[i].clone()).collect(),
            characters: self.characters,
            holds: witness.is_none(),
            witness,
        }
    }

    /// The fully finite matrix, or `WindowNotStable` naming the first infinite entry.
    pub fn finite(&self) -> Result<Vec<Vec<i64>>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| {
                        e.ok_or_else(|| {
                            Error::WindowNotStable(format!(
                                "Hom({}, {}) reaches the window boundary",
                                self.names[i], self.names[j]
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// Euler matrix of a generator list over the window [−r, r]ⁿ.
pub fn euler_matrix(names: &[String], hom: &HomFn, rank: usize, r: i64) -> Result<EulerMatrix> {
    let k = names.len();
    let mut entries = vec![vec![None; k]; k];
    let mut support = vec![vec![0; k]; k];
    let mut first = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            let t = hom_table(hom, i, j, rank, r)?;
            support[i][j] = t.len();
            first[i][j] = t.iter().next().map(|(m, h)| (m.clone(), h.to_string()));
            if !t.keys().any(|m| m.iter().any(|v| v.abs() == r)) {
                entries[i][j] = Some(t.values().map(Graded::euler).sum());
            }
        }
    }
    Ok(EulerMatrix {
        names: names.to_vec(),
        window: r,
        characters: (2 * r as usize + 1).pow(rank as u32),
        entries,
        support,
        first,
    })
}

/// A nonvanishing Hom that breaks semiorthogonality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SodWitness {
    pub source: String,
    pub target: String,
    pub character: Vec<i64>,
    pub hom: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SodVerdict {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub characters: usize,
    pub holds: bool,
    pub witness: Option<SodWitness>,
}

/// Checks ⟨A, B⟩: every Hom from a member of B to a member of A vanishes at
/// every character of the window. `left` and `right` index into the list
/// served by `hom`.
pub fn sod_semiorthogonality_check(
    names: &[String],
    left: &[usize],
    right: &[usize],
    hom: &HomFn,
    rank: usize,
    r: i64,
) -> Result<SodVerdict> {
    let chars = characters(rank, r);
    let mut witness = None;
    'outer: for &b in right {
        for &a in left {
            let found: Vec<Result<Option<(Vec<i64>, Graded)>>> =
                chars.par_iter().map(|m| hom(b, a, m).map(|h| (!h.is_zero()).then(|| (m.clone(), h)))).collect();
            for f in found {
                if let Some((m, h)) = f? {
                    witness =
                        Some(SodWitness { source: names[b].clone(), target: names[a].clone(), character: m, hom: h.to_string() });
                    break 'outer;
                }
            }
        }
    }
    Ok(SodVerdict {
        left: left.iter().map(|&i| names[i].clone()).collect(),
        right: right.iter().map(|&i| names[i].clone()).collect(),
        characters: chars.len(),
        holds: witness.is_none(),
        witness,
    })
}

/// Numerical rank of an integer matrix.
pub fn int_rank(m: &[Vec<i64>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    rank_q(&m.iter().map(|r| to_qvec(r)).collect::<Vec<_>>())
}

/// Matrix of χ(aᵢ, bⱼ) on X; every pair must have finite total Hom.
pub fn pairing_matrix(x: &ToricVariety, a: &[Named<BObject>], b: &[Named<BObject>], r: i64) -> Result<Vec<Vec<i64>>> {
    a.iter().map(|(_, g)| b.iter().map(|(_, t)| Ok(total_hom(x, g, t, r)?.euler())).collect()).collect()
}

/// Solves the classes of images from their pairings with a test set: row i
/// of the result expresses [Φ gᵢ] in the target basis, given
/// `images[i][j] = χ(Φ gᵢ, Tⱼ)` and `gram[k][j] = χ(h_k, Tⱼ)`.
pub fn flop_k_matrix(images: &[Vec<i64>], gram: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let size = gram.len();
    let rank = int_rank(gram);
    if rank < size || gram.iter().any(|r| r.len() != size) {
        return Err(Error::GramSingular { rank, size });
    }
    let g: Vec<Vec<Q>> = gram.iter().map(|r| to_qvec(r)).collect();
    let inv = inverse_q(&g).ok_or(Error::GramSingular { rank, size })?;
    images
        .iter()
        .map(|row| {
            (0..size)
                .map(|k| {
                    let c: Q = (0..size).map(|j| q(row[j]) * &inv[j][k]).sum();
                    if c.is_integer() {
                        c.to_integer().try_into().map_err(|_| Error::Invalid("coefficient overflow".into()))
                    } else {
                        Err(Error::Invalid(format!("non-integral class coefficient {c}")))
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    crate::lattice::mat_mul(a, b)
}

pub fn is_identity(m: &[Vec<i64>]) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)))
}

pub fn is_unimodular(m: &[Vec<i64>]) -> bool {
    !m.is_empty() && m.iter().all(|r| r.len() == m.len()) && det_int(m).abs() == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlopReport {
    /// [p₋_* p₊^* gᵢ] in the basis of X₋ generators.
    pub forward: Vec<Vec<i64>>,
    /// [p₊_* p₋^! hᵢ] in the basis of X₊ generators.
    pub backward: Vec<Vec<i64>>,
    pub forward_then_back: Vec<Vec<i64>>,
    pub back_then_forward: Vec<Vec<i64>>,
    pub unimodular: bool,
    pub composites_identity: bool,
}

fn twisted(obj: &BObject, d: &Divisor) -> BObject {
    obj.twist(d)
}

/// Flop functors on numerical K-groups. Pairings are moved to X_B by
/// adjunction: χ(p₋_* A, T) = χ(A, p₋^* T ⊗ ω_{p₋}) and
/// χ(p₊_* p₋^! h, T) = χ(p₋^* h ⊗ ω_{p₋}, p₊^* T ⊗ ω_{p₊}).
pub fn flop_check(ex: &Example, r: i64) -> Result<FlopReport> {
    let w_p = ex.relative_canonical(Side::Plus)?;
    let w_m = ex.relative_canonical(Side::Minus)?;
    let one_way = |src: Side, tgt: Side, w_src: &Divisor, w_tgt: &Divisor| -> Result<Vec<Vec<i64>>> {
        let gens = ex.generators(src);
        let tgt_gens = ex.generators(tgt);
        let tests = ex.tests(tgt)?;
        let gram = pairing_matrix(ex.variety(tgt), &tgt_gens, &tests, r)?;
        let mut images = Vec::new();
        for (_, g) in &gens {
            let a = twisted(&ex.pullback(src, g)?, w_src);
            let mut row = Vec::new();
            for (_, t) in &tests {
                let b = twisted(&ex.pullback(tgt, t)?, w_tgt);
                row.push(total_hom(&ex.xb, &a, &b, r)?.euler());
            }
            images.push(row);
        }
        flop_k_matrix(&images, &gram)
    };
    let zero = ex.xb.zero_divisor();
    let forward = one_way(Side::Plus, Side::Minus, &zero, &w_m)?;
    let backward = one_way(Side::Minus, Side::Plus, &w_m, &w_p)?;
    let fb = mat_mul(&forward, &backward);
    let bf = mat_mul(&backward, &forward);
    Ok(FlopReport {
        unimodular: is_unimodular(&forward) && is_unimodular(&backward),
        composites_identity: is_identity(&fb) && is_identity(&bf),
        forward,
        backward,
        forward_then_back: fb,
        back_then_forward: bf,
    })
}

/// The projection of 𝓔₋ onto ⟨𝓔₊⟩ is RHom(𝓔₊, 𝓔₋) ⊗ 𝓔₊; both routes must
/// find this Hom concentrated in one degree d, i.e. the projection is 𝓔₊[−d].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftReport {
    /// Čech computation of RHom(𝓔₊, 𝓔₋) on X_B from the Koszul presentations.
    pub direct: String,
    /// H*(E, F₊^∨ ⊗ F₋) ⊕ H*(E, F₊^∨ ⊗ F₋ ⊗ N)[−1] with N from the normal-bundle formula.
    pub normal_route: String,
    /// End(O_E) against H*(O_E) ⊕ H*(N)[−1]: the formula for N is consistent.
    pub normal_bundle_consistent: bool,
    pub agree: bool,
    pub shift: Option<i32>,
}

fn shifted_sum(a: &Graded, b: &Graded, k: i32) -> Graded {
    let mut out = a.0.clone();
    for (&d, &n) in &b.0 {
        *out.entry(d + k).or_default() += n;
    }
    out.retain(|_, n| *n > 0);
    Graded(out)
}

/// Computes the orthogonal shift. With `corrupt_normal` the normal bundle
/// loses its q₊ factor, which must break agreement.
pub fn orthogonal_shift_check(ex: &Example, corrupt_normal: bool, r: i64) -> Result<ShiftReport> {
    let xb = &ex.xb;
    let pull = |side: Side, d: &Divisor| crate::bside::pullback_divisor(xb, ex.variety(side), ex.phi(side), d);
    let f_p = pull(Side::Plus, &ex.ample_p.scale(-1))?;
    let f_m = pull(Side::Minus, &ex.ample_m.scale(-1))?;
    let mut normal = f_p.add(&f_m);
    if corrupt_normal {
        normal = normal.sub(&f_p);
    }
    let on_e = |l: &Divisor| BObject::koszul(xb, &ex.exceptional, l);
    let o = BObject::line_bundle(xb.zero_divisor());
    let h = |l: &Divisor| -> Result<Graded> { total_hom(xb, &o, &on_e(l)?, r) };

    let e_p = ex.exceptional_object(Side::Plus)?;
    let e_m = ex.exceptional_object(Side::Minus)?;
    let direct = total_hom(xb, &e_p, &e_m, r)?;
    let base = f_m.sub(&f_p);
    let normal_route = shifted_sum(&h(&base)?, &h(&base.add(&normal))?, 1);

    let o_e = on_e(&xb.zero_divisor())?;
    let end = total_hom(xb, &o_e, &o_e, r)?;
    let predicted = shifted_sum(&h(&xb.zero_divisor())?, &h(&normal)?, 1);

    let agree = direct == normal_route;
    Ok(ShiftReport {
        direct: direct.to_string(),
        normal_route: normal_route.to_string(),
        normal_bundle_consistent: end == predicted,
        shift: if agree { direct.concentrated().map(|d| -d) } else { None },
        agree,
    })
}

/// Canonical form of a weight matrix under unimodular row operations and
/// column permutations, with the steps that reach it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightReduction {
    pub canonical: Vec<Vec<i64>>,
    pub permutation: Vec<usize>,
    pub transcript: Vec<String>,
}

/// Minimum over column permutations of the row Hermite form.
pub fn weight_matrix_reduce(w: &[Vec<i64>]) -> WeightReduction {
    let cols = w.first().map_or(0, Vec::len);
    let mut best: Option<(Vec<Vec<i64>>, Vec<usize>)> = None;
    for perm in (0..cols).permutations(cols) {
        let permuted: Vec<Vec<i64>> = w.iter().map(|row| perm.iter().map(|&c| row[c]).collect()).collect();
        let h = hermite_normal_form(&permuted);
        if best.as_ref().is_none_or(|(b, _)| h < *b) {
            best = Some((h, perm));
        }
    }
    let (canonical, permutation) = best.unwrap_or_default();
    let transcript = vec![format!("permute columns to {permutation:?}"), format!("row-reduce to Hermite form {canonical:?}")];
    WeightReduction { canonical, permutation, transcript }
}

/// Do two weight matrices define isomorphic quotient data?
pub fn weight_matrices_equivalent(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    weight_matrix_reduce(a).canonical == weight_matrix_reduce(b).canonical
}

/// Multiplicity of the orthogonal block in a window comparison: weight·rk − 1
/// (weight 1 is an ordinary blowup, rk − 1).
pub fn window_rank_check(rk: i64, weight: i64) -> Result<i64> {
    if rk < 1 || weight < 1 {
        return Err(Error::Invalid(format!("rank {rk} and weight {weight} must be at least 1")));
    }
    Ok(weight * rk - 1)
}

/// Partition of candidates by their microstalks along big ∖ small.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    /// Candidates with a nonvanishing microstalk on big ∖ small, with a point
    /// and covector where it is seen.
    pub r_side: Vec<(String, String)>,
    /// Candidates whose singular support lies in small.
    pub small_side: Vec<String>,
    /// Lagrangian strata of big not contained in small.
    pub new_strata: usize,
    /// Those new strata met by the singular support of an R-side candidate.
    pub covered: usize,
}

impl QuotientReport {
    /// Every stratum of big ∖ small carries a microstalk of some R-side candidate.
    pub fn consistent(&self) -> bool {
        self.covered == self.new_strata && !self.r_side.is_empty() == (self.new_strata > 0)
    }
}

fn describe(p: &SsPiece) -> String {
    format!("{} with covector {:?} ({})", crate::linalg::fmt_qvec(&p.point), p.covector, p.microstalk)
}

/// Sorts candidates with SS ⊆ big into R-side and small-side, and matches
/// the R-side singular supports against the strata of big ∖ small.
pub fn quotient_generator_check(big: &Skeleton, small: &Skeleton, candidates: &[Named<CellSheaf>]) -> Result<QuotientReport> {
    let new: Vec<Skeleton> = big
        .strata
        .iter()
        .filter(|s| s.is_lagrangian())
        .map(|s| Skeleton::new(big.rank, vec![s.clone()]))
        .filter(|s| small.contains(s).is_err())
        .collect();
    let mut hit = vec![false; new.len()];
    let mut r_side = Vec::new();
    let mut small_side = Vec::new();
    for (name, f) in candidates {
        let ss = singular_support(f)?;
        if let Some(p) = ss.iter().find(|p| !big.contains_conormal(&p.point, &p.directions, &p.kappa)) {
            return Err(Error::CandidateOutsideBig { name: name.clone(), witness: describe(p) });
        }
        let outside: Vec<&SsPiece> = ss.iter().filter(|p| !small.contains_conormal(&p.point, &p.directions, &p.kappa)).collect();
        match outside.first() {
            Some(p) => r_side.push((name.clone(), describe(p))),
            None => small_side.push(name.clone()),
        }
        for p in outside {
            for (k, s) in new.iter().enumerate() {
                hit[k] |= s.contains_conormal(&p.point, &p.directions, &p.kappa);
            }
        }
    }
    Ok(QuotientReport { r_side, small_side, new_strata: new.len(), covered: hit.iter().filter(|&&h| h).count() })
}

/// The rank ledger of the push-out square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PushoutReport {
    pub rank_blowup: usize,
    pub rank_plus: usize,
    pub rank_minus: usize,
    pub rank_p0: usize,
    /// Rank of the orthogonal block of p₊^* D(X₊) in D(X_B).
    pub rank_orthogonal: usize,
    /// rank_blowup − rank_orthogonal.
    pub quotient_rank: usize,
    /// Rank of the image of the orthogonal block under p₋_*.
    pub rank_image: usize,
    /// rank_minus − rank_image.
    pub iterated_rank: usize,
    /// rank G₀(X₀) ⊗ ℚ, as the total rank of the rational Chow groups of X₀.
    pub direct_rank: usize,
    pub consistent: bool,
}

/// Ranks of numerical K-groups from Euler pairings with compact test objects.
pub fn pushout_rank_check(ex: &Example, r: i64) -> Result<PushoutReport> {
    let tests_b = ex.tests_b()?;
    let rank_blowup = int_rank(&pairing_matrix(&ex.xb, &ex.generators_b()?, &tests_b, r)?);
    let rank_p0 = int_rank(&pairing_matrix(&ex.xb, &ex.generators_p0()?, &tests_b, r)?);
    let rank_side =
        |s: Side| -> Result<usize> { Ok(int_rank(&pairing_matrix(ex.variety(s), &ex.generators(s), &ex.tests(s)?, r)?)) };
    let rank_plus = rank_side(Side::Plus)?;
    let rank_minus = rank_side(Side::Minus)?;
    let block = ex.orthogonal_block()?;
    let rank_orthogonal = int_rank(&pairing_matrix(&ex.xb, &block, &tests_b, r)?);
    // p₋_* of the block, paired with X₋ tests through p₋^! = p₋^*(−) ⊗ ω
    let w = ex.relative_canonical(Side::Minus)?;
    let tests_m = ex.tests(Side::Minus)?;
    let mut pulled = Vec::new();
    for (n, t) in &tests_m {
        pulled.push((n.clone(), ex.pullback(Side::Minus, t)?.twist(&w)));
    }
    let rank_image = int_rank(&pairing_matrix(&ex.xb, &block, &pulled, r)?);
    let x0 = crate::builtin::builtin_example(&format!("{}.Σ0", ex.kind.prefix()))?;
    let direct_rank =
        x0.as_plain().ok_or_else(|| Error::Invalid("X₀ must be a plain fan".into()))?.rational_chow_ranks().iter().sum();
    let quotient_rank = rank_blowup.saturating_sub(rank_orthogonal);
    let iterated_rank = rank_minus.saturating_sub(rank_image);
    Ok(PushoutReport {
        consistent: quotient_rank == rank_plus && iterated_rank == direct_rank,
        rank_blowup,
        rank_plus,
        rank_minus,
        rank_p0,
        rank_orthogonal,
        quotient_rank,
        rank_image,
        iterated_rank,
        direct_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ExampleKind;

    #[test]
    fn weight_matrices_of_the_surface_flop_agree() {
        let a = vec![vec![1, 1, -2, 0], vec![0, 0, -2, 1]];
        let b = vec![vec![1, 1, -1, 0], vec![0, 0, 1, -2]];
        assert!(weight_matrices_equivalent(&a, &b));
        let neg: Vec<Vec<i64>> = a.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        assert_eq!(weight_matrix_reduce(&neg).canonical, weight_matrix_reduce(&a).canonical);
        assert!(!weight_matrices_equivalent(&a, &[vec![1, 1, -2, 0], vec![0, 0, -3, 1]]));
    }

    #[test]
    fn window_multiplicities() {
        assert_eq!(window_rank_check(2, 1).unwrap(), 1);
        assert_eq!(window_rank_check(1, 2).unwrap(), 1);
        assert_eq!(window_rank_check(1, 1).unwrap(), 0);
        assert!(window_rank_check(0, 1).is_err());
    }

    #[test]
    fn identity_recipe_gives_identity() {
        let gram = vec![vec![1, 2], vec![0, 1]];
        assert!(is_identity(&flop_k_matrix(&gram, &gram).unwrap()));
        assert!(matches!(flop_k_matrix(&gram, &[vec![1, 2], vec![2, 4]]), Err(Error::GramSingular { rank: 1, size: 2 })));
    }

    #[test]
    fn shifts_flops_and_ledger() {
        for (kind, shift) in [(ExampleKind::Conifold, -2), (ExampleKind::Surface, -1)] {
            let ex = Example::new(kind).unwrap();
            let s = orthogonal_shift_check(&ex, false, 4).unwrap();
            assert!(s.agree && s.normal_bundle_consistent, "{s:?}");
            assert_eq!(s.shift, Some(shift));
            assert!(!orthogonal_shift_check(&ex, true, 4).unwrap().agree);
            let f = flop_check(&ex, 5).unwrap();
            assert!(f.unimodular && f.composites_identity, "{f:?}");
            let p = pushout_rank_check(&ex, 5).unwrap();
            assert_eq!((p.rank_blowup, p.rank_plus, p.rank_minus, p.rank_p0), (4, 2, 2, 3));
            assert!(p.consistent, "{p:?}");
        }
    }
}
