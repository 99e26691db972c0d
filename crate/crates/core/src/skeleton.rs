//! Conic Lagrangian skeleta in T*T, T = M_ℝ/M, as finite unions of
//! (affine rational subtorus) × (rational cone in N).

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::{uncovered_point, Fan, StackyFan};
use crate::lattice::{
    hermite_normal_form, inverse_unimodular, kernel_lattice, smith_normal_form, unimodular_completion, Lattice,
};
use crate::linalg::{dot_iq, fmt_qvec, q, Q};

/// One piece π(V_ℝ + s) × F for each listed shift s.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stratum {
    /// Hermite basis of the saturated sublattice V ⊆ M.
    pub base: Vec<Vec<i64>>,
    /// Canonical shift representatives, sorted.
    pub shifts: Vec<Vec<Q>>,
    /// The fiber −σ in N.
    pub fiber: Cone,
    /// Rays of σ.
    pub source_cone: Vec<Vec<i64>>,
}

/// A witness that one skeleton is not inside another: a piece of the inner
/// skeleton and a covector of its fiber not covered over its base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub stratum: Stratum,
    pub covector: Vec<Q>,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "base {:?} + {} with fiber {:?} at covector {}",
            self.stratum.base,
            self.stratum.shifts.first().map(|s| fmt_qvec(s)).unwrap_or_default(),
            self.stratum.fiber.rays,
            fmt_qvec(&self.covector)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub rank: usize,
    pub strata: Vec<Stratum>,
}

fn frac(x: &Q) -> Q {
    x - Q::from_integer(x.floor().to_integer())
}

fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

/// Annihilator P of a base lattice: saturated rows in N with P·V = 0.
fn annihilator(base: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    hermite_normal_form(&kernel_lattice(base, n))
}

/// The canonical representative of s modulo V_ℝ + M.
pub fn canonical_shift(base: &[Vec<i64>], s: &[Q]) -> Vec<Q> {
    let n = s.len();
    let p = annihilator(base, n);
    if p.is_empty() {
        return vec![Q::zero(); n];
    }
    let c: Vec<Q> = p.iter().map(|row| frac(&dot_iq(row, s))).collect();
    let mut full = p.clone();
    full.extend(unimodular_completion(&p, n));
    let inv = inverse_unimodular(&full);
    // x = inv · (c; 0)
    (0..n).map(|i| (0..p.len()).map(|j| q(inv[i][j]) * &c[j]).sum()).collect()
}

impl Stratum {
    pub fn new(base: Vec<Vec<i64>>, shifts: Vec<Vec<Q>>, fiber: Cone, source_cone: Vec<Vec<i64>>) -> Self {
        let base = hermite_normal_form(&base);
        let mut shifts: Vec<Vec<Q>> = shifts.iter().map(|s| canonical_shift(&base, s)).collect();
        shifts.sort();
        shifts.dedup();
        Self { base, shifts, fiber, source_cone }
    }

    pub fn rank(&self) -> usize {
        self.fiber.ambient.rank
    }

    pub fn base_dim(&self) -> usize {
        self.base.len()
    }

    pub fn is_lagrangian(&self) -> bool {
        self.base_dim() + self.fiber.dim() == self.rank()
    }

    fn pieces(&self) -> Vec<Stratum> {
        self.shifts
            .iter()
            .map(|s| Stratum {
                base: self.base.clone(),
                shifts: vec![s.clone()],
                fiber: self.fiber.clone(),
                source_cone: self.source_cone.clone(),
            })
            .collect()
    }

    fn key(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<Q>>) {
        (self.fiber.rays.clone(), self.base.clone(), self.shifts.clone())
    }

    fn annihilator(&self) -> Vec<Vec<i64>> {
        annihilator(&self.base, self.rank())
    }

    /// Does the affine subtorus V + s contain the points x + L_ℝ (L given by
    /// direction vectors)?
    pub fn base_contains(&self, shift: &[Q], x: &[Q], dirs: &[Vec<Q>]) -> bool {
        let p = self.annihilator();
        p.iter().all(|row| dirs.iter().all(|d| dot_iq(row, d).is_zero()) && is_integral(&(dot_iq(row, x) - dot_iq(row, shift))))
    }

    /// Is the (single-shift) base of `other` inside one of the bases of self?
    fn base_contains_piece(&self, other: &Stratum) -> bool {
        let dirs: Vec<Vec<Q>> = other.base.iter().map(|b| b.iter().map(|&v| q(v)).collect()).collect();
        let s = &other.shifts[0];
        self.shifts.iter().any(|t| self.base_contains(t, s, &dirs))
    }
}

/// Intersection of two single-shift affine subtori: the new base lattice and
/// its finitely many translates.
pub fn intersect_bases(b1: &[Vec<i64>], s1: &[Q], b2: &[Vec<i64>], s2: &[Q]) -> Option<(Vec<Vec<i64>>, Vec<Vec<Q>>)> {
    let n = s1.len();
    let p1 = annihilator(b1, n);
    let p2 = annihilator(b2, n);
    let mut p = p1.clone();
    p.extend(p2.iter().cloned());
    if p.is_empty() {
        return Some((b1.to_vec(), vec![vec![Q::zero(); n]]));
    }
    let c: Vec<Q> = p1.iter().map(|r| dot_iq(r, s1)).chain(p2.iter().map(|r| dot_iq(r, s2))).collect();
    let snf = smith_normal_form(&p);
    let diag = snf.diagonal();
    let k = diag.len();
    let uc: Vec<Q> = snf.u.iter().map(|row| row.iter().zip(&c).map(|(u, ci)| q(*u) * ci).sum()).collect();
    if uc[k..].iter().any(|x| !is_integral(x)) {
        return None;
    }
    let base: Vec<Vec<i64>> = (k..n).map(|j| snf.v.iter().map(|row| row[j]).collect()).collect();
    let base = hermite_normal_form(&base);
    let mut shifts = vec![vec![Q::zero(); k]];
    for i in 0..k {
        let d = diag[i];
        let mut next = Vec::new();
        for partial in &shifts {
            for j in 0..d {
                let mut y = partial.clone();
                y[i] = (&uc[i] + q(j)) / q(d);
                next.push(y);
            }
        }
        shifts = next;
    }
    let xs: Vec<Vec<Q>> = shifts.iter().map(|y| (0..n).map(|r| (0..k).map(|j| q(snf.v[r][j]) * &y[j]).sum()).collect()).collect();
    Some((base, xs))
}

impl Skeleton {
    pub fn new(rank: usize, strata: Vec<Stratum>) -> Self {
        Self { rank, strata }.canonicalize()
    }

    /// Single-shift pieces, in canonical order.
    pub fn pieces(&self) -> Vec<Stratum> {
        self.strata.iter().flat_map(|s| s.pieces()).collect()
    }

    /// Splits into single-shift pieces, removes every piece covered by the
    /// union of the others (smaller pieces first) and sorts.
    pub fn canonicalize(&self) -> Skeleton {
        let mut pieces = self.pieces();
        pieces.sort_by_key(|a| a.key());
        pieces.dedup();
        let mut order: Vec<usize> = (0..pieces.len()).collect();
        order.sort_by(|&i, &j| {
            let di = pieces[i].base_dim() + pieces[i].fiber.dim();
            let dj = pieces[j].base_dim() + pieces[j].fiber.dim();
            di.cmp(&dj).then(i.cmp(&j))
        });
        let mut alive = vec![true; pieces.len()];
        for &i in &order {
            alive[i] = false;
            let others: Vec<&Stratum> = (0..pieces.len()).filter(|&j| alive[j]).map(|j| &pieces[j]).collect();
            if covered_by(&pieces[i], &others).is_some() {
                alive[i] = true;
            }
        }
        let strata: Vec<Stratum> = (0..pieces.len()).filter(|&j| alive[j]).map(|j| pieces[j].clone()).collect();
        Skeleton { rank: self.rank, strata }
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn union(&self, other: &Skeleton) -> Skeleton {
        let mut s = self.strata.clone();
        s.extend(other.strata.iter().cloned());
        Skeleton::new(self.rank, s)
    }

    pub fn intersection(&self, other: &Skeleton) -> Skeleton {
        let mut out = Vec::new();
        for a in self.pieces() {
            for b in other.pieces() {
                let Some((base, shifts)) = intersect_bases(&a.base, &a.shifts[0], &b.base, &b.shifts[0]) else {
                    continue;
                };
                let fiber = a.fiber.intersect(&b.fiber);
                let source = fiber.neg().rays;
                out.push(Stratum::new(base, shifts, fiber, source));
            }
        }
        Skeleton::new(self.rank, out)
    }

    /// `Ok(())` if every point of `inner` lies in `self`, otherwise a witness.
    pub fn contains(&self, inner: &Skeleton) -> std::result::Result<(), Witness> {
        let outer: Vec<Stratum> = self.pieces();
        let refs: Vec<&Stratum> = outer.iter().collect();
        for p in inner.pieces() {
            if let Some(w) = covered_by(&p, &refs) {
                return Err(Witness { stratum: p, covector: w });
            }
        }
        Ok(())
    }

    /// Strict containment: returns a piece of `self` outside `inner`.
    pub fn strictly_contains(&self, inner: &Skeleton) -> Option<Witness> {
        if self.contains(inner).is_err() {
            return None;
        }
        inner.contains(self).err()
    }

    pub fn equals(&self, other: &Skeleton) -> bool {
        self.contains(other).is_ok() && other.contains(self).is_ok()
    }

    /// Drops the strata with zero fiber.
    pub fn infinity_part(&self) -> Skeleton {
        Skeleton { rank: self.rank, strata: self.strata.iter().filter(|s| !s.fiber.is_zero()).cloned().collect() }
    }

    pub fn infinity_equal(&self, other: &Skeleton) -> bool {
        self.infinity_part().equals(&other.infinity_part())
    }

    pub fn all_lagrangian(&self) -> bool {
        self.strata.iter().all(|s| s.is_lagrangian())
    }

    pub fn has_shifts(&self) -> bool {
        self.strata.iter().any(|s| s.shifts.iter().any(|x| x.iter().any(|v| !v.is_zero())))
    }

    /// Whether the skeleton is the FLTZ skeleton of the fan formed by its
    /// source cones; on failure, the reason.
    pub fn is_fltz_of_its_cones(&self) -> Result<std::result::Result<Fan, String>> {
        if self.has_shifts() {
            return Err(Error::HasNonzeroShifts);
        }
        let ambient = self.strata.first().map(|s| s.fiber.ambient.clone()).unwrap_or_else(|| Lattice::new(self.rank, "N"));
        let cones: Vec<Cone> = self.strata.iter().map(|s| s.fiber.neg()).collect();
        let fan = match Fan::from_cones(&ambient, cones) {
            Ok(f) => f,
            Err(Error::NotAFan { left, right }) => return Ok(Err(format!("cones {left:?} and {right:?} violate the fan axiom"))),
            Err(e) => return Err(e),
        };
        if fltz_skeleton(&fan).equals(self) {
            Ok(Ok(fan))
        } else {
            Ok(Err("FLTZ skeleton of the source cones differs".into()))
        }
    }

    /// Is the conormal set {x + L} × κ inside the lift of the skeleton to M_ℝ?
    /// `dirs` spans the direction space of the cell through `x`.
    pub fn contains_conormal(&self, x: &[Q], dirs: &[Vec<Q>], kappa: &Cone) -> bool {
        let fibers: Vec<&Cone> =
            self.strata.iter().filter(|s| s.shifts.iter().any(|t| s.base_contains(t, x, dirs))).map(|s| &s.fiber).collect();
        if kappa.is_zero() {
            return !fibers.is_empty();
        }
        uncovered_point(kappa, &fibers).is_none()
    }
}

/// `None` if the single-shift piece `p` lies in the union of `others`,
/// otherwise a fiber covector that is not covered.
fn covered_by(p: &Stratum, others: &[&Stratum]) -> Option<Vec<Q>> {
    let fibers: Vec<&Cone> = others.iter().filter(|o| o.base_contains_piece(p)).map(|o| &o.fiber).collect();
    if fibers.iter().any(|f| f.contains_cone(&p.fiber)) {
        return None;
    }
    if p.fiber.is_zero() {
        return if fibers.is_empty() { Some(vec![Q::zero(); p.rank()]) } else { None };
    }
    uncovered_point(&p.fiber, &fibers)
}

/// One stratum π(σ⊥) × (−σ) per cone.
pub fn fltz_skeleton(fan: &Fan) -> Skeleton {
    let n = fan.ambient.rank;
    let strata = fan.cones.iter().map(|c| Stratum::new(c.perp(), vec![vec![Q::zero(); n]], c.neg(), c.rays.clone())).collect();
    Skeleton::new(n, strata)
}

/// Union of translates of the FLTZ skeleton of the image fan. Each shift must
/// become integral after multiplying by the order of the torsion group.
pub fn stacky_fltz_skeleton(sf: &StackyFan, shifts: &[Vec<Q>]) -> Result<Skeleton> {
    let order = sf.group().order() as i64;
    let n = sf.map.target.rank;
    let image = sf.image_fan()?;
    for s in shifts {
        if s.len() != n {
            return Err(Error::InvalidShift { shift: fmt_qvec(s), reason: format!("expected {n} coordinates") });
        }
        if let Some(x) = s.iter().find(|x| !is_integral(&(*x * q(order)))) {
            return Err(Error::InvalidShift {
                shift: fmt_qvec(s),
                reason: format!("coordinate {} is not in (1/{order})ℤ", crate::linalg::fmt_q(x)),
            });
        }
        for c in &image.cones {
            for r in &c.rays {
                if !is_integral(&(dot_iq(r, s) * q(order))) {
                    return Err(Error::InvalidShift {
                        shift: fmt_qvec(s),
                        reason: format!("pairing with ray {r:?} is not in (1/{order})ℤ"),
                    });
                }
            }
        }
    }
    let mut strata = Vec::new();
    for c in &image.cones {
        strata.push(Stratum::new(c.perp(), shifts.to_vec(), c.neg(), c.rays.clone()));
    }
    Ok(Skeleton::new(n, strata))
}

/// Shift classes s ∈ M_ℚ/M with f^∨(s) integral: the characters of the
/// torsion group, written in M-coordinates.
pub fn torsion_shift_classes(sf: &StackyFan) -> Vec<Vec<Q>> {
    let order = sf.group().order() as i64;
    let n = sf.map.target.rank;
    let mut out = Vec::new();
    let total = (order as usize).pow(n as u32);
    for idx in 0..total {
        let mut s = Vec::with_capacity(n);
        let mut rest = idx;
        for _ in 0..n {
            s.push(Q::new(((rest % order as usize) as i64).into(), order.into()));
            rest /= order as usize;
        }
        // f^∨ is the transpose of the map
        let integral = (0..n).all(|j| {
            let v: Q = (0..n).map(|i| q(sf.map.matrix[i][j]) * &s[i]).sum();
            is_integral(&v)
        });
        if integral {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// Total order used for golden output: (fiber rays, base, shifts).
pub fn compare_strata(a: &Stratum, b: &Stratum) -> Ordering {
    a.key().cmp(&b.key())
}

/// Sample points of a one-dimensional base circle in the unit square (for
/// plotting): returns the primitive direction and the shift.
pub fn circle_direction(s: &Stratum) -> Option<(Vec<i64>, Vec<Q>)> {
    (s.base.len() == 1).then(|| (s.base[0].clone(), s.shifts[0].clone()))
}

/// lcm of the shift denominators of a stratum.
pub fn shift_denominator(s: &Stratum) -> i64 {
    s.shifts.iter().flat_map(|v| v.iter()).fold(1i64, |acc, x| acc.lcm(&x.denom().to_i64().unwrap_or(1)))
}

/// Is x ∈ M_ℚ in the lift of the zero section's support (always true)?
pub fn frac_vec(x: &[Q]) -> Vec<Q> {
    x.iter().map(frac).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{plain, stacky};
    use crate::linalg::qr;

    #[test]
    fn stratum_counts() {
        assert_eq!(fltz_skeleton(&plain("surf.Σ0")).len(), 4);
        assert_eq!(fltz_skeleton(&plain("coni.Σ+")).len(), 12);
        let zero = Fan::from_cones(&Lattice::new(2, "N"), vec![Cone::zero(&Lattice::new(2, "N"))]).unwrap();
        let z = fltz_skeleton(&zero);
        assert_eq!(z.len(), 1);
        assert_eq!(z.strata[0].base.len(), 2);
    }

    #[test]
    fn stacky_surface_counts() {
        let sf = stacky("surf.Σ-");
        let literal = stacky_fltz_skeleton(&sf, &[vec![q(0), q(0)], vec![qr(1, 2), q(0)]]).unwrap();
        assert_eq!(literal.len(), 7);
        let derived = torsion_shift_classes(&sf);
        assert_eq!(derived, vec![vec![q(0), q(0)], vec![q(0), qr(1, 2)]]);
        assert_eq!(stacky_fltz_skeleton(&sf, &derived).unwrap().len(), 5);
        let bad = stacky_fltz_skeleton(&sf, &[vec![qr(1, 3), q(0)]]);
        assert!(matches!(bad, Err(Error::InvalidShift { .. })));
    }

    #[test]
    fn half_shift_circles_meet_in_points() {
        // circle m1 = 0 against circle m2 = 1/2
        let (base, shifts) = intersect_bases(&[vec![0, 1]], &[q(0), q(0)], &[vec![1, 0]], &[q(0), qr(1, 2)]).unwrap();
        assert!(base.is_empty());
        assert_eq!(shifts.len(), 1);
        assert_eq!(canonical_shift(&base, &shifts[0]), vec![q(0), qr(1, 2)]);
        // circles m1 + m2 = 0 and m1 - m2 = 0 meet in two points
        let (_, two) = intersect_bases(&[vec![1, -1]], &[q(0), q(0)], &[vec![1, 1]], &[q(0), q(0)]).unwrap();
        assert_eq!(two.len(), 2);
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let a = fltz_skeleton(&plain("coni.Σ+"));
        let b = fltz_skeleton(&plain("coni.Σ-"));
        let u = a.union(&b);
        assert_eq!(u.canonicalize(), u);
        let i = a.intersection(&b);
        assert_eq!(i.canonicalize(), i);
    }
}
