//! Affine hyperplane arrangements restricted to an open box, with their face
//! posets, oriented incidence numbers and canonical sign-vector keys.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det_q, dot_iq, fmt_qvec, nullspace, primitive, q, rank_q, sign_q, to_qvec, Q};
use crate::polyhedra::{find_point, Ineq};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// The hyperplane {x : normal·x = offset}; the normal is primitive with its
/// first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub normal: Vec<i64>,
    pub offset: Q,
}

impl Hyperplane {
    /// Normalizes `a·x = b`; returns the hyperplane and the sign (+1/−1) by
    /// which the equation was multiplied.
    pub fn normalized(a: &[i64], b: &Q) -> Result<(Self, i8)> {
        if a.iter().all(|&x| x == 0) {
            return Err(Error::Invalid("hyperplane with zero normal".into()));
        }
        let g = a.iter().fold(0i64, |g, &x| num_integer::Integer::gcd(&g, &x));
        let mut normal = primitive(a);
        let mut offset = b / q(g);
        let mut s = 1;
        if normal.iter().find(|&&x| x != 0).copied().unwrap_or(0) < 0 {
            normal = normal.iter().map(|x| -x).collect();
            offset = -offset;
            s = -1;
        }
        Ok((Self { normal, offset }, s))
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        dot_iq(&self.normal, x) - &self.offset
    }

    pub fn translated(&self, t: &[Q]) -> Self {
        Self { normal: self.normal.clone(), offset: &self.offset + dot_iq(&self.normal, t) }
    }
}

/// An open axis-parallel box ∏ (loᵢ, hiᵢ).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxDomain {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
}

impl BoxDomain {
    /// The cube (−s, s)ⁿ.
    pub fn cube(n: usize, s: Q) -> Self {
        Self { lo: vec![-s.clone(); n], hi: vec![s; n] }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| v > l && v < h)
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.lo.len() != n || self.hi.len() != n {
            return Err(Error::DegenerateBox(format!("box has wrong dimension for ℝ^{n}")));
        }
        if let Some(i) = (0..n).find(|&i| self.lo[i] >= self.hi[i]) {
            return Err(Error::DegenerateBox(format!("empty side in coordinate {i}")));
        }
        Ok(())
    }
}

/// A relatively open cell: its sign vector, dimension, an interior witness
/// point and an ordered basis of its direction space (its orientation).
#[derive(Debug, Clone)]
pub struct Cell {
    pub sign: Vec<i8>,
    pub dim: usize,
    pub witness: Vec<Q>,
    pub basis: Vec<Vec<Q>>,
}

impl Cell {
    pub fn zero_set(&self) -> Vec<usize> {
        (0..self.sign.len()).filter(|&i| self.sign[i] == 0).collect()
    }
}

/// c ≤ d in the face poset iff each sign of c is 0 or equals that of d.
pub fn sign_leq(c: &[i8], d: &[i8]) -> bool {
    c.iter().zip(d).all(|(a, b)| *a == 0 || a == b)
}

#[derive(Debug)]
pub struct Arrangement {
    pub dim: usize,
    pub hyperplanes: Vec<Hyperplane>,
    pub bbox: BoxDomain,
    pub cells: Vec<Cell>,
    index: HashMap<Vec<i8>, usize>,
    /// Covers c ⋖ d with incidence number [c:d].
    pub up: Vec<Vec<(usize, i8)>>,
    pub down: Vec<Vec<(usize, i8)>>,
    /// All d ≥ c, sorted, including c.
    pub star: Vec<Vec<usize>>,
    id: u64,
}

#[derive(Clone)]
struct Flat {
    point: Vec<Q>,
    dirs: Vec<Vec<Q>>,
    zero: Vec<usize>,
}

fn dot_qq(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_i_q(a: &[i64], b: &[Q]) -> Q {
    dot_iq(a, b)
}

/// A point of `flat` strictly inside the box, if any.
fn flat_box_point(flat: &Flat, bbox: &BoxDomain) -> Option<Vec<Q>> {
    let n = flat.point.len();
    let k = flat.dirs.len();
    if k == 0 {
        return bbox.contains(&flat.point).then(|| flat.point.clone());
    }
    let mut sys = Vec::new();
    for i in 0..n {
        let coeffs: Vec<Q> = flat.dirs.iter().map(|d| d[i].clone()).collect();
        // lo < p + D t  and  p + D t < hi
        sys.push(Ineq::new(coeffs.clone(), &bbox.lo[i] - &flat.point[i], true));
        sys.push(Ineq::new(coeffs.iter().map(|c| -c).collect(), &flat.point[i] - &bbox.hi[i], true));
    }
    let t = find_point(&sys, k)?;
    Some((0..n).map(|i| &flat.point[i] + flat.dirs.iter().zip(&t).map(|(d, tj)| &d[i] * tj).sum::<Q>()).collect())
}

impl Arrangement {
    pub fn new(hyperplanes: &[(Vec<i64>, Q)], bbox: BoxDomain) -> Result<Self> {
        let n = bbox.lo.len();
        bbox.validate(n)?;
        let mut hs: BTreeSet<Hyperplane> = BTreeSet::new();
        for (a, b) in hyperplanes {
            if a.len() != n {
                return Err(Error::Invalid(format!("hyperplane normal {a:?} is not in ℝ^{n}")));
            }
            hs.insert(Hyperplane::normalized(a, b)?.0);
        }
        let hyperplanes: Vec<Hyperplane> = hs.into_iter().collect();
        Self::build(hyperplanes, bbox)
    }

    pub fn from_hyperplanes(hyperplanes: Vec<Hyperplane>, bbox: BoxDomain) -> Result<Self> {
        let pairs: Vec<(Vec<i64>, Q)> = hyperplanes.into_iter().map(|h| (h.normal, h.offset)).collect();
        Self::new(&pairs, bbox)
    }

    fn build(hyperplanes: Vec<Hyperplane>, bbox: BoxDomain) -> Result<Self> {
        let n = bbox.lo.len();
        let m = hyperplanes.len();
        let normals_q: Vec<Vec<Q>> = hyperplanes.iter().map(|h| to_qvec(&h.normal)).collect();

        // enumerate flats meeting the box, top-down
        let top = Flat {
            point: vec![Q::zero(); n],
            dirs: (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect(),
            zero: Vec::new(),
        };
        let mut levels: Vec<Vec<Flat>> = vec![Vec::new(); n + 1];
        let mut key_of: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        let mut dead: BTreeSet<Vec<usize>> = BTreeSet::new();
        // children[(dim, idx)] = subflats one dimension lower
        let mut children: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut box_points: HashMap<(usize, usize), Vec<Q>> = HashMap::new();
        match flat_box_point(&top, &bbox) {
            Some(p) => {
                box_points.insert((n, 0), p);
            }
            None => return Err(Error::DegenerateBox("box is empty".into())),
        }
        key_of.insert(Vec::new(), (n, 0));
        levels[n].push(top);
        for k in (1..=n).rev() {
            let count = levels[k].len();
            for fi in 0..count {
                let flat = levels[k][fi].clone();
                let mut kids = BTreeSet::new();
                for h in 0..m {
                    if flat.zero.contains(&h) {
                        continue;
                    }
                    let ad: Vec<Q> = flat.dirs.iter().map(|d| dot_i_q(&hyperplanes[h].normal, d)).collect();
                    let Some(j) = ad.iter().position(|x| !x.is_zero()) else { continue };
                    let tj = (&hyperplanes[h].offset - dot_i_q(&hyperplanes[h].normal, &flat.point)) / &ad[j];
                    let point: Vec<Q> = flat.point.iter().zip(&flat.dirs[j]).map(|(p, d)| p + &tj * d).collect();
                    let ns = nullspace(std::slice::from_ref(&ad), k);
                    let dirs: Vec<Vec<Q>> = ns
                        .iter()
                        .map(|c| (0..n).map(|i| c.iter().zip(&flat.dirs).map(|(cj, d)| cj * &d[i]).sum()).collect())
                        .collect();
                    let zero: Vec<usize> = (0..m)
                        .filter(|&g| {
                            hyperplanes[g].eval(&point).is_zero() && dirs.iter().all(|d| dot_qq(&normals_q[g], d).is_zero())
                        })
                        .collect();
                    if let Some(&(_, idx)) = key_of.get(&zero) {
                        kids.insert(idx);
                        continue;
                    }
                    if dead.contains(&zero) {
                        continue;
                    }
                    let nf = Flat { point, dirs, zero: zero.clone() };
                    match flat_box_point(&nf, &bbox) {
                        Some(p) => {
                            let idx = levels[k - 1].len();
                            box_points.insert((k - 1, idx), p);
                            key_of.insert(zero, (k - 1, idx));
                            levels[k - 1].push(nf);
                            kids.insert(idx);
                        }
                        None => {
                            dead.insert(zero);
                        }
                    }
                }
                children.insert((k, fi), kids.into_iter().collect());
            }
        }

        let sign_at = |x: &[Q]| -> Vec<i8> { hyperplanes.iter().map(|h| sign_q(&h.eval(x))).collect() };
        let mut cells: Vec<Cell> = Vec::new();
        let mut index: HashMap<Vec<i8>, usize> = HashMap::new();
        let mut cells_in_flat: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut cover_pairs: Vec<(usize, usize)> = Vec::new();
        let cell_basis = |zero: &[usize]| -> Vec<Vec<Q>> {
            let rows: Vec<Vec<Q>> = zero.iter().map(|&i| normals_q[i].clone()).collect();
            nullspace(&rows, n)
        };

        for (vi, v) in levels[0].iter().enumerate() {
            let s = sign_at(&v.point);
            let id = cells.len();
            index.insert(s.clone(), id);
            cells.push(Cell { sign: s, dim: 0, witness: v.point.clone(), basis: Vec::new() });
            cells_in_flat.insert((0, vi), vec![id]);
        }
        for k in 1..=n {
            for fi in 0..levels[k].len() {
                let flat = levels[k][fi].clone();
                let mut mine: Vec<usize> = Vec::new();
                let kids = children.get(&(k, fi)).cloned().unwrap_or_default();
                for gi in kids {
                    let sub = &levels[k - 1][gi];
                    let extra: Vec<usize> = sub.zero.iter().copied().filter(|h| !flat.zero.contains(h)).collect();
                    let h0 = extra[0];
                    let v = flat
                        .dirs
                        .iter()
                        .find(|d| !dot_qq(&normals_q[h0], d).is_zero())
                        .expect("subflat has a transverse direction")
                        .clone();
                    let sub_cells = cells_in_flat.get(&(k - 1, gi)).cloned().unwrap_or_default();
                    for g in sub_cells {
                        let x = cells[g].witness.clone();
                        let gsign = cells[g].sign.clone();
                        // step size: half the distance to the nearest other wall or box face
                        let mut eps: Option<Q> = None;
                        let mut consider = |e: Q| {
                            if eps.as_ref().is_none_or(|c| e < *c) {
                                eps = Some(e);
                            }
                        };
                        for (j, hp) in hyperplanes.iter().enumerate() {
                            if gsign[j] == 0 {
                                continue;
                            }
                            let av = dot_qq(&normals_q[j], &v);
                            if av.is_zero() {
                                continue;
                            }
                            consider(hp.eval(&x).abs() / av.abs());
                        }
                        for i in 0..n {
                            if v[i].is_zero() {
                                continue;
                            }
                            let d = v[i].abs();
                            consider((&x[i] - &bbox.lo[i]) / &d);
                            consider((&bbox.hi[i] - &x[i]) / &d);
                        }
                        let eps = eps.expect("box bounds every direction") / q(2);
                        for dir in [1i64, -1] {
                            let mut s = gsign.clone();
                            for &h in &extra {
                                s[h] = sign_q(&(dot_qq(&normals_q[h], &v) * q(dir)));
                            }
                            let id = match index.get(&s) {
                                Some(&id) => id,
                                None => {
                                    let w: Vec<Q> = x.iter().zip(&v).map(|(xi, vi)| xi + &eps * q(dir) * vi).collect();
                                    debug_assert_eq!(sign_at(&w), s);
                                    let id = cells.len();
                                    index.insert(s.clone(), id);
                                    cells.push(Cell { sign: s, dim: k, witness: w, basis: cell_basis(&flat.zero) });
                                    mine.push(id);
                                    id
                                }
                            };
                            cover_pairs.push((g, id));
                        }
                    }
                }
                if mine.is_empty() {
                    let w = box_points[&(k, fi)].clone();
                    let s = sign_at(&w);
                    let id = cells.len();
                    index.insert(s.clone(), id);
                    cells.push(Cell { sign: s, dim: k, witness: w, basis: cell_basis(&flat.zero) });
                    mine.push(id);
                }
                cells_in_flat.insert((k, fi), mine);
            }
        }

        cover_pairs.sort();
        cover_pairs.dedup();
        let nc = cells.len();
        let mut up = vec![Vec::new(); nc];
        let mut down = vec![Vec::new(); nc];
        for &(c, d) in &cover_pairs {
            let inc = incidence(&cells[c], &cells[d]);
            up[c].push((d, inc));
            down[d].push((c, inc));
        }
        let mut star = vec![Vec::new(); nc];
        for c in 0..nc {
            let mut seen = vec![false; nc];
            let mut queue = VecDeque::from([c]);
            seen[c] = true;
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &up[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            star[c] = (0..nc).filter(|&i| seen[i]).collect();
        }
        Ok(Self { dim: n, hyperplanes, bbox, cells, index, up, down, star, id: NEXT_ID.fetch_add(1, Ordering::Relaxed) })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn same_as(&self, other: &Arrangement) -> bool {
        self.id == other.id || (self.hyperplanes == other.hyperplanes && self.bbox == other.bbox)
    }

    pub fn cell_index(&self, sign: &[i8]) -> Option<usize> {
        self.index.get(sign).copied()
    }

    pub fn sign_of(&self, x: &[Q]) -> Vec<i8> {
        self.hyperplanes.iter().map(|h| sign_q(&h.eval(x))).collect()
    }

    /// The cell containing a point of the open box.
    pub fn locate(&self, x: &[Q]) -> Result<usize> {
        if x.len() != self.dim || !self.bbox.contains(x) {
            return Err(Error::PointOnBoxBoundary(fmt_qvec(x)));
        }
        let s = self.sign_of(x);
        self.cell_index(&s).ok_or_else(|| Error::Invalid(format!("no cell with sign vector {s:?}")))
    }

    pub fn hyperplane_index(&self, h: &Hyperplane) -> Option<usize> {
        self.hyperplanes.binary_search(h).ok()
    }

    pub fn leq(&self, c: usize, d: usize) -> bool {
        sign_leq(&self.cells[c].sign, &self.cells[d].sign)
    }

    /// Number of cells by dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim + 1];
        for c in &self.cells {
            f[c.dim] += 1;
        }
        f
    }
}

/// Boundary orientation: [c:d] is the sign of det(ν_out, basis(c)) in the
/// basis of d, where ν_out points from d towards c.
fn incidence(c: &Cell, d: &Cell) -> i8 {
    let n = c.witness.len();
    let nu: Vec<Q> = (0..n).map(|i| &c.witness[i] - &d.witness[i]).collect();
    let mut cols: Vec<Vec<Q>> = vec![nu];
    cols.extend(c.basis.iter().cloned());
    let bd = &d.basis;
    let k = bd.len();
    // rows on which the basis of d is invertible
    let mut rows: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut trial = rows.clone();
        trial.push(i);
        let sub: Vec<Vec<Q>> = trial.iter().map(|&r| bd.iter().map(|b| b[r].clone()).collect()).collect();
        if rank_q(&sub) == trial.len() {
            rows = trial;
        }
        if rows.len() == k {
            break;
        }
    }
    let restrict = |vs: &[Vec<Q>]| -> Vec<Vec<Q>> { rows.iter().map(|&r| vs.iter().map(|v| v[r].clone()).collect()).collect() };
    let a = det_q(&restrict(&cols));
    let b = det_q(&restrict(bd));
    let s = sign_q(&a) * sign_q(&b);
    debug_assert!(s != 0);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn two_lines_in_square() {
        let a = Arrangement::new(&[(vec![1, 0], q(0)), (vec![0, 1], q(0))], BoxDomain::cube(2, q(1))).unwrap();
        assert_eq!(a.f_vector(), vec![1, 4, 4]);
    }

    #[test]
    fn empty_arrangement() {
        let a = Arrangement::new(&[], BoxDomain::cube(3, q(2))).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a.cells[0].dim, 3);
    }

    #[test]
    fn degenerate_box() {
        let b = BoxDomain { lo: vec![q(0), q(1)], hi: vec![q(1), q(1)] };
        assert!(matches!(Arrangement::new(&[], b), Err(Error::DegenerateBox(_))));
    }

    #[test]
    fn interval_incidences() {
        let a = Arrangement::new(&[(vec![1], q(0))], BoxDomain::cube(1, q(1))).unwrap();
        let v = a.locate(&[q(0)]).unwrap();
        let r = a.locate(&[qr(1, 2)]).unwrap();
        let l = a.locate(&[qr(-1, 2)]).unwrap();
        let inc = |d| a.up[v].iter().find(|(x, _)| *x == d).unwrap().1;
        assert_eq!(inc(r), -1);
        assert_eq!(inc(l), 1);
    }

    #[test]
    fn boundary_squares_to_zero() {
        let a = Arrangement::new(
            &[(vec![1, 0, 0], q(0)), (vec![0, 1, 0], q(0)), (vec![1, 1, 1], q(1)), (vec![1, -1, 0], qr(1, 2))],
            BoxDomain::cube(3, q(3)),
        )
        .unwrap();
        for c in 0..a.len() {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for &(d, i1) in &a.up[c] {
                for &(e, i2) in &a.up[d] {
                    *acc.entry(e).or_default() += i64::from(i1 * i2);
                }
            }
            assert!(acc.values().all(|&v| v == 0));
        }
    }

    #[test]
    fn lines_outside_box_are_ignored() {
        let a = Arrangement::new(&[(vec![1, 0], q(5))], BoxDomain::cube(2, q(1))).unwrap();
        assert_eq!(a.len(), 1);
        assert!(matches!(a.locate(&[q(1), q(0)]), Err(Error::PointOnBoxBoundary(_))));
    }
}
