//! Cellular sheaves on arrangements, indicator complexes of polyhedral
//! regions, shifts, mapping cones and pullbacks.

use std::collections::HashMap;
use std::sync::Arc;

use crate::arrangement::{Arrangement, BoxDomain, Hyperplane};
use crate::error::{Error, Result};
use crate::linalg::{dot_iq, fmt_q, sparse_rank, Q};

/// Sparse matrix entries `(row, column, value)`.
pub type Entries = Vec<(usize, usize, i64)>;

/// One inequality ⟨a, x⟩ ≥ b, or ⟨a, x⟩ > b when strict.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    pub covector: Vec<i64>,
    pub bound: Q,
    pub strict: bool,
}

impl HalfSpace {
    pub fn geq(covector: Vec<i64>, bound: Q) -> Self {
        Self { covector, bound, strict: false }
    }

    pub fn gt(covector: Vec<i64>, bound: Q) -> Self {
        Self { covector, bound, strict: true }
    }

    /// ⟨a, x⟩ ≤ b.
    pub fn leq(covector: Vec<i64>, bound: Q) -> Self {
        Self::geq(covector.iter().map(|v| -v).collect(), -bound)
    }

    /// ⟨a, x⟩ < b.
    pub fn lt(covector: Vec<i64>, bound: Q) -> Self {
        Self::gt(covector.iter().map(|v| -v).collect(), -bound)
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let v = dot_iq(&self.covector, x);
        if self.strict {
            v > self.bound
        } else {
            v >= self.bound
        }
    }

    fn describe(&self) -> String {
        format!("{:?}·x {} {}", self.covector, if self.strict { ">" } else { "≥" }, fmt_q(&self.bound))
    }
}

/// A locally closed polyhedral region: an intersection of half-spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Region {
    pub constraints: Vec<HalfSpace>,
}

impl Region {
    pub fn new(constraints: Vec<HalfSpace>) -> Self {
        Self { constraints }
    }

    /// The whole space.
    pub fn everything() -> Self {
        Self::default()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.constraints.iter().all(|h| h.holds(x))
    }

    /// The region moved by `t`.
    pub fn translate(&self, t: &[Q]) -> Region {
        Region {
            constraints: self
                .constraints
                .iter()
                .map(|h| HalfSpace { covector: h.covector.clone(), bound: &h.bound + dot_iq(&h.covector, t), strict: h.strict })
                .collect(),
        }
    }

    pub fn hyperplanes(&self) -> Vec<(Vec<i64>, Q)> {
        self.constraints.iter().map(|h| (h.covector.clone(), h.bound.clone())).collect()
    }

    /// Membership of every cell, read off from sign vectors. Fails if a
    /// facet is not a hyperplane of the arrangement.
    pub fn cells(&self, arr: &Arrangement) -> Result<Vec<bool>> {
        let mut located = Vec::with_capacity(self.constraints.len());
        for h in &self.constraints {
            let (hp, s) = Hyperplane::normalized(&h.covector, &h.bound)?;
            let idx = arr.hyperplane_index(&hp).ok_or_else(|| Error::NotSubordinate { facet: h.describe() })?;
            located.push((idx, s, h.strict));
        }
        Ok(arr
            .cells
            .iter()
            .map(|c| {
                located.iter().all(|&(i, s, strict)| {
                    let v = c.sign[i] * s;
                    if strict {
                        v > 0
                    } else {
                        v >= 0
                    }
                })
            })
            .collect())
    }
}

/// A bounded complex of indicator sheaves ℂ_R placed in given degrees, with
/// differentials between terms given by scalars.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndicatorComplex {
    pub terms: Vec<(Region, i32)>,
    /// `(from, to, coefficient)`, from a term of degree k to one of degree k+1.
    pub diffs: Vec<(usize, usize, i64)>,
}

impl IndicatorComplex {
    pub fn single(region: Region, degree: i32) -> Self {
        Self { terms: vec![(region, degree)], diffs: Vec::new() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn hyperplanes(&self) -> Vec<(Vec<i64>, Q)> {
        self.terms.iter().flat_map(|(r, _)| r.hyperplanes()).collect()
    }

    pub fn translate(&self, t: &[Q]) -> Self {
        Self { terms: self.terms.iter().map(|(r, d)| (r.translate(t), *d)).collect(), diffs: self.diffs.clone() }
    }

    /// F[k]: degrees drop by k and differentials pick up (−1)^k.
    pub fn shift(&self, k: i32) -> Self {
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        Self {
            terms: self.terms.iter().map(|(r, d)| (r.clone(), d - k)).collect(),
            diffs: self.diffs.iter().map(|&(a, b, c)| (a, b, c * s)).collect(),
        }
    }

    /// Cone of the map `phi: self → other` given by `(term of self, term of
    /// other, coefficient)`: terms self[1] ⊕ other.
    pub fn cone(&self, other: &IndicatorComplex, phi: &[(usize, usize, i64)]) -> Self {
        let off = self.terms.len();
        let mut terms: Vec<(Region, i32)> = self.terms.iter().map(|(r, d)| (r.clone(), d - 1)).collect();
        terms.extend(other.terms.iter().cloned());
        let mut diffs: Vec<(usize, usize, i64)> = self.diffs.iter().map(|&(a, b, c)| (a, b, -c)).collect();
        diffs.extend(phi.iter().map(|&(a, b, c)| (a, b + off, c)));
        diffs.extend(other.diffs.iter().map(|&(a, b, c)| (a + off, b + off, c)));
        Self { terms, diffs }
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &IndicatorComplex) -> Self {
        let off = self.terms.len();
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let mut diffs = self.diffs.clone();
        diffs.extend(other.diffs.iter().map(|&(a, b, c)| (a + off, b + off, c)));
        Self { terms, diffs }
    }

    /// The cellular sheaf on `arr`.
    pub fn to_sheaf(&self, arr: &Arc<Arrangement>) -> Result<CellSheaf> {
        for &(a, b, _) in &self.diffs {
            if a >= self.terms.len() || b >= self.terms.len() {
                return Err(Error::Invalid(format!("differential {a} → {b} refers to a missing term")));
            }
            if self.terms[b].1 != self.terms[a].1 + 1 {
                return Err(Error::Invalid(format!("differential {a} → {b} does not raise the degree by one")));
            }
        }
        let member: Vec<Vec<bool>> = self.terms.iter().map(|(r, _)| r.cells(arr)).collect::<Result<_>>()?;
        let nc = arr.len();
        // local index of each term at each cell
        let mut local: Vec<HashMap<usize, usize>> = vec![HashMap::new(); nc];
        let mut stalks = Vec::with_capacity(nc);
        for c in 0..nc {
            let mut degrees = Vec::new();
            for (k, m) in member.iter().enumerate() {
                if m[c] {
                    local[c].insert(k, degrees.len());
                    degrees.push(self.terms[k].1);
                }
            }
            let d: Entries =
                self.diffs.iter().filter_map(|&(a, b, v)| Some((*local[c].get(&b)?, *local[c].get(&a)?, v))).collect();
            stalks.push(Stalk { degrees, d });
        }
        for c in 0..nc {
            for &(c2, _) in &arr.up[c] {
                for &(a, b, _) in &self.diffs {
                    if member[a][c] && member[b][c2] && member[b][c] != member[a][c2] {
                        return Err(Error::NotASheafMap(format!(
                            "term {a} → {b} does not commute with restriction between cells {c} and {c2}"
                        )));
                    }
                }
            }
        }
        let up_maps = (0..nc)
            .map(|c| {
                arr.up[c]
                    .iter()
                    .map(|&(c2, _)| local[c].iter().filter_map(|(k, &i)| local[c2].get(k).map(|&j| (j, i, 1))).collect())
                    .collect()
            })
            .collect();
        CellSheaf::new(arr.clone(), stalks, up_maps)
    }
}

/// The smallest arrangement in `bbox` on which all the given complexes are
/// constructible.
pub fn common_arrangement(complexes: &[&IndicatorComplex], bbox: BoxDomain) -> Result<Arc<Arrangement>> {
    let hs: Vec<(Vec<i64>, Q)> = complexes.iter().flat_map(|c| c.hyperplanes()).collect();
    Ok(Arc::new(Arrangement::new(&hs, bbox)?))
}

/// A finite-dimensional graded vector space with a differential.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Stalk {
    pub degrees: Vec<i32>,
    pub d: Entries,
}

impl Stalk {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Total dimension of the cohomology.
    pub fn cohomology_dim(&self) -> usize {
        self.dim() - 2 * entries_rank(&self.d)
    }

    /// Cohomology dimension in each degree, as sorted `(degree, dim)` pairs.
    pub fn cohomology(&self) -> Vec<(i32, usize)> {
        let mut degs: Vec<i32> = self.degrees.clone();
        degs.sort();
        degs.dedup();
        let rank_from = |k: i32| -> usize {
            let e: Entries = self.d.iter().copied().filter(|&(_, c, _)| self.degrees[c] == k).collect();
            entries_rank(&e)
        };
        degs.iter()
            .map(|&k| {
                let n = self.degrees.iter().filter(|&&x| x == k).count();
                (k, n - rank_from(k) - rank_from(k - 1))
            })
            .filter(|&(_, n)| n > 0)
            .collect()
    }
}

pub fn entries_rank(e: &Entries) -> usize {
    let mut rows: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for &(r, c, v) in e {
        if v != 0 {
            rows.entry(r).or_default().push((c, v));
        }
    }
    let rows: Vec<Vec<(usize, i64)>> = rows.into_values().collect();
    sparse_rank(&rows)
}

fn dense(e: &Entries, rows: usize, cols: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; cols]; rows];
    for &(r, c, v) in e {
        m[r][c] += v;
    }
    m
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>], inner: usize, cols: usize) -> Vec<Vec<i64>> {
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

fn sparse(m: &[Vec<i64>]) -> Entries {
    let mut e = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0 {
                e.push((i, j, v));
            }
        }
    }
    e
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// A functor from the face poset of an arrangement to bounded complexes:
/// a stalk complex per cell and a restriction (chain map) per cover c ⋖ c'.
#[derive(Debug, Clone)]
pub struct CellSheaf {
    pub arr: Arc<Arrangement>,
    pub stalks: Vec<Stalk>,
    /// `up_maps[c][k]` is the map F(c) → F(c') for the k-th cover in `arr.up[c]`.
    pub up_maps: Vec<Vec<Entries>>,
}

impl CellSheaf {
    /// Validates degrees, d² = 0, chain maps and commutativity of diamonds.
    pub fn new(arr: Arc<Arrangement>, stalks: Vec<Stalk>, up_maps: Vec<Vec<Entries>>) -> Result<Self> {
        let nc = arr.len();
        if stalks.len() != nc || up_maps.len() != nc {
            return Err(Error::Invalid("wrong number of stalks".into()));
        }
        for (c, s) in stalks.iter().enumerate() {
            let n = s.dim();
            let d = dense(&s.d, n, n);
            for &(r, col, v) in &s.d {
                if v != 0 && s.degrees[r] != s.degrees[col] + 1 {
                    return Err(Error::Invalid(format!("differential at cell {c} does not have degree one")));
                }
            }
            if matmul(&d, &d, n, n).iter().flatten().any(|&x| x != 0) {
                return Err(Error::Invalid(format!("d² ≠ 0 at cell {c}")));
            }
        }
        for c in 0..nc {
            if up_maps[c].len() != arr.up[c].len() {
                return Err(Error::Invalid(format!("cell {c} needs one map per cover")));
            }
            let n = stalks[c].dim();
            let dc = dense(&stalks[c].d, n, n);
            for (k, &(c2, _)) in arr.up[c].iter().enumerate() {
                let n2 = stalks[c2].dim();
                for &(r, col, v) in &up_maps[c][k] {
                    if r >= n2 || col >= n {
                        return Err(Error::Invalid(format!("restriction {c} → {c2} is out of range")));
                    }
                    if v != 0 && stalks[c2].degrees[r] != stalks[c].degrees[col] {
                        return Err(Error::Invalid(format!("restriction {c} → {c2} does not preserve degree")));
                    }
                }
                let rho = dense(&up_maps[c][k], n2, n);
                let d2 = dense(&stalks[c2].d, n2, n2);
                if matmul(&d2, &rho, n2, n) != matmul(&rho, &dc, n, n) {
                    return Err(Error::NotASheafMap(format!("restriction {c} → {c2} is not a chain map")));
                }
            }
        }
        let sheaf = Self { arr, stalks, up_maps };
        sheaf.check_diamonds()?;
        Ok(sheaf)
    }

    fn check_diamonds(&self) -> Result<()> {
        let arr = &self.arr;
        for c in 0..arr.len() {
            let n = self.stalks[c].dim();
            let mut by_top: HashMap<usize, Vec<Vec<Vec<i64>>>> = HashMap::new();
            for (k, &(d, _)) in arr.up[c].iter().enumerate() {
                let nd = self.stalks[d].dim();
                let first = dense(&self.up_maps[c][k], nd, n);
                for (j, &(f, _)) in arr.up[d].iter().enumerate() {
                    let nf = self.stalks[f].dim();
                    let second = dense(&self.up_maps[d][j], nf, nd);
                    by_top.entry(f).or_default().push(matmul(&second, &first, nd, n));
                }
            }
            for (f, paths) in by_top {
                if paths.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::NotASheafMap(format!("restrictions from cell {c} to cell {f} disagree")));
                }
            }
        }
        Ok(())
    }

    /// The restriction F(c) → F(c2) for c ≤ c2, as a dense matrix.
    pub fn restriction(&self, c: usize, c2: usize) -> Vec<Vec<i64>> {
        if c == c2 {
            return identity(self.stalks[c].dim());
        }
        let (k, &(d, _)) =
            self.arr.up[c].iter().enumerate().find(|(_, &(d, _))| self.arr.leq(d, c2)).expect("c ≤ c2 in the face poset");
        let n = self.stalks[c].dim();
        let nd = self.stalks[d].dim();
        let first = dense(&self.up_maps[c][k], nd, n);
        let rest = self.restriction(d, c2);
        matmul(&rest, &first, nd, n)
    }

    /// Pullback along an order-preserving map from the cells of `target` to
    /// the cells of `self.arr`.
    pub fn pullback(&self, target: Arc<Arrangement>, cell_map: &[usize]) -> Result<CellSheaf> {
        if cell_map.len() != target.len() {
            return Err(Error::Invalid("cell map has the wrong length".into()));
        }
        let stalks: Vec<Stalk> = cell_map.iter().map(|&c| self.stalks[c].clone()).collect();
        let mut up_maps = Vec::with_capacity(target.len());
        for c in 0..target.len() {
            let mut maps = Vec::new();
            for &(c2, _) in &target.up[c] {
                let (a, b) = (cell_map[c], cell_map[c2]);
                if !self.arr.leq(a, b) {
                    return Err(Error::NotARefinement(format!("cell map does not preserve order at {c} ⋖ {c2}")));
                }
                maps.push(sparse(&self.restriction(a, b)));
            }
            up_maps.push(maps);
        }
        CellSheaf::new(target, stalks, up_maps)
    }

    /// Pullback to a finer arrangement on a box inside the current one.
    pub fn refine(&self, finer: Arc<Arrangement>) -> Result<CellSheaf> {
        for h in &self.arr.hyperplanes {
            if finer.hyperplane_index(h).is_none() {
                return Err(Error::NotARefinement(format!("hyperplane {:?} = {} is missing", h.normal, fmt_q(&h.offset))));
            }
        }
        let mut map = Vec::with_capacity(finer.len());
        for cell in &finer.cells {
            map.push(self.arr.locate(&cell.witness).map_err(|_| Error::NotARefinement("box is not contained".into()))?);
        }
        self.pullback(finer, &map)
    }

    /// F[k].
    pub fn shift(&self, k: i32) -> CellSheaf {
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        let stalks = self
            .stalks
            .iter()
            .map(|st| Stalk {
                degrees: st.degrees.iter().map(|d| d - k).collect(),
                d: st.d.iter().map(|&(r, c, v)| (r, c, v * s)).collect(),
            })
            .collect();
        CellSheaf { arr: self.arr.clone(), stalks, up_maps: self.up_maps.clone() }
    }

    /// Cone of a sheaf map given by one matrix F(c) → G(c) per cell.
    pub fn cone(&self, other: &CellSheaf, phi: &[Entries]) -> Result<CellSheaf> {
        if !self.arr.same_as(&other.arr) {
            return Err(Error::ArrangementMismatch);
        }
        let nc = self.arr.len();
        let mut stalks = Vec::with_capacity(nc);
        for c in 0..nc {
            let (f, g) = (&self.stalks[c], &other.stalks[c]);
            let off = f.dim();
            let mut degrees: Vec<i32> = f.degrees.iter().map(|d| d - 1).collect();
            degrees.extend(g.degrees.iter().copied());
            let mut d: Entries = f.d.iter().map(|&(r, col, v)| (r, col, -v)).collect();
            d.extend(phi[c].iter().map(|&(r, col, v)| (r + off, col, v)));
            d.extend(g.d.iter().map(|&(r, col, v)| (r + off, col + off, v)));
            stalks.push(Stalk { degrees, d });
        }
        let up_maps = (0..nc)
            .map(|c| {
                self.arr.up[c]
                    .iter()
                    .enumerate()
                    .map(|(k, &(c2, _))| {
                        let (o1, o2) = (self.stalks[c].dim(), self.stalks[c2].dim());
                        let mut e = self.up_maps[c][k].clone();
                        e.extend(other.up_maps[c][k].iter().map(|&(r, col, v)| (r + o2, col + o1, v)));
                        e
                    })
                    .collect()
            })
            .collect();
        CellSheaf::new(self.arr.clone(), stalks, up_maps)
    }

    /// The stalk complex at a point of the open box.
    pub fn stalk_at(&self, x: &[Q]) -> Result<&Stalk> {
        Ok(&self.stalks[self.arr.locate(x)?])
    }

    /// Is the restriction along the k-th cover of c a quasi-isomorphism?
    pub fn cover_is_qis(&self, c: usize, k: usize) -> bool {
        let c2 = self.arr.up[c][k].0;
        let (f, g) = (&self.stalks[c], &self.stalks[c2]);
        let off = f.dim();
        let mut d: Entries = f.d.iter().map(|&(r, col, v)| (r, col, -v)).collect();
        d.extend(self.up_maps[c][k].iter().map(|&(r, col, v)| (r + off, col, v)));
        d.extend(g.d.iter().map(|&(r, col, v)| (r + off, col + off, v)));
        f.dim() + g.dim() == 2 * entries_rank(&d)
    }

    pub fn is_zero(&self) -> bool {
        self.stalks.iter().all(|s| s.cohomology_dim() == 0)
    }
}

/// A closed half-space ⟨a,x⟩ ≥ b.
pub fn closed_half(a: Vec<i64>, b: Q) -> Region {
    Region::new(vec![HalfSpace::geq(a, b)])
}

/// An open half-space ⟨a,x⟩ > b.
pub fn open_half(a: Vec<i64>, b: Q) -> Region {
    Region::new(vec![HalfSpace::gt(a, b)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn line() -> Arc<Arrangement> {
        Arc::new(Arrangement::new(&[(vec![1], q(0))], BoxDomain::cube(1, q(2))).unwrap())
    }

    #[test]
    fn closed_to_open_is_not_a_map() {
        // ℂ_{x≥0} → ℂ_{x>0} is not a sheaf map at the origin
        let c = IndicatorComplex {
            terms: vec![(closed_half(vec![1], q(0)), 0), (open_half(vec![1], q(0)), 1)],
            diffs: vec![(0, 1, 1)],
        };
        assert!(matches!(c.to_sheaf(&line()), Err(Error::NotASheafMap(_))));
        // ℂ_{x>0} → ℂ_{x≥0} is not one either, but ℂ_ℝ → ℂ_{x≥0} is
        let ok =
            IndicatorComplex { terms: vec![(Region::everything(), 0), (closed_half(vec![1], q(0)), 1)], diffs: vec![(0, 1, 1)] };
        let f = ok.to_sheaf(&line()).unwrap();
        // cone is ℂ_{x<0}[−1]
        let x = f.stalk_at(&[q(-1)]).unwrap();
        assert_eq!(x.cohomology(), vec![(0, 1)]);
        assert_eq!(f.stalk_at(&[q(0)]).unwrap().cohomology_dim(), 0);
    }

    #[test]
    fn non_subordinate_region() {
        let r = closed_half(vec![1], q(1));
        assert!(matches!(r.cells(&line()), Err(Error::NotSubordinate { .. })));
    }

    #[test]
    fn shift_and_cone() {
        let arr = line();
        let f = IndicatorComplex::single(Region::everything(), 0).to_sheaf(&arr).unwrap();
        let g = f.shift(1);
        assert_eq!(g.stalks[0].degrees, vec![-1]);
        let phi: Vec<Entries> = (0..arr.len()).map(|_| vec![(0, 0, 1)]).collect();
        let c = f.cone(&f, &phi).unwrap();
        assert!(c.is_zero());
    }
}
