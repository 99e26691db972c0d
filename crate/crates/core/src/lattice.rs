//! Integer lattices, lattice maps, Smith and Hermite normal forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank_q, to_qvec};

/// A free abelian group ℤ^rank with a fixed ordered basis and a label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lattice {
    pub rank: usize,
    pub label: String,
}

impl Lattice {
    pub fn new(rank: usize, label: impl Into<String>) -> Self {
        Self { rank, label: label.into() }
    }

    /// The dual lattice; dualizing twice returns the original label.
    pub fn dual(&self) -> Self {
        let label = match self.label.strip_suffix('*') {
            Some(base) => base.to_string(),
            None => format!("{}*", self.label),
        };
        Self { rank: self.rank, label }
    }
}

/// A homomorphism between labelled lattices, stored as a target×source matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub source: Lattice,
    pub target: Lattice,
    pub matrix: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn new(source: Lattice, target: Lattice, matrix: Vec<Vec<i64>>) -> Result<Self> {
        if matrix.len() != target.rank || matrix.iter().any(|r| r.len() != source.rank) {
            return Err(Error::Invalid(format!("matrix shape does not match {}×{}", target.rank, source.rank)));
        }
        Ok(Self { source, target, matrix })
    }

    pub fn identity(l: &Lattice) -> Self {
        let matrix = (0..l.rank).map(|i| (0..l.rank).map(|j| i64::from(i == j)).collect()).collect();
        Self { source: l.clone(), target: l.clone(), matrix }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeMap) -> Result<LatticeMap> {
        if other.target != self.source {
            return Err(Error::Invalid(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source.label, self.target.label, other.source.label, other.target.label
            )));
        }
        let matrix = mat_mul(&self.matrix, &other.matrix);
        Ok(LatticeMap { source: other.source.clone(), target: self.target.clone(), matrix })
    }

    pub fn rank(&self) -> usize {
        let m: Vec<_> = self.matrix.iter().map(|r| to_qvec(r)).collect();
        rank_q(&m)
    }
}

/// A finite abelian group ⊕ ℤ/dᵢ with d₁ | d₂ | …, each dᵢ ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self { invariant_factors: Vec::new() }
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl std::fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

pub fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

type BigMat = Vec<Vec<BigInt>>;

fn to_big(m: &[Vec<i64>]) -> BigMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn to_small(m: &BigMat) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64().expect("entry exceeds i64")).collect()).collect()
}

fn big_identity(n: usize) -> BigMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Result of a Smith normal form computation: `u · m · v = d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub u: Vec<Vec<i64>>,
    pub d: Vec<Vec<i64>>,
    pub v: Vec<Vec<i64>>,
}

impl Snf {
    /// Nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<i64> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i]).filter(|&x| x != 0).collect()
    }
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(m: &[Vec<i64>]) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a = to_big(m);
    let mut u = big_identity(rows);
    let mut v = big_identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pick the smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        for r in v.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut changed = false;
            // clear column t
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let qt = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &qt);
                row_axpy(&mut u, i, t, &qt);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    changed = true;
                }
            }
            // clear row t
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let qt = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &qt);
                col_axpy(&mut v, j, t, &qt);
                if !a[t][j].is_zero() {
                    for r in a.iter_mut() {
                        r.swap(t, j);
                    }
                    for r in v.iter_mut() {
                        r.swap(t, j);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // enforce divisibility of the trailing block
            let piv = a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &piv).is_zero()));
            match bad {
                Some(i) => {
                    // add row i to row t, then redo
                    let one = -BigInt::one();
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    Snf { u: to_small(&u), d: to_small(&a), v: to_small(&v) }
}

/// row_i -= q * row_j
fn row_axpy(m: &mut BigMat, i: usize, j: usize, q: &BigInt) {
    let src = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(src.iter()) {
        *x -= q * y;
    }
}

/// col_i -= q * col_j
fn col_axpy(m: &mut BigMat, i: usize, j: usize, q: &BigInt) {
    for r in m.iter_mut() {
        let y = r[j].clone();
        r[i] -= q * y;
    }
}

/// Torsion of coker(f) for an injective f. Its order equals the size of the
/// kernel of the induced map of tori.
pub fn cokernel_torsion(f: &LatticeMap) -> Result<FiniteAbelianGroup> {
    let rank = f.rank();
    if rank < f.source.rank {
        return Err(Error::NonInjective { rank, source_rank: f.source.rank });
    }
    let snf = smith_normal_form(&f.matrix);
    let invariant_factors = snf.diagonal().into_iter().map(|d| d.unsigned_abs()).filter(|&d| d > 1).collect();
    Ok(FiniteAbelianGroup { invariant_factors })
}

/// The transpose map between dual lattices.
pub fn dual_map(f: &LatticeMap) -> LatticeMap {
    LatticeMap { source: f.target.dual(), target: f.source.dual(), matrix: transpose(&f.matrix) }
}

/// Lattice basis (as rows) of {x ∈ ℤⁿ : a·x = 0}, where `a` has `n` columns.
pub fn kernel_lattice(a: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    if a.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    }
    let snf = smith_normal_form(a);
    let r = snf.diagonal().len();
    (r..n).map(|j| snf.v.iter().map(|row| row[j]).collect()).collect()
}

/// Basis of the saturation span_ℚ(rows) ∩ ℤⁿ, in Hermite normal form.
pub fn saturate(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let ann = kernel_lattice(rows, n);
    let sat = kernel_lattice(&ann, n);
    hermite_normal_form(&sat)
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: nonzero
/// rows only, positive pivots, entries above each pivot reduced into [0, pivot).
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut a = to_big(rows);
    let mut r = 0;
    for c in 0..n {
        if r == a.len() {
            break;
        }
        loop {
            // find smallest nonzero in column c among rows r..
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if !a[i][c].is_zero() && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][c].is_zero() {
                    let qt = a[i][c].div_floor(&a[r][c]);
                    row_axpy(&mut a, i, r, &qt);
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let qt = a[i][c].div_floor(&a[r][c]);
                if !qt.is_zero() {
                    row_axpy(&mut a, i, r, &qt);
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    to_small(&a)
}

/// For a saturated basis `p` (rows) of a sublattice, rows `q` such that the
/// stacked matrix [p; q] is unimodular.
pub fn unimodular_completion(p: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    if p.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    }
    let snf = smith_normal_form(p);
    let vinv = inverse_unimodular(&snf.v);
    vinv[p.len()..].to_vec()
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mq: Vec<Vec<_>> = m.iter().map(|r| to_qvec(r)).collect();
    let inv = crate::linalg::inverse_q(&mq).expect("matrix is invertible");
    inv.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    assert!(x.is_integer(), "matrix is not unimodular");
                    x.to_integer().to_i64().expect("fits i64")
                })
                .collect()
        })
        .collect()
}

pub fn det_int(m: &[Vec<i64>]) -> i64 {
    let mq: Vec<Vec<_>> = m.iter().map(|r| to_qvec(r)).collect();
    crate::linalg::det_q(&mq).to_integer().to_i64().expect("fits i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &[Vec<i64>]) {
        let s = smith_normal_form(m);
        assert_eq!(mat_mul(&mat_mul(&s.u, m), &s.v), s.d);
        assert_eq!(det_int(&s.u).abs(), 1);
        assert_eq!(det_int(&s.v).abs(), 1);
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&[vec![1, 1], vec![0, 2]]);
        assert_eq!(s.d, vec![vec![1, 0], vec![0, 2]]);
        let s = smith_normal_form(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(s.diagonal(), vec![1, 1, 1]);
        let s = smith_normal_form(&[vec![0]]);
        assert_eq!(s.d, vec![vec![0]]);
        check_snf(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        check_snf(&[vec![6, 0], vec![0, 4]]);
    }

    #[test]
    fn torsion_examples() {
        let l = Lattice::new(2, "L");
        let n = Lattice::new(2, "N");
        let f = LatticeMap::new(l.clone(), n.clone(), vec![vec![1, 1], vec![0, 2]]).unwrap();
        assert_eq!(cokernel_torsion(&f).unwrap().invariant_factors, vec![2]);
        let id = LatticeMap::identity(&n);
        assert!(cokernel_torsion(&id).unwrap().is_trivial());
        let g = LatticeMap::new(l.clone(), n.clone(), vec![vec![1, 0], vec![0, 3]]).unwrap();
        assert_eq!(cokernel_torsion(&g).unwrap().invariant_factors, vec![3]);
        let bad = LatticeMap::new(l, n, vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert!(matches!(cokernel_torsion(&bad), Err(Error::NonInjective { .. })));
    }

    #[test]
    fn dual_is_transpose() {
        let f = LatticeMap::new(Lattice::new(2, "L"), Lattice::new(2, "N"), vec![vec![1, 1], vec![0, 2]]).unwrap();
        let d = dual_map(&f);
        assert_eq!(d.matrix, vec![vec![1, 0], vec![1, 2]]);
        assert_eq!(dual_map(&d), f);
        let row = LatticeMap::new(Lattice::new(3, "A"), Lattice::new(1, "B"), vec![vec![1, 2, 3]]).unwrap();
        assert_eq!(dual_map(&row).matrix, vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn kernels_and_hnf() {
        let k = kernel_lattice(&[vec![1, 1, 1]], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
        assert_eq!(hermite_normal_form(&[vec![0, 2], vec![1, 1]]), vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(saturate(&[vec![2, 2, 0]], 3), vec![vec![1, 1, 0]]);
        let p = vec![vec![1, 1, 1]];
        let q = unimodular_completion(&p, 3);
        let mut all = p.clone();
        all.extend(q);
        assert_eq!(det_int(&all).abs(), 1);
    }
}
