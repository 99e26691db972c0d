//! Exact linear algebra over ℚ, plus a sparse rank routine tuned for the
//! small-integer matrices produced by cellular Hom complexes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type Z = BigInt;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-1/2"` or `"0.5"` style literals into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Q::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int == "-" || int.is_empty() { BigInt::zero() } else { int.parse().ok()? };
        let digits: BigInt = if frac.is_empty() { BigInt::zero() } else { frac.parse().ok()? };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_q = Q::new(digits, scale);
        let base = Q::from_integer(int_part.abs());
        let v = base + frac_q;
        return Some(if neg { -v } else { v });
    }
    let a: BigInt = s.parse().ok()?;
    Some(Q::from_integer(a))
}

/// `"a"` for integers, `"a/b"` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_qvec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_q).collect();
    format!("({})", parts.join(", "))
}

pub fn to_qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn dot_iq(a: &[i64], x: &[Q]) -> Q {
    let mut s = Q::zero();
    for (ai, xi) in a.iter().zip(x) {
        if *ai != 0 {
            s += xi * Q::from_integer(BigInt::from(*ai));
        }
    }
    s
}

pub fn dot_qq(a: &[Q], x: &[Q]) -> Q {
    let mut s = Q::zero();
    for (ai, xi) in a.iter().zip(x) {
        if !ai.is_zero() {
            s += ai * xi;
        }
    }
    s
}

pub fn dot_ii(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sign_q(x: &Q) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (pivot_row, other) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in other.iter_mut().zip(pivot_row.iter()) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(m: &[Vec<Q>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of {x : m·x = 0} for an r×n matrix.
pub fn nullspace(m: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Q::zero(); n];
        v[f] = Q::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -a[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Integer nullspace basis for an integer matrix (rational basis scaled to
/// primitive integer vectors; not necessarily a lattice basis).
pub fn nullspace_int(m: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let mq: Vec<Vec<Q>> = m.iter().map(|r| to_qvec(r)).collect();
    nullspace(&mq, n).into_iter().map(|v| primitive_from_q(&v)).collect()
}

/// Clears denominators and divides by the content.
pub fn primitive_from_q(v: &[Q]) -> Vec<i64> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return vec![0; v.len()];
    }
    ints.iter().map(|x| (x / &g).to_i64().expect("coordinate fits in i64")).collect()
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g.abs()).collect()
    }
}

/// Solves m·x = b (m r×n) if consistent, returning one solution.
pub fn solve(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = m.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][n].clone();
    }
    Some(x)
}

pub fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &piv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    det
}

pub fn inverse_q(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Rank of a sparse integer matrix over ℚ. Rows are lists of `(column, value)`.
///
/// Elimination runs on primitive integer rows with checked `i128` arithmetic
/// and restarts with big integers if anything overflows, so the answer is
/// always exact.
pub fn sparse_rank(rows: &[Vec<(usize, i64)>]) -> usize {
    match sparse_rank_i128(rows) {
        Some(r) => r,
        None => sparse_rank_big(rows),
    }
}

fn normalize_row_i128(row: &mut Vec<(usize, i128)>) {
    row.retain(|e| e.1 != 0);
    let g = row.iter().fold(0i128, |g, e| g.gcd(&e.1));
    if g > 1 {
        for e in row.iter_mut() {
            e.1 /= g;
        }
    }
}

fn sparse_rank_i128(rows: &[Vec<(usize, i64)>]) -> Option<usize> {
    use std::collections::HashMap;
    // pivot column -> reduced row with that leading column
    let mut pivots: HashMap<usize, Vec<(usize, i128)>> = HashMap::new();
    for r in rows {
        let mut row: Vec<(usize, i128)> = r.iter().map(|&(c, v)| (c, v as i128)).collect();
        row.sort_by_key(|e| e.0);
        merge_dups_i128(&mut row);
        normalize_row_i128(&mut row);
        loop {
            let Some(&(lead, lv)) = row.first() else { break };
            let Some(p) = pivots.get(&lead) else {
                pivots.insert(lead, row);
                break;
            };
            let pv = p[0].1;
            let g = pv.gcd(&lv);
            let (fa, fb) = (pv / g, lv / g);
            // new = fa*row - fb*p
            let mut out: Vec<(usize, i128)> = Vec::with_capacity(row.len() + p.len());
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < p.len() {
                let take_row = j >= p.len() || (i < row.len() && row[i].0 < p[j].0);
                let take_p = i >= row.len() || (j < p.len() && p[j].0 < row[i].0);
                if take_row {
                    out.push((row[i].0, fa.checked_mul(row[i].1)?));
                    i += 1;
                } else if take_p {
                    out.push((p[j].0, fb.checked_mul(p[j].1)?.checked_neg()?));
                    j += 1;
                } else {
                    let v = fa.checked_mul(row[i].1)?.checked_sub(fb.checked_mul(p[j].1)?)?;
                    out.push((row[i].0, v));
                    i += 1;
                    j += 1;
                }
            }
            normalize_row_i128(&mut out);
            row = out;
        }
    }
    Some(pivots.len())
}

fn merge_dups_i128(row: &mut Vec<(usize, i128)>) {
    let mut out: Vec<(usize, i128)> = Vec::with_capacity(row.len());
    for &(c, v) in row.iter() {
        if let Some(last) = out.last_mut() {
            if last.0 == c {
                last.1 += v;
                continue;
            }
        }
        out.push((c, v));
    }
    *row = out;
}

fn sparse_rank_big(rows: &[Vec<(usize, i64)>]) -> usize {
    use std::collections::BTreeMap;
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    for r in rows {
        let mut row: BTreeMap<usize, BigInt> = BTreeMap::new();
        for &(c, v) in r {
            *row.entry(c).or_insert_with(BigInt::zero) += BigInt::from(v);
        }
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, lv)) = row.iter().next() else { break };
            let lv = lv.clone();
            let Some(p) = pivots.get(&lead) else {
                pivots.insert(lead, row);
                break;
            };
            let pv = p[&lead].clone();
            let g = pv.gcd(&lv);
            let (fa, fb) = (&pv / &g, &lv / &g);
            let mut out: BTreeMap<usize, BigInt> = row.iter().map(|(c, v)| (*c, v * &fa)).collect();
            for (c, v) in p {
                *out.entry(*c).or_insert_with(BigInt::zero) -= v * &fb;
            }
            out.retain(|_, v| !v.is_zero());
            let g = out.values().fold(BigInt::zero(), |g, v| g.gcd(v));
            if g > BigInt::one() {
                for v in out.values_mut() {
                    *v = &*v / &g;
                }
            }
            row = out;
        }
    }
    pivots.len()
}

/// Rank over ℚ of a dense rational matrix given as sparse rows with rational entries.
pub fn sparse_rank_q(rows: &[Vec<(usize, Q)>]) -> usize {
    // scale each row to integers; fall back to the dense path if entries are huge
    let mut int_rows = Vec::with_capacity(rows.len());
    for r in rows {
        let mut l = BigInt::one();
        for (_, v) in r {
            l = l.lcm(v.denom());
        }
        let mut out = Vec::with_capacity(r.len());
        for (c, v) in r {
            let x = (v * Q::from_integer(l.clone())).to_integer();
            match x.to_i64() {
                Some(x) => out.push((*c, x)),
                None => return dense_rank_of_sparse(rows),
            }
        }
        int_rows.push(out);
    }
    sparse_rank(&int_rows)
}

fn dense_rank_of_sparse(rows: &[Vec<(usize, Q)>]) -> usize {
    let cols = rows.iter().flat_map(|r| r.iter().map(|e| e.0 + 1)).max().unwrap_or(0);
    let m: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![Q::zero(); cols];
            for (c, x) in r {
                v[*c] += x;
            }
            v
        })
        .collect();
    rank_q(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-1/2").unwrap(), qr(-1, 2));
        assert_eq!(parse_q("0.5").unwrap(), qr(1, 2));
        assert_eq!(parse_q("-0.25").unwrap(), qr(-1, 4));
        assert_eq!(fmt_q(&qr(3, 6)), "1/2");
        assert_eq!(fmt_q(&q(-4)), "-4");
        assert!(parse_q("1/0").is_none());
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let rows = vec![vec![(0, 1), (1, 2)], vec![(0, 2), (1, 4)], vec![(2, 3)], vec![(0, 1), (2, -1)]];
        let dense: Vec<Vec<Q>> =
            vec![vec![q(1), q(2), q(0)], vec![q(2), q(4), q(0)], vec![q(0), q(0), q(3)], vec![q(1), q(0), q(-1)]];
        assert_eq!(sparse_rank(&rows), rank_q(&dense));
        assert_eq!(sparse_rank_big(&rows), 3);
    }

    #[test]
    fn nullspace_and_solve() {
        let m = vec![vec![q(1), q(1), q(1)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot_qq(&m[0], v).is_zero());
        }
        let x = solve(&[vec![q(2), q(0)], vec![q(0), q(4)]], &[q(1), q(1)]).unwrap();
        assert_eq!(x, vec![qr(1, 2), qr(1, 4)]);
        assert_eq!(det_q(&[vec![q(1), q(2)], vec![q(3), q(4)]]), q(-2));
    }
}
