//! Derived Hom between cellular sheaves.
//!
//! The working complex pairs cells e ≤ c: C = ⊕ Hom(F(e), G(c)) shifted by
//! dim c − dim e, with differential built from the incidence numbers. A
//! bar-complex computation over strict chains serves as an independent check.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::linalg::sparse_rank;
use crate::sheaf::{CellSheaf, Entries, Stalk};

/// Dimensions of a graded vector space, by degree (zero entries omitted).
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct Graded(pub BTreeMap<i32, usize>);

impl Graded {
    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn euler(&self) -> i64 {
        self.0.iter().map(|(&k, &n)| if k.rem_euclid(2) == 0 { n as i64 } else { -(n as i64) }).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }

    pub fn get(&self, k: i32) -> usize {
        self.0.get(&k).copied().unwrap_or(0)
    }

    /// The single degree carrying everything, if the space is concentrated.
    pub fn concentrated(&self) -> Option<i32> {
        (self.0.len() == 1).then(|| *self.0.keys().next().expect("one key"))
    }

    pub fn from_pairs(pairs: &[(i32, usize)]) -> Self {
        Graded(pairs.iter().copied().filter(|p| p.1 > 0).collect())
    }
}

impl std::fmt::Display for Graded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, n)| format!("ℂ^{n}[{}]", -k)).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Cohomology of a cochain complex given by its basis degrees and, for each
/// basis vector, the image under the differential.
pub fn complex_cohomology(degrees: &[i32], images: &[Vec<(usize, i64)>]) -> Graded {
    let mut by_deg: BTreeMap<i32, Vec<Vec<(usize, i64)>>> = BTreeMap::new();
    let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
    for (i, &d) in degrees.iter().enumerate() {
        *dims.entry(d).or_default() += 1;
        let img: Vec<(usize, i64)> = images[i].iter().copied().filter(|e| e.1 != 0).collect();
        by_deg.entry(d).or_default().push(img);
    }
    let ranks: HashMap<i32, usize> = by_deg.iter().map(|(&d, rows)| (d, sparse_rank(rows))).collect();
    let out = dims
        .iter()
        .map(|(&d, &n)| (d, n - ranks.get(&d).copied().unwrap_or(0) - ranks.get(&(d - 1)).copied().unwrap_or(0)))
        .filter(|p| p.1 > 0)
        .collect();
    Graded(out)
}

fn by_col(e: &Entries) -> HashMap<usize, Vec<(usize, i64)>> {
    let mut m: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for &(r, c, v) in e {
        if v != 0 {
            m.entry(c).or_default().push((r, v));
        }
    }
    m
}

fn by_row(e: &Entries) -> HashMap<usize, Vec<(usize, i64)>> {
    let mut m: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for &(r, c, v) in e {
        if v != 0 {
            m.entry(r).or_default().push((c, v));
        }
    }
    m
}

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// RHom(F, G) for cellular sheaves on the same arrangement.
pub fn rhom(f: &CellSheaf, g: &CellSheaf) -> Result<Graded> {
    if !f.arr.same_as(&g.arr) {
        return Err(Error::ArrangementMismatch);
    }
    let arr = &f.arr;
    let nc = arr.len();
    // block offsets for pairs e ≤ c
    let mut offset: HashMap<(usize, usize), usize> = HashMap::new();
    let mut total = 0usize;
    for e in 0..nc {
        let nf = f.stalks[e].dim();
        if nf == 0 {
            continue;
        }
        for &c in &arr.star[e] {
            let ng = g.stalks[c].dim();
            if ng == 0 {
                continue;
            }
            offset.insert((e, c), total);
            total += nf * ng;
        }
    }
    let idx =
        |e: usize, c: usize, i: usize, j: usize| -> Option<usize> { offset.get(&(e, c)).map(|&o| o + i * g.stalks[c].dim() + j) };
    let g_d: Vec<_> = g.stalks.iter().map(|s| by_col(&s.d)).collect();
    let f_d: Vec<_> = f.stalks.iter().map(|s| by_row(&s.d)).collect();
    let g_up: Vec<Vec<_>> = g.up_maps.iter().map(|ms| ms.iter().map(by_col).collect()).collect();
    // F restrictions e' → e, keyed by the larger cell
    let mut f_down: Vec<Vec<(usize, i8, HashMap<usize, Vec<(usize, i64)>>)>> = vec![Vec::new(); nc];
    for e2 in 0..nc {
        for (k, &(e, inc)) in arr.up[e2].iter().enumerate() {
            f_down[e].push((e2, inc, by_row(&f.up_maps[e2][k])));
        }
    }
    let mut degrees = vec![0i32; total];
    let mut images: Vec<Vec<(usize, i64)>> = vec![Vec::new(); total];
    for (&(e, c), &o) in &offset {
        let (fs, gs) = (&f.stalks[e], &g.stalks[c]);
        let (de, dc) = (arr.cells[e].dim as i32, arr.cells[c].dim as i32);
        for i in 0..fs.dim() {
            for j in 0..gs.dim() {
                let me = o + i * gs.dim() + j;
                let t = gs.degrees[j] + dc - fs.degrees[i] - de;
                degrees[me] = t;
                let img = &mut images[me];
                if let Some(col) = g_d[c].get(&j) {
                    for &(k, v) in col {
                        img.push((idx(e, c, i, k).expect("block exists"), v));
                    }
                }
                for (n, &(c2, inc)) in arr.up[c].iter().enumerate() {
                    if let Some(col) = g_up[c][n].get(&j) {
                        for &(k, v) in col {
                            if let Some(t2) = idx(e, c2, i, k) {
                                img.push((t2, sign(gs.degrees[j]) * inc as i64 * v));
                            }
                        }
                    }
                }
                let s = -sign(t);
                if let Some(row) = f_d[e].get(&i) {
                    for &(i2, v) in row {
                        img.push((idx(e, c, i2, j).expect("block exists"), s * v));
                    }
                }
                for (e2, inc, rho) in &f_down[e] {
                    if let Some(row) = rho.get(&i) {
                        for &(i2, v) in row {
                            if let Some(t2) = idx(*e2, c, i2, j) {
                                let fd = f.stalks[*e2].degrees[i2];
                                img.push((t2, s * sign(fd) * *inc as i64 * v));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(complex_cohomology(&degrees, &images))
}

/// RHom(F, G) from the normalized bar complex over strict chains
/// c₀ < … < cₙ. Exponential in the length of chains; for testing.
pub fn rhom_bar(f: &CellSheaf, g: &CellSheaf) -> Result<Graded> {
    if !f.arr.same_as(&g.arr) {
        return Err(Error::ArrangementMismatch);
    }
    let arr = &f.arr;
    let nc = arr.len();
    let mut chains: Vec<Vec<usize>> = Vec::new();
    fn extend(arr: &Arrangement, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(chain.clone());
        let last = *chain.last().expect("nonempty chain");
        for &d in &arr.star[last] {
            if d != last {
                chain.push(d);
                extend(arr, chain, out);
                chain.pop();
            }
        }
    }
    for c in 0..nc {
        extend(arr, &mut vec![c], &mut chains);
    }
    let mut offset: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut total = 0;
    for ch in &chains {
        let n = f.stalks[ch[0]].dim() * g.stalks[*ch.last().expect("nonempty")].dim();
        if n > 0 {
            offset.insert(ch.clone(), total);
            total += n;
        }
    }
    let mut degrees = vec![0i32; total];
    let mut images: Vec<Vec<(usize, i64)>> = vec![Vec::new(); total];
    for (ch, &o) in &offset {
        let n = ch.len() as i32 - 1;
        let (c0, cn) = (ch[0], *ch.last().expect("nonempty"));
        let (fs, gs): (&Stalk, &Stalk) = (&f.stalks[c0], &g.stalks[cn]);
        let at = |chain: &[usize], i: usize, j: usize| -> Option<usize> {
            let ng = g.stalks[*chain.last().expect("nonempty")].dim();
            offset.get(chain).map(|&o| o + i * ng + j)
        };
        for i in 0..fs.dim() {
            for j in 0..gs.dim() {
                let me = o + i * gs.dim() + j;
                let hdeg = gs.degrees[j] - fs.degrees[i];
                degrees[me] = n + hdeg;
                let mut img = Vec::new();
                // append a larger cell
                for &b in &arr.star[cn] {
                    if b == cn {
                        continue;
                    }
                    let rho = g.restriction(cn, b);
                    let mut longer = ch.clone();
                    longer.push(b);
                    for (k, row) in rho.iter().enumerate() {
                        if row[j] != 0 {
                            if let Some(t) = at(&longer, i, k) {
                                img.push((t, row[j]));
                            }
                        }
                    }
                }
                // insert between consecutive cells
                for pos in 1..ch.len() {
                    let (lo, hi) = (ch[pos - 1], ch[pos]);
                    for &b in &arr.star[lo] {
                        if b != lo && b != hi && arr.leq(b, hi) {
                            let mut longer = ch.clone();
                            longer.insert(pos, b);
                            if let Some(t) = at(&longer, i, j) {
                                img.push((t, sign(pos as i32)));
                            }
                        }
                    }
                }
                // prepend a smaller cell
                for b in 0..nc {
                    if b != c0 && arr.leq(b, c0) {
                        let rho = f.restriction(b, c0);
                        let mut longer = vec![b];
                        longer.extend(ch.iter().copied());
                        for (i2, v) in rho[i].iter().enumerate() {
                            if *v != 0 {
                                if let Some(t) = at(&longer, i2, j) {
                                    img.push((t, sign(n + 1) * v));
                                }
                            }
                        }
                    }
                }
                // internal differential, twisted by (−1)^n
                let s = sign(n);
                for &(k, col, v) in &gs.d {
                    if col == j {
                        img.push((o + i * gs.dim() + k, s * v));
                    }
                }
                for &(row, i2, v) in &fs.d {
                    if row == i {
                        img.push((o + i2 * gs.dim() + j, -s * sign(hdeg) * v));
                    }
                }
                images[me] = img;
            }
        }
    }
    Ok(complex_cohomology(&degrees, &images))
}

/// The constant sheaf on an up-closed set of cells (an open subset).
pub fn constant_on(arr: &Arc<Arrangement>, cells: &[bool]) -> Result<CellSheaf> {
    let stalks: Vec<Stalk> =
        cells.iter().map(|&m| Stalk { degrees: if m { vec![0] } else { Vec::new() }, d: Vec::new() }).collect();
    let up_maps = (0..arr.len())
        .map(|c| arr.up[c].iter().map(|&(c2, _)| if cells[c] && cells[c2] { vec![(0, 0, 1)] } else { Vec::new() }).collect())
        .collect();
    CellSheaf::new(arr.clone(), stalks, up_maps)
}

/// RΓ(U; F) for an up-closed set of cells U.
pub fn sections(f: &CellSheaf, open: &[bool]) -> Result<Graded> {
    for c in 0..f.arr.len() {
        if open[c] && f.arr.up[c].iter().any(|&(d, _)| !open[d]) {
            return Err(Error::Invalid("set of cells is not open".into()));
        }
    }
    rhom(&constant_on(&f.arr, open)?, f)
}

/// RΓ of the whole box.
pub fn global_sections(f: &CellSheaf) -> Result<Graded> {
    sections(f, &vec![true; f.arr.len()])
}

pub fn stalk_cohomology(s: &Stalk) -> Graded {
    Graded::from_pairs(&s.cohomology())
}
