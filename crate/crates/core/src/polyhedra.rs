//! Fourier–Motzkin elimination over the rationals, with strict inequalities.

use num_traits::{Signed, Zero};

use crate::linalg::{q, Q};

/// `coeffs · x > rhs` when `strict`, otherwise `coeffs · x ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ineq {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
    pub strict: bool,
}

impl Ineq {
    pub fn new(coeffs: Vec<Q>, rhs: Q, strict: bool) -> Self {
        Self { coeffs, rhs, strict }
    }

    pub fn holds(&self, x: &[Q]) -> bool {
        let v: Q = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        if self.strict {
            v > self.rhs
        } else {
            v >= self.rhs
        }
    }

    /// Scale so the first nonzero coefficient has absolute value one.
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() {
            let s = lead.abs();
            for c in self.coeffs.iter_mut() {
                *c = &*c / &s;
            }
            self.rhs = &self.rhs / &s;
        }
        self
    }
}

/// Eliminate variable `k`, returning the projected system (variable `k` keeps
/// a zero coefficient so indices stay stable).
pub fn eliminate(system: &[Ineq], k: usize) -> Vec<Ineq> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for ineq in system {
        if ineq.coeffs[k].is_positive() {
            pos.push(ineq);
        } else if ineq.coeffs[k].is_negative() {
            neg.push(ineq);
        } else {
            out.push(ineq.clone());
        }
    }
    for p in &pos {
        for n in &neg {
            let sp = &p.coeffs[k];
            let sn = -&n.coeffs[k];
            let coeffs: Vec<Q> = p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| a / sp + b / &sn).collect();
            let rhs = &p.rhs / sp + &n.rhs / &sn;
            out.push(Ineq::new(coeffs, rhs, p.strict || n.strict).normalized());
        }
    }
    out.sort_by(|a, b| (&a.coeffs, &a.rhs, a.strict).cmp(&(&b.coeffs, &b.rhs, b.strict)));
    out.dedup();
    // drop a weak copy when the same strict inequality is present
    let strict: Vec<(Vec<Q>, Q)> = out.iter().filter(|i| i.strict).map(|i| (i.coeffs.clone(), i.rhs.clone())).collect();
    out.retain(|i| i.strict || !strict.contains(&(i.coeffs.clone(), i.rhs.clone())));
    out
}

/// A point satisfying every inequality, or `None` if the system is infeasible.
pub fn find_point(system: &[Ineq], n: usize) -> Option<Vec<Q>> {
    let mut stages = vec![system.to_vec()];
    for k in (0..n).rev() {
        let next = eliminate(stages.last().unwrap(), k);
        stages.push(next);
    }
    // all variables eliminated: constant constraints 0 ⋈ rhs
    for c in stages.last().unwrap() {
        let ok = if c.strict { c.rhs.is_negative() } else { !c.rhs.is_positive() };
        if !ok {
            return None;
        }
    }
    let mut x = vec![Q::zero(); n];
    // stages[j] involves variables 0..n-j; variable k = n-1-j is solved from stages[j]
    for k in 0..n {
        let sys = &stages[n - 1 - k];
        let mut lower: Option<(Q, bool)> = None;
        let mut upper: Option<(Q, bool)> = None;
        for c in sys {
            let a = &c.coeffs[k];
            if a.is_zero() {
                continue;
            }
            let rest: Q = (0..k).map(|j| &c.coeffs[j] * &x[j]).sum();
            let bound = (&c.rhs - rest) / a;
            if a.is_positive() {
                if lower.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && c.strict && !s)) {
                    lower = Some((bound, c.strict));
                }
            } else if upper.as_ref().is_none_or(|(u, s)| bound < *u || (bound == *u && c.strict && !s)) {
                upper = Some((bound, c.strict));
            }
        }
        x[k] = match (lower, upper) {
            (Some((l, _)), Some((u, _))) if l == u => l,
            (Some((l, _)), Some((u, _))) => (l + u) / q(2),
            (Some((l, _)), None) => l + q(1),
            (None, Some((u, _))) => u - q(1),
            (None, None) => Q::zero(),
        };
    }
    debug_assert!(system.iter().all(|c| c.holds(&x)));
    Some(x)
}

/// Generators λ ≥ 0 of x = Σ λᵢ gᵢ projected away: returns the implied
/// inequalities on x (an H-description of the cone generated by `gens`).
pub fn cone_hrep_by_elimination(gens: &[Vec<i64>], n: usize) -> Vec<Ineq> {
    // variables: x (n) then λ (k); equalities x - Gλ = 0 split into two weak inequalities
    let k = gens.len();
    let total = n + k;
    let mut sys = Vec::new();
    for i in 0..n {
        let mut c = vec![Q::zero(); total];
        c[i] = q(1);
        for (j, g) in gens.iter().enumerate() {
            c[n + j] = q(-g[i]);
        }
        sys.push(Ineq::new(c.clone(), Q::zero(), false));
        sys.push(Ineq::new(c.iter().map(|v| -v).collect(), Q::zero(), false));
    }
    for j in 0..k {
        let mut c = vec![Q::zero(); total];
        c[n + j] = q(1);
        sys.push(Ineq::new(c, Q::zero(), false));
    }
    for j in (n..total).rev() {
        sys = eliminate(&sys, j);
    }
    sys.into_iter()
        .filter(|i| i.coeffs.iter().any(|c| !c.is_zero()))
        .map(|mut i| {
            i.coeffs.truncate(n);
            i
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    #[test]
    fn strict_feasibility() {
        // 0 < x < 1
        let sys = vec![Ineq::new(vec![q(1)], q(0), true), Ineq::new(vec![q(-1)], q(-1), true)];
        let p = find_point(&sys, 1).unwrap();
        assert_eq!(p, vec![qr(1, 2)]);
        // x > 0 and x ≤ 0
        let bad = vec![Ineq::new(vec![q(1)], q(0), true), Ineq::new(vec![q(-1)], q(0), false)];
        assert!(find_point(&bad, 1).is_none());
        // x ≥ 0 and x ≤ 0 is the single point 0
        let pt = vec![Ineq::new(vec![q(1)], q(0), false), Ineq::new(vec![q(-1)], q(0), false)];
        assert_eq!(find_point(&pt, 1).unwrap(), vec![q(0)]);
    }

    #[test]
    fn triangle_interior() {
        let sys = vec![
            Ineq::new(vec![q(1), q(0)], q(0), true),
            Ineq::new(vec![q(0), q(1)], q(0), true),
            Ineq::new(vec![q(-1), q(-1)], q(-1), true),
        ];
        let p = find_point(&sys, 2).unwrap();
        assert!(sys.iter().all(|c| c.holds(&p)));
    }

    #[test]
    fn elimination_gives_cone_inequalities() {
        let h = cone_hrep_by_elimination(&[vec![1, 0], vec![1, 2]], 2);
        let inside = vec![q(2), q(1)];
        let outside = vec![q(0), q(1)];
        assert!(h.iter().all(|c| c.holds(&inside)));
        assert!(!h.iter().all(|c| c.holds(&outside)));
    }
}
