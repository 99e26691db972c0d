//! SVG pictures of rank-2 skeleta in one fundamental domain of the torus.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;

use schober_core::linalg::Q;
use schober_core::skeleton::{Skeleton, Stratum};
use schober_core::{Error, Result};

/// Hair sample points per base stratum and shift.
pub const HAIR_SAMPLES: usize = 8;
const SIZE: f64 = 400.0;
const MARGIN: f64 = 20.0;
const HAIR: f64 = 0.04;
const EPS: f64 = 1e-9;

fn f(x: &Q) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

fn wrap(x: f64) -> f64 {
    let r = x - x.floor();
    if r > 1.0 - EPS {
        0.0
    } else {
        r
    }
}

fn px(p: [f64; 2]) -> (String, String) {
    let x = MARGIN + p[0] * SIZE;
    let y = MARGIN + (1.0 - p[1]) * SIZE;
    (num(x), num(y))
}

/// Fixed three-decimal formatting, with no negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Pieces of the line p + t·v inside the unit square, over all integer
/// translates of p.
fn clip_line(p: [f64; 2], v: [f64; 2]) -> Vec<([f64; 2], [f64; 2])> {
    let reach = (v[0].abs() + v[1].abs()).ceil() as i64 + 1;
    let mut out = Vec::new();
    for k0 in -reach..=reach {
        for k1 in -reach..=reach {
            let q = [p[0] + k0 as f64, p[1] + k1 as f64];
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut empty = false;
            for i in 0..2 {
                if v[i].abs() < EPS {
                    if q[i] < -EPS || q[i] > 1.0 + EPS {
                        empty = true;
                    }
                } else {
                    let (a, b) = ((0.0 - q[i]) / v[i], (1.0 - q[i]) / v[i]);
                    lo = lo.max(a.min(b));
                    hi = hi.min(a.max(b));
                }
            }
            if !empty && hi - lo > EPS {
                out.push(([q[0] + lo * v[0], q[1] + lo * v[1]], [q[0] + hi * v[0], q[1] + hi * v[1]]));
            }
        }
    }
    out
}

fn hair_lines(at: [f64; 2], s: &Stratum, svg: &mut String, seen: &mut BTreeSet<String>) {
    for r in &s.fiber.rays {
        let (a, b) = (r[0] as f64, r[1] as f64);
        let n = (a * a + b * b).sqrt();
        if n < EPS {
            continue;
        }
        let end = [at[0] + HAIR * a / n, at[1] + HAIR * b / n];
        let ((x1, y1), (x2, y2)) = (px(at), px(end));
        let line = format!("<line class=\"hair\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>\n");
        if seen.insert(line.clone()) {
            svg.push_str(&line);
        }
    }
}

/// Renders a rank-2 skeleton: the unit square, base circles with every
/// shifted copy, marked points for point strata, and short hairs along the
/// fiber rays at fixed sample points.
pub fn skeleton_svg(sk: &Skeleton) -> Result<String> {
    if sk.rank != 2 {
        return Err(Error::NotRank2(sk.rank));
    }
    let total = SIZE + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{t}\" height=\"{t}\" viewBox=\"0 0 {t} {t}\">",
        t = num(total)
    );
    svg.push_str("<style>.domain{fill:none;stroke:#000;stroke-width:1.5}.zero-section{fill:#e8eef8;stroke:none}.base{stroke:#1f4e9c;stroke-width:2}.base-point{fill:#1f4e9c}.hair{stroke:#c0392b;stroke-width:1}</style>\n");
    let (x0, y0) = (num(MARGIN), num(MARGIN));
    let side = num(SIZE);
    if sk.strata.iter().any(|s| s.base.len() == 2) {
        let _ = writeln!(svg, "<rect class=\"zero-section\" x=\"{x0}\" y=\"{y0}\" width=\"{side}\" height=\"{side}\"/>");
    }
    let _ = writeln!(svg, "<rect class=\"domain\" x=\"{x0}\" y=\"{y0}\" width=\"{side}\" height=\"{side}\"/>");
    let mut hairs = String::new();
    let mut seen_hairs = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for (idx, s) in sk.strata.iter().enumerate() {
        for shift in &s.shifts {
            let p = [wrap(f(&shift[0])), wrap(f(&shift[1]))];
            match s.base.len() {
                0 => {
                    let (cx, cy) = px(p);
                    let dot = format!("<circle class=\"base-point\" data-stratum=\"{idx}\" cx=\"{cx}\" cy=\"{cy}\" r=\"3\"/>\n");
                    if seen.insert(dot.clone()) {
                        svg.push_str(&dot);
                    }
                    hair_lines(p, s, &mut hairs, &mut seen_hairs);
                }
                1 => {
                    let v = [s.base[0][0] as f64, s.base[0][1] as f64];
                    for (a, b) in clip_line(p, v) {
                        let ((x1, y1), (x2, y2)) = (px(a), px(b));
                        let line = format!(
                            "<line class=\"base\" data-stratum=\"{idx}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>\n"
                        );
                        if seen.insert(line.clone()) {
                            svg.push_str(&line);
                        }
                    }
                    // v is primitive, so t ∈ [0, 1) runs once around the circle
                    for j in 0..HAIR_SAMPLES {
                        let t = (j as f64 + 0.5) / HAIR_SAMPLES as f64;
                        let at = [wrap(p[0] + t * v[0]), wrap(p[1] + t * v[1])];
                        hair_lines(at, s, &mut hairs, &mut seen_hairs);
                    }
                }
                _ => {}
            }
        }
    }
    svg.push_str(&hairs);
    svg.push_str("</svg>\n");
    Ok(svg)
}
