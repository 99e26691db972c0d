//! The TOML manifest: named fans, skeleta and regions, windows, and an
//! ordered list of checks.

use std::collections::BTreeMap;

use serde::Deserialize;
use toml::Spanned;

use schober_core::linalg::{parse_q, Q};
use schober_core::models::ExampleKind;

use crate::error::{CliError, Location};

/// A rational written as an integer or as a string such as `"-1/2"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Rat {
    Int(i64),
    Text(String),
}

impl Rat {
    pub fn value(&self) -> Option<Q> {
        match self {
            Rat::Int(v) => Some(Q::from_integer((*v).into())),
            Rat::Text(s) => parse_q(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Windows {
    /// Character window radius for Homs on the torus and the CCC comparison.
    #[serde(default = "default_characters")]
    pub characters: i64,
    /// Character window radius for coherent Homs on X_B.
    #[serde(default = "default_coherent")]
    pub coherent: i64,
    /// Window in which total Homs must be stable.
    #[serde(default = "default_total")]
    pub total: i64,
    /// Half side of the box carrying sheaves of regions.
    #[serde(default = "default_box")]
    pub r#box: i64,
}

fn default_characters() -> i64 {
    2
}
fn default_coherent() -> i64 {
    3
}
fn default_total() -> i64 {
    5
}
fn default_box() -> i64 {
    3
}

impl Default for Windows {
    fn default() -> Self {
        Self { characters: default_characters(), coherent: default_coherent(), total: default_total(), r#box: default_box() }
    }
}

/// A builtin fan, or maximal cones given by their rays with an optional
/// stacky map (columns are the images of the cover basis).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDecl {
    pub builtin: Option<String>,
    pub cones: Option<Vec<Vec<Vec<i64>>>>,
    pub matrix: Option<Vec<Vec<i64>>>,
}

/// One of `fltz` (with optional explicit shifts), `union` or `intersection`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonDecl {
    pub fltz: Option<Spanned<String>>,
    pub shifts: Option<Vec<Vec<Rat>>>,
    pub union: Option<Vec<Spanned<String>>>,
    pub intersection: Option<Vec<Spanned<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub covector: Vec<i64>,
    /// One of `>=`, `>`, `<=`, `<`.
    pub op: String,
    pub bound: Rat,
}

/// A half-open polytope with a marked point and covector.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionDecl {
    pub constraints: Vec<Constraint>,
    pub point: Vec<Rat>,
    pub covector: Vec<i64>,
}

/// One check. Which of the optional fields are needed depends on `check`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDecl {
    pub id: String,
    pub check: Spanned<String>,
    pub fan: Option<Spanned<String>>,
    pub fine: Option<Spanned<String>>,
    pub coarse: Option<Spanned<String>>,
    pub big: Option<Spanned<String>>,
    pub small: Option<Spanned<String>>,
    pub left: Option<Spanned<String>>,
    pub right: Option<Spanned<String>>,
    pub skeleta: Option<Vec<Spanned<String>>>,
    pub region: Option<Spanned<String>>,
    pub side: Option<Spanned<String>>,
    pub ray: Option<Vec<i64>>,
    pub weights: Option<Vec<Vec<Vec<i64>>>>,
    pub rank: Option<i64>,
    pub weight: Option<i64>,
    pub strict: Option<bool>,
    pub min_characters: Option<usize>,
    /// Expected boolean verdict, integer list, shift, or graded dimensions.
    pub expect: Option<toml::Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    /// The worked example providing the geometry for coherent and schober checks.
    pub example: Option<Spanned<String>>,
    #[serde(default)]
    pub window: Windows,
    #[serde(default)]
    pub fans: BTreeMap<String, FanDecl>,
    #[serde(default)]
    pub skeleta: BTreeMap<String, SkeletonDecl>,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionDecl>,
    #[serde(default, rename = "task")]
    pub tasks: Vec<Spanned<TaskDecl>>,
}

/// Every check the runner knows, with the fields each one reads.
pub const CHECKS: &[(&str, &[&str])] = &[
    ("smooth", &["fan"]),
    ("refines", &["fine", "coarse"]),
    ("star_subdivide", &["fan", "ray", "right"]),
    ("torsion", &["fan"]),
    ("contains", &["big", "small"]),
    ("infinity", &["left"]),
    ("equal", &["left", "right"]),
    ("lagrangian", &["skeleta"]),
    ("not_fltz", &["left"]),
    ("anchor", &["region"]),
    ("ccc", &["side"]),
    ("sod_coherent", &["side"]),
    ("sod_constructible", &["side"]),
    ("flop", &[]),
    ("shift", &[]),
    ("weights", &["weights"]),
    ("window_rank", &["rank", "weight"]),
    ("ledger", &[]),
    ("quotient", &["big", "small", "side"]),
];

impl TaskDecl {
    /// Whether the named field is present.
    fn has(&self, field: &str) -> bool {
        match field {
            "fan" => self.fan.is_some(),
            "fine" => self.fine.is_some(),
            "coarse" => self.coarse.is_some(),
            "big" => self.big.is_some(),
            "small" => self.small.is_some(),
            "left" => self.left.is_some(),
            "right" => self.right.is_some(),
            "skeleta" => self.skeleta.is_some(),
            "region" => self.region.is_some(),
            "side" => self.side.is_some(),
            "ray" => self.ray.is_some(),
            "weights" => self.weights.is_some(),
            "rank" => self.rank.is_some(),
            "weight" => self.weight.is_some(),
            _ => false,
        }
    }
}

/// Parses a manifest, with line and column on syntax errors.
pub fn parse(source: &str, path: &str) -> Result<Manifest, CliError> {
    toml::from_str(source).map_err(|e| CliError::Parse {
        location: e.span().map(|s| Location::of(path, source, s.start)).unwrap_or_else(|| Location::file(path)),
        message: e.message().to_string(),
    })
}

/// The references each task makes, by kind of object.
enum Kind {
    Fan,
    Skeleton,
    Region,
}

/// Checks that every reference resolves and every task has what it needs.
pub fn validate(m: &Manifest, source: &str, path: &str) -> Result<(), CliError> {
    let at = |span: std::ops::Range<usize>| Location::of(path, source, span.start);
    let err = |span: std::ops::Range<usize>, message: String| CliError::Validation { location: at(span), message };

    let need_example = |span: std::ops::Range<usize>, check: &str| -> Result<(), CliError> {
        match &m.example {
            None => Err(err(span, format!("check `{check}` needs a top-level `example`"))),
            Some(e) => ExampleKind::parse(e.get_ref())
                .map(|_| ())
                .map_err(|_| err(e.span(), format!("unknown example `{}`", e.get_ref()))),
        }
    };
    if let Some(e) = &m.example {
        ExampleKind::parse(e.get_ref()).map_err(|_| err(e.span(), format!("unknown example `{}`", e.get_ref())))?;
    }
    let w = &m.window;
    if [w.characters, w.coherent, w.total, w.r#box].iter().any(|&v| !(1..=20).contains(&v)) {
        return Err(CliError::Validation { location: Location::file(path), message: "windows must be between 1 and 20".into() });
    }
    for (name, f) in &m.fans {
        let ok = f.builtin.is_some() != f.cones.is_some() && (f.matrix.is_none() || f.cones.is_some());
        if !ok {
            return Err(CliError::Validation {
                location: Location::file(path),
                message: format!("fan `{name}` needs exactly one of `builtin` or `cones` (`matrix` only with `cones`)"),
            });
        }
    }
    let resolve = |r: &Spanned<String>, kind: Kind| -> Result<(), CliError> {
        let (found, what) = match kind {
            Kind::Fan => (m.fans.contains_key(r.get_ref()), "fan"),
            Kind::Skeleton => (m.skeleta.contains_key(r.get_ref()), "skeleton"),
            Kind::Region => (m.regions.contains_key(r.get_ref()), "region"),
        };
        if found {
            Ok(())
        } else {
            Err(err(r.span(), format!("unknown {what} `{}`", r.get_ref())))
        }
    };
    for (name, s) in &m.skeleta {
        let count = [s.fltz.is_some(), s.union.is_some(), s.intersection.is_some()].iter().filter(|&&b| b).count();
        if count != 1 {
            return Err(CliError::Validation {
                location: Location::file(path),
                message: format!("skeleton `{name}` needs exactly one of `fltz`, `union` or `intersection`"),
            });
        }
        if let Some(f) = &s.fltz {
            resolve(f, Kind::Fan)?;
        }
        for r in s.union.iter().chain(&s.intersection).flatten() {
            resolve(r, Kind::Skeleton)?;
            if r.get_ref() == name {
                return Err(err(r.span(), format!("skeleton `{name}` refers to itself")));
            }
        }
    }
    skeleton_order(m).map_err(|cycle| CliError::Validation {
        location: Location::file(path),
        message: format!("skeleton recipes form a cycle through `{cycle}`"),
    })?;
    for (name, r) in &m.regions {
        let n = r.covector.len();
        let bad = r.point.len() != n
            || r.constraints.iter().any(|c| c.covector.len() != n || !matches!(c.op.as_str(), ">=" | ">" | "<=" | "<"))
            || r.point.iter().any(|v| v.value().is_none())
            || r.constraints.iter().any(|c| c.bound.value().is_none());
        if bad {
            return Err(CliError::Validation {
                location: Location::file(path),
                message: format!("region `{name}` has mismatched dimensions, an unknown operator or a malformed rational"),
            });
        }
    }
    let mut ids = std::collections::BTreeSet::new();
    for t in &m.tasks {
        let span = t.span();
        let t = t.get_ref();
        if !ids.insert(t.id.clone()) {
            return Err(err(span, format!("duplicate task id `{}`", t.id)));
        }
        let check = t.check.get_ref().as_str();
        let Some((_, fields)) = CHECKS.iter().find(|(c, _)| *c == check) else {
            return Err(err(t.check.span(), format!("unknown check `{check}`")));
        };
        for f in *fields {
            if !t.has(f) {
                return Err(err(span.clone(), format!("task `{}` ({check}) is missing `{f}`", t.id)));
            }
        }
        let fan_refs = [&t.fan, &t.fine, &t.coarse];
        for r in fan_refs.into_iter().flatten() {
            resolve(r, Kind::Fan)?;
        }
        if check == "star_subdivide" {
            resolve(t.right.as_ref().expect("checked above"), Kind::Fan)?;
        } else {
            for r in [&t.big, &t.small, &t.left, &t.right].into_iter().flatten() {
                resolve(r, Kind::Skeleton)?;
            }
        }
        if check == "infinity" {
            let l = t.left.as_ref().expect("checked above");
            if m.skeleta.get(l.get_ref()).is_some_and(|s| s.fltz.is_some()) {
                return Err(err(l.span(), format!("`infinity` needs `{}` to be a union or intersection", l.get_ref())));
            }
        }
        for r in t.skeleta.iter().flatten() {
            resolve(r, Kind::Skeleton)?;
        }
        if let Some(r) = &t.region {
            resolve(r, Kind::Region)?;
        }
        if let Some(s) = &t.side {
            if !matches!(s.get_ref().as_str(), "+" | "-") {
                return Err(err(s.span(), format!("side must be \"+\" or \"-\", got `{}`", s.get_ref())));
            }
        }
        if matches!(check, "ccc" | "sod_coherent" | "sod_constructible" | "flop" | "shift" | "ledger" | "quotient") {
            need_example(t.check.span(), check)?;
        }
    }
    Ok(())
}

/// Skeleton names in an order where every recipe comes after its inputs;
/// on a cycle, returns a name on it.
pub fn skeleton_order(m: &Manifest) -> Result<Vec<String>, String> {
    let mut order = Vec::new();
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    fn visit<'a>(
        name: &'a str,
        m: &'a Manifest,
        state: &mut BTreeMap<&'a str, u8>,
        order: &mut Vec<String>,
    ) -> Result<(), String> {
        match state.get(name) {
            Some(2) => return Ok(()),
            Some(1) => return Err(name.to_string()),
            _ => {}
        }
        state.insert(name, 1);
        if let Some(s) = m.skeleta.get(name) {
            for r in s.union.iter().chain(&s.intersection).flatten() {
                visit(r.get_ref(), m, state, order)?;
            }
        }
        state.insert(name, 2);
        order.push(name.to_string());
        Ok(())
    }
    for name in m.skeleta.keys() {
        visit(name, m, &mut state, &mut order)?;
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(src: &str) -> Result<Manifest, CliError> {
        let m = parse(src, "m.toml")?;
        validate(&m, src, "m.toml")?;
        Ok(m)
    }

    #[test]
    fn rationals_parse_from_integers_and_strings() {
        assert_eq!(Rat::Int(-3).value(), parse_q("-3"));
        assert_eq!(Rat::Text("1/2".into()).value(), parse_q("1/2"));
        assert_eq!(Rat::Text("half".into()).value(), None);
    }

    #[test]
    fn skeleton_cycles_are_rejected() {
        let src = "name = \"c\"\n[fans.f]\nbuiltin = \"coni.Σ0\"\n[skeleta.a]\nunion = [\"b\"]\n[skeleta.b]\nunion = [\"a\"]\n";
        let e = check(src).unwrap_err();
        assert!(e.to_string().contains("cycle"), "{e}");
    }

    #[test]
    fn unknown_checks_point_at_the_check() {
        let src = "name = \"u\"\n[[task]]\nid = \"t\"\ncheck = \"frobnicate\"\n";
        match check(src).unwrap_err() {
            CliError::Validation { location, message } => {
                assert_eq!((location.line, location.column), (4, 9));
                assert!(message.contains("frobnicate"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_fields_are_named() {
        let src = "name = \"m\"\n[fans.f]\nbuiltin = \"coni.Σ0\"\n[[task]]\nid = \"t\"\ncheck = \"refines\"\nfine = \"f\"\n";
        let e = check(src).unwrap_err();
        assert!(e.to_string().contains("missing `coarse`"), "{e}");
    }

    #[test]
    fn schober_checks_need_an_example() {
        let src = "name = \"s\"\n[[task]]\nid = \"t\"\ncheck = \"flop\"\n";
        assert!(check(src).unwrap_err().to_string().contains("example"));
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let src = "name = \"s\"\ncolour = 3\n";
        assert!(matches!(check(src).unwrap_err(), CliError::Parse { .. }));
    }

    #[test]
    fn locations_count_lines_and_columns() {
        let l = Location::of("f", "ab\ncdé\nx", 7);
        assert_eq!((l.line, l.column), (2, 4));
    }
}
