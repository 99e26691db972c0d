//! The two worked examples assembled from the builtin fans: the varieties
//! X_B → X_± → X₀, their generators and compact test objects, the exceptional
//! objects on both sides and the skeleta.

use crate::bside::{pullback_divisor, BObject, BTerm, Divisor, ToricVariety};
use crate::builtin::{builtin_example, stacky};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{q, qr, Q};
use crate::sheaf::{HalfSpace, IndicatorComplex, Region};
use crate::skeleton::{fltz_skeleton, stacky_fltz_skeleton, torsion_shift_classes, Skeleton};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleKind {
    Conifold,
    Surface,
}

impl ExampleKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "conifold" | "coni" => Ok(Self::Conifold),
            "surface" | "surf" => Ok(Self::Surface),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Conifold => "conifold",
            Self::Surface => "surface",
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Self::Conifold => "coni",
            Self::Surface => "surf",
        }
    }
}

/// A half-open polyhedron together with a marked point of its closed corner
/// stratum and a covector there.
#[derive(Debug, Clone)]
pub struct MarkedRegion {
    pub name: String,
    pub region: Region,
    pub point: Vec<Q>,
    pub covector: Vec<i64>,
}

impl MarkedRegion {
    pub fn complex(&self) -> IndicatorComplex {
        IndicatorComplex::single(self.region.clone(), 0)
    }
}

/// Which side of the flop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// One named object of a generator list.
pub type Named<T> = (String, T);

#[derive(Debug, Clone)]
pub struct Example {
    pub kind: ExampleKind,
    pub xb: ToricVariety,
    pub xp: ToricVariety,
    pub xm: ToricVariety,
    /// Cover-lattice maps X_B → X_±.
    pub phi_p: Vec<Vec<i64>>,
    pub phi_m: Vec<Vec<i64>>,
    /// The ray of the exceptional divisor E ⊂ X_B.
    pub exceptional: Vec<i64>,
    /// O(1) on X_± (on the stacky side: the line bundle of the nontrivial character).
    pub ample_p: Divisor,
    pub ample_m: Divisor,
    /// Rays cutting out E_± ⊂ X_± (in the cover lattice).
    pub center_p: Vec<Vec<i64>>,
    pub center_m: Vec<Vec<i64>>,
}

fn plain_variety(name: &str) -> Result<ToricVariety> {
    Ok(ToricVariety::from_data(name, &builtin_example(name)?))
}

impl Example {
    pub fn new(kind: ExampleKind) -> Result<Self> {
        let p = kind.prefix();
        let xb = plain_variety(&format!("{p}.ΣB"))?;
        let xp = plain_variety(&format!("{p}.Σ+"))?;
        let xm = plain_variety(&format!("{p}.Σ-"))?;
        let id3 = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        let ex = match kind {
            ExampleKind::Conifold => Example {
                kind,
                ample_p: xp.prime(&[1, 0, 0])?,
                ample_m: xm.prime(&[0, 1, 0])?,
                center_p: vec![vec![0, 1, 0], vec![1, 0, 1]],
                center_m: vec![vec![1, 0, 0], vec![0, 1, 1]],
                exceptional: vec![1, 1, 1],
                phi_p: id3.clone(),
                phi_m: id3,
                xb,
                xp,
                xm,
            },
            ExampleKind::Surface => Example {
                kind,
                ample_p: xp.prime(&[1, 0])?,
                // O ⊗ χ for the sign character of μ₂
                ample_m: xm.prime(&[1, 0])?,
                center_p: vec![vec![1, 1]],
                center_m: vec![vec![1, 0], vec![0, 1]],
                exceptional: vec![1, 1],
                phi_p: stacky("surf.ΣB").map.matrix.clone(),
                phi_m: vec![vec![1, 0], vec![0, 1]],
                xb,
                xp,
                xm,
            },
        };
        Ok(ex)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn rank(&self) -> usize {
        self.xb.rank()
    }

    pub fn variety(&self, side: Side) -> &ToricVariety {
        match side {
            Side::Plus => &self.xp,
            Side::Minus => &self.xm,
        }
    }

    pub fn phi(&self, side: Side) -> &[Vec<i64>] {
        match side {
            Side::Plus => &self.phi_p,
            Side::Minus => &self.phi_m,
        }
    }

    pub fn ample(&self, side: Side) -> &Divisor {
        match side {
            Side::Plus => &self.ample_p,
            Side::Minus => &self.ample_m,
        }
    }

    pub fn center(&self, side: Side) -> &[Vec<i64>] {
        match side {
            Side::Plus => &self.center_p,
            Side::Minus => &self.center_m,
        }
    }

    /// p_±^* of a complex of line bundles.
    pub fn pullback(&self, side: Side, obj: &BObject) -> Result<BObject> {
        let x = self.variety(side);
        let terms = obj
            .terms
            .iter()
            .map(|t| {
                if t.support.is_some() {
                    return Err(Error::Invalid("only complexes of line bundles can be pulled back".into()));
                }
                Ok(BTerm { degree: t.degree, divisor: pullback_divisor(&self.xb, x, self.phi(side), &t.divisor)?, support: None })
            })
            .collect::<Result<_>>()?;
        Ok(BObject { terms, maps: obj.maps.clone() })
    }

    /// O and O(1) on X_±.
    pub fn generators(&self, side: Side) -> Vec<Named<BObject>> {
        let x = self.variety(side);
        vec![
            (format!("O{}", side.label()), BObject::line_bundle(x.zero_divisor())),
            (format!("O{}(1)", side.label()), BObject::line_bundle(self.ample(side).clone())),
        ]
    }

    /// Θ′(σ) = j_{σ*} O_{U_σ} for the maximal cones of X_±. On a stack the
    /// charts are also twisted by O(1) = O ⊗ χ so that both characters of the
    /// generic stabilizer appear.
    pub fn chart_generators(&self, side: Side) -> Vec<Named<BObject>> {
        let x = self.variety(side);
        let mut twists = vec![(String::new(), x.zero_divisor())];
        if crate::lattice::det_int(&x.map).abs() > 1 {
            twists.push(("χ".to_string(), self.ample(side).clone()));
        }
        let mut out = Vec::new();
        for (tn, t) in &twists {
            for (i, s) in x.maximal.iter().enumerate() {
                out.push((format!("Θ{}{}{tn}", side.label(), i + 1), BObject::chart(s, t.clone())));
            }
        }
        out
    }

    /// Structure sheaf of the centre E_± twisted by O and O(1).
    pub fn tests(&self, side: Side) -> Result<Vec<Named<BObject>>> {
        let x = self.variety(side);
        let c = self.center(side);
        let mut out = Vec::new();
        for (k, l) in [(0, x.zero_divisor()), (1, self.ample(side).clone())] {
            let obj = match c.len() {
                1 => BObject::koszul(x, &c[0], &l)?,
                2 => BObject::koszul2(x, &c[0], &c[1], &l)?,
                _ => return Err(Error::Invalid("centre must be cut out by one or two rays".into())),
            };
            out.push((format!("O_E{}({k})", side.label()), obj));
        }
        Ok(out)
    }

    /// i_* of line bundles on E spanning its K-group: (p₊^*O(1))^a ⊗ (p₋^*O(1))^b.
    pub fn tests_b(&self) -> Result<Vec<Named<BObject>>> {
        let a = pullback_divisor(&self.xb, &self.xp, &self.phi_p, &self.ample_p)?;
        let b = pullback_divisor(&self.xb, &self.xm, &self.phi_m, &self.ample_m)?;
        let mut out = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let l = a.scale(i).add(&b.scale(j));
                out.push((format!("O_E({i},{j})"), BObject::koszul(&self.xb, &self.exceptional, &l)?));
            }
        }
        Ok(out)
    }

    /// 𝓔_± = i_* q_±^* O_{E±}(−1), as a Koszul complex on X_B.
    pub fn exceptional_object(&self, side: Side) -> Result<BObject> {
        let l = pullback_divisor(&self.xb, self.variety(side), self.phi(side), &self.ample(side).scale(-1))?;
        BObject::koszul(&self.xb, &self.exceptional, &l)
    }

    /// i_* q₊^* D(E₊): the orthogonal block of p₊^* D(X₊) in D(X_B).
    pub fn orthogonal_block(&self) -> Result<Vec<Named<BObject>>> {
        let l = pullback_divisor(&self.xb, &self.xp, &self.phi_p, &self.ample_p)?;
        Ok(vec![
            ("i*q+*O(-1)".to_string(), BObject::koszul(&self.xb, &self.exceptional, &l.scale(-1))?),
            ("i*q+*O".to_string(), BObject::koszul(&self.xb, &self.exceptional, &self.xb.zero_divisor())?),
        ])
    }

    /// p₊^* of the X₊ generators followed by the orthogonal block.
    pub fn generators_b(&self) -> Result<Vec<Named<BObject>>> {
        let mut out = Vec::new();
        for (n, g) in self.generators(Side::Plus) {
            out.push((format!("p+*{n}"), self.pullback(Side::Plus, &g)?));
        }
        out.extend(self.orthogonal_block()?);
        Ok(out)
    }

    /// The images of p₊^* and p₋^* on generators.
    pub fn generators_p0(&self) -> Result<Vec<Named<BObject>>> {
        let mut out = Vec::new();
        for side in [Side::Plus, Side::Minus] {
            for (n, g) in self.generators(side) {
                out.push((format!("p{}*{n}", side.label()), self.pullback(side, &g)?));
            }
        }
        Ok(out)
    }

    /// ω_{p_±} = K_{X_B} − p_±^* K_{X_±}.
    pub fn relative_canonical(&self, side: Side) -> Result<Divisor> {
        let x = self.variety(side);
        Ok(self.xb.canonical().sub(&pullback_divisor(&self.xb, x, self.phi(side), &x.canonical())?))
    }

    /// A microlocal skyscraper at a point of ⋃Λ± ∖ Λ_side, as the constant
    /// sheaf of a half-open polytope: every Hom from it into Sh_{Λ_side} vanishes.
    pub fn skyscraper(&self, side: Side) -> MarkedRegion {
        match (self.kind, side) {
            (ExampleKind::Conifold, Side::Minus) => MarkedRegion {
                name: "F_D".into(),
                region: Region::new(vec![
                    HalfSpace::leq(vec![1, 0, 1], q(-1)),
                    HalfSpace::geq(vec![0, -1, 0], q(0)),
                    HalfSpace::gt(vec![1, 0, 0], q(-1)),
                    HalfSpace::gt(vec![0, 1, 1], q(-1)),
                ]),
                point: vec![qr(-1, 2), q(0), qr(-1, 2)],
                covector: vec![-1, -1, -1],
            },
            (ExampleKind::Conifold, Side::Plus) => MarkedRegion {
                name: "F_D'".into(),
                region: Region::new(vec![
                    HalfSpace::leq(vec![0, 1, 1], q(-1)),
                    HalfSpace::geq(vec![-1, 0, 0], q(0)),
                    HalfSpace::gt(vec![0, 1, 0], q(-1)),
                    HalfSpace::gt(vec![1, 0, 1], q(-1)),
                ]),
                point: vec![q(0), qr(-1, 2), qr(-1, 2)],
                covector: vec![-1, -1, -1],
            },
            (ExampleKind::Surface, Side::Minus) => MarkedRegion {
                name: "F-".into(),
                region: Region::new(vec![
                    HalfSpace::leq(vec![1, 1], q(0)),
                    HalfSpace::gt(vec![1, 0], q(0)),
                    HalfSpace::gt(vec![1, 2], q(-1)),
                ]),
                point: vec![qr(1, 2), qr(-1, 2)],
                covector: vec![-1, -1],
            },
            (ExampleKind::Surface, Side::Plus) => MarkedRegion {
                name: "F+".into(),
                region: Region::new(vec![
                    HalfSpace::leq(vec![1, 0], q(0)),
                    HalfSpace::leq(vec![1, 2], q(1)),
                    HalfSpace::gt(vec![1, 1], q(0)),
                ]),
                point: vec![q(0), qr(1, 2)],
                covector: vec![-1, -1],
            },
        }
    }

    /// A conifold region with End and microstalk ℂ[0] whose singular support
    /// nevertheless leaves ⋃Λ±; `skyscraper` uses a corrected version.
    pub fn uncorrected_region() -> MarkedRegion {
        MarkedRegion {
            name: "D".into(),
            region: Region::new(vec![
                HalfSpace::leq(vec![1, 0, 1], q(-1)),
                HalfSpace::geq(vec![0, 1, 0], q(0)),
                HalfSpace::gt(vec![1, 0, 0], q(-1)),
                HalfSpace::gt(vec![0, -1, 1], q(-1)),
            ]),
            point: vec![qr(-1, 2), q(0), qr(-1, 2)],
            covector: vec![-1, 1, -1],
        }
    }
}

/// The skeleta of one example.
#[derive(Debug, Clone)]
pub struct Skeleta {
    pub plus: Skeleton,
    pub minus: Skeleton,
    pub blowup: Skeleton,
    pub zero: Skeleton,
    pub union: Skeleton,
    pub intersection: Skeleton,
}

fn fan_of(name: &str) -> Result<Fan> {
    builtin_example(name)?.image_fan()
}

pub fn skeleta(kind: ExampleKind) -> Result<Skeleta> {
    let p = kind.prefix();
    let side = |s: &str| -> Result<Skeleton> {
        let data = builtin_example(&format!("{p}.{s}"))?;
        match data.as_stacky() {
            Some(sf) => stacky_fltz_skeleton(sf, &torsion_shift_classes(sf)),
            None => Ok(fltz_skeleton(data.cover_fan())),
        }
    };
    let plus = side("Σ+")?;
    let minus = side("Σ-")?;
    let blowup = side("ΣB")?;
    let zero = fltz_skeleton(&fan_of(&format!("{p}.Σ0"))?);
    let union = plus.union(&minus);
    let intersection = plus.intersection(&minus);
    Ok(Skeleta { plus, minus, blowup, zero, union, intersection })
}
