//! JSON views of fans and skeleta.

use serde::{Deserialize, Serialize};

use schober_core::builtin::FanData;
use schober_core::linalg::fmt_q;
use schober_core::skeleton::{Skeleton, Stratum};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanView {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    /// Maximal cones by their rays.
    pub cones: Vec<Vec<Vec<i64>>>,
    /// Map from the cover lattice to N, when stacky.
    pub matrix: Option<Vec<Vec<i64>>>,
    pub smooth: bool,
}

impl FanView {
    pub fn of(data: &FanData) -> Self {
        let fan = data.cover_fan();
        Self {
            rank: fan.ambient.rank,
            rays: fan.rays(),
            cones: fan.maximal().iter().map(|c| c.rays.clone()).collect(),
            matrix: data.as_stacky().map(|s| s.map.matrix.clone()),
            smooth: fan.is_smooth().smooth,
        }
    }
}

/// One stratum π(V + s) × F, with rationals written as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumView {
    pub base_basis: Vec<Vec<i64>>,
    pub shifts: Vec<Vec<String>>,
    pub fiber_rays: Vec<Vec<i64>>,
    pub source_cone: Vec<Vec<i64>>,
}

impl StratumView {
    pub fn of(s: &Stratum) -> Self {
        Self {
            base_basis: s.base.clone(),
            shifts: s.shifts.iter().map(|v| v.iter().map(fmt_q).collect()).collect(),
            fiber_rays: s.fiber.rays.clone(),
            source_cone: s.source_cone.clone(),
        }
    }
}

pub fn skeleton_view(s: &Skeleton) -> Vec<StratumView> {
    s.strata.iter().map(StratumView::of).collect()
}
