use thiserror::Error;

/// Every failure mode of the toolkit. Variants carry enough context to point
/// at the offending input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("lattice map is not injective (rank {rank} < source rank {source_rank})")]
    NonInjective { rank: usize, source_rank: usize },

    #[error("cones do not form a fan: {left:?} and {right:?} meet outside a common face")]
    NotAFan { left: Vec<Vec<i64>>, right: Vec<Vec<i64>> },

    #[error("ray {ray:?} lies outside the support of the fan")]
    RayOutsideSupport { ray: Vec<i64> },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("invalid shift {shift}: {reason}")]
    InvalidShift { shift: String, reason: String },

    #[error("skeleton has nonzero shifts; the test only applies to unshifted skeleta")]
    HasNonzeroShifts,

    #[error("degenerate box: {0}")]
    DegenerateBox(String),

    #[error("region facet {facet} is not a hyperplane of the arrangement")]
    NotSubordinate { facet: String },

    #[error("not a sheaf map: {0}")]
    NotASheafMap(String),

    #[error("point {0} is not in the open box")]
    PointOnBoxBoundary(String),

    #[error("sheaves live on different arrangements")]
    ArrangementMismatch,

    #[error("target arrangement does not refine the source: {0}")]
    NotARefinement(String),

    #[error("covector {covector} lies on a wall of the local covector fan at {point}")]
    NonGenericCovector { point: String, covector: String },

    #[error("box stabilization failed at character {character:?}: side {side} gave {small}, side {double} gave {large}")]
    StabilizationFailed { character: Vec<i64>, side: String, double: String, small: String, large: String },

    #[error("fan is not smooth: cone {0:?}")]
    NonSmoothFan(Vec<Vec<i64>>),

    #[error("{ray:?} is not a ray of the fan")]
    NotADivisorRay { ray: Vec<i64> },

    #[error("window not stable: {0}")]
    WindowNotStable(String),

    #[error("Gram matrix of the test set is singular (rank {rank} of {size})")]
    GramSingular { rank: usize, size: usize },

    #[error("candidate `{name}` has singular support outside the big skeleton at {witness}")]
    CandidateOutsideBig { name: String, witness: String },

    #[error("plotting needs rank 2, got rank {0}")]
    NotRank2(usize),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
