use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generated cone contains a line")]
    NotPointed,
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("ray lies outside the support of cone {cone}")]
    RayOutside { cone: usize },
    #[error("no cone with id {0}")]
    NoSuchCone(usize),
    #[error("subdivision is not invariant under automorphisms of cone {0}")]
    NotAutInvariant(usize),
    #[error("covector closure did not converge after {0} rounds")]
    FixpointDiverged(usize),
    #[error("face map into cone {0} has no integral left inverse")]
    NonIntegralFaceMap(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no edge with index {0}")]
    NoSuchEdge(usize),
    #[error("unstable range: 2g - 2 + n = {0} <= 0")]
    Unstable(i64),
    #[error("stabilizations are not isomorphic to the shared stable graph")]
    IncompatibleStabilizations,
    #[error("unsupported destabilization: {0}")]
    UnsupportedDestabilization(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
