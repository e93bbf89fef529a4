use thiserror::Error;

/// Errors raised by the solvers and checks in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate shape: pair ({0},{1}) is coincident or antipodal")]
    DegenerateShape(usize, usize),
    #[error("shape cannot be realized on the sphere: {0}")]
    UnrealizableShape(String),
    #[error("singular separation: |cos sigma| = {cos_sigma} for pair ({i},{j})")]
    SingularSeparation { i: usize, j: usize, cos_sigma: f64 },
    #[error("coordinate singularity: body {0} sits on the polar axis")]
    CoordinateSingularity(usize),
    #[error("degenerate normalization: all bodies lie on the equator")]
    DegenerateNormalization,
    #[error("reconstruction out of range: {0}")]
    ReconstructionOutOfRange(String),
    #[error("degenerate discriminant (A = {0:e}); use the degenerate solver")]
    DegenerateDiscriminant(f64),
    #[error("inconsistent ratios in the compact equations: {0}")]
    InconsistentRatios(String),
    #[error("shape does not satisfy the relative equilibrium condition (residual {0:e})")]
    NotAnEquilibrium(f64),
    #[error("excluded angle {0}")]
    ExcludedAngle(f64),
    #[error("no Lagrangian relative equilibrium exists for a repulsive potential")]
    NoLreForRepulsive,
    #[error("fixed point rejected: Lagrangian relative equilibria need omega^2 > 0 (got {0})")]
    FixedPointLre(f64),
    #[error("integration aborted at t = {time}: {reason}")]
    IntegrationAborted { time: f64, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
