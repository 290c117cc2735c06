use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cutoff {cutoff} too small: element needs occupation {needed} (degree {degree} included)")]
    CutoffTooSmall {
        cutoff: u32,
        needed: u32,
        degree: u32,
    },

    #[error("phase-space point ({q1}, {q2}) is at the Coulomb singularity")]
    SingularOrigin { q1: f64, q2: f64 },

    #[error("integration domain too small: boundary magnitude {boundary:e} exceeds {threshold:e} of peak")]
    DomainTooSmall { boundary: f64, threshold: f64 },

    #[error("sampled field too small for finite differences: {nodes} nodes along {axis}, need at least {required}")]
    NonDifferentiable {
        axis: &'static str,
        nodes: usize,
        required: usize,
    },

    #[error("star-product series did not converge: term {order} has relative size {ratio:e}")]
    NonConvergence { order: usize, ratio: f64 },

    #[error("adaptive quadrature stalled: error estimate {estimate:e} above tolerance {tolerance:e}")]
    ToleranceNotMet { estimate: f64, tolerance: f64 },

    #[error("fields do not share a grid")]
    GridMismatch,

    #[error("no printed coefficients for level ({n1}, {n2})")]
    NoPrintedCoefficients { n1: u32, n2: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
