use thiserror::Error;

/// Errors raised by the geometry, density and estimation routines.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate simplex")]
    DegenerateSimplex,

    /// A Voronoi cell could not be closed by the supplied neighbors.
    #[error("unbounded Voronoi cell")]
    UnboundedCell,

    #[error("degenerate hull input")]
    DegenerateHull,

    /// Rejection sampling accepted too few candidates to be useful.
    #[error("degenerate region")]
    DegenerateRegion,

    #[error("probe radius too large for region")]
    ProbeTooLarge,

    #[error("probe radius too small")]
    ProbeTooSmall,

    /// The anchor triangle did not appear as a face of the patch hull.
    #[error("patch orientation violated")]
    PatchOrientation,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
