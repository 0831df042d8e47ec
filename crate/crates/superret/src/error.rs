//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong when evaluating rates and fidelities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A source and observation point are closer than the coincidence
    /// threshold, where the dropped self-term of the vacuum tensor would
    /// dominate and the point-dipole model is invalid.
    #[error("coincident points: separation {separation:.3e} below threshold{}",
            .donor.map(|i| format!(" (donor {i})")).unwrap_or_default())]
    CoincidentPoints {
        separation: f64,
        /// Index of the offending donor when the check happened inside an
        /// ensemble evaluation.
        donor: Option<usize>,
    },

    /// A dipole moment passed as a direction was not unit length.
    #[error("dipole direction has norm {norm} (must be 1 within 1e-12)")]
    NonUnitDipole { norm: f64 },

    /// Fixed-dipole mode needs exactly one donor dipole per donor position.
    #[error("{dipoles} donor dipoles supplied for {donors} donors")]
    DipoleCountMismatch { dipoles: usize, donors: usize },

    /// An ensemble must contain at least one donor.
    #[error("donor ensemble is empty")]
    EmptyEnsemble,

    /// The incoherent rate vanished, so the fidelity is undefined. Cannot
    /// happen in vacuum with finite separations; treated as an internal error.
    #[error("degenerate ensemble: incoherent rate is zero")]
    DegenerateEnsemble,

    /// A map or placement operation was given no grid points.
    #[error("grid is empty")]
    EmptyGrid,

    /// Greedy placement ran out of usable grid points.
    #[error("grid exhausted: {requested} placements requested, {available} usable points")]
    GridExhausted { requested: usize, available: usize },

    /// An explicit angle list does not match the donor count.
    #[error("angle list has length {got}, expected {expected}")]
    BadAngles { expected: usize, got: usize },

    /// The acceptor sits inside (or on) a donor sphere, where the
    /// electrostatic closed form does not apply.
    #[error("acceptor inside sphere: centre distance {distance} <= radius {radius}")]
    AcceptorInsideSphere { distance: f64, radius: f64 },

    /// Shell radii must satisfy 0 <= alpha < beta.
    #[error("bad shell radii: alpha {alpha}, beta {beta} (need 0 <= alpha < beta)")]
    BadShell { alpha: f64, beta: f64 },

    /// A distribution component has a non-positive radius or density, or
    /// radii out of order.
    #[error("bad distribution: {reason}")]
    BadDistribution { reason: String },

    /// Two union components overlap.
    #[error("distribution components {first} and {second} have overlapping supports")]
    OverlappingSupports { first: usize, second: usize },

    /// The acceptor lies inside the support of the donor density, where the
    /// incoherent rate integral diverges.
    #[error("acceptor inside the support of distribution component {component}")]
    AcceptorInsideSupport { component: usize },

    /// Quadrature or Monte Carlo settings outside the supported range.
    #[error("bad quadrature spec: {reason}")]
    BadQuadrature { reason: String },
}
