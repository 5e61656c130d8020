//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong while building a well or solving it.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two interior elements intersect with positive measure.
    #[error("elements overlap: [{0:.6}, {1:.6}] intersects [{2:.6}, {3:.6}]")]
    Overlap(f64, f64, f64, f64),

    /// An element (or derived geometry) falls outside the well.
    #[error("out of range: {0}")]
    Range(String),

    /// The well geometry itself is invalid (d ≤ 0, non-positive wall, mixed
    /// infinite/finite walls).
    #[error("bad geometry: {0}")]
    Geometry(String),

    /// A numeric argument is outside the domain of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// Two transfer coefficients evaluated at different wavenumbers were
    /// combined.
    #[error("wavenumber mismatch: k = {0} vs k = {1}")]
    Mismatch(f64, f64),

    /// A finite-wall operation was applied to an infinite-wall well.
    #[error("walls are infinite: {0}")]
    InfiniteWall(String),

    /// An infinite-wall operation was applied to a finite-wall well.
    #[error("walls are finite: {0}")]
    FiniteWall(String),

    /// Bisection failed to reach tolerance within the iteration cap.
    #[error("no convergence after {0} iterations in [{1:.12e}, {2:.12e}]")]
    Convergence(usize, f64, f64),

    /// The finite-difference grid cannot support the request.
    #[error("grid: {0}")]
    Grid(String),
}
