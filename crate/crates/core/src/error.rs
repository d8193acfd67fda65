use thiserror::Error;

/// Errors reported by the numerical and geometric operations.
#[derive(Debug, Error)]
pub enum SiegelError {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Malformed construction data: singular generator matrix, a
    /// non-Hermitian component, a dependent real-form basis, and the like.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A defining integral does not converge for the given functional,
    /// e.g. the characteristic integral outside the closed dual cone.
    #[error("divergent integral: {0}")]
    Divergent(String),

    /// `H(ξ)` is indefinite, so `{ u : ⟨ξ, Q(u,u)⟩ = 0 }` is not a subspace.
    #[error("not a subspace: {0}")]
    NotASubspace(String),

    /// A point left the open domain where a holomorphic object is defined.
    #[error("outside the domain: {0}")]
    OutsideDomain(String),

    /// Finite differences or branch tracking failed to stabilize.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The request exceeds the supported quadrature ranks or node counts.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// A quadrature result failed its independent accuracy cross-check.
    #[error("accuracy check failed: {0}")]
    Accuracy(String),

    /// An operation that requires multiplicity-freeness (or another
    /// structural hypothesis) was invoked where the hypothesis fails.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, SiegelError>;
