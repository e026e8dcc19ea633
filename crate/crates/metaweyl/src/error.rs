//! Error types, one enum per subsystem.

use thiserror::Error;

/// Errors from symplectic linear algebra and Cayley parametrizations.
#[derive(Debug, Clone, Error)]
pub enum SymplecticError {
    /// A matrix or vector does not have the (even) dimension the operation needs.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// The input fails the symplectic-property or symmetry check.
    #[error("matrix validation failed: {0}")]
    Validation(String),

    /// A Cayley form is outside the domain of the requested map
    /// (forbidden eigenvalue, singular form).
    #[error("Cayley domain error: {0}")]
    CayleyDomain(String),

    /// The matrix is too close to a caustic for the requested parametrization.
    #[error("caustic proximity: {0}")]
    CausticProximity(String),

    /// A form/argument kind mismatch (centre vs chord).
    #[error("kind error: {0}")]
    Kind(String),
}

/// Errors from symbol construction and the symplectic Fourier pair.
#[derive(Debug, Clone, Error)]
pub enum SymbolError {
    /// The element sits on a Weyl caustic and is not an exact reflection;
    /// the centre symbol is distributional. Use the chord representation.
    #[error("Weyl caustic: {0}")]
    Caustic(String),

    /// The element sits on a chord caustic (translation-like); the chord
    /// symbol is distributional.
    #[error("chord caustic: {0}")]
    ChordCaustic(String),

    /// The Fourier transform of this symbol is delta-like in some but not
    /// all directions and is not representable as a Gaussian symbol.
    #[error("Fourier domain error: {0}")]
    FourierDomain(String),

    /// Symbol/argument kind mismatch.
    #[error("kind error: {0}")]
    Kind(String),

    /// A delta-flagged symbol cannot be evaluated pointwise.
    #[error("delta symbol: {0}")]
    Delta(String),
}

/// Errors from family tracing and caustic bracketing.
#[derive(Debug, Clone, Error)]
pub enum TraceError {
    /// Events could not be separated at the smallest allowed step.
    #[error("trace resolution failure: {0}")]
    Resolution(String),

    /// A Weyl and a chord caustic coincide at one parameter value.
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    /// The supplied samples do not bracket exactly one event.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// The supplied inputs are inconsistent (range, initial element).
    #[error("invalid trace input: {0}")]
    Input(String),
}

/// Errors from metaplectic products.
#[derive(Debug, Clone, Error)]
pub enum ProductError {
    /// The product transformation sits on a Weyl caustic: the 4N-dimensional
    /// form has a zero eigenvalue and the Gaussian phase is undefined.
    #[error("product caustic: {0}")]
    ProductCaustic(String),

    /// A factor sits on its own Weyl caustic; decompose it through a
    /// reflection product instead.
    #[error("factor caustic: {0}")]
    FactorCaustic(String),

    /// The reflection product needs an invertible centre form.
    #[error("reflection product error: {0}")]
    ReflectionProduct(String),

    /// A symplectic-layer failure while assembling the product.
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

/// Errors from the brute-force oracles.
#[derive(Debug, Clone, Error)]
pub enum OracleError {
    /// The input matrix is (near-)singular; the oracle refuses to guess.
    #[error("oracle domain error: {0}")]
    Domain(String),

    /// Branch continuation or extrapolation did not converge.
    #[error("oracle convergence error: {0}")]
    Convergence(String),

    /// The composition step is too coarse for a causticless sub-step.
    #[error("oracle step error: {0}")]
    Step(String),
}
