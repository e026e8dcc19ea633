//! Exact Weyl-representation calculus for metaplectic operators.
//!
//! The crate works with the linear (tangent-map) sector of phase-space
//! quantum mechanics: real symplectic matrices on `R^{2N}`, their Cayley
//! parametrizations by symmetric matrices, and the Gaussian Weyl/chord
//! propagator symbols of the corresponding metaplectic operators. The overall
//! phase of a symbol is kept as a continuous real winding rather than a
//! principal branch, which is what resolves the Maslov phase jumps when a
//! one-parameter family of operators crosses a caustic.
//!
//! Modules:
//!
//! - [`symplectic`]: symplectic linear algebra, Cayley forms, signatures,
//!   classification, quadratic-Hamiltonian flows.
//! - [`symbols`]: Gaussian Weyl and chord symbols, the symplectic Fourier
//!   pair between them, translation and reflection building blocks.
//! - [`tracker`]: one-parameter families, caustic detection, and the
//!   signature-difference phase-jump rule.
//! - [`products`]: phase-correct products of metaplectic elements and the
//!   two-oscillator closed forms.
//! - [`oracle`]: independent brute-force validators (Fresnel signature rule,
//!   regularized branch continuation, fine-step path composition, damped
//!   quadrature of the product integral).
//! - [`families`]: reference families and deterministic random samples used
//!   by the CLI and the test suites.
//!
//! Conventions, fixed throughout: phase-space coordinates are ordered
//! `(p_1..p_N, q_1..q_N)`, the symplectic form matrix is
//! `J = [[0, -I], [I, 0]]` in `(p, q)` blocks, and the wedge product is
//! `x ∧ y = y · J x`. Phases are radians and are never reduced mod 2π unless
//! a comparison explicitly says so.

pub mod error;
pub mod families;
pub mod oracle;
pub mod products;
pub mod symbols;
pub mod symplectic;
pub mod tracker;
pub mod wire;

pub use error::{OracleError, ProductError, SymbolError, SymplecticError, TraceError};
pub use symplectic::{
    CayleyForm, CayleyKind, Chord, Dim, MotionClass, PhasePoint, QuadHamiltonian, Signature,
    SymplecticMatrix, Tolerances,
};

/// Real scalar used everywhere in the crate.
///
/// The calculus is pinned to `f64`: the caustic/bisection tolerances the
/// library promises (1e-9 .. 1e-12) are not reachable in `f32`, and the
/// branch bookkeeping has no use for exact scalar types.
pub type Scalar = f64;

/// Complex value of a symbol evaluation.
pub type ComplexValue = num_complex::Complex<f64>;
