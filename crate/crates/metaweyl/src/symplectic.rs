//! Real symplectic linear algebra and Cayley parametrizations.
//!
//! Phase-space points are ordered `(p_1..p_N, q_1..q_N)` and the standard
//! form matrix is, in `(p, q)` blocks,
//!
//! ```text
//!     J = [ 0  -I ]
//!         [ I   0 ]
//! ```
//!
//! so that a symplectic matrix satisfies `M' J M = J`. A symmetric matrix
//! `B` parametrizes `M` through the Cayley map
//!
//! ```text
//!     M = (I + JB)^{-1} (I - JB),      JB = (I + M)^{-1} (I - M),
//! ```
//!
//! which breaks down when `det(I + M) = 0` (a Weyl caustic). The
//! complementary form
//!
//! ```text
//!     M = -(I - JB~)^{-1} (I + JB~),   JB~ = -(I - M)^{-1} (I + M),
//! ```
//!
//! breaks down when `det(I - M) = 0` (a chord caustic, translation-like).
//! The two are related by `B~ = -J B^{-1} J`; they always have the same
//! signature, which is what the phase bookkeeping upstream relies on.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::SymplecticError;

/// Number of degrees of freedom `N`; phase space has dimension `2N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self, SymplecticError> {
        if n == 0 {
            return Err(SymplecticError::Dimension(
                "degrees of freedom must be at least 1".into(),
            ));
        }
        Ok(Dim(n))
    }

    /// Degrees of freedom `N`.
    pub fn n(&self) -> usize {
        self.0
    }

    /// Phase-space dimension `2N`.
    pub fn phase_dim(&self) -> usize {
        2 * self.0
    }
}

/// Numerical tolerances shared across the crate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Symplectic residual: `||M'JM - J||_max <= symplectic * (1 + ||M||_max^2)`.
    pub symplectic: f64,
    /// Allowed asymmetry `||b - b'||_max` before a form is rejected.
    pub symmetry: f64,
    /// Proximity threshold on `|det(I ± M)|` below which Cayley forms are
    /// flagged singular instead of computed.
    pub caustic: f64,
    /// Relative zero threshold for eigenvalue counts.
    pub eigen: f64,
    /// Half-width of the classification boundaries at `tr(M) = ±2`.
    pub class: f64,
    /// Parameter-space bisection tolerance for caustic location.
    pub bisect: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symplectic: 1e-9,
            symmetry: 1e-8,
            caustic: 1e-10,
            eigen: 1e-9,
            class: 1e-9,
            bisect: 1e-10,
        }
    }
}

/// Standard symplectic form matrix `J` on `R^{2N}`, `(p, q)` block ordering.
pub fn standard_j(dim: Dim) -> DMatrix<f64> {
    let n = dim.n();
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -1.0;
        j[(n + k, k)] = 1.0;
    }
    j
}

/// Max-abs-entry residual `||M'JM - J||_max`.
///
/// The caller compares the result against its own tolerance; an odd
/// dimension is the only hard error.
pub fn check_symplectic(m: &DMatrix<f64>) -> Result<f64, SymplecticError> {
    let (r, c) = m.shape();
    if r != c || r % 2 != 0 || r == 0 {
        return Err(SymplecticError::Dimension(format!(
            "expected square matrix of even dimension, got {r}x{c}"
        )));
    }
    let j = standard_j(Dim(r / 2));
    Ok((m.transpose() * &j * m - &j).amax())
}

/// A real `2N x 2N` matrix validated against `M'JM = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    m: DMatrix<f64>,
    dim: Dim,
}

impl SymplecticMatrix {
    /// Validate and wrap a matrix. The residual bound scales with
    /// `1 + ||M||_max^2` so large hyperbolic maps are not rejected for
    /// honest rounding.
    pub fn new(m: DMatrix<f64>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let residual = check_symplectic(&m)?;
        let scale = 1.0 + m.amax() * m.amax();
        if residual > tol.symplectic * scale {
            return Err(SymplecticError::Validation(format!(
                "symplectic residual {residual:.3e} exceeds {:.3e}",
                tol.symplectic * scale
            )));
        }
        let dim = Dim(m.nrows() / 2);
        Ok(SymplecticMatrix { m, dim })
    }

    /// Wrap without validation. For matrices produced by exact constructions.
    pub fn new_unchecked(m: DMatrix<f64>) -> Self {
        assert!(m.is_square() && m.nrows() % 2 == 0 && m.nrows() > 0);
        let dim = Dim(m.nrows() / 2);
        SymplecticMatrix { m, dim }
    }

    pub fn identity(dim: Dim) -> Self {
        SymplecticMatrix {
            m: DMatrix::identity(dim.phase_dim(), dim.phase_dim()),
            dim,
        }
    }

    /// Reflection through the origin, `M = -I`.
    pub fn reflection(dim: Dim) -> Self {
        SymplecticMatrix {
            m: -DMatrix::<f64>::identity(dim.phase_dim(), dim.phase_dim()),
            dim,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// `det(I + M)`; zero at a Weyl caustic.
    pub fn det_i_plus(&self) -> f64 {
        let d = self.m.nrows();
        (DMatrix::identity(d, d) + &self.m).determinant()
    }

    /// `det(I - M)`; zero at a chord caustic.
    pub fn det_i_minus(&self) -> f64 {
        let d = self.m.nrows();
        (DMatrix::identity(d, d) - &self.m).determinant()
    }

    /// Residual of the defining property, `||M'JM - J||_max`.
    pub fn residual(&self) -> f64 {
        check_symplectic(&self.m).expect("validated shape")
    }

    /// Matrix product: `self * rhs` maps `x` to `self(rhs(x))`.
    pub fn compose(&self, rhs: &SymplecticMatrix) -> Result<SymplecticMatrix, SymplecticError> {
        if self.dim != rhs.dim {
            return Err(SymplecticError::Dimension(
                "composing symplectic matrices of different dimension".into(),
            ));
        }
        Ok(SymplecticMatrix {
            m: &self.m * &rhs.m,
            dim: self.dim,
        })
    }

    pub fn try_inverse(&self) -> Option<SymplecticMatrix> {
        self.m.clone().try_inverse().map(|m| SymplecticMatrix {
            m,
            dim: self.dim,
        })
    }
}

/// Which Cayley parametrization a symmetric form belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CayleyKind {
    /// `B`: Hessian of the centre generating function `S(x) = x·Bx`.
    Centre,
    /// `B~`: Hessian of the chord generating function `S~(ξ) = ξ·B~ξ/4`.
    Chord,
}

/// Symmetric `2N x 2N` matrix parametrizing a symplectic map.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyForm {
    b: DMatrix<f64>,
    kind: CayleyKind,
    dim: Dim,
}

impl CayleyForm {
    /// Validate symmetry (within `tol.symmetry`, after which the stored form
    /// is exactly symmetrized).
    pub fn new(
        b: DMatrix<f64>,
        kind: CayleyKind,
        tol: &Tolerances,
    ) -> Result<Self, SymplecticError> {
        let (r, c) = b.shape();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(SymplecticError::Dimension(format!(
                "expected square matrix of even dimension, got {r}x{c}"
            )));
        }
        let asym = (&b - b.transpose()).amax();
        let scale = 1.0 + b.amax();
        if asym > tol.symmetry * scale {
            return Err(SymplecticError::Validation(format!(
                "asymmetry {asym:.3e} exceeds {:.3e}",
                tol.symmetry * scale
            )));
        }
        let sym = (&b + b.transpose()) * 0.5;
        let dim = Dim(r / 2);
        Ok(CayleyForm { b: sym, kind, dim })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn kind(&self) -> CayleyKind {
        self.kind
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn det(&self) -> f64 {
        self.b.determinant()
    }

    /// `J B`, whose eigenvalues come in `±γ` pairs (so `tr(JB) = 0`).
    pub fn j_b(&self) -> DMatrix<f64> {
        standard_j(self.dim) * &self.b
    }

    /// Centre generating function `S(x) = x·Bx`.
    pub fn centre_action(&self, x: &PhasePoint) -> Result<f64, SymplecticError> {
        if self.kind != CayleyKind::Centre {
            return Err(SymplecticError::Kind(
                "centre action requested from a chord-kind form".into(),
            ));
        }
        self.check_arg_dim(x.coords())?;
        Ok((x.coords().transpose() * &self.b * x.coords())[(0, 0)])
    }

    /// Chord generating function `S~(ξ) = ξ·B~ξ / 4`.
    pub fn chord_action(&self, xi: &Chord) -> Result<f64, SymplecticError> {
        if self.kind != CayleyKind::Chord {
            return Err(SymplecticError::Kind(
                "chord action requested from a centre-kind form".into(),
            ));
        }
        self.check_arg_dim(xi.coords())?;
        Ok(0.25 * (xi.coords().transpose() * &self.b * xi.coords())[(0, 0)])
    }

    fn check_arg_dim(&self, v: &DVector<f64>) -> Result<(), SymplecticError> {
        if v.len() != self.dim.phase_dim() {
            return Err(SymplecticError::Dimension(format!(
                "argument length {} does not match phase dimension {}",
                v.len(),
                self.dim.phase_dim()
            )));
        }
        Ok(())
    }
}

/// A phase-space point `x = (p, q)`, units of sqrt(action).
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint(DVector<f64>);

/// A chord `ξ = x⁺ - x⁻`, same ordering and units as [`PhasePoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct Chord(DVector<f64>);

macro_rules! phase_vector_impl {
    ($name:ident) => {
        impl $name {
            pub fn new(coords: DVector<f64>) -> Result<Self, SymplecticError> {
                if coords.len() % 2 != 0 || coords.is_empty() {
                    return Err(SymplecticError::Dimension(format!(
                        "phase-space vector length {} is not even and positive",
                        coords.len()
                    )));
                }
                Ok($name(coords))
            }

            pub fn from_slice(coords: &[f64]) -> Result<Self, SymplecticError> {
                Self::new(DVector::from_column_slice(coords))
            }

            pub fn zero(dim: Dim) -> Self {
                $name(DVector::zeros(dim.phase_dim()))
            }

            pub fn coords(&self) -> &DVector<f64> {
                &self.0
            }

            pub fn dim(&self) -> Dim {
                Dim(self.0.len() / 2)
            }
        }
    };
}

phase_vector_impl!(PhasePoint);
phase_vector_impl!(Chord);

/// Quadratic Hamiltonian `H(x) = x·Hx / 2`, `H` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadHamiltonian {
    h: DMatrix<f64>,
    dim: Dim,
}

impl QuadHamiltonian {
    pub fn new(h: DMatrix<f64>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let (r, c) = h.shape();
        if r != c || r % 2 != 0 || r == 0 {
            return Err(SymplecticError::Dimension(format!(
                "expected square matrix of even dimension, got {r}x{c}"
            )));
        }
        let asym = (&h - h.transpose()).amax();
        if asym > tol.symmetry * (1.0 + h.amax()) {
            return Err(SymplecticError::Validation(format!(
                "Hamiltonian matrix asymmetry {asym:.3e}"
            )));
        }
        let sym = (&h + h.transpose()) * 0.5;
        let dim = Dim(r / 2);
        Ok(QuadHamiltonian { h: sym, dim })
    }

    /// Harmonic oscillator `H(x) = (ω/2)(p² + q²)` on one degree of freedom.
    pub fn harmonic(omega: f64) -> Self {
        QuadHamiltonian {
            h: DMatrix::identity(2, 2) * omega,
            dim: Dim(1),
        }
    }

    /// Inverted oscillator `H(x) = (λ/2)(p² - q²)`.
    pub fn inverted(lambda: f64) -> Self {
        QuadHamiltonian {
            h: DMatrix::from_diagonal(&DVector::from_column_slice(&[lambda, -lambda])),
            dim: Dim(1),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }
}

/// Flow of a quadratic Hamiltonian: `M(t) = exp(t J H)`.
///
/// `exp` is nalgebra's Padé scaling-and-squaring; on the `2N <= 8` matrices
/// used here it is accurate well below the 1e-12 the phase bookkeeping needs.
pub fn flow(h: &QuadHamiltonian, t: f64) -> SymplecticMatrix {
    let gen = standard_j(h.dim) * h.matrix() * t;
    SymplecticMatrix {
        m: gen.exp(),
        dim: h.dim,
    }
}

/// Both Cayley forms of a symplectic matrix; a side is `None` when the
/// corresponding determinant is within the caustic threshold.
#[derive(Debug, Clone)]
pub struct CayleyPair {
    pub centre: Option<CayleyForm>,
    pub chord: Option<CayleyForm>,
    pub det_i_plus: f64,
    pub det_i_minus: f64,
}

/// Compute `B` (centre) and `B~` (chord) from `M`, flagging a side as
/// singular instead of inverting a near-caustic matrix.
pub fn cayley_pair(m: &SymplecticMatrix, tol: &Tolerances) -> CayleyPair {
    let d = m.matrix().nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let j = standard_j(m.dim());

    let i_plus = &id + m.matrix();
    let i_minus = &id - m.matrix();
    let det_i_plus = i_plus.determinant();
    let det_i_minus = i_minus.determinant();

    let centre = if det_i_plus.abs() > tol.caustic {
        i_plus.clone().try_inverse().map(|inv| {
            // JB = (I+M)^{-1}(I-M); B = -J (JB), symmetrized.
            let jb = &inv * &i_minus;
            let b = -&j * jb;
            let b = (&b + b.transpose()) * 0.5;
            CayleyForm {
                b,
                kind: CayleyKind::Centre,
                dim: m.dim(),
            }
        })
    } else {
        None
    };

    let chord = if det_i_minus.abs() > tol.caustic {
        i_minus.clone().try_inverse().map(|inv| {
            // JB~ = -(I-M)^{-1}(I+M); B~ = -J (JB~), symmetrized.
            let jbt = -(&inv * &i_plus);
            let bt = -&j * jbt;
            let bt = (&bt + bt.transpose()) * 0.5;
            CayleyForm {
                b: bt,
                kind: CayleyKind::Chord,
                dim: m.dim(),
            }
        })
    } else {
        None
    };

    CayleyPair {
        centre,
        chord,
        det_i_plus,
        det_i_minus,
    }
}

/// Centre form `B` of `M`, or a caustic-proximity error.
pub fn centre_form(m: &SymplecticMatrix, tol: &Tolerances) -> Result<CayleyForm, SymplecticError> {
    cayley_pair(m, tol).centre.ok_or_else(|| {
        SymplecticError::CausticProximity(format!(
            "det(I+M) = {:.3e} is within the caustic threshold",
            m.det_i_plus()
        ))
    })
}

/// Chord form `B~` of `M`, or a caustic-proximity error.
pub fn chord_form(m: &SymplecticMatrix, tol: &Tolerances) -> Result<CayleyForm, SymplecticError> {
    cayley_pair(m, tol).chord.ok_or_else(|| {
        SymplecticError::CausticProximity(format!(
            "det(I-M) = {:.3e} is within the caustic threshold",
            m.det_i_minus()
        ))
    })
}

/// Reconstruct `M` from either Cayley form.
///
/// The centre map is undefined when `JB` has eigenvalue `-1`
/// (`det(I + JB) = 0`), the chord map when `JB~` has eigenvalue `+1`.
pub fn m_from_cayley(c: &CayleyForm, tol: &Tolerances) -> Result<SymplecticMatrix, SymplecticError> {
    let d = c.matrix().nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let jb = c.j_b();

    let (lhs, rhs, what) = match c.kind {
        CayleyKind::Centre => (&id + &jb, &id - &jb, "I + JB"),
        CayleyKind::Chord => (&id - &jb, -(&id + &jb), "I - JB~"),
    };
    let det = lhs.determinant();
    // The determinant scale grows like ||JB||^{2N}; normalize the zero test.
    let scale = (1.0 + jb.amax()).powi(d as i32);
    if det.abs() <= tol.eigen * scale {
        return Err(SymplecticError::CayleyDomain(format!(
            "det({what}) = {det:.3e}: forbidden eigenvalue, no finite symplectic image"
        )));
    }
    let inv = lhs
        .try_inverse()
        .ok_or_else(|| SymplecticError::CayleyDomain(format!("{what} not invertible")))?;
    Ok(SymplecticMatrix {
        m: inv * rhs,
        dim: c.dim,
    })
}

/// Complementary form `B~ = -J B^{-1} J` (an involution; preserves kind
/// complementarity, signature, and the sign of the determinant).
pub fn btilde_from_b(c: &CayleyForm, tol: &Tolerances) -> Result<CayleyForm, SymplecticError> {
    let det = c.det();
    let scale = (1.0 + c.matrix().amax()).powi(c.matrix().nrows() as i32);
    if det.abs() <= tol.caustic * scale {
        return Err(SymplecticError::CayleyDomain(format!(
            "det(B) = {det:.3e}: the transformation is a shear through the identity"
        )));
    }
    let j = standard_j(c.dim);
    let inv = c
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| SymplecticError::CayleyDomain("B not invertible".into()))?;
    let bt = -&j * inv * &j;
    let bt = (&bt + bt.transpose()) * 0.5;
    Ok(CayleyForm {
        b: bt,
        kind: match c.kind {
            CayleyKind::Centre => CayleyKind::Chord,
            CayleyKind::Chord => CayleyKind::Centre,
        },
        dim: c.dim,
    })
}

/// Inertia of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// `σ = n_plus - n_minus`.
    pub sigma: i64,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Eigenvalues with `|λ| <= zero_tol`; nonzero signals degeneracy.
    pub n_zero: usize,
}

/// Eigenvalue-count signature of a symmetric matrix.
///
/// `zero_tol` is absolute; callers usually pass
/// `tol.eigen * max(1, ||c||_max)`.
pub fn signature(c: &DMatrix<f64>, zero_tol: f64) -> Result<Signature, SymplecticError> {
    let asym = (c - c.transpose()).amax();
    if asym > 1e-8 * (1.0 + c.amax()) {
        return Err(SymplecticError::Validation(format!(
            "signature of a non-symmetric matrix (asymmetry {asym:.3e})"
        )));
    }
    let sym = (c + c.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let mut n_plus = 0;
    let mut n_minus = 0;
    let mut n_zero = 0;
    for &lambda in eig.iter() {
        if lambda > zero_tol {
            n_plus += 1;
        } else if lambda < -zero_tol {
            n_minus += 1;
        } else {
            n_zero += 1;
        }
    }
    Ok(Signature {
        sigma: n_plus as i64 - n_minus as i64,
        n_plus,
        n_minus,
        n_zero,
    })
}

/// Default zero threshold for [`signature`]: `1e-9 * max(1, ||c||_max)`.
pub fn signature_zero_tol(c: &DMatrix<f64>) -> f64 {
    1e-9 * 1.0_f64.max(c.amax())
}

/// Signature with the default zero threshold.
pub fn signature_default(c: &DMatrix<f64>) -> Result<Signature, SymplecticError> {
    signature(c, signature_zero_tol(c))
}

/// Classification of a single-degree-of-freedom symplectic map by `tr(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionClass {
    Identity,
    /// `|tr M| < 2`, `det B > 0`.
    Elliptic,
    /// `tr M = 2`, `M != I`: shear, `det B = 0`.
    ParabolicShear,
    /// `tr M > 2`, `-1 < det B < 0`.
    SimpleHyperbolic,
    /// Normal form `[[-1, 2b'], [0, -1]]`, `b' != 0`: a shear composed with
    /// the reflection. Kept for naming the `tr M = -2` normal form;
    /// [`classify_n1`] reports such matrices as [`MotionClass::Caustic`],
    /// which is the role they play for the Weyl symbol.
    ParabolicShearReflected,
    /// `tr M < -2`, `det B < -1`.
    HyperbolicWithReflection,
    /// `M = -I` exactly.
    Reflection,
    /// `tr M = -2`, `M != -I`: `det(I+M) = 0` with one eigendirection.
    Caustic,
}

impl MotionClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            MotionClass::Identity => "identity",
            MotionClass::Elliptic => "elliptic",
            MotionClass::ParabolicShear => "parabolic_shear",
            MotionClass::SimpleHyperbolic => "simple_hyperbolic",
            MotionClass::ParabolicShearReflected => "parabolic_shear_reflected",
            MotionClass::HyperbolicWithReflection => "hyperbolic_with_reflection",
            MotionClass::Reflection => "reflection",
            MotionClass::Caustic => "caustic",
        }
    }
}

/// Classify an `N = 1` map per the trace thresholds (`tol.class` wide).
pub fn classify_n1(m: &SymplecticMatrix, tol: &Tolerances) -> Result<MotionClass, SymplecticError> {
    if m.dim().n() != 1 {
        return Err(SymplecticError::Dimension(format!(
            "classification is defined for N = 1, got N = {}",
            m.dim().n()
        )));
    }
    let tr = m.trace();
    let id = DMatrix::<f64>::identity(2, 2);
    if (tr - 2.0).abs() <= tol.class {
        return Ok(if (m.matrix() - &id).amax() <= tol.class {
            MotionClass::Identity
        } else {
            MotionClass::ParabolicShear
        });
    }
    if (tr + 2.0).abs() <= tol.class {
        return Ok(if (m.matrix() + &id).amax() <= tol.class {
            MotionClass::Reflection
        } else {
            MotionClass::Caustic
        });
    }
    if tr.abs() < 2.0 {
        Ok(MotionClass::Elliptic)
    } else if tr > 2.0 {
        Ok(MotionClass::SimpleHyperbolic)
    } else {
        Ok(MotionClass::HyperbolicWithReflection)
    }
}

/// Endpoints of the trajectory with centre `x`: `ξ = -2 J B x`,
/// `x± = x ± ξ/2`, so that `x⁺ = M x⁻`.
pub fn endpoints_from_centre(
    c: &CayleyForm,
    x: &PhasePoint,
) -> Result<(PhasePoint, PhasePoint, Chord), SymplecticError> {
    if c.kind != CayleyKind::Centre {
        return Err(SymplecticError::Kind(
            "endpoints need a centre-kind form".into(),
        ));
    }
    c.check_arg_dim(x.coords())?;
    let j = standard_j(c.dim);
    let xi = -2.0 * &j * c.matrix() * x.coords();
    let x_minus = x.coords() - &xi * 0.5;
    let x_plus = x.coords() + &xi * 0.5;
    Ok((PhasePoint(x_minus), PhasePoint(x_plus), Chord(xi)))
}

/// Centre recovered from a chord through the chord generating function:
/// `x = J ∂S~/∂ξ = (1/2) J B~ ξ`.
pub fn centre_from_chord(c: &CayleyForm, xi: &Chord) -> Result<PhasePoint, SymplecticError> {
    if c.kind != CayleyKind::Chord {
        return Err(SymplecticError::Kind(
            "centre recovery needs a chord-kind form".into(),
        ));
    }
    c.check_arg_dim(xi.coords())?;
    let j = standard_j(c.dim);
    Ok(PhasePoint(0.5 * &j * c.matrix() * xi.coords()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn rotation(theta: f64) -> SymplecticMatrix {
        let (s, c) = theta.sin_cos();
        SymplecticMatrix::new_unchecked(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
    }

    #[test]
    fn j_squares_to_minus_identity() {
        for n in 1..=3 {
            let j = standard_j(Dim(n));
            assert_abs_diff_eq!(
                (&j * &j + DMatrix::<f64>::identity(2 * n, 2 * n)).amax(),
                0.0
            );
        }
    }

    #[test]
    fn residual_identity_is_zero() {
        let m = DMatrix::<f64>::identity(2, 2);
        assert_eq!(check_symplectic(&m).unwrap(), 0.0);
    }

    #[test]
    fn residual_rotation_is_tiny() {
        let m = rotation(0.7);
        assert!(m.residual() <= 1e-12);
    }

    #[test]
    fn residual_scaled_identity() {
        // M = diag(2, 2): M'JM = 4J, so the max-abs residual is 3.
        let m = DMatrix::<f64>::identity(2, 2) * 2.0;
        assert_abs_diff_eq!(check_symplectic(&m).unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn odd_dimension_rejected() {
        let m = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            check_symplectic(&m),
            Err(SymplecticError::Dimension(_))
        ));
    }

    #[test]
    fn cayley_of_identity() {
        let m = SymplecticMatrix::identity(Dim(1));
        let pair = cayley_pair(&m, &tols());
        let b = pair.centre.expect("B exists at the identity");
        assert_abs_diff_eq!(b.matrix().amax(), 0.0);
        assert!(pair.chord.is_none(), "B~ is singular at the identity");
    }

    #[test]
    fn cayley_of_rotation_matches_tangent_half_angle() {
        // B(t) = -tan(ωt/2) I for the harmonic flow.
        for &theta in &[0.3, 1.2, 2.0, -0.8] {
            let m = rotation(theta);
            let b = centre_form(&m, &tols()).unwrap();
            let expect = -(theta / 2.0).tan();
            let diff = (b.matrix() - DMatrix::<f64>::identity(2, 2) * expect).amax();
            assert!(diff < 1e-12, "theta={theta}: diff={diff:.3e}");
        }
    }

    #[test]
    fn cayley_of_shear() {
        // M = [[1,0],[-2b,1]] with b = 1 has B = [[1,0],[0,0]].
        let m = SymplecticMatrix::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -2.0, 1.0]),
            &tols(),
        )
        .unwrap();
        let b = centre_form(&m, &tols()).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!((b.matrix() - expect).amax() < 1e-14);
    }

    #[test]
    fn m_from_zero_forms() {
        let b = CayleyForm::new(DMatrix::zeros(2, 2), CayleyKind::Centre, &tols()).unwrap();
        let m = m_from_cayley(&b, &tols()).unwrap();
        assert!((m.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);

        let bt = CayleyForm::new(DMatrix::zeros(2, 2), CayleyKind::Chord, &tols()).unwrap();
        let m = m_from_cayley(&bt, &tols()).unwrap();
        assert!((m.matrix() + DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);
    }

    #[test]
    fn m_from_minus_identity_form_is_quarter_rotation() {
        let b = CayleyForm::new(
            -DMatrix::<f64>::identity(2, 2),
            CayleyKind::Centre,
            &tols(),
        )
        .unwrap();
        let m = m_from_cayley(&b, &tols()).unwrap();
        let expect = rotation(std::f64::consts::FRAC_PI_2);
        assert!((m.matrix() - expect.matrix()).amax() < 1e-15);
    }

    #[test]
    fn btilde_examples() {
        let tol = tols();
        // B = -I: B~ = -J(-I)^{-1}J = -I.
        let b = CayleyForm::new(-DMatrix::<f64>::identity(2, 2), CayleyKind::Centre, &tol).unwrap();
        let bt = btilde_from_b(&b, &tol).unwrap();
        assert!((bt.matrix() + DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
        assert_eq!(bt.kind(), CayleyKind::Chord);

        // B = diag(γ, -γ): -J diag(u, v) J = diag(v, u), so
        // B~ = diag(-1/γ, 1/γ); eigenvalues ±1/γ, signature 0 both.
        let gamma = 0.37;
        let b = CayleyForm::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(&[gamma, -gamma])),
            CayleyKind::Centre,
            &tol,
        )
        .unwrap();
        let bt = btilde_from_b(&b, &tol).unwrap();
        let expect =
            DMatrix::from_diagonal(&DVector::from_column_slice(&[-1.0 / gamma, 1.0 / gamma]));
        assert!((bt.matrix() - expect).amax() < 1e-14);
        assert_eq!(signature_default(b.matrix()).unwrap().sigma, 0);
        assert_eq!(signature_default(bt.matrix()).unwrap().sigma, 0);

        // Singular B is a domain error.
        let b = CayleyForm::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            CayleyKind::Centre,
            &tol,
        )
        .unwrap();
        assert!(matches!(
            btilde_from_b(&b, &tol),
            Err(SymplecticError::CayleyDomain(_))
        ));
    }

    #[test]
    fn signature_counts() {
        // Elliptic branch of the oscillator: both eigenvalues negative.
        let theta: f64 = 1.1; // 0 < ωt < π
        let b = DMatrix::<f64>::identity(2, 2) * (-(theta / 2.0).tan());
        let s = signature_default(&b).unwrap();
        assert_eq!((s.sigma, s.n_minus), (-2, 2));

        let b = DMatrix::from_diagonal(&DVector::from_column_slice(&[0.9, -0.9]));
        assert_eq!(signature_default(&b).unwrap().sigma, 0);

        let z = DMatrix::<f64>::zeros(4, 4);
        let s = signature_default(&z).unwrap();
        assert_eq!((s.sigma, s.n_zero), (0, 4));
    }

    #[test]
    fn classification_examples() {
        let tol = tols();
        let m = rotation(std::f64::consts::FRAC_PI_2);
        assert_eq!(classify_n1(&m, &tol).unwrap(), MotionClass::Elliptic);

        let l = 0.8f64;
        let m = SymplecticMatrix::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(&[l.exp(), (-l).exp()])),
            &tol,
        )
        .unwrap();
        assert_eq!(classify_n1(&m, &tol).unwrap(), MotionClass::SimpleHyperbolic);

        let m = SymplecticMatrix::new(
            -DMatrix::from_diagonal(&DVector::from_column_slice(&[l.exp(), (-l).exp()])),
            &tol,
        )
        .unwrap();
        assert_eq!(
            classify_n1(&m, &tol).unwrap(),
            MotionClass::HyperbolicWithReflection
        );

        // Generic caustic: reflected shear with b' != 0.
        let m = SymplecticMatrix::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -1.0]),
            &tol,
        )
        .unwrap();
        assert_eq!(classify_n1(&m, &tol).unwrap(), MotionClass::Caustic);

        assert_eq!(
            classify_n1(&SymplecticMatrix::reflection(Dim(1)), &tol).unwrap(),
            MotionClass::Reflection
        );
        assert_eq!(
            classify_n1(&SymplecticMatrix::identity(Dim(1)), &tol).unwrap(),
            MotionClass::Identity
        );
        let m = SymplecticMatrix::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -2.0, 1.0]),
            &tol,
        )
        .unwrap();
        assert_eq!(classify_n1(&m, &tol).unwrap(), MotionClass::ParabolicShear);
    }

    #[test]
    fn flow_examples() {
        let tol = tols();
        // Harmonic: rotation by ωt.
        let h = QuadHamiltonian::harmonic(1.3);
        let m = flow(&h, 0.9);
        let expect = rotation(1.3 * 0.9);
        assert!((m.matrix() - expect.matrix()).amax() < 1e-13);
        assert!(m.residual() < 1e-12);

        // t = 0 is the identity.
        let m = flow(&h, 0.0);
        assert!((m.matrix() - DMatrix::<f64>::identity(2, 2)).amax() < 1e-15);

        // Inverted oscillator: cosh/sinh map.
        let lam = 0.6;
        let t = 1.4;
        let m = flow(&QuadHamiltonian::inverted(lam), t);
        let (ch, sh) = ((lam * t).cosh(), (lam * t).sinh());
        let expect = DMatrix::from_row_slice(2, 2, &[ch, sh, sh, ch]);
        assert!((m.matrix() - expect).amax() < 1e-12);

        // Group property.
        let a = flow(&h, 0.4).compose(&flow(&h, 0.9)).unwrap();
        let b = flow(&h, 1.3);
        assert!((a.matrix() - b.matrix()).amax() < 1e-12);
        let _ = tol;
    }

    #[test]
    fn endpoints_examples() {
        let tol = tols();
        // B = 0: identity map, ξ = 0.
        let b = CayleyForm::new(DMatrix::zeros(2, 2), CayleyKind::Centre, &tol).unwrap();
        let x = PhasePoint::from_slice(&[0.2, -1.1]).unwrap();
        let (xm, xp, xi) = endpoints_from_centre(&b, &x).unwrap();
        assert_abs_diff_eq!(xi.coords().amax(), 0.0);
        assert_eq!(xm, x);
        assert_eq!(xp, x);

        // B = -I, x = (0, 1): ξ = 2Jx = (-2, 0); and x⁺ = M x⁻.
        let b = CayleyForm::new(-DMatrix::<f64>::identity(2, 2), CayleyKind::Centre, &tol).unwrap();
        let x = PhasePoint::from_slice(&[0.0, 1.0]).unwrap();
        let (xm, xp, xi) = endpoints_from_centre(&b, &x).unwrap();
        assert!((xi.coords() - DVector::from_column_slice(&[-2.0, 0.0])).amax() < 1e-14);
        let m = m_from_cayley(&b, &tol).unwrap();
        assert!((m.matrix() * xm.coords() - xp.coords()).amax() < 1e-14);
    }

    #[test]
    fn generating_values() {
        let tol = tols();
        let theta: f64 = 0.9;
        let b = CayleyForm::new(
            DMatrix::<f64>::identity(2, 2) * (-(theta / 2.0).tan()),
            CayleyKind::Centre,
            &tol,
        )
        .unwrap();
        let x = PhasePoint::from_slice(&[0.7, -0.4]).unwrap();
        let s = b.centre_action(&x).unwrap();
        let expect = -(theta / 2.0).tan() * (0.7f64.powi(2) + 0.4f64.powi(2));
        assert_abs_diff_eq!(s, expect, epsilon = 1e-14);

        let bt = CayleyForm::new(
            DMatrix::<f64>::identity(2, 2) * (theta / 2.0).tan().recip(),
            CayleyKind::Chord,
            &tol,
        )
        .unwrap();
        let xi = Chord::from_slice(&[0.7, -0.4]).unwrap();
        let st = bt.chord_action(&xi).unwrap();
        let expect = 0.25 / (theta / 2.0).tan() * (0.7f64.powi(2) + 0.4f64.powi(2));
        assert_abs_diff_eq!(st, expect, epsilon = 1e-14);

        // Kind mismatch is an error.
        assert!(matches!(
            bt.centre_action(&x),
            Err(SymplecticError::Kind(_))
        ));

        // Centre recovery from the chord form: x = (1/2) J B~ ξ maps the
        // chord of (B, x) back to x.
        let b = centre_form(&rotation(theta), &tol).unwrap();
        let bt = btilde_from_b(&b, &tol).unwrap();
        let (_, _, xi) = endpoints_from_centre(&b, &x).unwrap();
        let back = centre_from_chord(&bt, &xi).unwrap();
        assert!((back.coords() - x.coords()).amax() < 1e-12);
    }
}
