//! Phase-correct products of metaplectic elements.
//!
//! The product of two Gaussian Weyl symbols is a 4N-dimensional Gaussian
//! integral whose quadratic form is the symmetric block matrix
//!
//! ```text
//!     W = [ B₁  -J ]
//!         [  J  B₂ ]
//! ```
//!
//! (`𝔅 - 𝕁` with `𝔅 = diag(B₁, B₂)`, `𝕁 = [[0, J], [-J, 0]]`). The
//! stationary-phase evaluation is exact and contributes the phase
//! `Θ = (π/4)σ(W) = π(N - 𝔑₋/2)`, with `𝔑₋` the number of negative
//! eigenvalues of `W`, on top of the factors' windings. The determinant
//!
//! ```text
//!     Δ = det(W) = det(I + JB₂JB₁) = det(I + JB₁JB₂)
//! ```
//!
//! controls existence: `Δ = 0` exactly when the product transformation sits
//! on a Weyl caustic, and a sign change of `Δ` along a product family
//! coincides with a sign change of `det(I + M₂M₁)`.
//!
//! Products with the affine generators stay 2N-dimensional: a translation
//! adds a linear phase and preserves the overall sign; a reflection turns
//! the chord structure of the factor into a centre symbol with quadratic
//! form `-B~₁` about the reflection point and adds `(π/4)σ(B₁)` (standard
//! variant) or `(π/4)σ(B₁) - Nπ/2` (metaplectic variant, which is the group
//! element).

use nalgebra::{DMatrix, DVector};

use crate::error::ProductError;
use crate::symbols::{
    reflection_symbol, EvaluationContext, GaussianSymbol, MetaplecticElement, ReflectionVariant,
    SymbolKind,
};
use crate::symplectic::{
    btilde_from_b, centre_form, signature, standard_j, CayleyForm, Chord, PhasePoint, Tolerances,
};
use crate::families::harmonic_element;

/// The symmetric 4N×4N quadratic form of the product Gaussian integral.
#[derive(Debug, Clone)]
pub struct DoubleForm {
    matrix: DMatrix<f64>,
}

impl DoubleForm {
    /// Assemble `W = [[B₁, -J], [J, B₂]]` from two centre forms.
    pub fn from_factors(b1: &CayleyForm, b2: &CayleyForm) -> Result<Self, ProductError> {
        if b1.dim() != b2.dim() {
            return Err(ProductError::Symplectic(
                crate::SymplecticError::Dimension("factor dimensions differ".into()),
            ));
        }
        let d = b1.matrix().nrows();
        let j = standard_j(b1.dim());
        let mut w = DMatrix::zeros(2 * d, 2 * d);
        w.view_mut((0, 0), (d, d)).copy_from(b1.matrix());
        w.view_mut((d, d), (d, d)).copy_from(b2.matrix());
        w.view_mut((0, d), (d, d)).copy_from(&(-&j));
        w.view_mut((d, 0), (d, d)).copy_from(&j);
        Ok(DoubleForm { matrix: w })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        self.matrix.symmetric_eigenvalues()
    }
}

/// Result of a metaplectic product.
#[derive(Debug, Clone)]
pub struct ProductResult {
    /// `M₂M₁` with the resolved continuous winding.
    pub element: MetaplecticElement,
    /// `Δ = det(I + JB₂JB₁)`.
    pub delta: f64,
    /// Gaussian phase increment `Θ = π(N - 𝔑₋/2)`.
    pub theta: f64,
    /// Negative-eigenvalue count `𝔑₋` of the double form.
    pub n_minus_double: usize,
}

/// Compose two metaplectic elements, `U = U₂U₁`.
///
/// The winding of the result is `φ₁ + φ₂ + Θ`. Factors on their own Weyl
/// caustics have no centre form and must be decomposed through
/// [`product_with_reflection`]; a zero eigenvalue of the double form means
/// the product itself is on a caustic and is refused.
pub fn product_metaplectic(
    e2: &MetaplecticElement,
    e1: &MetaplecticElement,
    _ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<ProductResult, ProductError> {
    let n = e1.dim().n();
    let b1 = centre_form(e1.m(), tol).map_err(|e| {
        ProductError::FactorCaustic(format!("first factor has no centre form: {e}"))
    })?;
    let b2 = centre_form(e2.m(), tol).map_err(|e| {
        ProductError::FactorCaustic(format!("second factor has no centre form: {e}"))
    })?;

    let w = DoubleForm::from_factors(&b1, &b2)?;
    let eig = w.eigenvalues();
    let zero_tol = tol.eigen * (1.0 + w.matrix().amax());
    let mut n_minus = 0usize;
    for &lambda in eig.iter() {
        if lambda.abs() <= zero_tol {
            return Err(ProductError::ProductCaustic(format!(
                "double form has eigenvalue {lambda:.3e}: product sits on a Weyl caustic"
            )));
        }
        if lambda < 0.0 {
            n_minus += 1;
        }
    }
    let theta = std::f64::consts::PI * (n as f64 - n_minus as f64 / 2.0);

    let j = standard_j(e1.dim());
    let d = 2 * n;
    let delta = (DMatrix::<f64>::identity(d, d) + &j * b2.matrix() * &j * b1.matrix())
        .determinant();

    let m = e2.m().compose(e1.m())?;
    let element = MetaplecticElement::from_parts(
        m,
        e1.phase_winding() + e2.phase_winding() + theta,
    );
    Ok(ProductResult {
        element,
        delta,
        theta,
        n_minus_double: n_minus,
    })
}

/// Weyl symbol of `T_ξ · U₁` (translation applied after the element).
///
/// The phase is `(x - ξ/2)·B₁(x - ξ/2) + x·Jξ`; no Gaussian phase is gained,
/// so the overall sign of the factor is preserved. The constant part
/// `ξ·B₁ξ/4` is folded into the symbol phase.
pub fn product_with_translation(
    e1: &MetaplecticElement,
    xi: &Chord,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<GaussianSymbol, ProductError> {
    let n = e1.dim().n();
    let b1 = centre_form(e1.m(), tol)
        .map_err(|e| ProductError::FactorCaustic(format!("factor has no centre form: {e}")))?;
    let j = standard_j(e1.dim());
    let lin = (&j - b1.matrix()) * xi.coords();
    let quarter = 0.25 * (xi.coords().transpose() * b1.matrix() * xi.coords())[(0, 0)];
    let modulus = 2f64.powi(n as i32) / e1.m().det_i_plus().abs().sqrt();
    GaussianSymbol::new(
        SymbolKind::Centre,
        b1.matrix().clone(),
        lin,
        modulus,
        e1.phase_winding() + quarter / ctx.hbar,
        false,
        ctx.hbar,
    )
    .map_err(|e| ProductError::ReflectionProduct(e.to_string()))
}

/// Weyl symbol of `R_y · U₁` (reflection applied after the element).
///
/// The result is again a Gaussian centre symbol, with quadratic form `-B~₁`
/// about `y` and the linear term `2y·Jx` of the inhomogeneous generating
/// function. Phase increment: `(π/4)σ(B₁)` for the standard reflection,
/// minus `Nπ/2` for the metaplectic one (the group element, for which the
/// `i^N` of the Gaussian integral cancels).
pub fn product_with_reflection(
    e1: &MetaplecticElement,
    y: &PhasePoint,
    variant: ReflectionVariant,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<GaussianSymbol, ProductError> {
    let n = e1.dim().n();
    let d = 2 * n;
    let id = DMatrix::<f64>::identity(d, d);

    // R · I = R: return the reflection symbol directly.
    if (e1.m().matrix() - &id).amax() <= tol.eigen * 10.0 {
        let mut s = reflection_symbol(y, variant, ctx);
        if e1.phase_winding() != 0.0 {
            s = GaussianSymbol::new(
                SymbolKind::Centre,
                s.quad().clone(),
                s.lin().clone(),
                s.modulus(),
                s.phase() + e1.phase_winding(),
                true,
                ctx.hbar,
            )
            .map_err(|e| ProductError::ReflectionProduct(e.to_string()))?;
        }
        return Ok(s);
    }

    let det_minus = e1.m().det_i_minus();
    if det_minus.abs() <= tol.caustic {
        return Err(ProductError::ReflectionProduct(
            "factor is at a chord caustic: the reflection product is translation-like".into(),
        ));
    }

    // Raw centre form; near a Weyl caustic B₁ is huge but its inertia and
    // inverse are still fine.
    let i_plus = &id + e1.m().matrix();
    let inv = i_plus.try_inverse().ok_or_else(|| {
        ProductError::ReflectionProduct(
            "factor exactly on a Weyl caustic; track the family instead".into(),
        )
    })?;
    let j = standard_j(e1.dim());
    let b1 = -&j * (inv * (&id - e1.m().matrix()));
    let b1 = (&b1 + b1.transpose()) * 0.5;

    let b1_form = CayleyForm::new(b1.clone(), crate::symplectic::CayleyKind::Centre, tol)
        .map_err(ProductError::Symplectic)?;
    let btilde = btilde_from_b(&b1_form, tol).map_err(|e| {
        ProductError::ReflectionProduct(format!(
            "singular centre form, no chord structure to adopt: {e}"
        ))
    })?;
    let bt = btilde.matrix();

    let sig = signature(&b1, tol.eigen * 1.0f64.max(b1.amax()))
        .map_err(ProductError::Symplectic)?;
    let variant_phase = match variant {
        ReflectionVariant::StandardR => 0.0,
        ReflectionVariant::MetaplecticRPrime => -(n as f64) * std::f64::consts::FRAC_PI_2,
    };
    let y_quad = (y.coords().transpose() * bt * y.coords())[(0, 0)];
    let phase = e1.phase_winding()
        + std::f64::consts::FRAC_PI_4 * sig.sigma as f64
        + variant_phase
        - y_quad / ctx.hbar;

    let lin = 2.0 * (bt + &j) * y.coords();
    let modulus = 2f64.powi(n as i32) / det_minus.abs().sqrt();

    GaussianSymbol::new(
        SymbolKind::Centre,
        -bt,
        lin,
        modulus,
        phase,
        false,
        ctx.hbar,
    )
    .map_err(|e| ProductError::ReflectionProduct(e.to_string()))
}

/// Sign-map region tags for products of two oscillator evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRegion {
    /// `cos(ω₁t/2)·cos(ω₂t/2) < 0`, no caustic contribution.
    CosProductNegative,
    /// `Θ = ±π` (the product integral crossed a caustic), cosines agree.
    CausticCrossed,
    Both,
    Neither,
}

impl SignRegion {
    pub fn as_str(&self) -> &'static str {
        match self {
            SignRegion::CosProductNegative => "cos_product_negative",
            SignRegion::CausticCrossed => "caustic_crossed",
            SignRegion::Both => "both",
            SignRegion::Neither => "neither",
        }
    }
}

/// Product of two harmonic evolutions at a common time.
#[derive(Debug, Clone)]
pub struct OscillatorProduct {
    pub product: ProductResult,
    pub omega1_t: f64,
    pub omega2_t: f64,
    /// `Ω_j = -tan(ω_j t / 2)`, the centre-form coefficients.
    pub cap_omega1: f64,
    pub cap_omega2: f64,
    /// Overall sign of the product Weyl symbol at the origin.
    pub sign: i8,
    pub region: SignRegion,
    /// `±√Δ` with the branch resolved by `Θ`; equals
    /// `cos((ω₁+ω₂)t/2) / (cos(ω₁t/2)·cos(ω₂t/2))` for this family.
    pub delta_signed_root: f64,
}

/// Compose `U_{ω₂t}·U_{ω₁t}` for two identity-connected oscillator
/// evolutions sharing the time `t`.
///
/// `Θ = 0` when `Ω₁Ω₂ < 1` and `±π` when `Ω₁Ω₂ > 1`; the reported sign is
/// the sign of `cos((ω₁+ω₂)t/2)` with no ambiguity, the two mechanisms
/// (negative cosine product, caustic crossing) cancelling pairwise.
pub fn oscillator_product(
    omega1: f64,
    omega2: f64,
    t: f64,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<OscillatorProduct, ProductError> {
    let half1 = omega1 * t / 2.0;
    let half2 = omega2 * t / 2.0;
    let (cos1, cos2) = (half1.cos(), half2.cos());
    if cos1.abs() < 1e-9 || cos2.abs() < 1e-9 {
        return Err(ProductError::FactorCaustic(format!(
            "cos(ω₁t/2) = {cos1:.3e}, cos(ω₂t/2) = {cos2:.3e}: a factor is at its caustic"
        )));
    }
    let e1 = harmonic_element(omega1, t);
    let e2 = harmonic_element(omega2, t);
    let product = product_metaplectic(&e2, &e1, ctx, tol)?;

    let cap_omega1 = -half1.tan();
    let cap_omega2 = -half2.tan();

    let crossed = product.theta.abs() > std::f64::consts::FRAC_PI_2;
    let cpn = cos1 * cos2 < 0.0;
    let region = match (cpn, crossed) {
        (true, true) => SignRegion::Both,
        (true, false) => SignRegion::CosProductNegative,
        (false, true) => SignRegion::CausticCrossed,
        (false, false) => SignRegion::Neither,
    };

    let w = product.element.phase_winding();
    let re = w.cos();
    debug_assert!(re.abs() > 0.99, "oscillator product winding must be a multiple of π");
    let sign = if re >= 0.0 { 1 } else { -1 };

    let delta_signed_root = if crossed { -1.0 } else { 1.0 } * product.delta.max(0.0).sqrt();

    Ok(OscillatorProduct {
        product,
        omega1_t: omega1 * t,
        omega2_t: omega2 * t,
        cap_omega1,
        cap_omega2,
        sign,
        region,
        delta_signed_root,
    })
}

/// `Δ` computed in the opposite ordering, `det(I + JB₁JB₂)`; equal to
/// [`ProductResult::delta`] by the block-determinant identity. Exposed for
/// the invariant tests.
pub fn delta_opposite_order(
    e2: &MetaplecticElement,
    e1: &MetaplecticElement,
    tol: &Tolerances,
) -> Result<f64, ProductError> {
    let b1 = centre_form(e1.m(), tol).map_err(|e| ProductError::FactorCaustic(e.to_string()))?;
    let b2 = centre_form(e2.m(), tol).map_err(|e| ProductError::FactorCaustic(e.to_string()))?;
    let j = standard_j(e1.dim());
    let d = b1.matrix().nrows();
    Ok(
        (DMatrix::<f64>::identity(d, d) + &j * b1.matrix() * &j * b2.matrix())
            .determinant(),
    )
}
