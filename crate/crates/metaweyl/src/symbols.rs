//! Gaussian Weyl and chord symbols of metaplectic operators.
//!
//! An element of the metaplectic group over `M` is carried as the pair
//! `(M, phase_winding)`: the winding is the accumulated argument of the Weyl
//! prefactor at `x = 0`, continuous along whatever history produced the
//! element, and `winding = 0` at the identity picks the sheet continuously
//! connected to `I`. The two operators over the same `M` differ by π.
//!
//! Symbol normalization, fixed here and cross-validated by the Fourier pair,
//! the oscillator closed forms, and the quadrature oracle:
//!
//! ```text
//!   centre:  U(x) = 2^N |det(I + M)|^{-1/2} e^{iφ}  exp( (i/ħ)  x·Bx )
//!   chord:   Ũ(ξ) =     |det(I - M)|^{-1/2} e^{iφ~} exp(-(i/4ħ) ξ·B~ξ )
//! ```
//!
//! equivalently `|det(I + JB)|^{1/2}` and `2^{-N}|det(I + JB~)|^{1/2}` for
//! the two moduli. The chord phase of an element off both caustics is
//! `φ~ = φ + (π/4)σ(B)`: the symplectic Fourier transform of a Gaussian
//! gains the stationary-phase signature phase, and reversing it gains
//! `(π/4)σ(-B~) = -(π/4)σ(B)`, so the pair is involutive on phases as real
//! numbers, not merely mod 2π.
//!
//! Inhomogeneous symbols carry a linear phase term; the evaluation rules are
//!
//! ```text
//!   centre:  value(x) = modulus · exp(i(phase + (x·Qx + lin·x)/ħ))
//!   chord:   value(ξ) = modulus · exp(i(phase + (-ξ·Qξ/4 + lin·ξ)/ħ))
//! ```
//!
//! Constant action terms are folded into `phase` at construction.
//! Delta-flagged symbols (reflections in the centre representation,
//! translations in the chord one) store the distribution's prefactor in
//! `modulus`/`phase` and its support point in `lin`; they cannot be
//! evaluated pointwise.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::SymbolError;
use crate::symplectic::{
    centre_form, chord_form, signature, standard_j, Chord, Dim, PhasePoint, SymplecticMatrix,
    Tolerances,
};
use crate::wire;
use crate::ComplexValue;

/// Evaluation context: Planck constant (action units) and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationContext {
    pub hbar: f64,
    pub dim: Dim,
}

impl EvaluationContext {
    pub fn new(hbar: f64, dim: Dim) -> Result<Self, SymbolError> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(SymbolError::Kind(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        Ok(EvaluationContext { hbar, dim })
    }

    /// `ħ = 1`.
    pub fn standard(dim: Dim) -> Self {
        EvaluationContext { hbar: 1.0, dim }
    }
}

/// Which representation a Gaussian symbol lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Centre,
    Chord,
}

/// A Gaussian (or delta-flagged) propagator symbol. See the module docs for
/// the evaluation rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolRepr", into = "SymbolRepr")]
pub struct GaussianSymbol {
    kind: SymbolKind,
    quad: DMatrix<f64>,
    lin: DVector<f64>,
    modulus: f64,
    /// Continuous phase in radians; never reduced mod 2π.
    phase: f64,
    delta_flag: bool,
    hbar: f64,
}

impl GaussianSymbol {
    pub fn new(
        kind: SymbolKind,
        quad: DMatrix<f64>,
        lin: DVector<f64>,
        modulus: f64,
        phase: f64,
        delta_flag: bool,
        hbar: f64,
    ) -> Result<Self, SymbolError> {
        let d = quad.nrows();
        if !quad.is_square() || d == 0 || d % 2 != 0 || lin.len() != d {
            return Err(SymbolError::Kind(format!(
                "quad must be square of even dimension matching lin, got {}x{} / {}",
                quad.nrows(),
                quad.ncols(),
                lin.len()
            )));
        }
        if (&quad - quad.transpose()).amax() > 1e-8 * (1.0 + quad.amax()) {
            return Err(SymbolError::Kind("quad must be symmetric".into()));
        }
        if !(modulus >= 0.0) || !(hbar > 0.0) {
            return Err(SymbolError::Kind(
                "modulus must be nonnegative and hbar positive".into(),
            ));
        }
        let quad = (&quad + quad.transpose()) * 0.5;
        Ok(GaussianSymbol {
            kind,
            quad,
            lin,
            modulus,
            phase,
            delta_flag,
            hbar,
        })
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn quad(&self) -> &DMatrix<f64> {
        &self.quad
    }

    pub fn lin(&self) -> &DVector<f64> {
        &self.lin
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn delta_flag(&self) -> bool {
        self.delta_flag
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> Dim {
        Dim::new(self.quad.nrows() / 2).expect("validated")
    }

    /// Complex prefactor `modulus · e^{i·phase}` (the value at the origin for
    /// homogeneous symbols).
    pub fn prefactor(&self) -> ComplexValue {
        Complex::from_polar(self.modulus, self.phase)
    }

    /// Pointwise value. Errors on delta-flagged symbols.
    pub fn value(&self, arg: &DVector<f64>) -> Result<ComplexValue, SymbolError> {
        if self.delta_flag {
            return Err(SymbolError::Delta(
                "delta-flagged symbol has no pointwise value".into(),
            ));
        }
        if arg.len() != self.quad.nrows() {
            return Err(SymbolError::Kind(format!(
                "argument length {} does not match {}",
                arg.len(),
                self.quad.nrows()
            )));
        }
        let q = (arg.transpose() * &self.quad * arg)[(0, 0)];
        let l = self.lin.dot(arg);
        let action = match self.kind {
            SymbolKind::Centre => q + l,
            SymbolKind::Chord => -0.25 * q + l,
        };
        Ok(Complex::from_polar(
            self.modulus,
            self.phase + action / self.hbar,
        ))
    }

    pub fn value_at_point(&self, x: &PhasePoint) -> Result<ComplexValue, SymbolError> {
        if self.kind != SymbolKind::Centre {
            return Err(SymbolError::Kind(
                "centre argument on a chord symbol".into(),
            ));
        }
        self.value(x.coords())
    }

    pub fn value_at_chord(&self, xi: &Chord) -> Result<ComplexValue, SymbolError> {
        if self.kind != SymbolKind::Chord {
            return Err(SymbolError::Kind(
                "chord argument on a centre symbol".into(),
            ));
        }
        self.value(xi.coords())
    }
}

#[derive(Serialize, Deserialize)]
struct SymbolRepr {
    kind: SymbolKind,
    quad: Vec<Vec<f64>>,
    lin: Vec<f64>,
    modulus: f64,
    phase: f64,
    delta_flag: bool,
    hbar: f64,
}

impl From<GaussianSymbol> for SymbolRepr {
    fn from(s: GaussianSymbol) -> Self {
        SymbolRepr {
            kind: s.kind,
            quad: wire::matrix_to_rows(&s.quad),
            lin: wire::vector_to_list(&s.lin),
            modulus: s.modulus,
            phase: s.phase,
            delta_flag: s.delta_flag,
            hbar: s.hbar,
        }
    }
}

impl TryFrom<SymbolRepr> for GaussianSymbol {
    type Error = String;

    fn try_from(r: SymbolRepr) -> Result<Self, String> {
        let quad = wire::matrix_from_rows(&r.quad)?;
        let lin = wire::vector_from_list(&r.lin)?;
        GaussianSymbol::new(r.kind, quad, lin, r.modulus, r.phase, r.delta_flag, r.hbar)
            .map_err(|e| e.to_string())
    }
}

/// A metaplectic group element: symplectic matrix plus the continuous phase
/// of its Weyl prefactor at the origin.
///
/// Two conventions for degenerate points:
/// - elements exactly at the reflection (`M = -I`) store the phase of their
///   chord symbol in `phase_winding` (the Weyl prefactor is distributional
///   there); [`reflection_element`] constructs the group reflections with
///   the right value;
/// - any other element constructed directly from a matrix carries whatever
///   winding the caller supplies, since without a history the sheet is
///   undetermined.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaplecticElement {
    m: SymplecticMatrix,
    phase_winding: f64,
}

impl MetaplecticElement {
    /// The identity on the sheet continuously connected to it (winding 0).
    pub fn identity(dim: Dim) -> Self {
        MetaplecticElement {
            m: SymplecticMatrix::identity(dim),
            phase_winding: 0.0,
        }
    }

    /// Wrap a matrix with an explicitly supplied winding.
    pub fn from_parts(m: SymplecticMatrix, phase_winding: f64) -> Self {
        MetaplecticElement { m, phase_winding }
    }

    /// The sheet whose prefactor phase lies in `{0, π/2}`: `0` when
    /// `det(I + JB) > 0`, `π/2` when negative (principal square root).
    /// Errors at Weyl caustics.
    pub fn positive_sheet(m: SymplecticMatrix, tol: &Tolerances) -> Result<Self, SymbolError> {
        let b = centre_form(&m, tol)
            .map_err(|e| SymbolError::Caustic(format!("no centre form: {e}")))?;
        let d = b.matrix().nrows();
        let det = (DMatrix::<f64>::identity(d, d) + b.j_b()).determinant();
        let phase_winding = if det >= 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_PI_2
        };
        Ok(MetaplecticElement { m, phase_winding })
    }

    pub fn m(&self) -> &SymplecticMatrix {
        &self.m
    }

    pub fn phase_winding(&self) -> f64 {
        self.phase_winding
    }

    pub fn dim(&self) -> Dim {
        self.m.dim()
    }
}

fn near_reflection(m: &SymplecticMatrix, tol: &Tolerances) -> bool {
    let d = m.matrix().nrows();
    (m.matrix() + DMatrix::<f64>::identity(d, d)).amax() <= tol.eigen.max(1e-12) * 10.0
}

/// Weyl (centre) symbol of a metaplectic element.
///
/// At a Weyl caustic the symbol is a Dirac delta; that is returned (flagged)
/// only for the exact reflection through the origin. Any other caustic
/// element is an error directing the caller to the chord representation.
pub fn weyl_symbol(
    e: &MetaplecticElement,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<GaussianSymbol, SymbolError> {
    let n = e.dim().n();
    let d = 2 * n;
    let det_plus = e.m().det_i_plus();
    if det_plus.abs() <= tol.caustic {
        if near_reflection(e.m(), tol) {
            // (πħ)^N δ(x), prefactor phase = the element's chord-side phase.
            return GaussianSymbol::new(
                SymbolKind::Centre,
                DMatrix::zeros(d, d),
                DVector::zeros(d),
                (std::f64::consts::PI * ctx.hbar).powi(n as i32),
                e.phase_winding(),
                true,
                ctx.hbar,
            );
        }
        return Err(SymbolError::Caustic(format!(
            "det(I+M) = {det_plus:.3e}: Weyl symbol is distributional, use the chord kind"
        )));
    }
    let b = centre_form(e.m(), tol).map_err(|err| SymbolError::Caustic(err.to_string()))?;
    let modulus = 2f64.powi(n as i32) / det_plus.abs().sqrt();
    GaussianSymbol::new(
        SymbolKind::Centre,
        b.matrix().clone(),
        DVector::zeros(d),
        modulus,
        e.phase_winding(),
        false,
        ctx.hbar,
    )
}

/// Chord symbol of a metaplectic element.
///
/// The phase is `winding + (π/4)σ(B)`; resolving it therefore needs the
/// centre form as well, so elements exactly on a Weyl caustic are accepted
/// only as exact reflections (whose winding already is the chord phase).
pub fn chord_symbol(
    e: &MetaplecticElement,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<GaussianSymbol, SymbolError> {
    let n = e.dim().n();
    let d = 2 * n;
    let det_minus = e.m().det_i_minus();
    if det_minus.abs() <= tol.caustic {
        return Err(SymbolError::ChordCaustic(format!(
            "det(I-M) = {det_minus:.3e}: element is translation-like, chord symbol is distributional"
        )));
    }
    let modulus = det_minus.abs().sqrt().recip();

    if near_reflection(e.m(), tol) {
        // B~ of the exact reflection is 0; winding stores the chord phase.
        return GaussianSymbol::new(
            SymbolKind::Chord,
            DMatrix::zeros(d, d),
            DVector::zeros(d),
            modulus,
            e.phase_winding(),
            false,
            ctx.hbar,
        );
    }

    let bt = chord_form(e.m(), tol).map_err(|err| SymbolError::ChordCaustic(err.to_string()))?;

    // Raw centre form for the signature; near a Weyl caustic B is huge but
    // its inertia is still well defined.
    let id = DMatrix::<f64>::identity(d, d);
    let i_plus = &id + e.m().matrix();
    let inv = i_plus.try_inverse().ok_or_else(|| {
        SymbolError::Caustic(
            "element is exactly on a Weyl caustic and is not a reflection; \
             track the family to resolve the chord phase"
                .into(),
        )
    })?;
    let j = standard_j(e.dim());
    let b = -&j * (inv * (&id - e.m().matrix()));
    let b = (&b + b.transpose()) * 0.5;
    let sig = signature(&b, tol.eigen * 1.0f64.max(b.amax()))
        .map_err(|err| SymbolError::Caustic(err.to_string()))?;
    let phase = e.phase_winding() + std::f64::consts::FRAC_PI_4 * sig.sigma as f64;

    GaussianSymbol::new(
        SymbolKind::Chord,
        bt.matrix().clone(),
        DVector::zeros(d),
        modulus,
        phase,
        false,
        ctx.hbar,
    )
}

fn full_signature_or_err(
    quad: &DMatrix<f64>,
    tol: &Tolerances,
    what: &str,
) -> Result<crate::symplectic::Signature, SymbolError> {
    let sig = signature(quad, tol.eigen * 1.0f64.max(quad.amax()))
        .map_err(|e| SymbolError::Kind(e.to_string()))?;
    if sig.n_zero > 0 {
        return Err(SymbolError::FourierDomain(format!(
            "{what} has {} null direction(s); the transform is delta-like there",
            sig.n_zero
        )));
    }
    Ok(sig)
}

/// Symplectic Fourier transform, centre → chord.
///
/// Gains the phase `(π/4)σ(Q)`. A symbol with zero quadratic part transforms
/// to a delta-flagged chord symbol (plane wave → point); a partially singular
/// quadratic part is a domain error.
pub fn fourier_weyl_to_chord(
    s: &GaussianSymbol,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<GaussianSymbol, SymbolError> {
    if s.kind() != SymbolKind::Centre {
        return Err(SymbolError::Kind("expected a centre symbol".into()));
    }
    if s.delta_flag() {
        return Err(SymbolError::Kind(
            "delta symbols transform by the closed pair, not the Gaussian rule".into(),
        ));
    }
    let d = s.quad().nrows();
    let n = (d / 2) as i32;
    let j = standard_j(s.dim());

    if s.quad().amax() <= tol.eigen {
        // Plane wave: delta at ξ0 = -J·lin.
        let location = -&j * s.lin();
        return GaussianSymbol::new(
            SymbolKind::Chord,
            DMatrix::zeros(d, d),
            location,
            s.modulus() * (2.0 * std::f64::consts::PI * ctx.hbar).powi(n),
            s.phase(),
            true,
            ctx.hbar,
        );
    }

    let sig = full_signature_or_err(s.quad(), tol, "centre quadratic form")?;
    let inv = s
        .quad()
        .clone()
        .try_inverse()
        .ok_or_else(|| SymbolError::FourierDomain("quad not invertible".into()))?;
    let btilde = -&j * &inv * &j;
    let btilde = (&btilde + btilde.transpose()) * 0.5;
    let det = s.quad().determinant();

    let lin_quad = (s.lin().transpose() * &inv * s.lin())[(0, 0)];
    let phase =
        s.phase() + std::f64::consts::FRAC_PI_4 * sig.sigma as f64 - lin_quad / (4.0 * ctx.hbar);
    let lin = -0.5 * &j * &inv * s.lin();
    let modulus = s.modulus() * 2f64.powi(-n) / det.abs().sqrt();

    GaussianSymbol::new(
        SymbolKind::Chord,
        btilde,
        lin,
        modulus,
        phase,
        false,
        ctx.hbar,
    )
}

/// Symplectic Fourier transform, chord → centre.
///
/// Gains `(π/4)σ(-Q)` (the chord exponent carries the opposite sign), so the
/// round trip through both transforms restores the phase exactly.
pub fn fourier_chord_to_weyl(
    s: &GaussianSymbol,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<GaussianSymbol, SymbolError> {
    if s.kind() != SymbolKind::Chord {
        return Err(SymbolError::Kind("expected a chord symbol".into()));
    }
    if s.delta_flag() {
        return Err(SymbolError::Kind(
            "delta symbols transform by the closed pair, not the Gaussian rule".into(),
        ));
    }
    let d = s.quad().nrows();
    let n = (d / 2) as i32;
    let j = standard_j(s.dim());

    if s.quad().amax() <= tol.eigen {
        // Constant chord symbol: delta at x0 = -J·lin (the reflection point).
        let location = -&j * s.lin();
        return GaussianSymbol::new(
            SymbolKind::Centre,
            DMatrix::zeros(d, d),
            location,
            s.modulus() * (2.0 * std::f64::consts::PI * ctx.hbar).powi(n),
            s.phase(),
            true,
            ctx.hbar,
        );
    }

    let sig = full_signature_or_err(s.quad(), tol, "chord quadratic form")?;
    let inv = s
        .quad()
        .clone()
        .try_inverse()
        .ok_or_else(|| SymbolError::FourierDomain("quad not invertible".into()))?;
    let b = -&j * &inv * &j;
    let b = (&b + b.transpose()) * 0.5;
    let det = s.quad().determinant();

    let lin_quad = (s.lin().transpose() * &inv * s.lin())[(0, 0)];
    let phase = s.phase() - std::f64::consts::FRAC_PI_4 * sig.sigma as f64 + lin_quad / ctx.hbar;
    let lin = 2.0 * &j * &inv * s.lin();
    let modulus = s.modulus() * 2f64.powi(n) / det.abs().sqrt();

    GaussianSymbol::new(SymbolKind::Centre, b, lin, modulus, phase, false, ctx.hbar)
}

/// Centre symbol of the Heisenberg translation by `ξ`:
/// `T_ξ(x) = exp((i/ħ) ξ∧x)`, i.e. modulus 1, no quadratic part, `lin = Jξ`.
/// Includes `T_0 = I`.
pub fn translation_symbol(xi: &Chord, ctx: &EvaluationContext) -> GaussianSymbol {
    let d = xi.coords().len();
    let j = standard_j(xi.dim());
    GaussianSymbol::new(
        SymbolKind::Centre,
        DMatrix::zeros(d, d),
        &j * xi.coords(),
        1.0,
        0.0,
        false,
        ctx.hbar,
    )
    .expect("valid by construction")
}

/// Which reflection operator a construction refers to.
///
/// The standard reflection squares to the identity and is the basis operator
/// of the Weyl representation; the metaplectic one is `i^{-N}` times it,
/// squares to `(-1)^N`, and is the member of the metaplectic group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionVariant {
    StandardR,
    MetaplecticRPrime,
}

fn reflection_phase(variant: ReflectionVariant, n: usize) -> f64 {
    match variant {
        ReflectionVariant::StandardR => 0.0,
        ReflectionVariant::MetaplecticRPrime => -(n as f64) * std::f64::consts::FRAC_PI_2,
    }
}

/// Centre symbol of the reflection through `y`: `(πħ)^N δ(x - y)`, times
/// `i^{-N}` for the metaplectic variant. Delta-flagged; `lin` holds `y`.
pub fn reflection_symbol(
    y: &PhasePoint,
    variant: ReflectionVariant,
    ctx: &EvaluationContext,
) -> GaussianSymbol {
    let d = y.coords().len();
    let n = d / 2;
    GaussianSymbol::new(
        SymbolKind::Centre,
        DMatrix::zeros(d, d),
        y.coords().clone(),
        (std::f64::consts::PI * ctx.hbar).powi(n as i32),
        reflection_phase(variant, n),
        true,
        ctx.hbar,
    )
    .expect("valid by construction")
}

/// Chord symbol of the reflection through `y`: the constant `2^{-N}`
/// (standard) or `(2i)^{-N}` (metaplectic), times `exp((i/ħ) ξ∧y)` for
/// `y != 0`.
pub fn reflection_chord_symbol(
    y: &PhasePoint,
    variant: ReflectionVariant,
    ctx: &EvaluationContext,
) -> GaussianSymbol {
    let d = y.coords().len();
    let n = d / 2;
    let j = standard_j(y.dim());
    GaussianSymbol::new(
        SymbolKind::Chord,
        DMatrix::zeros(d, d),
        &j * y.coords(),
        2f64.powi(-(n as i32)),
        reflection_phase(variant, n),
        false,
        ctx.hbar,
    )
    .expect("valid by construction")
}

/// Metaplectic element of the reflection through the origin, on the sheet of
/// the given variant (winding = the chord-side phase; see the type docs).
pub fn reflection_element(dim: Dim, variant: ReflectionVariant) -> MetaplecticElement {
    MetaplecticElement::from_parts(
        SymplecticMatrix::reflection(dim),
        reflection_phase(variant, dim.n()),
    )
}

/// Wrap an angle difference into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::harmonic_element;
    use crate::symplectic::{flow, QuadHamiltonian};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ctx1() -> EvaluationContext {
        EvaluationContext::standard(Dim::new(1).unwrap())
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn identity_symbol_is_one() {
        let e = MetaplecticElement::identity(Dim::new(1).unwrap());
        let s = weyl_symbol(&e, &ctx1(), &tols()).unwrap();
        assert_abs_diff_eq!(s.modulus(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.phase(), 0.0);
        assert_abs_diff_eq!(s.quad().amax(), 0.0);
        let x = DVector::from_column_slice(&[0.3, -0.8]);
        let v = s.value(&x).unwrap();
        assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn harmonic_weyl_symbol_quarter_period() {
        // ωt = π/2: modulus 1/cos(π/4) = √2, quad = -I, phase 0.
        let e = harmonic_element(1.0, FRAC_PI_2);
        let s = weyl_symbol(&e, &ctx1(), &tols()).unwrap();
        assert_abs_diff_eq!(s.modulus(), 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.phase(), 0.0);
        assert!((s.quad() + DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn harmonic_weyl_symbol_full_period_is_minus_one() {
        // ωt = 2π on the continuous sheet: U ≡ -1.
        let e = harmonic_element(1.0, 2.0 * PI);
        let s = weyl_symbol(&e, &ctx1(), &tols()).unwrap();
        assert_abs_diff_eq!(s.modulus(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(s.phase() - PI), 0.0, epsilon = 1e-12);
        let v = s.value(&DVector::zeros(2)).unwrap();
        assert_abs_diff_eq!(v.re, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn harmonic_chord_symbol_matches_closed_form() {
        // 0 < ωt < π: Ũ(ξ) = -i/(2 sin(ωt/2)) exp((i/4ħ) cot(ωt/2) |ξ|²).
        for &theta in &[0.4, 1.3, 2.8] {
            let e = harmonic_element(1.0, theta);
            let s = chord_symbol(&e, &ctx1(), &tols()).unwrap();
            assert_abs_diff_eq!(s.modulus(), 0.5 / (theta / 2.0).sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(wrap_angle(s.phase() + FRAC_PI_2), 0.0, epsilon = 1e-12);
            // quad = B~ = -cot(ωt/2) I; evaluation applies -1/4ħ.
            let xi = DVector::from_column_slice(&[0.7, 0.2]);
            let v = s.value(&xi).unwrap();
            let expect = Complex::new(0.0, -0.5 / (theta / 2.0).sin())
                * Complex::new(
                    0.0,
                    0.25 * (theta / 2.0).tan().recip() * xi.norm_squared(),
                )
                .exp();
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn inverted_oscillator_chord_prefactor_is_real_positive() {
        let lam = 0.8;
        for &t in &[0.3, 1.0, 2.5] {
            let m = flow(&QuadHamiltonian::inverted(lam), t);
            let e = MetaplecticElement::positive_sheet(m, &tols()).unwrap();
            let s = chord_symbol(&e, &ctx1(), &tols()).unwrap();
            assert_abs_diff_eq!(s.modulus(), 0.5 / (lam * t / 2.0).sinh(), epsilon = 1e-12);
            assert_abs_diff_eq!(wrap_angle(s.phase()), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn reflected_hyperbolic_chord_prefactor() {
        // -flow of the inverted oscillator on the reflection-connected sheet:
        // Ũ = -i/(2 cosh(λt/2)) · exp(...).
        let lam = 0.8;
        for &t in &[0.4, 1.1] {
            let m = flow(&QuadHamiltonian::inverted(lam), t);
            let refl = SymplecticMatrix::new_unchecked(-m.matrix().clone());
            let e = MetaplecticElement::from_parts(refl, -FRAC_PI_2);
            let s = chord_symbol(&e, &ctx1(), &tols()).unwrap();
            assert_abs_diff_eq!(s.modulus(), 0.5 / (lam * t / 2.0).cosh(), epsilon = 1e-12);
            assert_abs_diff_eq!(wrap_angle(s.phase() + FRAC_PI_2), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn chord_of_reflection_element() {
        let e = reflection_element(Dim::new(1).unwrap(), ReflectionVariant::MetaplecticRPrime);
        let s = chord_symbol(&e, &ctx1(), &tols()).unwrap();
        assert_abs_diff_eq!(s.modulus(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(wrap_angle(s.phase() + FRAC_PI_2), 0.0);
        // Weyl side: delta with prefactor i^{-N}(πħ)^N.
        let w = weyl_symbol(&e, &ctx1(), &tols()).unwrap();
        assert!(w.delta_flag());
        assert_abs_diff_eq!(w.modulus(), PI, epsilon = 1e-14);
        assert_abs_diff_eq!(wrap_angle(w.phase() + FRAC_PI_2), 0.0);
    }

    #[test]
    fn modulus_identities() {
        let tol = tols();
        let h = QuadHamiltonian::harmonic(1.0);
        for &t in &[0.3, 1.9, 2.6, 4.0] {
            let m = flow(&h, t);
            let e = MetaplecticElement::positive_sheet(m, &tol).unwrap();
            let w = weyl_symbol(&e, &ctx1(), &tol).unwrap();
            assert_abs_diff_eq!(
                w.modulus().powi(2) * e.m().det_i_plus().abs(),
                4.0,
                epsilon = 1e-10
            );
            let c = chord_symbol(&e, &ctx1(), &tol).unwrap();
            assert_abs_diff_eq!(
                c.modulus().powi(2) * e.m().det_i_minus().abs(),
                1.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn fourier_matches_direct_chord_symbol() {
        let tol = tols();
        let ctx = ctx1();
        for &theta in &[0.5f64, 1.4, 2.2] {
            let e = harmonic_element(1.0, theta);
            let w = weyl_symbol(&e, &ctx, &tol).unwrap();
            let c_direct = chord_symbol(&e, &ctx, &tol).unwrap();
            let c_fourier = fourier_weyl_to_chord(&w, &ctx, &tol).unwrap();
            assert!((c_direct.quad() - c_fourier.quad()).amax() < 1e-10);
            assert_abs_diff_eq!(c_direct.modulus(), c_fourier.modulus(), epsilon = 1e-12);
            assert_abs_diff_eq!(
                wrap_angle(c_direct.phase() - c_fourier.phase()),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fourier_round_trip_restores_symbol() {
        let tol = tols();
        let ctx = ctx1();
        // An inhomogeneous centre symbol with invertible quad.
        let quad = DMatrix::from_row_slice(2, 2, &[0.9, 0.3, 0.3, -1.4]);
        let lin = DVector::from_column_slice(&[0.4, -0.2]);
        let s =
            GaussianSymbol::new(SymbolKind::Centre, quad, lin, 1.7, 0.6, false, ctx.hbar).unwrap();
        let c = fourier_weyl_to_chord(&s, &ctx, &tol).unwrap();
        let back = fourier_chord_to_weyl(&c, &ctx, &tol).unwrap();
        assert!((back.quad() - s.quad()).amax() < 1e-10);
        assert!((back.lin() - s.lin()).amax() < 1e-10);
        assert_abs_diff_eq!(back.modulus(), s.modulus(), epsilon = 1e-10);
        assert_abs_diff_eq!(back.phase(), s.phase(), epsilon = 1e-10);
    }

    #[test]
    fn translation_symbol_examples() {
        let ctx = ctx1();
        // ξ = 0 is the constant 1.
        let s = translation_symbol(&Chord::from_slice(&[0.0, 0.0]).unwrap(), &ctx);
        let v = s.value(&DVector::from_column_slice(&[0.4, 0.9])).unwrap();
        assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-15);

        // ξ = (0, a): value at (p, q) is exp(-i a p / ħ).
        let a = 0.7;
        let s = translation_symbol(&Chord::from_slice(&[0.0, a]).unwrap(), &ctx);
        let p = 1.3;
        let v = s.value(&DVector::from_column_slice(&[p, -0.2])).unwrap();
        let expect = Complex::new(0.0, -a * p).exp();
        assert!((v - expect).norm() < 1e-14);

        // The chord symbol of T_ξ is a delta at ξ.
        let xi = Chord::from_slice(&[0.6, -1.1]).unwrap();
        let s = translation_symbol(&xi, &ctx);
        let c = fourier_weyl_to_chord(&s, &ctx, &tols()).unwrap();
        assert!(c.delta_flag());
        assert!((c.lin() - xi.coords()).amax() < 1e-14);
    }

    #[test]
    fn reflection_symbol_examples() {
        let ctx = ctx1();
        let y = PhasePoint::from_slice(&[0.0, 0.0]).unwrap();
        let r = reflection_chord_symbol(&y, ReflectionVariant::StandardR, &ctx);
        assert_abs_diff_eq!(r.modulus(), 0.5);
        assert_abs_diff_eq!(r.phase(), 0.0);

        let rp = reflection_chord_symbol(&y, ReflectionVariant::MetaplecticRPrime, &ctx);
        assert_abs_diff_eq!(rp.modulus(), 0.5);
        assert_abs_diff_eq!(rp.phase(), -FRAC_PI_2);
        // (R')² = (-1)^N: doubled phase is -Nπ ≡ Nπ (mod 2π).
        assert_abs_diff_eq!(wrap_angle(2.0 * rp.phase() - PI), 0.0);

        // Fourier pair: chord symbol of R'_y back to the centre delta at y.
        let y = PhasePoint::from_slice(&[0.4, -0.3]).unwrap();
        let rp = reflection_chord_symbol(&y, ReflectionVariant::MetaplecticRPrime, &ctx);
        let w = fourier_chord_to_weyl(&rp, &ctx, &tols()).unwrap();
        assert!(w.delta_flag());
        assert!((w.lin() - y.coords()).amax() < 1e-14);
        assert_abs_diff_eq!(w.modulus(), PI, epsilon = 1e-14);
        assert_abs_diff_eq!(w.phase(), -FRAC_PI_2);
    }

    #[test]
    fn serialization_round_trip() {
        let ctx = ctx1();
        let e = harmonic_element(1.0, 0.9);
        let s = weyl_symbol(&e, &ctx, &tols()).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"kind\":\"centre\""));
        let back: GaussianSymbol = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn chord_symbol_errors_at_chord_caustic() {
        let e = MetaplecticElement::identity(Dim::new(1).unwrap());
        assert!(matches!(
            chord_symbol(&e, &ctx1(), &tols()),
            Err(SymbolError::ChordCaustic(_))
        ));
    }

    #[test]
    fn weyl_symbol_errors_at_generic_caustic() {
        // Reflected shear: caustic but not a reflection.
        let m = SymplecticMatrix::new(
            DMatrix::from_row_slice(2, 2, &[-1.0, 2.0, 0.0, -1.0]),
            &tols(),
        )
        .unwrap();
        let e = MetaplecticElement::from_parts(m, 0.0);
        assert!(matches!(
            weyl_symbol(&e, &ctx1(), &tols()),
            Err(SymbolError::Caustic(_))
        ));
    }
}
