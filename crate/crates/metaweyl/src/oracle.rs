//! Independent brute-force validators for the phase rules.
//!
//! Everything here recomputes phases through its own machinery — a local
//! Jacobi eigensolver, complex-LU determinant branch continuation, damped
//! numerical quadrature — and never calls the library's signature counting,
//! so agreement between an oracle and the corresponding library path is a
//! genuine cross-check. The one sanctioned exception is
//! [`fine_path_composition`], whose whole point is to pit the product rule
//! against the family-tracking rule.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::OracleError;
use crate::products::product_metaplectic;
use crate::symbols::{EvaluationContext, GaussianSymbol, MetaplecticElement, SymbolKind};
use crate::symplectic::{flow, standard_j, QuadHamiltonian, Tolerances};
use crate::ComplexValue;

/// Modulus/phase of a Gaussian integral, plus the signature that produced
/// the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelResult {
    pub modulus: f64,
    /// Radians.
    pub phase: f64,
    pub signature_used: i64,
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors in columns,
/// unsorted. Deliberately separate from the eigensolver the library uses.
pub fn jacobi_symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let d = a.nrows();
    assert!(a.is_square() && d > 0);
    let mut a = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(d, d);
    let scale = 1.0 + a.amax();
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..d).map(|i| a[(i, i)]).collect(), v)
}

/// Phase and modulus of `∫ exp(i x·ax/ħ) d^d x` over `R^d` by the
/// stationary-phase signature rule, evaluated with the local Jacobi solver:
/// modulus `(πħ)^{d/2} |det a|^{-1/2}`, phase `(π/4)σ(a)`.
pub fn fresnel_signature_oracle(
    a: &DMatrix<f64>,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<FresnelResult, OracleError> {
    let d = a.nrows();
    if !a.is_square() || d == 0 {
        return Err(OracleError::Domain("matrix must be square".into()));
    }
    if (a - a.transpose()).amax() > 1e-8 * (1.0 + a.amax()) {
        return Err(OracleError::Domain("matrix must be symmetric".into()));
    }
    let (eig, _) = jacobi_symmetric_eigen(a);
    let zero_tol = tol.eigen * (1.0 + a.amax());
    let mut sigma: i64 = 0;
    let mut log_abs_det = 0.0;
    for &l in &eig {
        if l.abs() <= zero_tol {
            return Err(OracleError::Domain(format!(
                "eigenvalue {l:.3e} within zero tolerance; integral not defined"
            )));
        }
        sigma += if l > 0.0 { 1 } else { -1 };
        log_abs_det += l.abs().ln();
    }
    let modulus = (std::f64::consts::PI * ctx.hbar).powf(d as f64 / 2.0)
        * (-0.5 * log_abs_det).exp();
    Ok(FresnelResult {
        modulus,
        phase: std::f64::consts::FRAC_PI_4 * sigma as f64,
        signature_used: sigma,
    })
}

/// Default regularization ladder: powers of two from well above the spectrum
/// down to `2^-20`.
pub fn default_eps_sequence(a: &DMatrix<f64>) -> Vec<f64> {
    let top = (8.0 * (a.nrows() as f64) * (1.0 + a.amax())).log2().ceil() as i32;
    (( -20 )..=top).rev().map(|k| 2f64.powi(k)).collect()
}

/// The same Gaussian phase by an independent route: evaluate
/// `det(εI - i a/ħ·ħ)` ... concretely `det(εI - ia)^{-1/2}` along a
/// decreasing ladder of `ε`, continuing the argument of the determinant from
/// the overdamped regime (where the principal branch is unambiguous) down to
/// the oscillatory limit, then extrapolate `ε → 0`.
///
/// No eigendecomposition at all: the determinants come from complex LU.
pub fn regularized_limit_oracle(
    a: &DMatrix<f64>,
    ctx: &EvaluationContext,
    eps_sequence: &[f64],
    _tol: &Tolerances,
) -> Result<FresnelResult, OracleError> {
    let d = a.nrows();
    if !a.is_square() || d == 0 {
        return Err(OracleError::Domain("matrix must be square".into()));
    }
    if eps_sequence.len() < 4 {
        return Err(OracleError::Domain("need at least 4 regularization steps".into()));
    }
    for w in eps_sequence.windows(2) {
        if !(w[1] < w[0]) || !(w[1] > 0.0) {
            return Err(OracleError::Domain(
                "eps sequence must be strictly decreasing and positive".into(),
            ));
        }
    }

    let det_at = |eps: f64| -> ComplexValue {
        let mut m = DMatrix::<ComplexValue>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = Complex::new(if i == j { eps } else { 0.0 }, -a[(i, j)]);
            }
        }
        m.lu().determinant()
    };

    // Continue arg(det) down the ladder; each ratio stays well inside the
    // principal branch because the ladder halves at most.
    let mut prev = det_at(eps_sequence[0]);
    if prev.norm() == 0.0 {
        return Err(OracleError::Domain("determinant vanished on the ladder".into()));
    }
    let mut arg = prev.arg();
    let mut args = Vec::with_capacity(eps_sequence.len());
    args.push(arg);
    for &eps in &eps_sequence[1..] {
        let cur = det_at(eps);
        if cur.norm() == 0.0 {
            return Err(OracleError::Domain("determinant vanished on the ladder".into()));
        }
        let step = (cur / prev).arg();
        arg += step;
        args.push(arg);
        prev = cur;
    }

    // Integral phase: det(εI - ia)^{-1/2} → phase = -arg/2; Richardson on
    // the last pair removes the O(ε) tail.
    let m = args.len();
    let (e1, e0) = (eps_sequence[m - 2], eps_sequence[m - 1]);
    let (p1, p0) = (-args[m - 2] / 2.0, -args[m - 1] / 2.0);
    let phase = p0 + (p0 - p1) * e0 / (e1 - e0);

    // Convergence sanity: the tail increments must be shrinking.
    let tail: Vec<f64> = (m - 3..m)
        .map(|k| (args[k] - args[k - 1]).abs())
        .collect();
    if tail[2] > tail[1] + 1e-12 && tail[2] > 1e-9 {
        return Err(OracleError::Convergence(format!(
            "argument increments not settling: {:?}",
            tail
        )));
    }

    let modulus = (std::f64::consts::PI * ctx.hbar).powf(d as f64 / 2.0)
        / prev.norm().sqrt();
    Ok(FresnelResult {
        modulus,
        phase,
        signature_used: (phase / std::f64::consts::FRAC_PI_4).round() as i64,
    })
}

/// Compose `steps` equal sub-flows of `h` by the metaplectic product rule,
/// starting from `initial`. Each sub-element must stay in the causticless
/// neighbourhood of the identity (`||B_step||` small).
///
/// The resulting winding is the reference for family tracking and for
/// single-shot products; the comparison is mod 2π (the product path may wind
/// around the other way at a caustic).
pub fn fine_path_composition_from(
    initial: &MetaplecticElement,
    h: &QuadHamiltonian,
    t_final: f64,
    steps: usize,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<MetaplecticElement, OracleError> {
    if steps == 0 {
        return Err(OracleError::Step("need at least one step".into()));
    }
    // An exact intermediate caustic hit makes one sub-product ill defined;
    // nudging the step count moves every intermediate element off it.
    let mut attempt = 0usize;
    'retry: loop {
        let n_steps = steps + attempt;
        let dt = t_final / n_steps as f64;
        let step_m = flow(h, dt);
        let b = crate::symplectic::centre_form(&step_m, tol)
            .map_err(|e| OracleError::Step(format!("sub-step has no centre form: {e}")))?;
        if b.matrix().amax() >= 0.1 {
            return Err(OracleError::Step(format!(
                "||B_step|| = {:.3} >= 0.1; increase steps",
                b.matrix().amax()
            )));
        }
        let step_e = MetaplecticElement::from_parts(step_m, 0.0);
        let mut e = initial.clone();
        for _ in 0..n_steps {
            match product_metaplectic(&step_e, &e, ctx, tol) {
                Ok(r) => e = r.element,
                Err(_) if attempt < 4 => {
                    attempt += 1;
                    continue 'retry;
                }
                Err(err) => {
                    return Err(OracleError::Step(format!(
                        "composition hit unresolvable caustics: {err}"
                    )))
                }
            }
        }
        return Ok(e);
    }
}

/// [`fine_path_composition_from`] starting at the identity.
pub fn fine_path_composition(
    h: &QuadHamiltonian,
    t_final: f64,
    steps: usize,
    ctx: &EvaluationContext,
    tol: &Tolerances,
) -> Result<MetaplecticElement, OracleError> {
    let dim = h.dim();
    fine_path_composition_from(
        &MetaplecticElement::identity(dim),
        h,
        t_final,
        steps,
        ctx,
        tol,
    )
}

/// Grid for the damped quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureGrid {
    /// Half-width of the integration box (same units as phase space).
    pub half_width: f64,
    /// Midpoint cells per dimension.
    pub points_per_dim: usize,
}

/// Damped evaluation of the Weyl product integral for `N = 1`:
///
/// ```text
///   [U₂U₁](x) = ∫ dx₂ dx₁ / (πħ)² · U₂(x₂) U₁(x₁)
///               · exp[(2i/ħ)(x₂-x)·J(x₁-x)] · e^{-ε(|x₁|²+|x₂|²)}
/// ```
///
/// The `x₂` integral of a damped Gaussian is done in closed form in the
/// eigenbasis of the `x₂` quadratic form (local Jacobi; every branch is a
/// per-factor principal square root in the right half plane, so no global
/// branch choice enters). The remaining `x₁` integral is a midpoint-rule
/// sum over the grid, deterministic for a fixed grid and parallelized by
/// rows. The limit `ε → 0` is the caller's business
/// ([`quadrature_product_extrapolated`] does it on a log-Lagrange ladder).
pub fn quadrature_product_oracle(
    s2: &GaussianSymbol,
    s1: &GaussianSymbol,
    x: &DVector<f64>,
    ctx: &EvaluationContext,
    damping: f64,
    grid: &QuadratureGrid,
) -> Result<ComplexValue, OracleError> {
    if s1.kind() != SymbolKind::Centre || s2.kind() != SymbolKind::Centre {
        return Err(OracleError::Domain("both factors must be centre symbols".into()));
    }
    if s1.delta_flag() || s2.delta_flag() {
        return Err(OracleError::Domain("delta symbols are not integrable here".into()));
    }
    if s1.quad().nrows() != 2 || s2.quad().nrows() != 2 || x.len() != 2 {
        return Err(OracleError::Domain("the quadrature oracle is restricted to N = 1".into()));
    }
    if !(damping > 0.0) {
        return Err(OracleError::Domain("damping must be positive".into()));
    }
    let hbar = ctx.hbar;
    let kernel = QuadratureKernel::new(s2, s1, x, ctx, damping);
    let det_a2_inv_sqrt = (kernel.a2_eigs[0] * kernel.a2_eigs[1]).sqrt().inv();

    let n = grid.points_per_dim;
    let lbox = grid.half_width;
    let h_step = 2.0 * lbox / n as f64;

    let row_sums: Vec<ComplexValue> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = -lbox + (i as f64 + 0.5) * h_step;
            let mut acc = Complex::new(0.0, 0.0);
            for kq in 0..n {
                let q = -lbox + (kq as f64 + 0.5) * h_step;
                acc += kernel.exponent(p, q).exp();
            }
            acc
        })
        .collect();
    let outer: ComplexValue = row_sums.into_iter().sum::<ComplexValue>() * (h_step * h_step);

    let prefactor = Complex::from_polar(s1.modulus() * s2.modulus(), s1.phase() + s2.phase());
    let constant = std::f64::consts::PI / (std::f64::consts::PI * hbar).powi(2);
    Ok(prefactor * constant * det_a2_inv_sqrt * outer)
}

/// The integrand exponent at one outer-grid node, shared by the probe and
/// the production sweep.
#[derive(Clone)]
struct QuadratureKernel {
    eps: f64,
    hbar: f64,
    q1: DMatrix<f64>,
    l1: DVector<f64>,
    l2: DVector<f64>,
    jx: DVector<f64>,
    x: DVector<f64>,
    a2_eigs: [ComplexValue; 2],
    v0: [f64; 2],
    v1: [f64; 2],
}

impl QuadratureKernel {
    fn new(
        s2: &GaussianSymbol,
        s1: &GaussianSymbol,
        x: &DVector<f64>,
        ctx: &EvaluationContext,
        eps: f64,
    ) -> Self {
        let hbar = ctx.hbar;
        let (mu, v) = jacobi_symmetric_eigen(s2.quad());
        let j = standard_j(s1.dim());
        QuadratureKernel {
            eps,
            hbar,
            q1: s1.quad().clone(),
            l1: s1.lin().clone(),
            l2: s2.lin().clone(),
            jx: &j * x,
            x: x.clone(),
            a2_eigs: [
                Complex::new(eps, -mu[0] / hbar),
                Complex::new(eps, -mu[1] / hbar),
            ],
            v0: [v[(0, 0)], v[(1, 0)]],
            v1: [v[(0, 1)], v[(1, 1)]],
        }
    }

    #[inline]
    fn exponent(&self, p: f64, q: f64) -> ComplexValue {
        let u0 = self.l2[0] - 2.0 * (q - self.x[1]);
        let u1 = self.l2[1] + 2.0 * (p - self.x[0]);
        let w0 = self.v0[0] * u0 + self.v0[1] * u1;
        let w1 = self.v1[0] * u0 + self.v1[1] * u1;
        let s_term = -(w0 * w0 / self.a2_eigs[0] + w1 * w1 / self.a2_eigs[1])
            / (4.0 * self.hbar * self.hbar);
        let quad1 =
            self.q1[(0, 0)] * p * p + 2.0 * self.q1[(0, 1)] * p * q + self.q1[(1, 1)] * q * q;
        let lin1 = self.l1[0] * p + self.l1[1] * q + 2.0 * (self.jx[0] * p + self.jx[1] * q);
        Complex::new(-self.eps * (p * p + q * q), (quad1 + lin1) / self.hbar) + s_term
    }
}

/// Pick a box and resolution for the damped integrand.
///
/// The box cuts the Gaussian tail at `e^{-εL²} ≈ 1e-8`; the resolution comes
/// from probing the actual exponent on a coarse lattice and resolving both
/// the steepest live oscillation (`points_per_wave` cells per wavelength
/// wherever the envelope is above `e^{-14}`) and the sharpest envelope
/// feature.
pub fn auto_grid(
    s2: &GaussianSymbol,
    s1: &GaussianSymbol,
    x: &DVector<f64>,
    ctx: &EvaluationContext,
    damping: f64,
    points_per_wave: f64,
) -> QuadratureGrid {
    let lbox = (18.42 / damping).sqrt();
    let kernel = QuadratureKernel::new(s2, s1, x, ctx, damping);

    let probe_n = 48usize;
    let h = 2.0 * lbox / probe_n as f64;
    let mut k_max = 0.0f64;
    let mut re_rate_max = 0.0f64;
    let mut prev_row: Vec<ComplexValue> = Vec::new();
    for i in 0..=probe_n {
        let p = -lbox + i as f64 * h;
        let row: Vec<ComplexValue> = (0..=probe_n)
            .map(|kq| kernel.exponent(p, -lbox + kq as f64 * h))
            .collect();
        for kq in 0..=probe_n {
            let e = row[kq];
            if e.re < -14.0 {
                continue;
            }
            if kq + 1 <= probe_n {
                let d = row[kq + 1] - e;
                k_max = k_max.max(d.im.abs() / h);
                re_rate_max = re_rate_max.max(d.re.abs() / h);
            }
            if !prev_row.is_empty() {
                let d = prev_row[kq] - e;
                k_max = k_max.max(d.im.abs() / h);
                re_rate_max = re_rate_max.max(d.re.abs() / h);
            }
        }
        prev_row = row;
    }

    let n_osc = 2.0 * lbox * k_max / (2.0 * std::f64::consts::PI) * points_per_wave;
    // Envelope features: several cells per e-fold of decay.
    let n_env = 2.0 * lbox * re_rate_max * 0.75;
    let n = n_osc.max(n_env).ceil().max(64.0).min(3000.0) as usize;
    QuadratureGrid {
        half_width: lbox,
        points_per_dim: n,
    }
}

/// Damping ladder shape; the extrapolator scales it by the spectral gap of
/// the product's own 4N-dimensional phase form.
pub const DAMPING_LADDER: [f64; 5] = [0.5, 0.4, 0.3, 0.2, 0.1];

/// Evaluate the product integral on a damping ladder, Richardson-refine each
/// grid, and extrapolate `log(value)` to `ε = 0` with the Lagrange
/// polynomial through the ladder.
///
/// `log I(ε)` is analytic in `ε` with convergence radius set by the smallest
/// eigenvalue of the combined quadratic form `[[Q₁, -J], [J, Q₂]]/ħ`
/// (assembled here from the symbols themselves), so the ladder is scaled to
/// sit well inside that radius and the log-domain extrapolation converges
/// geometrically.
pub fn quadrature_product_extrapolated(
    s2: &GaussianSymbol,
    s1: &GaussianSymbol,
    x: &DVector<f64>,
    ctx: &EvaluationContext,
) -> Result<ComplexValue, OracleError> {
    let j = standard_j(s1.dim());
    let mut w4 = DMatrix::<f64>::zeros(4, 4);
    w4.view_mut((0, 0), (2, 2)).copy_from(s1.quad());
    w4.view_mut((2, 2), (2, 2)).copy_from(s2.quad());
    w4.view_mut((0, 2), (2, 2)).copy_from(&(-&j));
    w4.view_mut((2, 0), (2, 2)).copy_from(&j);
    let (nu, _) = jacobi_symmetric_eigen(&w4);
    let nu_min = nu.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs())) / ctx.hbar;
    if nu_min < 0.05 {
        return Err(OracleError::Domain(format!(
            "combined phase form has near-zero eigenvalue ({nu_min:.3e}): \
             product too close to a caustic for the damped ladder"
        )));
    }
    let scale = (nu_min / 1.25).min(1.0);

    let mut logs: Vec<ComplexValue> = Vec::with_capacity(DAMPING_LADDER.len());
    let mut ladder: Vec<f64> = Vec::with_capacity(DAMPING_LADDER.len());
    let mut prev_arg: Option<f64> = None;
    for &eps0 in DAMPING_LADDER.iter() {
        let eps = eps0 * scale;
        ladder.push(eps);
        let base = auto_grid(s2, s1, x, ctx, eps, 7.0);
        let fine = QuadratureGrid {
            half_width: base.half_width,
            points_per_dim: base.points_per_dim * 2,
        };
        let coarse_v = quadrature_product_oracle(s2, s1, x, ctx, eps, &base)?;
        let fine_v = quadrature_product_oracle(s2, s1, x, ctx, eps, &fine)?;
        // Midpoint rule is O(h²): Richardson to h⁴.
        let value = (fine_v * 4.0 - coarse_v) / 3.0;
        if value.norm() == 0.0 {
            return Err(OracleError::Convergence("zero integral on the ladder".into()));
        }
        // Continued log across the ladder.
        let mut arg = value.arg();
        if let Some(pa) = prev_arg {
            while arg - pa > std::f64::consts::PI {
                arg -= 2.0 * std::f64::consts::PI;
            }
            while arg - pa < -std::f64::consts::PI {
                arg += 2.0 * std::f64::consts::PI;
            }
        }
        prev_arg = Some(arg);
        logs.push(Complex::new(value.norm().ln(), arg));
    }
    // Lagrange extrapolation of log(value) to ε = 0.
    let mut log0 = Complex::new(0.0, 0.0);
    for (k, &ek) in ladder.iter().enumerate() {
        let mut w = 1.0;
        for (m, &em) in ladder.iter().enumerate() {
            if m != k {
                w *= -em / (ek - em);
            }
        }
        log0 += logs[k] * w;
    }
    Ok(log0.exp())
}
