//! Reference one-parameter families and deterministic random samples.
//!
//! The harmonic family is the workhorse: it visits every phase phenomenon
//! the crate tracks (Weyl caustics at odd multiples of `ωt = π`, chord
//! caustics at even ones, the sheet change at `ωt = 2π`). The closed-form
//! windings here are cross-checked against [`crate::tracker::trace_family`]
//! in the test suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::symbols::MetaplecticElement;
use crate::symplectic::{
    centre_form, flow, Dim, QuadHamiltonian, SymplecticMatrix, Tolerances,
};

/// Identity-connected harmonic-oscillator element at `ωt`.
///
/// The winding jumps by `+π` (for `ω > 0`) at each odd multiple of
/// `ωt = π`, where the family passes through the metaplectic reflection. At
/// those points the reflection convention applies: the stored winding is the
/// chord-side phase `-π/2 + π⌊ωt/2π⌋`.
pub fn harmonic_element(omega: f64, t: f64) -> MetaplecticElement {
    let s = omega * t;
    let (sin, cos) = s.sin_cos();
    let m = SymplecticMatrix::new_unchecked(DMatrix::from_row_slice(2, 2, &[cos, -sin, sin, cos]));
    let two_pi = 2.0 * std::f64::consts::PI;
    let winding = if (s / 2.0).cos().abs() < 1e-9 {
        -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (s / two_pi).floor()
    } else {
        std::f64::consts::PI * ((s + std::f64::consts::PI) / two_pi).floor()
    };
    MetaplecticElement::from_parts(m, winding)
}

/// Identity-connected inverted-oscillator element (no caustics, winding 0).
pub fn inverted_element(lambda: f64, t: f64) -> MetaplecticElement {
    MetaplecticElement::from_parts(flow(&QuadHamiltonian::inverted(lambda), t), 0.0)
}

/// Reflected hyperbolic element `-exp(tJH)` on the branch continuously
/// connected to the metaplectic reflection (winding `-π/2`).
pub fn reflected_hyperbolic_element(lambda: f64, t: f64) -> MetaplecticElement {
    let m = flow(&QuadHamiltonian::inverted(lambda), t);
    MetaplecticElement::from_parts(
        SymplecticMatrix::new_unchecked(-m.matrix().clone()),
        -std::f64::consts::FRAC_PI_2,
    )
}

/// The elliptic × hyperbolic factor pair with centre forms `B₁ = ωI` and
/// `B₂ = γ·diag(1, -1)`; their product family crosses a caustic at `γω = 1`.
pub fn elliptic_hyperbolic_matrices(
    omega: f64,
    gamma: f64,
    tol: &Tolerances,
) -> Result<(SymplecticMatrix, SymplecticMatrix), crate::SymplecticError> {
    use crate::symplectic::{m_from_cayley, CayleyForm, CayleyKind};
    let b1 = CayleyForm::new(
        DMatrix::<f64>::identity(2, 2) * omega,
        CayleyKind::Centre,
        tol,
    )?;
    let b2 = CayleyForm::new(
        DMatrix::from_row_slice(2, 2, &[gamma, 0.0, 0.0, -gamma]),
        CayleyKind::Centre,
        tol,
    )?;
    Ok((m_from_cayley(&b1, tol)?, m_from_cayley(&b2, tol)?))
}

/// Deterministic RNG for sampled audits.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random symmetric matrix with entries of order `scale`.
pub fn random_symmetric<R: Rng>(d: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = rng.gen_range(-scale..=scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Random symplectic matrix as a product of two Hamiltonian flows
/// `exp(JH₂)·exp(JH₁)`, which reaches both components of the trace
/// classification for moderate scales.
pub fn random_symplectic<R: Rng>(dim: Dim, scale: f64, rng: &mut R) -> SymplecticMatrix {
    let d = dim.phase_dim();
    let tol = Tolerances::default();
    let h1 = QuadHamiltonian::new(random_symmetric(d, scale, rng), &tol).expect("symmetric");
    let h2 = QuadHamiltonian::new(random_symmetric(d, scale, rng), &tol).expect("symmetric");
    flow(&h2, 1.0).compose(&flow(&h1, 1.0)).expect("same dim")
}

/// Random positive-sheet element kept away from both caustics, with a
/// moderate centre form (`|det(I±M)|` bounded below, `||B||` bounded above).
pub fn random_causticless_element<R: Rng>(
    dim: Dim,
    rng: &mut R,
    tol: &Tolerances,
) -> MetaplecticElement {
    loop {
        let m = random_symplectic(dim, 0.45, rng);
        if m.det_i_plus().abs() < 0.5 || m.det_i_minus().abs() < 0.05 {
            continue;
        }
        let Ok(b) = centre_form(&m, tol) else {
            continue;
        };
        if b.matrix().amax() > 1.5 {
            continue;
        }
        if let Ok(e) = MetaplecticElement::positive_sheet(m, tol) {
            return e;
        }
    }
}
