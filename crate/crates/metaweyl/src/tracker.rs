//! One-parameter families, caustic detection, and phase continuation.
//!
//! A family `t ↦ M(t)` is sampled, the zeros of `det(I + M)` (Weyl
//! caustics) and `det(I - M)` (chord caustics) are located, and the
//! continuous windings of both representations are carried across:
//! between events a winding is constant (the prefactor determinants are
//! real, so their square-root arguments can only move at a caustic), and at
//! an event it jumps by the signature difference of the bracketing forms,
//!
//! ```text
//!     Weyl:   Θ  = (π/2)(N₋(B  before) - N₋(B  after))
//!     chord:  Θ~ = (π/2)(N₋(-B~ before) - N₋(-B~ after))
//! ```
//!
//! always an integer multiple of π/2. Zeros are located two ways: odd-order
//! crossings by sign-change bisection (to `tol.bisect`), and even-order
//! touches — the harmonic family's caustics are all of this kind, since
//! `det(I ± M) = 2 ± 2cos ωt` — by golden-section minimization of `|det|`
//! with a parabolic polish. A dip that turns out to cross zero twice inside
//! one sample step is split into its two bisected crossings.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::TraceError;
use crate::symbols::MetaplecticElement;
use crate::symplectic::{
    cayley_pair, signature_default, CayleyForm, CayleyKind, SymplecticMatrix, Tolerances,
};

/// Which representation's prefactor is singular at the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausticKind {
    /// `det(I + M) = 0`.
    Weyl,
    /// `det(I - M) = 0` (translation-like).
    Chord,
}

/// A located caustic crossing with its phase jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausticEvent {
    pub t_star: f64,
    pub kind: CausticKind,
    /// Near-zero eigenvalue count of `I ± M` at the event.
    pub degeneracy: usize,
    /// Winding increment, a multiple of π/2. Zero for boundary events
    /// (nothing to bracket).
    pub theta_jump: f64,
    pub n_minus_before: usize,
    pub n_minus_after: usize,
    /// The event sits at an end of the traced range.
    pub boundary: bool,
}

/// Which representation carries the phase across the interval's right end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepTag {
    WeylContinuous,
    ChordContinuous,
}

/// One sampled point of a trace.
#[derive(Debug, Clone)]
pub struct TraceSample {
    pub t: f64,
    pub element: MetaplecticElement,
    /// Continuous chord-side winding (anchored at the first off-caustic
    /// sample).
    pub chord_winding: f64,
    pub det_i_plus: f64,
    pub det_i_minus: f64,
    pub sigma_b: Option<i64>,
    pub sigma_btilde: Option<i64>,
    /// An event lies within one local step of this sample.
    pub event_flag: bool,
}

/// Interval of the representation log: `[t_start, t_end]` and the tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepInterval {
    pub t_start: f64,
    pub t_end: f64,
    pub tag: RepTag,
}

/// A traced family: samples with continuous windings, located events, and
/// the representation log. Immutable once built.
#[derive(Debug, Clone)]
pub struct FamilyTrace {
    pub samples: Vec<TraceSample>,
    pub caustic_events: Vec<CausticEvent>,
    pub representation_log: Vec<RepInterval>,
}

impl FamilyTrace {
    pub fn params(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Weyl events only.
    pub fn weyl_events(&self) -> Vec<&CausticEvent> {
        self.caustic_events
            .iter()
            .filter(|e| e.kind == CausticKind::Weyl)
            .collect()
    }

    pub fn chord_events(&self) -> Vec<&CausticEvent> {
        self.caustic_events
            .iter()
            .filter(|e| e.kind == CausticKind::Chord)
            .collect()
    }

    /// Winding at the largest sample `t <= t_query` (piecewise-constant
    /// between events).
    pub fn winding_at(&self, t_query: f64) -> Option<f64> {
        let mut last = None;
        for s in &self.samples {
            if s.t <= t_query + 1e-12 {
                last = Some(s.element.phase_winding());
            }
        }
        last
    }
}

/// Tracing knobs. `initial_samples` should comfortably separate the events
/// of the family; refinement only sharpens what the grid already sees.
#[derive(Debug, Clone, Copy)]
pub struct TraceConfig {
    pub initial_samples: usize,
    /// Threshold on the refined `|det|` minimum below which an even-order
    /// touch counts as a caustic, relative to the local determinant scale.
    pub touch_tol: f64,
    /// Golden-section iterations for touch refinement.
    pub min_search_iters: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            initial_samples: 256,
            touch_tol: 1e-9,
            min_search_iters: 96,
        }
    }
}

struct SampledPoint {
    t: f64,
    m: SymplecticMatrix,
    dp: f64,
    dm: f64,
}

fn sample_at(f: &dyn Fn(f64) -> SymplecticMatrix, t: f64) -> SampledPoint {
    let m = f(t);
    let dp = m.det_i_plus();
    let dm = m.det_i_minus();
    SampledPoint { t, m, dp, dm }
}

fn det_of_kind(p: &SampledPoint, kind: CausticKind) -> f64 {
    match kind {
        CausticKind::Weyl => p.dp,
        CausticKind::Chord => p.dm,
    }
}

/// Bisect a sign change of the chosen determinant to `tol.bisect`.
fn bisect_root(
    f: &dyn Fn(f64) -> SymplecticMatrix,
    kind: CausticKind,
    mut a: f64,
    mut fa: f64,
    mut b: f64,
    tol_bisect: f64,
) -> f64 {
    for _ in 0..200 {
        if (b - a).abs() <= tol_bisect {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = det_of_kind(&sample_at(f, mid), kind);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimum of `|det|` on `[a, b]`, with a final parabolic
/// vertex polish on the determinant itself. Returns `(t_min, det(t_min))`.
fn refine_min(
    f: &dyn Fn(f64) -> SymplecticMatrix,
    kind: CausticKind,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let g = |t: f64| det_of_kind(&sample_at(f, t), kind);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut g1 = g(x1).abs();
    let mut g2 = g(x2).abs();
    for _ in 0..iters {
        if g1 < g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - inv_phi * (b - a);
            g1 = g(x1).abs();
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + inv_phi * (b - a);
            g2 = g(x2).abs();
        }
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    let mut t = 0.5 * (a + b);
    // Parabolic polish (on the signed determinant: exact for an analytic
    // even-order touch).
    for _ in 0..2 {
        let d = 1e-5 * (1.0 + t.abs());
        let (fm, f0, fp) = (g(t - d), g(t), g(t + d));
        let denom = fp - 2.0 * f0 + fm;
        if denom.abs() > 0.0 {
            let shift = -0.5 * (fp - fm) / denom * d;
            if shift.is_finite() && shift.abs() < d * 10.0 {
                t += shift;
            }
        }
    }
    (t, g(t))
}

fn degeneracy_at(m: &SymplecticMatrix, kind: CausticKind, tol: &Tolerances) -> usize {
    let d = m.matrix().nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let a = match kind {
        CausticKind::Weyl => &id + m.matrix(),
        CausticKind::Chord => &id - m.matrix(),
    };
    let sv = a.svd(false, false).singular_values;
    let cut = tol.eigen.sqrt() * (1.0 + m.matrix().amax());
    sv.iter().filter(|s| **s <= cut).count().max(1)
}

/// Signature input for the jump rule: `B` for Weyl events, `-B~` for chord
/// events (the chord exponent carries the opposite sign).
fn jump_form(m: &SymplecticMatrix, kind: CausticKind, tol: &Tolerances) -> Option<DMatrix<f64>> {
    let pair = cayley_pair(m, tol);
    match kind {
        CausticKind::Weyl => pair.centre.map(|b| b.matrix().clone()),
        CausticKind::Chord => pair.chord.map(|bt| -bt.matrix()),
    }
}

/// Phase jump across a single Weyl caustic from strictly bracketing centre
/// forms: `Θ = (π/2)(N₋ before - N₋ after)`.
pub fn caustic_phase_jump(
    b_before: &CayleyForm,
    b_after: &CayleyForm,
) -> Result<f64, TraceError> {
    if b_before.kind() != CayleyKind::Centre || b_after.kind() != CayleyKind::Centre {
        return Err(TraceError::Bracket(
            "Weyl jump needs centre-kind forms on both sides".into(),
        ));
    }
    let sb = signature_default(b_before.matrix())
        .map_err(|e| TraceError::Bracket(e.to_string()))?;
    let sa = signature_default(b_after.matrix())
        .map_err(|e| TraceError::Bracket(e.to_string()))?;
    if sb.n_zero > 0 || sa.n_zero > 0 {
        return Err(TraceError::Bracket(
            "bracketing forms must be sampled strictly off the caustic".into(),
        ));
    }
    Ok(std::f64::consts::FRAC_PI_2 * (sb.n_minus as f64 - sa.n_minus as f64))
}

/// Phase jump across a single chord caustic from bracketing chord forms:
/// the Weyl rule with `B` replaced by `-B~`.
pub fn chord_phase_jump(
    bt_before: &CayleyForm,
    bt_after: &CayleyForm,
) -> Result<f64, TraceError> {
    if bt_before.kind() != CayleyKind::Chord || bt_after.kind() != CayleyKind::Chord {
        return Err(TraceError::Bracket(
            "chord jump needs chord-kind forms on both sides".into(),
        ));
    }
    let sb = signature_default(&(-bt_before.matrix()))
        .map_err(|e| TraceError::Bracket(e.to_string()))?;
    let sa = signature_default(&(-bt_after.matrix()))
        .map_err(|e| TraceError::Bracket(e.to_string()))?;
    if sb.n_zero > 0 || sa.n_zero > 0 {
        return Err(TraceError::Bracket(
            "bracketing forms must be sampled strictly off the caustic".into(),
        ));
    }
    Ok(std::f64::consts::FRAC_PI_2 * (sb.n_minus as f64 - sa.n_minus as f64))
}

/// Locate every caustic of the family on `[t0, t1]`.
///
/// Sign changes are bisected; even-order touches are found as near-zero
/// minima of `|det|`; a dip crossing zero twice within one step is split
/// into its two crossings. Events at the range ends are reported with the
/// boundary flag and no jump.
pub fn detect_caustics(
    f: &dyn Fn(f64) -> SymplecticMatrix,
    t_range: (f64, f64),
    tol: &Tolerances,
    cfg: &TraceConfig,
) -> Result<Vec<CausticEvent>, TraceError> {
    let (t0, t1) = t_range;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(TraceError::Input(format!("bad range [{t0}, {t1}]")));
    }
    let n = cfg.initial_samples.max(16);
    let h = (t1 - t0) / n as f64;
    let pts: Vec<SampledPoint> = (0..=n)
        .map(|k| sample_at(f, t0 + k as f64 * h))
        .collect();

    let mut events: Vec<CausticEvent> = Vec::new();
    // A zero only counts as an event when it is isolated: a family lying
    // identically on a caustic (e.g. the constant identity in the chord
    // representation) has no crossings and no jumps.
    let isolated = |kind: CausticKind, t_m: f64| -> bool {
        let scale_at = |t: f64| {
            let m = f(t);
            (1.0 + m.matrix().amax()).powi(m.matrix().nrows() as i32)
        };
        let probe = |t: f64| det_of_kind(&sample_at(f, t), kind).abs() > 10.0 * cfg.touch_tol * scale_at(t);
        let left = if t_m - h >= t0 { probe(t_m - h) } else { true };
        let right = if t_m + h <= t1 { probe(t_m + h) } else { true };
        left && right
    };
    for kind in [CausticKind::Weyl, CausticKind::Chord] {
        let mut roots: Vec<f64> = Vec::new();

        // Odd-order crossings between adjacent samples.
        for w in pts.windows(2) {
            let (fa, fb) = (det_of_kind(&w[0], kind), det_of_kind(&w[1], kind));
            if fa == 0.0 {
                continue; // handled by the touch scan / boundary check
            }
            if fa * fb < 0.0 {
                roots.push(bisect_root(f, kind, w[0].t, fa, w[1].t, tol.bisect));
            }
        }

        // Even-order touches at interior |det| minima.
        for i in 1..n {
            let (fl, fc, fr) = (
                det_of_kind(&pts[i - 1], kind).abs(),
                det_of_kind(&pts[i], kind).abs(),
                det_of_kind(&pts[i + 1], kind).abs(),
            );
            if fc <= fl && fc <= fr {
                let (tm, val) = refine_min(f, kind, pts[i - 1].t, pts[i + 1].t, cfg.min_search_iters);
                let scale = {
                    let m = f(tm);
                    (1.0 + m.matrix().amax()).powi(m.matrix().nrows() as i32)
                };
                if val.abs() <= cfg.touch_tol * scale {
                    if isolated(kind, tm) {
                        roots.push(tm);
                    }
                } else if val < 0.0 && det_of_kind(&pts[i - 1], kind) > 0.0 {
                    // A dip below zero hidden between samples: two crossings.
                    let fl_signed = det_of_kind(&pts[i - 1], kind);
                    let fr_signed = det_of_kind(&pts[i + 1], kind);
                    if fr_signed > 0.0 {
                        roots.push(bisect_root(f, kind, pts[i - 1].t, fl_signed, tm, tol.bisect));
                        roots.push(bisect_root(f, kind, tm, val, pts[i + 1].t, tol.bisect));
                    }
                } else if val > 0.0 && det_of_kind(&pts[i - 1], kind) < 0.0 {
                    let fl_signed = det_of_kind(&pts[i - 1], kind);
                    let fr_signed = det_of_kind(&pts[i + 1], kind);
                    if fr_signed < 0.0 {
                        roots.push(bisect_root(f, kind, pts[i - 1].t, fl_signed, tm, tol.bisect));
                        roots.push(bisect_root(f, kind, tm, val, pts[i + 1].t, tol.bisect));
                    }
                }
            }
        }

        // Range ends.
        for &(te, inner) in &[(t0, t0 + h), (t1, t1 - h)] {
            let pe = sample_at(f, te);
            let scale = (1.0 + pe.m.matrix().amax()).powi(pe.m.matrix().nrows() as i32);
            if det_of_kind(&pe, kind).abs() <= cfg.touch_tol * scale {
                if isolated(kind, te) {
                    roots.push(te);
                }
            } else {
                // A touch may sit between the end and the first sample.
                let (tm, val) = refine_min(f, kind, te.min(inner), te.max(inner), cfg.min_search_iters);
                if val.abs() <= cfg.touch_tol * scale
                    && (tm - te).abs() > tol.bisect
                    && isolated(kind, tm)
                {
                    roots.push(tm);
                }
            }
        }

        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= (t1 - t0) * 1e-12 + tol.bisect);

        for t_star in roots {
            let boundary = (t_star - t0).abs() <= tol.bisect || (t_star - t1).abs() <= tol.bisect;
            let m_star = f(t_star);
            let degeneracy = degeneracy_at(&m_star, kind, tol);
            events.push(CausticEvent {
                t_star,
                kind,
                degeneracy,
                theta_jump: 0.0,
                n_minus_before: 0,
                n_minus_after: 0,
                boundary,
            });
        }
    }

    events.sort_by(|a, b| a.t_star.partial_cmp(&b.t_star).unwrap());

    // Simultaneous Weyl + chord caustic is out of the rule's domain.
    for w in events.windows(2) {
        if w[0].kind != w[1].kind && (w[1].t_star - w[0].t_star).abs() <= 16.0 * tol.bisect {
            return Err(TraceError::DegenerateFamily(format!(
                "Weyl and chord caustics coincide at t = {:.12}",
                w[0].t_star
            )));
        }
    }

    // Bracketing signatures and jumps.
    let all_ts: Vec<f64> = events.iter().map(|e| e.t_star).collect();
    for (idx, ev) in events.iter_mut().enumerate() {
        if ev.boundary {
            continue;
        }
        let prev = all_ts[..idx]
            .iter()
            .copied()
            .fold(t0, f64::max)
            .max(t0);
        let next = all_ts[idx + 1..]
            .iter()
            .copied()
            .fold(t1, f64::min)
            .min(t1);
        let gap = (ev.t_star - prev).min(next - ev.t_star);
        if gap <= 4.0 * tol.bisect {
            return Err(TraceError::Resolution(format!(
                "events too close to bracket at t = {:.12}",
                ev.t_star
            )));
        }
        let mut resolved = false;
        for frac in [0.5, 0.25, 0.1, 0.04, 0.01] {
            let dt = gap * frac;
            let (mb, ma) = (f(ev.t_star - dt), f(ev.t_star + dt));
            let (Some(fb), Some(fa)) = (jump_form(&mb, ev.kind, tol), jump_form(&ma, ev.kind, tol))
            else {
                continue;
            };
            let (Ok(sb), Ok(sa)) = (signature_default(&fb), signature_default(&fa)) else {
                continue;
            };
            if sb.n_zero > 0 || sa.n_zero > 0 {
                continue;
            }
            ev.n_minus_before = sb.n_minus;
            ev.n_minus_after = sa.n_minus;
            ev.theta_jump =
                std::f64::consts::FRAC_PI_2 * (sb.n_minus as f64 - sa.n_minus as f64);
            resolved = true;
            break;
        }
        if !resolved {
            return Err(TraceError::Resolution(format!(
                "could not bracket the {:?} event at t = {:.12} with regular forms",
                ev.kind, ev.t_star
            )));
        }
    }

    Ok(events)
}

/// Trace a family: locate its caustics and carry both windings across.
///
/// `initial.m` must be the family at `t0`; its winding seeds the Weyl
/// winding (the identity-connected choice is winding 0; a non-identity
/// start has no canonical sheet and must be supplied by the caller).
pub fn trace_family(
    f: &dyn Fn(f64) -> SymplecticMatrix,
    t_range: (f64, f64),
    initial: &MetaplecticElement,
    tol: &Tolerances,
    cfg: &TraceConfig,
) -> Result<FamilyTrace, TraceError> {
    let (t0, t1) = t_range;
    let m0 = f(t0);
    if (m0.matrix() - initial.m().matrix()).amax() > 1e-8 * (1.0 + m0.matrix().amax()) {
        return Err(TraceError::Input(
            "initial element does not match the family at t0".into(),
        ));
    }

    let events = detect_caustics(f, t_range, tol, cfg)?;

    let n = cfg.initial_samples.max(16);
    let h = (t1 - t0) / n as f64;

    // Anchor the chord winding at the first sample with both forms regular.
    let mut chord_anchor: Option<(usize, f64)> = None;

    let mut samples = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = t0 + k as f64 * h;
        let p = sample_at(f, t);
        if p.dp.abs() <= tol.caustic && p.dm.abs() <= tol.caustic {
            return Err(TraceError::DegenerateFamily(format!(
                "both determinants vanish at sample t = {t:.12}"
            )));
        }
        let pair = cayley_pair(&p.m, tol);
        let sigma_b = pair
            .centre
            .as_ref()
            .and_then(|b| signature_default(b.matrix()).ok())
            .map(|s| s.sigma);
        let sigma_btilde = pair
            .chord
            .as_ref()
            .and_then(|bt| signature_default(bt.matrix()).ok())
            .map(|s| s.sigma);

        let weyl_winding = initial.phase_winding()
            + events
                .iter()
                .filter(|e| e.kind == CausticKind::Weyl && e.t_star < t - 1e-15)
                .map(|e| e.theta_jump)
                .sum::<f64>();
        if chord_anchor.is_none() {
            if let Some(sb) = sigma_b {
                if pair.chord.is_some() {
                    chord_anchor = Some((
                        k,
                        weyl_winding + std::f64::consts::FRAC_PI_4 * sb as f64,
                    ));
                }
            }
        }

        let event_flag = events
            .iter()
            .any(|e| (e.t_star - t).abs() <= h * 0.5 + tol.bisect);

        samples.push(TraceSample {
            t,
            element: MetaplecticElement::from_parts(p.m, weyl_winding),
            chord_winding: f64::NAN, // filled below
            det_i_plus: p.dp,
            det_i_minus: p.dm,
            sigma_b,
            sigma_btilde,
            event_flag,
        });
    }

    // Chord winding: constant from the anchor, jumping at chord events.
    if let Some((k0, phi0)) = chord_anchor {
        let t_anchor = samples[k0].t;
        for s in samples.iter_mut() {
            let jumps: f64 = events
                .iter()
                .filter(|e| e.kind == CausticKind::Chord && !e.boundary)
                .filter(|e| {
                    if s.t >= t_anchor {
                        e.t_star > t_anchor && e.t_star < s.t - 1e-15
                    } else {
                        e.t_star < t_anchor && e.t_star > s.t + 1e-15
                    }
                })
                .map(|e| if s.t >= t_anchor { e.theta_jump } else { -e.theta_jump })
                .sum();
            s.chord_winding = phi0 + jumps;
        }
    }

    // Representation log: the tag names the representation that carries the
    // phase across each interval's right end.
    let mut boundaries: Vec<(f64, Option<CausticKind>)> = vec![(t0, None)];
    for e in &events {
        if !e.boundary {
            boundaries.push((e.t_star, Some(e.kind)));
        }
    }
    boundaries.push((t1, None));
    let mut representation_log = Vec::new();
    for w in boundaries.windows(2) {
        let tag = match w[1].1 {
            Some(CausticKind::Weyl) => RepTag::ChordContinuous,
            _ => RepTag::WeylContinuous,
        };
        representation_log.push(RepInterval {
            t_start: w[0].0,
            t_end: w[1].0,
            tag,
        });
    }

    Ok(FamilyTrace {
        samples,
        caustic_events: events,
        representation_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::harmonic_element;
    use crate::symplectic::{flow, Dim, QuadHamiltonian};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn harmonic_family() -> impl Fn(f64) -> SymplecticMatrix {
        let h = QuadHamiltonian::harmonic(1.0);
        move |t: f64| flow(&h, t)
    }

    #[test]
    fn harmonic_trace_catches_all_caustics() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let f = harmonic_family();
        let trace = trace_family(
            &f,
            (0.0, 4.0 * PI),
            &MetaplecticElement::identity(Dim::new(1).unwrap()),
            &tol,
            &cfg,
        )
        .unwrap();

        let weyl: Vec<_> = trace.weyl_events();
        assert_eq!(weyl.len(), 2);
        assert_abs_diff_eq!(weyl[0].t_star, PI, epsilon = 1e-8);
        assert_abs_diff_eq!(weyl[1].t_star, 3.0 * PI, epsilon = 1e-8);
        for e in &weyl {
            assert_eq!(e.degeneracy, 2);
            assert_abs_diff_eq!(e.theta_jump, PI);
            assert_eq!((e.n_minus_before, e.n_minus_after), (2, 0));
        }

        let chord: Vec<_> = trace.chord_events();
        assert_eq!(chord.len(), 3);
        assert!(chord[0].boundary && (chord[0].t_star - 0.0).abs() < 1e-8);
        assert_abs_diff_eq!(chord[1].t_star, 2.0 * PI, epsilon = 1e-8);
        assert!(chord[2].boundary && (chord[2].t_star - 4.0 * PI).abs() < 1e-8);
        assert_abs_diff_eq!(chord[1].theta_jump, PI);

        // Winding ladder: 0 before π, π to 3π, 2π after.
        assert_abs_diff_eq!(trace.winding_at(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(trace.winding_at(PI + 0.5).unwrap(), PI);
        assert_abs_diff_eq!(trace.winding_at(3.0 * PI + 0.5).unwrap(), 2.0 * PI);

        // Double cover: -1 at 2π, +1 at 4π.
        let at_2pi = trace.winding_at(2.0 * PI + 1e-6).unwrap();
        assert!((at_2pi - PI).abs() < 1e-9);
        let at_4pi = trace.winding_at(4.0 * PI).unwrap();
        assert!((at_4pi - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn harmonic_winding_matches_closed_form() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let f = harmonic_family();
        let trace = trace_family(
            &f,
            (0.0, 4.0 * PI),
            &MetaplecticElement::identity(Dim::new(1).unwrap()),
            &tol,
            &cfg,
        )
        .unwrap();
        for s in &trace.samples {
            if s.event_flag {
                continue;
            }
            let expect = harmonic_element(1.0, s.t);
            assert_abs_diff_eq!(
                s.element.phase_winding(),
                expect.phase_winding(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn harmonic_chord_winding_jumps_at_2pi_only() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let f = harmonic_family();
        let trace = trace_family(
            &f,
            (0.0, 4.0 * PI),
            &MetaplecticElement::identity(Dim::new(1).unwrap()),
            &tol,
            &cfg,
        )
        .unwrap();
        for s in &trace.samples {
            if s.event_flag || !s.chord_winding.is_finite() {
                continue;
            }
            let expect = if s.t < 2.0 * PI { -FRAC_PI_2 } else { FRAC_PI_2 };
            assert_abs_diff_eq!(s.chord_winding, expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn inverted_oscillator_has_no_events() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let h = QuadHamiltonian::inverted(0.8);
        let f = move |t: f64| flow(&h, t);
        let trace = trace_family(
            &f,
            (0.05, 5.0),
            &MetaplecticElement::from_parts(flow(&QuadHamiltonian::inverted(0.8), 0.05), 0.0),
            &tol,
            &cfg,
        )
        .unwrap();
        assert!(trace.caustic_events.is_empty());
        for s in &trace.samples {
            assert_eq!(s.element.phase_winding(), 0.0);
        }
    }

    #[test]
    fn constant_identity_family() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let dim = Dim::new(1).unwrap();
        let f = move |_t: f64| SymplecticMatrix::identity(dim);
        let trace = trace_family(
            &f,
            (0.0, 1.0),
            &MetaplecticElement::identity(dim),
            &tol,
            &cfg,
        )
        .unwrap();
        // The identity sits on the chord caustic the whole time; the Weyl
        // side sees no event and the winding never moves.
        assert!(trace.weyl_events().is_empty());
        for s in &trace.samples {
            assert_eq!(s.element.phase_winding(), 0.0);
        }
    }

    #[test]
    fn reflected_hyperbolic_family_has_no_weyl_caustic() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let lam = 0.8;
        let h = QuadHamiltonian::inverted(lam);
        let f = move |t: f64| {
            let m = flow(&h, t);
            SymplecticMatrix::new_unchecked(-m.matrix().clone())
        };
        let init = f(0.3);
        let trace = trace_family(
            &f,
            (0.3, 4.0),
            &MetaplecticElement::from_parts(init, -FRAC_PI_2),
            &tol,
            &cfg,
        )
        .unwrap();
        assert!(trace.weyl_events().is_empty());
    }

    #[test]
    fn jump_rule_examples() {
        let tol = tols();
        // Harmonic bracket around ωt = π: N₋ 2 → 0, Θ = +π.
        let f = harmonic_family();
        let before = crate::symplectic::centre_form(&f(PI - 0.2), &tol).unwrap();
        let after = crate::symplectic::centre_form(&f(PI + 0.2), &tol).unwrap();
        assert_abs_diff_eq!(caustic_phase_jump(&before, &after).unwrap(), PI);

        // Unchanged signature: Θ = 0.
        let b1 = crate::symplectic::centre_form(&f(0.4), &tol).unwrap();
        let b2 = crate::symplectic::centre_form(&f(0.9), &tol).unwrap();
        assert_abs_diff_eq!(caustic_phase_jump(&b1, &b2).unwrap(), 0.0);

        // Elliptic → reflected-hyperbolic: N₋ 2 → 1, Θ = +π/2.
        let lam = 0.8;
        let hinv = QuadHamiltonian::inverted(lam);
        let refl = SymplecticMatrix::new_unchecked(-flow(&hinv, 0.4).matrix().clone());
        let b_refl = crate::symplectic::centre_form(&refl, &tol).unwrap();
        assert_abs_diff_eq!(
            caustic_phase_jump(&before, &b_refl).unwrap(),
            FRAC_PI_2
        );
    }

    #[test]
    fn chord_jump_rule_examples() {
        let tol = tols();
        let f = harmonic_family();
        // Across ωt = 2π: Θ~ = +π with the -B~ convention.
        let before = crate::symplectic::chord_form(&f(2.0 * PI - 0.3), &tol).unwrap();
        let after = crate::symplectic::chord_form(&f(2.0 * PI + 0.3), &tol).unwrap();
        assert_abs_diff_eq!(chord_phase_jump(&before, &after).unwrap(), PI);

        // Same signature on both sides: Θ~ = 0.
        let b1 = crate::symplectic::chord_form(&f(0.4), &tol).unwrap();
        let b2 = crate::symplectic::chord_form(&f(0.9), &tol).unwrap();
        assert_abs_diff_eq!(chord_phase_jump(&b1, &b2).unwrap(), 0.0);

        // Elliptic ↔ hyperbolic through a shear is a chord caustic with
        // Θ~ = ±π/2: family M(s) = exp(J diag(1, s)) crosses it at s = 0.
        let fam = |s: f64| {
            let h = QuadHamiltonian::new(
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s]),
                &Tolerances::default(),
            )
            .unwrap();
            flow(&h, 1.0)
        };
        let bb = crate::symplectic::chord_form(&fam(0.2), &tol).unwrap();
        let ba = crate::symplectic::chord_form(&fam(-0.2), &tol).unwrap();
        let theta = chord_phase_jump(&bb, &ba).unwrap();
        assert_abs_diff_eq!(theta.abs(), FRAC_PI_2);
    }

    #[test]
    fn shear_family_chord_caustic_detected() {
        // M(s) elliptic ↔ hyperbolic through the identity-shear at s = 0:
        // a chord caustic with a sign change of det(I - M).
        let tol = tols();
        let cfg = TraceConfig::default();
        let f = |s: f64| {
            let h = QuadHamiltonian::new(
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s]),
                &Tolerances::default(),
            )
            .unwrap();
            flow(&h, 1.0)
        };
        let events = detect_caustics(&f, (-0.5, 0.5), &tol, &cfg).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, CausticKind::Chord);
        assert!(events[0].t_star.abs() < 1e-8);
        assert_abs_diff_eq!(events[0].theta_jump.abs(), FRAC_PI_2);
    }

    #[test]
    fn simultaneous_caustics_are_refused() {
        // A family passing through a matrix with det(I+M) = det(I-M) = 0
        // at the same parameter: M(s) = [[1+s, c(s)], [0, 1/(1+s)]] has
        // det(I-M) = -s²/(1+s); pair it with a reflection block... simpler:
        // glue two families so both dets vanish at s = 0 in an N = 2 matrix.
        let tol = tols();
        let cfg = TraceConfig::default();
        let f = |s: f64| {
            // Block diag of a rotation near π (Weyl caustic at s=0) and a
            // rotation near 0 (chord caustic at s=0).
            let r1 = PI + s;
            let r2 = s;
            let mut m = DMatrix::<f64>::zeros(4, 4);
            // (p1, p2, q1, q2) ordering: blocks at (0,2) and (1,3).
            let (s1, c1) = r1.sin_cos();
            let (s2, c2) = r2.sin_cos();
            m[(0, 0)] = c1;
            m[(0, 2)] = -s1;
            m[(2, 0)] = s1;
            m[(2, 2)] = c1;
            m[(1, 1)] = c2;
            m[(1, 3)] = -s2;
            m[(3, 1)] = s2;
            m[(3, 3)] = c2;
            SymplecticMatrix::new_unchecked(m)
        };
        let err = detect_caustics(&f, (-0.5, 0.5), &tol, &cfg);
        assert!(matches!(err, Err(TraceError::DegenerateFamily(_))));
    }

    #[test]
    fn product_family_caustic_at_unit_parameter() {
        // The elliptic × hyperbolic product family crosses its caustic at
        // γω = 1 with a sign change (single zero eigenvalue).
        let tol = tols();
        let cfg = TraceConfig::default();
        let omega = 2.0;
        let f = move |g: f64| {
            let (m1, m2) =
                crate::families::elliptic_hyperbolic_matrices(omega, g, &Tolerances::default())
                    .unwrap();
            m2.compose(&m1).unwrap()
        };
        let events = detect_caustics(&f, (0.2, 0.8), &tol, &cfg).unwrap();
        let weyl: Vec<_> = events
            .iter()
            .filter(|e| e.kind == CausticKind::Weyl)
            .collect();
        assert_eq!(weyl.len(), 1);
        assert_abs_diff_eq!(weyl[0].t_star, 1.0 / omega, epsilon = 1e-9);
        assert_eq!(weyl[0].degeneracy, 1);
        let m_star = f(weyl[0].t_star);
        assert!(m_star.trace() + 2.0 < 1e-9);
    }

    #[test]
    fn initial_element_mismatch_is_an_input_error() {
        let tol = tols();
        let cfg = TraceConfig::default();
        let f = harmonic_family();
        let err = trace_family(
            &f,
            (0.5, 1.0),
            &MetaplecticElement::identity(Dim::new(1).unwrap()),
            &tol,
            &cfg,
        );
        assert!(matches!(err, Err(TraceError::Input(_))));
    }
}
