//! Pinching hypotheses evaluated over a sample set, the integral criterion,
//! Einstein / conformal-flatness / isotropic-curvature detectors, and the
//! assembled classification report.
//!
//! Every pointwise check uses the tolerance `tol = base · max(1, |s|)` at
//! each point. A verdict fails when some margin is below `−tol`, sits on the
//! boundary when no margin fails but some has `|margin| ≤ tol`, and passes
//! otherwise. The reported margin and worst point are those of the smallest
//! margin (earliest sample on ties).

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{PointAnalysis, SampleSet};
use crate::geometry::Vec4;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const INTEGRAL_RELATIVE_TOLERANCE: f64 = 1e-3;
/// Coverage defect above which a grid is rejected for quadrature.
pub const COVERAGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("no sample points")]
    EmptySample,
    #[error("sample is not a midpoint grid covering the declared domain (defect {0:e})")]
    Coverage(f64),
    #[error("{check} requires {requirement}; violated at {point:?} ({detail})")]
    Precondition {
        check: &'static str,
        requirement: &'static str,
        point: Vec4,
        detail: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Boundary,
    Fail,
}

impl Status {
    pub fn holds(self) -> bool {
        self != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub condition: &'static str,
    pub status: Status,
    /// Check-specific name of the status (e.g. strict / weak / fails).
    pub label: &'static str,
    pub holds: bool,
    pub margin: f64,
    pub worst_point: Vec4,
    pub worst_index: usize,
    /// Tolerance at the worst point.
    pub tolerance: f64,
    pub points: usize,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub base: f64,
    pub integral_relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            base: DEFAULT_TOLERANCE,
            integral_relative: INTEGRAL_RELATIVE_TOLERANCE,
        }
    }
}

impl Tolerances {
    pub fn at(&self, s: f64) -> f64 {
        self.base * s.abs().max(1.0)
    }
}

fn pointwise<F>(
    points: &[PointAnalysis],
    tol: &Tolerances,
    condition: &'static str,
    labels: [&'static str; 3],
    margin: F,
) -> Result<Verdict, ClassifyError>
where
    F: Fn(&PointAnalysis) -> f64,
{
    if points.is_empty() {
        return Err(ClassifyError::EmptySample);
    }
    let mut worst: Option<(f64, usize)> = None;
    let (mut any_fail, mut any_boundary) = (false, false);
    for (i, p) in points.iter().enumerate() {
        let m = margin(p);
        let t = tol.at(p.scalar());
        if m.is_nan() || m < -t {
            any_fail = true;
        } else if m.abs() <= t {
            any_boundary = true;
        }
        let replace = match worst {
            None => true,
            Some((w, _)) => !w.is_nan() && (m.is_nan() || m < w),
        };
        if replace {
            worst = Some((m, i));
        }
    }
    let worst = worst.expect("non-empty sample");
    let status = if any_fail {
        Status::Fail
    } else if any_boundary {
        Status::Boundary
    } else {
        Status::Pass
    };
    let label = match status {
        Status::Pass => labels[0],
        Status::Boundary => labels[1],
        Status::Fail => labels[2],
    };
    let wp = &points[worst.1];
    Ok(Verdict {
        condition,
        status,
        label,
        holds: status.holds(),
        margin: worst.0,
        worst_point: wp.point,
        worst_index: worst.1,
        tolerance: tol.at(wp.scalar()),
        points: points.len(),
        note: None,
    })
}

const PASS_LABELS: [&str; 3] = ["pass", "boundary", "fail"];

/// First point where `s ≤ tol`, if any.
fn nonpositive_scalar<'a>(points: &'a [PointAnalysis], tol: &Tolerances) -> Option<&'a PointAnalysis> {
    points.iter().find(|p| p.scalar() <= tol.at(p.scalar()))
}

/// `k1 ≥ s/24` with `s > 0`.
pub fn pinch_thm1(points: &[PointAnalysis], tol: &Tolerances) -> Result<Verdict, ClassifyError> {
    let mut v = pointwise(points, tol, "k1 >= s/24 and s > 0", PASS_LABELS, |p| {
        p.summary.k1 - p.scalar() / 24.0
    })?;
    if let Some(p) = nonpositive_scalar(points, tol) {
        v.status = Status::Fail;
        v.label = "fail";
        v.holds = false;
        v.note = Some(format!("scalar curvature not positive: s = {:e} at {:?}", p.scalar(), p.point));
    }
    Ok(v)
}

/// The dual form `k3 ≤ s/6`.
pub fn pinch_thm1_dual(points: &[PointAnalysis], tol: &Tolerances) -> Result<Verdict, ClassifyError> {
    pointwise(points, tol, "k3 <= s/6", PASS_LABELS, |p| p.scalar() / 6.0 - p.summary.k3)
}

/// `max(w3⁺, w3⁻) ≤ s/6`: positive / nonnegative / indefinite.
pub fn isotropic_status(points: &[PointAnalysis], tol: &Tolerances) -> Result<Verdict, ClassifyError> {
    pointwise(
        points,
        tol,
        "max(w3+, w3-) <= s/6",
        ["positive", "nonnegative", "indefinite"],
        |p| p.scalar() / 6.0 - p.spectra.wplus[2].max(p.spectra.wminus[2]),
    )
}

/// `k3 < s/4` (strict), `k3 ≤ s/4` (weak). Requires `s > 0`.
pub fn thm2_condition(points: &[PointAnalysis], tol: &Tolerances) -> Result<Verdict, ClassifyError> {
    let v = pointwise(points, tol, "k3 <= s/4", ["strict", "weak", "fails"], |p| {
        p.scalar() / 4.0 - p.summary.k3
    })?;
    require_positive_scalar(points, tol, "thm1_6")?;
    Ok(v)
}

fn require_positive_scalar(points: &[PointAnalysis], tol: &Tolerances, check: &'static str) -> Result<(), ClassifyError> {
    match nonpositive_scalar(points, tol) {
        Some(p) => Err(ClassifyError::Precondition {
            check,
            requirement: "positive scalar curvature",
            point: p.point,
            detail: format!("s = {:e}", p.scalar()),
        }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralVerdict {
    pub condition: &'static str,
    /// `Σ (s − 4 k3) · weight`
    pub value: f64,
    pub status: Status,
    pub holds: bool,
    pub tolerance: f64,
    /// `Σ weight`
    pub volume: f64,
    /// `Σ s · weight`
    pub total_scalar: f64,
    /// `Σ |s| · weight`
    pub total_abs_scalar: f64,
    pub points: usize,
}

/// Midpoint-rule value of `∫(s − 4 k3) dV`. `samples` must be the full grid
/// the analyses came from; skipped points contribute nothing.
pub fn integral_criterion(
    points: &[PointAnalysis],
    samples: &SampleSet,
    tol: &Tolerances,
) -> Result<IntegralVerdict, ClassifyError> {
    if points.is_empty() {
        return Err(ClassifyError::EmptySample);
    }
    let defect = samples.coverage_defect();
    if samples.kind != crate::analysis::SampleKind::Midpoint || !(defect <= COVERAGE_TOLERANCE) {
        return Err(ClassifyError::Coverage(defect));
    }
    let (mut value, mut volume, mut total, mut total_abs) = (0.0, 0.0, 0.0, 0.0);
    for p in points {
        let s = p.scalar();
        value += (s - 4.0 * p.summary.k3) * p.volume_weight;
        volume += p.volume_weight;
        total += s * p.volume_weight;
        total_abs += s.abs() * p.volume_weight;
    }
    let tolerance = tol.integral_relative * total_abs;
    let status = if value < -tolerance {
        Status::Fail
    } else if value.abs() <= tolerance {
        Status::Boundary
    } else {
        Status::Pass
    };
    Ok(IntegralVerdict {
        condition: "integral of (s - 4 k3) dV >= 0",
        value,
        status,
        holds: status.holds(),
        tolerance,
        volume,
        total_scalar: total,
        total_abs_scalar: total_abs,
        points: points.len(),
    })
}

pub fn thm3_threshold(s: f64, lambda1: f64) -> f64 {
    s * s / (8.0 * (3.0 * s + 5.0 * lambda1))
}

pub fn cor3_threshold_printed(s: f64, rho: f64) -> f64 {
    3.0 * s * s / (8.0 * (9.0 * s * s + 20.0 * rho))
}

pub fn cor3_threshold_derived(s: f64, rho: f64) -> f64 {
    3.0 * s * s / (8.0 * (9.0 * s + 20.0 * rho))
}

/// `k1 ≥ s²/(8(3s + 5λ1))`. Requires `λ1 > 0` and `s > 0`.
pub fn thm3_condition(points: &[PointAnalysis], lambda1: f64, tol: &Tolerances) -> Result<Verdict, ClassifyError> {
    let v = pointwise(points, tol, "k1 >= s^2/(8(3s + 5 lambda1))", PASS_LABELS, |p| {
        p.summary.k1 - thm3_threshold(p.scalar(), lambda1)
    })?;
    require_positive_scalar(points, tol, "thm1_8")?;
    Ok(v)
}

/// `|W⁺| + |W⁻| ≤ √6 (s/6 − 2 k1)`.
pub fn weyl_sum_bound(points: &[PointAnalysis], tol: &Tolerances) -> Result<Verdict, ClassifyError> {
    pointwise(points, tol, "|W+| + |W-| <= sqrt(6) (s/6 - 2 k1)", PASS_LABELS, |p| {
        6f64.sqrt() * (p.scalar() / 6.0 - 2.0 * p.summary.k1) - p.weyl_norms.0 - p.weyl_norms.1
    })
}

/// Printed and derived thresholds under `Ric ≥ ρ`.
pub fn cor3_condition(
    points: &[PointAnalysis],
    rho: f64,
    tol: &Tolerances,
) -> Result<(Verdict, Verdict), ClassifyError> {
    let printed = pointwise(points, tol, "k1 >= 3 s^2/(8(9 s^2 + 20 rho))", PASS_LABELS, |p| {
        p.summary.k1 - cor3_threshold_printed(p.scalar(), rho)
    })?;
    let mut derived = pointwise(points, tol, "k1 >= 3 s^2/(8(9 s + 20 rho))", PASS_LABELS, |p| {
        p.summary.k1 - cor3_threshold_derived(p.scalar(), rho)
    })?;
    derived.note = Some(format!("lambda1 >= 4 rho/3 = {:e} substituted", 4.0 * rho / 3.0));
    if let Some(p) = points.iter().find(|p| p.ricci_min < rho - tol.at(p.scalar())) {
        return Err(ClassifyError::Precondition {
            check: "cor1_9",
            requirement: "Ric >= rho",
            point: p.point,
            detail: format!("smallest Ricci eigenvalue {:e} < rho = {:e}", p.ricci_min, rho),
        });
    }
    Ok((printed, derived))
}

/// For Einstein metrics (`ρ = s/4`): `K ≥ 2ρ²/(12ρ + 5λ1)`, using `K_min = k1`.
pub fn cor_einstein_condition(
    points: &[PointAnalysis],
    lambda1: f64,
    tol: &Tolerances,
) -> Result<Verdict, ClassifyError> {
    let mut v = pointwise(points, tol, "K >= 2 rho^2/(12 rho + 5 lambda1), rho = s/4", PASS_LABELS, |p| {
        let rho = p.scalar() / 4.0;
        p.summary.k1 - 2.0 * rho * rho / (12.0 * rho + 5.0 * lambda1)
    })?;
    v.note = Some("minimum sectional curvature equals k1 on Einstein metrics".to_string());
    if let Some(p) = points.iter().find(|p| p.einstein_residual >= tol.at(p.scalar())) {
        return Err(ClassifyError::Precondition {
            check: "cor1_10",
            requirement: "an Einstein metric",
            point: p.point,
            detail: format!("|Ric - (s/4) g| = {:e}", p.einstein_residual),
        });
    }
    require_positive_scalar(points, tol, "cor1_10")?;
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detector {
    pub condition: &'static str,
    pub holds: bool,
    /// Largest residual over the sample.
    pub max_residual: f64,
    pub worst_point: Vec4,
    pub points: usize,
    /// Largest plane-sampling deviation backing the characterization, when
    /// plane checks were run.
    pub plane_crosscheck: Option<f64>,
}

fn detector<F, G>(points: &[PointAnalysis], condition: &'static str, residual: F, threshold: G, planes: Option<f64>) -> Result<Detector, ClassifyError>
where
    F: Fn(&PointAnalysis) -> f64,
    G: Fn(&PointAnalysis) -> f64,
{
    if points.is_empty() {
        return Err(ClassifyError::EmptySample);
    }
    let mut worst = (f64::NEG_INFINITY, 0usize);
    let mut holds = true;
    for (i, p) in points.iter().enumerate() {
        let r = residual(p);
        holds &= r < threshold(p);
        if r > worst.0 || r.is_nan() {
            worst = (r, i);
        }
    }
    Ok(Detector {
        condition,
        holds,
        max_residual: worst.0,
        worst_point: points[worst.1].point,
        points: points.len(),
        plane_crosscheck: planes,
    })
}

fn plane_max<F: Fn(&crate::analysis::PlaneCheck) -> f64>(points: &[PointAnalysis], f: F) -> Option<f64> {
    points
        .iter()
        .map(|p| p.planes.as_ref().map(&f))
        .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
}

/// `|Ric − (s/4)g| < tol` everywhere; cross-checked by `max |K⊥ − K|`.
pub fn einstein_test(points: &[PointAnalysis], tol: &Tolerances) -> Result<Detector, ClassifyError> {
    detector(
        points,
        "|Ric - (s/4) g| < tol",
        |p| p.einstein_residual,
        |p| tol.at(p.scalar()),
        plane_max(points, |c| c.kperp_minus_k),
    )
}

/// `|W⁺|² + |W⁻|² < tol²` everywhere; cross-checked by `max |K⊥ − s/12|`.
pub fn lcf_test(points: &[PointAnalysis], tol: &Tolerances) -> Result<Detector, ClassifyError> {
    detector(
        points,
        "|W+|^2 + |W-|^2 < tol^2",
        |p| p.spectra.normsq_plus + p.spectra.normsq_minus,
        |p| tol.at(p.scalar()).powi(2),
        plane_max(points, |c| c.kperp_minus_s12),
    )
}

/// Requested optional checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClassifyInputs {
    pub lambda1: Option<f64>,
    pub rho: Option<f64>,
    /// Whether the Theorem-3 check was requested explicitly.
    pub thm3_requested: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    pub thm1_2: Verdict,
    pub thm1_6: Verdict,
    pub cor1_7: Option<IntegralVerdict>,
    pub thm1_8: Option<Verdict>,
    pub cor1_9_printed: Option<Verdict>,
    pub cor1_9_derived: Option<Verdict>,
    pub einstein: Detector,
    pub lcf: Detector,
    pub isotropic: Verdict,
    pub thm1_2_dual: Verdict,
    pub thm1_8_weyl_bound: Verdict,
    pub cor1_10: Option<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreconditionViolation {
    pub check: &'static str,
    pub requirement: &'static str,
    /// The check was asked for explicitly (λ1 or ρ supplied); such violations
    /// make the CLI exit with status 2.
    pub requested: bool,
    pub point: Vec4,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conclusion {
    pub check: &'static str,
    pub hypothesis_sampled: bool,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub points: usize,
    pub tolerances: Tolerances,
    pub lambda1: Option<f64>,
    pub rho: Option<f64>,
    /// Smallest Ricci eigenvalue over the sample.
    pub rho_measured: f64,
    /// `4ρ/3`, used for the derived threshold when `ρ` is supplied.
    pub lambda1_from_rho: Option<f64>,
    pub verdicts: Verdicts,
    pub precondition_violations: Vec<PreconditionViolation>,
    pub conclusions: Vec<Conclusion>,
}

impl ClassificationReport {
    pub fn requested_violation(&self) -> bool {
        self.precondition_violations.iter().any(|v| v.requested)
    }
}

fn violation(e: ClassifyError, requested: bool) -> Result<PreconditionViolation, ClassifyError> {
    match e {
        ClassifyError::Precondition {
            check,
            requirement,
            point,
            detail,
        } => Ok(PreconditionViolation {
            check,
            requirement,
            requested,
            point,
            detail,
        }),
        other => Err(other),
    }
}

/// Pointwise verdict whose precondition failure is recorded instead of
/// aborting; the margins are still reported.
fn with_precondition<F, G>(
    run: F,
    fallback: G,
    requested: bool,
    violations: &mut Vec<PreconditionViolation>,
) -> Result<Verdict, ClassifyError>
where
    F: FnOnce() -> Result<Verdict, ClassifyError>,
    G: FnOnce() -> Result<Verdict, ClassifyError>,
{
    match run() {
        Ok(v) => Ok(v),
        Err(e) => {
            let pv = violation(e, requested)?;
            let mut v = fallback()?;
            v.note = Some(format!("precondition violated: {} ({})", pv.requirement, pv.detail));
            violations.push(pv);
            Ok(v)
        }
    }
}

const SPHERE_SUM: &str = "S^4 # (R x S^3)/G_1 # ... # (R x S^3)/G_n with each G_i a discrete group of isometries of R x S^3";

fn sampled(n: usize) -> String {
    format!("holds on all {n} sampled points")
}

fn conclusions(v: &Verdicts, n: usize) -> Vec<Conclusion> {
    let mut out = Vec::new();
    let mut push = |check: &'static str, holds: bool, premise: &str, conclusion: String| {
        let status = if holds { sampled(n) } else { "not satisfied on the sample".to_string() };
        out.push(Conclusion {
            check,
            hypothesis_sampled: holds,
            text: format!("{}: {premise} {status}. If it holds on a compact oriented M: {conclusion}", result_name(check)),
        });
    };
    push(
        "thm1_2",
        v.thm1_2.holds,
        "s > 0 and k1 >= s/24",
        format!("M is diffeomorphic to {SPHERE_SUM}, or M is isometric to CP^2 with the Fubini-Study metric. With finite fundamental group: M is diffeomorphic to S^4, or isometric to Fubini-Study CP^2."),
    );
    push(
        "thm1_6",
        v.thm1_6.holds,
        "s > 0 and k3 <= s/4",
        format!(
            "({}) with a nontrivial harmonic 2-form of constant length and k3 < s/4, M is definite; with a nontrivial parallel 2-form and k3 <= s/4, M is biholomorphic to CP^2 or its universal cover is isometric to a product of two surfaces homeomorphic to S^2.",
            v.thm1_6.label
        ),
    );
    if let Some(i) = &v.cor1_7 {
        push(
            "cor1_7",
            i.holds,
            "integral of (s - 4 k3) dV >= 0",
            "if M is simply connected with s > 0 and all harmonic forms have constant length, then M is homeomorphic to S^4, diffeomorphic to CP^2, or isometric to a product of two surfaces diffeomorphic to S^2.".to_string(),
        );
    }
    let lcf_or_cp2 = format!("M is diffeomorphic to {SPHERE_SUM} and g is locally conformally flat, or M is isometric to Fubini-Study CP^2.");
    if let Some(t) = &v.thm1_8 {
        push("thm1_8", t.holds, "k1 >= s^2/(8(3s + 5 lambda1)) with s > 0", format!("assuming harmonic Weyl tensor and analytic g (not checked): {lcf_or_cp2}"));
    }
    let both = |a: &Option<Verdict>| a.as_ref().map(|v| v.holds);
    if let (Some(p), Some(d)) = (both(&v.cor1_9_printed), both(&v.cor1_9_derived)) {
        push(
            "cor1_9",
            p && d,
            "Ric >= rho > 0 and k1 above both the printed and derived thresholds",
            "assuming harmonic Weyl tensor and analytic g (not checked): M is isometric to round S^4 or to Fubini-Study CP^2.".to_string(),
        );
    }
    if let Some(c) = &v.cor1_10 {
        push(
            "cor1_10",
            c.holds,
            "Einstein with K >= 2 rho^2/(12 rho + 5 lambda1)",
            "M is isometric to round S^4 or to Fubini-Study CP^2.".to_string(),
        );
    }
    out
}

fn result_name(check: &str) -> &'static str {
    match check {
        "thm1_2" => "Theorem 1.2",
        "thm1_6" => "Theorem 1.6",
        "cor1_7" => "Corollary 1.7",
        "thm1_8" => "Theorem 1.8",
        "cor1_9" => "Corollary 1.9",
        "cor1_10" => "Corollary 1.10",
        _ => unreachable!("known check"),
    }
}

/// Evaluates every check. `grid` enables the integral criterion.
pub fn classify_report(
    points: &[PointAnalysis],
    grid: Option<&SampleSet>,
    inputs: &ClassifyInputs,
    tol: &Tolerances,
) -> Result<ClassificationReport, ClassifyError> {
    if points.is_empty() {
        return Err(ClassifyError::EmptySample);
    }
    let mut violations = Vec::new();
    let thm1_6 = with_precondition(
        || thm2_condition(points, tol),
        || pointwise(points, tol, "k3 <= s/4", ["strict", "weak", "fails"], |p| p.scalar() / 4.0 - p.summary.k3),
        false,
        &mut violations,
    )?;
    let thm1_8 = match inputs.lambda1 {
        Some(l) => Some(with_precondition(
            || thm3_condition(points, l, tol),
            || pointwise(points, tol, "k1 >= s^2/(8(3s + 5 lambda1))", PASS_LABELS, |p| p.summary.k1 - thm3_threshold(p.scalar(), l)),
            true,
            &mut violations,
        )?),
        None => None,
    };
    let (cor1_9_printed, cor1_9_derived) = match inputs.rho {
        Some(rho) => match cor3_condition(points, rho, tol) {
            Ok((p, d)) => (Some(p), Some(d)),
            Err(e) => {
                let pv = violation(e, true)?;
                violations.push(pv);
                (None, None)
            }
        },
        None => (None, None),
    };
    let einstein = einstein_test(points, tol)?;
    let cor1_10 = match inputs.lambda1 {
        Some(l) if einstein.holds => match cor_einstein_condition(points, l, tol) {
            Ok(v) => Some(v),
            Err(e) => {
                violations.push(violation(e, false)?);
                None
            }
        },
        _ => None,
    };
    let cor1_7 = match grid {
        Some(g) => Some(integral_criterion(points, g, tol)?),
        None => None,
    };
    let verdicts = Verdicts {
        thm1_2: pinch_thm1(points, tol)?,
        thm1_6,
        cor1_7,
        thm1_8,
        cor1_9_printed,
        cor1_9_derived,
        einstein,
        lcf: lcf_test(points, tol)?,
        isotropic: isotropic_status(points, tol)?,
        thm1_2_dual: pinch_thm1_dual(points, tol)?,
        thm1_8_weyl_bound: weyl_sum_bound(points, tol)?,
        cor1_10,
    };
    let rho_measured = points.iter().map(|p| p.ricci_min).fold(f64::INFINITY, f64::min);
    Ok(ClassificationReport {
        points: points.len(),
        tolerances: *tol,
        lambda1: inputs.lambda1,
        rho: inputs.rho,
        rho_measured,
        lambda1_from_rho: inputs.rho.map(|r| 4.0 * r / 3.0),
        conclusions: conclusions(&verdicts, points.len()),
        verdicts,
        precondition_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        // unit S⁴ with λ1 = 4
        assert!((thm3_threshold(12.0, 4.0) - 144.0 / 448.0).abs() < 1e-15);
        assert!((cor3_threshold_derived(12.0, 3.0) - 432.0 / (8.0 * 168.0)).abs() < 1e-15);
        assert!((cor3_threshold_printed(12.0, 3.0) - 432.0 / (8.0 * 1356.0)).abs() < 1e-15);
    }

    #[test]
    fn tolerance_scales_with_s() {
        let t = Tolerances::default();
        assert_eq!(t.at(0.5), 1e-8);
        assert_eq!(t.at(-24.0), 24.0 * 1e-8);
    }
}
