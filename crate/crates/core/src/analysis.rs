//! Per-point curvature analysis and sample sets (random interior points and
//! midpoint quadrature grids).

use nalgebra::Matrix4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::biortho::{
    biortho_extrema, biorthogonal_curvature, orthogonal_plane, plane_form_oriented, sectional_via_forms,
    BiorthoSummary,
};
use crate::decomposition::{
    curvature_operator, split_blocks, weyl_spectrum, DecompositionError, Orientation, WeylBlocks, WeylSpectra,
};
use crate::geometry::{frame_curvature_at, relative, sectional_curvature, FrameCurvature, GeometryError, Vec4};
use crate::metric::MetricSpec;

/// Non-periodic axes of random samples are inset by this fraction of their length.
pub const INSET_FRACTION: f64 = 1e-3;
/// Largest tolerated fraction of skipped (degenerate) points in a sweep.
pub const MAX_SKIPPED_FRACTION: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error("axis {axis} has a non-finite or empty interval")]
    BadDomain { axis: usize },
    #[error("grid resolution must be at least 1 on every axis")]
    BadResolution,
    #[error("{skipped} of {total} points were degenerate (more than 1%); first: {first}")]
    TooManySkipped { skipped: usize, total: usize, first: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub orientation: Orientation,
    /// Random planes per point for the plane cross-checks (0 disables them).
    pub plane_samples: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            orientation: Orientation::Standard,
            plane_samples: 100,
            seed: 0,
        }
    }
}

/// Residuals of the algebraic identities at one point. Entries documented as
/// relative are divided by the natural scale of the quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Default)]
pub struct InvariantResiduals {
    /// `max |g(E_a,E_b) − δ_ab|`
    pub frame_orthonormality: f64,
    /// relative
    pub riemann_symmetry: f64,
    /// relative
    pub first_bianchi: f64,
    /// relative
    pub ricci_trace: f64,
    /// `max |M_pq − M_qp|`
    pub operator_symmetry: f64,
    /// `|tr M − s/2|`, relative to the operator scale
    pub operator_trace: f64,
    /// `max |tr W±|`, relative to the operator scale
    pub weyl_trace: f64,
    /// `max |Σ w±|`, relative to the operator scale
    pub eigen_sum: f64,
    /// `Σ w² = |W|²`, relative
    pub eigen_norm: f64,
    /// `k1 + k2 + k3 = s/4`, relative
    pub k_sum: f64,
    /// `max(k1 − k2, k2 − k3, 0)`
    pub k_order: f64,
    /// `|k2 − (s/12 + (w2⁺ + w2⁻)/2)|`
    pub k2_crosscheck: f64,
    /// `max(det W± − (√6/18)|W±|³)`
    pub lagrange_excess: f64,
    /// `max(|W±|² − 6(w1±)²)`
    pub norm_bound_excess: f64,
    /// `|W⁺| + |W⁻| − √6(s/6 − 2k1)`
    pub weyl_sum_excess: f64,
    /// `| |B| − |Ric − (s/4)g|/2 |`, relative to the operator scale
    pub bblock_ricci: f64,
}

/// Cross-checks over random planes at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Default)]
pub struct PlaneCheck {
    pub planes: usize,
    /// `max |K(α) from forms − K from the Riemann tensor|`
    pub forms_vs_direct: f64,
    /// `max | |α±|² − 1/2 |`
    pub normalization: f64,
    /// `max |K⊥(α) − (K(α) + K(α⊥))/2|`
    pub kperp_average: f64,
    /// `max |K⊥(α) − K(α)|`
    pub kperp_minus_k: f64,
    /// `max |K⊥(α) − s/12|`
    pub kperp_minus_s12: f64,
    /// `K⊥(α) == K⊥(α⊥)` bitwise on every plane
    pub kperp_symmetric: bool,
    /// Smallest sampled sectional curvature.
    pub sectional_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointAnalysis {
    pub point: Vec4,
    /// `√det g` times the cell measure.
    pub volume_weight: f64,
    pub summary: BiorthoSummary,
    pub spectra: WeylSpectra,
    pub blocks: WeylBlocks,
    pub ricci_min: f64,
    /// `|Ric − (s/4)g|` (Frobenius)
    pub einstein_residual: f64,
    /// `(|W⁺|, |W⁻|)`
    pub weyl_norms: (f64, f64),
    pub bblock_norm: f64,
    /// `max |M_pq|`
    pub operator_scale: f64,
    pub invariants: InvariantResiduals,
    pub planes: Option<PlaneCheck>,
}

impl PointAnalysis {
    pub fn scalar(&self) -> f64 {
        self.summary.s
    }
}

fn point_seed(seed: u64, point: &Vec4) -> u64 {
    point
        .iter()
        .fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, v| h.rotate_left(17) ^ v.to_bits())
}

/// A random orthonormal pair in `R⁴`.
pub fn random_orthonormal_pair<R: rand::Rng>(rng: &mut R) -> (Vec4, Vec4) {
    loop {
        let x: Vec4 = std::array::from_fn(|_| StandardNormal.sample(rng));
        let y: Vec4 = std::array::from_fn(|_| StandardNormal.sample(rng));
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx < 1e-3 {
            continue;
        }
        let x = x.map(|v| v / nx);
        let c: f64 = (0..4).map(|i| x[i] * y[i]).sum();
        let y: Vec4 = std::array::from_fn(|i| y[i] - c * x[i]);
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ny < 1e-3 {
            continue;
        }
        return (x, y.map(|v| v / ny));
    }
}

fn plane_check(fc: &FrameCurvature, blocks: &WeylBlocks, opts: &AnalysisOptions, point: &Vec4) -> PlaneCheck {
    let s = fc.scalar;
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(opts.seed, point));
    let mut out = PlaneCheck {
        planes: opts.plane_samples,
        kperp_symmetric: true,
        sectional_min: f64::INFINITY,
        ..PlaneCheck::default()
    };
    for _ in 0..opts.plane_samples {
        let (x, y) = random_orthonormal_pair(&mut rng);
        let p = plane_form_oriented(&x, &y, opts.orientation).expect("pair is orthonormal");
        let q = orthogonal_plane(&p);
        let k = sectional_curvature(fc, &x, &y).expect("pair is independent");
        let kq = sectional_via_forms(blocks, s, &q);
        let kf = sectional_via_forms(blocks, s, &p);
        let kperp = biorthogonal_curvature(blocks, s, &p);
        out.forms_vs_direct = out.forms_vs_direct.max((kf - k).abs());
        out.normalization = out.normalization.max(p.normalization_residual());
        out.kperp_average = out.kperp_average.max((kperp - 0.5 * (kf + kq)).abs());
        out.kperp_minus_k = out.kperp_minus_k.max((kperp - k).abs());
        out.kperp_minus_s12 = out.kperp_minus_s12.max((kperp - s / 12.0).abs());
        out.kperp_symmetric &= kperp.to_bits() == biorthogonal_curvature(blocks, s, &q).to_bits();
        out.sectional_min = out.sectional_min.min(k).min(kq);
    }
    out
}

/// Full analysis at `point`; `cell_measure` multiplies `√det g` into the
/// volume weight.
pub fn analyze_point(
    spec: &MetricSpec,
    point: &Vec4,
    cell_measure: f64,
    opts: &AnalysisOptions,
) -> Result<PointAnalysis, AnalysisError> {
    let (jet, fc) = frame_curvature_at(spec, point)?;
    let s = fc.scalar;
    let op = curvature_operator(&fc, opts.orientation);
    let blocks = split_blocks(&op)?;
    let spectra = weyl_spectrum(&blocks);
    let summary = biortho_extrema(&spectra, s).at(*point);
    let einstein_residual = fc.einstein_residual();
    let bblock_norm = blocks.bblock_norm();
    let scale = op.max_abs().max(s.abs() / 12.0).max(f64::MIN_POSITIVE);
    let (np, nm) = (spectra.norm_plus(), spectra.norm_minus());
    let invariants = InvariantResiduals {
        frame_orthonormality: fc.frame_residual(&jet.g),
        riemann_symmetry: fc.symmetry_residual(),
        first_bianchi: fc.bianchi_residual(),
        ricci_trace: fc.ricci_trace_residual(),
        operator_symmetry: op.symmetry_residual(),
        operator_trace: relative((op.trace() - s / 2.0).abs(), scale),
        weyl_trace: relative(spectra.trace_plus.abs().max(spectra.trace_minus.abs()), scale),
        eigen_sum: relative(spectra.eigen_sum_residual(), scale),
        eigen_norm: spectra.norm_crosscheck_residual(),
        k_sum: summary.sum_residual(),
        k_order: summary.order_violation(),
        k2_crosscheck: summary.k2_crosscheck,
        lagrange_excess: spectra.lagrange_excess(),
        norm_bound_excess: spectra.norm_bound_excess(),
        weyl_sum_excess: np + nm - 6f64.sqrt() * (s / 6.0 - 2.0 * summary.k1),
        bblock_ricci: relative((bblock_norm - 0.5 * einstein_residual).abs(), scale),
    };
    let planes = (opts.plane_samples > 0).then(|| plane_check(&fc, &blocks, opts, point));
    let det = Matrix4::from_fn(|i, j| jet.g[i][j]).determinant();
    Ok(PointAnalysis {
        point: *point,
        volume_weight: det.sqrt() * cell_measure,
        summary,
        spectra,
        blocks,
        ricci_min: fc.ricci_min(),
        einstein_residual,
        weyl_norms: (np, nm),
        bblock_norm,
        operator_scale: op.max_abs(),
        invariants,
        planes,
    })
}

/// A sample point with the coordinate measure it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplePoint {
    pub point: Vec4,
    pub cell_measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    pub kind: SampleKind,
    /// Declared resolution per axis (grids only).
    pub resolution: Option<[usize; 4]>,
    /// Axes collapsed to one node because no metric component depends on them.
    pub collapsed_axes: [bool; 4],
    /// Coordinate volume of the domain box.
    pub box_measure: f64,
    pub points: Vec<SamplePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Random,
    Midpoint,
}

fn check_domain(spec: &MetricSpec) -> Result<f64, AnalysisError> {
    let mut measure = 1.0;
    for (axis, iv) in spec.domain.iter().enumerate() {
        let len = iv.length();
        if !(iv.lo.is_finite() && iv.hi.is_finite() && len > 0.0) {
            return Err(AnalysisError::BadDomain { axis });
        }
        measure *= len;
    }
    Ok(measure)
}

/// Uniform random points; non-periodic axes are inset by
/// [`INSET_FRACTION`] of their length at both ends.
pub fn random_points(spec: &MetricSpec, count: usize, seed: u64) -> Result<SampleSet, AnalysisError> {
    let box_measure = check_domain(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges: [Uniform<f64>; 4] = std::array::from_fn(|a| {
        let iv = spec.domain[a];
        let inset = if spec.periodic[a] { 0.0 } else { INSET_FRACTION * iv.length() };
        Uniform::new(iv.lo + inset, iv.hi - inset).expect("non-empty interval")
    });
    let points = (0..count)
        .map(|_| SamplePoint {
            point: std::array::from_fn(|a| ranges[a].sample(&mut rng)),
            cell_measure: box_measure / count as f64,
        })
        .collect();
    Ok(SampleSet {
        kind: SampleKind::Random,
        resolution: None,
        collapsed_axes: [false; 4],
        box_measure,
        points,
    })
}

/// Midpoint-rule product grid over the full domain box. Axes that no
/// component depends on are collapsed to a single node carrying the whole
/// interval length, which leaves every quadrature sum unchanged.
pub fn midpoint_grid(spec: &MetricSpec, resolution: [usize; 4]) -> Result<SampleSet, AnalysisError> {
    if resolution.contains(&0) {
        return Err(AnalysisError::BadResolution);
    }
    let box_measure = check_domain(spec)?;
    let collapsed = spec.independent_axes();
    let nodes: [Vec<(f64, f64)>; 4] = std::array::from_fn(|a| {
        let iv = spec.domain[a];
        let n = if collapsed[a] { 1 } else { resolution[a] };
        let h = iv.length() / n as f64;
        (0..n).map(|i| (iv.lo + (i as f64 + 0.5) * h, h)).collect()
    });
    let mut points = Vec::with_capacity(nodes.iter().map(Vec::len).product());
    for &(x0, h0) in &nodes[0] {
        for &(x1, h1) in &nodes[1] {
            for &(x2, h2) in &nodes[2] {
                for &(x3, h3) in &nodes[3] {
                    points.push(SamplePoint {
                        point: [x0, x1, x2, x3],
                        cell_measure: h0 * h1 * h2 * h3,
                    });
                }
            }
        }
    }
    Ok(SampleSet {
        kind: SampleKind::Midpoint,
        resolution: Some(resolution),
        collapsed_axes: collapsed,
        box_measure,
        points,
    })
}

impl SampleSet {
    /// Relative mismatch between the summed cell measures and the box volume.
    pub fn coverage_defect(&self) -> f64 {
        let total: f64 = self.points.iter().map(|p| p.cell_measure).sum();
        (total - self.box_measure).abs() / self.box_measure
    }
}

/// A point that could not be analyzed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub point: Vec4,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub analyses: Vec<PointAnalysis>,
    pub skipped: Vec<SkippedPoint>,
}

/// Analyzes every sample in parallel, preserving sample order. Points where
/// the metric degenerates are skipped; more than 1% skipped is an error.
pub fn analyze_samples(
    spec: &MetricSpec,
    samples: &SampleSet,
    opts: &AnalysisOptions,
) -> Result<Sweep, AnalysisError> {
    let results: Vec<Result<PointAnalysis, AnalysisError>> = samples
        .points
        .par_iter()
        .map(|p| analyze_point(spec, &p.point, p.cell_measure, opts))
        .collect();
    let mut sweep = Sweep {
        analyses: Vec::with_capacity(results.len()),
        skipped: Vec::new(),
    };
    for (sample, result) in samples.points.iter().zip(results) {
        match result {
            Ok(a) => sweep.analyses.push(a),
            Err(e @ AnalysisError::Decomposition(_)) => return Err(e),
            Err(e) => sweep.skipped.push(SkippedPoint {
                point: sample.point,
                reason: e.to_string(),
            }),
        }
    }
    let total = samples.points.len();
    if !sweep.skipped.is_empty() && sweep.skipped.len() as f64 > MAX_SKIPPED_FRACTION * total as f64 {
        return Err(AnalysisError::TooManySkipped {
            skipped: sweep.skipped.len(),
            total,
            first: sweep.skipped[0].reason.clone(),
        });
    }
    Ok(sweep)
}

/// Named maxima of the invariant residuals over a set of points, with their
/// thresholds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub max: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantSuite {
    pub passed: bool,
    pub checks: Vec<InvariantCheck>,
}

/// Thresholds of the invariant suite, by residual name.
pub const INVARIANT_THRESHOLDS: [(&str, f64); 22] = [
    ("frame_orthonormality", 1e-10),
    ("riemann_symmetry", 1e-9),
    ("first_bianchi", 1e-9),
    ("ricci_trace", 1e-9),
    ("operator_symmetry", 1e-10),
    ("operator_trace", 1e-9),
    ("weyl_trace", 1e-9),
    ("eigen_sum", 1e-9),
    ("eigen_norm", 1e-9),
    ("k_sum", 1e-9),
    ("k_order", 1e-10),
    ("k2_crosscheck", 1e-12),
    ("lagrange_excess", 1e-12),
    ("norm_bound_excess", 1e-9),
    ("weyl_sum_excess", 1e-8),
    ("bblock_ricci", 1e-8),
    ("plane_forms_vs_direct", 1e-8),
    ("plane_normalization", 1e-10),
    ("plane_kperp_average", 1e-12),
    ("plane_kperp_symmetric", 0.0),
    ("volume_weight_positive", 0.0),
    ("finite", 0.0),
];

fn residual_values(a: &PointAnalysis) -> [f64; 22] {
    let r = &a.invariants;
    let p = a.planes.unwrap_or_default();
    let all_finite = [
        a.summary.k1,
        a.summary.k2,
        a.summary.k3,
        a.summary.s,
        a.ricci_min,
        a.einstein_residual,
        a.volume_weight,
        a.spectra.normsq_plus,
        a.spectra.normsq_minus,
        a.spectra.det_plus,
        a.spectra.det_minus,
    ]
    .iter()
    .chain(a.spectra.wplus.iter())
    .chain(a.spectra.wminus.iter())
    .all(|v| v.is_finite());
    [
        r.frame_orthonormality,
        r.riemann_symmetry,
        r.first_bianchi,
        r.ricci_trace,
        r.operator_symmetry,
        r.operator_trace,
        r.weyl_trace,
        r.eigen_sum,
        r.eigen_norm,
        r.k_sum,
        r.k_order,
        r.k2_crosscheck,
        r.lagrange_excess,
        r.norm_bound_excess,
        r.weyl_sum_excess,
        r.bblock_ricci,
        p.forms_vs_direct,
        p.normalization,
        p.kperp_average,
        if p.kperp_symmetric || a.planes.is_none() { 0.0 } else { 1.0 },
        if a.volume_weight > 0.0 { 0.0 } else { 1.0 },
        if all_finite { 0.0 } else { 1.0 },
    ]
}

pub fn invariant_suite(analyses: &[PointAnalysis]) -> InvariantSuite {
    let mut maxima = [f64::NEG_INFINITY; 22];
    for a in analyses {
        for (m, v) in maxima.iter_mut().zip(residual_values(a)) {
            // NaN residuals must fail, so they are propagated
            *m = if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) };
        }
    }
    let checks: Vec<InvariantCheck> = INVARIANT_THRESHOLDS
        .iter()
        .zip(maxima)
        .map(|(&(name, threshold), max)| InvariantCheck {
            name,
            max: if analyses.is_empty() { 0.0 } else { max },
            threshold,
            passed: analyses.is_empty() || max <= threshold,
        })
        .collect();
    InvariantSuite {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
