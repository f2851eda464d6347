//! Report documents for `analyze`, `sweep` and `oracle` runs, deterministic
//! JSON (fixed field order, floats with 17 significant digits) and CSV.

use std::io;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;

use crate::analysis::{
    analyze_samples, invariant_suite, midpoint_grid, random_points, AnalysisError, AnalysisOptions, InvariantSuite,
    PointAnalysis, SampleKind, SampleSet, SkippedPoint,
};
use crate::biortho::{biortho_extrema, biortho_oracle, OracleOptions, OracleResult};
use crate::classify::{classify_report, ClassificationReport, ClassifyError, ClassifyInputs, Conclusion, PreconditionViolation, Tolerances, Verdicts};
use crate::decomposition::{curvature_operator, split_blocks, weyl_spectrum, Mat6, Orientation, WeylBlocks, WeylSpectra};
use crate::eigen::Mat3;
use crate::geometry::{frame_curvature_at, Vec4};
use crate::metric::MetricSpec;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("no point could be analyzed")]
    NothingAnalyzed,
}

/// Pretty JSON whose floats are printed as `d.dddddddddddddddde±x`.
struct ExactFloats(PrettyFormatter<'static>);

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Parameters in declaration order, serialized as a JSON object.
#[derive(Clone, Debug, PartialEq)]
pub struct Params(pub Vec<(String, f64)>);

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricInfo {
    pub name: String,
    pub source: String,
    pub coordinates: [String; 4],
    /// Components `g00, g01, …, g33` (upper triangle, row major).
    pub components: Vec<String>,
    pub domain: Vec<[f64; 2]>,
    pub periodic: [bool; 4],
}

impl MetricInfo {
    pub fn new(spec: &MetricSpec, source: &str) -> Self {
        MetricInfo {
            name: spec.name.clone(),
            source: source.to_string(),
            coordinates: spec.coordinates.clone(),
            components: spec.components.iter().map(|c| c.to_string()).collect(),
            domain: spec.domain.iter().map(|iv| [iv.lo, iv.hi]).collect(),
            periodic: spec.periodic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridInfo {
    pub kind: SampleKind,
    pub resolution: Option<[usize; 4]>,
    pub collapsed_axes: [bool; 4],
    pub samples: usize,
    pub skipped: usize,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extreme {
    pub min: f64,
    pub argmin: Vec4,
    pub max: f64,
    pub argmax: Vec4,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiorthoExtremes {
    pub k1: Extreme,
    pub k2: Extreme,
    pub k3: Extreme,
    pub s: Extreme,
}

fn extreme<F: Fn(&PointAnalysis) -> f64>(points: &[PointAnalysis], f: F) -> Extreme {
    let mut out = Extreme {
        min: f64::INFINITY,
        argmin: [0.0; 4],
        max: f64::NEG_INFINITY,
        argmax: [0.0; 4],
    };
    for p in points {
        let v = f(p);
        if v < out.min {
            out.min = v;
            out.argmin = p.point;
        }
        if v > out.max {
            out.max = v;
            out.argmax = p.point;
        }
    }
    out
}

pub fn biortho_extremes(points: &[PointAnalysis]) -> BiorthoExtremes {
    BiorthoExtremes {
        k1: extreme(points, |p| p.summary.k1),
        k2: extreme(points, |p| p.summary.k2),
        k3: extreme(points, |p| p.summary.k3),
        s: extreme(points, |p| p.summary.s),
    }
}

/// Full per-point record in `analyze` reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRecord {
    pub point: Vec4,
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub spectra: WeylSpectra,
    pub wplus_block: Mat3,
    pub wminus_block: Mat3,
    pub b_block: Mat3,
    pub operator: Mat6,
    pub ricci_min: f64,
    pub einstein_residual: f64,
    pub volume_weight: f64,
    pub planes: Option<crate::analysis::PlaneCheck>,
}

fn point_record(spec: &MetricSpec, a: &PointAnalysis, orientation: Orientation) -> PointRecord {
    let operator = frame_curvature_at(spec, &a.point)
        .map(|(_, fc)| curvature_operator(&fc, orientation).matrix)
        .expect("point was analyzed before");
    PointRecord {
        point: a.point,
        s: a.summary.s,
        k1: a.summary.k1,
        k2: a.summary.k2,
        k3: a.summary.k3,
        spectra: a.spectra.clone(),
        wplus_block: a.blocks.wplus,
        wminus_block: a.blocks.wminus,
        b_block: a.blocks.bblock,
        operator,
        ricci_min: a.ricci_min,
        einstein_residual: a.einstein_residual,
        volume_weight: a.volume_weight,
        planes: a.planes,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timings {
    pub seconds: f64,
    pub points_per_second: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub resolution: [usize; 4],
    pub samples: usize,
    pub integral: f64,
    pub volume: f64,
    /// `|integral − reference|`, when a reference is known.
    pub error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub rows: Vec<ConvergenceRow>,
    /// `log2((I1 − I2)/(I2 − I3))` over the last three rows (per doubling).
    pub richardson_order: Option<f64>,
    /// Closed-form value of the integral, when known.
    pub reference: Option<f64>,
    /// `log2(e_i / e_{i+1}) / log2(n_{i+1} / n_i)` between consecutive rows.
    pub orders_vs_reference: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metric: MetricInfo,
    pub params: Params,
    pub orientation: Orientation,
    pub grid: GridInfo,
    pub points_analyzed: usize,
    pub invariant_suite: InvariantSuite,
    pub biortho: BiorthoExtremes,
    pub verdicts: Verdicts,
    pub integral: Option<f64>,
    pub timings: Option<Timings>,
    pub conclusions: Vec<Conclusion>,
    pub precondition_violations: Vec<PreconditionViolation>,
    pub classification: ClassificationSummary,
    pub convergence: Option<Convergence>,
    pub skipped: Vec<SkippedPoint>,
    pub points: Option<Vec<PointRecord>>,
}

/// Classification inputs echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationSummary {
    pub tolerances: Tolerances,
    pub lambda1: Option<f64>,
    pub rho: Option<f64>,
    pub rho_measured: f64,
    pub lambda1_from_rho: Option<f64>,
}

impl Report {
    /// A requested check had a violated precondition.
    pub fn precondition_failed(&self) -> bool {
        self.precondition_violations.iter().any(|v| v.requested)
    }

    /// The report with only classification content (used by `classify`).
    pub fn verdicts_only(mut self) -> Self {
        self.points = None;
        self.skipped.clear();
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub orientation: Orientation,
    pub tolerances: Tolerances,
    pub inputs: ClassifyInputs,
    pub plane_samples: usize,
    pub seed: u64,
    pub timings: bool,
    pub source: String,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            orientation: Orientation::Standard,
            tolerances: Tolerances::default(),
            inputs: ClassifyInputs::default(),
            plane_samples: 100,
            seed: 0,
            timings: false,
            source: "zoo".to_string(),
        }
    }
}

impl RunOptions {
    fn analysis(&self) -> AnalysisOptions {
        AnalysisOptions {
            orientation: self.orientation,
            plane_samples: self.plane_samples,
            seed: self.seed,
        }
    }
}

/// Where `analyze` samples.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyzeTarget {
    Points(usize),
    At(Vec4),
}

struct Assembled {
    classification: ClassificationReport,
    suite: InvariantSuite,
}

fn assemble(
    analyses: &[PointAnalysis],
    grid: Option<&SampleSet>,
    opts: &RunOptions,
) -> Result<Assembled, ReportError> {
    if analyses.is_empty() {
        return Err(ReportError::NothingAnalyzed);
    }
    Ok(Assembled {
        classification: classify_report(analyses, grid, &opts.inputs, &opts.tolerances)?,
        suite: invariant_suite(analyses),
    })
}

fn finish(
    spec: &MetricSpec,
    opts: &RunOptions,
    grid: GridInfo,
    analyses: &[PointAnalysis],
    assembled: Assembled,
    started: Instant,
) -> Report {
    let c = assembled.classification;
    let elapsed = started.elapsed().as_secs_f64();
    Report {
        metric: MetricInfo::new(spec, &opts.source),
        params: Params(spec.parameters.clone()),
        orientation: opts.orientation,
        grid,
        points_analyzed: analyses.len(),
        invariant_suite: assembled.suite,
        biortho: biortho_extremes(analyses),
        integral: c.verdicts.cor1_7.as_ref().map(|i| i.value),
        verdicts: c.verdicts,
        timings: opts.timings.then(|| Timings {
            seconds: elapsed,
            points_per_second: analyses.len() as f64 / elapsed.max(1e-9),
        }),
        conclusions: c.conclusions,
        precondition_violations: c.precondition_violations,
        classification: ClassificationSummary {
            tolerances: c.tolerances,
            lambda1: c.lambda1,
            rho: c.rho,
            rho_measured: c.rho_measured,
            lambda1_from_rho: c.lambda1_from_rho,
        },
        convergence: None,
        skipped: Vec::new(),
        points: None,
    }
}

/// Pointwise analysis at a few random interior points or one given point.
pub fn run_analyze(spec: &MetricSpec, target: &AnalyzeTarget, opts: &RunOptions) -> Result<Report, ReportError> {
    let started = Instant::now();
    let samples = match target {
        AnalyzeTarget::Points(n) => random_points(spec, *n, opts.seed)?,
        AnalyzeTarget::At(p) => SampleSet {
            kind: SampleKind::Random,
            resolution: None,
            collapsed_axes: [false; 4],
            box_measure: 1.0,
            points: vec![crate::analysis::SamplePoint {
                point: *p,
                cell_measure: 1.0,
            }],
        },
    };
    let sweep = analyze_samples(spec, &samples, &opts.analysis());
    let sweep = match (target, sweep) {
        // a single requested point must not be silently skipped
        (AnalyzeTarget::At(p), Ok(s)) if s.analyses.is_empty() => {
            return Err(ReportError::Analysis(crate::analysis::analyze_point(spec, p, 1.0, &opts.analysis()).unwrap_err()))
        }
        (_, s) => s?,
    };
    let assembled = assemble(&sweep.analyses, None, opts)?;
    let grid = GridInfo {
        kind: samples.kind,
        resolution: None,
        collapsed_axes: samples.collapsed_axes,
        samples: samples.points.len(),
        skipped: sweep.skipped.len(),
        seed: matches!(target, AnalyzeTarget::Points(_)).then_some(opts.seed),
    };
    let mut report = finish(spec, opts, grid, &sweep.analyses, assembled, started);
    report.points = Some(sweep.analyses.iter().map(|a| point_record(spec, a, opts.orientation)).collect());
    report.skipped = sweep.skipped;
    Ok(report)
}

/// Full midpoint-grid sweep at each resolution; the report describes the
/// last (finest) one and carries the convergence table when more than one
/// resolution is given. `reference` is the closed-form integral, if known.
pub fn run_sweep(
    spec: &MetricSpec,
    resolutions: &[[usize; 4]],
    reference: Option<f64>,
    opts: &RunOptions,
) -> Result<(Report, Vec<PointAnalysis>), ReportError> {
    let started = Instant::now();
    let mut rows = Vec::new();
    let mut last = None;
    for &res in resolutions {
        let grid = midpoint_grid(spec, res)?;
        let sweep = analyze_samples(spec, &grid, &opts.analysis())?;
        let assembled = assemble(&sweep.analyses, Some(&grid), opts)?;
        let integral = assembled.classification.verdicts.cor1_7.as_ref().expect("grid given");
        rows.push(ConvergenceRow {
            resolution: res,
            samples: grid.points.len(),
            integral: integral.value,
            volume: integral.volume,
            error: reference.map(|r| (integral.value - r).abs()),
        });
        last = Some((grid, sweep, assembled));
    }
    let (grid, sweep, assembled) = last.ok_or(ReportError::NothingAnalyzed)?;
    let info = GridInfo {
        kind: grid.kind,
        resolution: grid.resolution,
        collapsed_axes: grid.collapsed_axes,
        samples: grid.points.len(),
        skipped: sweep.skipped.len(),
        seed: None,
    };
    let mut report = finish(spec, opts, info, &sweep.analyses, assembled, started);
    report.skipped = sweep.skipped;
    if rows.len() > 1 {
        report.convergence = Some(convergence(rows, reference));
    }
    Ok((report, sweep.analyses))
}

fn convergence(rows: Vec<ConvergenceRow>, reference: Option<f64>) -> Convergence {
    let n = rows.len();
    let richardson_order = (n >= 3).then(|| {
        let (i1, i2, i3) = (rows[n - 3].integral, rows[n - 2].integral, rows[n - 1].integral);
        ((i1 - i2) / (i2 - i3)).abs().log2()
    });
    let mut orders = Vec::new();
    if reference.is_some() {
        for w in rows.windows(2) {
            let (e0, e1) = (w[0].error.unwrap_or(0.0), w[1].error.unwrap_or(0.0));
            let ratio = w[1].resolution.iter().max().copied().unwrap_or(1) as f64
                / w[0].resolution.iter().max().copied().unwrap_or(1) as f64;
            orders.push((e0 / e1).log2() / ratio.log2());
        }
    }
    Convergence {
        rows,
        richardson_order,
        reference,
        orders_vs_reference: orders,
    }
}

/// CSV with one row per analyzed point.
pub const CSV_HEADER: &str = "x0,x1,x2,x3,s,k1,k2,k3,w1p,w2p,w3p,w1m,w2m,w3m,weight";

pub fn to_csv(points: &[PointAnalysis]) -> String {
    let mut out = String::with_capacity(64 + points.len() * 360);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let values = p
            .point
            .iter()
            .chain([p.summary.s, p.summary.k1, p.summary.k2, p.summary.k3].iter())
            .chain(p.spectra.wplus.iter())
            .chain(p.spectra.wminus.iter())
            .chain(std::iter::once(&p.volume_weight))
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>();
        out.push_str(&values.join(","));
        out.push('\n');
    }
    out
}

/// One closed-form vs oracle comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCase {
    /// Sample point, or `None` for random blocks.
    pub point: Option<Vec4>,
    pub s: f64,
    pub closed_k1: f64,
    pub closed_k3: f64,
    pub oracle: OracleResult,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub metric: Option<MetricInfo>,
    pub options: OracleOptions,
    pub cases: Vec<OracleCase>,
    pub max_error: f64,
}

pub fn oracle_case(blocks: &WeylBlocks, s: f64, point: Option<Vec4>, options: OracleOptions) -> OracleCase {
    let closed = biortho_extrema(&weyl_spectrum(blocks), s);
    let oracle = biortho_oracle(blocks, s, options);
    OracleCase {
        point,
        s,
        closed_k1: closed.k1,
        closed_k3: closed.k3,
        error: (oracle.k1 - closed.k1).abs().max((oracle.k3 - closed.k3).abs()),
        oracle,
    }
}

/// Random symmetric trace-free `W±` with entries of order `scale`, a random
/// `B`, and `s` in `[-scale, scale]·12`.
pub fn random_blocks<R: rand::Rng>(rng: &mut R, scale: f64) -> (WeylBlocks, f64) {
    let u = Uniform::new(-scale, scale).expect("positive scale");
    let mut sym = || {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = u.sample(rng);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        let t = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= t;
        }
        m
    };
    let wplus = sym();
    let wminus = sym();
    let bblock = std::array::from_fn(|_| std::array::from_fn(|_| u.sample(rng)));
    let s = 12.0 * u.sample(rng);
    (WeylBlocks { wplus, wminus, bblock }, s)
}

/// Oracle comparison at random points of `spec` and on random blocks.
pub fn run_oracle(
    spec: Option<&MetricSpec>,
    points: usize,
    random_cases: usize,
    seed: u64,
    options: OracleOptions,
    orientation: Orientation,
    source: &str,
) -> Result<OracleReport, ReportError> {
    let mut cases = Vec::new();
    if let Some(spec) = spec {
        for sp in random_points(spec, points, seed)?.points {
            let (_, fc) = match frame_curvature_at(spec, &sp.point) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let blocks = split_blocks(&curvature_operator(&fc, orientation)).map_err(AnalysisError::from)?;
            cases.push(oracle_case(&blocks, fc.scalar, Some(sp.point), options));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..random_cases {
        let (blocks, s) = random_blocks(&mut rng, 1.0);
        cases.push(oracle_case(&blocks, s, None, options));
    }
    let max_error = cases.iter().map(|c| c.error).fold(0.0, f64::max);
    Ok(OracleReport {
        metric: spec.map(|s| MetricInfo::new(s, source)),
        options,
        cases,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&vec![0.1_f64, 1.0, -2.5e-300, f64::NAN]);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("-2.5000000000000000e-300"));
        assert!(s.contains("null"));
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], Some(0.1));
    }

    #[test]
    fn params_keep_declaration_order() {
        let p = Params(vec![("r".into(), 2.0), ("a".into(), 1.0)]);
        let s = to_json(&p);
        assert!(s.find("\"r\"").unwrap() < s.find("\"a\"").unwrap());
    }
}
