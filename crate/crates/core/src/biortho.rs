//! Sectional and biorthogonal curvature through the Λ⁺⊕Λ⁻ splitting of
//! decomposable 2-forms, closed-form extrema, and a brute-force oracle over
//! the Grassmannian of 2-planes.
//!
//! A unit decomposable 2-form `α = X∧Y` splits as `α⁺ + α⁻` with
//! `|α⁺|² = |α⁻|² = 1/2`, and every such pair comes from exactly one oriented
//! plane. The plane orthogonal to `α` is `α⁺ − α⁻`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{form_dot, lambda2_bases, Form, Orientation, WeylBlocks, WeylSpectra, PAIRS};
use crate::eigen::Mat3;
use crate::geometry::Vec4;

pub type Vec3 = [f64; 3];

/// `1/√2`, the radius of both factor spheres.
pub const HALF_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BiorthoError {
    #[error("vectors are not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneForm {
    pub aplus: Vec3,
    pub aminus: Vec3,
}

impl PlaneForm {
    /// The 6 coordinates in the ordered Λ⁺⊕Λ⁻ basis.
    pub fn coordinates(&self) -> Form {
        [
            self.aplus[0],
            self.aplus[1],
            self.aplus[2],
            self.aminus[0],
            self.aminus[1],
            self.aminus[2],
        ]
    }

    /// Largest deviation of `|α±|²` from 1/2.
    pub fn normalization_residual(&self) -> f64 {
        (dot3(&self.aplus, &self.aplus) - 0.5)
            .abs()
            .max((dot3(&self.aminus, &self.aminus) - 0.5).abs())
    }
}

fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn quad3(m: &Mat3, a: &Vec3) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += a[i] * m[i][j] * a[j];
        }
    }
    acc
}

fn bilinear3(m: &Mat3, a: &Vec3, b: &Vec3) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += a[i] * m[i][j] * b[j];
        }
    }
    acc
}

/// Tolerance on the Gram matrix of the input pair in [`plane_form`].
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Splits `X∧Y` for frame-orthonormal `x`, `y` (standard orientation).
pub fn plane_form(x: &Vec4, y: &Vec4) -> Result<PlaneForm, BiorthoError> {
    plane_form_oriented(x, y, Orientation::Standard)
}

pub fn plane_form_oriented(x: &Vec4, y: &Vec4, orientation: Orientation) -> Result<PlaneForm, BiorthoError> {
    let d = |u: &Vec4, v: &Vec4| (0..4).map(|i| u[i] * v[i]).sum::<f64>();
    let gram = (d(x, x) - 1.0).abs().max((d(y, y) - 1.0).abs()).max(d(x, y).abs());
    if !(gram <= ORTHONORMAL_TOL) {
        return Err(BiorthoError::NotOrthonormal(gram));
    }
    let mut wedge = [0.0; 6];
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        wedge[p] = x[a] * y[b] - x[b] * y[a];
    }
    let basis = lambda2_bases(orientation);
    Ok(PlaneForm {
        aplus: [0, 1, 2].map(|k| form_dot(&basis[k], &wedge)),
        aminus: [3, 4, 5].map(|k| form_dot(&basis[k], &wedge)),
    })
}

pub fn orthogonal_plane(p: &PlaneForm) -> PlaneForm {
    PlaneForm {
        aplus: p.aplus,
        aminus: p.aminus.map(|v| -v),
    }
}

/// `K(α) = s/12 + ⟨α⁺,W⁺α⁺⟩ + ⟨α⁻,W⁻α⁻⟩ + 2⟨α⁺,Bα⁻⟩`.
pub fn sectional_via_forms(blocks: &WeylBlocks, s: f64, p: &PlaneForm) -> f64 {
    biorthogonal_curvature(blocks, s, p) + 2.0 * bilinear3(&blocks.bblock, &p.aplus, &p.aminus)
}

/// `(K(α) + K(α⊥))/2 = s/12 + ⟨α⁺,W⁺α⁺⟩ + ⟨α⁻,W⁻α⁻⟩`.
pub fn biorthogonal_curvature(blocks: &WeylBlocks, s: f64, p: &PlaneForm) -> f64 {
    s / 12.0 + quad3(&blocks.wplus, &p.aplus) + quad3(&blocks.wminus, &p.aminus)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiorthoSummary {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub s: f64,
    pub point: Vec4,
    /// `|k2 − (s/12 + (w2⁺ + w2⁻)/2)|`
    pub k2_crosscheck: f64,
}

pub fn biortho_extrema(spectra: &WeylSpectra, s: f64) -> BiorthoSummary {
    let k1 = s / 12.0 + 0.5 * (spectra.wplus[0] + spectra.wminus[0]);
    let k3 = s / 12.0 + 0.5 * (spectra.wplus[2] + spectra.wminus[2]);
    let k2 = s / 4.0 - k1 - k3;
    let k2_direct = s / 12.0 + 0.5 * (spectra.wplus[1] + spectra.wminus[1]);
    BiorthoSummary {
        k1,
        k2,
        k3,
        s,
        point: [0.0; 4],
        k2_crosscheck: (k2 - k2_direct).abs(),
    }
}

impl BiorthoSummary {
    pub fn at(mut self, point: Vec4) -> Self {
        self.point = point;
        self
    }

    /// `|k1 + k2 + k3 − s/4|` relative to `max(|s|, |k|)`.
    pub fn sum_residual(&self) -> f64 {
        let scale = self.s.abs().max(self.k1.abs()).max(self.k3.abs());
        crate::geometry::relative((self.k1 + self.k2 + self.k3 - self.s / 4.0).abs(), scale)
    }

    /// Largest ordering violation `max(k1 − k2, k2 − k3, 0)`.
    pub fn order_violation(&self) -> f64 {
        (self.k1 - self.k2).max(self.k2 - self.k3).max(0.0)
    }
}

/// `n` points of a Fibonacci spiral on the sphere of radius `radius`.
pub fn fibonacci_sphere(n: usize, radius: f64) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [radius * r * phi.cos(), radius * r * phi.sin(), radius * z]
        })
        .collect()
}

/// Minimum or maximum of an objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        }
    }
}

/// Number of step-halving rounds in the polish.
pub const POLISH_ROUNDS: usize = 50;
/// Polish stops once the step falls below this.
pub const POLISH_MIN_STEP: f64 = 1e-12;
const POLISH_INNER: usize = 64;

fn renormalize(a: &Vec3, radius: f64) -> Vec3 {
    let n = dot3(a, a).sqrt();
    if n == 0.0 {
        return *a;
    }
    a.map(|v| v * radius / n)
}

/// Tangential part of `grad` at `a`.
fn tangent(a: &Vec3, grad: &Vec3) -> Vec3 {
    let c = dot3(a, grad) / dot3(a, a);
    [grad[0] - c * a[0], grad[1] - c * a[1], grad[2] - c * a[2]]
}

fn mat_vec(m: &Mat3, a: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2])
}

/// Projected gradient polish of a function on a product of spheres of radius
/// `1/√2`. `f` returns the objective and its Euclidean gradient per factor.
fn polish<const N: usize, F>(start: [Vec3; N], sense: Sense, scale: f64, f: F) -> ([Vec3; N], f64)
where
    F: Fn(&[Vec3; N]) -> (f64, [Vec3; N]),
{
    let sign = sense.sign();
    let mut x = start;
    let (mut value, mut grad) = f(&x);
    let mut step = 0.5 / scale.max(f64::MIN_POSITIVE);
    for _ in 0..POLISH_ROUNDS {
        for _ in 0..POLISH_INNER {
            let mut trial = x;
            for k in 0..N {
                let t = tangent(&x[k], &grad[k]);
                let moved = [0, 1, 2].map(|i| x[k][i] - sign * step * t[i]);
                trial[k] = renormalize(&moved, HALF_RADIUS);
            }
            let (tv, tg) = f(&trial);
            if sign * tv < sign * value {
                x = trial;
                value = tv;
                grad = tg;
            } else {
                break;
            }
        }
        step *= 0.5;
        if step < POLISH_MIN_STEP {
            break;
        }
    }
    (x, value)
}

/// Argmin of `sign * value` with the lowest index winning ties.
fn best_index(values: &[f64], sense: Sense) -> usize {
    let sign = sense.sign();
    values
        .par_iter()
        .enumerate()
        .map(|(i, v)| (sign * v, i))
        .reduce(|| (f64::INFINITY, usize::MAX), |a, b| {
            match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
                std::cmp::Ordering::Greater => b,
                _ => a,
            }
        })
        .1
}

fn block_scale(blocks: &WeylBlocks) -> f64 {
    [&blocks.wplus, &blocks.wminus, &blocks.bblock]
        .iter()
        .flat_map(|m| m.iter().flatten())
        .fold(0.0_f64, |a, v| a.max(v.abs()))
        .max(1e-300)
}

/// Extremum of `⟨a, W a⟩` over the sphere grid, then polished.
fn sphere_extremum(w: &Mat3, grid: &[Vec3], sense: Sense, scale: f64) -> (Vec3, f64) {
    let values: Vec<f64> = grid.iter().map(|a| quad3(w, a)).collect();
    let start = grid[best_index(&values, sense)];
    let (x, v) = polish([start], sense, scale, |x: &[Vec3; 1]| {
        let wa = mat_vec(w, &x[0]);
        (dot3(&x[0], &wa), [wa.map(|v| 2.0 * v)])
    });
    (x[0], v)
}

/// Oracle settings: Fibonacci resolution (`resolution²` points per sphere)
/// and whether to search the full product grid instead of each factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleOptions {
    pub resolution: usize,
    pub full: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            resolution: 64,
            full: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub k1: f64,
    pub k3: f64,
    pub argmin: PlaneForm,
    pub argmax: PlaneForm,
}

/// Brute-force `(min, max)` of the biorthogonal curvature over planes.
pub fn biortho_oracle(blocks: &WeylBlocks, s: f64, options: OracleOptions) -> OracleResult {
    let n = options.resolution.max(8).pow(2);
    let grid = fibonacci_sphere(n, HALF_RADIUS);
    let scale = block_scale(blocks);
    if !options.full {
        let (pmin, vpmin) = sphere_extremum(&blocks.wplus, &grid, Sense::Min, scale);
        let (mmin, vmmin) = sphere_extremum(&blocks.wminus, &grid, Sense::Min, scale);
        let (pmax, vpmax) = sphere_extremum(&blocks.wplus, &grid, Sense::Max, scale);
        let (mmax, vmmax) = sphere_extremum(&blocks.wminus, &grid, Sense::Max, scale);
        return OracleResult {
            k1: s / 12.0 + vpmin + vmmin,
            k3: s / 12.0 + vpmax + vmmax,
            argmin: PlaneForm { aplus: pmin, aminus: mmin },
            argmax: PlaneForm { aplus: pmax, aminus: mmax },
        };
    }
    let objective = |p: &PlaneForm| biorthogonal_curvature(blocks, s, p);
    let gradient = |x: &[Vec3; 2]| {
        let p = PlaneForm { aplus: x[0], aminus: x[1] };
        let gp = mat_vec(&blocks.wplus, &x[0]).map(|v| 2.0 * v);
        let gm = mat_vec(&blocks.wminus, &x[1]).map(|v| 2.0 * v);
        (objective(&p), [gp, gm])
    };
    let (lo, hi) = product_grid_extrema(&grid, &objective);
    let (xmin, k1) = polish([lo.aplus, lo.aminus], Sense::Min, scale, gradient);
    let (xmax, k3) = polish([hi.aplus, hi.aminus], Sense::Max, scale, gradient);
    OracleResult {
        k1,
        k3,
        argmin: PlaneForm { aplus: xmin[0], aminus: xmin[1] },
        argmax: PlaneForm { aplus: xmax[0], aminus: xmax[1] },
    }
}

/// Minimizing and maximizing grid planes of `f` over the product of two
/// sphere grids, with the lowest flat index winning ties.
fn product_grid_extrema<F>(grid: &[Vec3], f: &F) -> (PlaneForm, PlaneForm)
where
    F: Fn(&PlaneForm) -> f64 + Sync,
{
    let n = grid.len();
    type Best = ((f64, usize), (f64, usize));
    let pick = |a: (f64, usize), b: (f64, usize)| match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    };
    let merge = |a: Best, b: Best| (pick(a.0, b.0), pick(a.1, b.1));
    let identity = || ((f64::INFINITY, usize::MAX), (f64::INFINITY, usize::MAX));
    let ((_, imin), (_, imax)) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = identity();
            for j in 0..n {
                let v = f(&PlaneForm { aplus: grid[i], aminus: grid[j] });
                let idx = i * n + j;
                best = merge(best, ((v, idx), (-v, idx)));
            }
            best
        })
        .reduce(identity, merge);
    let plane = |idx: usize| PlaneForm {
        aplus: grid[idx / n],
        aminus: grid[idx % n],
    };
    (plane(imin), plane(imax))
}

/// Brute-force `(min, max)` of the sectional curvature over planes, from the
/// full product grid (the `B` term couples the two factors).
pub fn sectional_extrema(blocks: &WeylBlocks, s: f64, resolution: usize) -> (f64, f64) {
    let grid = fibonacci_sphere(resolution.max(4).pow(2), HALF_RADIUS);
    let scale = block_scale(blocks);
    let objective = |p: &PlaneForm| sectional_via_forms(blocks, s, p);
    let gradient = |x: &[Vec3; 2]| {
        let p = PlaneForm { aplus: x[0], aminus: x[1] };
        let wp = mat_vec(&blocks.wplus, &x[0]);
        let wm = mat_vec(&blocks.wminus, &x[1]);
        let bm = mat_vec(&blocks.bblock, &x[1]);
        let bt = [0, 1, 2].map(|j| (0..3).map(|i| blocks.bblock[i][j] * x[0][i]).sum::<f64>());
        let gp = [0, 1, 2].map(|i| 2.0 * wp[i] + 2.0 * bm[i]);
        let gm = [0, 1, 2].map(|i| 2.0 * wm[i] + 2.0 * bt[i]);
        (objective(&p), [gp, gm])
    };
    let (lo, hi) = product_grid_extrema(&grid, &objective);
    let (_, kmin) = polish([lo.aplus, lo.aminus], Sense::Min, scale, gradient);
    let (_, kmax) = polish([hi.aplus, hi.aminus], Sense::Max, scale, gradient);
    (kmin, kmax)
}
