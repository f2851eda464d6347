//! Levi-Civita curvature of a metric 2-jet and its orthonormal-frame
//! components.
//!
//! Sign convention: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z` and
//! `Rm(X,Y,Z,W) = g(R(X,Y)Z, W)`, so that the sectional curvature is
//! `Rm(X,Y,Y,X) / (|X|²|Y|² − g(X,Y)²)` and the unit round sphere has `K ≡ +1`.
//!
//! [`frame_curvature_at`] evaluates the metric jet in double-double and
//! assembles the frame components of `Rm` from the covariant formula
//!
//! `R_ijkl = ½(∂_i∂_k g_jl + ∂_j∂_l g_ik − ∂_i∂_l g_jk − ∂_j∂_k g_il)
//!          + Γ_{m,jl} g^{mn} Γ_{n,ik} − Γ_{m,il} g^{mn} Γ_{n,jk}`
//!
//! with `g^{mn} = Σ_e E_e^m E_e^n`. Every term is stored with its index
//! symmetries, so the pair symmetries of the result hold exactly. The
//! Christoffel route in [`curvature_tensor`] is kept as an independent
//! `f64` cross-check.

use nalgebra::{Matrix4, SymmetricEigen};
use thiserror::Error;

use crate::expr::{ExprError, HESS_INDEX};
use crate::metric::{MetricSpec, COMPONENT_INDEX};
use crate::scalar::{Dd, Scalar};

pub type Tensor4<T = f64> = [[[[T; 4]; 4]; 4]; 4];
pub type Mat4<T = f64> = [[T; 4]; 4];
pub type Vec4<T = f64> = [T; 4];

/// Smallest-to-largest eigenvalue ratio below which a metric is rejected.
pub const DEGENERACY_RATIO: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate metric at {point:?}: eigenvalue ratio {ratio:e}")]
    Degenerate { point: Vec4, ratio: f64 },
    #[error("metric is not invertible (Cholesky failed)")]
    Singular,
    #[error("Gram-Schmidt lost rank at coordinate axis {0}")]
    RankLoss(usize),
    #[error("vectors are linearly dependent (area² {0:e})")]
    DependentVectors(f64),
    #[error("at {point:?}: {source}")]
    Expression {
        point: Vec4,
        #[source]
        source: ExprError,
    },
}

/// Metric and its first and second coordinate derivatives at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJet<T = f64> {
    pub g: Mat4<T>,
    /// `dg[k][i][j] = ∂_k g_ij`
    pub dg: [Mat4<T>; 4],
    /// `ddg[k][l][i][j] = ∂_k ∂_l g_ij`
    pub ddg: Tensor4<T>,
}

impl<T: Scalar> MetricJet<T> {
    pub fn to_f64(&self) -> MetricJet {
        MetricJet {
            g: self.g.map(|r| r.map(T::to_f64)),
            dg: self.dg.map(|m| m.map(|r| r.map(T::to_f64))),
            ddg: self.ddg.map(|t| t.map(|m| m.map(|r| r.map(T::to_f64)))),
        }
    }
}

/// Curvature in coordinate components.
#[derive(Clone, Debug)]
pub struct CoordinateCurvature<T = f64> {
    /// `riemann[i][j][k][l] = Rm(∂_i, ∂_j, ∂_k, ∂_l)`
    pub riemann: Tensor4<T>,
    pub ricci: Mat4<T>,
    pub scalar: T,
    pub ginv: Mat4<T>,
}

/// Curvature expressed in an orthonormal frame.
#[derive(Clone, Debug)]
pub struct FrameCurvature {
    /// `frame[a]` holds the coordinate components of `E_a`.
    pub frame: [Vec4; 4],
    /// `riemann[a][b][c][d] = Rm(E_a, E_b, E_c, E_d)`
    pub riemann: Tensor4,
    pub ricci: Mat4,
    pub scalar: f64,
}

fn to_matrix(m: &Mat4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| m[i][j])
}

/// Eigenvalues of a symmetric 4×4 matrix, ascending.
pub fn symmetric_eigenvalues4(m: &Mat4) -> [f64; 4] {
    let eig = SymmetricEigen::new(to_matrix(m)).eigenvalues;
    let mut v = [eig[0], eig[1], eig[2], eig[3]];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Assembles the metric 2-jet and rejects degenerate points.
pub fn metric_jet(spec: &MetricSpec, point: &Vec4) -> Result<MetricJet, GeometryError> {
    metric_jet_in(spec, point)
}

/// [`metric_jet`] in the scalar type `T`.
pub fn metric_jet_in<T: Scalar>(spec: &MetricSpec, point: &Vec4) -> Result<MetricJet<T>, GeometryError> {
    let jets = spec
        .component_jets_in::<T>(point)
        .map_err(|source| GeometryError::Expression { point: *point, source })?;
    let zero = T::zero();
    let mut jet = MetricJet {
        g: [[zero; 4]; 4],
        dg: [[[zero; 4]; 4]; 4],
        ddg: [[[[zero; 4]; 4]; 4]; 4],
    };
    for i in 0..4 {
        for j in 0..4 {
            let c = &jets[COMPONENT_INDEX[i][j]];
            jet.g[i][j] = c.value;
            for k in 0..4 {
                jet.dg[k][i][j] = c.grad[k];
                for l in 0..4 {
                    jet.ddg[k][l][i][j] = c.hess[HESS_INDEX[k][l]];
                }
            }
        }
    }
    let eig = symmetric_eigenvalues4(&jet.g.map(|r| r.map(T::to_f64)));
    let ratio = eig[0] / eig[3];
    if !(eig[3] > 0.0 && ratio > DEGENERACY_RATIO) {
        return Err(GeometryError::Degenerate { point: *point, ratio });
    }
    Ok(jet)
}

/// Inverse of a positive definite matrix through its Cholesky factor.
fn inverse_metric<T: Scalar>(g: &Mat4<T>) -> Result<Mat4<T>, GeometryError> {
    let zero = T::zero();
    let mut l = [[zero; 4]; 4];
    for j in 0..4 {
        let mut d = g[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d.to_f64() > 0.0) {
            return Err(GeometryError::Singular);
        }
        l[j][j] = d.sqrt();
        for i in j + 1..4 {
            let mut v = g[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k];
            }
            l[i][j] = v / l[j][j];
        }
    }
    // m = L^{-1}, lower triangular
    let mut m = [[zero; 4]; 4];
    for j in 0..4 {
        m[j][j] = T::one() / l[j][j];
        for i in j + 1..4 {
            let mut v = zero;
            for k in j..i {
                v -= l[i][k] * m[k][j];
            }
            m[i][j] = v / l[i][i];
        }
    }
    // g^{-1} = L^{-T} L^{-1}, filled symmetrically
    let mut inv = [[zero; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            let mut v = zero;
            for k in j..4 {
                v += m[k][i] * m[k][j];
            }
            inv[i][j] = v;
            inv[j][i] = v;
        }
    }
    Ok(inv)
}

/// Christoffel symbols, Riemann, Ricci and scalar curvature.
pub fn curvature_tensor<T: Scalar>(jet: &MetricJet<T>) -> Result<CoordinateCurvature<T>, GeometryError> {
    let zero = T::zero();
    let half = T::from_f64(0.5);
    let ginv = inverse_metric(&jet.g)?;
    let (dg, ddg) = (&jet.dg, &jet.ddg);

    // first kind: gamma1[l][i][j] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let mut gamma1 = [[[zero; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                gamma1[l][i][j] = half * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
            }
        }
    }
    // second kind: gamma[k][i][j] = g^{kl} gamma1[l][i][j]
    let mut gamma = [[[zero; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                gamma[k][i][j] = sum4(|l| ginv[k][l] * gamma1[l][i][j]);
            }
        }
    }
    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let mut dginv = [[[zero; 4]; 4]; 4];
    for m in 0..4 {
        let mut tmp = [[zero; 4]; 4];
        for k in 0..4 {
            for b in 0..4 {
                tmp[k][b] = sum4(|a| ginv[k][a] * dg[m][a][b]);
            }
        }
        for k in 0..4 {
            for l in 0..4 {
                dginv[m][k][l] = -sum4(|b| tmp[k][b] * ginv[b][l]);
            }
        }
    }
    // dgamma[m][k][i][j] = ∂_m Γ^k_ij
    let mut dgamma = [[[[zero; 4]; 4]; 4]; 4];
    for m in 0..4 {
        let mut dgamma1 = [[[zero; 4]; 4]; 4];
        for l in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    dgamma1[l][i][j] = half * (ddg[m][i][j][l] + ddg[m][j][i][l] - ddg[m][l][i][j]);
                }
            }
        }
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    dgamma[m][k][i][j] = sum4(|l| dginv[m][k][l] * gamma1[l][i][j] + ginv[k][l] * dgamma1[l][i][j]);
                }
            }
        }
    }
    // R(∂_i,∂_j)∂_k = up[l][i][j][k] ∂_l
    let mut up = [[[[zero; 4]; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let quad = sum4(|m| gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k]);
                    up[l][i][j][k] = dgamma[i][l][j][k] - dgamma[j][l][i][k] + quad;
                }
            }
        }
    }
    let mut riemann = [[[[zero; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    riemann[i][j][k][l] = sum4(|m| jet.g[l][m] * up[m][i][j][k]);
                }
            }
        }
    }
    // Ric(Y,Z) = tr(X ↦ R(X,Y)Z)
    let mut ricci = [[zero; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            ricci[j][k] = sum4(|i| up[i][i][j][k]);
        }
    }
    let mut scalar = zero;
    for j in 0..4 {
        for k in 0..4 {
            scalar += ginv[j][k] * ricci[j][k];
        }
    }
    Ok(CoordinateCurvature {
        riemann,
        ricci,
        scalar,
        ginv,
    })
}

fn sum4<T: Scalar>(f: impl Fn(usize) -> T) -> T {
    let mut acc = f(0);
    for i in 1..4 {
        acc += f(i);
    }
    acc
}

fn inner<T: Scalar>(g: &Mat4<T>, u: &Vec4<T>, v: &Vec4<T>) -> T {
    let mut acc = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            acc += g[i][j] * u[i] * v[j];
        }
    }
    acc
}

/// Gram–Schmidt on `∂_0, ∂_1, ∂_2, ∂_3` in that order.
pub fn gram_schmidt<T: Scalar>(g: &Mat4<T>) -> Result<[Vec4<T>; 4], GeometryError> {
    let mut frame = [[T::zero(); 4]; 4];
    for a in 0..4 {
        let mut v = [T::zero(); 4];
        v[a] = T::one();
        for b in 0..a {
            let p = inner(g, &v, &frame[b]);
            for i in 0..4 {
                v[i] -= p * frame[b][i];
            }
        }
        let n2 = inner(g, &v, &v);
        if !(n2.to_f64() > DEGENERACY_RATIO * g[a][a].to_f64().abs()) {
            return Err(GeometryError::RankLoss(a));
        }
        let n = n2.sqrt();
        frame[a] = v.map(|x| x / n);
    }
    Ok(frame)
}

/// `Σ_ij m_ij u_i v_j`.
fn bilinear<T: Scalar>(m: impl Fn(usize, usize) -> T, u: &Vec4<T>, v: &Vec4<T>) -> T {
    let mut acc = T::zero();
    for i in 0..4 {
        let mut row = T::zero();
        for j in 0..4 {
            row += m(i, j) * v[j];
        }
        acc += u[i] * row;
    }
    acc
}

/// Frame components of the curvature from the covariant formula in the
/// module docs, assembled in `T` and rounded once.
pub fn frame_curvature<T: Scalar>(jet: &MetricJet<T>) -> Result<FrameCurvature, GeometryError> {
    let e = gram_schmidt(&jet.g)?;
    let zero = T::zero();
    let half = T::from_f64(0.5);
    let (dg, ddg) = (&jet.dg, &jet.ddg);

    // Γ_{m,ij} with the first index already in the frame, then all three
    let mut gamma1 = [[[zero; 4]; 4]; 4];
    for m in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let v = half * (dg[i][j][m] + dg[j][i][m] - dg[m][i][j]);
                gamma1[m][i][j] = v;
                gamma1[m][j][i] = v;
            }
        }
    }
    let mut gf = [[[zero; 4]; 4]; 4];
    for c in 0..4 {
        let mut partial = [[zero; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let mut acc = zero;
                for m in 0..4 {
                    acc += e[c][m] * gamma1[m][i][j];
                }
                partial[i][j] = acc;
                partial[j][i] = acc;
            }
        }
        for a in 0..4 {
            for b in a..4 {
                let v = bilinear(|i, j| partial[i][j], &e[a], &e[b]);
                gf[c][a][b] = v;
                gf[c][b][a] = v;
            }
        }
    }
    // quad[u][v] = Σ_c gf[c][pair u] gf[c][pair v] over packed pairs
    let mut quad = [[zero; 10]; 10];
    for (u, &(a, b)) in PAIR_LIST.iter().enumerate() {
        for (v, &(c, d)) in PAIR_LIST.iter().enumerate().skip(u) {
            let mut acc = zero;
            for f in 0..4 {
                acc += gf[f][a][b] * gf[f][c][d];
            }
            quad[u][v] = acc;
            quad[v][u] = acc;
        }
    }
    // h[p][q][r][s] = ∂∂g with derivative slots (p, q) and component slots (r, s)
    let mut hd = [[[[zero; 4]; 4]; 4]; 4];
    for (p, q) in PAIR_LIST {
        for j in 0..4 {
            for l in j..4 {
                let v = bilinear(|i, k| ddg[i][k][j][l], &e[p], &e[q]);
                hd[p][q][j][l] = v;
                hd[p][q][l][j] = v;
            }
        }
    }
    let mut h = [[[[zero; 4]; 4]; 4]; 4];
    for (p, q) in PAIR_LIST {
        for (r, s) in PAIR_LIST {
            let v = bilinear(|j, l| hd[p][q][j][l], &e[r], &e[s]);
            for (x, y) in [(p, q), (q, p)] {
                h[x][y][r][s] = v;
                h[x][y][s][r] = v;
            }
        }
    }
    let pi = |x: usize, y: usize| HESS_INDEX[x][y];
    let mut rm = [[[[zero; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let second = (h[a][c][b][d] + h[b][d][a][c]) - (h[a][d][b][c] + h[b][c][a][d]);
                    let first = quad[pi(b, d)][pi(a, c)] - quad[pi(a, d)][pi(b, c)];
                    rm[a][b][c][d] = half * second + first;
                }
            }
        }
    }
    let mut ricci = [[zero; 4]; 4];
    for b in 0..4 {
        for c in 0..4 {
            let mut acc = zero;
            for a in 0..4 {
                acc += rm[a][b][c][a];
            }
            ricci[b][c] = acc;
        }
    }
    let mut scalar = zero;
    for a in 0..4 {
        scalar += ricci[a][a];
    }
    Ok(FrameCurvature {
        frame: e.map(|v| v.map(T::to_f64)),
        riemann: rm.map(|t| t.map(|m| m.map(|r| r.map(T::to_f64)))),
        ricci: ricci.map(|r| r.map(T::to_f64)),
        scalar: scalar.to_f64(),
    })
}

/// Index pairs `(a, b)` with `a ≤ b`, in packed order.
const PAIR_LIST: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

fn transform4<T: Scalar>(t: &Tensor4<T>, e: &[Vec4<T>; 4]) -> Tensor4<T> {
    let zero = T::zero();
    // contract one slot at a time
    let mut a = [[[[zero; 4]; 4]; 4]; 4];
    for p in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    a[p][j][k][l] = sum4(|i| e[p][i] * t[i][j][k][l]);
                }
            }
        }
    }
    let mut b = [[[[zero; 4]; 4]; 4]; 4];
    for p in 0..4 {
        for q in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    b[p][q][k][l] = sum4(|j| e[q][j] * a[p][j][k][l]);
                }
            }
        }
    }
    for p in 0..4 {
        for q in 0..4 {
            for r in 0..4 {
                for l in 0..4 {
                    a[p][q][r][l] = sum4(|k| e[r][k] * b[p][q][k][l]);
                }
            }
        }
    }
    for p in 0..4 {
        for q in 0..4 {
            for r in 0..4 {
                for s in 0..4 {
                    b[p][q][r][s] = sum4(|l| e[s][l] * a[p][q][r][l]);
                }
            }
        }
    }
    b
}

/// Re-expresses curvature in the Gram–Schmidt frame.
pub fn orthonormal_frame<T: Scalar>(
    jet: &MetricJet<T>,
    curv: &CoordinateCurvature<T>,
) -> Result<FrameCurvature, GeometryError> {
    let frame = gram_schmidt(&jet.g)?;
    let riemann = transform4(&curv.riemann, &frame);
    let mut ricci = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            ricci[a][b] = inner(&curv.ricci, &frame[a], &frame[b]).to_f64();
        }
    }
    Ok(FrameCurvature {
        frame: frame.map(|v| v.map(T::to_f64)),
        riemann: riemann.map(|t| t.map(|m| m.map(|r| r.map(T::to_f64)))),
        ricci,
        scalar: curv.scalar.to_f64(),
    })
}

/// Full pipeline from a spec to frame curvature at `point`, evaluated in
/// double-double. The returned jet is rounded to `f64`.
pub fn frame_curvature_at(spec: &MetricSpec, point: &Vec4) -> Result<(MetricJet, FrameCurvature), GeometryError> {
    let jet = metric_jet_in::<Dd>(spec, point)?;
    let fc = frame_curvature(&jet)?;
    Ok((jet.to_f64(), fc))
}

/// Frame curvature through the Christoffel symbols in the scalar type `T`,
/// re-expressed in the Gram–Schmidt frame.
pub fn frame_curvature_christoffel<T: Scalar>(spec: &MetricSpec, point: &Vec4) -> Result<FrameCurvature, GeometryError> {
    let jet = metric_jet_in::<T>(spec, point)?;
    let curv = curvature_tensor(&jet)?;
    orthonormal_frame(&jet, &curv)
}

/// `Rm(X,Y,Y,X) / (|X|²|Y|² − ⟨X,Y⟩²)` for frame components `x`, `y`.
pub fn sectional_curvature(fc: &FrameCurvature, x: &Vec4, y: &Vec4) -> Result<f64, GeometryError> {
    let dot = |u: &Vec4, v: &Vec4| (0..4).map(|i| u[i] * v[i]).sum::<f64>();
    let area2 = dot(x, x) * dot(y, y) - dot(x, y).powi(2);
    if area2 < 1e-12 {
        return Err(GeometryError::DependentVectors(area2));
    }
    let r = &fc.riemann;
    let mut num = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    num += r[a][b][c][d] * x[a] * y[b] * y[c] * x[d];
                }
            }
        }
    }
    Ok(num / area2)
}

impl FrameCurvature {
    pub fn max_abs_riemann(&self) -> f64 {
        self.riemann
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the pair symmetries, relative to `max |R|`.
    pub fn symmetry_residual(&self) -> f64 {
        let r = &self.riemann;
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = r[a][b][c][d];
                        worst = worst
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs())
                            .max((v - r[c][d][a][b]).abs());
                    }
                }
            }
        }
        relative(worst, self.max_abs_riemann())
    }

    /// Largest first-Bianchi defect, relative to `max |R|`.
    pub fn bianchi_residual(&self) -> f64 {
        let r = &self.riemann;
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        worst = worst.max((r[a][b][c][d] + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        relative(worst, self.max_abs_riemann())
    }

    /// `|Σ_a Ric_aa − s|` relative to `max(|s|, |Ric|)`.
    pub fn ricci_trace_residual(&self) -> f64 {
        let tr: f64 = (0..4).map(|a| self.ricci[a][a]).sum();
        let scale = self
            .ricci
            .iter()
            .flatten()
            .fold(self.scalar.abs(), |m, v| m.max(v.abs()));
        relative((tr - self.scalar).abs(), scale)
    }

    /// `max |g(E_a, E_b) − δ_ab|`.
    pub fn frame_residual(&self, g: &Mat4) -> f64 {
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((inner(g, &self.frame[a], &self.frame[b]) - target).abs());
            }
        }
        worst
    }

    /// `|Ric − (s/4) δ|` (Frobenius, frame components).
    pub fn einstein_residual(&self) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let target = if a == b { self.scalar / 4.0 } else { 0.0 };
                acc += (self.ricci[a][b] - target).powi(2);
            }
        }
        acc.sqrt()
    }

    pub fn ricci_min(&self) -> f64 {
        symmetric_eigenvalues4(&self.ricci)[0]
    }
}

/// `residual / scale`, with an exactly vanishing residual mapping to 0.
pub fn relative(residual: f64, scale: f64) -> f64 {
    if residual == 0.0 {
        0.0
    } else {
        residual / scale.max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Interval, MetricSpec};
    use std::f64::consts::PI;

    fn diag_spec(diag: [&str; 4], params: &[(&str, f64)]) -> MetricSpec {
        MetricSpec::from_sources(
            "test",
            ["x0", "x1", "x2", "x3"],
            params,
            &[(0, 0, diag[0]), (1, 1, diag[1]), (2, 2, diag[2]), (3, 3, diag[3])],
            [Interval::new(0.0, PI), Interval::new(0.0, PI), Interval::new(0.0, PI), Interval::new(0.0, 2.0 * PI)],
            [false, false, false, true],
        )
        .unwrap()
    }

    fn sphere() -> MetricSpec {
        diag_spec(
            ["1", "sin(x0)^2", "sin(x0)^2*sin(x1)^2", "sin(x0)^2*sin(x1)^2*sin(x2)^2"],
            &[],
        )
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let spec = diag_spec(["1", "1", "1", "1"], &[]);
        let p = [0.3, 0.2, 1.0, 4.0];
        let jet = metric_jet(&spec, &p).unwrap();
        assert_eq!(jet.dg, [[[0.0; 4]; 4]; 4]);
        let (_, fc) = frame_curvature_at(&spec, &p).unwrap();
        assert_eq!(fc.scalar, 0.0);
        assert_eq!(fc.max_abs_riemann(), 0.0);
        let mut id = [[0.0; 4]; 4];
        for a in 0..4 {
            id[a][a] = 1.0;
        }
        assert_eq!(fc.frame, id);
        assert_eq!(sectional_curvature(&fc, &[1.0, 0.0, 0.0, 0.0], &[0.0, 0.3, 1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn scaled_first_axis_frame() {
        let spec = diag_spec(["4", "1", "1", "1"], &[]);
        let jet = metric_jet(&spec, &[0.5; 4]).unwrap();
        let frame = gram_schmidt(&jet.g).unwrap();
        assert_eq!(frame[0], [0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn unit_sphere_has_constant_curvature_one() {
        let spec = sphere();
        let p = [0.9, 1.3, 2.1, 0.4];
        let (_, fc) = frame_curvature_at(&spec, &p).unwrap();
        assert!((fc.scalar - 12.0).abs() < 1e-10, "s = {}", fc.scalar);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        // Rm(a,b,c,d) = δ_ad δ_bc − δ_ac δ_bd, so Rm(a,b,b,a) = 1
                        let dl = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                        let want = dl(a, d) * dl(b, c) - dl(a, c) * dl(b, d);
                        assert!((fc.riemann[a][b][c][d] - want).abs() < 1e-10);
                    }
                }
            }
        }
        let k = sectional_curvature(&fc, &[1.0, 2.0, 0.0, -1.0], &[0.0, 1.0, 3.0, 0.5]).unwrap();
        assert!((k - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_first_derivatives_only_in_angular_components() {
        let spec = sphere();
        let jet = metric_jet(&spec, &[0.7, 1.1, 1.9, 3.0]).unwrap();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    if i == 0 || j == 0 || i != j {
                        assert_eq!(jet.dg[k][i][j], 0.0);
                    }
                }
            }
        }
        assert!(jet.dg[0][1][1] != 0.0);
    }

    #[test]
    fn covariant_and_christoffel_routes_agree() {
        let spec = diag_spec(
            ["exp(x1)", "1 + x0^2", "2 + sin(x0*x3)", "1 + x1^2*x2^2"],
            &[],
        );
        let p = [0.4, 0.7, 1.2, 0.9];
        let (_, fc) = frame_curvature_at(&spec, &p).unwrap();
        let old = frame_curvature_christoffel::<f64>(&spec, &p).unwrap();
        assert!((fc.scalar - old.scalar).abs() < 1e-12 * fc.scalar.abs().max(1.0));
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        assert!((fc.riemann[a][b][c][d] - old.riemann[a][b][c][d]).abs() < 1e-12);
                    }
                }
            }
        }
        assert_eq!(fc.symmetry_residual(), 0.0);
    }

    #[test]
    fn pole_is_degenerate() {
        let err = metric_jet(&sphere(), &[0.0, 1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, GeometryError::Degenerate { .. }));
    }

    #[test]
    fn dependent_vectors_rejected() {
        let (_, fc) = frame_curvature_at(&sphere(), &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let x = [1.0, 2.0, 0.0, 0.0];
        assert!(sectional_curvature(&fc, &x, &x.map(|v| 2.0 * v)).is_err());
    }
}
