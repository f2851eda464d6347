//! The curvature operator on 2-forms and its self-dual/anti-self-dual blocks.
//!
//! 2-forms are stored as 6-vectors over the simple basis
//! `e1∧e2, e1∧e3, e1∧e4, e2∧e3, e2∧e4, e3∧e4` (indices 0..3 in code), which is
//! orthonormal for `⟨e_i∧e_j, e_k∧e_l⟩ = δ_ik δ_jl − δ_il δ_jk`. The Λ±
//! bases are
//!
//! ```text
//! α1± = (e1∧e2 ± e3∧e4)/√2
//! α2± = (e1∧e3 ∓ e2∧e4)/√2
//! α3± = (e1∧e4 ± e2∧e3)/√2
//! ```
//!
//! so that `∗αk± = ±αk±` for the volume form `e1∧e2∧e3∧e4`. Flipping the
//! orientation swaps the two triples.

use serde::Serialize;
use thiserror::Error;

use crate::eigen::{det3, frobenius_sq3, symmetric_eigenvalues3, trace3, Mat3};
use crate::geometry::{relative, FrameCurvature};

pub type Form = [f64; 6];
pub type Mat6 = [[f64; 6]; 6];

/// Index pairs of the simple basis.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Standard,
    Flipped,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("operator trace {trace} does not match s/2 = {half_scalar} (sign or normalization convention broken)")]
    TraceMismatch { trace: f64, half_scalar: f64 },
}

/// Position of `e_a∧e_b` (`a < b`) in the simple basis.
pub fn pair_index(a: usize, b: usize) -> usize {
    PAIRS.iter().position(|&p| p == (a, b)).expect("a < b < 4")
}

/// Hodge star on the simple basis for the standard orientation.
pub fn hodge_star(form: &Form) -> Form {
    // ∗e12 = e34, ∗e13 = −e24, ∗e14 = e23, ∗e23 = e14, ∗e24 = −e13, ∗e34 = e12
    [form[5], -form[4], form[3], form[2], -form[1], form[0]]
}

/// `e_a∧e_b` as a 6-vector, for any `a ≠ b`.
pub fn simple_form(a: usize, b: usize) -> Form {
    let mut f = [0.0; 6];
    if a < b {
        f[pair_index(a, b)] = 1.0;
    } else {
        f[pair_index(b, a)] = -1.0;
    }
    f
}

pub fn form_dot(a: &Form, b: &Form) -> f64 {
    (0..6).map(|i| a[i] * b[i]).sum()
}

/// The six basis forms `(α1⁺, α2⁺, α3⁺, α1⁻, α2⁻, α3⁻)` for `orientation`.
pub fn lambda2_bases(orientation: Orientation) -> [Form; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [
        [h, 0.0, 0.0, 0.0, 0.0, h],
        [0.0, h, 0.0, 0.0, -h, 0.0],
        [0.0, 0.0, h, h, 0.0, 0.0],
    ];
    let minus = [
        [h, 0.0, 0.0, 0.0, 0.0, -h],
        [0.0, h, 0.0, 0.0, h, 0.0],
        [0.0, 0.0, h, -h, 0.0, 0.0],
    ];
    let (p, m) = match orientation {
        Orientation::Standard => (plus, minus),
        Orientation::Flipped => (minus, plus),
    };
    [p[0], p[1], p[2], m[0], m[1], m[2]]
}

/// Curvature operator in the ordered Λ⁺⊕Λ⁻ basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureOperator {
    pub matrix: Mat6,
    pub scalar: f64,
    pub orientation: Orientation,
}

/// Matrix of the operator on the simple basis, with diagonal entries equal to
/// the sectional curvatures of the coordinate planes of the frame.
pub fn simple_basis_operator(fc: &FrameCurvature) -> Mat6 {
    let mut s = [[0.0; 6]; 6];
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        for (q, &(c, d)) in PAIRS.iter().enumerate() {
            s[p][q] = fc.riemann[a][b][d][c];
        }
    }
    s
}

pub fn curvature_operator(fc: &FrameCurvature, orientation: Orientation) -> CurvatureOperator {
    let s = simple_basis_operator(fc);
    let basis = lambda2_bases(orientation);
    let mut m = [[0.0; 6]; 6];
    for p in 0..6 {
        let mut sp = [0.0; 6];
        for u in 0..6 {
            sp[u] = (0..6).map(|v| s[u][v] * basis[p][v]).sum();
        }
        for q in 0..6 {
            m[q][p] = form_dot(&basis[q], &sp);
        }
    }
    CurvatureOperator {
        matrix: m,
        scalar: fc.scalar,
        orientation,
    }
}

impl CurvatureOperator {
    pub fn trace(&self) -> f64 {
        (0..6).map(|i| self.matrix[i][i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for p in 0..6 {
            for q in 0..6 {
                worst = worst.max((self.matrix[p][q] - self.matrix[q][p]).abs());
            }
        }
        worst
    }

    /// `⟨α, R α⟩` for a 2-form given in the Λ± basis coordinates.
    pub fn quadratic_form(&self, coords: &Form) -> f64 {
        let mut acc = 0.0;
        for p in 0..6 {
            for q in 0..6 {
                acc += coords[p] * self.matrix[p][q] * coords[q];
            }
        }
        acc
    }
}

/// `W⁺`, `W⁻` and the off-diagonal block `B: Λ⁻ → Λ⁺`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylBlocks {
    pub wplus: Mat3,
    pub wminus: Mat3,
    pub bblock: Mat3,
}

impl WeylBlocks {
    pub fn bblock_norm(&self) -> f64 {
        frobenius_sq3(&self.bblock).sqrt()
    }
}

/// Relative tolerance of the trace sanity check in [`split_blocks`].
pub const TRACE_SANITY: f64 = 1e-6;

pub fn split_blocks(op: &CurvatureOperator) -> Result<WeylBlocks, DecompositionError> {
    let trace = op.trace();
    let half = op.scalar / 2.0;
    let scale = op.max_abs().max(op.scalar.abs()).max(1.0);
    if (trace - half).abs() > TRACE_SANITY * scale {
        return Err(DecompositionError::TraceMismatch {
            trace,
            half_scalar: half,
        });
    }
    let twelfth = op.scalar / 12.0;
    let m = &op.matrix;
    let mut blocks = WeylBlocks {
        wplus: [[0.0; 3]; 3],
        wminus: [[0.0; 3]; 3],
        bblock: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { twelfth } else { 0.0 };
            blocks.wplus[i][j] = 0.5 * (m[i][j] + m[j][i]) - id;
            blocks.wminus[i][j] = 0.5 * (m[i + 3][j + 3] + m[j + 3][i + 3]) - id;
            blocks.bblock[i][j] = m[i][j + 3];
        }
    }
    Ok(blocks)
}

/// Sorted spectra and scalar invariants of `W±`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylSpectra {
    pub wplus: [f64; 3],
    pub wminus: [f64; 3],
    pub normsq_plus: f64,
    pub normsq_minus: f64,
    pub det_plus: f64,
    pub det_minus: f64,
    /// Traces of the blocks (zero up to rounding).
    pub trace_plus: f64,
    pub trace_minus: f64,
}

pub fn weyl_spectrum(blocks: &WeylBlocks) -> WeylSpectra {
    WeylSpectra {
        wplus: symmetric_eigenvalues3(&blocks.wplus),
        wminus: symmetric_eigenvalues3(&blocks.wminus),
        normsq_plus: frobenius_sq3(&blocks.wplus),
        normsq_minus: frobenius_sq3(&blocks.wminus),
        det_plus: det3(&blocks.wplus),
        det_minus: det3(&blocks.wminus),
        trace_plus: trace3(&blocks.wplus),
        trace_minus: trace3(&blocks.wminus),
    }
}

/// `√6/18`
pub fn lagrange_constant() -> f64 {
    6f64.sqrt() / 18.0
}

impl WeylSpectra {
    pub fn norm_plus(&self) -> f64 {
        self.normsq_plus.sqrt()
    }

    pub fn norm_minus(&self) -> f64 {
        self.normsq_minus.sqrt()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.wplus
            .iter()
            .chain(self.wminus.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `max(det W± − (√6/18)|W±|³)`; non-positive when the bound holds.
    pub fn lagrange_excess(&self) -> f64 {
        let c = lagrange_constant();
        (self.det_plus - c * self.normsq_plus.powf(1.5)).max(self.det_minus - c * self.normsq_minus.powf(1.5))
    }

    /// `max(|W±|² − 6 (w1±)²)`; non-positive when the bound holds.
    pub fn norm_bound_excess(&self) -> f64 {
        (self.normsq_plus - 6.0 * self.wplus[0].powi(2)).max(self.normsq_minus - 6.0 * self.wminus[0].powi(2))
    }

    /// Eigenvalue sum of squares against the Frobenius norms, relative.
    pub fn norm_crosscheck_residual(&self) -> f64 {
        let sp: f64 = self.wplus.iter().map(|w| w * w).sum();
        let sm: f64 = self.wminus.iter().map(|w| w * w).sum();
        relative((sp - self.normsq_plus).abs(), self.normsq_plus)
            .max(relative((sm - self.normsq_minus).abs(), self.normsq_minus))
    }

    /// `|Σ w±|` over both sides.
    pub fn eigen_sum_residual(&self) -> f64 {
        self.wplus.iter().sum::<f64>().abs().max(self.wminus.iter().sum::<f64>().abs())
    }
}
