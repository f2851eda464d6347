//! Eigenvalues of symmetric 3×3 matrices.
//!
//! The trigonometric closed form is used unless the normalized cubic
//! discriminant `1 − r²` is within [`COLLISION_THRESHOLD`] of zero, where
//! `acos` loses half the digits; cyclic Jacobi rotations take over there.

use std::f64::consts::PI;

pub type Mat3 = [[f64; 3]; 3];

pub const COLLISION_THRESHOLD: f64 = 1e-12;

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn trace3(m: &Mat3) -> f64 {
    m[0][0] + m[1][1] + m[2][2]
}

pub fn frobenius_sq3(m: &Mat3) -> f64 {
    m.iter().flatten().map(|v| v * v).sum()
}

/// Which path produced the eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenPath {
    Scalar,
    Trigonometric,
    Jacobi,
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues3(m: &Mat3) -> [f64; 3] {
    symmetric_eigenvalues3_traced(m).0
}

pub fn symmetric_eigenvalues3_traced(m: &Mat3) -> ([f64; 3], EigenPath) {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = trace3(m) / 3.0;
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let scale = m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    if p2 <= (f64::EPSILON * scale).powi(2) {
        return ([q; 3], EigenPath::Scalar);
    }
    let p = (p2 / 6.0).sqrt();
    let mut b = *m;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - if i == j { q } else { 0.0 }) / p;
        }
    }
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    if 1.0 - r * r < COLLISION_THRESHOLD {
        return (jacobi_eigenvalues3(m), EigenPath::Jacobi);
    }
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = 3.0 * q - largest - smallest;
    let mut out = [smallest, middle, largest];
    out.sort_by(|a, b| a.total_cmp(b));
    (out, EigenPath::Trigonometric)
}

/// Cyclic Jacobi rotations to convergence.
pub fn jacobi_eigenvalues3(m: &Mat3) -> [f64; 3] {
    let mut a = *m;
    for _ in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let diag = a[0][0].powi(2) + a[1][1].powi(2) + a[2][2].powi(2);
        if off <= 1e-34 * diag || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A ← Jᵀ A J
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    let mut out = [a[0][0], a[1][1], a[2][2]];
    out.sort_by(|x, y| x.total_cmp(y));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, SymmetricEigen};
    use proptest::prelude::*;

    fn reference(m: &Mat3) -> [f64; 3] {
        let e = SymmetricEigen::new(Matrix3::from_fn(|i, j| m[i][j])).eigenvalues;
        let mut v = [e[0], e[1], e[2]];
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    #[test]
    fn diagonal_degenerate_pair() {
        let m = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        let (w, path) = symmetric_eigenvalues3_traced(&m);
        assert_eq!(path, EigenPath::Jacobi);
        assert_eq!(w, [-1.0, -1.0, 2.0]);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(symmetric_eigenvalues3(&[[0.0; 3]; 3]), [0.0; 3]);
    }

    #[test]
    fn rotated_double_eigenvalue_is_exact_to_rounding() {
        // Q diag(-2,-2,4) Qᵀ for a generic rotation Q
        let (a, b) = (0.3_f64, 1.1_f64);
        let q = Matrix3::new(a.cos(), -a.sin(), 0.0, a.sin(), a.cos(), 0.0, 0.0, 0.0, 1.0)
            * Matrix3::new(1.0, 0.0, 0.0, 0.0, b.cos(), -b.sin(), 0.0, b.sin(), b.cos());
        let m = q * Matrix3::from_diagonal(&nalgebra::Vector3::new(-2.0, -2.0, 4.0)) * q.transpose();
        let m: Mat3 = [0, 1, 2].map(|i| [0, 1, 2].map(|j| 0.5 * (m[(i, j)] + m[(j, i)])));
        let w = symmetric_eigenvalues3(&m);
        for (got, want) in w.iter().zip([-2.0, -2.0, 4.0]) {
            assert!((got - want).abs() < 1e-13, "{w:?}");
        }
    }

    proptest! {
        #[test]
        fn agrees_with_reference(v in proptest::array::uniform6(-5.0f64..5.0)) {
            let m = [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]];
            let got = symmetric_eigenvalues3(&m);
            let want = reference(&m);
            for k in 0..3 {
                prop_assert!((got[k] - want[k]).abs() < 1e-10 * (1.0 + want[2].abs().max(want[0].abs())));
            }
            let jac = jacobi_eigenvalues3(&m);
            for k in 0..3 {
                prop_assert!((jac[k] - want[k]).abs() < 1e-10 * (1.0 + want[2].abs().max(want[0].abs())));
            }
        }
    }
}
