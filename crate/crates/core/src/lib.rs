//! Curvature analysis of 4-dimensional Riemannian metrics given on coordinate
//! charts.
//!
//! Pipeline: [`metric`] specs of closed-form [`expr`] components → exact
//! 2-jets → [`geometry`] (Levi-Civita curvature in an orthonormal frame) →
//! [`decomposition`] (curvature operator on Λ⁺⊕Λ⁻, `W±`, `B`) → [`biortho`]
//! (biorthogonal curvature extrema and a brute-force oracle) → [`classify`]
//! (pinching hypotheses over a sample set) → [`report`].
//!
//! ```
//! use biortho::analysis::{analyze_point, AnalysisOptions};
//! use biortho::zoo::zoo_metric;
//!
//! let cp2 = zoo_metric("CP2", &[]).unwrap();
//! let a = analyze_point(&cp2, &[0.7, 1.1, 2.0, 0.4], 1.0, &AnalysisOptions::default()).unwrap();
//! assert!((a.summary.k1 - a.summary.s / 24.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod biortho;
pub mod classify;
pub mod decomposition;
pub mod eigen;
pub mod expr;
pub mod geometry;
pub mod metric;
pub mod report;
pub mod scalar;
pub mod zoo;
