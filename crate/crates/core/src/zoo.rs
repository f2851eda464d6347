//! Built-in model metrics with known curvature.
//!
//! | name     | chart (coordinates `x0..x3`)                                                     |
//! |----------|----------------------------------------------------------------------------------|
//! | `T4`     | identity on `[0, 2π]⁴`, all axes periodic                                        |
//! | `S4`     | `r²(dx0² + sin²x0 dx1² + sin²x0 sin²x1 dx2² + sin²x0 sin²x1 sin²x2 dx3²)`         |
//! | `CP2`    | `dρ² + sin²ρ/4 (σ1² + σ2²) + sin²ρ cos²ρ/4 σ3²` in Euler angles `(ρ, θ, ψ, φ)`    |
//! | `S1xS3`  | `dx0² + r²(dx1² + sin²x1 dx2² + sin²x1 sin²x2 dx3²)`, `x0 ∈ [0, 2πL]`             |
//! | `S2xS2`  | `a²(dx0² + sin²x0 dx1²) + b²(dx2² + sin²x2 dx3²)`                                 |
//! | `T4pert` | `diag(exp(ε fᵢ(x)))` with random trigonometric `fᵢ` drawn from `seed`             |
//!
//! For `CP2`, `σ1² + σ2² = dθ² + sin²θ dφ²` and `σ3 = dψ + cosθ dφ`, with
//! `ρ ∈ [0, π/2]`, `θ ∈ [0, π]`, `ψ ∈ [0, 4π]`, `φ ∈ [0, 2π]`. The axis order
//! `ψ` before `φ` makes the Kähler form self-dual (`W⁻ = 0`). This is the
//! Fubini–Study metric with holomorphic sectional curvature 4, so `s = 24`
//! and `Vol = π²/2`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::metric::{Interval, MetricSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("unknown zoo metric '{0}' (try list-zoo)")]
    UnknownName(String),
    #[error("metric '{metric}' has no parameter '{name}'")]
    UnknownParameter { metric: String, name: String },
    #[error("parameter {name} = {value} is out of range: {reason}")]
    InvalidParameter { name: String, value: f64, reason: String },
}

/// Where a ground-truth value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the literature for the canonical metric.
    Published,
    /// Immediate from the definitions.
    Trivial,
    /// Computed from a closed form or an independent oracle.
    Derived,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Truth<T> {
    pub value: T,
    pub provenance: Provenance,
}

fn truth<T>(value: T, provenance: Provenance) -> Option<Truth<T>> {
    Some(Truth { value, provenance })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruth {
    pub scalar: Option<Truth<f64>>,
    pub k1_over_s: Option<Truth<f64>>,
    pub k3_over_s: Option<Truth<f64>>,
    pub einstein: Option<Truth<bool>>,
    pub lcf: Option<Truth<bool>>,
    /// `w3⁺ = s/6` everywhere.
    pub w3plus_is_s6: Option<Truth<bool>>,
    /// `W⁻ = 0` everywhere.
    pub wminus_vanishes: Option<Truth<bool>>,
    pub volume: Option<Truth<f64>>,
}

impl GroundTruth {
    fn empty() -> Self {
        GroundTruth {
            scalar: None,
            k1_over_s: None,
            k3_over_s: None,
            einstein: None,
            lcf: None,
            w3plus_is_s6: None,
            wminus_vanishes: None,
            volume: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParameterInfo {
    pub name: &'static str,
    pub default: f64,
    pub description: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZooEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: Vec<ParameterInfo>,
    /// Ground truth at the default parameters; `None` for property-test families.
    pub ground_truth: Option<GroundTruth>,
}

fn param(name: &'static str, default: f64, description: &'static str) -> ParameterInfo {
    ParameterInfo {
        name,
        default,
        description,
    }
}

fn parameter_table(name: &str) -> Option<(&'static str, Vec<ParameterInfo>)> {
    Some(match name {
        "T4" => ("flat torus", vec![]),
        "S4" => ("round 4-sphere of radius r", vec![param("r", 1.0, "radius")]),
        "CP2" => ("complex projective plane with the Fubini-Study metric", vec![]),
        "S1xS3" => (
            "product of a circle of length 2πL and a round 3-sphere of radius r",
            vec![param("L", 1.0, "circle radius"), param("r", 1.0, "3-sphere radius")],
        ),
        "S2xS2" => (
            "product of round 2-spheres of radii a and b",
            vec![param("a", 1.0, "first radius"), param("b", 1.0, "second radius")],
        ),
        "T4pert" => (
            "diagonal trigonometric perturbation of the flat torus",
            vec![
                param("seed", 0.0, "random seed (non-negative integer)"),
                param("amplitude", 0.1, "perturbation size ε"),
            ],
        ),
        _ => return None,
    })
}

pub const ZOO_NAMES: [&str; 6] = ["T4", "S4", "CP2", "S1xS3", "S2xS2", "T4pert"];

pub fn zoo_catalog() -> Vec<ZooEntry> {
    ZOO_NAMES
        .iter()
        .map(|&name| {
            let (description, parameters) = parameter_table(name).expect("catalog names are known");
            ZooEntry {
                name,
                description,
                parameters,
                ground_truth: ground_truth(name, &[]).expect("defaults are valid"),
            }
        })
        .collect()
}

/// Defaults overridden by `overrides`, in declaration order.
fn resolve(name: &str, overrides: &[(&str, f64)]) -> Result<Vec<(&'static str, f64)>, ZooError> {
    let (_, table) = parameter_table(name).ok_or_else(|| ZooError::UnknownName(name.to_string()))?;
    let mut values: Vec<(&'static str, f64)> = table.iter().map(|p| (p.name, p.default)).collect();
    for &(key, value) in overrides {
        let slot = values
            .iter_mut()
            .find(|(n, _)| *n == key)
            .ok_or_else(|| ZooError::UnknownParameter {
                metric: name.to_string(),
                name: key.to_string(),
            })?;
        slot.1 = value;
    }
    for &(key, value) in &values {
        let bad = |reason: &str| {
            Err(ZooError::InvalidParameter {
                name: key.to_string(),
                value,
                reason: reason.to_string(),
            })
        };
        if !value.is_finite() {
            return bad("must be finite");
        }
        match key {
            "seed" if value < 0.0 || value.fract() != 0.0 => return bad("must be a non-negative integer"),
            "amplitude" if !(0.0..=0.5).contains(&value) => return bad("must lie in [0, 0.5]"),
            "r" | "L" | "a" | "b" if value <= 0.0 => return bad("radii must be positive"),
            _ => {}
        }
    }
    Ok(values)
}

fn get(values: &[(&'static str, f64)], key: &str) -> f64 {
    values.iter().find(|(n, _)| *n == key).map(|p| p.1).expect("resolved parameter")
}

const XS: [&str; 4] = ["x0", "x1", "x2", "x3"];

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi)
}

pub fn zoo_metric(name: &str, overrides: &[(&str, f64)]) -> Result<MetricSpec, ZooError> {
    let values = resolve(name, overrides)?;
    let params: Vec<(&str, f64)> = values.clone();
    let build = |components: &[(usize, usize, &str)], domain: [Interval; 4], periodic: [bool; 4]| {
        MetricSpec::from_sources(name, XS, &params, components, domain, periodic)
            .expect("zoo expressions are well formed")
    };
    let spec = match name {
        "T4" => build(
            &[(0, 0, "1"), (1, 1, "1"), (2, 2, "1"), (3, 3, "1")],
            [iv(0.0, 2.0 * PI); 4],
            [true; 4],
        ),
        "S4" => build(
            &[
                (0, 0, "r^2"),
                (1, 1, "r^2*sin(x0)^2"),
                (2, 2, "r^2*sin(x0)^2*sin(x1)^2"),
                (3, 3, "r^2*sin(x0)^2*sin(x1)^2*sin(x2)^2"),
            ],
            [iv(0.0, PI), iv(0.0, PI), iv(0.0, PI), iv(0.0, 2.0 * PI)],
            [false, false, false, true],
        ),
        "CP2" => build(
            &[
                (0, 0, "1"),
                (1, 1, "sin(x0)^2/4"),
                (2, 2, "sin(x0)^2*cos(x0)^2/4"),
                (2, 3, "sin(x0)^2*cos(x0)^2*cos(x1)/4"),
                (3, 3, "sin(x0)^2*sin(x1)^2/4 + sin(x0)^2*cos(x0)^2*cos(x1)^2/4"),
            ],
            [iv(0.0, PI / 2.0), iv(0.0, PI), iv(0.0, 4.0 * PI), iv(0.0, 2.0 * PI)],
            [false, false, true, true],
        ),
        "S1xS3" => build(
            &[
                (0, 0, "1"),
                (1, 1, "r^2"),
                (2, 2, "r^2*sin(x1)^2"),
                (3, 3, "r^2*sin(x1)^2*sin(x2)^2"),
            ],
            [iv(0.0, 2.0 * PI * get(&values, "L")), iv(0.0, PI), iv(0.0, PI), iv(0.0, 2.0 * PI)],
            [true, false, false, true],
        ),
        "S2xS2" => build(
            &[
                (0, 0, "a^2"),
                (1, 1, "a^2*sin(x0)^2"),
                (2, 2, "b^2"),
                (3, 3, "b^2*sin(x2)^2"),
            ],
            [iv(0.0, PI), iv(0.0, 2.0 * PI), iv(0.0, PI), iv(0.0, 2.0 * PI)],
            [false, true, false, true],
        ),
        "T4pert" => {
            let sources = perturbed_torus_sources(get(&values, "seed") as u64);
            let refs: Vec<(usize, usize, &str)> = sources.iter().enumerate().map(|(i, s)| (i, i, s.as_str())).collect();
            build(&refs, [iv(0.0, 2.0 * PI); 4], [true; 4])
        }
        _ => unreachable!("resolve rejects unknown names"),
    };
    Ok(spec)
}

/// `exp(amplitude * Σ_j (a_ij sin(x_j) + b_ij cos(x_j)) + c_i sin(x_i + x_k))` with
/// coefficients in `[-1, 1]`.
fn perturbed_torus_sources(seed: u64) -> [String; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coef = || format!("{:?}", rng.random_range(-1.0..1.0_f64));
    std::array::from_fn(|i| {
        let mut terms = Vec::new();
        for j in 0..4 {
            terms.push(format!("{}*sin(x{j})", coef()));
            terms.push(format!("{}*cos(x{j})", coef()));
        }
        terms.push(format!("{}*sin(x{i} + x{})", coef(), (i + 1) % 4));
        format!("exp(amplitude*({}))", terms.join(" + "))
    })
}

/// Ground truth for `name` at the given parameters.
pub fn ground_truth(name: &str, overrides: &[(&str, f64)]) -> Result<Option<GroundTruth>, ZooError> {
    use Provenance::*;
    let values = resolve(name, overrides)?;
    let mut gt = GroundTruth::empty();
    match name {
        "T4" => {
            gt.scalar = truth(0.0, Trivial);
            gt.einstein = truth(true, Trivial);
            gt.lcf = truth(true, Trivial);
            gt.volume = truth((2.0 * PI).powi(4), Trivial);
        }
        "S4" => {
            let r = get(&values, "r");
            gt.scalar = truth(12.0 / (r * r), Derived);
            gt.k1_over_s = truth(1.0 / 12.0, Published);
            gt.k3_over_s = truth(1.0 / 12.0, Derived);
            gt.einstein = truth(true, Derived);
            gt.lcf = truth(true, Derived);
            gt.wminus_vanishes = truth(true, Derived);
            gt.volume = truth(8.0 * PI * PI / 3.0 * r.powi(4), Derived);
        }
        "CP2" => {
            gt.scalar = truth(24.0, Derived);
            gt.k1_over_s = truth(1.0 / 24.0, Published);
            gt.k3_over_s = truth(1.0 / 6.0, Derived);
            gt.einstein = truth(true, Derived);
            gt.lcf = truth(false, Derived);
            gt.w3plus_is_s6 = truth(true, Published);
            gt.wminus_vanishes = truth(true, Derived);
            gt.volume = truth(PI * PI / 2.0, Derived);
        }
        "S1xS3" => {
            let (l, r) = (get(&values, "L"), get(&values, "r"));
            gt.scalar = truth(6.0 / (r * r), Derived);
            gt.k1_over_s = truth(1.0 / 12.0, Published);
            gt.k3_over_s = truth(1.0 / 12.0, Derived);
            gt.einstein = truth(false, Derived);
            gt.lcf = truth(true, Derived);
            gt.wminus_vanishes = truth(true, Derived);
            gt.volume = truth(2.0 * PI * l * 2.0 * PI * PI * r.powi(3), Derived);
        }
        "S2xS2" => {
            let (a, b) = (get(&values, "a"), get(&values, "b"));
            gt.scalar = truth(2.0 / (a * a) + 2.0 / (b * b), Derived);
            gt.k1_over_s = truth(0.0, Derived);
            gt.k3_over_s = truth(0.25, Derived);
            gt.einstein = truth(a == b, Derived);
            gt.lcf = truth(false, Derived);
            gt.w3plus_is_s6 = truth(true, Derived);
            gt.wminus_vanishes = truth(false, Derived);
            gt.volume = truth(16.0 * PI * PI * a * a * b * b, Derived);
        }
        "T4pert" => return Ok(None),
        _ => unreachable!("resolve rejects unknown names"),
    }
    Ok(Some(gt))
}
