//! Metric specifications: ten component expressions on a coordinate box.
//!
//! Text format:
//!
//! ```text
//! # comment
//! [coordinates]
//! r theta phi psi
//! [parameters]
//! a = 1.5
//! [domain]
//! r = [0, pi/2]
//! psi = [0, 4*pi] periodic
//! [metric]
//! g00 = "1"
//! g23 = "a*cos(theta)"
//! ```
//!
//! The `[coordinates]` section is optional (default `x0 x1 x2 x3`). Every
//! axis needs a domain entry and every diagonal component is required;
//! missing off-diagonal components are zero. `gij` and `gji` name the same
//! component. Interval bounds may be constant expressions in the parameters.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{
    parse_expression_with, ExprError, Expression, Jet2, DEFAULT_COORDINATES, RESERVED_NAMES,
};
use crate::scalar::Scalar;

/// Index of component `(i, j)` in the packed lower/upper triangle.
pub const COMPONENT_INDEX: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("diagonal component g{0}{0} required")]
    MissingDiagonal(usize),
    #[error("duplicate key '{key}' (line {line})")]
    DuplicateKey { key: String, line: usize },
    #[error("line {line}: malformed interval '{text}'")]
    MalformedInterval { line: usize, text: String },
    #[error("domain for coordinate '{0}' required")]
    MissingDomain(String),
    #[error("undeclared parameter '{name}' in {context}")]
    UndeclaredParameter { name: String, context: String },
    #[error("in {context}: {source}")]
    Expression {
        context: String,
        #[source]
        source: ExprError,
    },
    #[error("invalid name '{0}'")]
    InvalidName(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub name: String,
    pub coordinates: [String; 4],
    /// Parameter names and bound values, in declaration order.
    pub parameters: Vec<(String, f64)>,
    /// Components `g_ij`, `i <= j`, packed by [`COMPONENT_INDEX`].
    pub components: [Expression; 10],
    pub domain: [Interval; 4],
    pub periodic: [bool; 4],
}

impl MetricSpec {
    pub fn component(&self, i: usize, j: usize) -> &Expression {
        &self.components[COMPONENT_INDEX[i][j]]
    }

    pub fn parameter_values(&self) -> Vec<f64> {
        self.parameters.iter().map(|(_, v)| *v).collect()
    }

    /// Jets of the ten packed components at `point`.
    pub fn component_jets(&self, point: &[f64; 4]) -> Result<[Jet2; 10], ExprError> {
        self.component_jets_in(point)
    }

    /// [`component_jets`](Self::component_jets) in the scalar type `T`.
    pub fn component_jets_in<T: Scalar>(&self, point: &[f64; 4]) -> Result<[Jet2<T>; 10], ExprError> {
        let params = self.parameter_values();
        let mut out = [Jet2::constant(T::zero()); 10];
        for (k, e) in self.components.iter().enumerate() {
            out[k] = e.eval_jet2_in(point, &params)?;
        }
        Ok(out)
    }

    /// Metric matrix at `point` without derivatives.
    pub fn metric_at(&self, point: &[f64; 4]) -> Result<[[f64; 4]; 4], ExprError> {
        let params = self.parameter_values();
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let v = self.component(i, j).eval(point, &params)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }

    /// Axes that no component reads. Every curvature quantity is constant
    /// along such an axis.
    pub fn independent_axes(&self) -> [bool; 4] {
        let mut used = [false; 4];
        for c in &self.components {
            c.root.collect_coords(&mut used);
        }
        used.map(|u| !u)
    }

    /// The metric `factor * g`.
    pub fn scaled(&self, factor: f64) -> MetricSpec {
        let mut out = self.clone();
        for (k, c) in self.components.iter().enumerate() {
            out.components[k] = if c.is_zero_literal() {
                c.clone()
            } else {
                c.scaled(factor)
            };
        }
        out.name = format!("{}*{}", factor, self.name);
        out
    }

    /// Rebinds a parameter by name.
    pub fn with_parameter(mut self, name: &str, value: f64) -> Option<MetricSpec> {
        let slot = self.parameters.iter_mut().find(|(n, _)| n == name)?;
        slot.1 = value;
        Some(self)
    }

    /// Builds a spec from component sources given as `(i, j, source)`.
    pub fn from_sources(
        name: &str,
        coordinates: [&str; 4],
        parameters: &[(&str, f64)],
        sources: &[(usize, usize, &str)],
        domain: [Interval; 4],
        periodic: [bool; 4],
    ) -> Result<MetricSpec, ConfigError> {
        let coordinates = coordinates.map(String::from);
        let names: Vec<String> = parameters.iter().map(|(n, _)| n.to_string()).collect();
        let mut slots: [Option<Expression>; 10] = Default::default();
        for &(i, j, src) in sources {
            let context = format!("g{}{}", i.min(j), i.max(j));
            let e = parse_component(src, &coordinates, &names, &context)?;
            slots[COMPONENT_INDEX[i][j]] = Some(e);
        }
        assemble(
            name.to_string(),
            coordinates,
            parameters.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
            slots,
            domain,
            periodic,
        )
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[coordinates]")?;
        writeln!(f, "{}", self.coordinates.join(" "))?;
        if !self.parameters.is_empty() {
            writeln!(f, "[parameters]")?;
            for (n, v) in &self.parameters {
                writeln!(f, "{n} = {v:?}")?;
            }
        }
        writeln!(f, "[domain]")?;
        for a in 0..4 {
            let d = self.domain[a];
            let suffix = if self.periodic[a] { " periodic" } else { "" };
            writeln!(f, "{} = [{:?}, {:?}]{}", self.coordinates[a], d.lo, d.hi, suffix)?;
        }
        writeln!(f, "[metric]")?;
        for i in 0..4 {
            for j in i..4 {
                let c = self.component(i, j);
                if i == j || !c.is_zero_literal() {
                    writeln!(f, "g{i}{j} = \"{c}\"")?;
                }
            }
        }
        Ok(())
    }
}

fn parse_component(
    src: &str,
    coordinates: &[String; 4],
    parameters: &[String],
    context: &str,
) -> Result<Expression, ConfigError> {
    parse_expression_with(src, coordinates, parameters).map_err(|e| match e {
        ExprError::UnknownIdentifier { name, .. } => ConfigError::UndeclaredParameter {
            name,
            context: context.to_string(),
        },
        other => ConfigError::Expression {
            context: context.to_string(),
            source: other,
        },
    })
}

fn assemble(
    name: String,
    coordinates: [String; 4],
    parameters: Vec<(String, f64)>,
    slots: [Option<Expression>; 10],
    domain: [Interval; 4],
    periodic: [bool; 4],
) -> Result<MetricSpec, ConfigError> {
    let names: Vec<String> = parameters.iter().map(|(n, _)| n.clone()).collect();
    for i in 0..4 {
        if slots[COMPONENT_INDEX[i][i]].is_none() {
            return Err(ConfigError::MissingDiagonal(i));
        }
    }
    let components = slots.map(|s| s.unwrap_or_else(|| Expression::zero(coordinates.clone(), names.clone())));
    Ok(MetricSpec {
        name,
        coordinates,
        parameters,
        components,
        domain,
        periodic,
    })
}

fn valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED_NAMES.contains(&n)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Coordinates,
    Parameters,
    Domain,
    Metric,
}

fn split_assignment(line: &str, lineno: usize) -> Result<(&str, &str), ConfigError> {
    line.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| ConfigError::Syntax {
            line: lineno,
            message: format!("expected 'key = value', got '{line}'"),
        })
}

fn component_key(key: &str) -> Option<(usize, usize)> {
    let b = key.as_bytes();
    if b.len() == 3 && b[0] == b'g' && (b'0'..=b'3').contains(&b[1]) && (b'0'..=b'3').contains(&b[2]) {
        Some(((b[1] - b'0') as usize, (b[2] - b'0') as usize))
    } else {
        None
    }
}

/// Parses the plain-text metric configuration.
pub fn parse_metric_spec(config: &str) -> Result<MetricSpec, ConfigError> {
    parse_metric_spec_named("config", config)
}

pub fn parse_metric_spec_named(name: &str, config: &str) -> Result<MetricSpec, ConfigError> {
    let mut section = Section::None;
    let mut coordinates: Option<[String; 4]> = None;
    let mut parameters: Vec<(String, f64)> = Vec::new();
    let mut domain_lines: Vec<(usize, String, String)> = Vec::new();
    let mut metric_lines: Vec<(usize, (usize, usize), String)> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw) in config.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = match &line[1..line.len() - 1] {
                "coordinates" => Section::Coordinates,
                "parameters" => Section::Parameters,
                "domain" => Section::Domain,
                "metric" => Section::Metric,
                other => {
                    return Err(ConfigError::Syntax {
                        line: lineno,
                        message: format!("unknown section [{other}]"),
                    })
                }
            };
            continue;
        }
        match section {
            Section::None => {
                return Err(ConfigError::Syntax {
                    line: lineno,
                    message: "content before the first section".into(),
                })
            }
            Section::Coordinates => {
                if coordinates.is_some() {
                    return Err(ConfigError::DuplicateKey {
                        key: "coordinates".into(),
                        line: lineno,
                    });
                }
                let names: Vec<&str> = line
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .collect();
                if names.len() != 4 {
                    return Err(ConfigError::Syntax {
                        line: lineno,
                        message: format!("expected 4 coordinate names, got {}", names.len()),
                    });
                }
                for n in &names {
                    if !valid_name(n) {
                        return Err(ConfigError::InvalidName(n.to_string()));
                    }
                }
                coordinates = Some([0, 1, 2, 3].map(|i| names[i].to_string()));
            }
            Section::Parameters => {
                let (k, v) = split_assignment(line, lineno)?;
                if !valid_name(k) {
                    return Err(ConfigError::InvalidName(k.to_string()));
                }
                if parameters.iter().any(|(n, _)| n == k) {
                    return Err(ConfigError::DuplicateKey {
                        key: k.to_string(),
                        line: lineno,
                    });
                }
                let value = v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                    ConfigError::Syntax {
                        line: lineno,
                        message: format!("parameter '{k}' needs a finite numeric value"),
                    }
                })?;
                parameters.push((k.to_string(), value));
            }
            Section::Domain => {
                let (k, v) = split_assignment(line, lineno)?;
                if seen.insert(format!("domain:{k}"), lineno).is_some() {
                    return Err(ConfigError::DuplicateKey {
                        key: k.to_string(),
                        line: lineno,
                    });
                }
                domain_lines.push((lineno, k.to_string(), v.to_string()));
            }
            Section::Metric => {
                let (k, v) = split_assignment(line, lineno)?;
                let (i, j) = component_key(k).ok_or_else(|| ConfigError::Syntax {
                    line: lineno,
                    message: format!("expected a component key g<i><j>, got '{k}'"),
                })?;
                let canonical = format!("g{}{}", i.min(j), i.max(j));
                if seen.insert(canonical.clone(), lineno).is_some() {
                    return Err(ConfigError::DuplicateKey {
                        key: k.to_string(),
                        line: lineno,
                    });
                }
                let src = v
                    .strip_prefix('"')
                    .and_then(|s| s.strip_suffix('"'))
                    .ok_or_else(|| ConfigError::Syntax {
                        line: lineno,
                        message: format!("expression for {k} must be double-quoted"),
                    })?;
                metric_lines.push((lineno, (i.min(j), i.max(j)), src.to_string()));
            }
        }
    }

    let coordinates = coordinates.unwrap_or(DEFAULT_COORDINATES.map(String::from));
    for (n, _) in &parameters {
        if coordinates.contains(n) {
            return Err(ConfigError::InvalidName(n.clone()));
        }
    }
    let names: Vec<String> = parameters.iter().map(|(n, _)| n.clone()).collect();
    let values: Vec<f64> = parameters.iter().map(|(_, v)| *v).collect();

    let mut domain: [Option<Interval>; 4] = [None; 4];
    let mut periodic = [false; 4];
    for (lineno, key, value) in &domain_lines {
        let axis = coordinates
            .iter()
            .position(|c| c == key)
            .ok_or_else(|| ConfigError::Syntax {
                line: *lineno,
                message: format!("unknown coordinate '{key}' in [domain]"),
            })?;
        let (interval, is_periodic) = parse_interval(value, *lineno, &coordinates, &names, &values)?;
        domain[axis] = Some(interval);
        periodic[axis] = is_periodic;
    }
    let mut dom = [Interval::new(0.0, 0.0); 4];
    for a in 0..4 {
        dom[a] = domain[a].ok_or_else(|| ConfigError::MissingDomain(coordinates[a].clone()))?;
    }

    let mut slots: [Option<Expression>; 10] = Default::default();
    for (_, (i, j), src) in &metric_lines {
        let context = format!("g{i}{j}");
        slots[COMPONENT_INDEX[*i][*j]] = Some(parse_component(src, &coordinates, &names, &context)?);
    }
    assemble(name.to_string(), coordinates, parameters, slots, dom, periodic)
}

fn parse_interval(
    text: &str,
    line: usize,
    coordinates: &[String; 4],
    names: &[String],
    values: &[f64],
) -> Result<(Interval, bool), ConfigError> {
    let malformed = || ConfigError::MalformedInterval {
        line,
        text: text.to_string(),
    };
    let open = text.find('[').ok_or_else(malformed)?;
    let close = text.rfind(']').ok_or_else(malformed)?;
    if open != 0 || close < open {
        return Err(malformed());
    }
    let inner = &text[1..close];
    let rest = text[close + 1..].trim();
    let periodic = match rest {
        "" => false,
        "periodic" => true,
        _ => return Err(malformed()),
    };
    let (lo, hi) = inner.split_once(',').ok_or_else(malformed)?;
    let bound = |s: &str| -> Result<f64, ConfigError> {
        let e = parse_expression_with(s.trim(), coordinates, names).map_err(|_| malformed())?;
        if e.root.depends_on_coords() {
            return Err(malformed());
        }
        e.eval(&[0.0; 4], values).map_err(|_| malformed())
    };
    let (lo, hi) = (bound(lo)?, bound(hi)?);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(malformed());
    }
    Ok((Interval::new(lo, hi), periodic))
}
