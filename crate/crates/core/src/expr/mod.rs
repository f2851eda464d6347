//! Closed-form expressions over chart coordinates.
//!
//! Metric components are written in a small arithmetic language (see
//! [`parse_expression`]) and evaluated either to plain values or to
//! second-order jets carrying exact first and second partial derivatives.

mod jet;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

pub use jet::{Jet2, HESS_INDEX};
pub use parse::{parse_expression, parse_expression_with};

/// Default coordinate names.
pub const DEFAULT_COORDINATES: [&str; 4] = ["x0", "x1", "x2", "x3"];

/// Identifiers that cannot be used as coordinate or parameter names.
pub const RESERVED_NAMES: [&str; 12] = [
    "pi", "e", "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite result while evaluating {0}")]
    NonFinite(String),
    #[error("parameter index {0} is not bound")]
    UnboundParameter(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree. Coordinates and parameters are resolved to indices at
/// parse time.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    E,
    Coord(usize),
    Param(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Right operand is the exponent.
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn depends_on_coords(&self) -> bool {
        match self {
            Expr::Coord(_) => true,
            Expr::Num(_) | Expr::Pi | Expr::E | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_coords(),
            Expr::Binary(_, a, b) | Expr::Pow(a, b) => a.depends_on_coords() || b.depends_on_coords(),
        }
    }

    /// Marks every coordinate the expression reads.
    pub fn collect_coords(&self, used: &mut [bool; 4]) {
        match self {
            Expr::Coord(i) => used[*i] = true,
            Expr::Num(_) | Expr::Pi | Expr::E | Expr::Param(_) => {}
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_coords(used),
            Expr::Binary(_, a, b) | Expr::Pow(a, b) => {
                a.collect_coords(used);
                b.collect_coords(used);
            }
        }
    }

    fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }
}

/// A parsed expression together with the names needed to print it back.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    pub root: Expr,
    pub coordinates: [String; 4],
    pub parameters: Vec<String>,
}

impl Expression {
    pub fn zero(coordinates: [String; 4], parameters: Vec<String>) -> Self {
        Expression {
            root: Expr::Num(0.0),
            coordinates,
            parameters,
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        self.root.is_zero_literal()
    }

    /// `factor * self`, used for constant rescaling of a metric.
    pub fn scaled(&self, factor: f64) -> Self {
        Expression {
            root: Expr::Binary(
                BinOp::Mul,
                Box::new(Expr::Num(factor)),
                Box::new(self.root.clone()),
            ),
            coordinates: self.coordinates.clone(),
            parameters: self.parameters.clone(),
        }
    }

    /// Plain value at `point`.
    pub fn eval(&self, point: &[f64; 4], params: &[f64]) -> Result<f64, ExprError> {
        eval_value(&self.root, point, params)
    }

    /// Value, gradient and Hessian at `point`.
    pub fn eval_jet2(&self, point: &[f64; 4], params: &[f64]) -> Result<Jet2, ExprError> {
        self.eval_jet2_in(point, params)
    }

    /// [`eval_jet2`](Self::eval_jet2) in the scalar type `T`.
    pub fn eval_jet2_in<T: Scalar>(&self, point: &[f64; 4], params: &[f64]) -> Result<Jet2<T>, ExprError> {
        let j = eval_jet::<T>(&self.root, point, params)?;
        if !j.is_finite() {
            return Err(ExprError::NonFinite(self.to_string()));
        }
        Ok(j)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(&self.root, self, f)
    }
}

// Every printed form is an atom of the grammar, so the output reparses to the
// same tree.
fn write_expr(e: &Expr, names: &Expression, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v:?}"),
        Expr::Pi => f.write_str("pi"),
        Expr::E => f.write_str("e"),
        Expr::Coord(i) => f.write_str(&names.coordinates[*i]),
        Expr::Param(i) => f.write_str(&names.parameters[*i]),
        Expr::Neg(a) => {
            f.write_str("(-")?;
            write_expr(a, names, f)?;
            f.write_str(")")
        }
        Expr::Binary(op, a, b) => {
            f.write_str("(")?;
            write_expr(a, names, f)?;
            write!(f, " {} ", op.symbol())?;
            write_expr(b, names, f)?;
            f.write_str(")")
        }
        Expr::Pow(a, b) => {
            f.write_str("(")?;
            write_expr(a, names, f)?;
            f.write_str("^")?;
            write_expr(b, names, f)?;
            f.write_str(")")
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, names, f)?;
            f.write_str(")")
        }
    }
}

fn integer_exponent(c: f64) -> Option<i32> {
    if c.fract() == 0.0 && c.abs() <= f64::from(i32::MAX) {
        Some(c as i32)
    } else {
        None
    }
}

fn param(params: &[f64], i: usize) -> Result<f64, ExprError> {
    params.get(i).copied().ok_or(ExprError::UnboundParameter(i))
}

fn eval_value(e: &Expr, x: &[f64; 4], params: &[f64]) -> Result<f64, ExprError> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Pi => std::f64::consts::PI,
        Expr::E => std::f64::consts::E,
        Expr::Coord(i) => x[*i],
        Expr::Param(i) => param(params, *i)?,
        Expr::Neg(a) => -eval_value(a, x, params)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_value(a, x, params)?, eval_value(b, x, params)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(ExprError::Domain("division by zero".into()));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, exponent) => {
            let u = eval_value(base, x, params)?;
            let c = eval_value(exponent, x, params)?;
            if exponent.depends_on_coords() {
                if u <= 0.0 {
                    return Err(ExprError::Domain(format!(
                        "variable exponent requires a positive base, got {u}"
                    )));
                }
                u.powf(c)
            } else if let Some(n) = integer_exponent(c) {
                if u == 0.0 && n < 0 {
                    return Err(ExprError::Domain("division by zero in negative power".into()));
                }
                u.powi(n)
            } else {
                if u < 0.0 {
                    return Err(ExprError::Domain(format!(
                        "non-integer power {c} of negative base {u}"
                    )));
                }
                u.powf(c)
            }
        }
        Expr::Call(func, a) => {
            let u = eval_value(a, x, params)?;
            match func {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Tan => u.tan(),
                Func::Sinh => u.sinh(),
                Func::Cosh => u.cosh(),
                Func::Tanh => u.tanh(),
                Func::Exp => u.exp(),
                Func::Log => {
                    if u <= 0.0 {
                        return Err(ExprError::Domain(format!("log of non-positive value {u}")));
                    }
                    u.ln()
                }
                Func::Sqrt => {
                    if u < 0.0 {
                        return Err(ExprError::Domain(format!("sqrt of negative value {u}")));
                    }
                    u.sqrt()
                }
                Func::Abs => u.abs(),
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::NonFinite(format!("{e:?}")))
    }
}

fn eval_jet<T: Scalar>(e: &Expr, x: &[f64; 4], params: &[f64]) -> Result<Jet2<T>, ExprError> {
    Ok(match e {
        Expr::Num(v) => Jet2::constant(T::from_f64(*v)),
        Expr::Pi => Jet2::constant(T::pi()),
        Expr::E => Jet2::constant(T::e()),
        Expr::Coord(i) => Jet2::variable(*i, T::from_f64(x[*i])),
        Expr::Param(i) => Jet2::constant(T::from_f64(param(params, *i)?)),
        Expr::Neg(a) => -eval_jet::<T>(a, x, params)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_jet::<T>(a, x, params)?, eval_jet::<T>(b, x, params)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value.to_f64() == 0.0 {
                        return Err(ExprError::Domain("division by zero".into()));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, exponent) => {
            let u = eval_jet::<T>(base, x, params)?;
            if exponent.depends_on_coords() {
                if u.value.to_f64() <= 0.0 {
                    return Err(ExprError::Domain(format!(
                        "variable exponent requires a positive base, got {}",
                        u.value.to_f64()
                    )));
                }
                let v = eval_jet::<T>(exponent, x, params)?;
                (v * u.ln()).exp()
            } else {
                let c = eval_value(exponent, x, params)?;
                let cs = eval_jet::<T>(exponent, x, params)?.value;
                if let Some(n) = integer_exponent(c) {
                    if u.value.to_f64() == 0.0 && n < 0 {
                        return Err(ExprError::Domain("division by zero in negative power".into()));
                    }
                    u.powi(n)
                } else {
                    if u.value.to_f64() < 0.0 {
                        return Err(ExprError::Domain(format!(
                            "non-integer power {c} of negative base {}",
                            u.value.to_f64()
                        )));
                    }
                    u.powf(cs)
                }
            }
        }
        Expr::Call(func, a) => {
            let u = eval_jet::<T>(a, x, params)?;
            match func {
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
                Func::Tan => u.tan(),
                Func::Sinh => u.sinh(),
                Func::Cosh => u.cosh(),
                Func::Tanh => u.tanh(),
                Func::Exp => u.exp(),
                Func::Log => {
                    if u.value.to_f64() <= 0.0 {
                        return Err(ExprError::Domain(format!(
                            "log of non-positive value {}",
                            u.value.to_f64()
                        )));
                    }
                    u.ln()
                }
                Func::Sqrt => {
                    if u.value.to_f64() < 0.0 {
                        return Err(ExprError::Domain(format!(
                            "sqrt of negative value {}",
                            u.value.to_f64()
                        )));
                    }
                    u.sqrt()
                }
                Func::Abs => u.abs(),
            }
        }
    })
}
