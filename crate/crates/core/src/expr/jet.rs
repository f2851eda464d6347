//! Second-order jets in four variables.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to the four chart coordinates. Arithmetic on jets is the truncated
//! Taylor arithmetic, so evaluating an expression tree on jets seeded with
//! [`Jet2::variable`] yields exact first and second partial derivatives up to
//! rounding. The scalar type is `f64` by default; [`Dd`](crate::scalar::Dd)
//! gives double-double jets.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Position of `(i, j)` in the packed upper triangle, for either order.
pub const HESS_INDEX: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 4, 5, 6], [2, 5, 7, 8], [3, 6, 8, 9]];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T = f64> {
    pub value: T,
    pub grad: [T; 4],
    /// Upper triangle of the symmetric Hessian, row-major: (00,01,02,03,11,12,13,22,23,33).
    pub hess: [T; 10],
}

impl<T: Scalar> Jet2<T> {
    pub fn constant(value: T) -> Self {
        Jet2 {
            value,
            grad: [T::zero(); 4],
            hess: [T::zero(); 10],
        }
    }

    /// The coordinate function `x_axis` evaluated at `value`.
    pub fn variable(axis: usize, value: T) -> Self {
        let mut j = Self::constant(value);
        j.grad[axis] = T::one();
        j
    }

    #[inline]
    pub fn second(&self, i: usize, j: usize) -> T {
        self.hess[HESS_INDEX[i][j]]
    }

    /// Full symmetric Hessian.
    pub fn hessian(&self) -> [[T; 4]; 4] {
        let mut h = [[T::zero(); 4]; 4];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.second(i, j);
            }
        }
        h
    }

    pub fn is_constant(&self) -> bool {
        let zero = T::zero();
        self.grad.iter().all(|&g| g == zero) && self.hess.iter().all(|&h| h == zero)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite()) && self.hess.iter().all(|h| h.is_finite())
    }

    /// Rounds every entry to `f64`.
    pub fn to_f64(&self) -> Jet2<f64> {
        Jet2 {
            value: self.value.to_f64(),
            grad: self.grad.map(T::to_f64),
            hess: self.hess.map(T::to_f64),
        }
    }

    /// Compose with a scalar function `f` given `f(u)`, `f'(u)`, `f''(u)` at the
    /// current value `u`.
    pub fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let mut out = Jet2::constant(f0);
        for i in 0..4 {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..4 {
            for j in i..4 {
                let k = HESS_INDEX[i][j];
                out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let inv = T::one() / self.value;
        self.chain(inv, -inv * inv, T::from_f64(2.0) * inv * inv * inv)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Self {
        let t = self.value.tan();
        let sec2 = T::one() + t * t;
        self.chain(t, sec2, T::from_f64(2.0) * t * sec2)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let d = T::one() - t * t;
        self.chain(t, d, T::from_f64(-2.0) * t * d)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    /// Natural logarithm; caller guarantees a positive value.
    pub fn ln(&self) -> Self {
        let u = self.value;
        self.chain(u.ln(), T::one() / u, -(T::one() / (u * u)))
    }

    /// Square root; caller guarantees a non-negative value.
    pub fn sqrt(&self) -> Self {
        let r = self.value.sqrt();
        self.chain(r, T::from_f64(0.5) / r, T::from_f64(-0.25) / (r * self.value))
    }

    pub fn abs(&self) -> Self {
        let sign = if self.value < T::zero() { -1.0 } else { 1.0 };
        self.chain(self.value.abs(), T::from_f64(sign), T::zero())
    }

    /// `self^n` for an integer exponent.
    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Jet2::constant(T::one()),
            1 => *self,
            _ => {
                let u = self.value;
                let nf = T::from_f64(f64::from(n));
                let f2 = if n == 2 {
                    T::from_f64(2.0)
                } else {
                    nf * (nf - T::one()) * u.powi(n - 2)
                };
                self.chain(u.powi(n), nf * u.powi(n - 1), f2)
            }
        }
    }

    /// `self^c` for a real constant exponent; caller guarantees a valid base.
    pub fn powf(&self, c: T) -> Self {
        let u = self.value;
        let one = T::one();
        self.chain(u.powf(c), c * u.powf(c - one), c * (c - one) * u.powf(c - one - one))
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Jet2<T>;
    fn add(self, rhs: Jet2<T>) -> Jet2<T> {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..4 {
            out.grad[i] += rhs.grad[i];
        }
        for k in 0..10 {
            out.hess[k] += rhs.hess[k];
        }
        out
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Jet2<T>;
    fn sub(self, rhs: Jet2<T>) -> Jet2<T> {
        let mut out = self;
        out.value -= rhs.value;
        for i in 0..4 {
            out.grad[i] -= rhs.grad[i];
        }
        for k in 0..10 {
            out.hess[k] -= rhs.hess[k];
        }
        out
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Jet2<T>;
    fn neg(self) -> Jet2<T> {
        let mut out = self;
        out.value = -out.value;
        out.grad.iter_mut().for_each(|g| *g = -*g);
        out.hess.iter_mut().for_each(|h| *h = -*h);
        out
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Jet2<T>;
    fn mul(self, rhs: Jet2<T>) -> Jet2<T> {
        let (a, b) = (self, rhs);
        let mut out = Jet2::constant(a.value * b.value);
        for i in 0..4 {
            out.grad[i] = a.grad[i] * b.value + b.grad[i] * a.value;
        }
        for i in 0..4 {
            for j in i..4 {
                let k = HESS_INDEX[i][j];
                out.hess[k] = a.hess[k] * b.value + b.hess[k] * a.value + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
            }
        }
        out
    }
}

impl<T: Scalar> Div for Jet2<T> {
    type Output = Jet2<T>;
    fn div(self, rhs: Jet2<T>) -> Jet2<T> {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_coordinates() {
        let x = Jet2::variable(0, 2.0);
        let y = Jet2::variable(3, 5.0);
        let p = x * y;
        assert_eq!(p.value, 10.0);
        assert_eq!(p.grad, [5.0, 0.0, 0.0, 2.0]);
        assert_eq!(p.second(0, 3), 1.0);
        assert_eq!(p.second(3, 0), 1.0);
        assert_eq!(p.second(0, 0), 0.0);
    }

    #[test]
    fn powi_at_zero_base_is_finite() {
        let x = Jet2::variable(1, 0.0);
        let sq = x.powi(2);
        assert_eq!(sq.value, 0.0);
        assert_eq!(sq.second(1, 1), 2.0);
        let cube = x.powi(3);
        assert!(cube.is_finite());
        assert_eq!(cube.second(1, 1), 0.0);
    }

    #[test]
    fn quotient_matches_closed_form() {
        // f = 1/x at x = 2: f' = -1/4, f'' = 1/4
        let x = Jet2::variable(2, 2.0);
        let f = Jet2::constant(1.0) / x;
        assert!((f.grad[2] + 0.25).abs() < 1e-15);
        assert!((f.second(2, 2) - 0.25).abs() < 1e-15);
    }
}
