//! Scalar types for jet evaluation and curvature assembly.
//!
//! [`Dd`] is a double-double number (an unevaluated sum `hi + lo` of two
//! `f64`) with about 32 significant digits. Curvature in a chart near its
//! singular set is a small difference of large terms; assembling it in
//! double-double keeps the rounded `f64` result accurate.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Arithmetic and elementary functions shared by `f64` and [`Dd`].
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn pi() -> Self;
    fn e() -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, c: Self) -> Self;
    fn is_finite(self) -> bool;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn e() -> Self {
        std::f64::consts::E
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, c: Self) -> Self {
        f64::powf(self, c)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub const PI: Dd = Dd::new(3.141_592_653_589_793, 1.224_646_799_147_353_2e-16);
    pub const FRAC_PI_2: Dd = Dd::new(1.570_796_326_794_896_6, 6.123_233_995_736_766e-17);
    pub const E: Dd = Dd::new(2.718_281_828_459_045, 1.445_646_891_729_250_2e-16);
    pub const LN_2: Dd = Dd::new(0.693_147_180_559_945_3, 2.319_046_813_846_299_6e-17);

    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    fn ldexp(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd::new(self.hi * f, self.lo * f)
    }

    fn sqr(self) -> Dd {
        self * self
    }

    fn recip(self) -> Dd {
        Dd::from_f64(1.0) / self
    }

    /// Taylor sums of sine and cosine for `|r| ≤ π/4`.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r.sqr();
        let mut term = r;
        let mut sin = r;
        let mut n = 1.0;
        while term.hi.abs() > 1e-34 {
            term = -(term * r2) / Dd::from((n + 1.0) * (n + 2.0));
            sin += term;
            n += 2.0;
        }
        let mut term = Dd::from_f64(1.0);
        let mut cos = term;
        let mut n = 0.0;
        while term.hi.abs() > 1e-34 {
            term = -(term * r2) / Dd::from((n + 1.0) * (n + 2.0));
            cos += term;
            n += 2.0;
        }
        (sin, cos)
    }

    /// `e^x − 1` by Taylor series for small `|x|`.
    fn expm1_small(x: Dd) -> Dd {
        let mut term = x;
        let mut sum = x;
        let mut n = 1.0;
        while term.hi.abs() > 1e-34 * sum.hi.abs().max(1e-300) {
            n += 1.0;
            term = (term * x) / Dd::from(n);
            sum += term;
        }
        sum
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd::new(v, 0.0)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

impl AddAssign for Dd {
    #[inline]
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    #[inline]
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl Scalar for Dd {
    fn from_f64(v: f64) -> Self {
        Dd::from(v)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn pi() -> Self {
        Dd::PI
    }

    fn e() -> Self {
        Dd::E
    }

    fn sin_cos(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            return (Dd::from(f64::NAN), Dd::from(f64::NAN));
        }
        let k = (self.hi / Dd::FRAC_PI_2.hi).round();
        let r = self - Dd::FRAC_PI_2.mul_f64(k);
        let (s, c) = Dd::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn tan(self) -> Self {
        let (s, c) = self.sin_cos();
        s / c
    }

    fn sinh(self) -> Self {
        if self.hi.abs() < 0.5 {
            let e = Dd::expm1_small(self);
            // sinh = (u − 1/(1+u) + 1)/2 with u = e^x − 1
            let one = Dd::from(1.0);
            (e + e / (one + e)).ldexp(-1)
        } else {
            let e = self.exp();
            (e - e.recip()).ldexp(-1)
        }
    }

    fn cosh(self) -> Self {
        let e = self.exp();
        (e + e.recip()).ldexp(-1)
    }

    fn tanh(self) -> Self {
        if self.hi.abs() > 40.0 {
            return Dd::from(self.hi.signum());
        }
        // tanh x = u/(u + 2) with u = e^{2x} − 1
        let u = if self.hi.abs() < 0.25 {
            Dd::expm1_small(self.ldexp(1))
        } else {
            self.ldexp(1).exp() - Dd::from(1.0)
        };
        u / (u + Dd::from(2.0))
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::from(0.0);
        }
        if self.hi.is_nan() {
            return self;
        }
        let k = (self.hi / Dd::LN_2.hi).round();
        let r = (self - Dd::LN_2.mul_f64(k)).ldexp(-10);
        let mut e = Dd::expm1_small(r);
        // (1 + e)^2 − 1 = e (2 + e), applied ten times
        for _ in 0..10 {
            e = e * (e + Dd::from(2.0));
        }
        (e + Dd::from(1.0)).ldexp(k as i32)
    }

    fn ln(self) -> Self {
        if self.hi == 0.0 {
            return Dd::from(f64::NEG_INFINITY);
        }
        if !(self.hi > 0.0) || !self.hi.is_finite() {
            return Dd::from(self.hi.ln());
        }
        // one Newton step on e^y = x doubles the digits of ln(hi)
        let y = Dd::from(self.hi.ln());
        let y = y + self * (-y).exp() - Dd::from(1.0);
        y + self * (-y).exp() - Dd::from(1.0)
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::from(self.hi.sqrt());
        }
        let y = self.hi.sqrt();
        let ys = Dd::from(y);
        let r = self - ys.sqr();
        ys + Dd::from(r.hi / (2.0 * y))
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut m = n.unsigned_abs();
        let mut acc = Dd::from(1.0);
        while m > 0 {
            if m & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            m >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }

    fn powf(self, c: Self) -> Self {
        if self.hi == 0.0 {
            return Dd::from(self.hi.powf(c.hi));
        }
        (c * self.ln()).exp()
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, want_hi: f64, want_lo: f64, tol: f64) {
        let d = (a - Dd::new(want_hi, want_lo)).to_f64().abs();
        assert!(d <= tol * want_hi.abs().max(1e-300), "{a:?} vs {want_hi} + {want_lo}: {d:e}");
    }

    #[test]
    fn pi_squared_beyond_f64() {
        // π² = 9.869604401089358618834490999876...
        close(Dd::PI * Dd::PI, 9.869_604_401_089_358, 6.265_295_508_739_711e-16, 1e-30);
    }

    #[test]
    fn exp_and_log_invert() {
        for x in [-20.0, -1.3, -1e-5, 0.0, 0.2, 1.0, 3.7, 50.0] {
            let y = Dd::from(x).exp().ln();
            assert!((y - Dd::from(x)).to_f64().abs() <= 1e-30 * x.abs().max(1.0), "{x}");
        }
        // e = exp(1)
        close(Dd::from(1.0).exp(), Dd::E.hi, Dd::E.lo, 1e-31);
        close(Dd::from(2.0).ln(), Dd::LN_2.hi, Dd::LN_2.lo, 1e-31);
    }

    #[test]
    fn trig_identities() {
        for x in [-7.0, -1.0, 1e-8, 0.5, 1.5707963, 2.0, 3.141, 12.5] {
            let (s, c) = Dd::from(x).sin_cos();
            let one = s * s + c * c - Dd::from(1.0);
            assert!(one.to_f64().abs() < 1e-30, "{x}: {one:?}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
        }
        // sin(π/6) = 1/2 to double-double accuracy
        let (s, _) = (Dd::PI / Dd::from(6.0)).sin_cos();
        assert!((s - Dd::from(0.5)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn hyperbolic_identities() {
        for x in [-3.0, -0.3, 1e-9, 0.1, 0.7, 5.0] {
            let d = Dd::from(x);
            let (s, c) = (d.sinh(), d.cosh());
            let id = c * c - s * s - Dd::from(1.0);
            assert!(id.to_f64().abs() < 1e-29 * c.to_f64().powi(2), "{x}");
            let t = d.tanh() - s / c;
            assert!(t.to_f64().abs() < 1e-30, "{x}");
            assert!((s.to_f64() - x.sinh()).abs() <= 1e-15 * x.sinh().abs());
        }
    }

    #[test]
    fn sqrt_and_powers() {
        let two = Dd::from(2.0);
        let r = two.sqrt();
        assert!((r * r - two).to_f64().abs() < 1e-31);
        assert_eq!(Dd::from(3.0).powi(4), Dd::from(81.0));
        let q = Dd::from(3.0).powi(-2) * Dd::from(9.0) - Dd::from(1.0);
        assert!(q.to_f64().abs() < 1e-31);
        let p = Dd::from(2.0).powf(Dd::from(0.5)) - r;
        assert!(p.to_f64().abs() < 1e-30);
    }

    #[test]
    fn division_is_double_double_accurate() {
        let third = Dd::from(1.0) / Dd::from(3.0);
        assert!((third * Dd::from(3.0) - Dd::from(1.0)).to_f64().abs() < 1e-31);
    }
}
