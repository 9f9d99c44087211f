//! Thin arbitrary-precision real type on top of `astro-float`.
//!
//! Every value carries its own binary precision; binary operations round to
//! the larger of the two.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::linalg::Rat;

const RM: RoundingMode = RoundingMode::ToEven;

/// Euler-Mascheroni constant to 115 significant digits (mpmath `euler`,
/// evaluated at 130 digits).
pub const EULER_GAMMA: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495146314472498071";

/// zeta(2) to 115 digits, same source. Only used to cross-check `pi^2/6`.
pub const ZETA2: &str = "1.644934066848226436472415166646025189218949901206798437735558229370007470403200873833628900619758705304004318962337";

/// Digits available in the stored constants.
pub const CONSTANT_DIGITS: u32 = 110;

/// Binary precision with a few guard words for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    let bits = (digits as f64 * core::f64::consts::LOG2_10) as usize + 64;
    bits.div_ceil(64) * 64
}

fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    // tracked separately: the backend reports no precision for zero
    p: usize,
}

impl Real {
    fn wrap(v: BigFloat, p: usize) -> Self {
        debug_assert!(!v.is_nan(), "NaN in high-precision arithmetic");
        Real { v, p }
    }

    pub fn zero(p: usize) -> Self {
        Real { v: BigFloat::from_i64(0, p), p }
    }

    pub fn one(p: usize) -> Self {
        Real { v: BigFloat::from_i64(1, p), p }
    }

    pub fn from_i64(x: i64, p: usize) -> Self {
        Real { v: BigFloat::from_i64(x, p), p }
    }

    pub fn from_f64(x: f64, p: usize) -> Self {
        Real { v: BigFloat::from_f64(x, p), p }
    }

    pub fn from_rat(q: &Rat, p: usize) -> Self {
        let n = Self::parse_decimal(&alloc::format!("{}", q.numer()), p);
        let d = Self::parse_decimal(&alloc::format!("{}", q.denom()), p);
        &n / &d
    }

    /// Decimal literal such as `-1.25e-3`.
    pub fn parse_decimal(s: &str, p: usize) -> Self {
        let v = BigFloat::parse(s, Radix::Dec, p, RM, &mut consts());
        assert!(!v.is_nan(), "bad decimal literal {s}");
        Real { v, p }
    }

    pub fn pi(p: usize) -> Self {
        Real { v: consts().pi(p, RM), p }
    }

    /// Euler-Mascheroni constant. Panics beyond the stored digits.
    pub fn euler_gamma(p: usize) -> Self {
        assert!(p <= bits_for_digits(CONSTANT_DIGITS), "precision exceeds stored constant");
        Self::parse_decimal(EULER_GAMMA, p)
    }

    /// `zeta(2) = pi^2 / 6`.
    pub fn zeta2(p: usize) -> Self {
        let pi = Self::pi(p + 64);
        let z = &(&pi * &pi) / &Self::from_i64(6, p + 64);
        z.with_precision(p)
    }

    pub fn precision(&self) -> usize {
        self.p
    }

    pub fn with_precision(&self, p: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(p, RM).expect("precision change");
        Real { v, p }
    }

    fn p2(&self, o: &Real) -> usize {
        self.precision().max(o.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn abs(&self) -> Self {
        Real { v: self.v.abs(), p: self.p }
    }

    pub fn exp(&self) -> Self {
        Self::wrap(self.v.exp(self.precision(), RM, &mut consts()), self.p)
    }

    /// Natural log; panics on nonpositive input.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "log of nonpositive value");
        Self::wrap(self.v.ln(self.precision(), RM, &mut consts()), self.p)
    }

    pub fn sqrt(&self) -> Self {
        Self::wrap(self.v.sqrt(self.precision(), RM), self.p)
    }

    pub fn powi(&self, n: u32) -> Self {
        Self::wrap(self.v.powi(n as usize, self.precision(), RM), self.p)
    }

    /// `self^e` for positive `self`.
    pub fn powf(&self, e: &Real) -> Self {
        (&self.ln() * e).exp()
    }

    pub fn cos(&self) -> Self {
        Self::wrap(self.v.cos(self.precision(), RM, &mut consts()), self.p)
    }

    pub fn sin(&self) -> Self {
        Self::wrap(self.v.sin(self.precision(), RM, &mut consts()), self.p)
    }

    pub fn max(&self, o: &Real) -> Real {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    /// Binary exponent `e` with `2^{e-1} <= |x| < 2^e`; `None` for zero.
    pub fn binary_exponent(&self) -> Option<i64> {
        if self.v.is_zero() {
            None
        } else {
            self.v.exponent().map(|e| e as i64)
        }
    }

    /// Decimal log of `|x|` accurate to about 1e-15, valid for any exponent.
    pub fn log10_abs(&self) -> f64 {
        let Some(e) = self.binary_exponent() else {
            return f64::NEG_INFINITY;
        };
        let mut m = self.v.abs();
        m.set_exponent(0);
        let frac = Real { v: m, p: self.p }.to_f64();
        (libm::log2(frac) + e as f64) * core::f64::consts::LOG10_2
    }

    /// Nearest `f64` (saturating to infinity when out of range).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        match self.binary_exponent() {
            Some(e) if e > 1025 => {
                return if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
            }
            Some(e) if e < -1080 => return 0.0,
            _ => {}
        }
        let s = self.to_decimal_string();
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Full decimal expansion produced by the backend, e.g. `1.5e+0`.
    pub fn to_decimal_string(&self) -> String {
        self.v.format(Radix::Dec, RM, &mut consts()).unwrap_or_else(|_| "NaN".into())
    }

    /// Scientific notation with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let s = self.to_decimal_string();
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let (sign, mant) = match mant.strip_prefix('-') {
            Some(m) => ("-", m),
            None => ("", mant),
        };
        let mut digs: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
        // backend output is normalized as d.ddd
        let mut e: i64 = exp.trim_start_matches('+').parse().unwrap_or(0);
        let lead = digs.find(|c| c != '0');
        let Some(lead) = lead else {
            return "0".into();
        };
        e -= lead as i64;
        digs.drain(..lead);
        let keep = digits.max(1);
        let rounded = round_digits(&digs, keep);
        let (rounded, bump) = rounded;
        e += bump;
        let (a, b) = rounded.split_at(1);
        if b.is_empty() {
            alloc::format!("{sign}{a}e{e}")
        } else {
            alloc::format!("{sign}{a}.{b}e{e}")
        }
    }
}

/// Round a digit string to `keep` digits; returns the digits and an exponent
/// bump when rounding carries into a new leading digit.
fn round_digits(d: &str, keep: usize) -> (String, i64) {
    let bytes = d.as_bytes();
    if bytes.len() <= keep {
        let mut s = String::from(d);
        while s.len() < keep {
            s.push('0');
        }
        return (s, 0);
    }
    let mut v: alloc::vec::Vec<u8> = bytes[..keep].iter().map(|c| c - b'0').collect();
    if bytes[keep] >= b'5' {
        let mut i = keep;
        loop {
            if i == 0 {
                v.insert(0, 1);
                v.pop();
                let s = v.iter().map(|&x| (x + b'0') as char).collect();
                return (s, 1);
            }
            i -= 1;
            if v[i] == 9 {
                v[i] = 0;
            } else {
                v[i] += 1;
                break;
            }
        }
    }
    (v.iter().map(|&x| (x + b'0') as char).collect(), 0)
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.partial_cmp(&o.v)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        f.write_str(&self.to_sci(d))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $call:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                let p = self.p2(o);
                Real::wrap(self.v.$call(&o.v, p, RM), p)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                (&self).$m(&o)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), p: self.p }
    }
}

/// Complex number with `Real` parts, enough for roots of unity and mirror
/// critical values at high precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CReal {
    pub re: Real,
    pub im: Real,
}

impl CReal {
    pub fn new(re: Real, im: Real) -> Self {
        CReal { re, im }
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &Real) -> Self {
        CReal { re: theta.cos(), im: theta.sin() }
    }

    pub fn mul(&self, o: &CReal) -> CReal {
        CReal {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn add(&self, o: &CReal) -> CReal {
        CReal { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn scale(&self, s: &Real) -> CReal {
        CReal { re: &self.re * s, im: &self.im * s }
    }

    pub fn inv(&self) -> CReal {
        let d = &(&self.re * &self.re) + &(&self.im * &self.im);
        CReal { re: &self.re / &d, im: -(&self.im / &d) }
    }

    pub fn norm(&self) -> Real {
        (&(&self.re * &self.re) + &(&self.im * &self.im)).sqrt()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}
