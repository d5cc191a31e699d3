//! Arbitrary-precision scalars.
//!
//! Real values are [`rug::Float`] (MPFR, correctly rounded) carrying their own
//! mantissa precision. [`HpComplex`] pairs two of them. Every constructor here
//! takes the precision explicitly; nothing reads a global rounding mode.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

pub use rug::Float as HpReal;

/// Default mantissa precision when neither a flag nor the environment says otherwise.
pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const MIN_PRECISION_BITS: u32 = 64;
pub const MAX_PRECISION_BITS: u32 = 8192;

/// Environment variable overriding [`DEFAULT_PRECISION_BITS`].
pub const PRECISION_ENV: &str = "SRF_PRECISION_BITS";

/// Precision from `SRF_PRECISION_BITS`, falling back to 256 when unset or unparsable.
pub fn default_precision() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|b| (MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(b))
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

#[inline]
pub fn real(bits: u32, v: f64) -> Float {
    Float::with_val(bits, v)
}

#[inline]
pub fn zero(bits: u32) -> Float {
    Float::new(bits)
}

#[inline]
pub fn one(bits: u32) -> Float {
    Float::with_val(bits, 1)
}

#[inline]
pub fn pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi)
}

pub fn from_rational(bits: u32, q: &Rational) -> Float {
    Float::with_val(bits, q)
}

/// `2^e` at the given precision (exact).
pub fn pow2(bits: u32, e: i32) -> Float {
    Float::with_val(bits, 1) << e
}

/// Parses a decimal literal (`0.1`, `-2.5e-3`, `7`) or a fraction (`1/3`) into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d == 0 {
            return None;
        }
        return Some(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let n: rug::Integer = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = rug::Integer::from(10);
    let mut q = Rational::from(n);
    if scale >= 0 {
        q *= Rational::from(ten.pow(scale as u32));
    } else {
        q /= Rational::from(ten.pow((-scale) as u32));
    }
    if neg {
        q = -q;
    }
    Some(q)
}

/// Exact rational for an `f64` given by its shortest round-trip decimal form,
/// so `0.1` becomes `1/10` rather than the nearest binary double.
pub fn rational_from_f64(v: f64) -> Rational {
    parse_rational(&format!("{v:e}")).expect("finite f64")
}

/// Decimal rendering with enough digits to round-trip at the value's precision.
pub fn to_decimal(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = (f64::from(x.prec()) * std::f64::consts::LOG10_2).ceil() as usize + 2;
    x.to_string_radix(10, Some(digits))
}

/// Parses a decimal string produced by [`to_decimal`] at the given precision.
pub fn parse_float(bits: u32, s: &str) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}

/// Relative difference `|a - b| / max(|a|, |b|)`, or 0 when both vanish.
pub fn rel_diff(a: &Float, b: &Float) -> Float {
    let bits = a.prec().max(b.prec());
    let scale = Float::with_val(bits, a.abs_ref()).max(&Float::with_val(bits, b.abs_ref()));
    if scale.is_zero() {
        return zero(bits);
    }
    (Float::with_val(bits, a - b)).abs() / scale
}

/// Complex number with both parts at the same precision.
#[derive(Clone, PartialEq)]
pub struct HpComplex {
    pub re: Float,
    pub im: Float,
}

impl fmt::Debug for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} {:+e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl HpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Self::new(zero(bits), zero(bits))
    }

    pub fn one(bits: u32) -> Self {
        Self::new(one(bits), zero(bits))
    }

    pub fn from_real(re: Float) -> Self {
        let bits = re.prec();
        Self::new(re, zero(bits))
    }

    pub fn from_f64(bits: u32, re: f64, im: f64) -> Self {
        Self::new(real(bits, re), real(bits, im))
    }

    /// `r e^{i t}`.
    pub fn from_polar(r: &Float, t: &Float) -> Self {
        let bits = r.prec().max(t.prec());
        let (s, c) = Float::with_val(bits, t).sin_cos(Float::new(bits));
        Self::new(c * r, s * r)
    }

    /// `e^{i t}`.
    pub fn cis(t: &Float) -> Self {
        let (s, c) = t.clone().sin_cos(Float::new(t.prec()));
        Self::new(c, s)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Float {
        let bits = self.prec();
        Float::with_val(bits, self.re.square_ref()) + Float::with_val(bits, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Float) -> Self {
        Self::new(self.re.clone() * s, self.im.clone() * s)
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Self::new(self.re.clone() / &d, -(self.im.clone() / &d))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self * &rhs.recip()
    }

    /// Principal square root (branch cut on the negative real axis).
    pub fn sqrt(&self) -> Self {
        let bits = self.prec();
        if self.is_zero() {
            return Self::zero(bits);
        }
        let r = self.abs();
        if self.re >= 0 {
            let t = (Float::with_val(bits, &r + &self.re) / 2u32).sqrt();
            let im = Float::with_val(bits, &self.im / &t) / 2u32;
            Self::new(t, im)
        } else {
            let t = (Float::with_val(bits, &r - &self.re) / 2u32).sqrt();
            let re = Float::with_val(bits, self.im.abs_ref()) / &t / 2u32;
            let im = if self.im.is_sign_negative() { -t } else { t };
            Self::new(re, im)
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        let bits = self.prec();
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut acc = Self::one(bits);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(self.re.clone() + &rhs.re, self.im.clone() + &rhs.im)
    }
}

impl Sub for &HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: &HpComplex) -> HpComplex {
        HpComplex::new(self.re.clone() - &rhs.re, self.im.clone() - &rhs.im)
    }
}

impl Mul for &HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: &HpComplex) -> HpComplex {
        let bits = self.prec().max(rhs.prec());
        let re = Float::with_val(bits, &self.re * &rhs.re) - Float::with_val(bits, &self.im * &rhs.im);
        let im = Float::with_val(bits, &self.re * &rhs.im) + Float::with_val(bits, &self.im * &rhs.re);
        HpComplex::new(re, im)
    }
}

impl Neg for &HpComplex {
    type Output = HpComplex;
    fn neg(self) -> HpComplex {
        HpComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl Add for HpComplex {
    type Output = HpComplex;
    fn add(self, rhs: HpComplex) -> HpComplex {
        &self + &rhs
    }
}

impl Sub for HpComplex {
    type Output = HpComplex;
    fn sub(self, rhs: HpComplex) -> HpComplex {
        &self - &rhs
    }
}

impl Mul for HpComplex {
    type Output = HpComplex;
    fn mul(self, rhs: HpComplex) -> HpComplex {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions_exactly() {
        assert_eq!(parse_rational("0.1").unwrap(), Rational::from((1, 10)));
        assert_eq!(parse_rational("1/3").unwrap(), Rational::from((1, 3)));
        assert_eq!(parse_rational("-2.5e-3").unwrap(), Rational::from((-1, 400)));
        assert_eq!(parse_rational("12").unwrap(), Rational::from(12));
        assert_eq!(parse_rational(".5").unwrap(), Rational::from((1, 2)));
        assert!(parse_rational("abc").is_none());
        assert!(parse_rational("1/0").is_none());
        assert_eq!(rational_from_f64(0.05), Rational::from((1, 20)));
    }

    #[test]
    fn complex_sqrt_principal_branch() {
        let bits = 128;
        let z = HpComplex::from_f64(bits, -4.0, 0.0);
        let s = z.sqrt();
        assert!(s.re.to_f64().abs() < 1e-30);
        assert!((s.im.to_f64() - 2.0).abs() < 1e-30);
        let z = HpComplex::from_f64(bits, -4.0, -0.0);
        assert!((z.sqrt().im.to_f64() + 2.0).abs() < 1e-30);
        let z = HpComplex::from_f64(bits, 3.0, -4.0);
        let s = z.sqrt();
        let back = &s * &s;
        assert!((back.re.to_f64() - 3.0).abs() < 1e-30);
        assert!((back.im.to_f64() + 4.0).abs() < 1e-30);
        assert!(s.re > 0);
    }

    #[test]
    fn decimal_round_trip() {
        let x = pi(256) / 7u32;
        let s = to_decimal(&x);
        assert_eq!(parse_float(256, &s).unwrap(), x);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let z = HpComplex::from_f64(128, 0.3, 1.1);
        let p = z.powi(5);
        let q = &(&(&(&z * &z) * &z) * &z) * &z;
        assert!(rel_diff(&p.re, &q.re) < 1e-35);
        let inv = z.powi(-3);
        let one = &inv * &z.powi(3);
        assert!((one.re.to_f64() - 1.0).abs() < 1e-35);
    }
}
