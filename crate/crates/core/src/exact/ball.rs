//! Complex balls in binary fixed point.
//!
//! A ball is (re + i·im) / 2^prec with radius rad / 2^prec. All operations
//! return balls that contain every possible exact result.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub re: BigInt,
    pub im: BigInt,
    pub rad: BigInt,
    pub prec: u32,
}

fn ceil_shr(x: &BigInt, s: u32) -> BigInt {
    let (q, r) = x.div_mod_floor(&(BigInt::from(1) << s));
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn abs_sum(b: &Ball) -> BigInt {
    b.re.abs() + b.im.abs()
}

impl Ball {
    pub fn zero(prec: u32) -> Ball {
        Ball { re: BigInt::zero(), im: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Ball {
        Ball { re: n << prec, im: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Ball {
        Ball::from_int(&BigInt::from(n), prec)
    }

    /// Exact i.
    pub fn i(prec: u32) -> Ball {
        Ball { re: BigInt::zero(), im: BigInt::from(1) << prec, rad: BigInt::zero(), prec }
    }

    pub fn from_complex(z: Complex64, prec: u32) -> Ball {
        let conv = |x: f64| -> BigInt {
            if x == 0.0 {
                return BigInt::zero();
            }
            let (m, e) = frexp(x);
            let mant = (m * (1u64 << 53) as f64) as i64;
            let sh = e as i64 - 53 + prec as i64;
            let b = BigInt::from(mant);
            if sh >= 0 {
                b << sh as u32
            } else {
                b >> (-sh) as u32
            }
        };
        Ball { re: conv(z.re), im: conv(z.im), rad: BigInt::zero(), prec }
    }

    /// √n for a non-negative integer n.
    pub fn sqrt_int(n: &BigInt, prec: u32) -> Ball {
        let s = (n << (2 * prec)).sqrt();
        Ball { re: s, im: BigInt::zero(), rad: BigInt::from(1), prec }
    }

    /// √x for a real ball bounded away from zero.
    pub fn sqrt_real(&self) -> Option<Ball> {
        if !self.im.is_zero() || self.re <= self.rad {
            return None;
        }
        let s = (&self.re << self.prec).sqrt();
        if s.is_zero() {
            return None;
        }
        // |√(x±r) − √x| ≤ r/√(x−r) ≤ 2r/√x once r ≤ 3x/4; be generous otherwise
        let rad = ((&self.rad << (self.prec + 1)) / &s) * 2 + 2;
        Some(Ball { re: s, im: BigInt::zero(), rad, prec: self.prec })
    }

    pub fn with_rad(mut self, rad: BigInt) -> Ball {
        self.rad = rad;
        self
    }

    pub fn mid(&self) -> Ball {
        Ball { re: self.re.clone(), im: self.im.clone(), rad: BigInt::zero(), prec: self.prec }
    }

    /// Re-expresses the ball at another precision.
    pub fn set_prec(&self, prec: u32) -> Ball {
        if prec >= self.prec {
            let s = prec - self.prec;
            Ball { re: &self.re << s, im: &self.im << s, rad: &self.rad << s, prec }
        } else {
            let s = self.prec - prec;
            Ball {
                re: &self.re >> s,
                im: &self.im >> s,
                rad: ceil_shr(&self.rad, s) + 2,
                prec,
            }
        }
    }

    pub fn neg(&self) -> Ball {
        Ball { re: -&self.re, im: -&self.im, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn conj(&self) -> Ball {
        Ball { re: self.re.clone(), im: -&self.im, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        assert_eq!(self.prec, o.prec);
        Ball { re: &self.re + &o.re, im: &self.im + &o.im, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        assert_eq!(self.prec, o.prec);
        Ball { re: &self.re - &o.re, im: &self.im - &o.im, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        assert_eq!(self.prec, o.prec);
        let p = self.prec;
        let re = (&self.re * &o.re - &self.im * &o.im) >> p;
        let im = (&self.re * &o.im + &self.im * &o.re) >> p;
        let mut rad = BigInt::from(2);
        if !self.rad.is_zero() || !o.rad.is_zero() {
            let err = abs_sum(self) * &o.rad + abs_sum(o) * &self.rad + &self.rad * &o.rad;
            rad += ceil_shr(&err, p);
        }
        Ball { re, im, rad, prec: p }
    }

    pub fn mul_int(&self, n: &BigInt) -> Ball {
        Ball { re: &self.re * n, im: &self.im * n, rad: &self.rad * n.abs(), prec: self.prec }
    }

    pub fn div_int(&self, n: &BigInt) -> Ball {
        assert!(!n.is_zero());
        let na = n.abs();
        let s = if n.is_negative() { -1 } else { 1 };
        Ball {
            re: self.re.div_floor(&na) * s,
            im: self.im.div_floor(&na) * s,
            rad: self.rad.div_ceil(&na) + 2,
            prec: self.prec,
        }
    }

    /// Lower bound for |z| over the ball, in ulps.
    fn abs_mid_lower(&self) -> BigInt {
        (&self.re * &self.re + &self.im * &self.im).sqrt()
    }

    /// Upper bound for the absolute value over the ball, as a ball-scale integer.
    pub fn abs_upper(&self) -> BigInt {
        (&self.re * &self.re + &self.im * &self.im).sqrt() + 1 + &self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_mid_lower() <= self.rad
    }

    pub fn inv(&self) -> Option<Ball> {
        let p = self.prec;
        let n = &self.re * &self.re + &self.im * &self.im;
        let l = n.sqrt();
        if l <= self.rad {
            return None;
        }
        let re = (&self.re << (2 * p)).div_floor(&n);
        let im = -((&self.im << (2 * p)).div_floor(&n));
        let num = &self.rad << (2 * p);
        let den = &l * (&l - &self.rad);
        let rad = num.div_ceil(&den) + 3;
        Some(Ball { re, im, rad, prec: p })
    }

    pub fn div(&self, o: &Ball) -> Option<Ball> {
        Some(self.mul(&o.inv()?))
    }

    /// True if the two balls intersect.
    pub fn overlaps(&self, o: &Ball) -> bool {
        let d = self.sub(o);
        d.contains_zero()
    }

    /// True if `o` lies inside `self`.
    pub fn contains(&self, o: &Ball) -> bool {
        let dre = &self.re - &o.re;
        let dim = &self.im - &o.im;
        let dist = (&dre * &dre + &dim * &dim).sqrt() + 1;
        dist + &o.rad <= self.rad
    }

    pub fn re_ball(&self) -> Ball {
        Ball { re: self.re.clone(), im: BigInt::zero(), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn im_ball(&self) -> Ball {
        Ball { re: self.im.clone(), im: BigInt::zero(), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(fixed_to_f64(&self.re, self.prec), fixed_to_f64(&self.im, self.prec))
    }

    pub fn rad_f64(&self) -> f64 {
        fixed_to_f64(&self.rad, self.prec)
    }

    /// log2 of the radius (−∞ for exact balls).
    pub fn rad_log2(&self) -> f64 {
        if self.rad.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.rad.bits() as f64 - self.prec as f64
        }
    }

    /// |Im| upper bound as f64 log10.
    pub fn im_abs_log10(&self) -> f64 {
        let v = self.im.abs() + &self.rad;
        if v.is_zero() {
            return f64::NEG_INFINITY;
        }
        (v.bits() as f64 - self.prec as f64) * std::f64::consts::LOG10_2
    }

    /// Decimal rendering of the midpoint with `digits` significant fractional digits.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (fixed_to_decimal(&self.re, self.prec, digits), fixed_to_decimal(&self.im, self.prec, digits))
    }

    /// Parses "re" and "im" decimal strings.
    pub fn from_decimal(re: &str, im: &str, prec: u32) -> Option<Ball> {
        let r = decimal_to_fixed(re, prec)?;
        let i = decimal_to_fixed(im, prec)?;
        // per-coordinate errors; their sum bounds the distance in ℂ
        Some(Ball { re: r.0, im: i.0, rad: r.1 + i.1, prec })
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex();
        write!(f, "[{} + {}i ± {:.1e}]", z.re, z.im, self.rad_f64())
    }
}

fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 {
        return (0.0, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, e) = frexp(x * (1u64 << 54) as f64);
        return (m, e - 54);
    }
    let e = exp - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e)
}

pub(crate) fn fixed_to_f64(x: &BigInt, prec: u32) -> f64 {
    let bits = x.bits();
    if bits <= 60 {
        return x.to_f64().unwrap() / 2f64.powi(prec as i32);
    }
    let sh = bits - 60;
    let top: BigInt = x >> sh;
    top.to_f64().unwrap() * 2f64.powi(sh as i32 - prec as i32)
}

fn fixed_to_decimal(x: &BigInt, prec: u32, digits: usize) -> String {
    let neg = x.sign() == Sign::Minus;
    let a = x.abs();
    let int_part: BigInt = &a >> prec;
    let frac: BigInt = &a - (&int_part << prec);
    let scaled: BigInt = (frac * BigInt::from(10).pow(digits as u32)) >> prec;
    let mut s = format!("{}.{:0>width$}", int_part, scaled.to_string(), width = digits);
    if neg && !(int_part.is_zero() && scaled.is_zero()) {
        s.insert(0, '-');
    }
    s
}

fn decimal_to_fixed(s: &str, prec: u32) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits = format!("{ip}{fp}");
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let e10 = exp - fp.len() as i64;
    let (v, rad) = if e10 >= 0 {
        ((n * BigInt::from(10).pow(e10 as u32)) << prec, BigInt::zero())
    } else {
        let den = BigInt::from(10).pow((-e10) as u32);
        ((n << prec).div_floor(&den), BigInt::from(1) + (BigInt::from(1) << prec).div_ceil(&den))
    };
    Some((if neg { -v } else { v }, rad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_and_inverse() {
        let p = 200;
        let s = Ball::sqrt_int(&BigInt::from(53), p);
        let sq = s.mul(&s);
        assert!(sq.overlaps(&Ball::from_i64(53, p)));
        let inv = s.inv().unwrap();
        assert!(inv.mul(&s).overlaps(&Ball::from_i64(1, p)));
        assert!((s.to_complex().re - 53f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn decimal_round_trip() {
        let b = Ball::from_decimal("-3.25", "1e-3", 100).unwrap();
        let z = b.to_complex();
        assert_eq!(z.re, -3.25);
        assert!((z.im - 0.001).abs() < 1e-15);
        assert_eq!(b.to_decimal(3).0, "-3.250");
    }
}
