//! The quadratic field K = ℚ(√D) with rational coordinates.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::tower::{Tower, TowerElement};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadField {
    d: BigInt,
}

impl QuadField {
    pub fn new(d: u64) -> Result<QuadField> {
        Tower::quadratic(d)?;
        Ok(QuadField { d: BigInt::from(d) })
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// D ≡ 5 mod 8, required of the family n² + 3.
    pub fn is_family_residue(&self) -> bool {
        let r: BigInt = &self.d % 8;
        r == BigInt::from(5)
    }

    pub fn tower(&self) -> Arc<Tower> {
        Tower::quadratic(u64::try_from(&self.d).unwrap()).unwrap()
    }
}

/// a + b√D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElement {
    pub a: BigRational,
    pub b: BigRational,
    field: Arc<QuadField>,
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.field.d)
    }
}

impl QuadElement {
    pub fn new(field: &Arc<QuadField>, a: BigRational, b: BigRational) -> QuadElement {
        QuadElement { a, b, field: field.clone() }
    }

    pub fn from_ints(field: &Arc<QuadField>, a: i64, b: i64) -> QuadElement {
        QuadElement::new(field, BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    pub fn field(&self) -> &Arc<QuadField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> QuadElement {
        QuadElement::new(&self.field, self.a.clone(), -&self.b)
    }

    /// a² − D b².
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.field.d.clone()) * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Result<QuadElement> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(QuadElement::new(&self.field, &self.a / &n, -&self.b / &n))
    }

    pub fn div(&self, other: &QuadElement) -> Result<QuadElement> {
        self.check(other)?;
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> QuadElement {
        let mut base = self.clone();
        let mut acc = QuadElement::from_ints(&self.field, 1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    fn check(&self, other: &QuadElement) -> Result<()> {
        if self.field.d != other.field.d {
            return Err(Error::TowerMismatch(format!("ℚ(√{}) vs ℚ(√{})", self.field.d, other.field.d)));
        }
        Ok(())
    }

    pub fn to_tower(&self, k: &Arc<Tower>) -> TowerElement {
        TowerElement::quad(k, &self.a, &self.b)
    }

    pub fn from_tower(field: &Arc<QuadField>, x: &TowerElement) -> Result<QuadElement> {
        let k = x.tower().field_k();
        let x = x.lift(&k)?;
        Ok(QuadElement::new(field, x.coeff(0), x.coeff(1)))
    }

    pub fn to_f64(&self) -> f64 {
        let s = f64::sqrt(self.field.d.to_string().parse::<f64>().unwrap());
        ratio_f64(&self.a) + ratio_f64(&self.b) * s
    }
}

pub(crate) fn ratio_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    let n = q.numer().bits().max(q.denom().bits());
    if n < 1000 {
        q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap()
    } else {
        let shift = n - 900;
        let a: BigInt = q.numer() >> shift;
        let b: BigInt = q.denom() >> shift;
        a.to_f64().unwrap() / b.to_f64().unwrap()
    }
}

impl<'a> Add<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn add(self, o: &QuadElement) -> QuadElement {
        self.check(o).expect("field mismatch");
        QuadElement::new(&self.field, &self.a + &o.a, &self.b + &o.b)
    }
}

impl<'a> Sub<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn sub(self, o: &QuadElement) -> QuadElement {
        self.check(o).expect("field mismatch");
        QuadElement::new(&self.field, &self.a - &o.a, &self.b - &o.b)
    }
}

impl<'a> Mul<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn mul(self, o: &QuadElement) -> QuadElement {
        self.check(o).expect("field mismatch");
        let d = BigRational::from_integer(self.field.d.clone());
        QuadElement::new(
            &self.field,
            &self.a * &o.a + d * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

impl Neg for &QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        QuadElement::new(&self.field, -&self.a, -&self.b)
    }
}

impl QuadElement {
    pub fn one(field: &Arc<QuadField>) -> QuadElement {
        QuadElement::new(field, BigRational::one(), BigRational::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x0_times_conjugate() {
        let k = Arc::new(QuadField::new(53).unwrap());
        let x0 = QuadElement::from_ints(&k, -2, -1);
        // (−2−√53)(−2+√53) = 4 − 53
        assert_eq!(&x0 * &x0.conj(), QuadElement::from_ints(&k, -49, 0));
        let s = QuadElement::from_ints(&k, 0, 1);
        assert_eq!(&s * &s, QuadElement::from_ints(&k, 53, 0));
        let y = x0.div(&QuadElement::from_ints(&k, 3, 1)).unwrap();
        assert_eq!(&y * &QuadElement::from_ints(&k, 3, 1), x0);
        assert!(x0.div(&QuadElement::from_ints(&k, 0, 0)).is_err());
    }
}
