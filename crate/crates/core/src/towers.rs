//! Dimension towers d_ℓ(D) = u_D^ℓ + u_D^{−ℓ} + 1 above ℚ(√D).
//!
//! The family n² + 3 is detected through the fundamental unit, read off the
//! continued fraction of (1 + √D)/2. Everything here is integer arithmetic.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::tower::is_squarefree;
use crate::exact::{QuadElement, QuadField};
use crate::{Error, Result};

/// T̂_n(x) = 1 + 2T_n((x − 1)/2), integer coefficients, constant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedChebyshev {
    n: u64,
    coeffs: Vec<BigInt>,
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out: Vec<BigInt> = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    while out.len() > 1 && out.last().unwrap().is_zero() {
        out.pop();
    }
    out
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn shift_x(a: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero()];
    out.extend_from_slice(a);
    out
}

impl ShiftedChebyshev {
    pub fn degree(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &ShiftedChebyshev) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero()];
        for c in self.coeffs.iter().rev() {
            acc = poly_add(&poly_mul(&acc, &inner.coeffs), std::slice::from_ref(c));
        }
        acc
    }
}

/// T̂_n via T̂_n = x·T̂_{n−1} − x·T̂_{n−2} + T̂_{n−3}.
pub fn chsh(n: u64) -> ShiftedChebyshev {
    let base = [
        vec![BigInt::from(3)],
        vec![BigInt::zero(), BigInt::one()],
        vec![BigInt::zero(), BigInt::from(-2), BigInt::one()],
    ];
    if n < 3 {
        return ShiftedChebyshev { n, coeffs: base[n as usize].clone() };
    }
    let [mut a, mut b, mut c] = base;
    for _ in 3..=n {
        let next = poly_add(&poly_add(&shift_x(&c), &shift_x(&b).iter().map(|v| -v).collect::<Vec<_>>()), &a);
        a = b;
        b = c;
        c = next;
    }
    ShiftedChebyshev { n, coeffs: c }
}

/// Fundamental unit (x + y√D)/2 of ℚ(√D), D ≡ 1 mod 4, with its norm.
pub fn fundamental_unit(d: u64) -> Result<(BigInt, BigInt, i32)> {
    if d % 4 != 1 || !is_squarefree(d) {
        return Err(Error::Family(format!("D = {d} must be square-free and 1 mod 4")));
    }
    let dd = BigInt::from(d);
    let s = dd.sqrt();
    // PQa on (P + √D)/Q starting from (1 + √D)/2
    let (mut p, mut q) = (BigInt::one(), BigInt::from(2));
    let (mut a1, mut a2) = (BigInt::one(), BigInt::zero());
    let (mut b1, mut b2) = (BigInt::zero(), BigInt::one());
    for _ in 0..1_000_000 {
        let num = &p + &s + if q.is_negative() { BigInt::one() } else { BigInt::zero() };
        let a = num.div_floor(&q);
        let an = &a * &a1 + &a2;
        let bn = &a * &b1 + &b2;
        a2 = std::mem::replace(&mut a1, an);
        b2 = std::mem::replace(&mut b1, bn);
        let x = BigInt::from(2) * &a1 - &b1;
        let y = b1.clone();
        let nrm: BigInt = &x * &x - &dd * &y * &y;
        if nrm == BigInt::from(4) || nrm == BigInt::from(-4) {
            return Ok((x, y, if nrm.is_positive() { 1 } else { -1 }));
        }
        p = &a * &q - &p;
        q = (&dd - &p * &p) / &q;
    }
    Err(Error::Family(format!("continued fraction of (1+√{d})/2 did not close")))
}

/// Memoized tower data for a family D.
#[derive(Clone, Debug)]
pub struct TowerRecord {
    d: u64,
    n1: BigInt,
    f: BigInt,
    field: Arc<QuadField>,
    dims: Vec<BigInt>,
}

impl TowerRecord {
    /// Family mode: D = squarefree part of n₁² + 4 for odd n₁.
    pub fn new(d: u64) -> Result<TowerRecord> {
        if d % 8 != 5 {
            return Err(Error::Family(format!("no odd n with squarefree part of n²+4 equal to {d}")));
        }
        let (x, y, nrm) = fundamental_unit(d)?;
        if nrm != -1 || x.is_even() {
            return Err(Error::Family(format!("no odd n with squarefree part of n²+4 equal to {d}")));
        }
        let field = Arc::new(QuadField::new(d)?);
        let s1 = &x * &x + 2;
        Ok(TowerRecord { d, n1: x, f: y, field, dims: vec![BigInt::from(3), s1 + 1] })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn n1(&self) -> &BigInt {
        &self.n1
    }

    pub fn conductor_f(&self) -> &BigInt {
        &self.f
    }

    pub fn field(&self) -> &Arc<QuadField> {
        &self.field
    }

    /// u_K = (n₁ + f√D)/2.
    pub fn u_k(&self) -> QuadElement {
        QuadElement::new(
            &self.field,
            BigRational::new(self.n1.clone(), 2.into()),
            BigRational::new(self.f.clone(), 2.into()),
        )
    }

    /// u_D = u_K², the first totally positive power.
    pub fn u_d(&self) -> QuadElement {
        let u = self.u_k();
        &u * &u
    }

    pub fn dim(&mut self, ell: usize) -> &BigInt {
        // s_ℓ = Tr u_D^ℓ obeys s_{ℓ+1} = s₁s_ℓ − s_{ℓ−1}
        let s1: BigInt = &self.dims[1] - 1;
        while self.dims.len() <= ell {
            let n = self.dims.len();
            let next = &s1 * (&self.dims[n - 1] - 1) - (&self.dims[n - 2] - 1) + 1;
            self.dims.push(next);
        }
        &self.dims[ell]
    }

    pub fn dims(&mut self, max_ell: usize) -> Vec<BigInt> {
        self.dim(max_ell);
        self.dims[..=max_ell].to_vec()
    }
}

pub fn d_ell(d: u64, ell: usize) -> Result<BigInt> {
    Ok(TowerRecord::new(d)?.dim(ell).clone())
}

/// Multiplicative order of u_D in (O_K/q)^×. Elements are a + bω with
/// ω = (1 + √D)/2, ω² = ω + (D − 1)/4.
pub fn unit_order_mod(rec: &TowerRecord, q: u64) -> u64 {
    let m = ((rec.d - 1) / 4) as u128 % q as u128;
    let qq = q as u128;
    let to_mod = |n: &BigInt| n.mod_floor(&BigInt::from(q)).to_u128().unwrap();
    // u_K = (n₁ − f)/2 + f·ω
    let (ka, kb) = (to_mod(&((&rec.n1 - &rec.f) / 2)), to_mod(&rec.f));
    let mul = |(a, b): (u128, u128), (c, d): (u128, u128)| -> (u128, u128) {
        let bd = b * d % qq;
        ((a * c + bd * m) % qq, (a * d + b * c + bd) % qq)
    };
    let ud = mul((ka, kb), (ka, kb));
    let mut x = ud;
    let mut k = 1u64;
    while x != (1, 0) {
        x = mul(x, ud);
        k += 1;
        if k > q * q {
            break;
        }
    }
    k
}

/// First ℓ with q | d_ℓ(D), or None when 3 ∤ Ω.
pub fn ell0(q: u64, d: u64) -> Result<Option<u64>> {
    if q == 3 {
        return Err(Error::Input("q = 3 is the shifted case and is not supported".into()));
    }
    if !is_probable_prime(&BigInt::from(q)).0 {
        return Err(Error::Input(format!("{q} is not prime")));
    }
    let rec = TowerRecord::new(d)?;
    let omega = unit_order_mod(&rec, q);
    Ok(if omega.is_multiple_of(3) { Some(omega / 3) } else { None })
}

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first 13 prime bases. Returns (is_prime, proven):
/// the answer is deterministic below 3.3·10²⁴ and probabilistic above.
pub fn is_probable_prime(n: &BigInt) -> (bool, bool) {
    let two = BigInt::from(2);
    if n < &two {
        return (false, true);
    }
    for &p in &MR_BASES {
        if n == &BigInt::from(p) {
            return (true, true);
        }
        if (n % p).is_zero() {
            return (false, true);
        }
    }
    let nm1: BigInt = n - 1;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'outer: for &a in &MR_BASES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return (false, true);
    }
    let bound: BigInt = "3317044064679887385961981".parse().unwrap();
    (true, n < &bound)
}

pub fn valuation(n: &BigInt, q: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let mut n = n.abs();
    let mut v = 0;
    let qb = BigInt::from(q);
    while (&n % &qb).is_zero() {
        n /= &qb;
        v += 1;
    }
    v
}

/// Family D values below `bound`.
pub fn family_values(bound: u64) -> Vec<u64> {
    (5..bound).step_by(8).filter(|&d| TowerRecord::new(d).is_ok()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct FourPHit {
    #[serde(rename = "D")]
    pub d: u64,
    pub ell: usize,
    pub quarter: String,
    pub proven: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport<T: Serialize> {
    pub scan: &'static str,
    pub checked: usize,
    pub hits: Vec<T>,
    pub violations: Vec<String>,
    pub guard_hits: Vec<String>,
}

impl<T: Serialize> ScanReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// d_ℓ = 4p with p prime (d₁ = 4 is reported too). Any hit with D ≠ 5 and
/// ℓ ≠ 1 is a violation.
pub fn scan_fourp(ds: &[u64], max_ell: usize) -> Result<ScanReport<FourPHit>> {
    let per: Vec<Vec<FourPHit>> = ds
        .par_iter()
        .map(|&d| {
            let mut rec = TowerRecord::new(d)?;
            let mut hits = Vec::new();
            for ell in 1..=max_ell {
                let v: BigInt = rec.dim(ell).clone();
                if !(&v % 4u32).is_zero() {
                    continue;
                }
                let quarter: BigInt = v / 4;
                // d = n²+3 forces p odd
                if quarter.is_even() {
                    continue;
                }
                let (prime, proven) = is_probable_prime(&quarter);
                if prime || quarter.is_one() {
                    hits.push(FourPHit { d, ell, quarter: quarter.to_string(), proven });
                }
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    let hits: Vec<FourPHit> = per.into_iter().flatten().collect();
    let violations = hits
        .iter()
        .filter(|h| h.d != 5 && h.ell != 1)
        .map(|h| format!("D={} ell={} quarter={}", h.d, h.ell, h.quarter))
        .collect();
    Ok(ScanReport { scan: "fourp", checked: ds.len() * max_ell, hits, violations, guard_hits: vec![] })
}

#[derive(Clone, Debug, Serialize)]
pub struct NewPrimeHit {
    #[serde(rename = "D")]
    pub d: u64,
    pub ell: usize,
    /// The part of d_ℓ coprime to all earlier d_ℓ'.
    pub new_part: String,
}

/// Strip from n every prime that divides m.
fn strip_common(mut n: BigInt, m: &BigInt) -> BigInt {
    loop {
        let g = n.gcd(m);
        if g.is_one() {
            return n;
        }
        n /= g;
    }
}

/// Every level ℓ ≥ 1 carries a prime absent from lower levels, except when
/// ℓ = 2 and d₁ = 2^N + 2 (guard, reported).
pub fn scan_new_primes(ds: &[u64], max_ell: usize) -> Result<ScanReport<NewPrimeHit>> {
    let per: Vec<(Vec<NewPrimeHit>, Vec<String>, Vec<String>)> = ds
        .par_iter()
        .map(|&d| {
            let mut rec = TowerRecord::new(d)?;
            let dims = rec.dims(max_ell);
            let (mut hits, mut bad, mut guard) = (vec![], vec![], vec![]);
            for ell in 1..=max_ell {
                if ell == 2 {
                    let t: BigInt = &dims[1] - 2;
                    if t.is_positive() && (&t & (&t - 1u32)).is_zero() && t >= BigInt::from(4) {
                        guard.push(format!("D={d}: d1 = 2^N+2"));
                        continue;
                    }
                }
                let mut part = dims[ell].clone();
                for m in 1..ell {
                    part = strip_common(part, &dims[m]);
                }
                if part.is_one() {
                    bad.push(format!("D={d} ell={ell}: no new prime"));
                } else {
                    hits.push(NewPrimeHit { d, ell, new_part: part.to_string() });
                }
            }
            Ok((hits, bad, guard))
        })
        .collect::<Result<_>>()?;
    let mut rep = ScanReport { scan: "newprime", checked: ds.len() * max_ell, hits: vec![], violations: vec![], guard_hits: vec![] };
    for (h, b, g) in per {
        rep.hits.extend(h);
        rep.violations.extend(b);
        rep.guard_hits.extend(g);
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthHit {
    #[serde(rename = "D")]
    pub d: u64,
    pub ell: usize,
    pub n: usize,
}

/// d_ℓ^n > d_{ℓn} > (2/3)^n d_ℓ^n for D ≠ 5.
pub fn scan_growth(ds: &[u64], max_ell: usize, max_n: usize) -> Result<ScanReport<GrowthHit>> {
    let mut rep = ScanReport { scan: "growth", checked: 0, hits: vec![], violations: vec![], guard_hits: vec![] };
    for &d in ds {
        if d == 5 {
            rep.guard_hits.push("D=5 excluded".into());
            continue;
        }
        let mut rec = TowerRecord::new(d)?;
        for ell in 1..=max_ell {
            for n in 2..=max_n {
                let base = rec.dim(ell).clone();
                let pow = num_traits::pow(base, n);
                let top = rec.dim(ell * n).clone();
                rep.checked += 1;
                let lower = BigInt::from(3).pow(n as u32) * &top > BigInt::from(2).pow(n as u32) * &pow;
                if pow > top && lower {
                    rep.hits.push(GrowthHit { d, ell, n });
                } else {
                    rep.violations.push(format!("D={d} ell={ell} n={n}"));
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct QGrowthHit {
    #[serde(rename = "D")]
    pub d: u64,
    pub q: u64,
    pub ell0: u64,
    pub r: u32,
}

/// For primes 5 ≤ q ≤ max_q dividing the tower: ℓ₀ = Ω/3 matches the first
/// divisible level, and q^{r+1} ‖ d_{qℓ₀} with qℓ₀ minimal for that power.
pub fn scan_qgrowth(ds: &[u64], max_q: u64) -> Result<ScanReport<QGrowthHit>> {
    let primes: Vec<u64> = (5..=max_q).filter(|&q| is_probable_prime(&BigInt::from(q)).0).collect();
    let per: Vec<(Vec<QGrowthHit>, Vec<String>)> = ds
        .par_iter()
        .map(|&d| {
            let mut rec = TowerRecord::new(d)?;
            let (mut hits, mut bad) = (vec![], vec![]);
            for &q in &primes {
                let omega = unit_order_mod(&rec, q);
                let scan_to = (3 * omega) as usize;
                let first = (1..=scan_to).find(|&l| (rec.dim(l) % q).is_zero());
                let claimed = if omega.is_multiple_of(3) { Some(omega / 3) } else { None };
                if first.map(|l| l as u64) != claimed {
                    bad.push(format!("D={d} q={q}: ell0 {claimed:?} but first divisible level {first:?}"));
                    continue;
                }
                let Some(l0) = claimed else { continue };
                let r = valuation(rec.dim(l0 as usize), q);
                let lq = (q * l0) as usize;
                let v = valuation(rec.dim(lq), q);
                let earlier = (1..lq).any(|l| valuation(rec.dim(l), q) > r);
                if v != r + 1 || earlier {
                    bad.push(format!("D={d} q={q}: v(d_{lq}) = {v}, expected {}", r + 1));
                } else {
                    hits.push(QGrowthHit { d, q, ell0: l0, r });
                }
            }
            Ok((hits, bad))
        })
        .collect::<Result<_>>()?;
    let mut rep = ScanReport { scan: "qgrowth", checked: ds.len() * primes.len(), hits: vec![], violations: vec![], guard_hits: vec![] };
    for (h, b) in per {
        rep.hits.extend(h);
        rep.violations.extend(b);
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct XiNormReport {
    #[serde(rename = "D")]
    pub d: u64,
    pub n1: String,
    pub norm: String,
    pub v2: u32,
    pub passed: bool,
}

/// N_{L/ℚ}(ξ − 1) for L = K(ξ), ξ² = −2 − √(d₁+1): first N_{L/K}(ξ − 1) =
/// Res_x(x² − x₀, x − 1) = 1 − x₀, then the norm down to ℚ.
pub fn xi_norm_check(d: u64) -> Result<XiNormReport> {
    let rec = TowerRecord::new(d)?;
    let field = rec.field().clone();
    // √(d₁+1) = f√D since d₁ + 1 = n₁² + 4 = f²D
    let x0 = QuadElement::new(
        &field,
        BigRational::from_integer((-2).into()),
        BigRational::from_integer(-rec.conductor_f().clone()),
    );
    let rel = &QuadElement::one(&field) - &x0;
    let norm = rel.norm();
    if !norm.is_integer() {
        return Err(Error::Invariant("norm of an algebraic integer is not integral".into()));
    }
    let n = norm.to_integer();
    let v2 = valuation(&n, 2);
    Ok(XiNormReport { d, n1: rec.n1().to_string(), norm: n.to_string(), v2, passed: v2 == 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_small() {
        let c: Vec<i64> = chsh(3).coeffs().iter().map(|c| c.to_i64().unwrap()).collect();
        assert_eq!(c, vec![3, 0, -3, 1]);
        assert_eq!(chsh(2).compose(&chsh(3)), chsh(6).coeffs().to_vec());
    }

    #[test]
    fn family_detection() {
        assert_eq!(TowerRecord::new(53).unwrap().n1(), &BigInt::from(7));
        assert!(TowerRecord::new(6).is_err());
        assert!(TowerRecord::new(21).is_err());
    }

    #[test]
    fn ell0_matches_scan() {
        assert_eq!(ell0(31, 5).unwrap(), Some(5));
        assert_eq!(ell0(2, 5).unwrap(), Some(1));
    }
}
