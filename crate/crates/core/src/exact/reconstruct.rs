//! Recovering exact elements from numerical values.
//!
//! Over ℚ a continued-fraction expansion suffices. Inside ℚ(√D) or a tower
//! the value is a single complex number, which determines the coordinates only
//! through an integer relation, so PSLQ is used there.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ball::Ball;
use super::embed::EmbeddingContext;
use super::tower::{Tower, TowerElement};
use crate::{Error, Result};

/// Best rational approximation of a real ball with denominator ≤ `max_den`,
/// by continued fractions. Returns None if no convergent lies in the ball.
pub fn continued_fraction(x: &Ball, max_den: &BigInt) -> Option<BigRational> {
    let one = BigInt::one() << x.prec;
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let (mut num, mut den) = (x.re.clone(), one.clone());
    for _ in 0..10_000 {
        let a = num.div_floor(&den);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > max_den {
            return None;
        }
        let cand = BigRational::new(h2.clone(), k2.clone());
        let b = Ball::from_int(cand.numer(), x.prec).div_int(cand.denom());
        if x.re_ball().overlaps(&b) {
            return Some(cand);
        }
        let r = &num - &a * &den;
        if r.is_zero() {
            return None;
        }
        num = den;
        den = r;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
    None
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two_a: BigInt = a << 1;
    
    (two_a + b).div_floor(&(b << 1))
}

/// PSLQ on real numbers given in fixed point with `prec` fractional bits.
/// Returns an integer vector c ≠ 0 with Σ cᵢxᵢ ≈ 0 and ‖c‖∞ ≤ `max_coeff`,
/// or None if no such relation was found.
pub fn pslq(x: &[BigInt], prec: u32, max_coeff: &BigInt) -> Option<Vec<BigInt>> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let p = prec;
    let one: BigInt = BigInt::one() << p;
    let tol: BigInt = BigInt::one() << (p / 4 + 8).min(p);
    for (i, xi) in x.iter().enumerate() {
        if xi.abs() < tol {
            let mut c = vec![BigInt::zero(); n];
            c[i] = BigInt::one();
            return Some(c);
        }
    }
    let fmul = |a: &BigInt, b: &BigInt| -> BigInt { (a * b) >> p };
    let fdiv = |a: &BigInt, b: &BigInt| -> BigInt { (a << p).div_floor(b) };
    let fsqrt = |a: &BigInt| -> BigInt { (a << p).sqrt() };
    let gamma = fsqrt(&((BigInt::from(4) << p) / 3));
    let mut s = vec![BigInt::zero(); n];
    let mut acc = BigInt::zero();
    for k in (0..n).rev() {
        acc += fmul(&x[k], &x[k]);
        s[k] = fsqrt(&acc);
    }
    let t = s[0].clone();
    let mut y: Vec<BigInt> = x.iter().map(|v| fdiv(v, &t)).collect();
    for v in s.iter_mut() {
        *v = fdiv(v, &t);
    }
    let m = n - 1;
    let mut h = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        if i < m && !s[i].is_zero() {
            h[i][i] = fdiv(&s[i + 1], &s[i]);
        }
        for j in 0..i.min(m) {
            let sj = fmul(&s[j], &s[j + 1]);
            if !sj.is_zero() {
                h[i][j] = fdiv(&-(fmul(&y[i], &y[j])), &sj);
            }
        }
    }
    let mut a: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut b = a.clone();
    let reduce = |i: usize, j: usize, h: &mut Vec<Vec<BigInt>>, y: &mut Vec<BigInt>, a: &mut Vec<Vec<BigInt>>, b: &mut Vec<Vec<BigInt>>| {
        if h[j][j].is_zero() {
            return;
        }
        let q = round_div(&h[i][j], &h[j][j]);
        if q.is_zero() {
            return;
        }
        let qf: BigInt = &q << p;
        y[j] = &y[j] + fmul(&qf, &y[i]);
        for k in 0..=j {
            let v = fmul(&qf, &h[j][k]);
            h[i][k] -= v;
        }
        for k in 0..n {
            let v = &q * &a[j][k];
            a[i][k] -= v;
            let w = &q * &b[k][i];
            b[k][j] += w;
        }
    };
    for i in 1..n {
        for j in (0..i.min(m)).rev() {
            reduce(i, j, &mut h, &mut y, &mut a, &mut b);
        }
    }
    let max_iter = 200 * n * n + 2000;
    for _ in 0..max_iter {
        let mut best = 0;
        let mut best_val = BigInt::zero();
        let mut g = gamma.clone();
        for i in 0..m {
            let v = fmul(&g, &h[i][i].abs());
            if v > best_val {
                best_val = v;
                best = i;
            }
            g = fmul(&g, &gamma);
        }
        let r = best;
        y.swap(r, r + 1);
        h.swap(r, r + 1);
        a.swap(r, r + 1);
        for row in b.iter_mut() {
            row.swap(r, r + 1);
        }
        if r + 1 < m {
            let t0 = fsqrt(&(fmul(&h[r][r], &h[r][r]) + fmul(&h[r][r + 1], &h[r][r + 1])));
            if t0.is_zero() {
                return None;
            }
            let t1 = fdiv(&h[r][r], &t0);
            let t2 = fdiv(&h[r][r + 1], &t0);
            for row in h.iter_mut().skip(r) {
                let t3 = row[r].clone();
                let t4 = row[r + 1].clone();
                row[r] = fmul(&t1, &t3) + fmul(&t2, &t4);
                row[r + 1] = fmul(&t1, &t4) - fmul(&t2, &t3);
            }
        }
        for i in r + 1..n {
            for j in (0..(i.min(r + 2)).min(m)).rev() {
                reduce(i, j, &mut h, &mut y, &mut a, &mut b);
            }
        }
        let (mut jmin, mut ymin) = (0, y[0].abs());
        for (j, v) in y.iter().enumerate() {
            if v.abs() < ymin {
                ymin = v.abs();
                jmin = j;
            }
        }
        if ymin < tol {
            let c: Vec<BigInt> = (0..n).map(|k| b[k][jmin].clone()).collect();
            if c.iter().all(|v| &v.abs() <= max_coeff) {
                return Some(c);
            }
            return None;
        }
        let hmax = (0..m).map(|i| h[i][i].abs()).max().unwrap();
        if hmax.is_zero() {
            return None;
        }
        // any relation has norm at least 1/max|H_jj|
        let bound = fdiv(&one, &hmax) >> p;
        if &bound > max_coeff {
            return None;
        }
        let amax = a.iter().flat_map(|r| r.iter()).map(|v| v.bits()).max().unwrap_or(0);
        if amax + 8 > (p / 2) as u64 {
            return None;
        }
    }
    None
}

/// A real number built as Re + λ·Im; λ is a fixed constant with no algebraic
/// relation to the fields in use.
fn realify(b: &Ball) -> BigInt {
    // λ ≈ 0.5772156649015328606065120900824024310422 (Euler–Mascheroni)
    let lam_num: BigInt = "5772156649015328606065120900824024310422".parse().unwrap();
    let lam_den: BigInt = BigInt::from(10).pow(40);
    &b.re + (&b.im * lam_num).div_floor(&lam_den)
}

/// Levels of `tower` (heights ≥ 2) whose subsets are closed under the
/// dependencies of their level polynomials, smallest total degree first.
pub fn closed_level_subsets(tower: &Arc<Tower>) -> Vec<Vec<usize>> {
    let levels = tower.levels();
    let hs: Vec<usize> = levels.iter().map(|l| l.height()).collect();
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for mask in 0u32..(1 << hs.len()) {
        let set: Vec<usize> = (0..hs.len()).filter(|i| mask >> i & 1 == 1).map(|i| hs[i]).collect();
        let closed = set.iter().all(|&h| levels[h - 2].deps().iter().all(|d| set.contains(d)));
        if closed {
            let deg: usize = set.iter().map(|&h| levels[h - 2].degree()).product();
            out.push((deg, set));
        }
    }
    out.sort();
    out.into_iter().map(|(_, s)| s).collect()
}

/// Flat indices of the basis monomials that only involve the given levels (and √D).
pub fn subset_indices(tower: &Arc<Tower>, levels: &[usize]) -> Vec<usize> {
    (0..tower.size())
        .filter(|&idx| {
            let e = tower.monomial_exponents(idx);
            e.iter().enumerate().skip(1).all(|(k, &ek)| ek == 0 || levels.contains(&(k + 1)))
        })
        .collect()
}

/// Finds x in the span of the given basis monomials with embed(x) ≈ z, by PSLQ.
pub fn pslq_in_span(
    tower: &Arc<Tower>,
    basis_idx: &[usize],
    basis_balls: &[Ball],
    z: &Ball,
    max_coeff: &BigInt,
) -> Option<TowerElement> {
    let prec = z.prec;
    let mut xs: Vec<BigInt> = basis_balls.iter().map(|b| realify(&b.set_prec(prec))).collect();
    xs.push(realify(z));
    let scale = xs.iter().map(|v| v.bits()).max().unwrap_or(0);
    if scale == 0 {
        return None;
    }
    let rel = pslq(&xs, prec, max_coeff)?;
    let cz = rel.last().unwrap().clone();
    if cz.is_zero() {
        return None;
    }
    let mut num = vec![BigInt::zero(); tower.size()];
    for (k, &idx) in basis_idx.iter().enumerate() {
        num[idx] = -rel[k].clone();
    }
    TowerElement::from_parts(tower, num, cz).ok()
}

/// Embedded basis monomials of a tower at the precision of `ctx`.
pub fn basis_balls(ctx: &EmbeddingContext, tower: &Arc<Tower>, idx: &[usize]) -> Result<Vec<Ball>> {
    idx.iter()
        .map(|&i| {
            let mut num = vec![BigInt::zero(); tower.size()];
            num[i] = BigInt::one();
            ctx.embed(&TowerElement::from_parts(tower, num, BigInt::one())?)
        })
        .collect()
}

/// Reconstructs an element of `tower` from a ball of its embedding.
///
/// The search runs over subtowers of increasing degree; candidates must
/// re-embed into `z` at doubled precision. `height_bound` bounds the integer
/// relation (all numerators and the denominator).
pub fn rational_reconstruct(
    z: &Ball,
    tower: &Arc<Tower>,
    ctx: &EmbeddingContext,
    height_bound: &BigInt,
) -> Result<TowerElement> {
    if tower.height() == 0 {
        let im_ok = z.im_ball().contains_zero();
        if !im_ok {
            return Err(Error::Reconstruct("value is not real".into()));
        }
        let q = continued_fraction(z, height_bound)
            .ok_or_else(|| Error::Reconstruct("no rational within the height bound".into()))?;
        return Ok(TowerElement::from_rational(tower, &q));
    }
    let ctx = if Arc::ptr_eq(ctx.tower(), tower) { ctx.clone() } else { ctx.with_precision(ctx.precision())? };
    // PSLQ must not ask for more digits than the ball actually carries
    let acc = (-z.rad_log2()).floor();
    let eff = if acc.is_finite() { (acc as i64 - 4).clamp(32, ctx.work_precision() as i64) as u32 } else { ctx.work_precision() };
    let eff = eff.min(z.prec.max(32));
    let zp = z.set_prec(eff);
    let check = ctx.with_precision(2 * ctx.precision())?;
    for subset in closed_level_subsets(tower) {
        let idx = subset_indices(tower, &subset);
        let balls = basis_balls(&ctx, tower, &idx)?;
        if let Some(x) = pslq_in_span(tower, &idx, &balls, &zp, height_bound) {
            let e = check.embed(&x)?;
            if e.set_prec(z.prec).overlaps(z) {
                return Ok(x);
            }
        }
    }
    Err(Error::Reconstruct(format!(
        "no element of height ≤ {height_bound} matches the value {}",
        z
    )))
}

/// Convenience: reconstruct from an f64 approximation is never rigorous; this
/// only exists for diagnostics.
pub fn approx_to_string(z: Complex64) -> String {
    format!("{:.17e}{:+.17e}i", z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_over_q() {
        let b = Ball::from_i64(1, 100).div_int(&BigInt::from(3));
        let q = continued_fraction(&b, &BigInt::from(1000)).unwrap();
        assert_eq!(q, BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn pslq_finds_golden_relation() {
        let p = 200;
        let s5 = Ball::sqrt_int(&BigInt::from(5), p);
        let phi = s5.add(&Ball::from_i64(1, p)).div_int(&BigInt::from(2));
        let xs = vec![BigInt::one() << p, s5.re.clone(), phi.re.clone()];
        let r = pslq(&xs, p, &BigInt::from(1000)).unwrap();
        let v = &r[0] * &xs[0] + &r[1] * &xs[1] + &r[2] * &xs[2];
        assert!(v.abs() < (BigInt::one() << 20));
        assert!(!r[2].is_zero());
    }

    #[test]
    fn half_sqrt53_over_k() {
        let k = Tower::quadratic(53).unwrap();
        let ctx = EmbeddingContext::new(&k, 256).unwrap();
        let z = ctx.embed(&k.sqrt_d()).unwrap().div_int(&BigInt::from(2));
        let x = rational_reconstruct(&z, &k, &ctx, &BigInt::from(10u64.pow(6))).unwrap();
        assert_eq!(x, k.sqrt_d().scale(&BigRational::new(1.into(), 2.into())));
    }
}
