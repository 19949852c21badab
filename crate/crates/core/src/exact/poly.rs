//! Dense univariate polynomials with tower coefficients, constant term first.

use std::sync::Arc;

use num_complex::Complex64;

use super::ball::Ball;
use super::embed::EmbeddingContext;
use super::tower::{Tower, TowerElement};
use crate::{Error, Result};

pub type Poly = Vec<TowerElement>;

pub fn trim(p: &mut Poly) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

pub fn degree(p: &[TowerElement]) -> usize {
    let mut d = p.len() - 1;
    while d > 0 && p[d].is_zero() {
        d -= 1;
    }
    d
}

pub fn lift(p: &[TowerElement], to: &Arc<Tower>) -> Result<Poly> {
    p.iter().map(|c| c.lift(to)).collect()
}

pub fn eval(p: &[TowerElement], x: &TowerElement) -> TowerElement {
    let mut acc = p[p.len() - 1].clone();
    for c in p[..p.len() - 1].iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn add(a: &[TowerElement], b: &[TowerElement]) -> Poly {
    let n = a.len().max(b.len());
    let zero = TowerElement::zero(a[0].tower());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).unwrap_or(&zero);
            match b.get(i) {
                Some(y) => x + y,
                None => x.clone(),
            }
        })
        .collect();
    trim(&mut out);
    out
}

pub fn neg(a: &[TowerElement]) -> Poly {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &[TowerElement], b: &[TowerElement]) -> Poly {
    add(a, &neg(b))
}

pub fn mul(a: &[TowerElement], b: &[TowerElement]) -> Poly {
    let t = super::tower::common_tower(a[0].tower(), b[0].tower()).expect("unrelated towers");
    let zero = TowerElement::zero(&t);
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[TowerElement], c: &TowerElement) -> Poly {
    a.iter().map(|x| x * c).collect()
}

/// p(−t).
pub fn reflect(a: &[TowerElement]) -> Poly {
    a.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() }).collect()
}

pub fn monic(a: &[TowerElement]) -> Result<Poly> {
    let d = degree(a);
    let inv = a[d].inv()?;
    Ok(a[..=d].iter().map(|c| c * &inv).collect())
}

pub fn divrem(a: &[TowerElement], b: &[TowerElement]) -> Result<(Poly, Poly)> {
    let db = degree(b);
    if db == 0 && b[0].is_zero() {
        return Err(Error::DivisionByZero);
    }
    let lead_inv = b[db].inv()?;
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    let zero = TowerElement::zero(a[0].tower());
    if degree(&r) < db || (r.len() == 1 && r[0].is_zero()) {
        return Ok((vec![zero], r));
    }
    let mut q = vec![zero; r.len() - db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] * &lead_inv;
        for j in 0..=db {
            r[k + j] = &r[k + j] - &(&c * &b[j]);
        }
        q[k] = c;
        r.pop();
        trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    Ok((q, r))
}

pub fn derivative(a: &[TowerElement]) -> Poly {
    if a.len() == 1 {
        return vec![TowerElement::zero(a[0].tower())];
    }
    a[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c.scale_int(&num_bigint::BigInt::from(k as u64 + 1)))
        .collect()
}

/// f(t²/s) scaled by s^deg so the result is monic of degree 2·deg in t
/// (f monic).
pub fn quad_substitute(f: &[TowerElement], s: &TowerElement) -> Result<Poly> {
    let n = degree(f);
    let t = f[0].tower().clone();
    let zero = TowerElement::zero(&t);
    let mut out = vec![zero; 2 * n + 1];
    let mut spow = TowerElement::one(&t);
    // coefficient of t^{2k} is f_k s^{n-k}
    for k in (0..=n).rev() {
        out[2 * k] = &f[k] * &spow;
        spow = &spow * s;
    }
    let lead = out[2 * n].clone();
    let inv = lead.inv()?;
    Ok(out.iter().map(|c| c * &inv).collect())
}

pub fn embed(p: &[TowerElement], ctx: &EmbeddingContext) -> Result<Vec<Ball>> {
    p.iter().map(|c| ctx.embed(c)).collect()
}

pub fn approx(p: &[TowerElement], ctx: &EmbeddingContext) -> Result<Vec<Complex64>> {
    p.iter().map(|c| ctx.approx(c)).collect()
}

pub fn to_string(p: &[TowerElement]) -> String {
    let mut parts = Vec::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        parts.push(match k {
            0 => format!("({c})"),
            1 => format!("({c})*t"),
            _ => format!("({c})*t^{k}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
