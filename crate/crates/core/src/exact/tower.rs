//! Towers of number fields over ℚ(√D) and their elements.
//!
//! A tower is a chain of nodes: ℚ, then K = ℚ(√D), then each adjoined level.
//! Elements are stored densely in the power-product basis
//! √D^e₀·g₁^e₁···g_h^e_h with integer numerators over one common denominator.
//! The flat index is e₀ + 2(e₁ + d₁(e₂ + d₂(…))), so an element of a lower
//! node is lifted by padding zeros.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Raw {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

fn all_zero(v: &[BigInt]) -> bool {
    v.iter().all(|x| x.is_zero())
}

impl Raw {
    fn zero(n: usize) -> Raw {
        Raw { num: vec![BigInt::zero(); n], den: BigInt::one() }
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -&self.den;
            for x in self.num.iter_mut() {
                *x = -&*x;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for x in &self.num {
            if g.is_one() {
                return;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if all_zero(&self.num) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            for x in self.num.iter_mut() {
                *x /= &g;
            }
            self.den /= &g;
        }
    }

    // self += sign * other, over a common denominator
    fn add_assign(&mut self, other: &Raw, negate: bool) {
        if self.den == other.den {
            for (x, y) in self.num.iter_mut().zip(&other.num) {
                if negate {
                    *x -= y;
                } else {
                    *x += y;
                }
            }
            return;
        }
        let l = self.den.lcm(&other.den);
        let fs = &l / &self.den;
        let fo = &l / &other.den;
        for (x, y) in self.num.iter_mut().zip(&other.num) {
            let t = y * &fo;
            *x *= &fs;
            if negate {
                *x -= t;
            } else {
                *x += t;
            }
        }
        self.den = l;
    }
}

fn concat(parts: Vec<Raw>) -> Raw {
    let mut l = BigInt::one();
    for p in &parts {
        if !p.den.is_one() {
            l = l.lcm(&p.den);
        }
    }
    let mut num = Vec::with_capacity(parts.iter().map(|p| p.num.len()).sum());
    for p in parts {
        if p.den == l {
            num.extend(p.num);
        } else {
            let f = &l / &p.den;
            num.extend(p.num.into_iter().map(|x| x * &f));
        }
    }
    let mut r = Raw { num, den: l };
    r.normalize();
    r
}

/// One node of a tower. The root is ℚ, its child is K = ℚ(√D).
pub struct Tower {
    d: BigInt,
    parent: Option<Arc<Tower>>,
    name: String,
    degree: usize,
    size: usize,
    height: usize,
    minpoly: Vec<Raw>,
    trimmed: Vec<Raw>,
    deps: Vec<usize>,
    hint: Option<(f64, f64)>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.chain_names();
        write!(f, "Tower(D={}, levels={:?}, degree={})", self.d, names, self.size)
    }
}

pub(crate) fn is_squarefree(d: u64) -> bool {
    let mut n = d;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

impl Tower {
    /// K = ℚ(√D) for square-free D > 1.
    pub fn quadratic(d: u64) -> Result<Arc<Tower>> {
        if d < 2 || !is_squarefree(d) {
            return Err(Error::Input(format!("D = {d} is not a square-free integer > 1")));
        }
        let d = BigInt::from(d);
        let q = Arc::new(Tower {
            d: d.clone(),
            parent: None,
            name: "Q".into(),
            degree: 1,
            size: 1,
            height: 0,
            minpoly: vec![],
            trimmed: vec![],
            deps: vec![],
            hint: None,
        });
        let m0 = Raw { num: vec![-&d], den: BigInt::one() };
        let m1 = Raw { num: vec![BigInt::zero()], den: BigInt::one() };
        Ok(Arc::new(Tower {
            d,
            parent: Some(q),
            name: "sqrtD".into(),
            degree: 2,
            size: 2,
            height: 1,
            minpoly: vec![m0.clone(), m1],
            trimmed: vec![m0, Raw { num: vec![], den: BigInt::one() }],
            deps: vec![],
            hint: None,
        }))
    }

    /// Adjoins a root of x^n + c_{n-1}x^{n-1} + … + c₀ (coefficients given
    /// constant first, monic term implicit). `hint` is an approximate complex
    /// value of the root used by embeddings.
    pub fn extend(
        self: &Arc<Tower>,
        name: &str,
        minpoly: &[TowerElement],
        hint: Option<(f64, f64)>,
    ) -> Result<Arc<Tower>> {
        if self.height == 0 {
            return Err(Error::Input("extend K, not the rational node".into()));
        }
        if minpoly.len() < 2 {
            return Err(Error::Input(format!("level `{name}` must have degree at least 2")));
        }
        if self.chain().iter().any(|n| n.name == name) {
            return Err(Error::Input(format!("duplicate level name `{name}`")));
        }
        let mut raws = Vec::new();
        let mut trimmed = Vec::new();
        let mut deps: Vec<usize> = Vec::new();
        for c in minpoly {
            let c = c.lift(self)?;
            let t = c.trimmed_len();
            let node = self.ancestor_of_size(t.max(1));
            for h in 2..=node.height {
                let level = self.ancestor(h);
                if c.involves_level(&level) && !deps.contains(&h) {
                    deps.push(h);
                    for &x in &level.deps {
                        if !deps.contains(&x) {
                            deps.push(x);
                        }
                    }
                }
            }
            let tr = if c.is_zero() {
                Raw { num: vec![], den: BigInt::one() }
            } else {
                Raw { num: c.num[..t].to_vec(), den: c.den.clone() }
            };
            trimmed.push(tr);
            raws.push(Raw { num: c.num.clone(), den: c.den.clone() });
        }
        deps.sort();
        Ok(Arc::new(Tower {
            d: self.d.clone(),
            parent: Some(self.clone()),
            name: name.to_string(),
            degree: minpoly.len(),
            size: self.size * minpoly.len(),
            height: self.height + 1,
            minpoly: raws,
            trimmed,
            deps,
            hint,
        }))
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Degree of this node's generator over its parent.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Degree over ℚ.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Degree over K.
    pub fn degree_over_k(&self) -> usize {
        self.size / 2
    }

    /// 0 for ℚ, 1 for K, 2.. for adjoined levels.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn parent(&self) -> Option<&Arc<Tower>> {
        self.parent.as_ref()
    }

    pub fn hint(&self) -> Option<(f64, f64)> {
        self.hint
    }

    /// Heights of lower adjoined levels that this level's polynomial depends on.
    pub fn deps(&self) -> &[usize] {
        &self.deps
    }

    fn chain_names(&self) -> Vec<String> {
        let mut v = vec![self.name.clone()];
        let mut cur = self.parent.as_ref();
        while let Some(p) = cur {
            v.push(p.name.clone());
            cur = p.parent.as_ref();
        }
        v.reverse();
        v
    }

    /// Nodes from ℚ up to and including `self`.
    pub fn chain(self: &Arc<Tower>) -> Vec<Arc<Tower>> {
        let mut v = vec![self.clone()];
        let mut cur = self.parent.clone();
        while let Some(p) = cur {
            cur = p.parent.clone();
            v.push(p);
        }
        v.reverse();
        v
    }

    /// Adjoined levels above K, lowest first.
    pub fn levels(self: &Arc<Tower>) -> Vec<Arc<Tower>> {
        self.chain().into_iter().filter(|n| n.height >= 2).collect()
    }

    pub fn ancestor(self: &Arc<Tower>, height: usize) -> Arc<Tower> {
        assert!(height <= self.height, "no ancestor at height {height}");
        let mut cur = self.clone();
        while cur.height > height {
            cur = cur.parent.clone().unwrap();
        }
        cur
    }

    pub(crate) fn ancestor_of_size(self: &Arc<Tower>, size: usize) -> Arc<Tower> {
        let mut cur = self.clone();
        while cur.size > size {
            match &cur.parent {
                Some(p) if p.size >= size => cur = p.clone(),
                _ => break,
            }
        }
        cur
    }

    /// The node named `name` in the chain.
    pub fn level(self: &Arc<Tower>, name: &str) -> Option<Arc<Tower>> {
        self.chain().into_iter().find(|n| n.name == name)
    }

    pub fn field_k(self: &Arc<Tower>) -> Arc<Tower> {
        self.ancestor(1)
    }

    pub fn is_prefix_of(self: &Arc<Tower>, other: &Arc<Tower>) -> bool {
        if self.height > other.height {
            return false;
        }
        Arc::ptr_eq(&other.ancestor(self.height), self)
    }

    /// Level polynomial coefficients (constant first, monic term implicit) as
    /// elements of the parent node.
    pub fn minpoly(self: &Arc<Tower>) -> Vec<TowerElement> {
        match &self.parent {
            None => vec![],
            Some(p) => self
                .minpoly
                .iter()
                .map(|r| TowerElement::from_raw(p.clone(), r.clone()))
                .collect(),
        }
    }

    pub fn generator(self: &Arc<Tower>) -> TowerElement {
        let mut num = vec![BigInt::zero(); self.size];
        if self.height == 0 {
            num[0] = BigInt::one();
        } else {
            num[self.size / self.degree] = BigInt::one();
        }
        TowerElement { tower: self.clone(), num, den: BigInt::one() }
    }

    pub fn sqrt_d(self: &Arc<Tower>) -> TowerElement {
        self.ancestor(1).generator().lift(self).unwrap()
    }

    /// Flat index of the monomial with the given exponents (√D first, then
    /// levels in order).
    pub fn monomial_index(self: &Arc<Tower>, exps: &[usize]) -> usize {
        let chain = self.chain();
        let mut idx = 0;
        let mut stride = 1;
        for (k, node) in chain.iter().skip(1).enumerate() {
            let e = exps.get(k).copied().unwrap_or(0);
            assert!(e < node.degree);
            idx += e * stride;
            stride *= node.degree;
        }
        idx
    }

    /// Exponent vector of a flat index.
    pub fn monomial_exponents(self: &Arc<Tower>, mut idx: usize) -> Vec<usize> {
        let chain = self.chain();
        let mut out = Vec::new();
        for node in chain.iter().skip(1) {
            out.push(idx % node.degree);
            idx /= node.degree;
        }
        out
    }
}

pub(crate) fn mul_raw(node: &Tower, a: &[BigInt], b: &[BigInt]) -> Raw {
    debug_assert_eq!(a.len(), node.size);
    if b.len() == 1 {
        let s = &b[0];
        return Raw { num: a.iter().map(|x| x * s).collect(), den: BigInt::one() };
    }
    let parent = node.parent.as_ref().expect("rational node has size 1");
    let cs = parent.size;
    if b.len() < node.size {
        let parts: Vec<Raw> = a
            .chunks(cs)
            .map(|c| if all_zero(c) { Raw::zero(cs) } else { mul_raw(parent, c, b) })
            .collect();
        return concat(parts);
    }
    if node.height == 1 {
        let d = &node.d;
        let n0 = &a[0] * &b[0] + d * (&a[1] * &b[1]);
        let n1 = &a[0] * &b[1] + &a[1] * &b[0];
        return Raw { num: vec![n0, n1], den: BigInt::one() };
    }
    let deg = node.degree;
    let ach: Vec<&[BigInt]> = a.chunks(cs).collect();
    let bch: Vec<&[BigInt]> = b.chunks(cs).collect();
    let anz: Vec<bool> = ach.iter().map(|c| !all_zero(c)).collect();
    let bnz: Vec<bool> = bch.iter().map(|c| !all_zero(c)).collect();
    let mut acc: Vec<Option<Raw>> = vec![None; 2 * deg - 1];
    for i in 0..deg {
        if !anz[i] {
            continue;
        }
        for j in 0..deg {
            if !bnz[j] {
                continue;
            }
            let p = mul_raw(parent, ach[i], bch[j]);
            match &mut acc[i + j] {
                Some(s) => s.add_assign(&p, false),
                slot @ None => *slot = Some(p),
            }
        }
    }
    for k in (deg..2 * deg - 1).rev() {
        let c = match acc[k].take() {
            Some(c) if !all_zero(&c.num) => c,
            _ => continue,
        };
        for (j, m) in node.trimmed.iter().enumerate() {
            if m.num.is_empty() {
                continue;
            }
            let mut p = mul_raw(parent, &c.num, &m.num);
            p.den = &p.den * &c.den * &m.den;
            match &mut acc[k - deg + j] {
                Some(s) => s.add_assign(&p, true),
                slot @ None => {
                    for x in p.num.iter_mut() {
                        *x = -&*x;
                    }
                    *slot = Some(p)
                }
            }
        }
    }
    let parts: Vec<Raw> = acc
        .into_iter()
        .take(deg)
        .map(|o| o.unwrap_or_else(|| Raw::zero(cs)))
        .collect();
    concat(parts)
}

/// An element of a tower node.
#[derive(Clone)]
pub struct TowerElement {
    tower: Arc<Tower>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain = self.tower.chain();
        let mut terms = Vec::new();
        for (idx, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let exps = self.tower.monomial_exponents(idx);
            let mut mono = Vec::new();
            for (k, e) in exps.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let name = &chain[k + 1].name;
                if *e == 1 {
                    mono.push(name.clone());
                } else {
                    mono.push(format!("{name}^{e}"));
                }
            }
            let coef = BigRational::new(c.clone(), self.den.clone());
            if mono.is_empty() {
                terms.push(format!("{coef}"));
            } else {
                terms.push(format!("{coef}*{}", mono.join("*")));
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.tower, &other.tower) {
            return self.num == other.num && self.den == other.den;
        }
        match common_tower(&self.tower, &other.tower) {
            Ok(t) => {
                let a = self.lift(&t).unwrap();
                let b = other.lift(&t).unwrap();
                a.num == b.num && a.den == b.den
            }
            Err(_) => false,
        }
    }
}

impl Eq for TowerElement {}

pub(crate) fn common_tower(a: &Arc<Tower>, b: &Arc<Tower>) -> Result<Arc<Tower>> {
    if Arc::ptr_eq(a, b) {
        return Ok(a.clone());
    }
    if a.is_prefix_of(b) {
        Ok(b.clone())
    } else if b.is_prefix_of(a) {
        Ok(a.clone())
    } else {
        Err(Error::TowerMismatch(format!("{a:?} vs {b:?}")))
    }
}

impl TowerElement {
    pub(crate) fn from_raw(tower: Arc<Tower>, mut raw: Raw) -> TowerElement {
        assert_eq!(raw.num.len(), tower.size);
        raw.normalize();
        TowerElement { tower, num: raw.num, den: raw.den }
    }

    /// Builds an element from integer numerators over a common denominator.
    pub fn from_parts(tower: &Arc<Tower>, num: Vec<BigInt>, den: BigInt) -> Result<TowerElement> {
        if den.is_zero() {
            return Err(Error::Input("zero denominator".into()));
        }
        if num.len() != tower.size {
            return Err(Error::Input(format!(
                "expected {} coefficients, got {}",
                tower.size,
                num.len()
            )));
        }
        Ok(TowerElement::from_raw(tower.clone(), Raw { num, den }))
    }

    pub fn from_i64s(tower: &Arc<Tower>, num: &[i64], den: i64) -> Result<TowerElement> {
        let mut v: Vec<BigInt> = num.iter().map(|&x| BigInt::from(x)).collect();
        v.resize(tower.size, BigInt::zero());
        TowerElement::from_parts(tower, v, BigInt::from(den))
    }

    pub fn zero(tower: &Arc<Tower>) -> TowerElement {
        TowerElement { tower: tower.clone(), num: vec![BigInt::zero(); tower.size], den: BigInt::one() }
    }

    pub fn one(tower: &Arc<Tower>) -> TowerElement {
        TowerElement::from_int(tower, 1)
    }

    pub fn from_int(tower: &Arc<Tower>, n: i64) -> TowerElement {
        TowerElement::from_bigint(tower, BigInt::from(n))
    }

    pub fn from_bigint(tower: &Arc<Tower>, n: BigInt) -> TowerElement {
        let mut num = vec![BigInt::zero(); tower.size];
        num[0] = n;
        TowerElement { tower: tower.clone(), num, den: BigInt::one() }
    }

    pub fn from_rational(tower: &Arc<Tower>, q: &BigRational) -> TowerElement {
        let mut num = vec![BigInt::zero(); tower.size];
        num[0] = q.numer().clone();
        TowerElement::from_raw(tower.clone(), Raw { num, den: q.denom().clone() })
    }

    /// a + b√D.
    pub fn quad(tower: &Arc<Tower>, a: &BigRational, b: &BigRational) -> TowerElement {
        let l = a.denom().lcm(b.denom());
        let mut num = vec![BigInt::zero(); tower.size];
        num[0] = a.numer() * (&l / a.denom());
        num[1] = b.numer() * (&l / b.denom());
        TowerElement::from_raw(tower.clone(), Raw { num, den: l })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeff(&self, idx: usize) -> BigRational {
        BigRational::new(self.num[idx].clone(), self.den.clone())
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        (0..self.num.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        all_zero(&self.num)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && all_zero(&self.num[1..])
    }

    /// Some(q) if the element is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if all_zero(&self.num[1..]) {
            Some(self.coeff(0))
        } else {
            None
        }
    }

    /// Length of the shortest chain prefix containing the element.
    pub(crate) fn trimmed_len(&self) -> usize {
        let last = match self.num.iter().rposition(|x| !x.is_zero()) {
            Some(i) => i,
            None => return 1,
        };
        let mut size = 1;
        for node in self.tower.chain() {
            size = node.size;
            if last < size {
                break;
            }
        }
        size
    }

    /// The smallest node of the chain containing the element.
    pub fn min_node(&self) -> Arc<Tower> {
        self.tower.ancestor_of_size(self.trimmed_len())
    }

    pub(crate) fn involves_level(&self, level: &Arc<Tower>) -> bool {
        if level.height > self.tower.height || level.height < 1 {
            return false;
        }
        let below = level.size / level.degree;
        self.num.iter().enumerate().any(|(i, x)| !x.is_zero() && !(i / below).is_multiple_of(level.degree))
    }

    /// Re-expresses the element in a node that has this element's node as prefix.
    pub fn lift(&self, to: &Arc<Tower>) -> Result<TowerElement> {
        if Arc::ptr_eq(&self.tower, to) {
            return Ok(self.clone());
        }
        if self.tower.is_prefix_of(to) {
            let mut num = self.num.clone();
            num.resize(to.size, BigInt::zero());
            return Ok(TowerElement { tower: to.clone(), num, den: self.den.clone() });
        }
        if to.is_prefix_of(&self.tower) && self.trimmed_len() <= to.size {
            return Ok(TowerElement {
                tower: to.clone(),
                num: self.num[..to.size].to_vec(),
                den: self.den.clone(),
            });
        }
        Err(Error::TowerMismatch(format!("cannot move {} into {:?}", self, to)))
    }

    /// Coefficient of g^k for the top generator g, as an element of the parent.
    pub fn chunk(&self, k: usize) -> TowerElement {
        let p = self.tower.parent.clone().expect("no parent of the rational node");
        let cs = p.size;
        TowerElement::from_raw(
            p,
            Raw { num: self.num[k * cs..(k + 1) * cs].to_vec(), den: self.den.clone() },
        )
    }

    pub fn chunks(&self) -> Vec<TowerElement> {
        (0..self.tower.degree).map(|k| self.chunk(k)).collect()
    }

    /// Σ c_k g^k with c_k in the parent of `tower`.
    pub fn from_chunks(tower: &Arc<Tower>, chunks: &[TowerElement]) -> Result<TowerElement> {
        let p = tower.parent.clone().ok_or_else(|| Error::Input("rational node".into()))?;
        if chunks.len() != tower.degree {
            return Err(Error::Input("wrong number of chunks".into()));
        }
        let parts: Result<Vec<Raw>> = chunks
            .iter()
            .map(|c| c.lift(&p).map(|c| Raw { num: c.num, den: c.den }))
            .collect();
        Ok(TowerElement::from_raw(tower.clone(), concat(parts?)))
    }

    fn binary(&self, other: &TowerElement) -> (TowerElement, TowerElement) {
        if Arc::ptr_eq(&self.tower, &other.tower) {
            return (self.clone(), other.clone());
        }
        let t = common_tower(&self.tower, &other.tower).expect("elements of unrelated towers");
        (self.lift(&t).unwrap(), other.lift(&t).unwrap())
    }

    fn add_impl(&self, other: &TowerElement, negate: bool) -> TowerElement {
        let (a, b) = if Arc::ptr_eq(&self.tower, &other.tower) {
            (None, None)
        } else {
            let (a, b) = self.binary(other);
            (Some(a), Some(b))
        };
        let a = a.as_ref().unwrap_or(self);
        let b = b.as_ref().unwrap_or(other);
        let mut r = Raw { num: a.num.clone(), den: a.den.clone() };
        r.add_assign(&Raw { num: b.num.clone(), den: b.den.clone() }, negate);
        TowerElement::from_raw(a.tower.clone(), r)
    }

    fn mul_impl(&self, other: &TowerElement) -> TowerElement {
        let (a, b) = self.binary(other);
        if a.is_zero() || b.is_zero() {
            return TowerElement::zero(&a.tower);
        }
        let la = a.trimmed_len();
        let lb = b.trimmed_len();
        let (x, y, ly) = if la >= lb { (&a, &b, lb) } else { (&b, &a, la) };
        let mut r = mul_raw(&x.tower, &x.num, &y.num[..ly]);
        r.den = &r.den * &x.den * &y.den;
        TowerElement::from_raw(x.tower.clone(), r)
    }

    pub fn square(&self) -> TowerElement {
        self.mul_impl(self)
    }

    pub fn scale(&self, q: &BigRational) -> TowerElement {
        let r = Raw {
            num: self.num.iter().map(|x| x * q.numer()).collect(),
            den: &self.den * q.denom(),
        };
        TowerElement::from_raw(self.tower.clone(), r)
    }

    pub fn scale_int(&self, n: &BigInt) -> TowerElement {
        let r = Raw { num: self.num.iter().map(|x| x * n).collect(), den: self.den.clone() };
        TowerElement::from_raw(self.tower.clone(), r)
    }

    pub fn inv(&self) -> Result<TowerElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let node = self.min_node();
        let x = self.lift(&node)?;
        inv_rec(&x)?.lift(&self.tower)
    }

    pub fn div(&self, other: &TowerElement) -> Result<TowerElement> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<TowerElement> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = TowerElement::one(&self.tower);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        Ok(acc)
    }

    /// a − b√D for an element of K.
    pub fn tau_k(&self) -> Result<TowerElement> {
        if self.trimmed_len() > 2 {
            return Err(Error::Input("τ is applied to elements of K only".into()));
        }
        let mut num = self.num.clone();
        num[1] = -&num[1];
        Ok(TowerElement { tower: self.tower.clone(), num, den: self.den.clone() })
    }

    /// Lexicographic order on the rational coefficient vectors.
    pub fn cmp_lex(&self, other: &TowerElement) -> Ordering {
        let (a, b) = self.binary(other);
        for i in 0..a.num.len() {
            let c = (&a.num[i] * &b.den).cmp(&(&b.num[i] * &a.den));
            if c != Ordering::Equal {
                return c;
            }
        }
        Ordering::Equal
    }

    /// Maximum bit length of numerators and denominator.
    pub fn height_bits(&self) -> u64 {
        self.num.iter().map(|x| x.bits()).max().unwrap_or(0).max(self.den.bits())
    }
}

fn poly_trim(p: &mut Vec<TowerElement>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

fn poly_sub_mul(a: &[TowerElement], q: &[TowerElement], b: &[TowerElement]) -> Vec<TowerElement> {
    let zero = TowerElement::zero(a[0].tower());
    let n = a.len().max(q.len() + b.len() - 1);
    let mut out: Vec<TowerElement> = (0..n).map(|i| a.get(i).cloned().unwrap_or_else(|| zero.clone())).collect();
    for (i, qi) in q.iter().enumerate() {
        if qi.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] - &(qi * bj);
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_divrem(a: &[TowerElement], b: &[TowerElement]) -> Result<(Vec<TowerElement>, Vec<TowerElement>)> {
    let zero = TowerElement::zero(a[0].tower());
    let db = b.len() - 1;
    let lead_inv = b[db].inv()?;
    let mut r = a.to_vec();
    poly_trim(&mut r);
    if r.len() < b.len() {
        return Ok((vec![zero], r));
    }
    let mut q = vec![zero.clone(); r.len() - db];
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &(&c * bj);
        }
        q[k] = c;
        r.pop();
        poly_trim(&mut r);
        if r.len() <= db {
            break;
        }
    }
    Ok((q, r))
}

fn inv_rec(x: &TowerElement) -> Result<TowerElement> {
    let node = x.tower.clone();
    match node.height {
        0 => {
            let q = x.coeff(0);
            Ok(TowerElement::from_rational(&node, &q.recip()))
        }
        1 => {
            let n = &x.num[0] * &x.num[0] - &node.d * &x.num[1] * &x.num[1];
            if n.is_zero() {
                return Err(Error::Reducible(node.name.clone()));
            }
            let r = Raw { num: vec![&x.num[0] * &x.den, -&x.num[1] * &x.den], den: n };
            Ok(TowerElement::from_raw(node, r))
        }
        _ => {
            let parent = node.parent.clone().unwrap();
            let mut a = x.chunks();
            poly_trim(&mut a);
            if a.len() == 1 {
                return a[0].inv()?.lift(&node);
            }
            let mut m = node.minpoly();
            m.push(TowerElement::one(&parent));
            let mut r0 = m;
            let mut r1 = a;
            let mut s0 = vec![TowerElement::zero(&parent)];
            let mut s1 = vec![TowerElement::one(&parent)];
            loop {
                if r1.len() == 1 {
                    if r1[0].is_zero() {
                        return Err(Error::Reducible(node.name.clone()));
                    }
                    let ci = r1[0].inv()?;
                    let mut out: Vec<TowerElement> = s1.iter().map(|s| s * &ci).collect();
                    out.resize(node.degree, TowerElement::zero(&parent));
                    return TowerElement::from_chunks(&node, &out);
                }
                let (q, r) = poly_divrem(&r0, &r1)?;
                let s2 = poly_sub_mul(&s0, &q, &s1);
                r0 = std::mem::replace(&mut r1, r);
                s0 = std::mem::replace(&mut s1, s2);
            }
        }
    }
}

impl<'a> Add<&'a TowerElement> for &'a TowerElement {
    type Output = TowerElement;
    fn add(self, rhs: &TowerElement) -> TowerElement {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a TowerElement> for &'a TowerElement {
    type Output = TowerElement;
    fn sub(self, rhs: &TowerElement) -> TowerElement {
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a TowerElement> for &'a TowerElement {
    type Output = TowerElement;
    fn mul(self, rhs: &TowerElement) -> TowerElement {
        self.mul_impl(rhs)
    }
}

impl Neg for &TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        TowerElement {
            tower: self.tower.clone(),
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den.clone(),
        }
    }
}

impl Add for TowerElement {
    type Output = TowerElement;
    fn add(self, rhs: TowerElement) -> TowerElement {
        &self + &rhs
    }
}

impl Sub for TowerElement {
    type Output = TowerElement;
    fn sub(self, rhs: TowerElement) -> TowerElement {
        &self - &rhs
    }
}

impl Mul for TowerElement {
    type Output = TowerElement;
    fn mul(self, rhs: TowerElement) -> TowerElement {
        &self * &rhs
    }
}

impl Neg for TowerElement {
    type Output = TowerElement;
    fn neg(self) -> TowerElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn d52() -> Arc<Tower> {
        let k = Tower::quadratic(53).unwrap();
        let c0 = TowerElement::quad(&k, &q(-23, 2), &q(3, 2));
        let t1 = k.extend("t1", &[c0, TowerElement::zero(&k)], None).unwrap();
        let g1 = t1.generator();
        let a = t1.sqrt_d();
        let c = &(&a + &TowerElement::one(&t1))
            - &(&g1 * &TowerElement::quad(&t1.field_k(), &q(68, 13), &q(10, 13)));
        t1.extend("t2", &[c, TowerElement::zero(&t1)], None).unwrap()
    }

    #[test]
    fn t1_squared() {
        let t = d52();
        let t1 = t.level("t1").unwrap().generator();
        let k = t.field_k();
        assert_eq!(t1.square(), TowerElement::quad(&k, &q(23, 2), &q(-3, 2)));
    }

    #[test]
    fn inverse_round_trip() {
        let t = d52();
        let x = TowerElement::from_i64s(&t, &[3, -1, 2, 5, 0, 7, -4, 1], 3).unwrap();
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn reducible_level_is_reported() {
        let k = Tower::quadratic(5).unwrap();
        // x² − 5 has the root √5 in K
        let bad = k.extend("r", &[TowerElement::from_int(&k, -5), TowerElement::zero(&k)], None).unwrap();
        let g = bad.generator();
        let x = &g - &bad.sqrt_d();
        assert!(matches!(x.inv(), Err(Error::Reducible(_))));
    }
}
