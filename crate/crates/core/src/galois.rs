//! Automorphisms of towers over K, their discovery, and exact root lifting.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::embed::{approx_roots, certify_root, default_root_index};
use crate::exact::{poly, rational_reconstruct, Ball, EmbeddingContext, Poly, Tower, TowerElement};
use crate::stark_io::{decode_element, encode_minimal, CoeffJson};
use crate::{Error, Result};

/// Default height bound for reconstructions in this module.
pub fn default_height() -> BigInt {
    BigInt::from(10u32).pow(40)
}

/// A field automorphism, given by the images of the level generators and
/// the sign of √D. It acts on the basis by an integer matrix over a common
/// denominator, precomputed on construction.
#[derive(Clone)]
pub struct Automorphism {
    tower: Arc<Tower>,
    images: Vec<TowerElement>,
    sqrt_d_sign: i32,
    cols: Arc<Vec<Vec<BigInt>>>,
    den: BigInt,
}

impl std::fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = self.tower.levels().iter().map(|l| l.name().to_string()).collect();
        write!(f, "Automorphism(√D ↦ {}√D", self.sqrt_d_sign)?;
        for (n, im) in names.iter().zip(&self.images) {
            write!(f, ", {n} ↦ {im}")?;
        }
        write!(f, ")")
    }
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tower, &other.tower) && self.sqrt_d_sign == other.sqrt_d_sign && self.images == other.images
    }
}

/// Evaluates x (at `node`) with the level generators replaced by `images` and
/// √D by s√D. Only images of levels up to node.height() are used.
fn eval_at(x_num: &[BigInt], node: &Arc<Tower>, images: &[TowerElement], sign: i32, target: &Arc<Tower>) -> TowerElement {
    match node.height() {
        0 => TowerElement::from_bigint(target, x_num[0].clone()),
        1 => {
            let k = node.clone();
            let b = if sign < 0 { -&x_num[1] } else { x_num[1].clone() };
            TowerElement::from_parts(&k, vec![x_num[0].clone(), b], BigInt::one()).unwrap().lift(target).unwrap()
        }
        h => {
            let parent = node.parent().unwrap().clone();
            let cs = parent.size();
            let g = &images[h - 2];
            let chunks: Vec<&[BigInt]> = x_num.chunks(cs).collect();
            let mut acc = eval_at(chunks[chunks.len() - 1], &parent, images, sign, target);
            for c in chunks[..chunks.len() - 1].iter().rev() {
                acc = &(&acc * g) + &eval_at(c, &parent, images, sign, target);
            }
            acc
        }
    }
}

impl Automorphism {
    /// Builds the map and checks exactly that each image is a root of the
    /// level polynomial transported by the map on the lower levels.
    pub fn new(tower: &Arc<Tower>, images: Vec<TowerElement>, sqrt_d_sign: i32) -> Result<Automorphism> {
        let levels = tower.levels();
        if images.len() != levels.len() {
            return Err(Error::Input(format!("{} images for {} levels", images.len(), levels.len())));
        }
        if sqrt_d_sign.abs() != 1 {
            return Err(Error::Input("image of √D must be ±√D".into()));
        }
        let images: Vec<TowerElement> = images.iter().map(|x| x.lift(tower)).collect::<Result<_>>()?;
        for (k, lv) in levels.iter().enumerate() {
            if images[k].min_node().height() > lv.height() {
                return Err(Error::Invariant(format!(
                    "image of `{}` does not lie in the subfield it generates",
                    lv.name()
                )));
            }
            let parent = lv.parent().unwrap();
            let mut acc = TowerElement::one(tower);
            let mut val = TowerElement::zero(tower);
            for c in lv.minpoly() {
                let c = c.lift(parent)?;
                let tc = eval_at(c.numerators(), parent, &images, sqrt_d_sign, tower);
                let tc = tc.scale(&num_rational::BigRational::new(BigInt::one(), c.denominator().clone()));
                val = &val + &(&tc * &acc);
                acc = &acc * &images[k];
            }
            val = &val + &acc;
            if !val.is_zero() {
                return Err(Error::Invariant(format!("image of `{}` is not a root of its transported polynomial", lv.name())));
            }
        }
        Ok(Self::assemble(tower, images, sqrt_d_sign))
    }

    fn assemble(tower: &Arc<Tower>, images: Vec<TowerElement>, sqrt_d_sign: i32) -> Automorphism {
        let n = tower.size();
        let mut col_elems = Vec::with_capacity(n);
        for idx in 0..n {
            let mut num = vec![BigInt::zero(); n];
            num[idx] = BigInt::one();
            col_elems.push(eval_at(&num, tower, &images, sqrt_d_sign, tower));
        }
        let den = col_elems.iter().fold(BigInt::one(), |l, c| l.lcm(c.denominator()));
        let cols = col_elems
            .iter()
            .map(|c| {
                let f = &den / c.denominator();
                c.numerators().iter().map(|v| v * &f).collect()
            })
            .collect();
        Automorphism { tower: tower.clone(), images, sqrt_d_sign, cols: Arc::new(cols), den }
    }

    pub fn identity(tower: &Arc<Tower>) -> Automorphism {
        let images = tower.levels().iter().map(|l| l.generator().lift(tower).unwrap()).collect();
        Self::assemble(tower, images, 1)
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn images(&self) -> &[TowerElement] {
        &self.images
    }

    pub fn sqrt_d_sign(&self) -> i32 {
        self.sqrt_d_sign
    }

    /// Fixes K pointwise.
    pub fn fixes_k(&self) -> bool {
        self.sqrt_d_sign == 1
    }

    pub fn apply(&self, x: &TowerElement) -> TowerElement {
        let x = x.lift(&self.tower).expect("element outside the automorphism's tower");
        let n = self.tower.size();
        let xs = x.numerators();
        let mut out = vec![BigInt::zero(); n];
        for (j, col) in self.cols.iter().enumerate() {
            if xs[j].is_zero() {
                continue;
            }
            for (o, c) in out.iter_mut().zip(col) {
                if !c.is_zero() {
                    *o += c * &xs[j];
                }
            }
        }
        TowerElement::from_parts(&self.tower, out, &self.den * x.denominator()).unwrap()
    }

    pub fn apply_poly(&self, f: &[TowerElement]) -> Poly {
        f.iter().map(|c| self.apply(c)).collect()
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        let images = other.images.iter().map(|g| self.apply(g)).collect();
        Self::assemble(&self.tower, images, self.sqrt_d_sign * other.sqrt_d_sign)
    }

    pub fn pow(&self, e: u64) -> Automorphism {
        let mut acc = Automorphism::identity(&self.tower);
        for _ in 0..e {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.sqrt_d_sign == 1
            && self.tower.levels().iter().zip(&self.images).all(|(l, im)| l.generator().lift(&self.tower).unwrap() == *im)
    }

    /// Smallest n ≥ 1 with selfⁿ = id (exact), up to `max`.
    pub fn order(&self, max: u64) -> Option<u64> {
        let mut acc = self.clone();
        for n in 1..=max {
            if acc.is_identity() {
                return Some(n);
            }
            acc = self.compose(&acc);
        }
        None
    }

    /// Restriction to a prefix node (valid when the prefix is normal over K).
    pub fn restrict(&self, node: &Arc<Tower>) -> Result<Automorphism> {
        let k = node.levels().len();
        let images = self.images[..k].iter().map(|x| x.lift(node)).collect::<Result<Vec<_>>>()?;
        Automorphism::new(node, images, self.sqrt_d_sign)
    }

    /// Values of the images under the embedding: the embedding e∘self.
    pub fn embedded_images(&self, ctx: &EmbeddingContext) -> Result<Vec<Complex64>> {
        self.images.iter().map(|x| ctx.approx(x)).collect()
    }

    pub fn to_json(&self) -> AutomorphismJson {
        AutomorphismJson { images: self.images.iter().map(encode_minimal).collect(), sqrt_d_sign: self.sqrt_d_sign }
    }

    pub fn from_json(j: &AutomorphismJson, tower: &Arc<Tower>) -> Result<Automorphism> {
        let images = j
            .images
            .iter()
            .enumerate()
            .map(|(k, c)| decode_element(c, tower, &format!("images[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        Automorphism::new(tower, images, j.sqrt_d_sign)
    }

    /// Lexicographic key on the image coefficients.
    fn lex_cmp(&self, other: &Automorphism) -> std::cmp::Ordering {
        for (a, b) in self.images.iter().zip(&other.images) {
            match a.cmp_lex(b) {
                std::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        self.sqrt_d_sign.cmp(&other.sqrt_d_sign)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AutomorphismJson {
    pub images: Vec<CoeffJson>,
    pub sqrt_d_sign: i32,
}

/// Numerical values of x under the embedding e∘g, where e∘g is given by the
/// embedded images of the generators.
fn eval_numeric(x: &TowerElement, vals: &[Complex64], sqrt_d: f64, sign: i32) -> Complex64 {
    fn rec(num: &[BigInt], node: &Arc<Tower>, vals: &[Complex64], sd: f64) -> Complex64 {
        match node.height() {
            0 => Complex64::new(big_f64(&num[0]), 0.0),
            1 => Complex64::new(big_f64(&num[0]) + big_f64(&num[1]) * sd, 0.0),
            h => {
                let parent = node.parent().unwrap();
                let g = vals[h - 2];
                let chunks: Vec<&[BigInt]> = num.chunks(parent.size()).collect();
                let mut acc = rec(chunks[chunks.len() - 1], parent, vals, sd);
                for c in chunks[..chunks.len() - 1].iter().rev() {
                    acc = acc * g + rec(c, parent, vals, sd);
                }
                acc
            }
        }
    }
    rec(x.numerators(), x.tower(), vals, sqrt_d * sign as f64) / big_f64(x.denominator())
}

fn big_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Gal(T/K) for an abelian tower T.
#[derive(Clone, Debug)]
pub struct GaloisGroup {
    pub tower: Arc<Tower>,
    pub elements: Vec<Automorphism>,
    /// table[a][b] = index of elements[a] ∘ elements[b]
    pub table: Vec<Vec<usize>>,
    /// index of complex conjugation
    pub conj: usize,
    embedded: Vec<Vec<Complex64>>,
}

impl GaloisGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.elements.iter().position(|a| a.is_identity()).unwrap()
    }

    pub fn conjugation(&self) -> &Automorphism {
        &self.elements[self.conj]
    }

    /// Order of an element from the table.
    pub fn element_order(&self, a: usize) -> usize {
        let id = self.identity();
        let mut cur = a;
        let mut n = 1;
        while cur != id {
            cur = self.table[a][cur];
            n += 1;
        }
        n
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.element_order(a) == self.order())
    }

    /// Index of the element equal to `g` (matched by embeddings, confirmed exactly).
    pub fn index_of(&self, g: &Automorphism, ctx: &EmbeddingContext) -> Option<usize> {
        let v = g.embedded_images(ctx).ok()?;
        let i = nearest_tuple(&self.embedded, &v)?;
        (self.elements[i] == *g).then_some(i)
    }

    /// σ: elements of order `ord` fixing the given element, the
    /// lexicographically first by image coefficients.
    pub fn select_sigma(&self, ord: usize, fixing: Option<&TowerElement>) -> Option<usize> {
        let mut cands: Vec<usize> = (0..self.order())
            .filter(|&a| self.element_order(a) == ord)
            .filter(|&a| fixing.is_none_or(|x| self.elements[a].apply(x) == *x))
            .collect();
        cands.sort_by(|&a, &b| self.elements[a].lex_cmp(&self.elements[b]));
        cands.first().copied()
    }

    /// Elements that fix `x`.
    pub fn stabilizer(&self, x: &TowerElement) -> Vec<usize> {
        (0..self.order()).filter(|&a| self.elements[a].apply(x) == *x).collect()
    }

    pub fn subgroups_of_index(&self, idx: usize) -> Vec<Vec<usize>> {
        // abelian groups here are small; enumerate subgroups generated by ≤ 2 elements
        let n = self.order();
        if idx == 0 || !n.is_multiple_of(idx) {
            return vec![];
        }
        let target = n / idx;
        let mut out: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            for b in a..n {
                let h = self.generated(&[a, b]);
                if h.len() == target && !out.contains(&h) {
                    out.push(h);
                }
            }
        }
        out
    }

    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = vec![self.identity()];
        let mut frontier = set.clone();
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.table[g][x];
                if !set.contains(&y) {
                    set.push(y);
                    frontier.push(y);
                }
            }
        }
        set.sort();
        set
    }
}

fn nearest_tuple(list: &[Vec<Complex64>], v: &[Complex64]) -> Option<usize> {
    let dist = |w: &Vec<Complex64>| -> f64 { w.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) };
    let mut best = None;
    let mut bd = f64::INFINITY;
    for (i, w) in list.iter().enumerate() {
        let d = dist(w);
        if d < bd {
            bd = d;
            best = Some(i);
        }
    }
    let scale = 1.0 + v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if bd < 1e-6 * scale {
        best
    } else {
        None
    }
}

/// Roots of f (coefficients in the tower, constant first) in the tower,
/// each verified exactly by substitution. Numerical roots are tried in the
/// default order (largest real part, then smallest imaginary part).
pub fn root_lift_all(f: &[TowerElement], ctx: &EmbeddingContext, height: &BigInt) -> Result<Vec<TowerElement>> {
    let tower = ctx.tower().clone();
    let f: Poly = poly::lift(f, &tower)?;
    let n = poly::degree(&f);
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        let r = (-&f[0]).div(&f[1])?;
        return Ok(vec![r]);
    }
    let mut out: Vec<TowerElement> = Vec::new();
    let mut last_err = None;
    for bits in [ctx.precision().max(256), 768, 2048] {
        let c = ctx.with_precision(bits)?;
        let coeffs: Vec<Ball> = poly::embed(&f, &c)?;
        let approx: Vec<Complex64> = coeffs.iter().map(|b| b.to_complex()).collect();
        let mut roots = approx_roots(&approx);
        let mut ordered = Vec::with_capacity(roots.len());
        while !roots.is_empty() {
            let i = default_root_index(&roots);
            ordered.push(roots.remove(i));
        }
        out.clear();
        for z in ordered {
            let ball = match certify_root(&coeffs, z) {
                Ok(b) => b,
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            };
            if out.iter().any(|r| c.embed(r).map(|e| e.overlaps(&ball)).unwrap_or(false)) {
                continue;
            }
            match rational_reconstruct(&ball, &tower, &c, height) {
                Ok(x) if poly::eval(&f, &x).is_zero() => out.push(x),
                Ok(_) => last_err = Some(Error::Reconstruct("reconstructed value is not a root".into())),
                Err(e) => last_err = Some(e),
            }
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Reconstruct("no root in the tower".into())))
}

/// One root of f in the tower (the first in the default order that lifts).
pub fn root_lift(f: &[TowerElement], ctx: &EmbeddingContext, height: &BigInt) -> Result<TowerElement> {
    let tower = ctx.tower().clone();
    let f: Poly = poly::lift(f, &tower)?;
    if poly::degree(&f) == 1 {
        return (-&f[0]).div(&f[1]);
    }
    root_lift_all(&f, ctx, height)?.into_iter().next().ok_or_else(|| Error::Reconstruct("no root".into()))
}

/// All roots of a level polynomial transported by φ, inside `node`.
fn level_roots(
    node: &Arc<Tower>,
    f: &Poly,
    ctx: &EmbeddingContext,
    height: &BigInt,
) -> Result<Vec<TowerElement>> {
    let parent = node.parent().unwrap().clone();
    let g = node.generator();
    let n = poly::degree(f);
    let pure = f[1..n].iter().all(|c| c.is_zero());
    let f_node: Poly = poly::lift(f, node)?;
    let mut roots: Vec<TowerElement> = Vec::new();
    if pure {
        // roots are y·g with yⁿ = φ(c₀)/c₀ in the parent
        let c0 = node.minpoly()[0].lift(&parent)?;
        let ratio = f[0].lift(&parent)?.div(&c0)?;
        let mut h: Poly = vec![TowerElement::zero(&parent); n + 1];
        h[0] = -ratio;
        h[n] = TowerElement::one(&parent);
        let pctx = ctx.with_precision(ctx.precision())?;
        let pctx = restrict_ctx(&pctx, &parent)?;
        if let Ok(ys) = root_lift_all(&h, &pctx, height) {
            for y in ys {
                let r = &y.lift(node)? * &g;
                if poly::eval(&f_node, &r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    if roots.len() < n {
        let nctx = restrict_ctx(ctx, node)?;
        for r in root_lift_all(&f_node, &nctx, height)? {
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    if n == 2 && roots.len() == 1 {
        let other = &(-&f_node[1]) - &roots[0];
        roots.push(other);
    }
    Ok(roots)
}

/// A context on a prefix node with the same root choices.
pub fn restrict_ctx(ctx: &EmbeddingContext, node: &Arc<Tower>) -> Result<EmbeddingContext> {
    if Arc::ptr_eq(ctx.tower(), node) {
        return Ok(ctx.clone());
    }
    if !node.is_prefix_of(ctx.tower()) {
        return Err(Error::TowerMismatch("not a prefix of the embedded tower".into()));
    }
    let c = EmbeddingContext::new(&node.ancestor(1), ctx.precision())?.extend_to(node)?;
    // the root choices come from the hints; check they agree with ctx
    for h in 2..=node.height() {
        if (c.generator_approx(h) - ctx.generator_approx(h)).norm() > 1e-8 * (1.0 + c.generator_approx(h).norm()) {
            return Err(Error::Precision("prefix embedding differs from the ambient one".into()));
        }
    }
    Ok(c)
}

/// Gal(T/K): extends every automorphism level by level through the roots of
/// the transported level polynomial.
pub fn find_automorphisms(tower: &Arc<Tower>, ctx: &EmbeddingContext) -> Result<GaloisGroup> {
    find_automorphisms_with(tower, ctx, &default_height())
}

pub fn find_automorphisms_with(tower: &Arc<Tower>, ctx: &EmbeddingContext, height: &BigInt) -> Result<GaloisGroup> {
    let ctx = if Arc::ptr_eq(ctx.tower(), tower) { ctx.clone() } else { restrict_ctx(ctx, tower)? };
    // partial maps: images of the levels handled so far, as elements of `tower`
    let mut partial: Vec<Vec<TowerElement>> = vec![vec![]];
    let mut cache: HashMap<String, Vec<TowerElement>> = HashMap::new();
    for lv in tower.levels() {
        let parent = lv.parent().unwrap().clone();
        let mut next = Vec::new();
        for imgs in &partial {
            let coeffs: Poly = lv
                .minpoly()
                .iter()
                .map(|c| {
                    let c = c.lift(&parent).unwrap();
                    let v = eval_at(c.numerators(), &parent, imgs, 1, &parent);
                    v.scale(&num_rational::BigRational::new(BigInt::one(), c.denominator().clone()))
                })
                .chain(std::iter::once(TowerElement::one(&parent)))
                .collect();
            let key = poly::to_string(&coeffs);
            let roots = match cache.get(&key) {
                Some(r) => r.clone(),
                None => {
                    let r = level_roots(&lv, &coeffs, &ctx, height)?;
                    cache.insert(key, r.clone());
                    r
                }
            };
            if roots.len() != lv.degree() {
                return Err(Error::Invariant(format!(
                    "level `{}`: found {} of {} conjugates; the tower is not normal over K at this level",
                    lv.name(),
                    roots.len(),
                    lv.degree()
                )));
            }
            for r in roots {
                let mut v: Vec<TowerElement> = imgs.iter().map(|x| x.lift(&lv).unwrap()).collect();
                v.push(r);
                next.push(v);
            }
        }
        partial = next;
    }
    let mut elements: Vec<Automorphism> = partial
        .into_iter()
        .map(|imgs| {
            let imgs = imgs.iter().map(|x| x.lift(tower)).collect::<Result<Vec<_>>>()?;
            Automorphism::new(tower, imgs, 1)
        })
        .collect::<Result<_>>()?;
    elements.sort_by(|a, b| a.lex_cmp(b));
    let embedded: Vec<Vec<Complex64>> =
        elements.iter().map(|a| a.embedded_images(&ctx)).collect::<Result<_>>()?;
    let sd = ctx.approx(&tower.sqrt_d())?.re;
    let n = elements.len();
    let mut table = vec![vec![0usize; n]; n];
    for a in 0..n {
        for b in 0..n {
            // e∘(a∘b)(g) = (e∘a)(b(g))
            let vals: Vec<Complex64> =
                elements[b].images().iter().map(|x| eval_numeric(x, &embedded[a], sd, 1)).collect();
            table[a][b] = nearest_tuple(&embedded, &vals)
                .ok_or_else(|| Error::Precision("composition does not match a group element".into()))?;
        }
    }
    let conj_vals: Vec<Complex64> = tower.levels().iter().map(|l| ctx.approx(&l.generator().lift(tower).unwrap()).unwrap().conj()).collect();
    let conj = nearest_tuple(&embedded, &conj_vals)
        .ok_or_else(|| Error::Invariant("complex conjugation does not restrict to the tower".into()))?;
    if !elements[conj].compose(&elements[conj]).is_identity() {
        return Err(Error::Invariant("conjugation is not an involution".into()));
    }
    Ok(GaloisGroup { tower: tower.clone(), elements, table, conj, embedded })
}

/// [x, σx, σ²x, …] of the given length.
pub fn orbit(x: &TowerElement, sigma: &Automorphism, length: usize) -> Vec<TowerElement> {
    let mut out = Vec::with_capacity(length);
    let mut cur = x.clone();
    for _ in 0..length {
        out.push(cur.clone());
        cur = sigma.apply(&cur);
    }
    out
}

/// Product of the orbit entries (the norm to the fixed field of ⟨σ⟩).
pub fn orbit_product(xs: &[TowerElement]) -> TowerElement {
    xs.iter().skip(1).fold(xs[0].clone(), |acc, x| &acc * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn trivial_tower_has_only_identity() {
        let k = Tower::quadratic(13).unwrap();
        let ctx = EmbeddingContext::new(&k, 128).unwrap();
        let g = find_automorphisms(&k, &ctx).unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.elements[0].is_identity());
    }

    #[test]
    fn linear_and_generator_lifts() {
        let k = Tower::quadratic(5).unwrap();
        let x0 = TowerElement::quad(&k, &rat(-2, 1), &rat(-1, 1));
        let t = k.extend("xi", &[-x0.clone(), TowerElement::zero(&k)], Some((0.0, 2.058))).unwrap();
        let ctx = EmbeddingContext::new(&t, 128).unwrap();
        let c = TowerElement::quad(&k, &rat(3, 7), &rat(1, 2)).lift(&t).unwrap();
        let f = vec![-c.clone(), TowerElement::one(&t)];
        assert_eq!(root_lift(&f, &ctx, &default_height()).unwrap(), c);
        let f = vec![-x0.lift(&t).unwrap(), TowerElement::zero(&t), TowerElement::one(&t)];
        let roots = root_lift_all(&f, &ctx, &default_height()).unwrap();
        let xi = t.generator();
        assert!(roots.contains(&xi) && roots.contains(&-&xi));
        let g = find_automorphisms(&t, &ctx).unwrap();
        assert_eq!(g.order(), 2);
        // ξ is purely imaginary, so conjugation sends it to −ξ
        assert_eq!(g.conjugation().apply(&xi), -&xi);
    }
}
