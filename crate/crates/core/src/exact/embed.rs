//! Complex embeddings of towers with certified root balls.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::ball::Ball;
use super::tower::{Tower, TowerElement};
use crate::{Error, Result};

/// Guard bits added on top of the requested precision.
pub const GUARD_BITS: u32 = 64;

/// A fixed complex embedding of a tower: √D > 0 and one certified root per level.
#[derive(Clone, Debug)]
pub struct EmbeddingContext {
    tower: Arc<Tower>,
    prec: u32,
    work: u32,
    gens: Vec<Ball>,
    approx: Vec<Complex64>,
}

/// Roots of a polynomial with complex coefficients (constant first, leading
/// coefficient last), by Aberth iteration in double precision.
pub fn approx_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let c: Vec<Complex64> = coeffs.iter().map(|x| x / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    let bound = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(bound * 0.7, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for k in (0..n).rev() {
            dp = dp * x + p;
            p = p * x + c[k];
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for _ in 0..3 {
        for zi in z.iter_mut() {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

/// Default root choice: largest real part, ties broken by smallest imaginary part.
pub fn default_root_index(roots: &[Complex64]) -> usize {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let mut best = 0;
    for i in 1..roots.len() {
        let (a, b) = (roots[i], roots[best]);
        if a.re > b.re + tol || ((a.re - b.re).abs() <= tol && a.im < b.im) {
            best = i;
        }
    }
    best
}

fn nearest(roots: &[Complex64], target: Complex64) -> usize {
    let mut best = 0;
    for i in 1..roots.len() {
        if (roots[i] - target).norm() < (roots[best] - target).norm() {
            best = i;
        }
    }
    best
}

fn horner(coeffs: &[Ball], x: &Ball) -> Ball {
    let mut acc = coeffs[coeffs.len() - 1].clone();
    for c in coeffs[..coeffs.len() - 1].iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

fn derivative(coeffs: &[Ball]) -> Vec<Ball> {
    coeffs[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c.mul_int(&BigInt::from(k as u64 + 1)))
        .collect()
}

/// Refines an approximate simple root of a polynomial with ball coefficients
/// (constant first, all at the same precision) and certifies it with the
/// interval Newton test N(B) ⊂ B on a disc B.
pub fn certify_root(coeffs: &[Ball], approx: Complex64) -> Result<Ball> {
    let prec = coeffs[0].prec;
    let dcoeffs = derivative(coeffs);
    let mut z = Ball::from_complex(approx, prec);
    let mids: Vec<Ball> = coeffs.iter().map(|c| c.mid()).collect();
    let dmids: Vec<Ball> = dcoeffs.iter().map(|c| c.mid()).collect();
    let mut steps = 0;
    let mut good_bits = 40u32;
    while good_bits < prec + 8 && steps < 64 {
        let f = horner(&mids, &z);
        let df = horner(&dmids, &z);
        let step = f.div(&df).ok_or_else(|| Error::Precision("vanishing derivative".into()))?;
        z = z.sub(&step).mid();
        good_bits *= 2;
        steps += 1;
    }
    for _ in 0..3 {
        let f = horner(&mids, &z);
        let df = horner(&dmids, &z);
        if let Some(step) = f.div(&df) {
            z = z.sub(&step).mid();
        }
    }
    let mut r = BigInt::from(16);
    let limit = BigInt::one() << (prec / 2).max(8);
    while r < limit {
        let b = z.clone().with_rad(r.clone());
        let f = horner(coeffs, &z);
        let df = horner(&dcoeffs, &b);
        if let Some(q) = f.div(&df) {
            let n = z.sub(&q);
            if b.contains(&n) {
                return Ok(n);
            }
        }
        r <<= 4;
    }
    Err(Error::Precision(format!(
        "could not isolate a root near {approx} at {prec} bits; retry with more precision"
    )))
}

impl EmbeddingContext {
    /// Embeds every level of `tower` at `prec` bits (at least 64).
    pub fn new(tower: &Arc<Tower>, prec: u32) -> Result<EmbeddingContext> {
        let prec = prec.max(64);
        let work = prec + GUARD_BITS;
        let chain = tower.chain();
        let mut ctx = EmbeddingContext {
            tower: tower.clone(),
            prec,
            work,
            gens: vec![Ball::from_i64(1, work)],
            approx: vec![Complex64::new(1.0, 0.0)],
        };
        if chain.len() > 1 {
            let s = Ball::sqrt_int(tower.d(), work);
            ctx.approx.push(s.to_complex());
            ctx.gens.push(s);
        }
        for node in chain.iter().skip(2) {
            let coeffs = ctx.level_poly(node)?;
            let approx_c: Vec<Complex64> = coeffs.iter().map(|b| b.to_complex()).collect();
            let roots = approx_roots(&approx_c);
            let pick = match node.hint() {
                Some((re, im)) => nearest(&roots, Complex64::new(re, im)),
                None => default_root_index(&roots),
            };
            let root = certify_root(&coeffs, roots[pick])?;
            ctx.approx.push(root.to_complex());
            ctx.gens.push(root);
        }
        Ok(ctx)
    }

    fn level_poly(&self, node: &Arc<Tower>) -> Result<Vec<Ball>> {
        let mut coeffs: Vec<Ball> = Vec::new();
        for c in node.minpoly() {
            coeffs.push(self.embed(&c)?);
        }
        coeffs.push(Ball::from_i64(1, self.work));
        Ok(coeffs)
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Working precision (requested plus guard bits).
    pub fn work_precision(&self) -> u32 {
        self.work
    }

    /// Ball containing the embedded generator of the node at `height`.
    pub fn generator(&self, height: usize) -> &Ball {
        &self.gens[height]
    }

    pub fn generator_approx(&self, height: usize) -> Complex64 {
        self.approx[height]
    }

    /// Same embedding at another precision (root choices are kept).
    pub fn with_precision(&self, prec: u32) -> Result<EmbeddingContext> {
        let prec = prec.max(64);
        let work = prec + GUARD_BITS;
        let chain = self.tower.chain();
        let mut ctx = EmbeddingContext {
            tower: self.tower.clone(),
            prec,
            work,
            gens: vec![Ball::from_i64(1, work)],
            approx: self.approx[..1].to_vec(),
        };
        if chain.len() > 1 {
            ctx.gens.push(Ball::sqrt_int(self.tower.d(), work));
            ctx.approx.push(self.approx[1]);
        }
        for (h, node) in chain.iter().enumerate().skip(2) {
            let coeffs = ctx.level_poly(node)?;
            let root = certify_root(&coeffs, self.approx[h])?;
            if !root.overlaps(&self.gens[h].set_prec(work)) {
                return Err(Error::Precision(format!("level `{}` moved to another root", node.name())));
            }
            ctx.approx.push(root.to_complex());
            ctx.gens.push(root);
        }
        Ok(ctx)
    }

    /// A context for a tower extending this one, keeping the existing choices.
    pub fn extend_to(&self, tower: &Arc<Tower>) -> Result<EmbeddingContext> {
        if !self.tower.is_prefix_of(tower) {
            return Err(Error::TowerMismatch("embedding context is not for a prefix".into()));
        }
        let mut ctx = self.clone();
        ctx.tower = tower.clone();
        for node in tower.chain().iter().skip(self.gens.len()) {
            let coeffs = ctx.level_poly(node)?;
            let approx_c: Vec<Complex64> = coeffs.iter().map(|b| b.to_complex()).collect();
            let roots = approx_roots(&approx_c);
            let pick = match node.hint() {
                Some((re, im)) => nearest(&roots, Complex64::new(re, im)),
                None => default_root_index(&roots),
            };
            let root = certify_root(&coeffs, roots[pick])?;
            ctx.approx.push(root.to_complex());
            ctx.gens.push(root);
        }
        Ok(ctx)
    }

    /// A ball containing the image of `x`.
    pub fn embed(&self, x: &TowerElement) -> Result<Ball> {
        if !x.tower().is_prefix_of(&self.tower) {
            return Err(Error::TowerMismatch("element not in the embedded tower".into()));
        }
        if x.is_zero() {
            return Ok(Ball::zero(self.work));
        }
        let node = x.min_node();
        let x = x.lift(&node)?;
        let b = self.embed_nums(&node, x.numerators());
        Ok(b.div_int(x.denominator()))
    }

    fn embed_nums(&self, node: &Arc<Tower>, num: &[BigInt]) -> Ball {
        if num.iter().all(|x| x.is_zero()) {
            return Ball::zero(self.work);
        }
        if node.height() == 0 {
            return Ball::from_int(&num[0], self.work);
        }
        let parent = node.parent().unwrap();
        let cs = parent.size();
        let g = &self.gens[node.height()];
        let chunks: Vec<&[BigInt]> = num.chunks(cs).collect();
        let mut acc = self.embed_nums(parent, chunks[chunks.len() - 1]);
        for c in chunks[..chunks.len() - 1].iter().rev() {
            acc = acc.mul(g).add(&self.embed_nums(parent, c));
        }
        acc
    }

    /// Approximate value in double precision.
    pub fn approx(&self, x: &TowerElement) -> Result<Complex64> {
        Ok(self.embed(x)?.to_complex())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn sqrt53_and_x0() {
        let k = Tower::quadratic(53).unwrap();
        let ctx = EmbeddingContext::new(&k, 128).unwrap();
        let s = ctx.embed(&k.sqrt_d()).unwrap().to_complex();
        assert!((s.re - 7.280109889280518).abs() < 1e-14);
        let x0 = TowerElement::quad(&k, &BigRational::from_integer((-2).into()), &BigRational::from_integer((-1).into()));
        let v = ctx.embed(&x0).unwrap().to_complex();
        assert!((v.re + 9.280109889280518).abs() < 1e-14);
        let z = ctx.embed(&TowerElement::zero(&k)).unwrap();
        assert!(z.re.is_zero() && z.im.is_zero() && z.rad.is_zero());
    }

    #[test]
    fn aberth_finds_cubic_roots() {
        let c = [Complex64::new(-6.0, 0.0), Complex64::new(11.0, 0.0), Complex64::new(-6.0, 0.0), Complex64::new(1.0, 0.0)];
        let mut r: Vec<f64> = approx_roots(&c).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
