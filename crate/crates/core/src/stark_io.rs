//! Stark-unit data on disk and the first exact manipulations of it.
//!
//! Coefficients use one encoding everywhere: `{"den": "<int>", "num": …}`
//! where `num` nests one array per adjoined level (outermost = highest) around
//! innermost pairs `[a, b]` standing for a + b√D, all scaled by `den`.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::exact::embed::{approx_roots, certify_root};
use crate::exact::{poly, rational_reconstruct, Ball, EmbeddingContext, Poly, Tower, TowerElement};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffJson {
    pub den: String,
    pub num: Value,
}

fn flatten(v: &Value, depth: usize, out: &mut Vec<BigInt>, path: &str) -> Result<usize> {
    match v {
        Value::Array(items) => {
            let mut d = None;
            for (k, it) in items.iter().enumerate() {
                if let Value::String(_) = it {
                    d.get_or_insert(0);
                    out.push(parse_int(it, &format!("{path}[{k}]"))?);
                } else {
                    let dk = flatten(it, depth + 1, out, &format!("{path}[{k}]"))?;
                    if *d.get_or_insert(dk + 1) != dk + 1 {
                        return Err(Error::Input(format!("{path}: ragged nesting")));
                    }
                }
            }
            d.ok_or_else(|| Error::Input(format!("{path}: empty array")))
        }
        _ => Err(Error::Input(format!("{path}: expected an array"))),
    }
}

fn parse_int(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| Error::Input(format!("{path}: `{s}` is not an integer"))),
        Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().unwrap())),
        _ => Err(Error::Input(format!("{path}: expected a decimal integer string"))),
    }
}

/// Decodes a coefficient into the node of `tower` selected by its nesting
/// depth, then lifts it to `tower`.
pub fn decode_element(c: &CoeffJson, tower: &Arc<Tower>, path: &str) -> Result<TowerElement> {
    let den = parse_int(&Value::String(c.den.clone()), &format!("{path}.den"))?;
    if den.is_zero() {
        return Err(Error::Input(format!("{path}.den: denominator is zero")));
    }
    let mut num = Vec::new();
    let depth = flatten(&c.num, 0, &mut num, &format!("{path}.num"))?;
    // depth 0 is the innermost [a, b] (node K at height 1)
    let height = depth + 1;
    if height > tower.height() {
        return Err(Error::Input(format!("{path}: nested deeper than the tower")));
    }
    let node = tower.ancestor(height);
    if num.len() != node.size() {
        return Err(Error::Input(format!(
            "{path}: {} coordinates, expected {} for level `{}`",
            num.len(),
            node.size(),
            node.name()
        )));
    }
    let x = TowerElement::from_parts(&node, num, den)?;
    x.lift(tower)
}

/// Encodes x at its own node (lifting ℚ to K).
pub fn encode_element(x: &TowerElement) -> CoeffJson {
    let x = if x.tower().height() == 0 {
        let k = Tower::quadratic(u64::try_from(x.tower().d()).unwrap()).unwrap();
        TowerElement::from_rational(&k, &x.as_rational().unwrap())
    } else {
        x.clone()
    };
    fn nest(node: &Arc<Tower>, num: &[BigInt]) -> Value {
        if node.height() == 1 {
            return Value::Array(num.iter().map(|n| Value::String(n.to_string())).collect());
        }
        let parent = node.parent().unwrap();
        Value::Array(num.chunks(parent.size()).map(|c| nest(parent, c)).collect())
    }
    CoeffJson { den: x.denominator().to_string(), num: nest(x.tower(), x.numerators()) }
}

/// Encodes x at the smallest node containing it.
pub fn encode_minimal(x: &TowerElement) -> CoeffJson {
    let node = x.min_node();
    let node = if node.height() == 0 { x.tower().ancestor(1) } else { node };
    encode_element(&x.lift(&node).unwrap())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub name: String,
    pub minpoly: Vec<CoeffJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_hint: Option<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerSpec {
    #[serde(rename = "D")]
    pub d: u64,
    pub levels: Vec<LevelSpec>,
}

impl TowerSpec {
    pub fn build(&self) -> Result<Arc<Tower>> {
        let mut t = Tower::quadratic(self.d)?;
        for (h, lv) in self.levels.iter().enumerate() {
            let path = format!("tower.levels[{h}]");
            let coeffs = lv
                .minpoly
                .iter()
                .enumerate()
                .map(|(k, c)| decode_element(c, &t, &format!("{path}.minpoly[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            let hint = match &lv.root_hint {
                Some([re, im]) => Some((
                    re.parse::<f64>().map_err(|_| Error::Input(format!("{path}.root_hint: bad number")))?,
                    im.parse::<f64>().map_err(|_| Error::Input(format!("{path}.root_hint: bad number")))?,
                )),
                None => None,
            };
            t = t.extend(&lv.name, &coeffs, hint)?;
        }
        Ok(t)
    }

    pub fn from_tower(t: &Arc<Tower>) -> TowerSpec {
        let levels = t
            .levels()
            .iter()
            .map(|lv| LevelSpec {
                name: lv.name().to_string(),
                minpoly: lv.minpoly().iter().map(encode_element).collect(),
                root_hint: lv.hint().map(|(re, im)| [format!("{re:e}"), format!("{im:e}")]),
            })
            .collect();
        TowerSpec { d: u64::try_from(t.d()).unwrap(), levels }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    IngestedNumeric,
    PaperFixture,
    Computed,
}

/// A polynomial with tower coefficients, constant first, leading included.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyData {
    pub variable: String,
    pub coeffs: Poly,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub variable: String,
    pub coeffs: Vec<CoeffJson>,
    pub provenance: Provenance,
}

impl PolyData {
    pub fn degree(&self) -> usize {
        poly::degree(&self.coeffs)
    }

    pub fn from_json(j: &PolyJson, tower: &Arc<Tower>, path: &str) -> Result<PolyData> {
        if j.coeffs.is_empty() {
            return Err(Error::Input(format!("{path}.coeffs: empty")));
        }
        let coeffs = j
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| decode_element(c, tower, &format!("{path}.coeffs[{k}]")))
            .collect::<Result<Poly>>()?;
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::Input(format!("{path}: leading coefficient is zero")));
        }
        Ok(PolyData { variable: j.variable.clone(), coeffs, provenance: j.provenance })
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            variable: self.variable.clone(),
            coeffs: self.coeffs.iter().map(encode_minimal).collect(),
            provenance: self.provenance,
        }
    }

    /// coeff_k = ±coeff_{n−k} for all k.
    pub fn is_palindromic(&self) -> bool {
        let n = self.degree();
        let c = &self.coeffs;
        (0..=n).all(|k| c[k] == c[n - k]) || (0..=n).all(|k| c[k] == -&c[n - k])
    }
}

/// Applies τ: a + b√D ↦ a − b√D to every coefficient.
pub fn apply_tau(f: &PolyData) -> Result<PolyData> {
    let coeffs = f
        .coeffs
        .iter()
        .map(|c| {
            let k = c.tower().ancestor(1);
            let ck = c.lift(&k).map_err(|_| Error::Input("τ needs coefficients in K".into()))?;
            ck.tau_k()?.lift(c.tower())
        })
        .collect::<Result<Poly>>()?;
    Ok(PolyData { variable: f.variable.clone(), coeffs, provenance: Provenance::Computed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// Zauner symmetry U_Z ⊗ U_F with δ = θ^{(p−1)/3ℓ}.
    Standard,
    /// U_F trivial on the p-factor, v₂ = v₃ = v₁, x_j = s₀α_r^k.
    Fa,
    /// p = 1: no p-factor at all.
    Trivial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaJson {
    pub images: Vec<CoeffJson>,
    pub sqrt_d_sign: i32,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RootsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<CoeffJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0: Option<CoeffJson>,
}

fn default_alpha_power() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetJson {
    pub d: u32,
    pub p: u32,
    #[serde(rename = "D")]
    pub big_d: u64,
    pub ell: u32,
    pub symmetry: Symmetry,
    #[serde(default = "default_alpha_power")]
    pub alpha_power: u32,
    pub tower: TowerSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<RootsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaJson>,
}

/// Images of the level generators (lowest first) and the sign of √D.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaData {
    pub images: Vec<TowerElement>,
    pub sqrt_d_sign: i32,
}

#[derive(Clone, Debug)]
pub struct StarkDataset {
    pub d: u32,
    pub p: u32,
    pub big_d: u64,
    pub ell: u32,
    pub symmetry: Symmetry,
    pub alpha_power: u32,
    pub tower: Arc<Tower>,
    pub tower_spec: TowerSpec,
    pub r1: Option<PolyData>,
    pub r2: Option<PolyData>,
    pub alpha0: Option<TowerElement>,
    pub beta0: Option<TowerElement>,
    pub sigma: Option<SigmaData>,
}

impl StarkDataset {
    pub fn load(path: &Path) -> Result<StarkDataset> {
        let text = std::fs::read_to_string(path)?;
        StarkDataset::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<StarkDataset> {
        let j: DatasetJson = serde_json::from_str(text)?;
        StarkDataset::from_json(&j)
    }

    pub fn from_json(j: &DatasetJson) -> Result<StarkDataset> {
        if j.tower.d != j.big_d {
            return Err(Error::Input(format!("tower.D = {} but D = {}", j.tower.d, j.big_d)));
        }
        check_dimension(j.d, j.p, j.big_d, j.ell, j.symmetry)?;
        let tower = j.tower.build()?;
        let r1 = j.r1.as_ref().map(|r| PolyData::from_json(r, &tower, "r1")).transpose()?;
        let r2 = j.r2.as_ref().map(|r| PolyData::from_json(r, &tower, "r2")).transpose()?;
        let alpha_len = alpha_cycle_len(j.p, j.ell, j.symmetry);
        let beta_len = if j.p > 1 { ((j.p - 1) / j.ell) as usize } else { 0 };
        for (name, r, want) in [("r1", &r1, alpha_len), ("r2", &r2, beta_len)] {
            if let Some(r) = r {
                if r.degree() != want {
                    return Err(Error::Input(format!("{name}: degree {} but the class number one count is {want}", r.degree())));
                }
                if !r.coeffs.last().unwrap().is_one() {
                    return Err(Error::Input(format!("{name}: not monic")));
                }
                if r.coeffs.iter().any(|c| c.min_node().height() > 1) {
                    return Err(Error::Input(format!("{name}: coefficients must lie in K")));
                }
                if !r.is_palindromic() {
                    return Err(Error::Input(format!("{name}: not palindromic, roots are not phase units")));
                }
            }
        }
        let roots = j.roots.clone().unwrap_or_default();
        let alpha0 = roots.alpha0.as_ref().map(|c| decode_element(c, &tower, "roots.alpha0")).transpose()?;
        let beta0 = roots.beta0.as_ref().map(|c| decode_element(c, &tower, "roots.beta0")).transpose()?;
        let sigma = match &j.sigma {
            Some(s) => {
                if s.images.len() != tower.levels().len() {
                    return Err(Error::Input("sigma.images: one image per level is required".into()));
                }
                if s.sqrt_d_sign.abs() != 1 {
                    return Err(Error::Input("sigma.sqrt_d_sign must be ±1".into()));
                }
                let images = s
                    .images
                    .iter()
                    .enumerate()
                    .map(|(k, c)| decode_element(c, &tower, &format!("sigma.images[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                Some(SigmaData { images, sqrt_d_sign: s.sqrt_d_sign })
            }
            None => None,
        };
        Ok(StarkDataset {
            d: j.d,
            p: j.p,
            big_d: j.big_d,
            ell: j.ell,
            symmetry: j.symmetry,
            alpha_power: j.alpha_power,
            tower,
            tower_spec: j.tower.clone(),
            r1,
            r2,
            alpha0,
            beta0,
            sigma,
        })
    }

    pub fn to_json(&self) -> DatasetJson {
        let roots = (self.alpha0.is_some() || self.beta0.is_some()).then(|| RootsJson {
            alpha0: self.alpha0.as_ref().map(encode_minimal),
            beta0: self.beta0.as_ref().map(encode_minimal),
        });
        DatasetJson {
            d: self.d,
            p: self.p,
            big_d: self.big_d,
            ell: self.ell,
            symmetry: self.symmetry,
            alpha_power: self.alpha_power,
            tower: self.tower_spec.clone(),
            r1: self.r1.as_ref().map(|r| r.to_json()),
            r2: self.r2.as_ref().map(|r| r.to_json()),
            roots,
            sigma: self.sigma.as_ref().map(|s| SigmaJson {
                images: s.images.iter().map(encode_minimal).collect(),
                sqrt_d_sign: s.sqrt_d_sign,
            }),
        }
    }

    /// Fails when the data needed for construction is missing.
    pub fn require_complete(&self) -> Result<()> {
        if self.symmetry == Symmetry::Trivial {
            return Ok(());
        }
        let mut missing = Vec::new();
        if self.r1.is_none() {
            missing.push("r1");
        }
        if self.r2.is_none() {
            missing.push("r2");
        }
        if self.tower.levels().is_empty() {
            missing.push("tower levels");
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "dataset for d={} lacks {}; construction needs the Stark minimal polynomials and the tower",
                self.d,
                missing.join(", ")
            )))
        }
    }

    /// x₀ = −2 − √(d+1) in K.
    pub fn x0(&self) -> TowerElement {
        let k = self.tower.ancestor(1);
        let f = sqrt_ratio(self.d as u64 + 1, self.big_d);
        TowerElement::quad(&k, &BigInt::from(-2).into(), &BigInt::from(-(f as i64)).into())
            .lift(&self.tower)
            .unwrap()
    }

    /// √(d+1) = f√D in K.
    pub fn sqrt_d1(&self) -> TowerElement {
        let k = self.tower.ancestor(1);
        let f = sqrt_ratio(self.d as u64 + 1, self.big_d);
        TowerElement::quad(&k, &BigInt::zero().into(), &BigInt::from(f).into()).lift(&self.tower).unwrap()
    }
}

/// f with n = f²·D (panics if not of that shape; checked on load).
fn sqrt_ratio(n: u64, d: u64) -> u64 {
    let q = n / d;
    let f = (q as f64).sqrt().round() as u64;
    assert!(f * f * d == n, "{n} is not f²·{d}");
    f
}

pub fn alpha_cycle_len(p: u32, ell: u32, sym: Symmetry) -> usize {
    match sym {
        Symmetry::Standard => ((p - 1) / (3 * ell)) as usize,
        Symmetry::Fa => ((p - 1) / ell) as usize,
        Symmetry::Trivial => 0,
    }
}

fn check_dimension(d: u32, p: u32, big_d: u64, ell: u32, sym: Symmetry) -> Result<()> {
    if d != 4 * p {
        return Err(Error::Input(format!("d = {d} is not 4p with p = {p}")));
    }
    let dd = d as u64 + 1;
    if !dd.is_multiple_of(big_d) || {
        let q = dd / big_d;
        let f = (q as f64).sqrt().round() as u64;
        f * f != q
    } {
        return Err(Error::Input(format!("d + 1 = {dd} is not f²·{big_d}")));
    }
    if ell == 0 {
        return Err(Error::Input("ell must be positive".into()));
    }
    match sym {
        Symmetry::Trivial if p != 1 => Err(Error::Input("trivial symmetry needs p = 1".into())),
        Symmetry::Standard if p < 7 || !(p - 1).is_multiple_of(3 * ell) => {
            Err(Error::Input(format!("3ℓ = {} must divide p − 1 = {}", 3 * ell, p - 1)))
        }
        Symmetry::Fa if p < 3 || !(p - 1).is_multiple_of(ell) => Err(Error::Input("ℓ must divide p − 1".into())),
        _ => Ok(()),
    }
}

/// Factors the monic normalization of f(t²/s) as ±g(t)·g(−t) with g over K.
///
/// Roots of f(t²/s) come in pairs ±z; g takes one from each pair. Its
/// coefficients are real, so the choice must be closed under complex
/// conjugation. Each such choice is tried and its coefficients are
/// reconstructed in K; the result is checked by exact multiplication.
pub fn quad_sub_factor(
    f: &[TowerElement],
    scale: Option<&TowerElement>,
    ctx: &EmbeddingContext,
    height_bound: &BigInt,
) -> Result<(Poly, Poly)> {
    let tower = f[0].tower().clone();
    let k = tower.ancestor(1);
    let one = TowerElement::one(&tower);
    let s = scale.cloned().unwrap_or(one);
    let big = poly::quad_substitute(f, &s)?;
    let n = poly::degree(f);
    let kctx = ctx.with_precision(ctx.precision())?;
    let coeffs: Vec<Ball> = poly::embed(&big, &kctx)?;
    let approx: Vec<Complex64> = coeffs.iter().map(|b| b.to_complex()).collect();
    let mut roots: Vec<Ball> = approx_roots(&approx)
        .into_iter()
        .map(|z| certify_root(&coeffs, z))
        .collect::<Result<_>>()?;
    // pair z with −z; keep representatives in the half plane Re > 0 (or Im > 0 on the axis)
    roots.retain(|z| {
        let c = z.to_complex();
        c.re > 1e-12 || (c.re.abs() <= 1e-12 && c.im > 0.0)
    });
    if roots.len() != n {
        return Err(Error::Reconstruct("roots of f(t²/s) are not simple ± pairs".into()));
    }
    // conjugate pairing among representatives: z̄ is a representative or −z̄ is
    let rc: Vec<Complex64> = roots.iter().map(|b| b.to_complex()).collect();
    let mut classes: Vec<(usize, Option<usize>)> = Vec::new();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let c = rc[i].conj();
        if c.im.abs() < 1e-12 * (1.0 + c.norm()) && rc[i].im.abs() < 1e-12 * (1.0 + c.norm()) {
            classes.push((i, None));
            continue;
        }
        let j = (0..n).filter(|&j| !used[j]).min_by(|&a, &b| {
            let da = (rc[a] - c).norm().min((rc[a] + c).norm());
            let db = (rc[b] - c).norm().min((rc[b] + c).norm());
            da.partial_cmp(&db).unwrap()
        });
        match j {
            Some(j) => {
                used[j] = true;
                classes.push((i, Some(j)));
            }
            None => return Err(Error::Reconstruct("unpaired complex root".into())),
        }
    }
    let m = classes.len();
    let prec = kctx.work_precision();
    // fix the first class's sign: g and g(−t) are both found otherwise
    for mask in 0u64..(1u64 << (m - 1)) {
        let mut chosen: Vec<Ball> = Vec::with_capacity(n);
        for (c, &(i, j)) in classes.iter().enumerate() {
            let flip = c > 0 && (mask >> (c - 1)) & 1 == 1;
            let zi = if flip { roots[i].neg() } else { roots[i].clone() };
            chosen.push(zi.clone());
            if let Some(j) = j {
                // partner must be the conjugate of the chosen zi
                let cj = zi.conj();
                let zj = if roots[j].overlaps(&cj) || (roots[j].to_complex() - cj.to_complex()).norm() < 1e-9 {
                    roots[j].clone()
                } else {
                    roots[j].neg()
                };
                chosen.push(zj);
            }
        }
        // ∏ (t − z)
        let mut g: Vec<Ball> = vec![Ball::from_i64(1, prec)];
        for z in &chosen {
            let mut next = vec![Ball::zero(prec); g.len() + 1];
            for (k, c) in g.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].sub(&c.mul(z));
            }
            g = next;
        }
        let mut exact: Poly = Vec::with_capacity(n + 1);
        let mut ok = true;
        for c in g.iter().take(n) {
            if !c.im_ball().contains_zero() {
                ok = false;
                break;
            }
            let real = c.re_ball();
            match rational_reconstruct(&real, &k, &kctx_for_k(&kctx, &k)?, height_bound) {
                Ok(x) => exact.push(x.lift(&tower)?),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        exact.push(TowerElement::one(&tower));
        let mate = poly::reflect(&exact);
        let mut prod = poly::mul(&exact, &mate);
        if n % 2 == 1 {
            prod = poly::neg(&prod);
        }
        if poly::sub(&prod, &big).iter().all(|c| c.is_zero()) {
            return Ok(order_pair(exact, mate));
        }
    }
    Err(Error::Reconstruct(
        "f(t²/s) has no factorization g(t)·g(−t) over K within the height bound".into(),
    ))
}

fn kctx_for_k(ctx: &EmbeddingContext, k: &Arc<Tower>) -> Result<EmbeddingContext> {
    EmbeddingContext::new(k, ctx.precision()).or_else(|_| ctx.with_precision(ctx.precision()))
}

/// Deterministic order: the factor whose t^{n−1} coefficient is smaller in
/// the lexicographic order comes first.
fn order_pair(g: Poly, h: Poly) -> (Poly, Poly) {
    for k in (0..g.len()).rev() {
        match g[k].cmp_lex(&h[k]) {
            std::cmp::Ordering::Less => return (g, h),
            std::cmp::Ordering::Greater => return (h, g),
            _ => {}
        }
    }
    (g, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn denominator_zero_is_rejected() {
        let k = Tower::quadratic(53).unwrap();
        let c = CoeffJson { den: "0".into(), num: serde_json::json!(["1", "0"]) };
        assert!(decode_element(&c, &k, "x").is_err());
    }

    #[test]
    fn encode_decode_round_trip() {
        let k = Tower::quadratic(53).unwrap();
        let t = k.extend("t", &[TowerElement::from_int(&k, 2), TowerElement::zero(&k)], None).unwrap();
        let x = TowerElement::from_i64s(&t, &[1, -3, 5, 7], 6).unwrap();
        let back = decode_element(&encode_element(&x), &t, "x").unwrap();
        assert_eq!(x, back);
    }
}

#[cfg(test)]
mod fixture_tests {
    use super::*;
    use crate::exact::rat;

    fn d52() -> StarkDataset {
        StarkDataset::from_str(include_str!("../data/d52.json")).unwrap()
    }

    fn kpoly(k: &Arc<Tower>, c: &[(i64, i64, i64)]) -> Poly {
        c.iter().map(|&(a, b, den)| TowerElement::quad(k, &rat(a, den), &rat(b, den))).collect()
    }

    #[test]
    fn d52_loads_with_degrees() {
        let ds = d52();
        assert_eq!(ds.r1.as_ref().unwrap().degree(), 4);
        assert_eq!(ds.r2.as_ref().unwrap().degree(), 12);
        assert_eq!(ds.tower.degree_over_k(), 24);
        let again = StarkDataset::from_json(&ds.to_json()).unwrap();
        let enc = |d: &StarkDataset| serde_json::to_string(&d.to_json()).unwrap();
        assert_eq!(enc(&again), enc(&ds));
    }

    #[test]
    fn tau_flips_sqrt_d() {
        let ds = d52();
        let k = ds.tower.ancestor(1);
        let p1 = apply_tau(ds.r1.as_ref().unwrap()).unwrap();
        assert_eq!(p1.coeffs[3].lift(&k).unwrap(), TowerElement::quad(&k, &rat(-39, 2), &rat(5, 2)));
        let back = apply_tau(&p1).unwrap();
        assert_eq!(back.coeffs, ds.r1.unwrap().coeffs);
    }

    #[test]
    fn d52_quadratic_substitution() {
        let ds = d52();
        let k = ds.tower.ancestor(1);
        let ctx = EmbeddingContext::new(&k, 256).unwrap();
        let hb = BigInt::from(10u64).pow(12);
        let p1: Poly = poly::lift(&apply_tau(ds.r1.as_ref().unwrap()).unwrap().coeffs, &k).unwrap();
        let x0 = ds.x0().lift(&k).unwrap_or_else(|_| TowerElement::quad(&k, &rat(-2, 1), &rat(-1, 1)));
        let (g, h) = quad_sub_factor(&p1, Some(&x0), &ctx, &hb).unwrap();
        // t⁴ + ((3a−15)/2)t³ − (4a−41)t² − ((9a−129)/2)t + 4a + 57
        let want = kpoly(&k, &[(57, 4, 1), (129, -9, 2), (41, -4, 1), (-15, 3, 2), (1, 0, 1)]);
        assert!(g == want || h == want, "{}", poly::to_string(&g));
        let p2: Poly = poly::lift(&apply_tau(ds.r2.as_ref().unwrap()).unwrap().coeffs, &k).unwrap();
        let (g, h) = quad_sub_factor(&p2, None, &ctx, &hb).unwrap();
        let lead = [(1, 0, 1), (1, -1, 2), (-43, 7, 2), (-113, 15, 2), (573, -79, 2), (391, -53, 2), (-891, 122, 1)];
        let mut full: Vec<(i64, i64, i64)> = lead.to_vec();
        full.extend(lead[..6].iter().rev());
        full.reverse();
        let want = kpoly(&k, &full);
        assert!(g == want || h == want, "{}", poly::to_string(&g));
    }

    #[test]
    fn non_square_has_no_factorization() {
        let k = Tower::quadratic(53).unwrap();
        let ctx = EmbeddingContext::new(&k, 128).unwrap();
        let f = kpoly(&k, &[(-3, 0, 1), (1, 0, 1)]);
        assert!(quad_sub_factor(&f, None, &ctx, &BigInt::from(1000)).is_err());
        let f = kpoly(&k, &[(-53, 0, 1), (1, 0, 1)]);
        let (g, _) = quad_sub_factor(&f, None, &ctx, &BigInt::from(1000)).unwrap();
        assert_eq!(poly::degree(&g), 1);
    }

    #[test]
    fn d28_refuses_construction() {
        let ds = StarkDataset::from_str(include_str!("../data/d28.json")).unwrap();
        assert!(ds.r1.is_none());
        assert!(ds.require_complete().is_err());
    }
}
