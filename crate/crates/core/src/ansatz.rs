//! Fiducial assembly from Stark-unit orbits, sign determination and the
//! parameter search.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{poly, rat, EmbeddingContext, Poly, Tower, TowerElement};
use crate::galois::{default_height, find_automorphisms, orbit, root_lift, Automorphism, AutomorphismJson, GaloisGroup};
use crate::heisenberg::{generators, mod_inv, mod_pow, zauner_perm};
use crate::stark_io::{apply_tau, decode_element, encode_minimal, quad_sub_factor, CoeffJson, StarkDataset, Symmetry, TowerSpec};
use crate::verify;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// v₂ = U_F⁻¹v₁, v₃ = U_F v₁: fixed by U_Z ⊗ U_F.
    Zauner1,
    /// v₂ and v₃ interchanged: fixed by U_Z ⊗ U_F⁻¹.
    Zauner2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    Adapted,
    Standard,
}

/// The choices that produced a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Choice {
    pub theta: u64,
    pub s0: i32,
    pub s1: i32,
    pub alpha_offset: usize,
    pub layout: Layout,
}

/// Ψ = N(v₁, v₂, v₃, v₄) with components in a tower over K.
#[derive(Clone, Debug)]
pub struct Fiducial {
    pub d: u32,
    pub p: u32,
    pub ell: u32,
    pub symmetry: Symmetry,
    pub tower: Arc<Tower>,
    pub v: [Vec<TowerElement>; 4],
    pub x0: TowerElement,
    pub nsq: TowerElement,
    pub sqrt_d1: TowerElement,
    pub choice: Choice,
    pub basis: BasisTag,
    pub conj: Automorphism,
}

impl Fiducial {
    /// N² = 1/(d + 1 + √(d+1)).
    pub fn nsq_for(sqrt_d1: &TowerElement, d: u32) -> TowerElement {
        let t = sqrt_d1.tower();
        (&TowerElement::from_int(t, d as i64 + 1) + sqrt_d1).inv().unwrap()
    }

    pub fn xi(&self) -> &TowerElement {
        &self.v[3][0]
    }

    /// x_j (components of v₄) and y_j (components of v₁).
    pub fn x(&self, j: usize) -> &TowerElement {
        &self.v[3][j % self.p as usize]
    }

    pub fn y(&self, j: usize) -> &TowerElement {
        &self.v[0][j % self.p as usize]
    }

    pub fn swapped(&self) -> Fiducial {
        let mut f = self.clone();
        f.v.swap(1, 2);
        f.choice.layout = match f.choice.layout {
            Layout::Zauner1 => Layout::Zauner2,
            Layout::Zauner2 => Layout::Zauner1,
        };
        f
    }

    /// Components in the order v₁ ‖ v₂ ‖ v₃ ‖ v₄ (unnormalized).
    pub fn flat(&self) -> Vec<TowerElement> {
        self.v.iter().flatten().cloned().collect()
    }

    pub fn to_json(&self) -> FiducialJson {
        FiducialJson {
            d: self.d,
            p: self.p,
            ell: self.ell,
            symmetry: self.symmetry,
            basis: self.basis,
            choice: self.choice,
            tower: TowerSpec::from_tower(&self.tower),
            conj: self.conj.to_json(),
            components: self.v.iter().map(|b| b.iter().map(encode_minimal).collect()).collect(),
        }
    }

    pub fn from_json(j: &FiducialJson) -> Result<Fiducial> {
        let tower = j.tower.build()?;
        if j.components.len() != 4 || j.components.iter().any(|b| b.len() != j.p as usize) {
            return Err(Error::Input("components: expected four blocks of length p".into()));
        }
        let mut v: [Vec<TowerElement>; 4] = Default::default();
        for (b, block) in j.components.iter().enumerate() {
            v[b] = block
                .iter()
                .enumerate()
                .map(|(r, c)| decode_element(c, &tower, &format!("components[{b}][{r}]")))
                .collect::<Result<_>>()?;
        }
        let conj = Automorphism::from_json(&j.conj, &tower)?;
        let sqrt_d1 = sqrt_d_plus_one(&tower, j.d)?;
        let x0 = &TowerElement::from_int(&tower, -2) - &sqrt_d1;
        let nsq = Fiducial::nsq_for(&sqrt_d1, j.d);
        Ok(Fiducial {
            d: j.d,
            p: j.p,
            ell: j.ell,
            symmetry: j.symmetry,
            tower,
            v,
            x0,
            nsq,
            sqrt_d1,
            choice: j.choice,
            basis: j.basis,
            conj,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiducialJson {
    pub d: u32,
    pub p: u32,
    pub ell: u32,
    pub symmetry: Symmetry,
    pub basis: BasisTag,
    pub choice: Choice,
    pub tower: TowerSpec,
    pub conj: AutomorphismJson,
    pub components: Vec<Vec<CoeffJson>>,
}

/// √(d+1) = f√D in the tower.
pub fn sqrt_d_plus_one(tower: &Arc<Tower>, d: u32) -> Result<TowerElement> {
    let dd: u64 = u64::try_from(tower.d()).map_err(|_| Error::Input("D too large".into()))?;
    let n = d as u64 + 1;
    if !n.is_multiple_of(dd) {
        return Err(Error::Input(format!("d + 1 = {n} is not a multiple of D = {dd}")));
    }
    let q = n / dd;
    let f = (q as f64).sqrt().round() as u64;
    if f * f != q {
        return Err(Error::Input(format!("d + 1 = {n} is not f²·{dd}")));
    }
    Ok(tower.sqrt_d().scale(&rat(f as i64, 1)))
}

/// ⟨u|X^m|u⟩ = Σ_r conj(u_r)·u_{r−m}.
pub fn shift_inner(u: &[TowerElement], m: i64, conj: &Automorphism) -> TowerElement {
    let p = u.len() as i64;
    let mut acc = TowerElement::zero(u[0].tower());
    for r in 0..p {
        let s = (r - m).rem_euclid(p) as usize;
        acc = &acc + &(&conj.apply(&u[r as usize]) * &u[s]);
    }
    acc
}

/// Everything derived from a dataset before candidates are enumerated.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub d: u32,
    pub p: u32,
    pub ell: u32,
    pub symmetry: Symmetry,
    pub alpha_power: u32,
    pub tower: Arc<Tower>,
    pub ctx: EmbeddingContext,
    pub group: GaloisGroup,
    pub sigma: Automorphism,
    pub conj: Automorphism,
    /// p̃₁ and its mate p̃₁(−t), p̃₂ and its mate.
    pub pt1: Option<(Poly, Poly)>,
    pub pt2: Option<(Poly, Poly)>,
    pub alpha_tilde: Vec<TowerElement>,
    pub beta: Vec<TowerElement>,
    pub xi: TowerElement,
    pub x0: TowerElement,
    pub sqrt_d1: TowerElement,
    pub nsq: TowerElement,
}

impl Prepared {
    pub fn len_a(&self) -> usize {
        self.alpha_tilde.len()
    }

    pub fn len_b(&self) -> usize {
        self.beta.len()
    }

    /// Generators of (ℤ/p)^× (all of them; σ of order (p−1)/ℓ makes the
    /// ℓ-fold repetition explicit in the index sets).
    pub fn theta_candidates(&self) -> Vec<u64> {
        if self.p <= 2 {
            return vec![1];
        }
        generators(self.p as u64)
    }
}

/// The level named `xi` (ξ² = x₀).
fn find_xi(tower: &Arc<Tower>, x0: &TowerElement) -> Result<TowerElement> {
    for lv in tower.levels() {
        let g = lv.generator().lift(tower)?;
        if lv.degree() == 2 && g.square() == *x0 {
            return Ok(g);
        }
    }
    Err(Error::Input("the tower has no level ξ with ξ² = x₀ = −2 − √(d+1)".into()))
}

/// Builds p̃ᵢ, the Galois group, σ and the orbits.
pub fn prepare(ds: &StarkDataset) -> Result<Prepared> {
    ds.require_complete()?;
    let tower = ds.tower.clone();
    let ctx = EmbeddingContext::new(&tower, 256)?;
    let sqrt_d1 = sqrt_d_plus_one(&tower, ds.d)?;
    let x0 = &TowerElement::from_int(&tower, -2) - &sqrt_d1;
    let nsq = Fiducial::nsq_for(&sqrt_d1, ds.d);
    let xi = find_xi(&tower, &x0)?;
    let group = find_automorphisms(&tower, &ctx)?;
    let conj = group.conjugation().clone();
    if ds.symmetry == Symmetry::Trivial {
        let sigma = Automorphism::identity(&tower);
        return Ok(Prepared {
            d: ds.d,
            p: ds.p,
            ell: ds.ell,
            symmetry: ds.symmetry,
            alpha_power: ds.alpha_power,
            tower,
            ctx,
            group,
            sigma,
            conj,
            pt1: None,
            pt2: None,
            alpha_tilde: vec![],
            beta: vec![],
            xi,
            x0,
            sqrt_d1,
            nsq,
        });
    }
    let k = tower.ancestor(1);
    let kctx = EmbeddingContext::new(&k, 256)?;
    let hb = default_height();
    let lift_k = |f: &Poly| -> Result<Poly> { poly::lift(f, &k) };
    let p1 = lift_k(&apply_tau(ds.r1.as_ref().unwrap())?.coeffs)?;
    let p2 = lift_k(&apply_tau(ds.r2.as_ref().unwrap())?.coeffs)?;
    let pt1 = quad_sub_factor(&p1, Some(&x0.lift(&k)?), &kctx, &hb)?;
    let pt2 = quad_sub_factor(&p2, None, &kctx, &hb)?;
    let len_b = ((ds.p - 1) / ds.ell) as usize;
    let len_a = crate::stark_io::alpha_cycle_len(ds.p, ds.ell, ds.symmetry);
    let sigma = match &ds.sigma {
        Some(s) => {
            let sg = Automorphism::new(&tower, s.images.clone(), s.sqrt_d_sign)?;
            if !sg.fixes_k() {
                return Err(Error::Input("sigma must fix √D".into()));
            }
            sg
        }
        None => {
            let idx = group
                .select_sigma(len_b, Some(&xi))
                .ok_or_else(|| Error::Invariant(format!("no automorphism of order {len_b} fixes ξ")))?;
            group.elements[idx].clone()
        }
    };
    if sigma.order(len_b as u64) != Some(len_b as u64) {
        return Err(Error::Invariant(format!("σ does not have order {len_b}")));
    }
    if sigma.apply(&xi) != xi {
        return Err(Error::Invariant("σ must fix ξ = √x₀".into()));
    }
    let lift_t = |f: &Poly| -> Result<Poly> { poly::lift(f, &tower) };
    let alpha0 = match &ds.alpha0 {
        Some(a) => a.clone(),
        None => root_lift(&lift_t(&pt1.0)?, &ctx, &hb)?,
    };
    let beta0 = match &ds.beta0 {
        Some(b) => b.clone(),
        None => root_lift(&lift_t(&pt2.0)?, &ctx, &hb)?,
    };
    for (name, r, f) in [("alpha0", &alpha0, &pt1), ("beta0", &beta0, &pt2)] {
        let a = lift_t(&f.0)?;
        let b = lift_t(&f.1)?;
        if !poly::eval(&a, r).is_zero() && !poly::eval(&b, r).is_zero() {
            return Err(Error::Invariant(format!("{name} is not a root of the factor pair")));
        }
    }
    let alpha_tilde = orbit(&alpha0, &sigma, len_a);
    if sigma.apply(&alpha_tilde[len_a - 1]) != alpha0 {
        return Err(Error::Invariant(format!("the σ-orbit of α̃₀ does not close after {len_a} steps")));
    }
    let beta = orbit(&beta0, &sigma, len_b);
    Ok(Prepared {
        d: ds.d,
        p: ds.p,
        ell: ds.ell,
        symmetry: ds.symmetry,
        alpha_power: ds.alpha_power,
        tower,
        ctx,
        group,
        sigma,
        conj,
        pt1: Some(pt1),
        pt2: Some(pt2),
        alpha_tilde,
        beta,
        xi,
        x0,
        sqrt_d1,
        nsq,
    })
}

/// α_r = α̃_r/ξ raised to the dataset's power.
fn alpha_component(prep: &Prepared, r: usize) -> TowerElement {
    let a = prep.alpha_tilde[r % prep.len_a()].div(&prep.xi).unwrap();
    a.pow(prep.alpha_power as i64).unwrap()
}

fn signed(x: &TowerElement, s: i32) -> TowerElement {
    if s < 0 {
        -x
    } else {
        x.clone()
    }
}

/// Assembles the candidate and checks the Ansatz invariants exactly.
pub fn build_candidate(prep: &Prepared, choice: Choice) -> Result<Fiducial> {
    let f = assemble(prep, choice)?;
    check_invariants(&f)?;
    Ok(f)
}

/// Lays out v₁..v₄ from the orbits without checking any invariant.
pub fn assemble(prep: &Prepared, choice: Choice) -> Result<Fiducial> {
    let t = &prep.tower;
    let p = prep.p as usize;
    let one = TowerElement::one(t);
    let mut v1 = vec![one.clone(); p];
    let mut v4 = vec![prep.xi.clone(); p];
    if p > 1 {
        if !crate::heisenberg::is_generator(choice.theta, p as u64) {
            return Err(Error::Input(format!("θ = {} does not generate (Z/{p})^x", choice.theta)));
        }
        for r in 0..p - 1 {
            let j = mod_pow(choice.theta, r as u64, p as u64) as usize;
            v1[j] = signed(&prep.beta[r % prep.len_b()], choice.s1);
            v4[j] = signed(&alpha_component(prep, r + choice.alpha_offset), choice.s0);
        }
    }
    let (v2, v3) = match prep.symmetry {
        Symmetry::Standard => {
            let uf = zauner_perm(prep.p, choice.theta, prep.ell, false)?;
            let ufi = zauner_perm(prep.p, choice.theta, prep.ell, true)?;
            let a = ufi.permute(&v1);
            let b = uf.permute(&v1);
            match choice.layout {
                Layout::Zauner1 => (a, b),
                Layout::Zauner2 => (b, a),
            }
        }
        Symmetry::Fa | Symmetry::Trivial => (v1.clone(), v1.clone()),
    };
    Ok(Fiducial {
        d: prep.d,
        p: prep.p,
        ell: prep.ell,
        symmetry: prep.symmetry,
        tower: t.clone(),
        v: [v1, v2, v3, v4],
        x0: prep.x0.clone(),
        nsq: prep.nsq.clone(),
        sqrt_d1: prep.sqrt_d1.clone(),
        choice,
        basis: BasisTag::Adapted,
        conj: prep.conj.clone(),
    })
}

/// The exact Ansatz conditions: Zauner eigenvector, anti-unitary symmetry,
/// almost flatness and the built-in overlaps.
pub fn check_invariants(f: &Fiducial) -> Result<()> {
    let p = f.p as usize;
    let fail = |what: &str| Err(Error::Invariant(what.to_string()));
    if !f.v[0][0].is_one() {
        return fail("v₁[0] = 1");
    }
    if f.xi().square() != f.x0 {
        return fail("v₄[0]² = x₀");
    }
    // Zauner: (U_Z ⊗ U_F^{±1})Ψ = Ψ
    if f.symmetry == Symmetry::Standard {
        let inv = f.choice.layout == Layout::Zauner2;
        let uf = zauner_perm(f.p, f.choice.theta, f.ell, inv)?;
        let op = crate::heisenberg::crt_combine(&crate::heisenberg::clifford_specials().u_z, &uf);
        let w = op.apply_with(&f.v, |_, x| x.clone(), |x| x.clone());
        if w != f.v {
            return fail("(U_Z ⊗ U_F)Ψ = Ψ");
        }
        if uf.pow(3).permute(&f.v[0]) != f.v[0] || uf.permute(&f.v[3]) != f.v[3] {
            return fail("U_F³v₁ = v₁ and U_F v₄ = v₄");
        }
    } else if f.v[1] != f.v[0] || f.v[2] != f.v[0] {
        return fail("v₂ = v₃ = v₁");
    }
    // (U_P ⊗ U_P)Ψ* = Ψ
    let c = &f.conj;
    for r in 0..p {
        let mr = (p - r) % p;
        for b in 0..3 {
            if c.apply(&f.v[b][mr]) != f.v[b][r] {
                return fail("y_{−j} = conj(y_j) in blocks 1–3");
            }
        }
        if -&c.apply(&f.v[3][mr]) != f.v[3][r] {
            return fail("x_{−j} = −conj(x_j)");
        }
    }
    for r in 1..p {
        for b in [0, 3] {
            if !(&c.apply(&f.v[b][r]) * &f.v[b][r]).is_one() {
                return fail("|x_j|² = |y_j|² = 1");
            }
        }
    }
    // built-in overlaps: ⟨Ψ|1⊗Z^j|Ψ⟩ = 1/√(d+1) follows from the row sums
    // Σ_b |v_b[r]|² being 4 for r ≠ 0 and 3 + |x₀| for r = 0
    let inv_s = f.sqrt_d1.inv()?;
    let norm0 = &TowerElement::from_int(&f.tower, 3) - &f.x0;
    let row0: TowerElement = (0..4).map(|b| &c.apply(&f.v[b][0]) * &f.v[b][0]).fold(TowerElement::zero(&f.tower), |a, x| &a + &x);
    if row0 != norm0 {
        return fail("Σ_b |v_b[0]|² = 3 + |x₀|");
    }
    if p > 1 && &f.nsq * &(&norm0 - &TowerElement::from_int(&f.tower, 4)) != inv_s {
        return fail("⟨Ψ|1⊗Z^j|Ψ⟩ = 1/√(d+1)");
    }
    for (i, j) in [(2, 0), (0, 2), (2, 2)] {
        let val = verify::diagonal_overlap(f, i, j, 0)?;
        if val != -&inv_s {
            return fail("⟨Ψ|D⊗1|Ψ⟩ = −1/√(d+1) for the diagonal D");
        }
    }
    Ok(())
}

/// Σᵢ⟨vᵢ|X|vᵢ⟩ and whether |·|²N⁴ = 1/(d+1).
pub fn baby_test(f: &Fiducial) -> (TowerElement, bool) {
    let b = f.v.iter().fold(TowerElement::zero(&f.tower), |acc, v| &acc + &shift_inner(v, 1, &f.conj));
    let m = &(&f.conj.apply(&b) * &b) * &f.nsq.square();
    let target = if f.p == 1 {
        TowerElement::one(&f.tower)
    } else {
        TowerElement::from_rational(&f.tower, &rat(1, f.d as i64 + 1))
    };
    (b, m == target)
}

/// Result of the trace identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignChoice {
    pub s0: i32,
    pub s1: i32,
}

/// Picks s₀, s₁ from
///   4·S₁² = (1+√(d+1))(X₂ − Y₂) + d and
///  −4·S₄² = (1+√(d+1))(X₂ + 3Y₂ + 4) + d,
/// where S₁ = Σv₁, S₄ = Σv₄, X₂ = Σ_{j≥1} x_j², Y₂ = Σ_{j≥1} y_j².
/// The sums only need the traces of the α and β orbits.
pub fn sign_determination(prep: &Prepared) -> Result<SignChoice> {
    if prep.symmetry == Symmetry::Trivial {
        return Ok(SignChoice { s0: 1, s1: 1 });
    }
    let t = &prep.tower;
    let p = prep.p as u64;
    let mult_a = ((p - 1) as usize / prep.len_a()) as i64;
    let mult_b = ((p - 1) as usize / prep.len_b()) as i64;
    let sum = |xs: &[TowerElement]| xs.iter().fold(TowerElement::zero(t), |a, x| &a + x);
    let alphas: Vec<TowerElement> = (0..prep.len_a()).map(|r| alpha_component(prep, r)).collect();
    let tr_a = sum(&alphas).scale(&rat(mult_a, 1));
    let tr_a2 = sum(&alphas.iter().map(|x| x.square()).collect::<Vec<_>>()).scale(&rat(mult_a, 1));
    let tr_b = sum(&prep.beta).scale(&rat(mult_b, 1));
    let tr_b2 = sum(&prep.beta.iter().map(|x| x.square()).collect::<Vec<_>>()).scale(&rat(mult_b, 1));
    let one = TowerElement::one(t);
    let dd = TowerElement::from_int(t, prep.d as i64);
    let s1p = &one + &prep.sqrt_d1;
    let four = TowerElement::from_int(t, 4);
    let rhs1 = &(&s1p * &(&tr_a2 - &tr_b2)) + &dd;
    let rhs4 = &(&s1p * &(&(&tr_a2 + &tr_b2.scale(&rat(3, 1))) + &four)) + &dd;
    let ok1: Vec<i32> = [1, -1]
        .into_iter()
        .filter(|&s| {
            let s1 = &one + &signed(&tr_b, s);
            &four * &s1.square() == rhs1
        })
        .collect();
    let ok4: Vec<i32> = [1, -1]
        .into_iter()
        .filter(|&s| {
            let s4 = &prep.xi + &signed(&tr_a, s);
            -&(&four * &s4.square()) == rhs4
        })
        .collect();
    match (ok4.as_slice(), ok1.as_slice()) {
        ([s0], [s1]) => Ok(SignChoice { s0: *s0, s1: *s1 }),
        _ => Err(Error::Invariant(format!(
            "trace identities select s₀ ∈ {ok4:?}, s₁ ∈ {ok1:?}; expected exactly one sign each"
        ))),
    }
}

/// The printed factor pair picked by the signs: (p̃₁ with root s₀α̃₀, p̃₂ with root s₁β₀).
pub fn selected_factors(prep: &Prepared, signs: &SignChoice) -> Option<(Poly, Poly)> {
    let (pt1, pt2) = (prep.pt1.as_ref()?, prep.pt2.as_ref()?);
    let t = &prep.tower;
    let pick = |pair: &(Poly, Poly), root: TowerElement| -> Poly {
        let a = poly::lift(&pair.0, t).unwrap();
        if poly::eval(&a, &root).is_zero() {
            pair.0.clone()
        } else {
            pair.1.clone()
        }
    };
    Some((
        pick(pt1, signed(&prep.alpha_tilde[0], signs.s0)),
        pick(pt2, signed(&prep.beta[0], signs.s1)),
    ))
}

/// θ shortcut: x₁² = 2N²√(d+1)(⟨v₁|X⁻²|v₁⟩ + ⟨v₃|X⁻²|v₃⟩) + y₁² must be a root
/// of p₁ = τ(r₁). Only depends on θ, s₁ and the layout.
pub fn theta_matches(prep: &Prepared, theta: u64, s1: i32, layout: Layout) -> Result<bool> {
    let f = assemble(prep, Choice { theta, s0: 1, s1, alpha_offset: 0, layout })?;
    let j = 1usize;
    let m = -2 * j as i64;
    let a = &shift_inner(&f.v[0], m, &f.conj) + &shift_inner(&f.v[2], m, &f.conj);
    let w = &(&(&f.nsq * &f.sqrt_d1) * &a).scale(&rat(2, 1)) + &f.y(j).square();
    // roots of p₁ are the x_j² = α̃²/x₀
    let p1: Vec<TowerElement> = prep
        .alpha_tilde
        .iter()
        .map(|a| alpha_component_raw(prep, a).square())
        .collect();
    Ok(p1.contains(&w))
}

fn alpha_component_raw(prep: &Prepared, a: &TowerElement) -> TowerElement {
    a.div(&prep.xi).unwrap().pow(prep.alpha_power as i64).unwrap()
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub use_sign_determination: bool,
    pub use_theta_shortcut: bool,
    pub layouts: Vec<Layout>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { use_sign_determination: true, use_theta_shortcut: true, layouts: vec![Layout::Zauner1, Layout::Zauner2] }
    }
}

impl SearchConfig {
    pub fn exhaustive() -> SearchConfig {
        SearchConfig { use_sign_determination: false, use_theta_shortcut: false, ..Default::default() }
    }
}

/// The candidate grid in its deterministic order.
pub fn candidate_grid(prep: &Prepared, cfg: &SearchConfig) -> Result<(Vec<Choice>, Vec<String>)> {
    let mut notes = Vec::new();
    if prep.symmetry == Symmetry::Trivial {
        return Ok((vec![Choice { theta: 1, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner1 }], notes));
    }
    let layouts: Vec<Layout> = if prep.symmetry == Symmetry::Standard { cfg.layouts.clone() } else { vec![Layout::Zauner1] };
    let (s0s, s1s) = if cfg.use_sign_determination {
        match sign_determination(prep) {
            Ok(s) => {
                notes.push(format!("signs from trace identities: s0 = {}, s1 = {}", s.s0, s.s1));
                (vec![s.s0], vec![s.s1])
            }
            Err(e) => {
                notes.push(format!("sign determination failed ({e}); enumerating signs"));
                (vec![1, -1], vec![1, -1])
            }
        }
    } else {
        (vec![1, -1], vec![1, -1])
    };
    let mut thetas: Vec<(u64, Layout, i32)> = Vec::new();
    for th in prep.theta_candidates() {
        for &l in &layouts {
            for &s1 in &s1s {
                thetas.push((th, l, s1));
            }
        }
    }
    if cfg.use_theta_shortcut && prep.symmetry == Symmetry::Standard {
        let matched: Vec<(u64, Layout, i32)> = thetas
            .par_iter()
            .filter(|&&(th, l, s1)| theta_matches(prep, th, s1, l).unwrap_or(false))
            .cloned()
            .collect();
        if matched.is_empty() {
            notes.push("θ shortcut matched nothing; enumerating θ".into());
        } else {
            notes.push(format!("θ shortcut kept {:?}", matched));
            thetas = matched;
        }
    }
    let mut grid = Vec::new();
    for &(theta, layout, s1) in &thetas {
        for &s0 in &s0s {
            for alpha_offset in 0..prep.len_a() {
                grid.push(Choice { theta, s0, s1, alpha_offset, layout });
            }
        }
    }
    grid.sort_by_key(|c| (c.theta, -c.s0, -c.s1, c.alpha_offset, c.layout as u8));
    Ok((grid, notes))
}

/// Outcome of a search.
#[derive(Clone, Debug)]
pub struct SearchReport {
    pub tested: usize,
    pub baby_survivors: Vec<Choice>,
    pub notes: Vec<String>,
    pub fiducial: Option<Fiducial>,
}

/// Enumerates the grid, keeps baby-test survivors, separates layouts with
/// G(Z; 1, 1) and returns the first candidate that verifies.
pub fn search(prep: &Prepared, cfg: &SearchConfig) -> Result<SearchReport> {
    let (grid, mut notes) = candidate_grid(prep, cfg)?;
    let results: Vec<(usize, Option<Fiducial>)> = grid
        .par_iter()
        .enumerate()
        .map(|(k, &c)| {
            let f = match build_candidate(prep, c) {
                Ok(f) => f,
                Err(_) => return (k, None),
            };
            let (_, pass) = baby_test(&f);
            (k, pass.then_some(f))
        })
        .collect();
    let survivors: Vec<(usize, Fiducial)> = results.into_iter().filter_map(|(k, f)| f.map(|f| (k, f))).collect();
    let baby_survivors: Vec<Choice> = survivors.iter().map(|(_, f)| f.choice).collect();
    notes.push(format!("{} of {} candidates pass the baby test", survivors.len(), grid.len()));
    let mut found = None;
    for (_, f) in survivors {
        if f.p > 1 && f.symmetry == Symmetry::Standard {
            let g = verify::layout_probe(&f)?;
            if !g.passed {
                notes.push(format!("{:?}: G(Z;1,1) = {} rejects the layout", f.choice, g.got));
                continue;
            }
        }
        let rep = verify::verify_sic(&f, verify::Mode::ExactBlock, 0)?;
        if rep.passed() {
            found = Some(f);
            break;
        }
        notes.push(format!("{:?}: block verification failed", f.choice));
    }
    Ok(SearchReport { tested: grid.len(), baby_survivors, notes, fiducial: found })
}

/// Runs the whole pipeline on a dataset.
pub fn construct(ds: &StarkDataset, cfg: &SearchConfig) -> Result<(Prepared, SearchReport)> {
    let prep = prepare(ds)?;
    let rep = search(&prep, cfg)?;
    if rep.fiducial.is_none() {
        return Err(Error::Exhausted { tested: rep.tested, report: rep.notes.join("\n") });
    }
    Ok((prep, rep))
}

/// Baby overlap identities on a verified fiducial:
/// √(d+1)⟨Ψ|D₀₀⊗X^{−2j}|Ψ⟩ = x_j², √(d+1)⟨Ψ|D₀₂⊗X^{−2j}|Ψ⟩ = −y_j².
pub fn baby_identities(f: &Fiducial) -> Result<Vec<(usize, bool, bool)>> {
    let mut out = Vec::new();
    for j in 1..f.p as usize {
        let m = -2 * j as i64;
        let a = verify::diagonal_overlap(f, 0, 0, m)?;
        let b = verify::diagonal_overlap(f, 0, 2, m)?;
        let ok_a = &f.sqrt_d1 * &a == f.x(j).square();
        let ok_b = &f.sqrt_d1 * &b == -&f.y(j).square();
        out.push((j, ok_a, ok_b));
    }
    Ok(out)
}

/// Decimal export of the normalized vector at `digits` significant digits.
pub fn numeric_export(f: &Fiducial, digits: u32) -> Result<Vec<[String; 2]>> {
    let bits = (digits as f64 * 3.33) as u32 + 32;
    let ctx = EmbeddingContext::new(&f.tower, bits)?;
    let n = ctx.embed(&f.nsq)?;
    let nroot = n.re_ball().sqrt_real().ok_or_else(|| Error::Precision("N² not positive".into()))?;
    f.flat()
        .iter()
        .map(|x| {
            let b = ctx.embed(x)?.mul(&nroot);
            let (re, im) = b.to_decimal(digits as usize);
            Ok([re, im])
        })
        .collect()
}

pub fn theta_inverse(theta: u64, p: u32) -> u64 {
    mod_inv(theta as i64, p as i64).unwrap() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d52() -> Prepared {
        prepare(&StarkDataset::from_str(include_str!("../data/d52.json")).unwrap()).unwrap()
    }

    #[test]
    fn d4_is_the_displayed_vector() {
        let prep = prepare(&StarkDataset::from_str(include_str!("../data/d4.json")).unwrap()).unwrap();
        let f = build_candidate(&prep, Choice { theta: 1, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner1 }).unwrap();
        let one = TowerElement::one(&f.tower);
        assert_eq!(f.flat(), vec![one.clone(), one.clone(), one, f.xi().clone()]);
        assert_eq!(f.xi().square(), f.x0);
        // p = 1: Σ⟨v|X|v⟩ = |v|², so the test is |B|²N⁴ = 1
        assert!(baby_test(&f).1);
    }

    #[test]
    fn d52_theta_seven_passes_and_two_fails() {
        let prep = d52();
        let good = build_candidate(&prep, Choice { theta: 7, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner2 }).unwrap();
        assert!(baby_test(&good).1);
        let bad = build_candidate(&prep, Choice { theta: 2, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner2 }).unwrap();
        assert!(!baby_test(&bad).1);
    }

    #[test]
    fn perturbed_phase_fails_the_baby_test() {
        let prep = d52();
        let mut f = build_candidate(&prep, Choice { theta: 7, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner2 }).unwrap();
        // y₁ ↦ −y₁ keeps |y₁| = 1 but breaks the overlap
        f.v[0][1] = -&f.v[0][1];
        assert!(!baby_test(&f).1);
        assert!(check_invariants(&f).is_err());
    }

    #[test]
    fn invariant_error_names_the_equation() {
        let prep = d52();
        let mut f = build_candidate(&prep, Choice { theta: 7, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner2 }).unwrap();
        f.v[3][0] = -&f.v[3][0];
        f.v[3][0] = &f.v[3][0] + &TowerElement::one(&f.tower);
        let msg = check_invariants(&f).unwrap_err().to_string();
        assert!(msg.contains("x₀"), "{msg}");
    }

    #[test]
    fn grid_sizes() {
        let prep = d52();
        let full = candidate_grid(&prep, &SearchConfig::exhaustive()).unwrap().0;
        assert_eq!(full.len(), 4 * 4 * 4 * 2);
        let signs = SearchConfig { use_theta_shortcut: false, ..Default::default() };
        assert_eq!(candidate_grid(&prep, &signs).unwrap().0.len(), 2 * 4 * 4);
        let fast = candidate_grid(&prep, &SearchConfig::default()).unwrap().0;
        assert_eq!(fast.len(), 4);
        assert!(fast.iter().all(|c| c.theta == 7 && c.layout == Layout::Zauner2));
    }

    #[test]
    fn fiducial_json_round_trip() {
        let prep = d52();
        let f = build_candidate(&prep, Choice { theta: 7, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner2 }).unwrap();
        let j = serde_json::to_string(&f.to_json()).unwrap();
        let g = Fiducial::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&g.to_json()).unwrap(), j);
        check_invariants(&g).unwrap();
    }
}
