//! Exact and numerical SIC verification.
//!
//! Exact values live in T[i] = T[x]/(x²+1), stored as pairs a + b·i with a, b
//! in the fiducial's tower T; p-th roots of unity are handled in the group
//! ring T[i][x]/(xᵖ − 1). Equalities proved there hold under every embedding,
//! so no irreducibility of x² + 1 or Φ_p over T is needed.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{shift_inner, Fiducial};
use crate::exact::{certify_root, rat, Ball, EmbeddingContext, Tower, TowerElement};
use crate::galois::Automorphism;
use crate::heisenberg::{clifford_specials, generators, mod_inv, mod_pow, monomial_rep4, MonomialOp};
use crate::{Error, Result};

/// a + b·i with a, b in a tower T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gauss {
    pub a: TowerElement,
    pub b: TowerElement,
}

impl Gauss {
    pub fn zero(t: &Arc<Tower>) -> Gauss {
        Gauss { a: TowerElement::zero(t), b: TowerElement::zero(t) }
    }

    pub fn real(x: TowerElement) -> Gauss {
        let b = TowerElement::zero(x.tower());
        Gauss { a: x, b }
    }

    /// iᵏ.
    pub fn i_pow(t: &Arc<Tower>, k: u32) -> Gauss {
        let (one, zero) = (TowerElement::one(t), TowerElement::zero(t));
        match k % 4 {
            0 => Gauss { a: one, b: zero },
            1 => Gauss { a: zero, b: one },
            2 => Gauss { a: -one, b: zero },
            _ => Gauss { a: zero, b: -one },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, o: &Gauss) -> Gauss {
        Gauss { a: &self.a + &o.a, b: &self.b + &o.b }
    }

    pub fn sub(&self, o: &Gauss) -> Gauss {
        Gauss { a: &self.a - &o.a, b: &self.b - &o.b }
    }

    pub fn mul(&self, o: &Gauss) -> Gauss {
        Gauss {
            a: &(&self.a * &o.a) - &(&self.b * &o.b),
            b: &(&self.a * &o.b) + &(&self.b * &o.a),
        }
    }

    pub fn scale(&self, c: &TowerElement) -> Gauss {
        Gauss { a: &self.a * c, b: &self.b * c }
    }

    /// Multiplication by iᵏ.
    pub fn times_i_pow(&self, k: u32) -> Gauss {
        match k % 4 {
            0 => self.clone(),
            1 => Gauss { a: -&self.b, b: self.a.clone() },
            2 => Gauss { a: -&self.a, b: -&self.b },
            _ => Gauss { a: self.b.clone(), b: -&self.a },
        }
    }

    /// Complex conjugation, given conjugation on T.
    pub fn conj(&self, c: &Automorphism) -> Gauss {
        Gauss { a: c.apply(&self.a), b: -&c.apply(&self.b) }
    }

    pub fn embed(&self, ctx: &EmbeddingContext) -> Result<Ball> {
        let i = Ball::i(ctx.work_precision());
        Ok(ctx.embed(&self.a)?.add(&ctx.embed(&self.b)?.mul(&i)))
    }
}

impl std::fmt::Display for Gauss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "({}) + i·({})", self.a, self.b)
        }
    }
}

/// Index (i, j) with `op` ∝ D_{i,j} in dimension 4.
pub fn d4_index(op: &MonomialOp) -> (i64, i64) {
    for i in 0..4 {
        for j in 0..4 {
            if op.phase_relative_to(&monomial_rep4(i, j)).is_some() {
                return (i, j);
            }
        }
    }
    unreachable!("not a displacement operator up to phase")
}

fn conj_op(op: &MonomialOp) -> MonomialOp {
    let m = op.modulus() as i64;
    MonomialOp::new(op.perm().to_vec(), op.phases().iter().map(|&e| -(e as i64) + m).collect(), op.modulus()).unwrap()
}

/// U_Z D_{i,j} U_Z⁻¹ ∝ D_{i',j'}.
pub fn zauner_d4(i: i64, j: i64) -> (i64, i64) {
    let u = clifford_specials().u_z;
    d4_index(&u.conjugate(&monomial_rep4(i, j)))
}

/// U_P D*_{i,j} U_P⁻¹ ∝ D_{i',j'}.
pub fn antiunitary_d4(i: i64, j: i64) -> (i64, i64) {
    let u = clifford_specials().u_p;
    d4_index(&u.conjugate(&conj_op(&monomial_rep4(i, j))))
}

/// D_{i,j} as (π(a), iᵉ) per column a, with the global phase removed so the
/// relative phases are powers of i.
pub fn d4_columns(i: i64, j: i64) -> Vec<(usize, u32)> {
    let op = monomial_rep4(i, j);
    let m = op.modulus();
    let base = op.phases()[op.perm()[0]];
    (0..4)
        .map(|a| {
            let r = op.perm()[a];
            let e = (op.phases()[r] + m - base) % m;
            assert!(e.is_multiple_of(m / 4), "relative phases of D are powers of i");
            (r, e / (m / 4))
        })
        .collect()
}

/// F_i(s) = Σ_a c_a conj(v_{π(a)}[s+i]) v_a[s] for s = 0..p−1 (unnormalized).
pub fn f_sequence(f: &Fiducial, d4: (i64, i64), i: i64) -> Vec<Gauss> {
    let p = f.p as i64;
    let cols = d4_columns(d4.0, d4.1);
    let conj_blocks: Vec<Vec<TowerElement>> = f.v.iter().map(|b| b.iter().map(|x| f.conj.apply(x)).collect()).collect();
    (0..p)
        .map(|s| {
            let si = (s + i).rem_euclid(p) as usize;
            let mut acc = Gauss::zero(&f.tower);
            for (a, &(r, e)) in cols.iter().enumerate() {
                let term = Gauss::real(&conj_blocks[r][si] * &f.v[a][s as usize]);
                acc = acc.add(&term.times_i_pow(e));
            }
            acc
        })
        .collect()
}

/// ⟨Ψ|D_{i,j} ⊗ X^m|Ψ⟩ for diagonal D with real phases, in T.
pub fn diagonal_overlap(f: &Fiducial, i: i64, j: i64, m: i64) -> Result<TowerElement> {
    let op = monomial_rep4(i, j);
    if !op.is_diagonal() {
        return Err(Error::Input(format!("D_{{{i},{j}}} is not diagonal")));
    }
    let mut acc = TowerElement::zero(&f.tower);
    for b in 0..4 {
        let s = crate::heisenberg::PhaseExp { exp: op.phases()[b], modulus: op.modulus() }
            .as_sign()
            .ok_or_else(|| Error::Input(format!("D_{{{i},{j}}} has non-real phases")))?;
        let t = shift_inner(&f.v[b], m, &f.conj);
        acc = if s > 0 { &acc + &t } else { &acc - &t };
    }
    Ok(&acc * &f.nsq)
}

/// G(D; i, k) = N⁴ Σ_s F_i(s) conj(F_i(s+k)).
pub fn gik_block(f: &Fiducial, d4: (i64, i64), i: i64, k: i64) -> Gauss {
    let fs = f_sequence(f, d4, i);
    g_from_f(f, &fs, k)
}

fn g_from_f(f: &Fiducial, fs: &[Gauss], k: i64) -> Gauss {
    let p = fs.len() as i64;
    let n4 = f.nsq.square();
    let mut acc = Gauss::zero(&f.tower);
    for s in 0..p {
        let t = (s + k).rem_euclid(p) as usize;
        acc = acc.add(&fs[s as usize].mul(&fs[t].conj(&f.conj)));
    }
    acc.scale(&n4)
}

/// SIC target of G(D; i, k).
pub fn block_target(d: u32, d4: (i64, i64), i: i64, k: i64, p: u32) -> num_rational::BigRational {
    let p = p as i64;
    let id = d4.0.rem_euclid(4) == 0 && d4.1.rem_euclid(4) == 0;
    let di = (i.rem_euclid(p) == 0) as i64;
    let dk = (k.rem_euclid(p) == 0) as i64;
    let num = if id { 4 * di + dk } else { dk };
    rat(num, d as i64 + 1)
}

/// G(i, k) = Σ_r conj(a_{r+i}) conj(a_{r+k}) a_r a_{r+i+k} on components in
/// a standard basis.
pub fn gik(a: &[Gauss], i: i64, k: i64, conj: &Automorphism) -> Gauss {
    let n = a.len() as i64;
    let ac: Vec<Gauss> = a.iter().map(|x| x.conj(conj)).collect();
    let at = |r: i64| r.rem_euclid(n) as usize;
    let mut acc = Gauss::zero(a[0].a.tower());
    for r in 0..n {
        let t = ac[at(r + i)].mul(&ac[at(r + k)]).mul(&a[at(r)]).mul(&a[at(r + i + k)]);
        acc = acc.add(&t);
    }
    acc
}

/// Result of the G(Z; 1, 1) layout probe.
#[derive(Clone, Debug)]
pub struct Probe {
    pub passed: bool,
    pub got: Gauss,
}

pub fn layout_probe(f: &Fiducial) -> Result<Probe> {
    let g = gik_block(f, (0, 1), 1, 1);
    Ok(Probe { passed: g.is_zero(), got: g })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Block-G orbit representatives.
    ExactBlock,
    /// Overlap-phase orbit representatives with p-th roots of unity.
    ExactOverlap,
    /// Every overlap as a ball.
    Numeric,
    /// Every block-G condition exactly.
    FullBlock,
    /// Every overlap exactly.
    FullOverlap,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Input(format!("unknown mode `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Operator {
    /// G(D_{d4}; i, k) in the block decomposition.
    Block { d4: (i64, i64), i: i64, k: i64 },
    /// |⟨Ψ|D_{d4} ⊗ X^a Z^b|Ψ⟩|².
    Overlap { d4: (i64, i64), a: i64, b: i64 },
    /// G(i, k) in prime dimension.
    Prime { i: i64, k: i64 },
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Operator::Block { d4, i, k } => write!(f, "G(D{}{}; {i}, {k})", d4.0, d4.1),
            Operator::Overlap { d4, a, b } => write!(f, "|<D{}{} x X^{a} Z^{b}>|^2", d4.0, d4.1),
            Operator::Prime { i, k } => write!(f, "G({i}, {k})"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Condition {
    pub op: Operator,
    pub expected: String,
    pub orbit_size: usize,
    /// Why the condition holds without checking, if it does.
    pub credited: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionSet {
    pub d: u32,
    pub kind: String,
    pub orbits: usize,
    pub conditions: Vec<Condition>,
    pub provenance: Vec<String>,
}

impl ConditionSet {
    /// Conditions left after the credits.
    pub fn to_check(&self) -> usize {
        self.conditions.iter().filter(|c| c.credited.is_none()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMode {
    Prime,
    Fourp,
    Block,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

fn orbits_of<K: Ord + Copy>(keys: &[K], moves: impl Fn(K) -> Vec<K>) -> Vec<Vec<K>> {
    let index: BTreeMap<K, usize> = keys.iter().enumerate().map(|(n, &k)| (k, n)).collect();
    let mut uf = UnionFind::<usize>::new(keys.len());
    for (n, &k) in keys.iter().enumerate() {
        for m in moves(k) {
            uf.union(n, index[&m]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<K>> = BTreeMap::new();
    for (n, &k) in keys.iter().enumerate() {
        groups.entry(uf.find(n)).or_default().push(k);
    }
    let mut out: Vec<Vec<K>> = groups.into_values().collect();
    for g in &mut out {
        g.sort();
    }
    out.sort_by(|a, b| a[0].cmp(&b[0]));
    out
}

/// Brute-force orbits of (i, k) ∈ {1..d−1}² under (θi, θk), swap, (−i, k)
/// and (i, −k).
pub fn prime_orbits(d: u32) -> Result<Vec<Vec<(i64, i64)>>> {
    if !is_prime(d as u64) || d < 3 {
        return Err(Error::Input(format!("{d} is not an odd prime")));
    }
    let n = d as i64;
    let theta = generators(d as u64)[0] as i64;
    let keys: Vec<(i64, i64)> = (1..n).flat_map(|i| (1..n).map(move |k| (i, k))).collect();
    Ok(orbits_of(&keys, |(i, k)| {
        vec![
            ((theta * i) % n, (theta * k) % n),
            (k, i),
            ((n - i) % n, k),
            (i, (n - k) % n),
        ]
    }))
}

/// The same count through ratio classes r = k/i under r ↦ 1/r, r ↦ −r.
pub fn prime_orbit_count(d: u32) -> Result<usize> {
    if !is_prime(d as u64) || d < 3 {
        return Err(Error::Input(format!("{d} is not an odd prime")));
    }
    let n = d as i64;
    let keys: Vec<i64> = (1..n).collect();
    let inv = |r: i64| mod_inv(r, n).unwrap();
    Ok(orbits_of(&keys, |r| vec![inv(r), n - r]).len())
}

fn fourp_params(d: u32) -> Result<(u32, u64, u64)> {
    if !d.is_multiple_of(4) || !is_prime(d as u64 / 4) || d / 4 < 5 || !(d / 4 - 1).is_multiple_of(3) {
        return Err(Error::Input(format!("d = {d} is not 4p with p ≡ 1 mod 3 prime")));
    }
    let p = d / 4;
    let theta = generators(p as u64)[0];
    let delta = mod_pow(theta, ((p - 1) / 3) as u64, p as u64);
    Ok((p, theta, delta))
}

type Key4 = (i64, i64, i64, i64);

/// Orbits of (D, a, b) for the overlaps ⟨Ψ|D ⊗ XᵃZᵇ|Ψ⟩, keys (a, b, D).
pub fn overlap_orbits(d: u32) -> Result<Vec<Vec<Key4>>> {
    let (p, theta, delta) = fourp_params(d)?;
    let (p, th, de) = (p as i64, theta as i64, delta as i64);
    let dinv = mod_inv(de, p).unwrap();
    let thinv = mod_inv(th, p).unwrap();
    let zm = d4_map(zauner_d4);
    let jm = d4_map(antiunitary_d4);
    let keys: Vec<Key4> = (0..p)
        .flat_map(|a| (0..p).flat_map(move |b| (0..16).map(move |x| (a, b, x / 4, x % 4))))
        .collect();
    let m = |x: i64| x.rem_euclid(p);
    Ok(orbits_of(&keys, |(a, b, di, dj)| {
        let z = zm[(di * 4 + dj) as usize];
        let j = jm[(di * 4 + dj) as usize];
        vec![
            (a, m(th * b), di, dj),
            (m(thinv * a), m(th * b), di, dj),
            (m(dinv * a), m(de * b), z.0, z.1),
            (m(-a), m(-b), (-di).rem_euclid(4), (-dj).rem_euclid(4)),
            (m(-a), b, j.0, j.1),
        ]
    }))
}

/// Orbits of (D, i, k) for G(D; i, k), keys (i, k, D).
pub fn block_orbits(d: u32) -> Result<Vec<Vec<Key4>>> {
    let (p, theta, delta) = fourp_params(d)?;
    let (p, th, de) = (p as i64, theta as i64, delta as i64);
    let dinv = mod_inv(de, p).unwrap();
    let zm = d4_map(zauner_d4);
    let jm = d4_map(antiunitary_d4);
    let keys: Vec<Key4> = (0..p)
        .flat_map(|i| (0..p).flat_map(move |k| (0..16).map(move |x| (i, k, x / 4, x % 4))))
        .collect();
    let m = |x: i64| x.rem_euclid(p);
    Ok(orbits_of(&keys, |(i, k, di, dj)| {
        let z = zm[(di * 4 + dj) as usize];
        let j = jm[(di * 4 + dj) as usize];
        vec![
            (m(dinv * i), m(dinv * k), z.0, z.1),
            (m(-i), k, j.0, j.1),
            (m(-i), m(-k), (-di).rem_euclid(4), (-dj).rem_euclid(4)),
            (m(th * i), m(th * k), di, dj),
            (i, m(-k), di, dj),
        ]
    }))
}

fn d4_map(f: fn(i64, i64) -> (i64, i64)) -> Vec<(i64, i64)> {
    (0..16).map(|x| f(x / 4, x % 4)).collect()
}

fn even(di: i64, dj: i64) -> bool {
    di % 2 == 0 && dj % 2 == 0
}

/// Orbit representatives with their expected values.
pub fn reduced_conditions(d: u32, mode: ReductionMode) -> Result<ConditionSet> {
    match mode {
        ReductionMode::Prime => {
            let orbits = prime_orbits(d)?;
            let conditions = orbits
                .iter()
                .map(|o| Condition {
                    op: Operator::Prime { i: o[0].0, k: o[0].1 },
                    expected: rat(0, 1).to_string(),
                    orbit_size: o.len(),
                    credited: None,
                })
                .collect();
            Ok(ConditionSet {
                d,
                kind: "prime".into(),
                orbits: orbits.len(),
                conditions,
                provenance: vec![
                    "G(i,k) = G(k,i) (swap)".into(),
                    "G(i,k) = G(-i,-k) and realness: (i,k) ~ (-i,k) ~ (i,-k)".into(),
                    "Galois: G(i,k)^σ = G(θi, θk)".into(),
                ],
            })
        }
        ReductionMode::Fourp => {
            let orbits = overlap_orbits(d)?;
            let big = rat(1, d as i64 + 1).to_string();
            let conditions = orbits
                .iter()
                .map(|o| {
                    let (a, b, di, dj) = o[0];
                    let has = |x: Key4| o.contains(&x);
                    let credited = if has((0, 0, 0, 0)) {
                        Some("normalization".to_string())
                    } else if has((0, 1, 0, 0)) {
                        Some("row sums: <1 x Z^j> = 1/sqrt(d+1)".to_string())
                    } else if has((0, 0, 0, 2)) {
                        Some("diagonal D overlaps = -1/sqrt(d+1)".to_string())
                    } else if has((0, 1, 0, 2)) {
                        Some("row sums: <D02 x Z^j> = -1/sqrt(d+1)".to_string())
                    } else {
                        None
                    };
                    let expected = if (a, b, di, dj) == (0, 0, 0, 0) { "1".to_string() } else { big.clone() };
                    Condition { op: Operator::Overlap { d4: (di, dj), a, b }, expected, orbit_size: o.len(), credited }
                })
                .collect();
            Ok(ConditionSet {
                d,
                kind: "fourp".into(),
                orbits: orbits.len(),
                conditions,
                provenance: vec![
                    "Galois over K(ζ_p): b ↦ cb".into(),
                    "σ: (a, b) ↦ (θ⁻¹a, θb)".into(),
                    "Zauner U_Z ⊗ U_F: D ↦ U_Z D U_Z⁻¹, (a, b) ↦ (δ⁻¹a, δb)".into(),
                    "adjoint: (D, a, b) ↦ (D⁻¹, −a, −b)".into(),
                    "anti-unitary (U_P ⊗ P)Ψ* = Ψ: D ↦ U_P D* U_P⁻¹, (a, b) ↦ (−a, b)".into(),
                ],
            })
        }
        ReductionMode::Block => {
            let orbits = block_orbits(d)?;
            let p = d / 4;
            let conditions = orbits
                .iter()
                .map(|o| {
                    let (i, k, di, dj) = o[0];
                    let credited = if o.iter().any(|&(i, _, di, dj)| i == 0 && even(di, dj)) {
                        Some("built into the Ansatz (row sums and diagonal overlaps)".to_string())
                    } else if o.contains(&(0, 0, 0, 1)) {
                        Some("completeness: Σ_{D,i} G(D;i,0) = 4 given the other k = 0 conditions".to_string())
                    } else {
                        None
                    };
                    Condition {
                        op: Operator::Block { d4: (di, dj), i, k },
                        expected: block_target(d, (di, dj), i, k, p).to_string(),
                        orbit_size: o.len(),
                        credited,
                    }
                })
                .collect();
            Ok(ConditionSet {
                d,
                kind: "block".into(),
                orbits: orbits.len(),
                conditions,
                provenance: vec![
                    "Zauner: D ↦ U_Z D U_Z⁻¹, (i, k) ↦ δ⁻¹(i, k)".into(),
                    "anti-unitary: D ↦ U_P D* U_P⁻¹, (i, k) ↦ (−i, k)".into(),
                    "adjoint: (D⁻¹, −i, −k)".into(),
                    "σ: (i, k) ↦ θ(i, k)".into(),
                    "G real: (i, k) ↦ (i, −k)".into(),
                ],
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: String,
    pub expected: String,
    pub got: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub credited: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: Mode,
    pub d: u32,
    /// Degree over ℚ of the ring the values were computed in.
    pub ring_degree: usize,
    pub conditions: Vec<ConditionResult>,
    pub elapsed_ms: u128,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.conditions.is_empty() && self.conditions.iter().all(|c| c.status == Status::Pass)
    }

    pub fn failures(&self) -> usize {
        self.conditions.iter().filter(|c| c.status == Status::Fail).count()
    }
}

fn check_exact(op: Operator, got: &Gauss, expected: &num_rational::BigRational, credited: Option<String>) -> ConditionResult {
    let t = got.a.tower();
    let want = Gauss::real(TowerElement::from_rational(t, expected));
    let ok = *got == want;
    ConditionResult {
        condition: op.to_string(),
        expected: expected.to_string(),
        got: if ok { expected.to_string() } else { got.to_string() },
        status: if ok { Status::Pass } else { Status::Fail },
        credited,
    }
}

/// |⟨Ψ|D ⊗ XᵃZᵇ|Ψ⟩|² in T[i][x]/(xᵖ − 1): coefficients of x⁰..x^{p−1}.
/// The value at x = ζ_p equals c iff P₀ − P_m = c for every m ≠ 0.
pub fn overlap_sq_group_ring(f: &Fiducial, d4: (i64, i64), a: i64, b: i64) -> Vec<Gauss> {
    let p = f.p as usize;
    let fs = f_sequence(f, d4, a);
    let mut g = vec![Gauss::zero(&f.tower); p];
    for (s, fv) in fs.iter().enumerate() {
        let k = ((b.rem_euclid(p as i64) as usize) * s) % p;
        g[k] = g[k].add(fv);
    }
    let gc: Vec<Gauss> = g.iter().map(|x| x.conj(&f.conj)).collect();
    let n4 = f.nsq.square();
    (0..p)
        .map(|m| {
            let mut acc = Gauss::zero(&f.tower);
            for k in 0..p {
                if g[k].is_zero() {
                    continue;
                }
                let j = (k + p - m) % p;
                if !gc[j].is_zero() {
                    acc = acc.add(&g[k].mul(&gc[j]));
                }
            }
            acc.scale(&n4)
        })
        .collect()
}

fn overlap_value(coeffs: &[Gauss]) -> Option<Gauss> {
    let c = coeffs.get(1).cloned().unwrap_or_else(|| Gauss::zero(coeffs[0].a.tower()));
    coeffs[1..].iter().all(|x| *x == c).then(|| coeffs[0].sub(&c))
}

fn overlap_expected(d: u32, d4: (i64, i64), a: i64, b: i64, p: u32) -> num_rational::BigRational {
    let p = p as i64;
    if d4.0 % 4 == 0 && d4.1 % 4 == 0 && a.rem_euclid(p) == 0 && b.rem_euclid(p) == 0 {
        rat(1, 1)
    } else {
        rat(1, d as i64 + 1)
    }
}

fn eval_overlap(f: &Fiducial, d4: (i64, i64), a: i64, b: i64, credited: Option<String>) -> ConditionResult {
    let op = Operator::Overlap { d4, a, b };
    let expected = overlap_expected(f.d, d4, a, b, f.p);
    match overlap_value(&overlap_sq_group_ring(f, d4, a, b)) {
        Some(v) => check_exact(op, &v, &expected, credited),
        None => ConditionResult {
            condition: op.to_string(),
            expected: expected.to_string(),
            got: "not in T(i)".into(),
            status: Status::Fail,
            credited,
        },
    }
}

/// Runs the requested verification. `digits` is the decimal precision for
/// numeric mode.
pub fn verify_sic(f: &Fiducial, mode: Mode, digits: u32) -> Result<VerifyReport> {
    let start = Instant::now();
    let p = f.p as i64;
    let ring = f.tower.size() * 2;
    let (conditions, ring_degree) = match mode {
        Mode::ExactBlock | Mode::FullBlock => {
            let keys: Vec<(Operator, Option<String>)> = if mode == Mode::FullBlock || f.p == 1 || !f.d.is_multiple_of(4) || fourp_params(f.d).is_err() {
                (0..p)
                    .flat_map(|i| (0..p).flat_map(move |k| (0..16).map(move |x| (Operator::Block { d4: (x / 4, x % 4), i, k }, None))))
                    .collect()
            } else {
                reduced_conditions(f.d, ReductionMode::Block)?.conditions.into_iter().map(|c| (c.op, c.credited)).collect()
            };
            // group by (D, i) so each F sequence is built once
            let mut by_di: BTreeMap<((i64, i64), i64), Vec<(i64, Option<String>)>> = BTreeMap::new();
            for (op, cr) in keys {
                if let Operator::Block { d4, i, k } = op {
                    by_di.entry((d4, i)).or_default().push((k, cr));
                }
            }
            let groups: Vec<_> = by_di.into_iter().collect();
            let res: Vec<Vec<ConditionResult>> = groups
                .par_iter()
                .map(|((d4, i), ks)| {
                    let fs = f_sequence(f, *d4, *i);
                    ks.iter()
                        .map(|(k, cr)| {
                            let g = g_from_f(f, &fs, *k);
                            let op = Operator::Block { d4: *d4, i: *i, k: *k };
                            check_exact(op, &g, &block_target(f.d, *d4, *i, *k, f.p), cr.clone())
                        })
                        .collect()
                })
                .collect();
            (res.into_iter().flatten().collect(), ring)
        }
        Mode::ExactOverlap | Mode::FullOverlap => {
            let keys: Vec<(Operator, Option<String>)> = if mode == Mode::FullOverlap || f.p == 1 || fourp_params(f.d).is_err() {
                (0..p)
                    .flat_map(|a| (0..p).flat_map(move |b| (0..16).map(move |x| (Operator::Overlap { d4: (x / 4, x % 4), a, b }, None))))
                    .collect()
            } else {
                reduced_conditions(f.d, ReductionMode::Fourp)?.conditions.into_iter().map(|c| (c.op, c.credited)).collect()
            };
            let res: Vec<ConditionResult> = keys
                .par_iter()
                .map(|(op, cr)| match *op {
                    Operator::Overlap { d4, a, b } => eval_overlap(f, d4, a, b, cr.clone()),
                    _ => unreachable!(),
                })
                .collect();
            let cyc = if f.p > 1 { f.p as usize - 1 } else { 1 };
            (res, ring * cyc)
        }
        Mode::Numeric => (numeric_overlaps(f, digits)?, ring),
    };
    Ok(VerifyReport { mode, d: f.d, ring_degree, conditions, elapsed_ms: start.elapsed().as_millis() })
}

/// ζ_p as a certified ball.
pub fn zeta_ball(p: u32, prec: u32) -> Result<Ball> {
    if p == 1 {
        return Ok(Ball::from_i64(1, prec));
    }
    let coeffs: Vec<Ball> = (0..p).map(|_| Ball::from_i64(1, prec)).collect();
    let approx = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / p as f64);
    certify_root(&coeffs, approx)
}

fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

/// Normalized components as balls, in block order.
pub fn embed_fiducial(f: &Fiducial, digits: u32) -> Result<(EmbeddingContext, Vec<Vec<Ball>>, Ball)> {
    let ctx = EmbeddingContext::new(&f.tower, digits_to_bits(digits) + 64)?;
    let blocks = f
        .v
        .iter()
        .map(|b| b.iter().map(|x| ctx.embed(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let n2 = ctx.embed(&f.nsq)?;
    Ok((ctx, blocks, n2))
}

fn i_ball(k: u32, prec: u32) -> Ball {
    let one = Ball::from_i64(1, prec);
    let i = Ball::i(prec);
    match k % 4 {
        0 => one,
        1 => i,
        2 => one.neg(),
        _ => i.neg(),
    }
}

fn numeric_overlaps(f: &Fiducial, digits: u32) -> Result<Vec<ConditionResult>> {
    let (ctx, v, n2) = embed_fiducial(f, digits)?;
    let prec = ctx.work_precision();
    let p = f.p as usize;
    let zeta = zeta_ball(f.p, prec)?.set_prec(prec);
    let mut zpow = vec![Ball::from_i64(1, prec)];
    for _ in 1..p {
        zpow.push(zpow.last().unwrap().mul(&zeta));
    }
    let n4 = n2.mul(&n2);
    let tol_bits = digits_to_bits(digits) / 2;
    let tol = Ball::from_int(&BigInt::from(1), prec).div_int(&(BigInt::from(1) << tol_bits));
    let keys: Vec<((i64, i64), usize, usize)> =
        (0..16).flat_map(|x| (0..p).flat_map(move |a| (0..p).map(move |b| ((x / 4, x % 4), a, b)))).collect();
    let vc: Vec<Vec<Ball>> = v.iter().map(|b| b.iter().map(|x| x.conj()).collect()).collect();
    let out = keys
        .par_iter()
        .map(|&(d4, a, b)| {
            let cols = d4_columns(d4.0, d4.1);
            let mut acc = Ball::zero(prec);
            for s in 0..p {
                let mut fv = Ball::zero(prec);
                for (col, &(r, e)) in cols.iter().enumerate() {
                    fv = fv.add(&vc[r][(s + a) % p].mul(&v[col][s]).mul(&i_ball(e, prec)));
                }
                acc = acc.add(&fv.mul(&zpow[(b * s) % p]));
            }
            let sq = acc.mul(&acc.conj()).mul(&n4);
            let expected = overlap_expected(f.d, d4, a as i64, b as i64, f.p);
            let want = Ball::from_int(expected.numer(), prec).div_int(expected.denom());
            let diff = sq.sub(&want);
            let ok = diff.abs_upper() <= tol.re;
            let op = Operator::Overlap { d4, a: a as i64, b: b as i64 };
            ConditionResult {
                condition: op.to_string(),
                expected: expected.to_string(),
                got: sq.to_decimal(30).0,
                status: if ok { Status::Pass } else { Status::Fail },
                credited: None,
            }
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealnessReport {
    pub digits: u32,
    /// log₁₀ of the largest |Im| after removing the global phase.
    pub max_im_log10: f64,
    pub bound_log10: f64,
    pub passed: bool,
}

/// Applies U_M ⊗ U_𝓕 with (U_𝓕)_{r,s} = ω^{rs}/√p and tests that the result
/// is real up to a global phase.
pub fn realness_check(f: &Fiducial, digits: u32) -> Result<RealnessReport> {
    let (ctx, v, _) = embed_fiducial(f, digits)?;
    let prec = ctx.work_precision();
    let p = f.p as usize;
    let zeta = zeta_ball(f.p, prec)?.set_prec(prec);
    let mut zpow = vec![Ball::from_i64(1, prec)];
    for _ in 1..p {
        zpow.push(zpow.last().unwrap().mul(&zeta));
    }
    let fourier: Vec<Vec<Ball>> = v
        .iter()
        .map(|b| {
            (0..p)
                .map(|r| (0..p).fold(Ball::zero(prec), |acc, s| acc.add(&zpow[(r * s) % p].mul(&b[s]))))
                .collect()
        })
        .collect();
    let um = clifford_specials().u_m;
    let mut w: Vec<Ball> = Vec::with_capacity(4 * p);
    for r in 0..4 {
        let (c, ph) = um.entry(r);
        let e = ph.exp * 4 / ph.modulus;
        for x in &fourier[c] {
            w.push(x.mul(&i_ball(e, prec)));
        }
    }
    // phase of the largest component
    let big = w
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.to_complex().norm().partial_cmp(&b.1.to_complex().norm()).unwrap())
        .map(|(k, _)| k)
        .unwrap();
    let c = w[big].conj();
    let cabs = w[big].to_complex().norm();
    let max_im = w
        .iter()
        .map(|x| x.mul(&c).im_abs_log10() - cabs.log10())
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = -(digits as f64) / 2.0;
    Ok(RealnessReport { digits, max_im_log10: max_im, bound_log10: bound, passed: max_im < bound })
}

/// Standard-basis components of a d = 4 fiducial, ψ_std = T⁻¹ψ or Tψ, in
/// T(√2)[i].
pub fn standard_basis_d4(f: &Fiducial, inverse: bool) -> Result<(Vec<Gauss>, Automorphism)> {
    if f.p != 1 {
        return Err(Error::Input("standard-basis transform is implemented for d = 4".into()));
    }
    let minpoly = [TowerElement::from_int(&f.tower, -2), TowerElement::zero(&f.tower)];
    let t2 = f.tower.extend("sqrt2", &minpoly, Some((std::f64::consts::SQRT_2, 0.0)))?;
    let mut images: Vec<TowerElement> = f.conj.images().iter().map(|x| x.lift(&t2)).collect::<Result<_>>()?;
    let r2 = t2.generator();
    images.push(r2.clone());
    let conj = Automorphism::new(&t2, images, f.conj.sqrt_d_sign())?;
    let half_r2 = r2.scale(&rat(1, 2));
    // ζ₁₆^{2m} = ((1+i)/√2)^m
    let zeta8 = Gauss { a: half_r2.clone(), b: half_r2.clone() };
    let z8 = |m: u32| -> Gauss {
        let mut acc = Gauss::i_pow(&t2, 0);
        for _ in 0..(m % 8) {
            acc = acc.mul(&zeta8);
        }
        acc
    };
    let t = clifford_specials().t_basis;
    let psi: Vec<Gauss> = f.v.iter().map(|b| Gauss::real(b[0].lift(&t2).unwrap())).collect();
    let entry = |r: usize, s: usize| -> Option<Gauss> {
        let e = if inverse { t.entries[s][r].map(|e| (16 - e) % 16) } else { t.entries[r][s] };
        e.map(|e| {
            assert!(e % 2 == 0);
            z8(e / 2).scale(&half_r2)
        })
    };
    let out = (0..4)
        .map(|r| {
            (0..4).fold(Gauss::zero(&t2), |acc, s| match entry(r, s) {
                Some(m) => acc.add(&m.mul(&psi[s])),
                None => acc,
            })
        })
        .collect();
    Ok((out, conj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{prepare, search, SearchConfig};
    use crate::stark_io::StarkDataset;

    fn fiducial(text: &str) -> Fiducial {
        let prep = prepare(&StarkDataset::from_str(text).unwrap()).unwrap();
        search(&prep, &SearchConfig::default()).unwrap().fiducial.unwrap()
    }

    #[test]
    fn d4_all_overlaps_exact() {
        let f = fiducial(include_str!("../data/d4.json"));
        let r = verify_sic(&f, Mode::FullOverlap, 0).unwrap();
        assert_eq!(r.conditions.len(), 16);
        assert!(r.passed(), "{:?}", r.conditions);
    }

    #[test]
    fn d4_standard_basis_needs_t_inverse() {
        let f = fiducial(include_str!("../data/d4.json"));
        let (a, c) = standard_basis_d4(&f, true).unwrap();
        let t = a[0].a.tower().clone();
        let n4 = f.nsq.square().lift(&t).unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let want = rat((i == 0) as i64 + (k == 0) as i64, 5);
                assert_eq!(gik(&a, i, k, &c).scale(&n4), Gauss::real(TowerElement::from_rational(&t, &want)));
            }
        }
    }

    #[test]
    fn diagonal_class_is_closed_under_zauner() {
        let mut cls = vec![(2, 0)];
        for _ in 0..2 {
            let &(i, j) = cls.last().unwrap();
            cls.push(zauner_d4(i, j));
        }
        cls.sort();
        assert_eq!(cls, vec![(0, 2), (2, 0), (2, 2)]);
        assert_eq!(zauner_d4(0, 0), (0, 0));
    }

    #[test]
    fn counts_for_small_cases() {
        assert_eq!(prime_orbits(7).unwrap().len(), 2);
        assert_eq!(prime_orbit_count(7).unwrap(), 2);
        let c = reduced_conditions(28, ReductionMode::Block).unwrap();
        assert_eq!((c.orbits, c.to_check()), (18, 13));
        assert!(reduced_conditions(30, ReductionMode::Fourp).is_err());
        assert!(reduced_conditions(9, ReductionMode::Prime).is_err());
    }

    #[test]
    fn mode_names() {
        assert_eq!("exact-block".parse::<Mode>().unwrap(), Mode::ExactBlock);
        assert_eq!("numeric".parse::<Mode>().unwrap(), Mode::Numeric);
        assert!("fast".parse::<Mode>().is_err());
    }

    #[test]
    fn d12_layout_probe_and_numeric() {
        let f = fiducial(include_str!("../data/d12.json"));
        assert!(layout_probe(&f).unwrap().passed);
        assert!(verify_sic(&f, Mode::Numeric, 60).unwrap().passed());
    }
}
