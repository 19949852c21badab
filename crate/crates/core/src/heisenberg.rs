//! Weyl–Heisenberg and Clifford elements as monomial matrices.
//!
//! A phase is an exponent of ζ_M = e^{2πi/M} with M = 2d̄. In dimension 4
//! (M = 16) the monomial basis uses τ = (1+i)/√2 = ζ₁₆², ω = i = ζ₁₆⁴. For odd
//! p (M = 2p) the standard representation uses ω = ζ^2 and τ = −e^{iπ/p} =
//! ζ^{p+1}.

use num_complex::Complex64;

use crate::{Error, Result};

/// d̄ = d for odd d, 2d for even d.
pub fn dbar(d: u32) -> u32 {
    if d % 2 == 1 {
        d
    } else {
        2 * d
    }
}

/// Phase modulus 2d̄ used for dimension d.
pub fn phase_modulus(d: u32) -> u32 {
    2 * dbar(d)
}

/// ζ_M^e.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseExp {
    pub exp: u32,
    pub modulus: u32,
}

impl PhaseExp {
    pub fn new(exp: i64, modulus: u32) -> PhaseExp {
        PhaseExp { exp: exp.rem_euclid(modulus as i64) as u32, modulus }
    }

    pub fn one(modulus: u32) -> PhaseExp {
        PhaseExp { exp: 0, modulus }
    }

    pub fn mul(self, o: PhaseExp) -> PhaseExp {
        assert_eq!(self.modulus, o.modulus, "phase moduli differ");
        PhaseExp::new(self.exp as i64 + o.exp as i64, self.modulus)
    }

    pub fn inv(self) -> PhaseExp {
        PhaseExp::new(-(self.exp as i64), self.modulus)
    }

    pub fn conj(self) -> PhaseExp {
        self.inv()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.exp as f64 / self.modulus as f64)
    }

    /// The sign ±1 when the phase is real.
    pub fn as_sign(self) -> Option<i32> {
        match self.exp {
            0 => Some(1),
            e if 2 * e == self.modulus => Some(-1),
            _ => None,
        }
    }
}

/// Column s is sent to row perm[s]; the nonzero entry of row r is
/// ζ_M^{phases[r]}. So (U v)[r] = ζ^{phases[r]} v[perm⁻¹(r)].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOp {
    perm: Vec<usize>,
    phases: Vec<u32>,
    modulus: u32,
}

impl MonomialOp {
    pub fn new(perm: Vec<usize>, phases: Vec<i64>, modulus: u32) -> Result<MonomialOp> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::Input("not a permutation".into()));
            }
            seen[p] = true;
        }
        if phases.len() != n {
            return Err(Error::Input("phase vector has the wrong length".into()));
        }
        let phases = phases.iter().map(|&e| e.rem_euclid(modulus as i64) as u32).collect();
        Ok(MonomialOp { perm, phases, modulus })
    }

    pub fn identity(dim: usize, modulus: u32) -> MonomialOp {
        MonomialOp { perm: (0..dim).collect(), phases: vec![0; dim], modulus }
    }

    pub fn diagonal(phases: &[i64], modulus: u32) -> MonomialOp {
        MonomialOp::new((0..phases.len()).collect(), phases.to_vec(), modulus).unwrap()
    }

    /// Rows given as (column, phase exponent).
    pub fn from_rows(rows: &[(usize, i64)], modulus: u32) -> Result<MonomialOp> {
        let n = rows.len();
        let mut perm = vec![usize::MAX; n];
        for (r, &(c, _)) in rows.iter().enumerate() {
            if c >= n || perm[c] != usize::MAX {
                return Err(Error::Input("rows do not form a monomial matrix".into()));
            }
            perm[c] = r;
        }
        MonomialOp::new(perm, rows.iter().map(|r| r.1).collect(), modulus)
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[u32] {
        &self.phases
    }

    /// Column of the nonzero entry in row r.
    pub fn source(&self, r: usize) -> usize {
        self.perm.iter().position(|&p| p == r).unwrap()
    }

    pub fn entry(&self, r: usize) -> (usize, PhaseExp) {
        (self.source(r), PhaseExp { exp: self.phases[r], modulus: self.modulus })
    }

    /// Same operator with phases carried modulo a multiple of the modulus.
    pub fn with_modulus(&self, modulus: u32) -> MonomialOp {
        assert!(modulus.is_multiple_of(self.modulus));
        let f = modulus / self.modulus;
        MonomialOp { perm: self.perm.clone(), phases: self.phases.iter().map(|e| e * f).collect(), modulus }
    }

    /// self · other.
    pub fn compose(&self, other: &MonomialOp) -> MonomialOp {
        assert_eq!(self.dim(), other.dim());
        let m = self.modulus.max(other.modulus);
        let (a, b) = (self.with_modulus(m), other.with_modulus(m));
        let perm: Vec<usize> = b.perm.iter().map(|&s| a.perm[s]).collect();
        let phases = (0..a.dim())
            .map(|r| (a.phases[r] + b.phases[a.source(r)]) % m)
            .collect();
        MonomialOp { perm, phases, modulus: m }
    }

    pub fn inverse(&self) -> MonomialOp {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut phases = vec![0; n];
        for s in 0..n {
            let r = self.perm[s];
            perm[r] = s;
            // U e_s = ζ^{ph[r]} e_r, so U⁻¹ e_r = ζ^{−ph[r]} e_s
            phases[s] = (self.modulus - self.phases[r]) % self.modulus;
        }
        MonomialOp { perm, phases, modulus: self.modulus }
    }

    pub fn pow(&self, k: i64) -> MonomialOp {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = MonomialOp::identity(self.dim(), self.modulus);
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// U A U⁻¹ with U = self.
    pub fn conjugate(&self, a: &MonomialOp) -> MonomialOp {
        self.compose(a).compose(&self.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.phases.iter().all(|&e| e == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Some(c) when self = ζ^c · other.
    pub fn phase_relative_to(&self, other: &MonomialOp) -> Option<PhaseExp> {
        let m = self.modulus.max(other.modulus);
        let (a, b) = (self.with_modulus(m), other.with_modulus(m));
        if a.perm != b.perm {
            return None;
        }
        let c = (a.phases[0] + m - b.phases[0]) % m;
        a.phases
            .iter()
            .zip(&b.phases)
            .all(|(x, y)| (x + m - y) % m == c)
            .then_some(PhaseExp { exp: c, modulus: m })
    }

    /// Multiply every phase by ζ^c.
    pub fn times_phase(&self, c: PhaseExp) -> MonomialOp {
        let m = self.modulus.max(c.modulus);
        let a = self.with_modulus(m);
        let c = c.exp * (m / c.modulus);
        MonomialOp { perm: a.perm, phases: a.phases.iter().map(|e| (e + c) % m).collect(), modulus: m }
    }

    /// (U v)[r] = ζ^{ph[r]} v[src(r)] with a caller-supplied phase action.
    pub fn apply_with<T, F>(&self, v: &[T], phase: F) -> Vec<T>
    where
        F: Fn(PhaseExp, &T) -> T,
    {
        let mut src = vec![0; self.dim()];
        for (s, &r) in self.perm.iter().enumerate() {
            src[r] = s;
        }
        (0..self.dim())
            .map(|r| phase(PhaseExp { exp: self.phases[r], modulus: self.modulus }, &v[src[r]]))
            .collect()
    }

    /// Permutation-only application (phases must all be zero).
    pub fn permute<T: Clone>(&self, v: &[T]) -> Vec<T> {
        debug_assert!(self.phases.iter().all(|&e| e == 0));
        self.apply_with(v, |_, x| x.clone())
    }

    pub fn apply_complex(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_with(v, |p, x| p.to_complex() * x)
    }

    pub fn to_matrix(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for s in 0..n {
            let r = self.perm[s];
            m[r][s] = PhaseExp { exp: self.phases[r], modulus: self.modulus }.to_complex();
        }
        m
    }
}

/// τ for the standard representation: −e^{iπ/d} as a power of ζ_{2d̄}.
fn tau_exp_standard(d: u32) -> i64 {
    if d % 2 == 1 {
        d as i64 + 1
    } else {
        2 * (d as i64 + 1)
    }
}

/// D_{i,j} = τ^{ij} XⁱZʲ in the standard representation, (XⁱZʲ)_{r,s} =
/// ω^{js} δ_{r,s+i}.
pub fn standard_rep(dim: u32, i: i64, j: i64) -> MonomialOp {
    let m = phase_modulus(dim);
    let n = dim as i64;
    let w = (m / dim) as i64;
    let tau = tau_exp_standard(dim) * ((i * j).rem_euclid(dbar(dim) as i64));
    let perm = (0..n).map(|s| (s + i).rem_euclid(n) as usize).collect();
    let phases = (0..n).map(|r| w * j * (r - i).rem_euclid(n) + tau).collect();
    MonomialOp::new(perm, phases, m).unwrap()
}

/// X and Z of the enphased monomial basis in dimension 4, in ζ₁₆ exponents.
fn x4() -> MonomialOp {
    // rows: (col, τ-exponent); τ = ζ₁₆²
    MonomialOp::from_rows(&[(1, 6), (0, 10), (3, 6), (2, 2)], 16).unwrap()
}

fn z4() -> MonomialOp {
    MonomialOp::from_rows(&[(2, 10), (3, 14), (0, 6), (1, 10)], 16).unwrap()
}

/// D_{i,j} = τ^{ij} X⁴ⁱZ⁴ʲ in the monomial basis, τ = (1+i)/√2.
pub fn monomial_rep4(i: i64, j: i64) -> MonomialOp {
    let x = x4().pow(i.rem_euclid(4));
    let z = z4().pow(j.rem_euclid(4));
    let tau = 2 * (i * j).rem_euclid(8);
    x.compose(&z).times_phase(PhaseExp::new(tau, 16))
}

/// Permutation with (U v)[r] = v[m·r mod p].
pub fn multiplier_perm(p: u32, m: i64) -> MonomialOp {
    let p64 = p as i64;
    let mut perm = vec![0usize; p as usize];
    for r in 0..p64 {
        let s = (m * r).rem_euclid(p64) as usize;
        perm[s] = r as usize;
    }
    MonomialOp::new(perm, vec![0; p as usize], phase_modulus(p)).unwrap()
}

pub fn mod_pow(b: u64, e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b = (b % m) as u128;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1, mut s0, mut s1) = (a.rem_euclid(m), m, 1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

pub fn is_generator(theta: u64, p: u64) -> bool {
    if theta.is_multiple_of(p) {
        return false;
    }
    let n = p - 1;
    let mut m = n;
    let mut q = 2;
    while q * q <= m {
        if m.is_multiple_of(q) {
            if mod_pow(theta, n / q, p) == 1 {
                return false;
            }
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    m == 1 || mod_pow(theta, n / m, p) != 1
}

/// Generators of (ℤ/p)^× in increasing order.
pub fn generators(p: u64) -> Vec<u64> {
    (2..p).filter(|&t| is_generator(t, p)).collect()
}

/// δ = θ^{(p−1)/3ℓ}.
pub fn zauner_delta(p: u32, theta: u64, ell: u32) -> Result<u64> {
    if !is_generator(theta, p as u64) {
        return Err(Error::Input(format!("{theta} does not generate (Z/{p})^x")));
    }
    if !(p - 1).is_multiple_of(3 * ell) {
        return Err(Error::Input(format!("3*{ell} does not divide {p}-1")));
    }
    Ok(mod_pow(theta, ((p - 1) / (3 * ell)) as u64, p as u64))
}

/// U_F with (U_F)_{r,s} = δ_{δr,s}, i.e. (U_F v)[r] = v[δr]; U_F⁻¹ when
/// `inverse` is set.
pub fn zauner_perm(p: u32, theta: u64, ell: u32, inverse: bool) -> Result<MonomialOp> {
    let delta = zauner_delta(p, theta, ell)? as i64;
    let m = if inverse { mod_inv(delta, p as i64).unwrap() } else { delta };
    Ok(multiplier_perm(p, m))
}

/// A non-monomial 4×4 operator (1/√2)·E with entries ζ₁₆^e or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledOp4 {
    pub entries: [[Option<u32>; 4]; 4],
}

impl ScaledOp4 {
    pub fn to_matrix(&self) -> Vec<Vec<Complex64>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.map_or(Complex64::new(0.0, 0.0), |e| PhaseExp::new(e as i64, 16).to_complex() * s))
                    .collect()
            })
            .collect()
    }
}

/// The fixed dimension-4 operators.
#[derive(Clone, Debug)]
pub struct CliffordSpecials {
    pub u_z: MonomialOp,
    pub u_p: MonomialOp,
    /// A_J ψ = diag(1, i, −i, 1)·ψ*, conjugation first.
    pub a_j: (MonomialOp, bool),
    pub u_m: MonomialOp,
    /// T = T₁(F₂ ⊗ 1), T₁ = diag(1, τ⁵, τ³, 1).
    pub t_basis: ScaledOp4,
}

pub fn clifford_specials() -> CliffordSpecials {
    let u_z = MonomialOp::from_rows(&[(1, 0), (2, 0), (0, 0), (3, 0)], 16).unwrap();
    let u_p = MonomialOp::diagonal(&[0, 0, 0, 8], 16);
    let a_j = (MonomialOp::diagonal(&[0, 4, 12, 0], 16), true);
    let u_m = MonomialOp::from_rows(&[(0, 0), (2, 0), (1, 0), (3, 12)], 16).unwrap();
    let t_basis = ScaledOp4 {
        entries: [
            [Some(0), None, Some(0), None],
            [None, Some(10), None, Some(10)],
            [Some(6), None, Some(14), None],
            [None, Some(0), None, Some(8)],
        ],
    };
    CliffordSpecials { u_z, u_p, a_j, u_m, t_basis }
}

/// Symplectic action on indices: F = [[a, b], [c, d]] sends (i, j) to
/// (ai + bj, ci + dj).
pub fn symplectic_action(f: [[i64; 2]; 2], i: i64, j: i64, modulus: i64) -> (i64, i64) {
    (
        (f[0][0] * i + f[0][1] * j).rem_euclid(modulus),
        (f[1][0] * i + f[1][1] * j).rem_euclid(modulus),
    )
}

/// Zauner matrix [[0, −1], [1, −1]].
pub const ZAUNER: [[i64; 2]; 2] = [[0, -1], [1, -1]];

/// Index map of ℂ^{4p} → ℂ⁴ ⊗ ℂ^p given by r ↦ (r mod 4, r mod p).
pub fn crt_index(r: usize, p: usize) -> (usize, usize) {
    (r % 4, r % p)
}

pub fn crt_inverse(a: usize, s: usize, p: usize) -> usize {
    (0..4 * p).find(|&r| r % 4 == a && r % p == s).unwrap()
}

/// op4 ⊗ opp acting on four p-blocks, optionally after conjugation.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub outer: MonomialOp,
    pub inner: MonomialOp,
    pub conjugate_first: bool,
}

pub fn crt_combine(op4: &MonomialOp, opp: &MonomialOp) -> BlockOperator {
    assert_eq!(op4.dim(), 4);
    BlockOperator { outer: op4.clone(), inner: opp.clone(), conjugate_first: false }
}

impl BlockOperator {
    pub fn antiunitary(mut self) -> BlockOperator {
        self.conjugate_first = true;
        self
    }

    /// Block row r: (source block, phase, inner operator).
    pub fn block(&self, r: usize) -> (usize, PhaseExp, &MonomialOp) {
        let (c, ph) = self.outer.entry(r);
        (c, ph, &self.inner)
    }

    /// Apply to blocks [v1, v2, v3, v4]. `phase` multiplies by a root of
    /// unity and `conj` conjugates.
    pub fn apply_with<T: Clone, F, C>(&self, blocks: &[Vec<T>], phase: F, conj: C) -> Vec<Vec<T>>
    where
        F: Fn(PhaseExp, &T) -> T,
        C: Fn(&T) -> T,
    {
        let src: Vec<Vec<T>> = if self.conjugate_first {
            blocks.iter().map(|b| b.iter().map(&conj).collect()).collect()
        } else {
            blocks.to_vec()
        };
        (0..4)
            .map(|r| {
                let (c, ph) = self.outer.entry(r);
                let moved = self.inner.apply_with(&src[c], &phase);
                moved.iter().map(|x| phase(ph, x)).collect()
            })
            .collect()
    }

    pub fn apply_complex(&self, blocks: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        self.apply_with(blocks, |p, x| p.to_complex() * x, |x| x.conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_x_and_z() {
        let t = |k: i32| Complex64::from_polar(1.0, std::f64::consts::PI / 4.0 * k as f64);
        let x = monomial_rep4(1, 0).to_matrix();
        assert!((x[0][1] - t(3)).norm() < 1e-12 && (x[1][0] - t(5)).norm() < 1e-12);
        assert!((x[2][3] - t(3)).norm() < 1e-12 && (x[3][2] - t(1)).norm() < 1e-12);
        let z = monomial_rep4(0, 1).to_matrix();
        assert!((z[0][2] - t(5)).norm() < 1e-12 && (z[1][3] - t(7)).norm() < 1e-12);
        assert!((z[2][0] - t(3)).norm() < 1e-12 && (z[3][1] - t(5)).norm() < 1e-12);
    }

    #[test]
    fn order_two_elements_are_diagonal() {
        for (i, j) in [(2, 0), (0, 2), (2, 2)] {
            assert!(monomial_rep4(i, j).is_diagonal());
        }
        let z2 = monomial_rep4(0, 2);
        assert_eq!(z2.phases().iter().copied().collect::<Vec<_>>(), vec![0, 8, 0, 8]);
    }

    #[test]
    fn zauner_delta_for_p13() {
        assert_eq!(zauner_delta(13, 7, 1).unwrap(), 9);
        assert!(zauner_perm(13, 7, 1, false).unwrap().pow(3).is_identity());
        assert!(zauner_perm(13, 3, 1, false).is_err());
    }
}
