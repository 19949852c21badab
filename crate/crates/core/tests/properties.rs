// Property suites: field arithmetic, Weyl-Heisenberg relations, the tower
// calculus and the G(i,k) identities.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use sicstark::ansatz::{assemble, prepare, search, Choice, Fiducial, Layout, Prepared, SearchConfig};
use sicstark::exact::{rational_reconstruct, Ball, EmbeddingContext, Tower, TowerElement};
use sicstark::galois::{orbit, Automorphism};
use sicstark::heisenberg::{
    clifford_specials, mod_inv, monomial_rep4, standard_rep, zauner_delta, zauner_perm, MonomialOp,
};
use sicstark::stark_io::StarkDataset;
use sicstark::towers::{chsh, d_ell, family_values, xi_norm_check, TowerRecord};
use sicstark::verify::{block_target, gik, gik_block, zauner_d4, Gauss};

fn prep(name: &str) -> Prepared {
    let text = std::fs::read_to_string(format!("{}/data/{name}.json", env!("CARGO_MANIFEST_DIR"))).unwrap();
    prepare(&StarkDataset::from_str(&text).unwrap()).unwrap()
}

fn d52() -> &'static (Prepared, Fiducial) {
    static CELL: OnceLock<(Prepared, Fiducial)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = prep("d52");
        let f = search(&p, &SearchConfig::default()).unwrap().fiducial.unwrap();
        (p, f)
    })
}

fn d12() -> &'static (Prepared, Fiducial) {
    static CELL: OnceLock<(Prepared, Fiducial)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = prep("d12");
        let f = search(&p, &SearchConfig::default()).unwrap().fiducial.unwrap();
        (p, f)
    })
}

fn element(t: &Arc<Tower>, nums: &[i64], den: i64) -> TowerElement {
    let mut v = nums.to_vec();
    v.resize(t.size(), 0);
    TowerElement::from_i64s(t, &v, den).unwrap()
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..=20, n)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

// ---- field arithmetic ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_axioms_in_the_d52_tower(a in coeffs(48), b in coeffs(48), c in coeffs(48), da in 1i64..9, db in 1i64..9) {
        let t = &d52().0.tower;
        let (x, y, z) = (element(t, &a, da), element(t, &b, db), element(t, &c, 1));
        prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x - &x), &TowerElement::zero(t));
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism(a in coeffs(48), b in coeffs(48)) {
        let (p, _) = d52();
        let t = &p.tower;
        let (x, y) = (element(t, &a, 3), element(t, &b, 1));
        let ex = p.ctx.embed(&x).unwrap();
        let ey = p.ctx.embed(&y).unwrap();
        prop_assert!(p.ctx.embed(&(&x * &y)).unwrap().overlaps(&ex.mul(&ey)));
        prop_assert!(p.ctx.embed(&(&x + &y)).unwrap().overlaps(&ex.add(&ey)));
    }

    #[test]
    fn reconstruction_inverts_embedding(a in coeffs(8), den in 1i64..13) {
        let (p, _) = d12();
        let x = element(&p.tower, &a, den);
        let ctx = EmbeddingContext::new(&p.tower, 200).unwrap();
        let back = rational_reconstruct(&ctx.embed(&x).unwrap(), &p.tower, &ctx, &BigInt::from(1000)).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn galois_maps_preserve_arithmetic(a in coeffs(48), b in coeffs(48), e in 0u64..12) {
        let (p, _) = d52();
        let s = p.sigma.pow(e);
        let (x, y) = (element(&p.tower, &a, 1), element(&p.tower, &b, 2));
        prop_assert_eq!(s.apply(&(&x * &y)), &s.apply(&x) * &s.apply(&y));
        prop_assert_eq!(s.apply(&(&x + &y)), &s.apply(&x) + &s.apply(&y));
        prop_assert_eq!(p.conj.apply(&p.conj.apply(&x)), x);
    }

    #[test]
    fn decimal_strings_round_trip(re in -1.0e6f64..1.0e6, im in -1.0e6f64..1.0e6, digits in 20usize..60) {
        let b = Ball::from_complex(Complex64::new(re, im), 256);
        let (sr, si) = b.to_decimal(digits);
        let back = Ball::from_decimal(&sr, &si, 256).unwrap();
        prop_assert!(back.overlaps(&b));
    }
}

// ---- Weyl-Heisenberg and Clifford relations ----

fn odd_dims() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7, 11, 13, 15])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn displacements_multiply_up_to_phase(dim in odd_dims(), i in 0i64..20, j in 0i64..20, k in 0i64..20, l in 0i64..20) {
        let a = standard_rep(dim, i, j).compose(&standard_rep(dim, k, l));
        prop_assert!(a.phase_relative_to(&standard_rep(dim, i + k, j + l)).is_some());
        let b = monomial_rep4(i, j).compose(&monomial_rep4(k, l));
        prop_assert!(b.phase_relative_to(&monomial_rep4(i + k, j + l)).is_some());
    }

    #[test]
    fn commutation_and_orders(dim in odd_dims()) {
        let n = dim as i64;
        let (x, z) = (standard_rep(dim, 1, 0), standard_rep(dim, 0, 1));
        prop_assert!(x.pow(n).is_identity());
        prop_assert!(z.pow(n).is_identity());
        // ZX = ωXZ, ω = e^{2πi/d}
        let c = z.compose(&x).phase_relative_to(&x.compose(&z)).unwrap();
        prop_assert_eq!(c.exp as u64 * dim as u64, c.modulus as u64);
    }

    #[test]
    fn zauner_permutation_acts_symplectically(theta_pick in 0usize..4, i in 0i64..13, j in 0i64..13) {
        // generators of (Z/13)^x
        let theta = [2u64, 6, 7, 11][theta_pick];
        let delta = zauner_delta(13, theta, 1).unwrap() as i64;
        let uf = zauner_perm(13, theta, 1, false).unwrap();
        prop_assert!(uf.pow(3).is_identity());
        prop_assert!(uf.compose(&zauner_perm(13, theta, 1, true).unwrap()).is_identity());
        // (U_F v)[r] = v[δr] sends X to X^{δ⁻¹} and Z to Z^δ
        let dinv = mod_inv(delta, 13).unwrap();
        let lhs = uf.conjugate(&standard_rep(13, i, j));
        prop_assert!(lhs.phase_relative_to(&standard_rep(13, dinv * i, delta * j)).is_some());
    }
}

#[test]
fn zauner_d4_acts_on_all_sixteen_indices() {
    let uz = clifford_specials().u_z;
    assert!(uz.pow(3).is_identity());
    for i in 0..4 {
        for j in 0..4 {
            let (a, b) = zauner_d4(i, j);
            let got = uz.conjugate(&monomial_rep4(i, j));
            assert!(got.phase_relative_to(&monomial_rep4(a, b)).is_some(), "D({i},{j})");
        }
    }
    let s = clifford_specials();
    // U_M U_Z U_M⁻¹ = U_Z², U_P² central
    assert!(s.u_m.conjugate(&s.u_z).phase_relative_to(&s.u_z.pow(2)).is_some());
    assert!(s.u_p.pow(2).phase_relative_to(&MonomialOp::identity(4, 16)).is_some());
}

// ---- tower calculus ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chebyshev_nesting(m in 0u64..=12, n in 0u64..=12) {
        prop_assert_eq!(chsh(m).compose(&chsh(n)), chsh(m * n).coeffs().to_vec());
    }

    #[test]
    fn dimension_congruences(di in 0usize..8, ell in 1usize..=6, lambda in 1usize..=9) {
        let d = family_values(200)[di];
        let base = d_ell(d, ell).unwrap();
        let top = d_ell(d, lambda * ell).unwrap();
        let want = if lambda % 3 == 0 { BigInt::from(3) % &base } else { BigInt::zero() };
        prop_assert_eq!(top.mod_floor(&base), want);
        prop_assert!(d_ell(d, 3 * ell).unwrap().is_odd());
    }
}

#[test]
fn tower_facts_over_the_family_grid() {
    for &d in &family_values(200) {
        let mut rec = TowerRecord::new(d).unwrap();
        assert_eq!(rec.dim(0), &BigInt::from(3));
        let three = [1, 2, 4].iter().any(|&l| rec.dim(l).is_multiple_of(&BigInt::from(3)));
        assert!(three, "3 divides none of d1, d2, d4 for D = {d}");
        // u_K τ(u_K) = −1
        assert_eq!(rec.u_k().norm(), -num_rational::BigRational::one());
        // the dimension formula against T̂_ℓ(d₁)
        let d1 = rec.dim(1).clone();
        for l in 1..=8 {
            assert_eq!(rec.dim(l).clone(), chsh(l as u64).eval(&d1));
        }
        let dims = rec.dims(8);
        assert!(dims.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn xi_norm_has_two_adic_valuation_two() {
    for d in [5u64, 13, 29, 53] {
        let r = xi_norm_check(d).unwrap();
        // ξ⁴ + 4ξ² − n₁² = 0, so N(ξ − 1) is that quartic at 1
        let n1: BigInt = r.n1.parse().unwrap();
        let oracle = BigInt::from(5) - &n1 * &n1;
        assert_eq!(r.norm, oracle.to_string(), "D = {d}");
        let mut v = 0;
        let mut m = oracle.clone();
        while m.is_even() && !m.is_zero() {
            m /= 2;
            v += 1;
        }
        assert_eq!((r.v2, v, r.passed), (2, 2, true), "D = {d}");
    }
}

// ---- G(i,k) identities ----

fn gauss_vector(t: &Arc<Tower>, conj: &Automorphism, seeds: &[Vec<i64>], n: usize) -> Vec<Gauss> {
    // a_{−r} = conj(a_r)
    let mut a: Vec<Option<Gauss>> = vec![None; n];
    for r in 0..n {
        let s = (n - r) % n;
        if a[r].is_some() {
            continue;
        }
        let g = Gauss { a: element(t, &seeds[2 * r], 1), b: element(t, &seeds[2 * r + 1], 1) };
        if s == r {
            a[r] = Some(g.add(&g.conj(conj)));
        } else {
            a[s] = Some(g.conj(conj));
            a[r] = Some(g);
        }
    }
    a.into_iter().map(Option::unwrap).collect()
}

fn gconj(g: &Gauss, c: &Automorphism) -> Gauss {
    g.conj(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn g_symmetries_on_constrained_vectors(seeds in prop::collection::vec(coeffs(8), 26), i in -13i64..13, k in -13i64..13) {
        let (p, _) = d12();
        let a = gauss_vector(&p.tower, &p.conj, &seeds, 13);
        let g = gik(&a, i, k, &p.conj);
        prop_assert_eq!(&g, &gik(&a, -i, -k, &p.conj));
        prop_assert_eq!(&g, &gik(&a, k, i, &p.conj));
        prop_assert_eq!(gconj(&g, &p.conj), gik(&a, -i, k, &p.conj));
    }
}

fn random_ansatz(p: &Prepared, a: &[i64], b: &[i64]) -> Fiducial {
    let t = &p.tower;
    let r = element(t, a, 1);
    // seed of α̃ fixed by σ⁴ so the orbit closes after four steps
    let s4 = p.sigma.pow(4);
    let alpha0 = &(&r + &s4.apply(&r)) + &s4.pow(2).apply(&r);
    let beta0 = element(t, b, 1);
    let mut q = p.clone();
    q.alpha_tilde = orbit(&alpha0, &p.sigma, p.len_a());
    q.beta = orbit(&beta0, &p.sigma, p.len_b());
    assemble(&q, Choice { theta: 7, s0: 1, s1: 1, alpha_offset: 0, layout: Layout::Zauner2 }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn galois_equivariance_of_block_g(a in coeffs(48), b in coeffs(48), d4 in (0i64..4, 0i64..4), i in 0i64..13, k in 0i64..13) {
        let (p, _) = d52();
        prop_assume!(a.iter().any(|&x| x != 0));
        prop_assert_eq!(p.sigma.apply(&p.xi), p.xi.clone());
        let f = random_ansatz(p, &a, &b);
        let g = gik_block(&f, d4, i, k);
        let sg = Gauss { a: p.sigma.apply(&g.a), b: p.sigma.apply(&g.b) };
        prop_assert_eq!(sg, gik_block(&f, d4, 7 * i, 7 * k));
    }
}

// ---- block G against a direct numerical DFT ----

fn numeric_blocks(f: &Fiducial) -> Vec<Vec<Complex64>> {
    let ctx = EmbeddingContext::new(&f.tower, 128).unwrap();
    let n = ctx.approx(&f.nsq).unwrap().re.sqrt();
    f.v.iter().map(|b| b.iter().map(|x| ctx.approx(x).unwrap() * n).collect()).collect()
}

fn overlap(psi: &[Vec<Complex64>], m4: &[Vec<Complex64>], mp: &[Vec<Complex64>]) -> Complex64 {
    let p = mp.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        for s in 0..p {
            let mut row = Complex64::new(0.0, 0.0);
            for b in 0..4 {
                if m4[a][b].norm() == 0.0 {
                    continue;
                }
                for t in 0..p {
                    row += m4[a][b] * mp[s][t] * psi[b][t];
                }
            }
            acc += psi[a][s].conj() * row;
        }
    }
    acc
}

fn dft_oracle(f: &Fiducial, d4: (i64, i64), i: i64, k: i64) -> Complex64 {
    let psi = numeric_blocks(f);
    let p = f.p as i64;
    let m4 = monomial_rep4(d4.0, d4.1).to_matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..p {
        let mp = standard_rep(f.p, i, j).to_matrix();
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / p as f64);
        acc += w * overlap(&psi, &m4, &mp).norm_sqr();
    }
    acc / p as f64
}

fn check_dft(f: &Fiducial) {
    let ctx = EmbeddingContext::new(&f.tower, 128).unwrap();
    let p = f.p as i64;
    for d4 in [(0, 0), (0, 1), (1, 0), (2, 2), (1, 3)] {
        for (i, k) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, p - 1), (p - 1, 3)] {
            let g = gik_block(f, d4, i, k).embed(&ctx).unwrap().to_complex();
            let want = dft_oracle(f, d4, i, k);
            assert!(close(g, want, 1e-9), "D{d4:?} i={i} k={k}: {g} vs {want}");
            let target = block_target(f.d, d4, i, k, f.p).to_f64().unwrap();
            assert!(close(want, Complex64::new(target, 0.0), 1e-9));
        }
    }
}

#[test]
fn block_g_matches_numeric_dft_d12() {
    check_dft(&d12().1);
}

#[test]
fn block_g_matches_numeric_dft_d52() {
    check_dft(&d52().1);
}

#[test]
fn parseval_on_targets_and_numbers() {
    for (d, p) in [(12u32, 3u32), (28, 7), (52, 13)] {
        let mut s = num_rational::BigRational::zero();
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..p as i64 {
                    s += block_target(d, (a, b), i, 0, p);
                }
            }
        }
        // Σ_j |⟨D⊗XⁱZʲ⟩|² = p·G(D; i, 0), and the full sum is d
        let total = s * BigInt::from(p);
        let d_r = num_rational::BigRational::from_integer(d.into());
        assert_eq!(total, d_r.clone());
        let alt = num_rational::BigRational::one()
            + num_rational::BigRational::new(BigInt::from(d * d - 1), BigInt::from(d + 1));
        assert_eq!(total, alt);
    }
    // the d = 12 overlaps themselves
    let f = &d12().1;
    let psi = numeric_blocks(f);
    let mut sum = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let m4 = monomial_rep4(a, b).to_matrix();
            for i in 0..3 {
                for j in 0..3 {
                    sum += overlap(&psi, &m4, &standard_rep(3, i, j).to_matrix()).norm_sqr();
                }
            }
        }
    }
    assert!((sum - 12.0).abs() < 1e-9);
}
