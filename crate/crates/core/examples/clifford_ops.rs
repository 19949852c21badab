// Displacement operators and the fixed dimension-4 Clifford elements.

use sicstark::heisenberg::{clifford_specials, monomial_rep4, standard_rep, zauner_perm};
use sicstark::verify::zauner_d4;

pub struct CliffordSummary {
    pub x4_order: i64,
    pub uz_order: i64,
    pub zauner_orbit_of_x: Vec<(i64, i64)>,
    pub standard_commutation: bool,
    pub uf_cubed_identity: bool,
}

pub fn run_example() -> CliffordSummary {
    let x = monomial_rep4(1, 0);
    let order = |op: &sicstark::heisenberg::MonomialOp| (1..=64).find(|&k| op.pow(k).is_identity()).unwrap_or(0);
    let uz = clifford_specials().u_z;
    let mut orbit = vec![(1, 0)];
    for _ in 0..2 {
        let &(i, j) = orbit.last().unwrap();
        orbit.push(zauner_d4(i, j));
    }
    // XZ = ω⁻¹ZX in the standard representation of dimension 13
    let (x13, z13) = (standard_rep(13, 1, 0), standard_rep(13, 0, 1));
    let lhs = x13.compose(&z13);
    let rhs = z13.compose(&x13);
    let standard_commutation = lhs.phase_relative_to(&rhs).is_some_and(|c| c.exp * 13 % c.modulus == 0 && c.exp != 0);
    CliffordSummary {
        x4_order: order(&x),
        uz_order: order(&uz),
        zauner_orbit_of_x: orbit,
        standard_commutation,
        uf_cubed_identity: zauner_perm(13, 7, 1, false).unwrap().pow(3).is_identity(),
    }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("order of X in the monomial basis: {}", s.x4_order);
    println!("order of U_Z: {}", s.uz_order);
    println!("Zauner orbit of D(1,0): {:?}", s.zauner_orbit_of_x);
    println!("XZ ∝ ZX with a 13th root of unity: {}", s.standard_commutation);
    println!("U_F³ = 1 for p = 13, θ = 7: {}", s.uf_cubed_identity);
}
