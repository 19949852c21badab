// Each example is compiled in here and its run_example() checked.

#[allow(dead_code)]
mod tower_sequence {
    include!("../examples/tower_sequence.rs");
}
#[allow(dead_code)]
mod exact_tower {
    include!("../examples/exact_tower.rs");
}
#[allow(dead_code)]
mod galois_orbits {
    include!("../examples/galois_orbits.rs");
}
#[allow(dead_code)]
mod clifford_ops {
    include!("../examples/clifford_ops.rs");
}
#[allow(dead_code)]
mod stark_factors {
    include!("../examples/stark_factors.rs");
}
#[allow(dead_code)]
mod condition_counts {
    include!("../examples/condition_counts.rs");
}
#[allow(dead_code)]
mod construct_d52 {
    include!("../examples/construct_d52.rs");
}
#[allow(dead_code)]
mod verify_d12 {
    include!("../examples/verify_d12.rs");
}
#[allow(dead_code)]
mod cli_pipeline {
    include!("../examples/cli_pipeline.rs");
}

#[test]
fn tower_sequence_example() {
    let s = tower_sequence::run_example().unwrap();
    assert_eq!(s.dims[..5], ["4", "8", "19", "48", "124"]);
    assert_eq!(s.dims[10], "39604");
    assert_eq!(s.fourp_levels, vec![1, 5, 7, 11]);
}

#[test]
fn exact_tower_example() {
    let s = exact_tower::run_example().unwrap();
    assert_eq!(s.size, 48);
    assert!(s.round_trip);
    // x0 is the real quadratic unit conjugate root, about -9.28
    assert!((s.x0_approx + 9.2801).abs() < 1e-3);
}

#[test]
fn galois_orbits_example() {
    let s = galois_orbits::run_example().unwrap();
    assert_eq!((s.group_order, s.abelian, s.sigma_order), (24, true, 12));
    assert!(s.sigma_matches_dataset);
    assert_eq!((s.alpha_orbit, s.beta_orbit), (4, 12));
}

#[test]
fn clifford_ops_example() {
    let s = clifford_ops::run_example();
    assert_eq!((s.x4_order, s.uz_order), (4, 3));
    assert_eq!(s.zauner_orbit_of_x.len(), 3);
    assert!(s.standard_commutation && s.uf_cubed_identity);
}

#[test]
fn stark_factors_example() {
    let f = stark_factors::run_example().unwrap();
    assert_eq!(f.degrees, (4, 12));
    assert!(f.pt1.starts_with("(1)*t^4"));
}

#[test]
fn condition_counts_example() {
    let c = condition_counts::run_example().unwrap();
    for (d, n) in &c.prime {
        assert_eq!(*n as u32, (d + 1) / 4);
    }
    assert_eq!(c.overlap_52, (12, 8));
    assert_eq!(c.block, vec![(28, 18, 13), (52, 27, 22)]);
}

#[test]
fn construct_d52_example() {
    let c = construct_d52::run_example().unwrap();
    assert_eq!(c.survivors.len(), 1);
    assert_eq!(c.choice.theta, 7);
    assert_eq!(c.block_conditions, 27);
    assert!(c.verified);
}

#[test]
fn verify_d12_example() {
    let v = verify_d12::run_example().unwrap();
    assert!(v.modes.iter().all(|(_, n, ok)| *ok && *n == 144));
    assert!(v.max_im_log10 < -50.0);
}

#[test]
fn cli_pipeline_example() {
    let p = cli_pipeline::run_example().unwrap();
    assert_eq!(p.codes, vec![0, 0, 0]);
    let x: f64 = p.first_component.parse().unwrap();
    // normalized components have modulus below 1
    assert!(x.abs() > 0.0 && x.abs() < 1.0);
}
