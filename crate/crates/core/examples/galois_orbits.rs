// Galois group of the d = 52 tower, σ and the α̃, β orbits.

use sicstark::ansatz::prepare;
use sicstark::stark_io::StarkDataset;

pub struct GaloisSummary {
    pub group_order: usize,
    pub abelian: bool,
    pub sigma_order: u64,
    pub sigma_matches_dataset: bool,
    pub alpha_orbit: usize,
    pub beta_orbit: usize,
}

pub fn run_example() -> sicstark::Result<GaloisSummary> {
    let mut ds = StarkDataset::from_str(include_str!("../data/d52.json"))?;
    let given = ds.sigma.take();
    // let the group pick σ, then compare with the printed one
    let prep = prepare(&ds)?;
    let printed = given.map(|s| sicstark::galois::Automorphism::new(&prep.tower, s.images, s.sqrt_d_sign)).transpose()?;
    Ok(GaloisSummary {
        group_order: prep.group.order(),
        abelian: prep.group.is_abelian(),
        sigma_order: prep.sigma.order(64).unwrap_or(0),
        sigma_matches_dataset: printed.is_some_and(|s| s == prep.sigma),
        alpha_orbit: prep.alpha_tilde.len(),
        beta_orbit: prep.beta.len(),
    })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let s = run_example()?;
    println!("|Gal(T/Q)| = {} (abelian: {})", s.group_order, s.abelian);
    println!("σ has order {}; equals the dataset's σ: {}", s.sigma_order, s.sigma_matches_dataset);
    println!("orbit lengths: α̃ {}, β {}", s.alpha_orbit, s.beta_orbit);
    Ok(())
}
