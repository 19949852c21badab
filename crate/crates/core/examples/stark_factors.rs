// τ-conjugation and quadratic substitution on the d = 52 dataset.

use sicstark::exact::{poly, EmbeddingContext};
use sicstark::galois::default_height;
use sicstark::stark_io::{apply_tau, quad_sub_factor, StarkDataset};

pub struct Factors {
    pub p1: String,
    pub pt1: String,
    pub pt2: String,
    pub degrees: (usize, usize),
}

pub fn run_example() -> sicstark::Result<Factors> {
    let ds = StarkDataset::from_str(include_str!("../data/d52.json"))?;
    let k = ds.tower.ancestor(1);
    let kctx = EmbeddingContext::new(&k, 256)?;
    let p1 = poly::lift(&apply_tau(ds.r1.as_ref().unwrap())?.coeffs, &k)?;
    let p2 = poly::lift(&apply_tau(ds.r2.as_ref().unwrap())?.coeffs, &k)?;
    let x0 = ds.x0().lift(&k)?;
    let (pt1, _) = quad_sub_factor(&p1, Some(&x0), &kctx, &default_height())?;
    let (pt2, _) = quad_sub_factor(&p2, None, &kctx, &default_height())?;
    Ok(Factors {
        p1: poly::to_string(&p1),
        pt1: poly::to_string(&pt1),
        pt2: poly::to_string(&pt2),
        degrees: (poly::degree(&pt1), poly::degree(&pt2)),
    })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let f = run_example()?;
    println!("p1 = τ(r1) = {}", f.p1);
    println!("p̃1 = {}", f.pt1);
    println!("p̃2 = {}", f.pt2);
    Ok(())
}
