// Arithmetic and embeddings in the d = 52 tower.

use num_bigint::BigInt;
use sicstark::exact::{rational_reconstruct, EmbeddingContext, TowerElement};
use sicstark::stark_io::StarkDataset;

pub struct TowerTour {
    pub size: usize,
    pub t1_squared: String,
    pub x0_approx: f64,
    pub round_trip: bool,
}

pub fn run_example() -> sicstark::Result<TowerTour> {
    let ds = StarkDataset::from_str(include_str!("../data/d52.json"))?;
    let t = ds.tower.clone();
    let ctx = EmbeddingContext::new(&t, 256)?;
    let t1 = t.levels()[0].generator().lift(&t)?;
    let x = &(&t1 * &ds.x0()) + &TowerElement::from_int(&t, 3);
    let back = rational_reconstruct(&ctx.embed(&x)?, &t, &ctx, &BigInt::from(1000))?;
    Ok(TowerTour {
        size: t.size(),
        t1_squared: t1.square().to_string(),
        x0_approx: ctx.approx(&ds.x0())?.re,
        round_trip: back == x,
    })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let s = run_example()?;
    println!("tower degree over Q: {}", s.size);
    println!("t1^2 = {}", s.t1_squared);
    println!("x0 ≈ {}", s.x0_approx);
    println!("reconstruct(embed(3 + t1·x0)) round trip: {}", s.round_trip);
    Ok(())
}
