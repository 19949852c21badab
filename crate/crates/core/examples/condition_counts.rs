// Orbit reductions of the SIC conditions.

use sicstark::verify::{prime_orbit_count, reduced_conditions, ReductionMode};

pub struct Counts {
    pub prime: Vec<(u32, usize)>,
    pub overlap_52: (usize, usize),
    pub block: Vec<(u32, usize, usize)>,
}

pub fn run_example() -> sicstark::Result<Counts> {
    let prime = [7u32, 31, 5779].iter().map(|&d| Ok((d, prime_orbit_count(d)?))).collect::<sicstark::Result<_>>()?;
    let o = reduced_conditions(52, ReductionMode::Fourp)?;
    let block = [28u32, 52]
        .iter()
        .map(|&d| {
            let c = reduced_conditions(d, ReductionMode::Block)?;
            Ok((d, c.orbits, c.to_check()))
        })
        .collect::<sicstark::Result<_>>()?;
    Ok(Counts { prime, overlap_52: (o.orbits, o.to_check()), block })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let c = run_example()?;
    for (d, n) in &c.prime {
        println!("d = {d}: {n} conditions (d+1)/4 = {}", (d + 1) / 4);
    }
    println!("d = 52 overlaps: {} orbits, {} to check", c.overlap_52.0, c.overlap_52.1);
    for (d, n, k) in &c.block {
        println!("d = {d} block G: {n} orbits, {k} to check, (3d+20)/8 = {}", (3 * d + 20) / 8);
    }
    Ok(())
}
