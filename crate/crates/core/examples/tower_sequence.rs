// Dimension towers above ℚ(√5) and the 4p scan.

use sicstark::towers::{scan_fourp, TowerRecord};

pub struct TowerSummary {
    pub dims: Vec<String>,
    pub fourp_levels: Vec<usize>,
}

pub fn run_example() -> sicstark::Result<TowerSummary> {
    let mut rec = TowerRecord::new(5)?;
    let dims = (1..=11).map(|l| rec.dim(l).to_string()).collect();
    let scan = scan_fourp(&[5], 11)?;
    let fourp_levels = scan.hits.iter().map(|h| h.ell).collect();
    Ok(TowerSummary { dims, fourp_levels })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let s = run_example()?;
    for (l, d) in s.dims.iter().enumerate() {
        println!("d_{}(5) = {d}", l + 1);
    }
    println!("levels with d = 4p: {:?}", s.fourp_levels);
    Ok(())
}
