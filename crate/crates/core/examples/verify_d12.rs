// Every verification mode on the d = 12 fiducial, plus the real form.

use sicstark::ansatz::{prepare, search, SearchConfig};
use sicstark::stark_io::StarkDataset;
use sicstark::verify::{realness_check, verify_sic, Mode};

pub struct Verification {
    pub modes: Vec<(Mode, usize, bool)>,
    pub max_im_log10: f64,
}

pub fn run_example() -> sicstark::Result<Verification> {
    let prep = prepare(&StarkDataset::from_str(include_str!("../data/d12.json"))?)?;
    let f = search(&prep, &SearchConfig::default())?.fiducial.expect("d = 12 verifies");
    let mut modes = Vec::new();
    for m in [Mode::ExactBlock, Mode::ExactOverlap, Mode::FullBlock, Mode::FullOverlap, Mode::Numeric] {
        let r = verify_sic(&f, m, 100)?;
        modes.push((m, r.conditions.len(), r.passed()));
    }
    Ok(Verification { modes, max_im_log10: realness_check(&f, 100)?.max_im_log10 })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let v = run_example()?;
    for (m, n, ok) in &v.modes {
        println!("{m:?}: {n} conditions, {}", if *ok { "pass" } else { "FAIL" });
    }
    println!("real form: max log10|Im| = {:.1}", v.max_im_log10);
    Ok(())
}
