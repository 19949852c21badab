// The d = 52 search: signs from the trace identities, θ matching, baby test.

use sicstark::ansatz::{prepare, search, Choice, SearchConfig};
use sicstark::stark_io::StarkDataset;
use sicstark::verify::{verify_sic, Mode};

pub struct Construction {
    pub tested: usize,
    pub survivors: Vec<Choice>,
    pub choice: Choice,
    pub block_conditions: usize,
    pub verified: bool,
}

pub fn run_example() -> sicstark::Result<Construction> {
    let ds = StarkDataset::from_str(include_str!("../data/d52.json"))?;
    let prep = prepare(&ds)?;
    let rep = search(&prep, &SearchConfig::default())?;
    let f = rep.fiducial.ok_or(sicstark::Error::Exhausted { tested: rep.tested, report: rep.notes.join("\n") })?;
    let v = verify_sic(&f, Mode::ExactBlock, 0)?;
    Ok(Construction {
        tested: rep.tested,
        survivors: rep.baby_survivors,
        choice: f.choice,
        block_conditions: v.conditions.len(),
        verified: v.passed(),
    })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let c = run_example()?;
    println!("{} candidates, baby-test survivors {:?}", c.tested, c.survivors);
    println!("chosen: {:?}", c.choice);
    println!("exact block check over {} orbit representatives: {}", c.block_conditions, if c.verified { "pass" } else { "FAIL" });
    Ok(())
}
