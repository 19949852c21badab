// construct → verify → embed through the command line front end.

use sicstark::cli::run;

pub struct Pipeline {
    pub codes: Vec<i32>,
    pub first_component: String,
}

pub fn run_example() -> sicstark::Result<Pipeline> {
    let dir = std::env::temp_dir().join(format!("sicstark-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/d12.json");
    let fid = dir.join("d12.fiducial.json");
    let fid_s = fid.to_str().unwrap();
    let mut codes = Vec::new();
    codes.push(run(["sicstark", "construct", "--dataset", data, "--out", fid_s]).code);
    codes.push(run(["sicstark", "verify", "--fiducial", fid_s, "--mode", "exact-overlap"]).code);
    let e = run(["sicstark", "embed", "--fiducial", fid_s, "--digits", "30", "--json"]);
    codes.push(e.code);
    let doc: serde_json::Value = serde_json::from_str(&e.stdout)?;
    let first_component = doc["components"][0][0].as_str().unwrap_or_default().to_string();
    std::fs::remove_dir_all(&dir)?;
    Ok(Pipeline { codes, first_component })
}

#[allow(dead_code)]
fn main() -> sicstark::Result<()> {
    let p = run_example()?;
    println!("exit codes {:?}; first normalized component {}", p.codes, p.first_component);
    Ok(())
}
