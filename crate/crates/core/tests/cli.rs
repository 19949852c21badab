// Drives the real binary and the in-process front end.

use std::path::{Path, PathBuf};
use std::process::Command;

use num_bigint::BigInt;
use sicstark::cli::{load_fiducial, run, RunManifest};
use sicstark::exact::{rational_reconstruct, Ball, EmbeddingContext};

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sicstark")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn construct(dir: &Path, name: &str) -> PathBuf {
    let out = dir.join(format!("{name}.fiducial.json"));
    let (code, _) = bin(&["construct", "--dataset", &data(&format!("{name}.json")), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    out
}

#[test]
fn construct_d52_records_theta_seven() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), "d52");
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d52.fiducial.json.manifest.json")).unwrap()).unwrap();
    let c = m.choices.unwrap();
    assert_eq!((c.theta, c.s0, c.s1, c.baby_survivors), (7, 1, 1, 1));
    assert_eq!(m.inputs[0].sha256.len(), 64);
    assert!(out.exists());
    let (code, text) = bin(&["--json", "verify", "--fiducial", out.to_str().unwrap(), "--mode", "exact-block"]);
    assert_eq!(code, 0, "{text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["conditions"].as_array().unwrap().len(), 27);
}

#[test]
fn construct_d4_and_verify_overlaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), "d4");
    let (code, text) = bin(&["verify", "--fiducial", out.to_str().unwrap(), "--mode", "full-overlap"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn manifests_are_deterministic_up_to_timings() {
    let dir = tempfile::tempdir().unwrap();
    let a = construct(dir.path(), "d12");
    let first = std::fs::read_to_string(&a).unwrap();
    let ma: RunManifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d12.fiducial.json.manifest.json")).unwrap()).unwrap();
    construct(dir.path(), "d12");
    let mb: RunManifest = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d12.fiducial.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(first, std::fs::read_to_string(&a).unwrap());
    let strip = |mut m: RunManifest| {
        m.timings_ms.clear();
        serde_json::to_string(&m).unwrap()
    };
    assert_eq!(strip(ma), strip(mb));
}

#[test]
fn threads_flag_gives_same_fiducial() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let two = dir.path().join("two.json");
    for (t, p) in [("1", &one), ("2", &two)] {
        let o = run(["sicstark", "--threads", t, "construct", "--dataset", &data("d12.json"), "--out", p.to_str().unwrap()]);
        assert_eq!(o.code, 0, "{}", o.stdout);
    }
    assert_eq!(std::fs::read_to_string(one).unwrap(), std::fs::read_to_string(two).unwrap());
}

#[test]
fn dataset_without_r2_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("d52.json")).unwrap()).unwrap();
    j.as_object_mut().unwrap().remove("r2");
    let p = dir.path().join("bad.json");
    std::fs::write(&p, j.to_string()).unwrap();
    let out = dir.path().join("f.json");
    let (code, text) = bin(&["--json", "construct", "--dataset", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2, "{text}");
    let e: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(e["error"].as_str().unwrap().contains("r2"));
}

#[test]
fn missing_file_and_bad_mode_are_input_errors() {
    assert_eq!(bin(&["verify", "--fiducial", "/nonexistent.json"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), "d4");
    assert_eq!(bin(&["verify", "--fiducial", out.to_str().unwrap(), "--mode", "sideways"]).0, 2);
    assert_eq!(bin(&["frobnicate"]).0, 2);
}

#[test]
fn tampered_fiducial_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = construct(dir.path(), "d12");
    let mut j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // swap two components of the second block
    let b = j["components"][1].as_array_mut().unwrap();
    b.swap(0, 1);
    std::fs::write(&out, j.to_string()).unwrap();
    let (code, text) = bin(&["verify", "--fiducial", out.to_str().unwrap(), "--mode", "full-overlap"]);
    assert_eq!(code, 1, "{text}");
}

#[test]
fn tower_dimensions_and_fourp_scan() {
    let (code, text) = bin(&["--json", "tower", "--D", "5", "--max-ell", "11", "--scan", "fourp"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let dims: Vec<&str> = v["dims"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(dims, ["4", "8", "19", "48", "124", "323", "844", "2208", "5779", "15128", "39604"]);
    let ells: Vec<u64> = v["scan"]["hits"].as_array().unwrap().iter().map(|h| h["ell"].as_u64().unwrap()).collect();
    assert_eq!(ells, [1, 5, 7, 11]);
}

#[test]
fn tower_rejects_non_family_d() {
    assert_eq!(bin(&["tower", "--D", "6"]).0, 2);
    assert_eq!(bin(&["tower", "--D", "4"]).0, 2);
}

#[test]
fn embed_round_trips_through_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let fid = construct(dir.path(), "d12");
    let emb = dir.path().join("d12.embed.json");
    let (code, _) = bin(&["embed", "--fiducial", fid.to_str().unwrap(), "--digits", "50", "--out", emb.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&emb).unwrap()).unwrap();
    let f = load_fiducial(&fid).unwrap();
    let ctx = EmbeddingContext::new(&f.tower, 166).unwrap();
    // undo the normalization, then recover each component exactly
    let n = ctx.embed(&f.nsq).unwrap().re_ball().sqrt_real().unwrap();
    let comps = doc["components"].as_array().unwrap();
    assert_eq!(comps.len(), 12);
    for (c, x) in comps.iter().zip(f.flat()) {
        let b = Ball::from_decimal(c[0].as_str().unwrap(), c[1].as_str().unwrap(), n.prec).unwrap();
        let z = b.div(&n).unwrap();
        let back = rational_reconstruct(&z, &f.tower, &ctx, &BigInt::from(1000)).unwrap();
        assert_eq!(back, x);
    }
}
