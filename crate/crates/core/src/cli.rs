//! The `sicstark` command line.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error, 3 exhausted search.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{self, Fiducial, FiducialJson, Layout, SearchConfig};
use crate::stark_io::StarkDataset;
use crate::towers::{self, TowerRecord};
use crate::verify::{self, Mode};
use crate::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sicstark", version, about = "SIC fiducials in dimensions n²+3 from Stark-unit data")]
pub struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Scan {
    Fourp,
    Newprime,
    Growth,
    Qgrowth,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension towers d_ℓ(D) and the scan checks.
    Tower {
        #[arg(long = "D")]
        d: u64,
        #[arg(long, default_value_t = 11)]
        max_ell: usize,
        #[arg(long, value_enum)]
        scan: Option<Scan>,
        /// Largest n for the growth scan.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Largest prime for the q-growth scan.
        #[arg(long, default_value_t = 60)]
        max_q: u64,
    },
    /// Build and verify a fiducial from a Stark-unit dataset.
    Construct {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Enumerate signs and θ instead of using the trace identities and θ matching.
        #[arg(long)]
        no_shortcuts: bool,
        /// Where to write the run manifest (default: <out>.manifest.json).
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Verify a fiducial file.
    Verify {
        #[arg(long)]
        fiducial: PathBuf,
        #[arg(long, default_value = "exact-block")]
        mode: String,
        /// Decimal digits for numeric checks.
        #[arg(long, default_value_t = 200)]
        precision: u32,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also run the real-basis check.
        #[arg(long)]
        realness: bool,
    },
    /// Decimal export of the normalized fiducial.
    Embed {
        #[arg(long)]
        fiducial: PathBuf,
        #[arg(long, default_value_t = 50)]
        digits: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub sigma_index: Option<usize>,
    pub theta: u64,
    pub s0: i32,
    pub s1: i32,
    pub alpha_offset: usize,
    pub layout: Layout,
    pub candidates_tested: usize,
    pub baby_survivors: usize,
    pub notes: Vec<String>,
}

/// Everything needed to replay a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub args: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub choices: Option<ChoiceRecord>,
    pub outputs: Vec<InputRecord>,
    pub timings_ms: BTreeMap<String, u128>,
}

fn digest(path: &Path) -> std::io::Result<InputRecord> {
    let bytes = std::fs::read(path)?;
    let h = Sha256::digest(&bytes);
    Ok(InputRecord { path: path.display().to_string(), sha256: h.iter().map(|b| format!("{b:02x}")).collect() })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Json(_) | Error::Io(_) | Error::Family(_) | Error::TowerMismatch(_) => EXIT_INPUT,
        Error::Exhausted { .. } => EXIT_EXHAUSTED,
        _ => EXIT_FAIL,
    }
}

/// Output of one invocation: exit code, stdout text.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// Parses and runs; never exits the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            return Outcome { code, stdout: e.to_string() };
        }
    };
    let json = cli.json;
    let go = || dispatch(&cli);
    let res = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Err(Error::Input(format!("thread pool: {e}"))),
        },
        None => go(),
    };
    match res {
        Ok(o) => o,
        Err(e) => {
            let code = exit_code(&e);
            let stdout = if json {
                let mut m = serde_json::json!({ "error": e.to_string(), "exit_code": code });
                if let Error::Exhausted { tested, report } = &e {
                    m["tested"] = (*tested).into();
                    m["report"] = report.clone().into();
                }
                serde_json::to_string_pretty(&m).unwrap()
            } else {
                match &e {
                    Error::Exhausted { report, .. } => format!("error: {e}\n{report}"),
                    _ => format!("error: {e}"),
                }
            };
            Outcome { code, stdout }
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args() -> i32 {
    let o = run(std::env::args_os());
    let mut out = std::io::stdout();
    let _ = writeln!(out, "{}", o.stdout.trim_end());
    o.code
}

fn dispatch(cli: &Cli) -> crate::Result<Outcome> {
    match &cli.cmd {
        Command::Tower { d, max_ell, scan, max_n, max_q } => cmd_tower(cli.json, *d, *max_ell, *scan, *max_n, *max_q),
        Command::Construct { dataset, out, no_shortcuts, manifest } => {
            cmd_construct(cli.json, dataset, out, *no_shortcuts, manifest.as_deref())
        }
        Command::Verify { fiducial, mode, precision, report, realness } => {
            cmd_verify(cli.json, fiducial, mode, *precision, report.as_deref(), *realness)
        }
        Command::Embed { fiducial, digits, out } => cmd_embed(cli.json, fiducial, *digits, out.as_deref()),
    }
}

fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).unwrap()
}

pub fn cmd_tower(json: bool, d: u64, max_ell: usize, scan: Option<Scan>, max_n: usize, max_q: u64) -> crate::Result<Outcome> {
    let mut rec = TowerRecord::new(d)?;
    let (scan_json, passed) = match scan {
        None => (None, true),
        Some(Scan::Fourp) => {
            let r = towers::scan_fourp(&[d], max_ell)?;
            (Some(serde_json::to_value(&r)?), r.passed())
        }
        Some(Scan::Newprime) => {
            let r = towers::scan_new_primes(&[d], max_ell)?;
            (Some(serde_json::to_value(&r)?), r.passed())
        }
        Some(Scan::Growth) => {
            let r = towers::scan_growth(&[d], max_ell, max_n)?;
            (Some(serde_json::to_value(&r)?), r.passed())
        }
        Some(Scan::Qgrowth) => {
            let r = towers::scan_qgrowth(&[d], max_q)?;
            (Some(serde_json::to_value(&r)?), r.passed())
        }
    };
    let dims: Vec<String> = (1..=max_ell).map(|l| rec.dim(l).to_string()).collect();
    let code = if passed { EXIT_PASS } else { EXIT_FAIL };
    let stdout = if json {
        to_json(&serde_json::json!({ "D": d, "n1": rec.n1().to_string(), "dims": dims, "scan": scan_json }))
    } else {
        let mut s = format!("D = {d}, n1 = {}\n", rec.n1());
        for (l, v) in dims.iter().enumerate() {
            s += &format!("d_{} = {v}\n", l + 1);
        }
        if let Some(v) = scan_json {
            s += &format!("{}\n", to_json(&v));
        }
        s
    };
    Ok(Outcome { code, stdout })
}

pub fn cmd_construct(json: bool, dataset: &Path, out: &Path, no_shortcuts: bool, manifest: Option<&Path>) -> crate::Result<Outcome> {
    let mut timings = BTreeMap::new();
    let t0 = Instant::now();
    let ds = StarkDataset::load(dataset)?;
    let prep = ansatz::prepare(&ds)?;
    timings.insert("prepare".to_string(), t0.elapsed().as_millis());
    let cfg = if no_shortcuts { SearchConfig::exhaustive() } else { SearchConfig::default() };
    let t1 = Instant::now();
    let rep = ansatz::search(&prep, &cfg)?;
    timings.insert("search".to_string(), t1.elapsed().as_millis());
    let f = match rep.fiducial {
        Some(f) => f,
        None => return Err(Error::Exhausted { tested: rep.tested, report: rep.notes.join("\n") }),
    };
    std::fs::write(out, to_json(&f.to_json()))?;
    let sigma_index = prep.group.index_of(&prep.sigma, &prep.ctx);
    let c = f.choice;
    let choices = ChoiceRecord {
        sigma_index,
        theta: c.theta,
        s0: c.s0,
        s1: c.s1,
        alpha_offset: c.alpha_offset,
        layout: c.layout,
        candidates_tested: rep.tested,
        baby_survivors: rep.baby_survivors.len(),
        notes: rep.notes.clone(),
    };
    let m = RunManifest {
        subcommand: "construct".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        args: vec![
            format!("--dataset={}", dataset.display()),
            format!("--out={}", out.display()),
            format!("--no-shortcuts={no_shortcuts}"),
        ],
        inputs: vec![digest(dataset)?],
        choices: Some(choices),
        outputs: vec![digest(out)?],
        timings_ms: timings,
    };
    let mpath = manifest.map(Path::to_path_buf).unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    });
    std::fs::write(&mpath, to_json(&m))?;
    let stdout = if json {
        to_json(&m)
    } else {
        format!(
            "d = {}: θ = {}, s0 = {}, s1 = {}, α offset {}, layout {:?}; {} candidates, {} passed the baby test\nwrote {}",
            f.d,
            c.theta,
            c.s0,
            c.s1,
            c.alpha_offset,
            c.layout,
            rep.tested,
            rep.baby_survivors.len(),
            out.display()
        )
    };
    Ok(Outcome { code: EXIT_PASS, stdout })
}

pub fn load_fiducial(path: &Path) -> crate::Result<Fiducial> {
    let text = std::fs::read_to_string(path)?;
    let j: FiducialJson = serde_json::from_str(&text)?;
    Fiducial::from_json(&j)
}

pub fn cmd_verify(json: bool, fiducial: &Path, mode: &str, precision: u32, report: Option<&Path>, realness: bool) -> crate::Result<Outcome> {
    let mode: Mode = mode.parse()?;
    let f = load_fiducial(fiducial)?;
    ansatz::check_invariants(&f)?;
    let rep = verify::verify_sic(&f, mode, precision)?;
    let real = if realness { Some(verify::realness_check(&f, precision)?) } else { None };
    let passed = rep.passed() && real.as_ref().is_none_or(|r| r.passed);
    let full = serde_json::json!({ "passed": passed, "report": rep, "realness": real });
    if let Some(p) = report {
        std::fs::write(p, to_json(&full))?;
    }
    let stdout = if json {
        to_json(&full)
    } else {
        let mut s = String::new();
        for c in &rep.conditions {
            s += &format!("{:?} {} expected {} got {}\n", c.status, c.condition, c.expected, c.got);
        }
        if let Some(r) = &real {
            s += &format!("realness: max log10|Im| = {:.1} (bound {:.1})\n", r.max_im_log10, r.bound_log10);
        }
        s += &format!("{} conditions, {} failed: {}", rep.conditions.len(), rep.failures(), if passed { "PASS" } else { "FAIL" });
        s
    };
    Ok(Outcome { code: if passed { EXIT_PASS } else { EXIT_FAIL }, stdout })
}

pub fn cmd_embed(json: bool, fiducial: &Path, digits: u32, out: Option<&Path>) -> crate::Result<Outcome> {
    let f = load_fiducial(fiducial)?;
    let comps = ansatz::numeric_export(&f, digits)?;
    let doc = serde_json::json!({ "d": f.d, "digits": digits, "basis": f.basis, "components": comps });
    if let Some(p) = out {
        std::fs::write(p, to_json(&doc))?;
    }
    let stdout = if json {
        to_json(&doc)
    } else {
        comps.iter().map(|[re, im]| format!("{re} {im}")).collect::<Vec<_>>().join("\n")
    };
    Ok(Outcome { code: EXIT_PASS, stdout })
}
