//! Text format for trace sample stores.
//!
//! ```text
//! # ensemble=parallel n=4 l=3 q=2 entangler=none haar=ginibre-qr master_seed=17 version=1
//! # status=suspect
//! index,seed,re,im
//! 0,1234,0.51,-1.2
//! ```
//!
//! The status line is present only for suspect stores. Floats use the
//! shortest representation that parses back to the same value.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use framepot_core::estimator::sample_seed;
use framepot_core::{EnsembleSpec, Entangler, Family, HaarMode, TraceSample, TraceSampleStore, C64};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const COLUMNS: &str = "index,seed,re,im";

pub fn header_line(spec: &EnsembleSpec, master_seed: u64) -> String {
    format!(
        "# ensemble={} n={} l={} q={} entangler={} haar={} master_seed={} version={}",
        spec.family.name(),
        spec.qubits,
        spec.layers,
        EnsembleSpec::LOCAL_DIM,
        spec.entangler.map_or("none", Entangler::name),
        spec.haar_mode.name(),
        master_seed,
        FORMAT_VERSION
    )
}

pub fn write_store_string(store: &TraceSampleStore) -> String {
    let mut out = header_line(store.spec(), store.master_seed());
    out.push('\n');
    if store.is_suspect() {
        out.push_str("# status=suspect\n");
    }
    out.push_str(COLUMNS);
    out.push('\n');
    for s in store.samples() {
        writeln!(out, "{},{},{},{}", s.index, s.seed, s.trace.re, s.trace.im).expect("writing to a String");
    }
    out
}

pub fn write_store(path: &Path, store: &TraceSampleStore) -> Result<()> {
    fs::write(path, write_store_string(store)).map_err(|e| Error::io(path, e))
}

pub fn read_store(path: &Path) -> Result<TraceSampleStore> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_store(&text, path)
}

fn parse_header(line: &str, path: &Path) -> Result<(EnsembleSpec, u64)> {
    let err = |msg: String| Error::parse(path, 1, msg);
    let body = line.strip_prefix('#').ok_or_else(|| err("expected a `# ensemble=...` header".into()))?;
    let mut fields = std::collections::BTreeMap::new();
    for kv in body.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| err(format!("malformed header field `{kv}`")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(format!("header lacks `{k}`")));
    let number = |k: &str| -> Result<u64> {
        let v = get(k)?;
        v.parse().map_err(|_| err(format!("`{k}={v}` is not an integer")))
    };
    let version = number("version")?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(err(format!("unsupported store version {version}")));
    }
    if number("q")? != u64::from(EnsembleSpec::LOCAL_DIM) {
        return Err(err("only q=2 is supported".into()));
    }
    let family = get("ensemble").and_then(|v| Family::parse(v).ok_or_else(|| err(format!("unknown ensemble `{v}`"))))?;
    let entangler = match get("entangler")? {
        "none" => None,
        v => Some(Entangler::parse(v).ok_or_else(|| err(format!("unknown entangler `{v}`")))?),
    };
    let haar_mode = get("haar").and_then(|v| HaarMode::parse(v).ok_or_else(|| err(format!("unknown haar mode `{v}`"))))?;
    let spec = EnsembleSpec {
        family,
        qubits: number("n")? as usize,
        layers: number("l")? as usize,
        entangler,
        haar_mode,
    };
    spec.validate().map_err(|e| err(e.to_string()))?;
    Ok((spec, number("master_seed")?))
}

/// Parses store text; `path` names the source in errors.
pub fn parse_store(text: &str, path: &Path) -> Result<TraceSampleStore> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty store file"))?;
    let (spec, master_seed) = parse_header(first, path)?;
    let mut store = TraceSampleStore::new(spec, master_seed);
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.trim();
        let err = |msg: String| Error::parse(path, line_no, msg);
        if line.is_empty() || line == COLUMNS {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            match comment.trim() {
                "status=suspect" => store.set_suspect(true),
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let [index, seed, re, im] = cols.as_slice() else {
            return Err(err(format!("expected 4 columns, found {}", cols.len())));
        };
        let index: u64 = index.parse().map_err(|_| err(format!("bad index `{index}`")))?;
        let seed: u64 = seed.parse().map_err(|_| err(format!("bad seed `{seed}`")))?;
        let re: f64 = re.parse().map_err(|_| err(format!("bad real part `{re}`")))?;
        let im: f64 = im.parse().map_err(|_| err(format!("bad imaginary part `{im}`")))?;
        if seed != sample_seed(master_seed, index) {
            return Err(err(format!("seed {seed} does not derive from master_seed {master_seed} at index {index}")));
        }
        store
            .push(TraceSample { index, seed, trace: C64::new(re, im) })
            .map_err(|e| err(e.to_string()))?;
    }
    Ok(store)
}
