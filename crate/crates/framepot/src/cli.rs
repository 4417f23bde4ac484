//! Command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use framepot_core::analysis::DEFAULT_EPSILON;
use framepot_core::circuit::build_trace_circuit;
use framepot_core::estimator::{draw_pair, epsilon_max, frame_potential, sample_seed, EpsilonMax};
use framepot_core::stats::DEFAULT_REPLICATES;
use framepot_core::tensornet::DEFAULT_WIDTH_CAP;
use framepot_core::{EnsembleSpec, Entangler, Family, HaarMode, TerminationPolicy, TraceSampleStore};

use crate::circuit_text::write_circuit;
use crate::config::{ConfigFile, Manifest};
use crate::error::{Error, Result};
use crate::pipeline::{
    estimate_rows, group_curves, layer_row, partition_rows, sample_store, slope_rows, store_master_seed, theory_rows,
};
use crate::store_file::{read_store, write_store};
use crate::tables::{
    ensemble_label, read_csv, write_csv, LayerRow, DIAGNOSE_CSV, FRAME_POTENTIAL_CSV, LAYERS_CSV, SLOPES_CSV,
    THEORY_CSV,
};
use crate::validate::run_checks;

pub const OUT_DIR_ENV: &str = "FRAMEPOT_OUT_DIR";
pub const DEFAULT_MIN_SAMPLES: usize = 1000;
pub const DEFAULT_MAX_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_PARTS: usize = 3;

#[derive(Debug, Parser)]
#[command(name = "framepot", version, about = "Frame potentials of random circuit ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample traces for every (n, l) and write one store file each.
    Sample(Opts),
    /// Frame potentials with bootstrap intervals from store files.
    Estimate(Opts),
    /// Layers needed for an ε-approximate k-design from per-depth stores.
    Fit(Opts),
    /// Linear fits of layers against n from layers.csv.
    Scaling(Opts),
    /// Closed-form k=2 frame potential bound.
    Theory(Opts),
    /// Cross-check contraction against the dense oracle and Haar values.
    Validate(Opts),
    /// Frame potentials of contiguous sample partitions.
    Diagnose(Opts),
}

/// Flags shared by all subcommands; each uses the ones it needs. Lists
/// accept `4,6,8`, inclusive ranges `2..6`, or stepped ranges `4..12:2`.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// parallel, local or hea.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    /// cnot or cz, for the hea family.
    #[arg(long)]
    pub entangler: Option<String>,
    /// ginibre-qr or phase-param.
    #[arg(long)]
    pub haar_mode: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub min_samples: Option<usize>,
    #[arg(long)]
    pub max_samples: Option<usize>,
    #[arg(long)]
    pub budget_seconds: Option<f64>,
    #[arg(long)]
    pub width_cap: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; falls back to $FRAMEPOT_OUT_DIR, then `.`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write the first sample's circuits as text.
    #[arg(long)]
    pub dump_circuit: bool,
    /// Number of partitions for `diagnose`.
    #[arg(long)]
    pub parts: Option<usize>,
    /// Select the k=2 bound in `theory` (the only closed form available).
    #[arg(long)]
    pub k2: bool,
    /// Store files, or layers.csv files for `scaling`.
    pub inputs: Vec<PathBuf>,
}

/// Parses `4,6,8`, `2..6` or `4..12:2` into a list.
pub fn parse_list<T>(text: &str) -> std::result::Result<Vec<T>, String>
where
    T: std::str::FromStr + Copy + PartialOrd + std::ops::Add<Output = T> + From<u8>,
{
    let num = |s: &str| s.trim().parse::<T>().map_err(|_| format!("`{s}` is not a number"));
    let mut out = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        if let Some((lo, rest)) = part.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (num(hi)?, num(step)?),
                None => (num(rest)?, T::from(1)),
            };
            if !(step > T::from(0)) {
                return Err(format!("step in `{part}` must be positive"));
            }
            let mut x = num(lo)?;
            while x <= hi {
                out.push(x);
                x = x + step;
            }
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err(format!("empty list `{text}`"));
    }
    Ok(out)
}

/// Flags merged over the config file, then over defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub family: Family,
    pub ns: Option<Vec<usize>>,
    pub ls: Option<Vec<usize>>,
    pub ks: Vec<u32>,
    pub entangler: Option<Entangler>,
    pub haar_mode: HaarMode,
    pub epsilon: f64,
    pub replicates: usize,
    pub min_samples: usize,
    pub max_samples: usize,
    pub budget_seconds: Option<f64>,
    pub width_cap: usize,
    pub workers: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub dump_circuit: bool,
    pub parts: usize,
    pub inputs: Vec<PathBuf>,
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> Result<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

fn pick_list<T>(flag: Option<&str>, cfg: &ConfigFile, key: &str) -> Result<Option<Vec<T>>>
where
    T: std::str::FromStr + Copy + PartialOrd + std::ops::Add<Output = T> + From<u8>,
{
    let Some(text) = flag.or_else(|| cfg.raw(key)) else {
        return Ok(None);
    };
    parse_list(text).map(Some).map_err(|e| Error::Config(format!("--{key}: {e}")))
}

fn parse_name<T>(value: Option<String>, key: &str, parse: fn(&str) -> Option<T>) -> Result<Option<T>> {
    value
        .map(|v| parse(&v).ok_or_else(|| Error::Config(format!("unknown --{key} `{v}`"))))
        .transpose()
}

impl Settings {
    pub fn resolve(opts: &Opts) -> Result<Self> {
        let cfg = match &opts.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let string = |flag: &Option<String>, key: &str| flag.clone().or_else(|| cfg.raw(key).map(String::from));
        let family = parse_name(string(&opts.family, "family"), "family", Family::parse)?.unwrap_or(Family::Parallel);
        let entangler_name = string(&opts.entangler, "entangler").filter(|e| e != "none");
        let mut entangler = parse_name(entangler_name, "entangler", Entangler::parse)?;
        if family == Family::HardwareEfficient && entangler.is_none() {
            entangler = Some(Entangler::Cnot);
        }
        if family != Family::HardwareEfficient {
            entangler = None;
        }
        let haar_mode = parse_name(string(&opts.haar_mode, "haar-mode"), "haar-mode", HaarMode::parse)?.unwrap_or_default();
        let min_flag = pick(opts.min_samples, &cfg, "min-samples")?;
        let max_samples = pick(opts.max_samples, &cfg, "max-samples")?.unwrap_or(DEFAULT_MAX_SAMPLES);
        let min_samples = min_flag.unwrap_or(DEFAULT_MIN_SAMPLES.min(max_samples));
        let out_dir = opts
            .out_dir
            .clone()
            .or_else(|| cfg.raw("out-dir").map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let inputs = if opts.inputs.is_empty() {
            cfg.raw("inputs")
                .map(|s| s.split(',').filter(|p| !p.is_empty()).map(PathBuf::from).collect())
                .unwrap_or_default()
        } else {
            opts.inputs.clone()
        };
        let workers = pick(opts.workers, &cfg, "workers")?
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        let settings = Self {
            family,
            ns: pick_list(opts.n.as_deref(), &cfg, "n")?,
            ls: pick_list(opts.l.as_deref(), &cfg, "l")?,
            ks: pick_list(opts.k.as_deref(), &cfg, "k")?.unwrap_or_else(|| vec![2]),
            entangler,
            haar_mode,
            epsilon: pick(opts.epsilon, &cfg, "epsilon")?.unwrap_or(DEFAULT_EPSILON),
            replicates: pick(opts.replicates, &cfg, "replicates")?.unwrap_or(DEFAULT_REPLICATES),
            min_samples,
            max_samples,
            budget_seconds: pick(opts.budget_seconds, &cfg, "budget-seconds")?,
            width_cap: pick(opts.width_cap, &cfg, "width-cap")?.unwrap_or(DEFAULT_WIDTH_CAP),
            workers,
            seed: pick(opts.seed, &cfg, "seed")?.unwrap_or(DEFAULT_SEED),
            out_dir,
            dump_circuit: opts.dump_circuit || cfg.get::<bool>("dump-circuit")?.unwrap_or(false),
            parts: pick(opts.parts, &cfg, "parts")?.unwrap_or(DEFAULT_PARTS),
            inputs,
        };
        settings.check()?;
        Ok(settings)
    }

    fn check(&self) -> Result<()> {
        if self.ks.contains(&0) {
            return Err(Error::Config("k values must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if self.budget_seconds.is_some_and(|b| !(b > 0.0)) {
            return Err(Error::Config("budget-seconds must be positive".into()));
        }
        Ok(())
    }

    fn ns(&self) -> Result<&[usize]> {
        self.ns.as_deref().ok_or_else(|| Error::Config("--n is required".into()))
    }

    fn ls(&self) -> Result<&[usize]> {
        self.ls.as_deref().ok_or_else(|| Error::Config("--l is required".into()))
    }

    fn inputs(&self) -> Result<&[PathBuf]> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files given".into()));
        }
        Ok(&self.inputs)
    }

    fn spec(&self, n: usize, l: usize) -> EnsembleSpec {
        EnsembleSpec { family: self.family, qubits: n, layers: l, entangler: self.entangler, haar_mode: self.haar_mode }
    }

    /// Manifest carrying every resolved setting under its flag name.
    pub fn manifest(&self, subcommand: &str) -> Manifest {
        let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        let mut m = Manifest::new(subcommand);
        m.set("family", self.family.name());
        if let Some(ns) = &self.ns {
            m.set("n", join(ns));
        }
        if let Some(ls) = &self.ls {
            m.set("l", join(ls));
        }
        m.set("k", self.ks.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        m.set("entangler", self.entangler.map_or("none", Entangler::name));
        m.set("haar-mode", self.haar_mode.name());
        m.set("epsilon", self.epsilon);
        m.set("replicates", self.replicates);
        m.set("min-samples", self.min_samples);
        m.set("max-samples", self.max_samples);
        if let Some(b) = self.budget_seconds {
            m.set("budget-seconds", b);
        }
        m.set("width-cap", self.width_cap);
        m.set("workers", self.workers);
        m.set("seed", self.seed);
        m.set("out-dir", self.out_dir.display());
        m.set("dump-circuit", self.dump_circuit);
        m.set("parts", self.parts);
        if !self.inputs.is_empty() {
            m.set("inputs", self.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(","));
        }
        m
    }
}

pub fn store_file_name(spec: &EnsembleSpec) -> String {
    format!("store_{}_n{}_l{}.csv", ensemble_label(spec), spec.qubits, spec.layers)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_manifest(settings: &Settings, subcommand: &str, extra: &[(&str, String)]) -> Result<()> {
    let mut m = settings.manifest(subcommand);
    for (k, v) in extra {
        m.set(k, v);
    }
    m.write(&settings.out_dir.join(format!("manifest_{subcommand}.txt")))
}

fn trim_float(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn cmd_sample(s: &Settings) -> Result<()> {
    ensure_dir(&s.out_dir)?;
    let monitored_k = s.ks.iter().copied().max().expect("k list is non-empty");
    let policy = TerminationPolicy::adaptive(s.min_samples, s.max_samples, monitored_k);
    let budget = s.budget_seconds.map(Duration::from_secs_f64);
    let mut written = Vec::new();
    for &n in s.ns()? {
        for &l in s.ls()? {
            let spec = s.spec(n, l);
            let master = store_master_seed(s.seed, &spec);
            if s.dump_circuit {
                dump_circuits(s, &spec, master)?;
            }
            let store = sample_store(&spec, &policy, master, s.width_cap, s.workers, budget)?;
            let path = s.out_dir.join(store_file_name(&spec));
            write_store(&path, &store)?;
            eprintln!(
                "{} n={n} l={l}: {} samples{} -> {}",
                ensemble_label(&spec),
                store.len(),
                if store.is_suspect() { " (suspect)" } else { "" },
                path.display()
            );
            written.push(path.display().to_string());
        }
    }
    write_manifest(s, "sample", &[("stores", written.join(","))])
}

fn dump_circuits(s: &Settings, spec: &EnsembleSpec, master: u64) -> Result<()> {
    let (u, v) = draw_pair(spec, sample_seed(master, 0))?;
    let trace = build_trace_circuit(&u, &v)?;
    let stem = format!("circuit_{}_n{}_l{}", ensemble_label(spec), spec.qubits, spec.layers);
    for (suffix, c) in [("u", &u), ("v", &v), ("trace", &trace)] {
        let path = s.out_dir.join(format!("{stem}_{suffix}.txt"));
        fs::write(&path, write_circuit(c)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

fn load_stores(s: &Settings) -> Result<Vec<TraceSampleStore>> {
    s.inputs()?.iter().map(|p| read_store(p)).collect()
}

fn cmd_estimate(s: &Settings) -> Result<()> {
    ensure_dir(&s.out_dir)?;
    let mut rows = Vec::new();
    for store in load_stores(s)? {
        let spec = *store.spec();
        for row in estimate_rows(&store, &s.ks, s.replicates, s.seed)? {
            let est = frame_potential(&store, row.k)?;
            let eps = match epsilon_max(&est, spec.qubits as u32, EnsembleSpec::LOCAL_DIM) {
                EpsilonMax::Bound(e) => format!("{e:.4e}"),
                EpsilonMax::StatisticallyZero => "statistically zero".into(),
            };
            println!(
                "{} n={} l={} k={}: F={:.6} se={:.3e} rel_dev={:.4} boot_median={:.6} [{:.6}, {:.6}] eps_max={eps}{}",
                row.ensemble,
                row.n,
                row.l,
                row.k,
                row.value,
                row.std_error,
                row.rel_dev,
                row.boot_median,
                row.boot_p05,
                row.boot_p95,
                if store.is_suspect() { " (suspect store)" } else { "" },
            );
            rows.push(row);
        }
    }
    write_csv(&s.out_dir.join(FRAME_POTENTIAL_CSV), &rows)?;
    write_manifest(s, "estimate", &[])
}

fn cmd_fit(s: &Settings) -> Result<()> {
    ensure_dir(&s.out_dir)?;
    let mut rows = Vec::new();
    for ((label, n), curve) in group_curves(load_stores(s)?) {
        for &k in &s.ks {
            let row = layer_row(&label, n, &curve, k, s.epsilon, s.replicates, s.seed)?;
            println!(
                "{label} n={n} k={k} eps={}: layers={:.3} [{:.3}, {:.3}] {}",
                s.epsilon, row.layers_median, row.p05, row.p95, row.status
            );
            rows.push(row);
        }
    }
    write_csv(&s.out_dir.join(LAYERS_CSV), &rows)?;
    write_manifest(s, "fit", &[])
}

fn cmd_scaling(s: &Settings) -> Result<()> {
    ensure_dir(&s.out_dir)?;
    let inputs = if s.inputs.is_empty() { vec![s.out_dir.join(LAYERS_CSV)] } else { s.inputs.clone() };
    let mut layers: Vec<LayerRow> = Vec::new();
    for p in &inputs {
        layers.extend(read_csv::<LayerRow>(p)?);
    }
    let rows = slope_rows(&layers);
    for r in &rows {
        println!("{} k={}: slope={:.4} intercept={:.4} r2={:.4}", r.ensemble, r.k, r.slope, r.intercept, r.r2);
    }
    write_csv(&s.out_dir.join(SLOPES_CSV), &rows)?;
    write_manifest(s, "scaling", &[("intercept", "unconstrained-ols".into())])
}

fn cmd_theory(s: &Settings) -> Result<()> {
    if s.ks.iter().any(|&k| k != 2) {
        return Err(Error::Config("the closed-form bound exists only for k=2".into()));
    }
    let rows = theory_rows(s.ns()?, s.ls()?);
    if rows.len() == 1 {
        println!("{}", trim_float(rows[0].bound_k2));
    } else {
        for r in &rows {
            println!("n={} l={} bound={}", r.n, r.l, trim_float(r.bound_k2));
        }
    }
    ensure_dir(&s.out_dir)?;
    write_csv(&s.out_dir.join(THEORY_CSV), &rows)?;
    write_manifest(s, "theory", &[])
}

fn cmd_validate() -> Result<()> {
    let checks = run_checks()?;
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Error::ValidationFailed(failed));
    }
    Ok(())
}

fn cmd_diagnose(s: &Settings) -> Result<()> {
    ensure_dir(&s.out_dir)?;
    let mut rows = Vec::new();
    for store in load_stores(s)? {
        for r in partition_rows(&store, s.parts, &s.ks)? {
            println!(
                "{} n={} l={} k={} part={} ({} samples): F={:.6} se={:.3e} rel_dev={:.4}",
                r.ensemble, r.n, r.l, r.k, r.part, r.samples, r.value, r.std_error, r.rel_dev
            );
            rows.push(r);
        }
    }
    write_csv(&s.out_dir.join(DIAGNOSE_CSV), &rows)?;
    write_manifest(s, "diagnose", &[])
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Validate(_) => cmd_validate(),
        Command::Sample(o) => cmd_sample(&Settings::resolve(o)?),
        Command::Estimate(o) => cmd_estimate(&Settings::resolve(o)?),
        Command::Fit(o) => cmd_fit(&Settings::resolve(o)?),
        Command::Scaling(o) => cmd_scaling(&Settings::resolve(o)?),
        Command::Theory(o) => cmd_theory(&Settings::resolve(o)?),
        Command::Diagnose(o) => cmd_diagnose(&Settings::resolve(o)?),
    }
}
