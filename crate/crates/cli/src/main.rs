use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use numvol::algebra::{format_rat, format_rat_vec, rat_to_f64, Rat};
use numvol::cycle_volume::{boundary_sweep, log_grid, mobility_upper_bound, vol_hat};
use numvol::divisor_volume::{m_invariant, m_invariant_nef_slice, vol, vol_via_duality};
use numvol::optimize::OptConfig;
use numvol::toric::toric_variety;
use numvol::varieties::{load_fan, load_variety, CatalogEntry, ClassVector, NumericalVariety, OracleTag, Space};
use numvol::verify::{run_suite, summary_line, Suite, VerifyConfig};
use numvol::zariski_surface::{surface_volume, zariski_decompose};

#[derive(Parser)]
#[command(name = "numvol", version, about = "Volumes of divisor and curve classes from numerical data")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optimizer convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Multistart count.
    #[arg(long, global = true)]
    starts: Option<usize>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Relative finite-difference step for oracle volumes.
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Catalog name (P2, F1, Cutkosky(2), ...) or path to a variety file.
    #[arg(long, global = true)]
    variety: Option<String>,
    /// Catalog parameter, e.g. `d=2` or `2`.
    #[arg(long, global = true)]
    param: Option<String>,
    /// Toric fan file.
    #[arg(long, global = true)]
    fan: Option<PathBuf>,
    /// Variety data file.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in varieties.
    Catalog,
    /// Everything computable for a divisor and/or curve class.
    Report {
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        curve: Option<String>,
    },
    /// Volume of a divisor class.
    Volume {
        #[arg(long)]
        class: String,
    },
    /// Curve volume vol_hat.
    Cyclevol {
        #[arg(long)]
        curve: String,
    },
    /// The invariant M of a curve class.
    Minv {
        #[arg(long)]
        curve: String,
        /// Search only the nef slice (gives an upper bound).
        #[arg(long)]
        nef_slice: bool,
    },
    /// Volume of a divisor recovered by duality over movable curves.
    Dualvol {
        #[arg(long)]
        class: String,
    },
    /// Zariski decomposition on a surface.
    Zariski {
        #[arg(long)]
        class: String,
    },
    /// Curve volume along gamma + eps A^(n-1).
    Sweep {
        #[arg(long, alias = "curve")]
        gamma: String,
        #[arg(long)]
        ample: String,
        /// Grid `a:b:logsteps=k`.
        #[arg(long, default_value = "1e-4:1e-1:logsteps=8")]
        eps: String,
        /// Fit the log-log slope.
        #[arg(long)]
        fit: bool,
    },
    /// Mobility upper bound.
    Mobbound {
        #[arg(long)]
        curve: String,
    },
    /// Run verification suites; exits non-zero if any check fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Serialize)]
struct Tolerances {
    tol: f64,
    fd_step: f64,
    max_iter: usize,
    starts: usize,
}

#[derive(Serialize)]
struct Manifest {
    command_line: Vec<String>,
    variety: Option<Value>,
    seed: u64,
    tolerances: Tolerances,
    version: &'static str,
    /// Not covered by the determinism guarantee.
    wall_clock_seconds: f64,
}

struct Loaded {
    variety: NumericalVariety,
    identity: Value,
    entry: Option<CatalogEntry>,
}

impl Global {
    fn opt(&self) -> OptConfig {
        let d = OptConfig::default();
        OptConfig {
            starts: self.starts.unwrap_or(d.starts),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            tol: self.tol.unwrap_or(d.tol),
            seed: self.seed,
            fd_step: self.fd_step.unwrap_or(d.fd_step),
        }
    }

    fn param(&self) -> Result<Option<i64>> {
        let Some(p) = &self.param else { return Ok(None) };
        let raw = p.split_once('=').map_or(p.as_str(), |(_, v)| v).trim();
        raw.parse().map(Some).map_err(|_| anyhow!("malformed --param {p:?}: expected an integer such as d=2"))
    }

    fn wants_variety(&self) -> bool {
        self.variety.is_some() || self.fan.is_some() || self.file.is_some()
    }

    fn load(&self) -> Result<Loaded> {
        let sources = [self.variety.is_some(), self.fan.is_some(), self.file.is_some()];
        if sources.iter().filter(|s| **s).count() > 1 {
            bail!("give only one of --variety, --fan, --file");
        }
        if let Some(path) = &self.file {
            return load_file(path);
        }
        if let Some(path) = &self.fan {
            let fan = load_fan(path).with_context(|| format!("reading fan {}", path.display()))?;
            let name = path.file_stem().map_or("fan".into(), |s| s.to_string_lossy().into_owned());
            let variety = toric_variety(fan, &name)?;
            return Ok(Loaded { variety, identity: file_identity("fan", path)?, entry: None });
        }
        let Some(name) = &self.variety else { bail!("no variety given: use --variety, --fan or --file") };
        match CatalogEntry::resolve(name, self.param()?) {
            Ok(entry) => Ok(Loaded {
                variety: entry.build()?,
                identity: json!({"kind": "catalog", "name": entry.to_string()}),
                entry: Some(entry),
            }),
            Err(e) if Path::new(name).is_file() => load_file(Path::new(name)).map_err(|f| f.context(e)),
            Err(e) => Err(e.into()),
        }
    }
}

fn file_identity(kind: &str, path: &Path) -> Result<Value> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(json!({"kind": kind, "path": path.display().to_string(), "sha256": hex::encode(Sha256::digest(&bytes))}))
}

fn load_file(path: &Path) -> Result<Loaded> {
    let variety = load_variety(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(Loaded { variety, identity: file_identity("file", path)?, entry: None })
}

fn parse_class(v: &NumericalVariety, space: Space, s: &str, flag: &str) -> Result<ClassVector> {
    ClassVector::parse(space, s, v.rank()).with_context(|| format!("in --{flag} {s:?}"))
}

/// `a:b:logsteps=k`
fn parse_eps(s: &str) -> Result<Vec<f64>> {
    let err = || anyhow!("malformed --eps {s:?}: expected a:b:logsteps=k");
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, k] = parts[..] else { return Err(err()) };
    let a: f64 = a.trim().parse().map_err(|_| err())?;
    let b: f64 = b.trim().parse().map_err(|_| err())?;
    let k: usize = k.trim().strip_prefix("logsteps=").ok_or_else(err)?.parse().map_err(|_| err())?;
    if !(a > 0.0 && b > 0.0) || k == 0 {
        return Err(err());
    }
    Ok(log_grid(a, b, k))
}

fn exact(r: &Rat) -> Value {
    json!({"exact": format_rat(r), "approx": rat_to_f64(r)})
}

fn membership(v: &NumericalVariety, c: &ClassVector) -> Value {
    let x = &c.coords;
    match c.space {
        Space::Divisor => json!({
            "nef": v.nef().contains(x),
            "ample": v.nef().is_interior(x),
            "psef": v.psef().contains(x),
            "big": v.psef().is_interior(x),
        }),
        Space::Curve => json!({
            "mori": v.mori().contains(x),
            "mori_interior": v.mori().is_interior(x),
            "movable": v.movable_curves().contains(x),
            "movable_interior": v.movable_curves().is_interior(x),
        }),
    }
}

/// Failed sub-computations of a report become error entries rather than aborting it.
fn or_error<T: Serialize>(r: numvol::Result<T>) -> Value {
    match r {
        Ok(x) => serde_json::to_value(x).unwrap_or(Value::Null),
        Err(e) => json!({"error": e.to_string()}),
    }
}

fn variety_summary(v: &NumericalVariety) -> Value {
    json!({
        "name": v.name(),
        "dim": v.dim(),
        "rank": v.rank(),
        "basis": v.basis(),
        "oracle": v.oracle().tag().as_str(),
    })
}

struct Output {
    body: Value,
    csv: Option<String>,
    exit: ExitCode,
}

impl Output {
    fn json(body: Value) -> Self {
        Self { body, csv: None, exit: ExitCode::SUCCESS }
    }
}

fn run(cli: &Cli) -> Result<(Output, Option<Value>)> {
    let g = &cli.global;
    let cfg = g.opt();
    if let Command::Catalog = cli.command {
        let entries: Vec<Value> = CatalogEntry::standard()
            .into_iter()
            .map(|e| e.build().map(|v| variety_summary(&v)))
            .collect::<numvol::Result<_>>()?;
        return Ok((Output::json(json!({"varieties": entries})), None));
    }
    if let Command::Verify { suite } = &cli.command {
        let suite = Suite::parse(suite)?;
        let mut filter = None;
        let mut identity = None;
        if g.wants_variety() {
            if g.fan.is_some() || g.file.is_some() {
                bail!("verify filters by catalog entry; use --variety");
            }
            let loaded = g.load()?;
            filter = loaded.entry;
            identity = Some(loaded.identity);
        }
        let config = VerifyConfig { seed: g.seed, opt: cfg.clone(), filter };
        let report = run_suite(suite, &config)?;
        for c in &report.criteria {
            eprintln!("{}", summary_line(c));
            for w in &c.warnings {
                eprintln!("  warning: {w}");
            }
        }
        let exit = if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) };
        let body = json!({"suite": format!("{suite:?}").to_lowercase(), "passed": report.passed, "criteria": report.criteria});
        return Ok((Output { body, csv: None, exit }, identity));
    }

    let Loaded { variety: v, identity, .. } = g.load()?;
    let head = json!({"variety": variety_summary(&v)});
    let merge = |mut body: Value| {
        if let (Value::Object(m), Value::Object(h)) = (&mut body, &head) {
            for (k, x) in h {
                m.entry(k.clone()).or_insert(x.clone());
            }
        }
        body
    };
    let out = match &cli.command {
        Command::Catalog | Command::Verify { .. } => unreachable!(),
        Command::Volume { class } => {
            let a = parse_class(&v, Space::Divisor, class, "class")?;
            let r = vol(&v, &a)?;
            Output::json(json!({
                "class": format_rat_vec(&a.coords),
                "value": format_rat(&r.value),
                "value_f64": rat_to_f64(&r.value),
                "method": r.method,
            }))
        }
        Command::Cyclevol { curve } => {
            let c = parse_class(&v, Space::Curve, curve, "curve")?;
            let r = vol_hat(&v, &c, &cfg)?;
            Output::json(json!({
                "curve": format_rat_vec(&c.coords),
                "value": r.value,
                "method": r.method,
                "status": r.opt.status,
                "kkt_gap": r.opt.kkt_gap,
                "seed": g.seed,
                "optimizer": r.opt,
            }))
        }
        Command::Minv { curve, nef_slice } => {
            let c = parse_class(&v, Space::Curve, curve, "curve")?;
            let r = if *nef_slice { m_invariant_nef_slice(&v, &c, &cfg)? } else { m_invariant(&v, &c, &cfg)? };
            Output::json(json!({
                "curve": format_rat_vec(&c.coords),
                "value": r.value,
                "method": "optimizer",
                "volume_method": r.method,
                "upper_bound": r.upper_bound,
                "status": r.opt.status,
                "kkt_gap": r.opt.kkt_gap,
                "seed": g.seed,
                "optimizer": r.opt,
            }))
        }
        Command::Dualvol { class } => {
            let a = parse_class(&v, Space::Divisor, class, "class")?;
            let r = vol_via_duality(&v, &a, &cfg)?;
            Output::json(json!({
                "class": format_rat_vec(&a.coords),
                "value": r.value,
                "method": "optimizer",
                "reference": {"value": format_rat(&r.reference.value), "value_f64": rat_to_f64(&r.reference.value), "method": r.reference.method},
                "relative_gap": r.relative_gap,
                "status": r.outer.status,
                "kkt_gap": r.outer.kkt_gap,
                "seed": g.seed,
                "optimizer": r.outer,
            }))
        }
        Command::Zariski { class } => {
            let a = parse_class(&v, Space::Divisor, class, "class")?;
            let z = zariski_decompose(&v, &a)?;
            let p = &z.positive.coords;
            let mut back = p.clone();
            let mut orthogonal = true;
            for (label, nu) in &z.negative {
                let c = v.negative_curves().iter().find(|c| &c.label == label).expect("curve from decomposition");
                orthogonal &= v.surface_product(p, &c.class)? == Rat::default();
                for (b, x) in back.iter_mut().zip(&c.class) {
                    *b += nu * x;
                }
            }
            let p2 = v.surface_product(p, p)?;
            let volume = surface_volume(&v, &a.coords)?;
            Output::json(json!({
                "class": format_rat_vec(&a.coords),
                "positive": format_rat_vec(p),
                "negative": z.negative.iter().map(|(c, nu)| json!({"curve": c, "coeff": format_rat(nu)})).collect::<Vec<_>>(),
                "method": "surface-zariski",
                "volume": exact(&volume),
                "checks": {
                    "reconstructs": back == a.coords,
                    "positive_nef": v.nef().contains(p),
                    "orthogonal_to_support": orthogonal,
                    "volume_is_p_squared": volume == p2,
                },
            }))
        }
        Command::Sweep { gamma, ample, eps, fit } => {
            let c = parse_class(&v, Space::Curve, gamma, "gamma")?;
            let a = parse_class(&v, Space::Divisor, ample, "ample")?;
            let grid = parse_eps(eps)?;
            let mut s = boundary_sweep(&v, &c, &a, &grid, &cfg)?;
            if !fit {
                s.slope = None;
            }
            let mut csv = String::from("eps,value,status\n");
            for p in &s.points {
                csv.push_str(&format!("{:e},{:e},{}\n", p.eps, p.value, p.status.as_str()));
            }
            Output {
                body: json!({
                    "gamma": format_rat_vec(&c.coords),
                    "ample": format_rat_vec(&a.coords),
                    "method": "optimizer",
                    "seed": g.seed,
                    "sweep": s,
                }),
                csv: Some(csv),
                exit: ExitCode::SUCCESS,
            }
        }
        Command::Mobbound { curve } => {
            let c = parse_class(&v, Space::Curve, curve, "curve")?;
            let b = mobility_upper_bound(&v, &c, &cfg)?;
            Output::json(json!({
                "curve": format_rat_vec(&c.coords),
                "value": b.bound,
                "method": "optimizer",
                "constant": b.constant.to_string(),
                "vol_hat": b.vol_hat,
                "status": b.status,
                "seed": g.seed,
            }))
        }
        Command::Report { class, curve } => {
            if class.is_none() && curve.is_none() {
                bail!("report needs --class and/or --curve");
            }
            let mut body = serde_json::Map::new();
            if let Some(s) = class {
                let a = parse_class(&v, Space::Divisor, s, "class")?;
                let volume = vol(&v, &a).map(|r| {
                    json!({"value": format_rat(&r.value), "value_f64": rat_to_f64(&r.value), "method": r.method})
                });
                body.insert(
                    "class".into(),
                    json!({
                        "coords": format_rat_vec(&a.coords),
                        "membership": membership(&v, &a),
                        "vol": or_error(volume),
                    }),
                );
            }
            if let Some(s) = curve {
                let c = parse_class(&v, Space::Curve, s, "curve")?;
                let vh = vol_hat(&v, &c, &cfg).map(|r| {
                    json!({"value": r.value, "method": r.method, "status": r.opt.status, "kkt_gap": r.opt.kkt_gap})
                });
                let minv = if v.oracle().tag() == OracleTag::NefOnly {
                    m_invariant_nef_slice(&v, &c, &cfg)
                } else {
                    m_invariant(&v, &c, &cfg)
                }
                .map(|r| {
                    json!({
                        "value": r.value,
                        "method": "optimizer",
                        "volume_method": r.method,
                        "upper_bound": r.upper_bound,
                        "status": r.opt.status,
                        "kkt_gap": r.opt.kkt_gap,
                    })
                });
                let mob = mobility_upper_bound(&v, &c, &cfg).map(|b| {
                    json!({"value": b.bound, "method": "optimizer", "constant": b.constant.to_string(), "status": b.status})
                });
                body.insert(
                    "curve".into(),
                    json!({
                        "coords": format_rat_vec(&c.coords),
                        "membership": membership(&v, &c),
                        "vol_hat": or_error(vh),
                        "minv": or_error(minv),
                        "mobbound": or_error(mob),
                    }),
                );
            }
            body.insert("seed".into(), json!(g.seed));
            let csv = report_csv(&body);
            Output { body: Value::Object(body), csv: Some(csv), exit: ExitCode::SUCCESS }
        }
    };
    Ok((Output { body: merge(out.body), ..out }, Some(identity)))
}

/// Flattens the scalar quantities of a report into `quantity,value,method` rows.
fn report_csv(body: &serde_json::Map<String, Value>) -> String {
    let mut csv = String::from("quantity,value,method\n");
    for (section, keys) in [("class", &["vol"][..]), ("curve", &["vol_hat", "minv", "mobbound"][..])] {
        let Some(s) = body.get(section) else { continue };
        for k in keys {
            let q = &s[*k];
            let value = match &q["value"] {
                Value::String(x) => x.clone(),
                Value::Null => String::new(),
                x => x.to_string(),
            };
            csv.push_str(&format!("{k},{value},{}\n", q["method"].as_str().unwrap_or("error")));
        }
    }
    csv
}

/// Writes to stdout, tolerating a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let g = &cli.global;
    match run(&cli) {
        Ok((out, identity)) => {
            if g.format == Format::Csv {
                match &out.csv {
                    Some(csv) => emit(csv),
                    None => {
                        eprintln!("error: csv output is available for sweep and report only");
                        return ExitCode::from(2);
                    }
                }
                return out.exit;
            }
            let cfg = g.opt();
            let manifest = Manifest {
                command_line: std::iter::once("numvol".to_string()).chain(std::env::args().skip(1)).collect(),
                variety: identity,
                seed: g.seed,
                tolerances: Tolerances { tol: cfg.tol, fd_step: cfg.fd_step, max_iter: cfg.max_iter, starts: cfg.starts },
                version: env!("CARGO_PKG_VERSION"),
                wall_clock_seconds: started.elapsed().as_secs_f64(),
            };
            let mut body = out.body;
            if let Value::Object(m) = &mut body {
                m.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
            }
            emit(&(serde_json::to_string_pretty(&body).expect("output serializes") + "\n"));
            out.exit
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
