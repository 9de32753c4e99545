//! Batch front end: ordinal evaluation, direct-sum indices, fan set
//! derivations, scalar bounds and seeded verification suites. Every command
//! prints a versioned JSON report (or a text summary with `--format text`).

pub mod gen;
pub mod report;
pub mod suites;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use szlenk::calculus::{direct_sum_index, frount_m, sigma, CalcError, SpaceDoc};
use szlenk::engine::{
    bq_cover, bq_member, derive_steps, product_factors, BqPoint, EngineError, FanSet, FanSetDoc,
    ProductSet,
};
use szlenk::ordinal::{parse_ordinal, ParseError};
use szlenk::rational::{format_rational, parse_rational, QPow, Rational};

use report::{Case, Report};
use suites::Suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "szlenk", version, about = "Exact Szlenk index calculus and fan set derivations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Log filter (overrides SZLENK_LOG).
    #[arg(long, global = true)]
    pub log_level: Option<log::LevelFilter>,
    /// Record wall time in the report; such reports are not reproducible.
    #[arg(long, global = true)]
    pub wall_time: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an ordinal expression such as `w^2*3 + w`.
    Ord { expr: String },
    #[command(subcommand)]
    Space(SpaceCmd),
    #[command(subcommand)]
    Set(SetCmd),
    /// Run a seeded verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Number of samples; each suite has its own default.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// σ(a, b, c, d).
    Sigma {
        #[arg(value_parser = rational_arg)]
        a: Rational,
        #[arg(value_parser = rational_arg)]
        b: Rational,
        #[arg(value_parser = rational_arg)]
        c: Rational,
        #[arg(value_parser = rational_arg)]
        d: Rational,
    },
    /// Least M ≥ m with (2^q − 1)·ε^q·M ≥ 8^q·d^q·(m − 1).
    Frount {
        #[arg(long, value_parser = rational_arg)]
        d: Rational,
        #[arg(long = "eps-q", value_parser = rational_arg)]
        eps_q: Rational,
        #[arg(long, value_parser = rational_arg)]
        q: Rational,
        #[arg(long)]
        m: u64,
    },
    /// Integer cover of a B_q set by scaled products of the document's
    /// factors, optionally testing points against it.
    Cover {
        file: PathBuf,
        #[arg(long)]
        l: u64,
        /// JSON array of points `{"coeffs":[…],"paths":[…]}`.
        #[arg(long)]
        points: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpaceCmd {
    /// Szlenk index of a direct-sum document.
    Eval { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum SetCmd {
    /// Iterated ε-derivation of a fan set document.
    Derive {
        file: PathBuf,
        #[arg(long = "eps-q", value_parser = qpow_arg)]
        eps_q: QPow,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn qpow_arg(s: &str) -> Result<QPow, String> {
    s.parse::<QPow>().map_err(|e| e.to_string())
}

/// What a command produced.
pub struct Output {
    pub text: String,
    pub success: bool,
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn r(x: &Rational) -> String {
    format_rational(x)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Ord { expr } => {
            let o = parse_ordinal(expr)?;
            let text = match cli.format {
                Format::Json => serde_json::to_string(&o).expect("ordinals serialize") + "\n",
                Format::Text => format!("{o}\n"),
            };
            return Ok(Output { text, success: true });
        }
        Command::Space(SpaceCmd::Eval { file }) => {
            let doc = SpaceDoc::from_json(&read(file)?)?;
            let ev = direct_sum_index(&doc.expr)?;
            log::info!("{}: {} by {:?}", file.display(), ev.verdict, ev.rule);
            let cmd = json!({"command": "space eval", "file": file});
            Report::new(cmd, vec![Case::ok(0, json!(doc.expr), json!(ev))])
        }
        Command::Set(SetCmd::Derive { file, eps_q, steps }) => {
            let doc = FanSetDoc::from_json(&read(file)?)?;
            let output = derive_trace(&doc.set, eps_q, *steps)?;
            let cmd = json!({"command": "set derive", "file": file, "eps_q": eps_q, "steps": steps});
            let input = json!({"q": doc.q, "set": doc.set});
            Report::new(cmd, vec![Case::ok(0, input, output)])
        }
        Command::Verify {
            suite,
            samples,
            seed,
        } => {
            let n = samples.unwrap_or_else(|| suite.default_samples());
            log::info!("running {} with {n} samples, seed {seed}", suite.name());
            let cases = suites::run(*suite, n, *seed);
            for c in cases.iter().filter(|c| !c.pass) {
                log::warn!("{} case {} failed", suite.name(), c.id);
            }
            let cmd = json!({"command": "verify", "suite": suite.name(), "samples": n, "seed": seed});
            Report::new(cmd, cases)
        }
        Command::Sigma { a, b, c, d } => {
            let s = sigma(a, b, c, d)?;
            let input = json!({"a": r(a), "b": r(b), "c": r(c), "d": r(d)});
            Report::new(json!({"command": "sigma"}), vec![Case::ok(0, input, json!({"sigma": s}))])
        }
        Command::Frount { d, eps_q, q, m } => {
            let big = frount_m(d, eps_q, q, *m)?;
            let input = json!({"d": r(d), "eps_q": r(eps_q), "q": r(q), "m": m});
            Report::new(json!({"command": "frount"}), vec![Case::ok(0, input, json!({"m_big": big}))])
        }
        Command::Cover { file, l, points } => {
            let doc = FanSetDoc::from_json(&read(file)?)?;
            let factors: Vec<FanSet> = match &doc.set {
                FanSet::ProdQ(_) => product_factors(&doc.set)?
                    .into_iter()
                    .map(|(a, s)| FanSet::scale(QPow::new(a).expect("nonnegative"), s))
                    .collect(),
                other => vec![other.clone()],
            };
            let cover = bq_cover(&factors, *l, &doc.q)?;
            let mut cases = vec![Case::ok(0, json!({"q": doc.q, "factors": factors, "l": l}), json!(cover))];
            if let Some(p) = points {
                let pts: Vec<BqPoint> = serde_json::from_str(&read(p)?)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                for (i, pt) in pts.iter().enumerate() {
                    let member = bq_member(pt, &cover)?;
                    cases.push(Case::ok(i as u64 + 1, json!(pt), json!({"member": member})));
                }
            }
            Report::new(json!({"command": "cover", "file": file, "l": l}), cases)
        }
    };
    if cli.wall_time {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    Ok(Output {
        text,
        success: report.all_passed(),
    })
}

/// Snapshots of the derivation; products go through the box iterator.
fn derive_trace(set: &FanSet, eps_q: &QPow, steps: usize) -> Result<Value, CliError> {
    if set.has_product() {
        let (_, trace) = ProductSet::from_set(set)?.trace(eps_q, steps)?;
        Ok(json!(trace))
    } else {
        let (_, trace) = derive_steps(set, eps_q, steps)?;
        Ok(json!(trace))
    }
}

/// Installs the logger: `--log-level` wins over `SZLENK_LOG`, which wins
/// over the default of warnings only.
pub fn init_logging(flag: Option<log::LevelFilter>) {
    let env = env_logger::Env::default().filter_or("SZLENK_LOG", "warn");
    let mut b = env_logger::Builder::from_env(env);
    if let Some(level) = flag {
        b.filter_level(level);
    }
    let _ = b.try_init();
}
