//! Command-line front end for `relwalk`: experiment configs, a threaded
//! executor and result files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod exec;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use commands::{CliError, Context};
use config::{Arithmetic, ExperimentConfig};
use exec::Threaded;
use output::{jnum, jnums, OutDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Radius,
    Green,
    Identities,
    Parabolic,
    Classify,
    Llt,
    Automaton,
    Ancona,
    Tauber,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Radius => "radius",
            Command::Green => "green",
            Command::Identities => "identities",
            Command::Parabolic => "parabolic",
            Command::Classify => "classify",
            Command::Llt => "llt",
            Command::Automaton => "automaton",
            Command::Ancona => "ancona",
            Command::Tauber => "tauber",
        }
    }
}

fn pair(s: &str) -> Result<(usize, u64), String> {
    let (a, b) = s.split_once(',').ok_or("expected m,B")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

/// Accepts `16`, `16G`, `512M` (gigabytes when no suffix is given).
fn memory(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = match t.chars().last() {
        Some('G' | 'g') => (&t[..t.len() - 1], 1.0),
        Some('M' | 'm') => (&t[..t.len() - 1], 1.0 / 1024.0),
        _ => (t, 1.0),
    };
    let v: f64 = num.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 {
        Ok(v * scale)
    } else {
        Err("memory cap must be positive".into())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "relwalk",
    version,
    about = "Random walks on free products of abelian groups"
)]
pub struct Cli {
    pub command: Command,
    /// Experiment config: a path, or a name under configs/.
    pub config: PathBuf,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Syllable count and syllable length, `m,B`.
    #[arg(long, value_parser = pair)]
    pub truncation: Option<(usize, u64)>,
    #[arg(long)]
    pub series_order: Option<usize>,
    /// Comma separated fractions of the estimated radius.
    #[arg(long, value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_parser = memory)]
    pub memory_cap: Option<f64>,
    #[arg(long, conflicts_with = "float")]
    pub exact: bool,
    #[arg(long)]
    pub float: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub export_dot: bool,
    /// CSV with columns `n,value` for `tauber`.
    #[arg(long)]
    pub sequence: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
}

/// Parses arguments and runs one command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            }
        }
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut ExperimentConfig) -> Result<(), CliError> {
    let b = &mut cfg.budgets;
    if let Some(n) = cli.n_max {
        b.n_max = n;
    }
    if let Some(t) = cli.truncation {
        b.truncation = t;
    }
    if let Some(s) = cli.series_order {
        b.series_order = s;
    }
    if let Some(m) = cli.memory_cap {
        b.memory_cap_gb = m;
    }
    if let Some(g) = &cli.r_grid {
        if let Some(bad) = g.iter().find(|r| !(**r >= 0.0 && **r <= 1.0)) {
            return Err(CliError::Validation(format!(
                "--r-grid: {bad} is not in [0, 1]"
            )));
        }
        cfg.r_grid = g.clone();
    }
    if cli.exact {
        cfg.arithmetic = Arithmetic::Exact;
    }
    if cli.float {
        cfg.arithmetic = Arithmetic::Float;
    }
    if cli.threads == 0 {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    Ok(())
}

fn out_dir(cli: &Cli, cfg: Option<&ExperimentConfig>) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| match cfg {
        Some(c) => c
            .output
            .clone()
            .map(PathBuf::from)
            .unwrap_or_else(|| Path::new("out").join(&c.name)),
        None => PathBuf::from("out/unnamed"),
    })
}

fn execute(cli: &Cli) -> i32 {
    let start = Instant::now();
    let mut manifest = Map::new();
    manifest.insert("command".into(), json!(cli.command.name()));
    manifest.insert(
        "config_path".into(),
        json!(cli.config.display().to_string()),
    );
    manifest.insert("threads".into(), json!(cli.threads));
    manifest.insert(
        "versions".into(),
        json!({"relwalk": relwalk::VERSION, "relwalk-cli": env!("CARGO_PKG_VERSION")}),
    );

    let loaded = config::load(&cli.config);
    let (cfg, files, result) = match loaded {
        Err(e) => {
            let err = CliError::Validation(e.to_string());
            (None, Vec::new(), Err(err))
        }
        Ok((mut cfg, bytes, resolved)) => {
            manifest.insert(
                "config_resolved".into(),
                json!(resolved.display().to_string()),
            );
            manifest.insert("config_sha256".into(), json!(hex(&Sha256::digest(&bytes))));
            manifest.insert("name".into(), json!(cfg.name));
            let result = apply_overrides(cli, &mut cfg);
            if result.is_ok() {
                if let Some(avail) = available_memory_gb() {
                    if avail < cfg.budgets.memory_cap_gb {
                        manifest.insert(
                            "memory_cap_requested_gb".into(),
                            jnum(cfg.budgets.memory_cap_gb),
                        );
                        cfg.budgets.memory_cap_gb = avail;
                    }
                }
            }
            let (files, result) = match result {
                Err(e) => (Vec::new(), Err(e)),
                Ok(()) => run_command(cli, &cfg, &mut manifest),
            };
            (Some(cfg), files, result)
        }
    };
    if let Some(cfg) = &cfg {
        manifest.insert(
            "arithmetic".into(),
            serde_json::to_value(cfg.arithmetic).expect("serializes"),
        );
        manifest.insert(
            "budgets".into(),
            serde_json::to_value(&cfg.budgets).expect("serializes"),
        );
        manifest.insert("r_grid".into(), jnums(&cfg.r_grid));
    }
    let code = match &result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("relwalk {}: {}", cli.command.name(), e.message());
            e.exit_code()
        }
    };
    manifest.insert(
        "status".into(),
        json!(match &result {
            Ok(()) => "ok",
            Err(CliError::Budget(_)) => "budget-exhausted",
            Err(CliError::Validation(_)) => "invalid",
            Err(CliError::Failed(_)) => "failed",
        }),
    );
    manifest.insert("exit_code".into(), json!(code));
    manifest.insert(
        "message".into(),
        json!(result.as_ref().err().map(|e| e.message().to_string())),
    );
    manifest.insert("outputs".into(), json!(files));
    manifest.insert("wall_time_s".into(), jnum(start.elapsed().as_secs_f64()));
    let dir = out_dir(cli, cfg.as_ref());
    match OutDir::create(&dir).and_then(|mut o| o.json("manifest.json", &Value::Object(manifest))) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("relwalk: cannot write manifest in {}: {e}", dir.display());
            if code == 0 {
                1
            } else {
                code
            }
        }
    }
}

fn run_command(
    cli: &Cli,
    cfg: &ExperimentConfig,
    manifest: &mut Map<String, Value>,
) -> (Vec<String>, Result<(), CliError>) {
    let dir = out_dir(cli, Some(cfg));
    let mut out = match OutDir::create(&dir) {
        Ok(o) => o,
        Err(e) => return (Vec::new(), Err(e.into())),
    };
    let measure = match cfg.measure_for(cfg.arithmetic) {
        Ok(m) => m,
        Err(e) => return (Vec::new(), Err(CliError::Validation(e.to_string()))),
    };
    let mut ctx = Context {
        cfg,
        measure,
        exec: Threaded::new(cli.threads),
        out: &mut out,
        export_dot: cli.export_dot,
        sequence: cli.sequence.clone(),
        beta: cli.beta,
        notes: Map::new(),
    };
    let result = match cli.command {
        Command::Validate => commands::validate(&mut ctx),
        Command::Radius => commands::radius(&mut ctx),
        Command::Green => commands::green(&mut ctx),
        Command::Identities => commands::identities(&mut ctx),
        Command::Parabolic => commands::parabolic(&mut ctx),
        Command::Classify => commands::classify_cmd(&mut ctx),
        Command::Llt => commands::llt(&mut ctx),
        Command::Automaton => commands::automaton(&mut ctx),
        Command::Ancona => commands::ancona(&mut ctx),
        Command::Tauber => commands::tauber(&mut ctx),
    };
    manifest.extend(std::mem::take(&mut ctx.notes));
    (out.files.clone(), result)
}

/// Available physical memory (Linux), so that an oversized cap still ends
/// in a budget exit instead of the process being killed.
fn available_memory_gb() -> Option<f64> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(0.8 * kb / (1u64 << 20) as f64)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
