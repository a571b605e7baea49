//! Command-line front end for `ice_lab`: game files, reports and region
//! export.

pub mod commands;
pub mod expect;
pub mod gamefile;
pub mod region_out;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use commands::{Options, RegionKind};
use ice_lab::PunishmentMode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "ice-lab", version, about = "Interdependent-choice equilibrium analysis of finite games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CE, IR and ICE membership of a distribution, with certificates.
    Check(Common),
    /// R, C-rationalizable, FC-rationalizable sets and the operator limit.
    Sets(Common),
    /// Implementability verdicts under each threat notion.
    Classify(Common),
    /// Exact payoff regions of a two-player game (CSV or SVG via --out).
    Region {
        #[command(flatten)]
        common: Common,
        /// Region to compute; repeat or use `all` for an overlay.
        #[arg(long, value_enum, default_value = "ice")]
        which: Vec<Which>,
    },
    /// Replays the LP verdict through the explicit mediated mechanism.
    Oracle(Common),
}

#[derive(Debug, Args)]
struct Common {
    file: PathBuf,
    #[arg(long)]
    dist: Option<String>,
    /// `all`, `none`, or a threat set declared in the file.
    #[arg(long, default_value = "all")]
    threats: String,
    #[arg(long, value_enum, default_value = "worst")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Write the JSON report (or CSV/SVG for `region`) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 unless the command's main verdict matches.
    #[arg(long, value_enum)]
    expect: Option<YesNo>,
    /// Use iterated strict dominance for R.
    #[arg(long)]
    alt_r: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Worst,
    Br,
    Minimax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Ice,
    Ce,
    Ir,
    Nash,
    All,
}

impl Common {
    fn options(&self) -> Result<Options> {
        if self.samples == 0 {
            bail!("--samples must be at least 1");
        }
        Ok(Options {
            dist: self.dist.clone(),
            threats: self.threats.clone(),
            mode: match self.mode {
                Mode::Worst => PunishmentMode::WorstInThreats,
                Mode::Br => PunishmentMode::BestResponseOnly,
                Mode::Minimax => PunishmentMode::Minimax,
            },
            seed: self.seed,
            samples: self.samples,
            alt_r: self.alt_r,
            regions: vec![RegionKind::Ice],
        })
    }
}

pub fn load(path: &Path) -> Result<gamefile::GameFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    gamefile::parse(&text).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))
}

/// Key of the verdict `--expect` compares against.
fn headline(command: &str) -> Option<&'static str> {
    match command {
        "check" => Some("ice.holds"),
        "classify" => Some("quasi_sequential.holds"),
        "oracle" => Some("lp.holds"),
        _ => None,
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let (name, common, which) = match &cli.command {
        Command::Check(c) => ("check", c, None),
        Command::Sets(c) => ("sets", c, None),
        Command::Classify(c) => ("classify", c, None),
        Command::Region { common, which } => ("region", common, Some(which)),
        Command::Oracle(c) => ("oracle", c, None),
    };
    let mut opts = common.options()?;
    if let Some(which) = which {
        opts.regions = if which.contains(&Which::All) {
            RegionKind::ALL.to_vec()
        } else {
            let mut v: Vec<RegionKind> = Vec::new();
            for w in which {
                let k = match w {
                    Which::Ice => RegionKind::Ice,
                    Which::Ce => RegionKind::Ce,
                    Which::Ir => RegionKind::Ir,
                    Which::Nash => RegionKind::Nash,
                    Which::All => unreachable!(),
                };
                if !v.contains(&k) {
                    v.push(k);
                }
            }
            v
        };
    }
    let headline_key = headline(name);
    if common.expect.is_some() && headline_key.is_none() {
        bail!("--expect applies to check, classify and oracle");
    }
    let game = load(&common.file)?;

    let mut regions = Vec::new();
    let mut report = if name == "region" {
        let (r, computed) = commands::region(&game, &opts)?;
        regions = computed;
        r
    } else {
        expect::run_command(&game, name, &opts)?
    };
    let dist = report["distribution"]["name"].as_str().map(String::from);
    let outcomes: Vec<Value> = expect::for_report(&game, name, &opts, dist.as_deref(), &report)
        .iter()
        .map(expect::outcome_json)
        .collect();
    report["options"] = Value::String(expect::describe_options(&opts));
    report["claims"] = Value::Array(outcomes.clone());

    let text = match name {
        "check" => render::check(&report),
        "sets" => render::sets(&report),
        "classify" => render::classify(&report),
        "region" => render::region(&report),
        _ => render::oracle(&report),
    };
    write!(stdout, "{text}{}", render::expectations(&outcomes))?;

    if let Some(path) = &common.out {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let body = match (name, ext) {
            ("region", "csv") => match regions.as_slice() {
                [(_, v)] => region_out::csv(v),
                _ => bail!("CSV output holds one region; pass a single --which"),
            },
            ("region", "svg") => region_out::svg(&regions),
            _ => format!("{}\n", serde_json::to_string_pretty(&report)?),
        };
        std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }

    if let (Some(want), Some(key)) = (common.expect, headline_key) {
        let got = expect::lookup(&report, key).and_then(Value::as_bool);
        if got != Some(want == YesNo::Yes) {
            writeln!(stdout, "expectation failed: {key} is {}", got.map_or("missing", commands::yes_no))?;
            return Ok(EXIT_MISMATCH);
        }
    }
    Ok(EXIT_OK)
}
