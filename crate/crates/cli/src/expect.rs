//! Evaluates the `expect:` claims of a game file against fresh reports.
//!
//! A claim's selector is the command, then its positional name (the
//! distribution, or the region for `region`), then optional `option:value`
//! tokens (`threats:`, `mode:`, `alt_r:`). Options not mentioned take their
//! defaults.

use anyhow::{bail, Result};
use serde_json::Value;

use crate::commands::{self, mode_from_name, mode_name, Options, RegionKind};
use crate::gamefile::{Expectation, GameFile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Agrees,
    Differs,
    /// Marked `~` in the file and indeed different.
    DocumentedDivergence,
    /// Marked `~` but the values match after all.
    DivergenceNotObserved,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Agrees => "agrees",
            Status::Differs => "differs",
            Status::DocumentedDivergence => "documented divergence",
            Status::DivergenceNotObserved => "divergence not observed",
        }
    }

    /// Only an unmarked claim that fails counts as a failure.
    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Differs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub expectation: Expectation,
    pub actual: String,
    pub status: Status,
}

/// Command name and options a claim refers to.
pub fn selector_options(e: &Expectation) -> Result<(String, Options)> {
    let mut words = e.selector.iter();
    let command = words.next().cloned().unwrap_or_default();
    let mut opts = Options::default();
    let mut positional_done = !matches!(command.as_str(), "check" | "classify" | "oracle" | "region");
    for w in words {
        if let Some((k, v)) = w.split_once(':') {
            match k {
                "threats" => opts.threats = v.to_string(),
                "mode" => match mode_from_name(v) {
                    Some(m) => opts.mode = m,
                    None => bail!("line {}: unknown mode {v:?}", e.line),
                },
                "alt_r" => opts.alt_r = v == "yes",
                "seed" => opts.seed = v.parse()?,
                "samples" => opts.samples = v.parse()?,
                _ => bail!("line {}: unknown option {k:?}", e.line),
            }
        } else if !positional_done {
            positional_done = true;
            if command == "region" {
                match RegionKind::from_name(w) {
                    Some(k) => opts.regions = vec![k],
                    None => bail!("line {}: unknown region {w:?}", e.line),
                }
            } else {
                opts.dist = Some(w.clone());
            }
        } else {
            bail!("line {}: unexpected selector word {w:?}", e.line);
        }
    }
    Ok((command, opts))
}

/// Whether a claim is about the run described by `command` and `opts`.
pub fn applies(e: &Expectation, command: &str, opts: &Options, dist: Option<&str>) -> bool {
    let Ok((c, o)) = selector_options(e) else {
        return false;
    };
    if c != command || o.threats != opts.threats || o.mode != opts.mode || o.alt_r != opts.alt_r {
        return false;
    }
    match command {
        "region" => o.regions.len() == 1 && opts.regions.contains(&o.regions[0]),
        "check" | "classify" | "oracle" => o.dist.as_deref() == dist,
        _ => true,
    }
}

/// Canonical text of a report value: booleans as yes/no, arrays joined by
/// spaces.
pub fn render(v: &Value) -> String {
    match v {
        Value::Bool(b) => commands::yes_no(*b).into(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Null => "null".into(),
        Value::Array(items) => items.iter().map(render).collect::<Vec<_>>().join(" "),
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}={}", render(v)))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

pub fn lookup<'a>(report: &'a Value, key: &str) -> Option<&'a Value> {
    key.split('.').try_fold(report, |v, part| match v {
        Value::Array(items) => part.parse::<usize>().ok().and_then(|k| items.get(k)),
        _ => v.get(part),
    })
}

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn judge(e: &Expectation, report: &Value) -> Outcome {
    let actual = lookup(report, &e.key).map_or_else(|| "<missing>".to_string(), render);
    let same = normalize(&actual) == normalize(&e.value);
    let status = match (e.divergent, same) {
        (false, true) => Status::Agrees,
        (false, false) => Status::Differs,
        (true, false) => Status::DocumentedDivergence,
        (true, true) => Status::DivergenceNotObserved,
    };
    Outcome {
        expectation: e.clone(),
        actual,
        status,
    }
}

/// Claims that apply to this run, judged against its report.
pub fn for_report(game: &GameFile, command: &str, opts: &Options, dist: Option<&str>, report: &Value) -> Vec<Outcome> {
    game.expectations
        .iter()
        .filter(|e| applies(e, command, opts, dist))
        .map(|e| judge(e, scope(e, report)))
        .collect()
}

/// Region claims read the entry of their own region, so they also hold in
/// overlay reports.
fn scope<'a>(e: &Expectation, report: &'a Value) -> &'a Value {
    match (e.selector.first().map(String::as_str), e.selector.get(1)) {
        (Some("region"), Some(which)) => report["regions"].get(which.as_str()).unwrap_or(report),
        _ => report,
    }
}

pub fn run_command(game: &GameFile, command: &str, opts: &Options) -> Result<Value> {
    match command {
        "check" => commands::check(game, opts),
        "sets" => commands::sets(game, opts),
        "classify" => commands::classify(game, opts),
        "region" => Ok(commands::region(game, opts)?.0),
        "oracle" => commands::oracle(game, opts),
        other => bail!("unknown command {other:?}"),
    }
}

/// Runs every claim in the file, sharing reports between claims with the
/// same selector.
pub fn evaluate_all(game: &GameFile) -> Result<Vec<Outcome>> {
    let mut cache: Vec<(String, Options, Value)> = Vec::new();
    let mut out = Vec::new();
    for e in &game.expectations {
        let (command, opts) = selector_options(e)?;
        let report = match cache.iter().find(|(c, o, _)| *c == command && *o == opts) {
            Some((_, _, r)) => r.clone(),
            None => {
                let r = run_command(game, &command, &opts)?;
                cache.push((command.clone(), opts.clone(), r.clone()));
                r
            }
        };
        out.push(judge(e, scope(e, &report)));
    }
    Ok(out)
}

pub fn outcome_json(o: &Outcome) -> Value {
    serde_json::json!({
        "line": o.expectation.line,
        "claim": format!("{} {}", o.expectation.selector.join(" "), o.expectation.key),
        "relation": if o.expectation.divergent { "~" } else { "=" },
        "stated": o.expectation.value,
        "actual": o.actual,
        "status": o.status.name(),
    })
}

pub fn describe_options(opts: &Options) -> String {
    format!("threats:{} mode:{} alt_r:{}", opts.threats, mode_name(opts.mode), commands::yes_no(opts.alt_r))
}
