//! Expectation files: one check per line,
//!
//! ```text
//! enumerate --index 6 --emit count => 56
//! erratum[16-cell degree] belyi verify maps/sixteen_cell.map => {"verdict": "pass"}
//! ```
//!
//! The right-hand side is a JSON fragment that must be contained in the
//! command's output. `erratum[...]` lines carry a printed value known to
//! disagree with the computation; they are listed informationally and never
//! fail the run. Paths are relative to the expectation file.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde_json::Value;

use crate::cli::{Cli, Command};
use crate::commands::{run, CliError, Ctx, Status};

const FLOAT_TOL: f64 = 1e-9;

struct Check {
    line: usize,
    erratum: Option<String>,
    command: String,
    args: Vec<String>,
    expected: Value,
}

fn parse_checks(text: &str) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| CliError(format!("line {line}: {msg}"));
        let (lhs, rhs) = content.split_once("=>").ok_or_else(|| bad("expected `command => fragment`"))?;
        let mut lhs = lhs.trim();
        let mut erratum = None;
        if let Some(rest) = lhs.strip_prefix("erratum[") {
            let (label, tail) = rest.split_once(']').ok_or_else(|| bad("unclosed erratum["))?;
            erratum = Some(label.trim().to_string());
            lhs = tail.trim();
        }
        let args = shlex::split(lhs).ok_or_else(|| bad("unbalanced quotes"))?;
        if args.is_empty() {
            return Err(bad("empty command"));
        }
        let expected: Value = serde_json::from_str(rhs.trim()).map_err(|e| bad(&format!("fragment is not JSON: {e}")))?;
        checks.push(Check {
            line,
            erratum,
            command: lhs.to_string(),
            args,
            expected,
        });
    }
    Ok(checks)
}

fn numbers_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Objects match on the expected keys only; arrays element-wise.
pub fn contains(actual: &Value, expected: &Value) -> bool {
    match (actual, expected) {
        (Value::Object(a), Value::Object(e)) => e.iter().all(|(k, ev)| a.get(k).is_some_and(|av| contains(av, ev))),
        (Value::Array(a), Value::Array(e)) => a.len() == e.len() && a.iter().zip(e).all(|(x, y)| contains(x, y)),
        (Value::Number(a), Value::Number(e)) => match (a.as_f64(), e.as_f64()) {
            (Some(x), Some(y)) => numbers_close(x, y),
            _ => a == e,
        },
        _ => actual == expected,
    }
}

/// The parts of `actual` the fragment talks about, for messages.
fn project(actual: &Value, expected: &Value) -> Value {
    match (actual, expected) {
        (Value::Object(a), Value::Object(e)) => Value::Object(
            e.iter()
                .map(|(k, ev)| (k.clone(), a.get(k).map_or(Value::Null, |av| project(av, ev))))
                .collect(),
        ),
        _ => actual.clone(),
    }
}

/// Each output line parsed as JSON; a whole-output string otherwise.
fn parse_output(bytes: &[u8]) -> Vec<Value> {
    let text = String::from_utf8_lossy(bytes);
    let parsed: Option<Vec<Value>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).ok())
        .collect();
    parsed.unwrap_or_else(|| vec![Value::String(text.trim().to_string())])
}

enum Outcome {
    Match,
    Differs(String),
    Error(String),
}

/// Output of one command; repeated commands run once.
type Cache = HashMap<Vec<String>, Result<Vec<Value>, String>>;

fn execute(args: &[String], ctx: &Ctx) -> Result<Vec<Value>, String> {
    let argv = std::iter::once("dessins".to_string()).chain(args.iter().cloned());
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| format!("usage error: {}", e.to_string().lines().next().unwrap_or("")))?;
    if matches!(cli.command, Command::Expect { .. }) {
        return Err("nested expect is not supported".into());
    }
    let mut buf = Vec::new();
    run(cli.command, ctx, &mut buf).map_err(|e| e.0)?;
    Ok(parse_output(&buf))
}

/// Output lines agreeing with the fragment's string-valued keys, such as a name.
fn relevant<'a>(values: &'a [Value], expected: &Value) -> Vec<&'a Value> {
    let Value::Object(e) = expected else {
        return values.iter().collect();
    };
    let keys: Vec<(&String, &Value)> = e.iter().filter(|(_, v)| v.is_string()).collect();
    let hits: Vec<&Value> = values
        .iter()
        .filter(|v| !keys.is_empty() && keys.iter().all(|(k, ev)| v.get(k.as_str()) == Some(ev)))
        .collect();
    if hits.is_empty() {
        values.iter().collect()
    } else {
        hits
    }
}

fn evaluate(check: &Check, ctx: &Ctx, cache: &mut Cache) -> Outcome {
    let result = cache.entry(check.args.clone()).or_insert_with(|| execute(&check.args, ctx));
    let values = match result {
        Ok(v) => v,
        Err(msg) => return Outcome::Error(msg.clone()),
    };
    if values.iter().any(|v| contains(v, &check.expected)) {
        return Outcome::Match;
    }
    let shown = relevant(values, &check.expected);
    let text: Vec<String> = shown.iter().take(3).map(|v| project(v, &check.expected).to_string()).collect();
    let more = if shown.len() > 3 { format!(" (+{} more lines)", shown.len() - 3) } else { String::new() };
    Outcome::Differs(format!("{}{more}", text.join(" | ")))
}

pub fn run_file(path: &Path, out: &mut dyn Write) -> Result<Status, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))?;
    let checks = parse_checks(&text).map_err(|e| CliError(format!("{}: {}", path.display(), e.0)))?;
    if checks.is_empty() {
        eprintln!("warning: {} contains no expectations; zero checks run", path.display());
        writeln!(out, "0 checks, 0 deviations, 0 paper discrepancies")?;
        return Ok(Status::Success);
    }
    let ctx = Ctx {
        base: path.parent().map(Path::to_path_buf),
    };
    let mut deviations = 0;
    let mut notes = Vec::new();
    let mut cache = Cache::new();
    for c in &checks {
        let outcome = evaluate(c, &ctx, &mut cache);
        match (&c.erratum, outcome) {
            (None, Outcome::Match) => writeln!(out, "ok         line {}: {}", c.line, c.command)?,
            (None, Outcome::Differs(got)) => {
                deviations += 1;
                writeln!(out, "DEVIATION  line {}: {}\n           expected {}\n           got      {got}", c.line, c.command, c.expected)?;
            }
            (_, Outcome::Error(msg)) => {
                deviations += 1;
                writeln!(out, "ERROR      line {}: {}\n           {msg}", c.line, c.command)?;
            }
            (Some(label), Outcome::Differs(got)) => {
                notes.push(format!("  {label} (line {}): printed {}, computed {got}", c.line, c.expected));
            }
            (Some(label), Outcome::Match) => {
                notes.push(format!("  {label} (line {}): printed value {} is reproduced after all", c.line, c.expected));
            }
        }
    }
    if !notes.is_empty() {
        writeln!(out, "paper-discrepancy:")?;
        for n in &notes {
            writeln!(out, "{n}")?;
        }
    }
    writeln!(out, "{} checks, {deviations} deviations, {} paper discrepancies", checks.len(), notes.len())?;
    Ok(if deviations == 0 { Status::Success } else { Status::VerificationFailed })
}
