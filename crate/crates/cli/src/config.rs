//! `key=value` config files. Each key names a long flag of the chosen
//! subcommand; the pairs are spliced in ahead of the command line, and
//! since every flag overrides itself the explicit flags win.

use std::fs;

use topexp::{Error, Result};

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::invalid(format!("config line {}: expected key=value", no + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() || k == "config" {
            return Err(Error::invalid(format!("config line {}: bad key {k:?}", no + 1)));
        }
        out.push((k, v.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}

/// Rewrites `argv` so that the config named by `--config` comes right after
/// the subcommand. Boolean keys take `true`/`false`.
pub fn splice_config(argv: Vec<String>) -> Result<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let (path, consumed) = match argv[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => (argv.get(pos + 1).cloned().ok_or_else(|| Error::invalid("--config needs a path"))?, 2),
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::invalid(format!("cannot read config {path}: {e}")))?;
    let mut injected = vec![format!("--config={path}")];
    for (k, v) in parse_config(&text)? {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    let mut rest: Vec<String> = argv.into_iter().enumerate().filter(|(i, _)| *i < pos || *i >= pos + consumed).map(|(_, a)| a).collect();
    // argv[0] is the binary and argv[1] the subcommand
    let at = rest.len().min(2);
    let tail = rest.split_off(at);
    rest.extend(injected);
    rest.extend(tail);
    Ok(rest)
}
