//! Flat `key = value` config files.
//!
//! Every key is a long flag name without the leading dashes. Entries are
//! appended after the command-line arguments, and since each subcommand lets
//! a later occurrence of a flag replace an earlier one, the file wins.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Parses config text into `--key value` argument pairs.
pub fn parse(text: &str, origin: &Path) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| format!("{}:{}: expected 'key = value'", origin.display(), i + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(format!("{}:{}: bad key '{}'", origin.display(), i + 1, key));
        }
        if matches!(key.as_str(), "config" | "dump-config" | "out") {
            return Err(format!("{}:{}: '{key}' cannot be set from a config file", origin.display(), i + 1));
        }
        args.push(format!("--{key}"));
        args.push(value.trim().to_string());
    }
    Ok(args)
}

/// Appends the entries of any `--config <file>` to `argv`.
pub fn expand(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    if let Some(p) = path {
        let p = Path::new(&p);
        let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
        argv.extend(parse(&text, p)?);
    }
    Ok(argv)
}

/// Flag name to value text for every set parameter, in key order.
pub fn entries<T: Serialize>(args: &T) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let Ok(Value::Object(map)) = serde_json::to_value(args) else {
        return out;
    };
    for (k, v) in map {
        let text = match v {
            Value::Null => continue,
            Value::Array(items) if items.is_empty() => continue,
            Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
            other => scalar(&other),
        };
        out.insert(k, text);
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Config text that reproduces `args` when passed back through `--config`.
pub fn render(entries: &BTreeMap<String, String>) -> String {
    entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
