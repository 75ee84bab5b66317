//! Flat TOML configuration, spliced into the command line as long flags.
//!
//! Top-level keys apply to every subcommand; a `[name]` section applies to
//! subcommand `name` only. Keys are flag names (`n-max` or `n_max`); arrays
//! become comma lists and `true` becomes a bare switch. Flags given on the
//! command line win over the file.

use anyhow::{bail, Context, Result};
use toml::Value;

fn line_of(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map_or(0, |i| i + 1)
}

fn scalar(v: &Value) -> Option<String> {
    Some(match v {
        Value::String(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Float(f) => f.to_string(),
        _ => return None,
    })
}

fn push_flag(out: &mut Vec<String>, text: &str, key: &str, v: &Value) -> Result<()> {
    let flag = format!("--{}", key.replace('_', "-"));
    match v {
        Value::Boolean(true) => out.push(flag),
        Value::Boolean(false) => {}
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(scalar)
                .collect::<Option<Vec<_>>>()
                .with_context(|| format!("line {}: `{key}` must be a flat array", line_of(text, key)))?;
            out.push(flag);
            out.push(parts.join(","));
        }
        other => match scalar(other) {
            Some(s) => {
                out.push(flag);
                out.push(s);
            }
            None => bail!("line {}: unsupported value for `{key}`", line_of(text, key)),
        },
    }
    Ok(())
}

/// Flags from `text` for subcommand `sub`, global keys first.
pub fn flags_for(text: &str, sub: &str) -> Result<Vec<String>> {
    let table: toml::Table = text.parse().context("config parse error")?;
    let mut out = Vec::new();
    for (k, v) in &table {
        if k == "config" {
            bail!("line {}: `config` cannot be set from a config file", line_of(text, k));
        }
        if !v.is_table() {
            push_flag(&mut out, text, k, v)?;
        }
    }
    if let Some(section) = table.get(sub) {
        let section = section.as_table().expect("section is a table");
        for (k, v) in section {
            if v.is_table() {
                bail!("line {}: nested section `{sub}.{k}` is not supported", line_of(text, k));
            }
            push_flag(&mut out, text, k, v)?;
        }
    }
    Ok(out)
}

/// Line of `flag` (as a config key) for error messages, if it came from the file.
pub fn source_line(text: &str, flag: &str) -> Option<usize> {
    let key = flag.trim_start_matches("--");
    [key.to_string(), key.replace('-', "_")]
        .iter()
        .map(|k| line_of(text, k))
        .find(|&l| l > 0)
}
