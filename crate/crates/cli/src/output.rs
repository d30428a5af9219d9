//! Report emission: versioned JSON, or a flat CSV projection of sweeps.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use gapforge::sweep::{SweepReport, REPORT_SCHEMA};
use serde_json::{Map, Value};

/// Wraps a command payload with the schema tag, command name and verdict.
pub fn envelope(command: &str, pass: bool, payload: Value) -> Value {
    let mut root = Map::new();
    root.insert("schema".into(), REPORT_SCHEMA.into());
    root.insert("command".into(), command.into());
    root.insert("pass".into(), pass.into());
    if let Value::Object(fields) = payload {
        root.extend(fields);
    } else {
        root.insert("result".into(), payload);
    }
    Value::Object(root)
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn write_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(out, &text)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One row per trial: `suite, seed, index, status, note`, then every metric
/// key seen in any trial, in sorted order.
pub fn sweep_csv(reports: &[SweepReport]) -> Result<String> {
    let keys: BTreeSet<String> = reports
        .iter()
        .flat_map(|r| &r.records)
        .filter_map(|t| t.metrics.as_object())
        .flat_map(|m| m.keys().cloned())
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["suite".to_string(), "seed".into(), "index".into(), "status".into(), "note".into()];
    header.extend(keys.iter().cloned());
    w.write_record(&header)?;
    for rep in reports {
        for t in &rep.records {
            let status = serde_json::to_value(t.status)?;
            let mut row = vec![
                rep.suite.to_string(),
                rep.seed.to_string(),
                t.index.to_string(),
                cell(&status),
                t.note.clone().unwrap_or_default(),
            ];
            row.extend(keys.iter().map(|k| t.metrics.get(k).map(cell).unwrap_or_default()));
            w.write_record(&row)?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
