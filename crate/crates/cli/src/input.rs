//! Parsing of set arguments: a file path or an inline list, holding either a
//! JSON array (of strings or integers) or newline/comma separated rationals.

use std::path::Path;

use anyhow::{bail, Context, Result};
use gapforge::Rat;
use serde_json::Value;

/// Reads a set from a file if `arg` names one, else parses `arg` itself.
pub fn read_set(arg: &str) -> Result<Vec<Rat>> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    } else {
        arg.to_string()
    };
    parse_set(&text)
}

pub fn parse_set(text: &str) -> Result<Vec<Rat>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(trimmed).context("malformed JSON set")?;
        return items
            .iter()
            .map(|v| match v {
                Value::String(s) => s.parse::<Rat>().map_err(Into::into),
                Value::Number(n) if n.is_i64() => Ok(Rat::from(n.as_i64().expect("checked"))),
                other => bail!("set elements must be strings or integers, got {other}"),
            })
            .collect();
    }
    trimmed
        .split(['\n', ','])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Rat>().with_context(|| format!("bad element `{s}`")))
        .collect()
}

/// Converts a set of rationals to integers if every element is integral.
pub fn as_integers(set: &[Rat]) -> Option<Vec<i64>> {
    set.iter().map(|x| if x.is_integer() { i64::try_from(x.numer()).ok() } else { None }).collect()
}

/// Alphabet argument: a size `m` meaning `{1, ..., m}`, or a list.
pub fn read_alphabet(arg: &str) -> Result<Vec<i64>> {
    if let Ok(m) = arg.trim().parse::<i64>() {
        if m < 1 {
            bail!("alphabet size must be positive");
        }
        return Ok((1..=m).collect());
    }
    as_integers(&read_set(arg)?).context("alphabet symbols must be integers")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let want: Vec<Rat> = ["1/2", "3", "-5/7"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(parse_set("1/2\n3\n-5/7\n").unwrap(), want);
        assert_eq!(parse_set("1/2, 3, -5/7").unwrap(), want);
        assert_eq!(parse_set(r#"["1/2", 3, "-5/7"]"#).unwrap(), want);
        assert!(parse_set("[1.5]").is_err());
        assert!(parse_set("1/0").is_err());
    }

    #[test]
    fn integers_and_alphabets() {
        assert_eq!(as_integers(&parse_set("1,2,4").unwrap()), Some(vec![1, 2, 4]));
        assert_eq!(as_integers(&parse_set("1/2").unwrap()), None);
        assert_eq!(read_alphabet("3").unwrap(), vec![1, 2, 3]);
        assert_eq!(read_alphabet("2,7,9").unwrap(), vec![2, 7, 9]);
        assert!(read_alphabet("0").is_err());
    }
}
