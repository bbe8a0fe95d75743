//! Config files: TOML with one table per subcommand, keys named like the
//! long flags.
//!
//! ```toml
//! [box-spectrum]
//! sides = [1.0, 1.0]
//! height = 2.0
//! family = "dirichlet"
//! K = 10
//! ```

use crate::error::{Error, Result};
use clap::Command;
use std::ffi::OsString;
use toml::Value;

fn render(key: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        Value::Boolean(b) => Ok(b.to_string()),
        Value::Array(items) => items
            .iter()
            .map(|x| match x {
                Value::Array(_) | Value::Table(_) => {
                    Err(Error::Config(format!("key '{key}': nested arrays are not supported")))
                }
                other => render(key, other),
            })
            .collect::<Result<Vec<_>>>()
            .map(|v| v.join(",")),
        other => Err(Error::Config(format!(
            "key '{key}': unsupported value {other}"
        ))),
    }
}

/// Flag tokens for `subcommand` from config text, validated against the
/// subcommand's arguments.
pub fn flags_from_config(text: &str, cmd: &Command, subcommand: &str) -> Result<Vec<OsString>> {
    let doc: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(format!("config file is not valid TOML: {e}")))?;
    for name in doc.keys() {
        if cmd.find_subcommand(name).is_none() {
            return Err(Error::Config(format!("unknown section [{name}] in config file")));
        }
    }
    let Some(section) = doc.get(subcommand) else {
        return Ok(Vec::new());
    };
    let section = section
        .as_table()
        .ok_or_else(|| Error::Config(format!("[{subcommand}] must be a table")))?;
    let sub = cmd
        .find_subcommand(subcommand)
        .expect("subcommand resolved by the parser");

    let mut out = Vec::new();
    for (key, value) in section {
        let arg = sub
            .get_arguments()
            .find(|a| {
                a.get_long() == Some(key.as_str())
                    || (key.chars().count() == 1 && a.get_short() == key.chars().next())
            })
            .filter(|a| a.get_id() != "config")
            .ok_or_else(|| {
                Error::Config(format!("unknown key '{key}' in [{subcommand}]"))
            })?;
        let flag = match arg.get_long() {
            Some(long) => format!("--{long}"),
            None => format!("-{}", arg.get_short().expect("argument has a name")),
        };
        out.push(OsString::from(flag));
        out.push(OsString::from(render(key, value)?));
    }
    Ok(out)
}
