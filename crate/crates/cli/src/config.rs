//! Flat TOML config files. Each key names a long flag of the chosen
//! subcommand (`lambda_min` or `lambda-min`); values become flags appended to
//! the command line unless that flag is already given.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context};

/// Returns `args` with flags from the `--config` file appended.
pub fn inject(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = text
        .parse()
        .with_context(|| format!("parsing config {}", path.display()))?;
    let mut out = args;
    let extra = flags_from_table(&table, &out)?;
    out.extend(extra);
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<std::path::PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return iter.next().map(|p| Path::new(p).to_path_buf());
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(Path::new(p).to_path_buf());
        }
    }
    None
}

fn flags_from_table(table: &toml::Table, present: &[OsString]) -> anyhow::Result<Vec<OsString>> {
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" {
            bail!("config files cannot name another config file");
        }
        let given = present.iter().any(|a| {
            let s = a.to_string_lossy();
            s == flag || s.starts_with(&format!("{flag}="))
        });
        if given {
            continue;
        }
        match value {
            toml::Value::Boolean(true) => flags.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                for item in items {
                    flags.push(format!("{flag}={}", scalar(key, item)?).into());
                }
            }
            other => flags.push(format!("{flag}={}", scalar(key, other)?).into()),
        }
    }
    Ok(flags)
}

fn scalar(key: &str, value: &toml::Value) -> anyhow::Result<String> {
    Ok(match value {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        _ => bail!("config key {key:?} must hold a string, number, boolean or array of those"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(args: &[&str]) -> Vec<OsString> {
        args.iter().map(OsString::from).collect()
    }

    #[test]
    fn file_values_fill_missing_flags_only() {
        let table: toml::Table = "h = 0.02\nlambda = -1.8\nclip = true\nshared_block = false\nnoise = [\"none\", \"gaussian:0.01\"]"
            .parse()
            .unwrap();
        let present = os(&["zerostab", "integrate", "--h", "0.05"]);
        let flags: Vec<String> = flags_from_table(&table, &present)
            .unwrap()
            .into_iter()
            .map(|f| f.into_string().unwrap())
            .collect();
        let mut expected = vec!["--lambda=-1.8", "--clip", "--noise=none", "--noise=gaussian:0.01"];
        let mut flags = flags;
        flags.sort();
        expected.sort();
        assert_eq!(flags, expected);
    }

    #[test]
    fn config_flag_forms() {
        assert_eq!(config_path(&os(&["z", "analyze", "--config", "a.toml"])).unwrap(), Path::new("a.toml"));
        assert_eq!(config_path(&os(&["z", "--config=b.toml", "analyze"])).unwrap(), Path::new("b.toml"));
        assert!(config_path(&os(&["z", "analyze"])).is_none());
    }

    #[test]
    fn nested_tables_are_rejected() {
        let table: toml::Table = "[section]\nx = 1".parse().unwrap();
        assert!(flags_from_table(&table, &[]).is_err());
    }
}
