//! `--config` files: `key = value` lines that stand in for `--key value`.
//! Blank lines and `#` comments are ignored. Keys already given on the
//! command line are skipped, so flags take precedence.

use std::ffi::OsString;
use std::path::Path;

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn has_flag(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    let prefixed = format!("--{key}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&prefixed)
    })
}

/// Appends config entries as flags. Returns the error text for an unreadable
/// or malformed file.
pub fn merge_config(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (key, value) in parse_config(&text)? {
        if key == "config" || has_flag(&args, &key) {
            continue;
        }
        args.push(format!("--{key}").into());
        args.push(value.into());
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_lines() {
        let kv = parse_config("# comment\nseed = 7\n\n--samples=100\n").unwrap();
        assert_eq!(kv, vec![("seed".into(), "7".into()), ("samples".into(), "100".into())]);
        assert!(parse_config("novalue").is_err());
    }

    #[test]
    fn flags_take_precedence() {
        let dir = std::env::temp_dir().join(format!("mvfrac-config-{}", std::process::id()));
        std::fs::write(&dir, "seed=7\nsamples=100\n").unwrap();
        let args = os(&["mvfrac", "verify", "--suite", "beta", "--seed", "9", "--config"]);
        let mut args = args;
        args.push(dir.clone().into());
        let merged = merge_config(args).unwrap();
        let text: Vec<String> = merged.iter().map(|s| s.to_string_lossy().into_owned()).collect();
        assert_eq!(text.iter().filter(|s| *s == "--seed").count(), 1);
        assert!(text.ends_with(&["--samples".to_string(), "100".to_string()]));
        std::fs::remove_file(dir).ok();
    }
}
