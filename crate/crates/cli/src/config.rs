//! `--config FILE` handling: `key = value` lines become `--key value` tokens
//! placed right after the subcommand, so flags given on the command line win.

use std::fs;

use qho_lg::{Error, Result};

/// Parses a config file body. Blank lines and `#` comments are skipped.
pub fn config_tokens(body: &str, path: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (k, raw) in body.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("{path}:{}: expected key=value, got {line:?}", k + 1))
        })?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(Error::InvalidInput(format!("{path}:{}: empty key", k + 1)));
        }
        let value = value.trim();
        // bare switches: `refine = true`
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}

/// Removes `--config PATH` / `--config=PATH` from argv and splices the file's
/// tokens in after the subcommand name.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(
                it.next()
                    .ok_or_else(|| Error::InvalidInput("--config needs a path".into()))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let body = fs::read_to_string(&path).map_err(|e| Error::Io {
        path: path.clone(),
        message: e.to_string(),
    })?;
    let tokens = config_tokens(&body, &path)?;
    // argv[0] is the program; the first non-flag token after it is the subcommand
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(rest.len());
    let mut out = rest[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&rest[at..]);
    Ok(out)
}
