//! Run configs: TOML or JSON documents with a top-level `command` field.
//! Every other key becomes a `--key value` flag of that subcommand
//! (underscores read as hyphens, arrays repeat the flag, `true` is a bare
//! switch).

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::{spaces, CliError};

/// Keys whose values are inputs that must exist when they are not
/// generator specs.
const PATH_KEYS: [&str; 5] = ["in", "a", "b", "component", "ambient"];

pub fn to_args(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let doc: Value = if is_json {
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))?
    } else {
        let t: toml::Table = toml::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        serde_json::to_value(t).map_err(|e| CliError::Validation(format!("config: {e}")))?
    };
    let table = doc
        .as_object()
        .ok_or_else(|| CliError::Validation("config: top level must be a table".into()))?;
    let command = table
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::Validation("config: missing string field `command`".into()))?;
    let mut args = vec![command.to_string()];
    for (key, value) in table {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let values = match value {
            Value::Array(items) => items.clone(),
            other => vec![other.clone()],
        };
        for v in values {
            let text = match v {
                Value::Bool(true) => {
                    args.push(flag.clone());
                    continue;
                }
                Value::Bool(false) | Value::Null => continue,
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                other => return Err(CliError::Validation(format!("config: `{key}` has unsupported value {other}"))),
            };
            if PATH_KEYS.contains(&key.as_str()) && !spaces::is_generator(&text) && !Path::new(&text).exists() {
                return Err(CliError::Validation(format!("config: `{key}` path {text:?} does not exist")));
            }
            if key.contains("tol") && !text.parse::<f64>().is_ok_and(|v| v > 0.0) {
                return Err(CliError::Validation(format!("config: `{key}` must be positive, got {text}")));
            }
            args.push(flag.clone());
            args.push(text);
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_config_becomes_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.toml");
        fs::write(&p, "command = \"dim\"\nin = \"cantor:6\"\nmethod = \"covering\"\nrho_min = 4.0\n").unwrap();
        let args = to_args(&p).unwrap();
        assert_eq!(args[0], "dim");
        assert!(args.windows(2).any(|w| w == ["--rho-min", "4.0"]));
        assert!(args.windows(2).any(|w| w == ["--in", "cantor:6"]));
    }

    #[test]
    fn missing_paths_and_bad_tolerances() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        fs::write(&p, r#"{"command": "validate", "in": "nowhere.json"}"#).unwrap();
        assert!(matches!(to_args(&p), Err(CliError::Validation(m)) if m.contains("`in`")));
        fs::write(&p, r#"{"command": "validate", "in": "cantor:2", "tol": -1}"#).unwrap();
        assert!(matches!(to_args(&p), Err(CliError::Validation(m)) if m.contains("`tol`")));
        fs::write(&p, r#"{"in": "cantor:2"}"#).unwrap();
        assert!(to_args(&p).is_err());
    }
}
