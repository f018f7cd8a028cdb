use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::Path;

use super::CliError;

/// Output format of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Parses one `key=value` right-hand side: JSON literals (numbers, booleans, arrays, quoted
/// strings) are taken as such, anything else as a bare string.
fn parse_scalar(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

/// Reads a configuration file into a flat key map.
///
/// Accepted forms: a JSON object; a JSON output of this tool (its `config` member is used); a CSV
/// output of this tool (its `# config:` header line is used); or flat `key = value` lines, where
/// blank lines and lines starting with `#` are ignored.
pub fn read_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<Map<String, Value>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))?;
        let Value::Object(mut map) = v else { unreachable!() };
        if map.contains_key("version") {
            if let Some(Value::Object(inner)) = map.remove("config") {
                return Ok(normalize_map(inner));
            }
        }
        return Ok(normalize_map(map));
    }
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config: ")) {
        let v: Value = serde_json::from_str(line).map_err(|e| CliError::Config(format!("invalid echoed config: {e}")))?;
        if let Value::Object(map) = v {
            return Ok(normalize_map(map));
        }
        return Err(CliError::Config("echoed config is not an object".into()));
    }
    let mut map = Map::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key=value, got {line:?}", i + 1)))?;
        map.insert(normalize_key(k), parse_scalar(v.trim()));
    }
    Ok(map)
}

fn normalize_map(map: Map<String, Value>) -> Map<String, Value> {
    map.into_iter().map(|(k, v)| (normalize_key(&k), v)).collect()
}

/// Flags given on the command line, as a key map (unset flags are dropped).
pub fn flags_to_map<A: Serialize>(args: &A) -> Result<Map<String, Value>, CliError> {
    match serde_json::to_value(args).map_err(|e| CliError::Config(e.to_string()))? {
        Value::Object(m) => Ok(m.into_iter().filter(|(_, v)| !v.is_null()).collect()),
        _ => Err(CliError::Config("flags did not serialise to an object".into())),
    }
}

/// Effective configuration: defaults, overridden by the config file, overridden by flags.
pub fn resolve<C: DeserializeOwned, A: Serialize>(file: Option<&Path>, flags: &A) -> Result<C, CliError> {
    let mut map = match file {
        Some(p) => read_config_file(p)?,
        None => Map::new(),
    };
    map.extend(flags_to_map(flags)?);
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
}
