//! Run configuration: a flat JSON file overlaid by command-line flags.
//!
//! Keys are the long flag names in snake case (`--gamma-amp` is `gamma_amp`).
//! Flags win over the file; unknown keys are rejected before any work starts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use randattr::wiener::NoiseSeed;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::exit::Failure;

/// A noise path choice: `"zero"` or a seed, written as a JSON number or
/// string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub NoiseSeed);

impl FromStr for Seed {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NoiseSeed::parse(s).map(Seed).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            NoiseSeed::Seed(n) => s.serialize_u64(n),
            NoiseSeed::Zero => s.serialize_str("zero"),
        }
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Seed(NoiseSeed::Seed(n))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Keys shared by every command.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Common {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<Seed>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

const COMMON_KEYS: [&str; 4] = ["seed", "jobs", "out", "tol"];

pub const DEFAULT_OUT: &str = "randattr-out";

impl Common {
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn seed_or(&self, default: NoiseSeed) -> NoiseSeed {
        self.seed.map(|s| s.0).unwrap_or(default)
    }

    /// The tolerance override, validated.
    pub fn tol(&self) -> Result<Option<f64>, Failure> {
        match self.tol {
            Some(t) if !(t > 0.0 && t.is_finite()) => Err(Failure::config(format!("`tol` must be positive, got {t}"))),
            t => Ok(t),
        }
    }
}

/// A resolved configuration: shared keys plus the command's own parameters.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved<P> {
    #[serde(flatten)]
    pub common: Common,
    #[serde(flatten)]
    pub params: P,
}

fn read_file(path: &Path) -> Result<Map<String, Value>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Failure::config(format!("config {} must be a JSON object", path.display()))),
        Err(e) => Err(Failure::config(format!("config {}: {e}", path.display()))),
    }
}

fn overlay(map: &mut Map<String, Value>, flags: &impl Serialize) -> Result<(), Failure> {
    match serde_json::to_value(flags) {
        Ok(Value::Object(m)) => {
            map.extend(m.into_iter().filter(|(_, v)| !v.is_null()));
            Ok(())
        }
        Ok(_) => Ok(()),
        Err(e) => Err(Failure::config(e.to_string())),
    }
}

/// Merges the config file (if any), the shared flags and the command flags,
/// then deserializes the command parameters. `P` must reject unknown keys.
pub fn resolve<P: DeserializeOwned>(
    file: Option<&Path>,
    common_flags: &Common,
    command_flags: &impl Serialize,
) -> Result<Resolved<P>, Failure> {
    let mut map = match file {
        Some(p) => read_file(p)?,
        None => Map::new(),
    };
    overlay(&mut map, common_flags)?;
    overlay(&mut map, command_flags)?;

    let mut shared = Map::new();
    for key in COMMON_KEYS {
        if let Some(v) = map.remove(key) {
            shared.insert(key.to_string(), v);
        }
    }
    let common: Common = serde_json::from_value(Value::Object(shared)).map_err(|e| Failure::config(format!("config: {e}")))?;
    let params: P = serde_json::from_value(Value::Object(map)).map_err(|e| Failure::config(format!("config: {e}")))?;
    common.tol()?;
    Ok(Resolved { common, params })
}

/// Best-effort echo of the raw inputs, for manifests written when
/// resolution itself failed.
pub fn raw_echo(file: Option<&Path>, common_flags: &Common, command_flags: &impl Serialize) -> Value {
    let mut map = file.and_then(|p| read_file(p).ok()).unwrap_or_default();
    let _ = overlay(&mut map, common_flags);
    let _ = overlay(&mut map, command_flags);
    Value::Object(map)
}

/// `value` must be a whole number of `dt` steps.
pub fn check_aligned(name: &str, value: f64, dt: f64) -> Result<(), Failure> {
    let k = (value / dt).round();
    if !value.is_finite() || (k * dt - value).abs() > 1e-9 * dt.max(value.abs()) {
        return Err(Failure::config(format!("`{name}` = {value} is not a multiple of dt = {dt}")));
    }
    Ok(())
}

pub fn check_positive(name: &str, value: f64) -> Result<(), Failure> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Failure::config(format!("`{name}` must be positive, got {value}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Deserialize, Serialize, PartialEq)]
    #[serde(deny_unknown_fields, default)]
    struct P {
        nu: f64,
        modes: usize,
    }

    impl Default for P {
        fn default() -> Self {
            P { nu: 1.5, modes: 64 }
        }
    }

    #[derive(Serialize)]
    struct Flags {
        #[serde(skip_serializing_if = "Option::is_none")]
        nu: Option<f64>,
    }

    fn write(json: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), json).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = write(r#"{"nu": 2.0, "modes": 16, "seed": 9}"#);
        let r: Resolved<P> = resolve(Some(f.path()), &Common::default(), &Flags { nu: Some(3.0) }).unwrap();
        assert_eq!(r.params, P { nu: 3.0, modes: 16 });
        assert_eq!(r.common.seed, Some(Seed(NoiseSeed::Seed(9))));
    }

    #[test]
    fn unknown_key_is_named() {
        let f = write(r#"{"nuu": 2.0}"#);
        let err = resolve::<P>(Some(f.path()), &Common::default(), &Flags { nu: None }).unwrap_err();
        assert_eq!(err.code(), 2);
        assert!(err.to_string().contains("nuu"), "{err}");
    }

    #[test]
    fn seeds_parse_from_numbers_and_strings() {
        let s: Vec<Seed> = serde_json::from_str(r#"[7, "42", "zero", "0x10"]"#).unwrap();
        let want = [NoiseSeed::Seed(7), NoiseSeed::Seed(42), NoiseSeed::Zero, NoiseSeed::Seed(16)];
        assert_eq!(s.iter().map(|s| s.0).collect::<Vec<_>>(), want);
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"[7,42,"zero",16]"#);
    }

    #[test]
    fn alignment() {
        assert!(check_aligned("tau", 2.0, 1e-3).is_ok());
        assert!(check_aligned("tau", 2.0005, 1e-3).is_err());
    }
}
