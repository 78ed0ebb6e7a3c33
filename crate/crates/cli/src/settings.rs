use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::args::{Common, Format};
use crate::Failure;

const CONFIG_KEYS: &[&str] = &[
    "seed",
    "replicates",
    "epsilon",
    "delta",
    "threshold",
    "out",
    "format",
    "method",
    "mode",
    "n",
    "estimator",
    "margin",
    "test",
    "p",
    "n_grid",
    "drop_tolerance",
    "prior",
    "horizon",
    "max_prefix",
    "max_period",
    "cx_max",
];

/// Keys of a JSON config file.
#[derive(Debug, Default)]
pub struct ConfigFile(Map<String, Value>);

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("config {} is not JSON: {e}", path.display())))?;
        let Value::Object(map) = value else {
            return Err(Failure::Usage(format!("config {} must be a JSON object", path.display())));
        };
        if let Some(k) = map.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Failure::Usage(format!("unknown config key `{k}`")));
        }
        Ok(Self(map))
    }

    /// A string or number, as text.
    pub fn text(&self, key: &str) -> Result<Option<String>, Failure> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(_) => Err(bad(key, "a string or number")),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, Failure> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| bad(key, "a nonnegative integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| bad(key, "a number")),
        }
    }

    /// A list of strings, or one comma-separated string.
    pub fn list(&self, key: &str) -> Result<Option<Vec<String>>, Failure> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.split(',').map(|x| x.trim().to_string()).collect())),
            Some(Value::Array(items)) => items
                .iter()
                .map(|i| i.as_str().map(str::to_string).ok_or_else(|| bad(key, "a list of strings")))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(bad(key, "a list of strings")),
        }
    }
}

fn bad(key: &str, what: &str) -> Failure {
    Failure::Usage(format!("config key `{key}` must be {what}"))
}

/// Options after layering flags and environment over the config file.
pub struct Settings {
    pub seed: Option<u64>,
    pub replicates: Option<u64>,
    pub epsilon: Option<String>,
    pub delta: Option<String>,
    pub threshold: Option<String>,
    pub out: PathBuf,
    formats: Option<Vec<Format>>,
    pub file: ConfigFile,
}

impl Settings {
    pub fn resolve(common: Common) -> Result<Self, Failure> {
        let file = match &common.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let formats = match common.format {
            Some(f) => Some(f),
            None => file
                .list("format")?
                .map(|names| {
                    names
                        .iter()
                        .map(|n| {
                            serde_json::from_value(Value::String(n.clone()))
                                .map_err(|_| Failure::Usage(format!("unknown format `{n}`")))
                        })
                        .collect::<Result<Vec<Format>, _>>()
                })
                .transpose()?,
        };
        Ok(Self {
            seed: common.seed.or(file.u64("seed")?),
            replicates: common.replicates.or(file.u64("replicates")?),
            epsilon: common.epsilon.or(file.text("epsilon")?),
            delta: common.delta.or(file.text("delta")?),
            threshold: common.threshold.or(file.text("threshold")?),
            out: common
                .out
                .or(file.text("out")?.map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("convlab-out")),
            formats,
            file,
        })
    }

    /// Requested formats, or `default` when none were given. Anything
    /// outside `allowed` is a usage error.
    pub fn formats(&self, default: &[Format], allowed: &[Format], command: &str) -> Result<Vec<Format>, Failure> {
        let mut f = self.formats.clone().unwrap_or_else(|| default.to_vec());
        f.sort();
        f.dedup();
        if let Some(bad) = f.iter().find(|x| !allowed.contains(x)) {
            return Err(Failure::Usage(format!("{command} cannot write {bad:?} output")));
        }
        Ok(f)
    }

    pub fn require_seed(&self) -> Result<u64, Failure> {
        self.seed
            .ok_or_else(|| Failure::Usage("a seed is required: pass --seed, set CONVLAB_SEED or add `seed` to the config".into()))
    }
}

/// Effective parameters of a run. Output location and formats are left out
/// since they do not change report contents.
#[derive(Debug, Default)]
pub struct RunConfig(BTreeMap<String, Value>);

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut c = Self::default();
        c.set("command", command);
        c
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.0.insert(key.to_string(), value.into());
    }

    /// Records an input file by path and content digest.
    pub fn input(&mut self, path: &Path, contents: &[u8]) {
        let entry = serde_json::json!({
            "path": path.display().to_string(),
            "sha256": hex(&Sha256::digest(contents)),
        });
        match self.0.entry("inputs".into()).or_insert_with(|| Value::Array(Vec::new())) {
            Value::Array(items) => items.push(entry),
            _ => unreachable!("inputs is always an array"),
        }
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(&self.0).expect("config serializes");
        hex(&Sha256::digest(text.as_bytes()))[..16].to_string()
    }

    pub fn value(&self) -> Value {
        serde_json::to_value(&self.0).expect("config serializes")
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
