use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::exit::Failure;

/// Bumped when any file layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub schema: String,
    pub schema_version: u32,
    pub version: String,
    pub config_hash: String,
}

impl Meta {
    pub fn new(schema: &str, config_hash: &str) -> Meta {
        Meta { schema: schema.into(), schema_version: SCHEMA_VERSION, version: c60::VERSION.into(), config_hash: config_hash.into() }
    }

    fn comment(&self) -> String {
        format!("# schema={} schema_version={} version={} config_hash={}", self.schema, self.schema_version, self.version, self.config_hash)
    }
}

/// Output directory of one run.
pub struct OutDir {
    pub root: PathBuf,
    pub config_hash: String,
}

impl OutDir {
    pub fn new(root: &Path, config_hash: String) -> Result<OutDir> {
        std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir { root: root.to_path_buf(), config_hash })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn meta(&self, schema: &str) -> Meta {
        Meta::new(schema, &self.config_hash)
    }

    /// `body` must serialize to a JSON object; the meta block is added as
    /// its first key.
    pub fn write_json<T: Serialize>(&self, name: &str, schema: &str, body: &T) -> Result<PathBuf> {
        let mut obj = serde_json::Map::new();
        obj.insert("meta".into(), serde_json::to_value(self.meta(schema))?);
        match serde_json::to_value(body)? {
            serde_json::Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        serde_json::to_writer_pretty(&mut w, &serde_json::Value::Object(obj))?;
        writeln!(w)?;
        w.flush()?;
        Ok(path)
    }

    /// CSV with one leading `#` comment line carrying the meta block.
    pub fn write_csv<R: Serialize>(&self, name: &str, schema: &str, rows: impl IntoIterator<Item = R>) -> Result<PathBuf> {
        let path = self.path(name);
        let mut f = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        writeln!(f, "{}", self.meta(schema).comment())?;
        let mut w = csv::Writer::from_writer(f);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Reads a file written by an earlier stage; `MissingStage` if absent.
    pub fn read_stage<T: DeserializeOwned>(&self, name: &str, stage: &str) -> Result<T> {
        let path = self.path(name);
        if !path.exists() {
            return Err(Failure::MissingStage { stage: stage.into(), file: path }.into());
        }
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// File-name form of an orbit-type id.
pub fn sanitize(id: &str) -> String {
    let mut s: String = id.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    while s.contains("__") {
        s = s.replace("__", "_");
    }
    s.trim_matches('_').to_string()
}
