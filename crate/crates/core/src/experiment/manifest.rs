//! Flat `key=value` run manifests.
//!
//! A manifest records the command, its parameters, the master seed and the
//! full argument vector. Rerunning the recorded arguments reproduces every
//! listed output byte for byte; only the timestamp line differs.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;
/// Bumped whenever a CSV header or field encoding changes.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    pub master_seed: u64,
    pub tool_version: String,
    pub timestamp: u64,
    /// Parameters in insertion order.
    pub params: Vec<(String, String)>,
    /// Output file name and its CSV header.
    pub outputs: Vec<(String, String)>,
    pub argv: Vec<String>,
}

/// Seconds since the epoch; `SOURCE_DATE_EPOCH` pins it for reproducible
/// manifests.
fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(command: &str, master_seed: u64, argv: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            master_seed,
            tool_version: TOOL_VERSION.to_string(),
            timestamp: now(),
            params: Vec::new(),
            outputs: Vec::new(),
            argv,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn output(&mut self, file: &str, header: &str) -> &mut Self {
        self.outputs.push((file.to_string(), header.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: &str| {
            s.push_str(k);
            s.push('=');
            s.push_str(v);
            s.push('\n');
        };
        line("manifest_version", &MANIFEST_VERSION.to_string());
        line("schema_version", &SCHEMA_VERSION.to_string());
        line("command", &self.command);
        line("tool_version", &self.tool_version);
        line("timestamp", &self.timestamp.to_string());
        line("master_seed", &self.master_seed.to_string());
        for (k, v) in &self.params {
            line(&format!("param.{k}"), v);
        }
        for (f, h) in &self.outputs {
            line(&format!("output.{f}"), h);
        }
        for (i, a) in self.argv.iter().enumerate() {
            line(&format!("argv.{i}"), a);
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if self.argv.iter().chain(self.params.iter().map(|(_, v)| v)).any(|a| a.contains('\n')) {
            return Err(Error::invalid("manifest values cannot contain newlines"));
        }
        fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = RunManifest {
            command: String::new(),
            master_seed: 0,
            tool_version: String::new(),
            timestamp: 0,
            params: Vec::new(),
            outputs: Vec::new(),
            argv: Vec::new(),
        };
        let mut argv: Vec<(usize, String)> = Vec::new();
        let mut seen_command = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let (k, v) = raw.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected key=value, got {raw:?}"),
            })?;
            let bad = |what: &str| Error::Parse {
                line: line_no,
                msg: format!("bad {what}: {v:?}"),
            };
            match k {
                "manifest_version" => {
                    if v.parse::<u32>().map_err(|_| bad("manifest_version"))? != MANIFEST_VERSION {
                        return Err(bad("manifest_version"));
                    }
                }
                "schema_version" => {
                    v.parse::<u32>().map_err(|_| bad("schema_version"))?;
                }
                "command" => {
                    m.command = v.to_string();
                    seen_command = true;
                }
                "tool_version" => m.tool_version = v.to_string(),
                "timestamp" => m.timestamp = v.parse().map_err(|_| bad("timestamp"))?,
                "master_seed" => m.master_seed = v.parse().map_err(|_| bad("master_seed"))?,
                _ => {
                    if let Some(p) = k.strip_prefix("param.") {
                        m.params.push((p.to_string(), v.to_string()));
                    } else if let Some(f) = k.strip_prefix("output.") {
                        m.outputs.push((f.to_string(), v.to_string()));
                    } else if let Some(idx) = k.strip_prefix("argv.") {
                        argv.push((idx.parse().map_err(|_| bad("argv index"))?, v.to_string()));
                    } else {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("unknown key {k:?}"),
                        });
                    }
                }
            }
        }
        if !seen_command {
            return Err(Error::Parse {
                line: 0,
                msg: "manifest has no command".into(),
            });
        }
        argv.sort_by_key(|(i, _)| *i);
        if argv.iter().enumerate().any(|(pos, (i, _))| pos != *i) {
            return Err(Error::Parse {
                line: 0,
                msg: "argv indices are not contiguous".into(),
            });
        }
        m.argv = argv.into_iter().map(|(_, a)| a).collect();
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}
