//! Output documents. Every JSON document has the same envelope:
//! `{"tool": {...}, "manifest": {...}, "result": {...}}`. Non-finite scores
//! are written as `null`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Self { name: TOOL_NAME, version: TOOL_VERSION }
    }
}

/// What was run: subcommand, input files and every effective flag value.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub inputs: BTreeMap<String, String>,
    pub flags: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        Self { subcommand: subcommand.to_string(), ..Self::default() }
    }

    pub fn input(mut self, name: &str, path: &Path) -> Self {
        self.inputs.insert(name.to_string(), path.display().to_string());
        self
    }

    pub fn flag(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.flags.insert(name.to_string(), value.into());
        self
    }

    pub fn out(mut self, path: Option<&Path>) -> Self {
        self.out = path.map(|p| p.display().to_string());
        self
    }

    /// `# key: value` lines for text outputs.
    pub fn comment_header(&self) -> String {
        let mut s = format!("# {TOOL_NAME} {TOOL_VERSION} {}\n", self.subcommand);
        for (k, v) in &self.inputs {
            s.push_str(&format!("# input {k}: {v}\n"));
        }
        for (k, v) in &self.flags {
            s.push_str(&format!("# flag {k}: {v}\n"));
        }
        s
    }
}

#[derive(Serialize)]
pub struct Document<'a, T: Serialize> {
    pub tool: Tool,
    pub manifest: &'a Manifest,
    pub result: T,
}

pub fn render<T: Serialize>(manifest: &Manifest, result: T) -> String {
    let doc = Document { tool: Tool::default(), manifest, result };
    let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Writes to `path` through a temporary file in the same directory and a
/// rename, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(content.as_bytes()).map_err(|e| CliError::io("<stdout>", e));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(content.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
