//! Manifest-driven front end: builds fans, skeleta and sheaves from a TOML
//! manifest, runs its checks and reports the verdicts.

pub mod build;
pub mod error;
pub mod manifest;
pub mod plot;
pub mod report;
pub mod tasks;
pub mod views;

use std::path::Path;

pub use error::{CliError, Location};
use manifest::Manifest;
use report::{digest, Report, Verdict, SCHEMA, TOOL_VERSION};

/// Overrides and filters for one run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the manifest's character window.
    pub window: Option<i64>,
    /// Replaces the manifest's box half-side.
    pub r#box: Option<i64>,
    /// Stop at the first task that does not pass.
    pub fail_fast: bool,
    /// Only run checks of this module (`fan`, `skeleton`, `sheaf`, `ccc`, `schober`).
    pub module: Option<String>,
}

/// A parsed and validated manifest with its source text.
pub struct Loaded {
    pub path: String,
    pub source: String,
    pub manifest: Manifest,
}

pub fn load_str(source: &str, path: &str) -> Result<Loaded, CliError> {
    let manifest = manifest::parse(source, path)?;
    manifest::validate(&manifest, source, path)?;
    Ok(Loaded { path: path.to_string(), source: source.to_string(), manifest })
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let p = path.display().to_string();
    let source = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: p.clone(), source })?;
    load_str(&source, &p)
}

impl Loaded {
    pub fn workspace(&self, opts: &RunOptions) -> Result<build::Workspace, CliError> {
        let mut ws = build::Workspace::build(&self.manifest)?;
        if let Some(w) = opts.window {
            ws.windows.characters = w;
        }
        if let Some(b) = opts.r#box {
            ws.windows.r#box = b;
        }
        Ok(ws)
    }

    /// Runs the selected tasks in manifest order.
    pub fn run(&self, opts: &RunOptions) -> Result<Report, CliError> {
        let ws = self.workspace(opts)?;
        let selected: Vec<_> = self
            .manifest
            .tasks
            .iter()
            .map(|t| t.get_ref())
            .filter(|t| opts.module.as_deref().is_none_or(|m| tasks::module_of(t.check.get_ref()) == m))
            .collect();
        let mut results = Vec::new();
        let mut skipped = Vec::new();
        for t in selected {
            if opts.fail_fast && results.iter().any(|r: &report::TaskResult| r.verdict != Verdict::Pass) {
                skipped.push(t.id.clone());
                continue;
            }
            results.push(tasks::run_task(&ws, t));
        }
        Ok(Report {
            schema: SCHEMA.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            manifest: self.manifest.name.clone(),
            manifest_digest: digest(self.source.as_bytes()),
            tasks: results,
            skipped,
        })
    }
}

/// Loads, validates and runs a manifest file.
pub fn run_manifest(path: &Path, opts: &RunOptions) -> Result<Report, CliError> {
    load(path)?.run(opts)
}
