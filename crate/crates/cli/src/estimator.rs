use std::env;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use mils_core::bdm::{EstimatorConfig, Method};
use mils_core::ctm::{bundled_array_table, bundled_string_table, CtmTable, MissingPolicy, TableKind};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Default table location when no `--table` is given: a list of files in
/// the platform's path-list syntax (`:`-separated on Unix).
pub const TABLE_PATH_VAR: &str = "MILS_TABLE_PATH";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    #[serde(default = "default_method")]
    pub method: Method,
    /// Table files; empty means `MILS_TABLE_PATH`, then the bundled tables.
    #[serde(default)]
    pub tables: Vec<PathBuf>,
    #[serde(default)]
    pub missing: MissingPolicy,
}

fn default_method() -> Method {
    Method::Bdm
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        EstimatorSpec {
            method: Method::Bdm,
            tables: Vec::new(),
            missing: MissingPolicy::Error,
        }
    }
}

impl EstimatorSpec {
    pub fn build(&self) -> Result<EstimatorConfig> {
        let paths = if self.tables.is_empty() {
            env::var_os(TABLE_PATH_VAR)
                .map(|v| env::split_paths(&v).filter(|p| !p.as_os_str().is_empty()).collect())
                .unwrap_or_default()
        } else {
            self.tables.clone()
        };
        let (string, array) = if paths.is_empty() {
            (Some(bundled_string_table()), Some(bundled_array_table()))
        } else {
            let mut string = None;
            let mut array = None;
            for p in &paths {
                let t = CtmTable::load(p).with_context(|| format!("loading table {}", p.display()))?;
                let slot = match t.kind() {
                    TableKind::String => &mut string,
                    TableKind::Array => &mut array,
                };
                if slot.is_some() {
                    bail!("more than one {} table given ({})", t.kind(), p.display());
                }
                *slot = Some(Arc::new(t));
            }
            (string, array)
        };
        let cfg = EstimatorConfig::bdm(string, array).with_method(self.method).with_missing(self.missing);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Provenance lines of the tables in use.
    pub fn describe(cfg: &EstimatorConfig) -> Vec<String> {
        [&cfg.string_table, &cfg.array_table]
            .into_iter()
            .flatten()
            .map(|t| format!("{} table, {} entries: {}", t.kind(), t.len(), t.provenance()))
            .collect()
    }
}
