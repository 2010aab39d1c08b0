//! Catalogs of Fano threefolds, the bundled fixtures and the command line.

pub mod cli;
pub mod golden;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quotient::{CoverError, CoverRecord};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogFile {
    pub format_version: String,
    pub entries: Vec<CoverRecord>,
}

/// A record that failed validation, with the line its name appears on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidRecord {
    pub line: Option<usize>,
    pub error: CoverError,
}

impl fmt::Display for InvalidRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {0:?}")]
    Version(String),
    #[error("duplicate record name {0:?}")]
    DuplicateName(String),
    #[error("{} invalid record(s):\n{}", .0.len(), .0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<InvalidRecord>),
    #[error("no bundled catalog named {0:?}")]
    UnknownBundle(String),
}

fn line_of(text: &str, name: &str) -> Option<usize> {
    let needle = serde_json::to_string(name).ok()?;
    let at = text.find(&needle)?;
    Some(text[..at].matches('\n').count() + 1)
}

/// Parses and validates a catalog.
pub fn parse_catalog(text: &str) -> Result<Vec<CoverRecord>, CatalogError> {
    let file: CatalogFile = serde_json::from_str(text).map_err(|e| CatalogError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        return Err(CatalogError::Version(file.format_version));
    }
    let mut names = BTreeSet::new();
    for e in &file.entries {
        if !names.insert(e.name.as_str()) {
            return Err(CatalogError::DuplicateName(e.name.clone()));
        }
    }
    let invalid: Vec<InvalidRecord> = file
        .entries
        .iter()
        .filter_map(|e| {
            e.validate().err().map(|error| InvalidRecord {
                line: line_of(text, &e.name),
                error,
            })
        })
        .collect();
    if !invalid.is_empty() {
        return Err(CatalogError::Invalid(invalid));
    }
    Ok(file.entries)
}

pub fn load_catalog(path: &Path) -> Result<Vec<CoverRecord>, CatalogError> {
    let text = fs::read_to_string(path).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_catalog(&text)
}

pub fn catalog_to_json(entries: &[CoverRecord]) -> String {
    let file = CatalogFile {
        format_version: FORMAT_VERSION.to_string(),
        entries: entries.to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("catalog serializes") + "\n"
}

pub fn save_catalog(path: &Path, entries: &[CoverRecord]) -> Result<(), CatalogError> {
    fs::write(path, catalog_to_json(entries)).map_err(|source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Catalogs shipped with the crate.
pub const BUNDLED: &[(&str, &str)] = &[
    ("codim1", include_str!("../../fixtures/codim1.json")),
    ("codim2", include_str!("../../fixtures/codim2.json")),
    ("codim3", include_str!("../../fixtures/codim3.json")),
    (
        "codim3_extra",
        include_str!("../../fixtures/codim3_extra.json"),
    ),
];

/// A bundled catalog by name; `codim1` and `codim1.json` both work.
pub fn bundled_catalog(name: &str) -> Result<Vec<CoverRecord>, CatalogError> {
    let key = name.strip_suffix(".json").unwrap_or(name);
    let text = BUNDLED
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(_, t)| *t)
        .ok_or_else(|| CatalogError::UnknownBundle(name.to_string()))?;
    parse_catalog(text)
}
