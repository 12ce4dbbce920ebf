//! Lattice input files: `{"name": string, "gram": [[int]]}`.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use voa_core::lattice::{validate, GramMatrix};

#[derive(Debug, Deserialize)]
pub struct LatticeFile {
    pub name: String,
    pub gram: Vec<Vec<i64>>,
}

/// Reads and validates a lattice file; the error message names the failed
/// axiom (NotSymmetric / NotEven / NotPositiveDefinite).
pub fn read_lattice(path: &Path) -> Result<(String, GramMatrix)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read lattice file {}", path.display()))?;
    let parsed: LatticeFile = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse lattice file {}", path.display()))?;
    validate(&parsed.gram).map_err(|e| anyhow::anyhow!("{e}"))?;
    let gram = GramMatrix::new(parsed.gram).map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok((parsed.name, gram))
}
