//! Golden density tables: one CSV and one JSON sidecar per catalog family,
//! plus a digest list. Regeneration builds every table twice and refuses
//! to write if the two builds differ.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::{build_table, grid_description, CatalogError, Family, Hyperparameters, Sidecar};

pub const GOLDEN_1D_POINTS: usize = 1000;
pub const GOLDEN_2D_SIDE: usize = 50;
pub const DIGEST_FILE: &str = "digests.json";
pub const REGENERATE_COMMAND: &str = "wcp regen-goldens --dir goldens";

#[derive(Debug, Error)]
pub enum GoldenError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("nondeterministic table for `{0}`: two consecutive builds differ")]
    Nondeterministic(Family),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub family: Family,
    pub config_hash: String,
    pub table_digest: String,
    pub command: String,
}

#[derive(Debug, Clone)]
pub struct GoldenArtifact {
    pub record: GoldenRecord,
    pub csv: String,
    pub sidecar: String,
}

/// Everything that determines a golden table.
#[derive(Serialize)]
struct PinnedConfig<'a> {
    family: Family,
    hyperparameters: &'a Hyperparameters,
    points: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn golden_points(family: Family) -> usize {
    if family.table_dim() == 1 {
        GOLDEN_1D_POINTS
    } else {
        GOLDEN_2D_SIDE
    }
}

pub fn config_hash(family: Family, h: &Hyperparameters) -> String {
    let pinned = PinnedConfig { family, hyperparameters: h, points: golden_points(family) };
    sha256_hex(serde_json::to_string(&pinned).expect("pinned config serializes").as_bytes())
}

pub fn csv_path(dir: &Path, family: Family) -> std::path::PathBuf {
    dir.join(format!("{}.csv", family.name()))
}

pub fn sidecar_path(dir: &Path, family: Family) -> std::path::PathBuf {
    dir.join(format!("{}.json", family.name()))
}

/// Builds the golden table of one family under the given hyperparameters.
pub fn build_golden_with(family: Family, h: &Hyperparameters) -> Result<GoldenArtifact, GoldenError> {
    let table = build_table(family, h, golden_points(family))?;
    let csv = table.to_csv();
    let record = GoldenRecord {
        family,
        config_hash: config_hash(family, h),
        table_digest: sha256_hex(csv.as_bytes()),
        command: REGENERATE_COMMAND.to_string(),
    };
    let sidecar = Sidecar {
        family,
        construction: if family == Family::TXiNumeric { "grid recipe".into() } else { "closed form".into() },
        hyperparameters: h.clone(),
        eta: h.get("eta").copied(),
        eps: h.get("eps").copied(),
        delta: h.get("delta").copied(),
        tau: None,
        eps_tilde: None,
        grid: grid_description(family).into(),
        rows: table.rows(),
        normalization: table.normalization(),
        tv_to_analytic: None,
        mesh_file: None,
        command: REGENERATE_COMMAND.to_string(),
        metadata: BTreeMap::new(),
    };
    let mut sidecar = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    sidecar.push('\n');
    Ok(GoldenArtifact { record, csv, sidecar })
}

pub fn build_golden(family: Family) -> Result<GoldenArtifact, GoldenError> {
    build_golden_with(family, &family.golden_hyperparameters())
}

/// Rebuilds every golden twice; any difference between the builds is an error.
pub fn build_all() -> Result<Vec<GoldenArtifact>, GoldenError> {
    Family::ALL
        .iter()
        .map(|&f| {
            let a = build_golden(f)?;
            let b = build_golden(f)?;
            if a.csv != b.csv || a.sidecar != b.sidecar {
                return Err(GoldenError::Nondeterministic(f));
            }
            Ok(a)
        })
        .collect()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> GoldenError + '_ {
    move |e| GoldenError::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Rewrites all tables, sidecars and the digest list under `dir`.
pub fn regenerate_goldens(dir: &Path) -> Result<Vec<GoldenRecord>, GoldenError> {
    let artifacts = build_all()?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for a in &artifacts {
        let p = csv_path(dir, a.record.family);
        fs::write(&p, &a.csv).map_err(io_err(&p))?;
        let p = sidecar_path(dir, a.record.family);
        fs::write(&p, &a.sidecar).map_err(io_err(&p))?;
    }
    let records: Vec<GoldenRecord> = artifacts.into_iter().map(|a| a.record).collect();
    let p = dir.join(DIGEST_FILE);
    let mut text = serde_json::to_string_pretty(&records).expect("records serialize");
    text.push('\n');
    fs::write(&p, text).map_err(io_err(&p))?;
    Ok(records)
}

pub fn read_digests(dir: &Path) -> Result<Vec<GoldenRecord>, GoldenError> {
    let p = dir.join(DIGEST_FILE);
    let text = fs::read_to_string(&p).map_err(io_err(&p))?;
    serde_json::from_str(&text).map_err(|e| GoldenError::Format { path: p.display().to_string(), message: e.to_string() })
}

/// Families with no record, and families recorded more than once.
pub fn coverage_gaps(records: &[GoldenRecord]) -> (Vec<Family>, Vec<Family>) {
    let missing = Family::ALL.iter().copied().filter(|f| !records.iter().any(|r| r.family == *f)).collect();
    let duplicated = Family::ALL.iter().copied().filter(|f| records.iter().filter(|r| r.family == *f).count() > 1).collect();
    (missing, duplicated)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenProblem {
    Missing(Family),
    Duplicated(Family),
    ConfigChanged(Family),
    TableChanged(Family),
    FileMismatch(Family),
}

/// Compares committed goldens with a fresh build.
pub fn check_goldens(dir: &Path) -> Result<Vec<GoldenProblem>, GoldenError> {
    let committed = read_digests(dir)?;
    let fresh: Vec<GoldenRecord> = build_all()?.into_iter().map(|a| a.record).collect();
    Ok(compare_records(&committed, &fresh, |f| fs::read(csv_path(dir, f)).ok().map(|b| sha256_hex(&b))))
}

/// `file_digest` returns the digest of the committed table file, if present.
pub fn compare_records(committed: &[GoldenRecord], fresh: &[GoldenRecord], file_digest: impl Fn(Family) -> Option<String>) -> Vec<GoldenProblem> {
    let (missing, duplicated) = coverage_gaps(committed);
    let mut problems: Vec<GoldenProblem> = missing.into_iter().map(GoldenProblem::Missing).collect();
    problems.extend(duplicated.into_iter().map(GoldenProblem::Duplicated));
    for new in fresh {
        let Some(old) = committed.iter().find(|r| r.family == new.family) else { continue };
        if old.config_hash != new.config_hash {
            problems.push(GoldenProblem::ConfigChanged(new.family));
        } else if old.table_digest != new.table_digest {
            problems.push(GoldenProblem::TableChanged(new.family));
        }
        if file_digest(new.family).as_deref() != Some(old.table_digest.as_str()) {
            problems.push(GoldenProblem::FileMismatch(new.family));
        }
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn config_hash_tracks_hyperparameters() {
        let mut h = Family::Sd.golden_hyperparameters();
        let a = config_hash(Family::Sd, &h);
        h.insert("eta".into(), 2.0);
        assert_ne!(a, config_hash(Family::Sd, &h));
    }
}
