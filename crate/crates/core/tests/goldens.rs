use std::fs;
use std::path::PathBuf;

use wcp::catalog::{DensityTable, Family, Sidecar};
use wcp::golden::*;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../goldens")
}

#[test]
fn every_family_has_exactly_one_golden() {
    let records = read_digests(&dir()).unwrap();
    assert_eq!(coverage_gaps(&records), (vec![], vec![]));
    assert_eq!(records.len(), Family::ALL.len());
    for r in &records {
        assert!(csv_path(&dir(), r.family).exists() && sidecar_path(&dir(), r.family).exists(), "{}", r.family);
    }
}

#[test]
fn committed_goldens_match_regeneration() {
    assert_eq!(check_goldens(&dir()).unwrap(), vec![]);
}

#[test]
fn double_regeneration_is_identical() {
    let a = build_all().unwrap();
    let b = build_all().unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.record, y.record);
        assert_eq!(x.csv, y.csv);
    }
}

#[test]
fn table_sizes_and_sidecars() {
    for f in Family::ALL {
        let t = DensityTable::from_csv(&fs::read_to_string(csv_path(&dir(), f)).unwrap()).unwrap();
        let expect = if f.table_dim() == 1 { 1000 } else { 2500 };
        assert_eq!(t.rows(), expect, "{f}");
        assert!(t.density.iter().all(|d| d.is_finite() && *d >= 0.0), "{f}");
        let side: Sidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(&dir(), f)).unwrap()).unwrap();
        assert_eq!(side.family, f);
        assert_eq!(side.hyperparameters, f.golden_hyperparameters());
        assert!((t.normalization() - side.normalization).abs() <= 1e-9, "{f}");
        assert!(side.metadata.is_empty());
    }
}

#[test]
fn missing_family_is_reported() {
    let mut records = read_digests(&dir()).unwrap();
    records.retain(|r| r.family != Family::GpdTwoStep);
    let problems = compare_records(&records, &records, |_| None);
    assert!(problems.contains(&GoldenProblem::Missing(Family::GpdTwoStep)));
}

#[test]
fn hyperparameter_change_is_reported() {
    let committed = read_digests(&dir()).unwrap();
    let mut h = Family::Sd.golden_hyperparameters();
    h.insert("eta".into(), 1.5);
    let changed = build_golden_with(Family::Sd, &h).unwrap();
    let problems = compare_records(&committed, &[changed.record], |f| {
        committed.iter().find(|r| r.family == f).map(|r| r.table_digest.clone())
    });
    assert_eq!(problems, vec![GoldenProblem::ConfigChanged(Family::Sd)]);
}

#[test]
fn edited_table_is_reported() {
    let committed = read_digests(&dir()).unwrap();
    let mut fresh = committed.clone();
    fresh[0].table_digest = sha256_hex(b"edited");
    let problems = compare_records(&committed, &fresh, |_| Some("other".into()));
    assert!(problems.contains(&GoldenProblem::TableChanged(fresh[0].family)));
    assert!(problems.contains(&GoldenProblem::FileMismatch(fresh[0].family)));
}
