//! Replays the checked-in fuzz corpus seeds through the parsers they target.
//! Seeds named `seed_valid_*` must be accepted, `seed_invalid_*` rejected.

use std::fs;
use std::path::{Path, PathBuf};

use helmsplit::dump::{decode, encode, parse_header, FieldHeader};
use helmsplit::expr::Expr;
use helmsplit::manifest::parse_manifest;
use helmsplit::pipeline::ScenarioConfig;
use helmsplit::validator::ValidationReport;

fn seeds(target: &str) -> Vec<(PathBuf, bool)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<(PathBuf, bool)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?.to_string();
            if name.starts_with("seed_valid_") {
                Some((p, true))
            } else if name.starts_with("seed_invalid_") {
                Some((p, false))
            } else {
                None
            }
        })
        .collect();
    out.sort();
    assert!(out.iter().any(|s| s.1), "{target} has no valid seed");
    out
}

fn check_text(target: &str, accept: impl Fn(&str) -> bool) {
    for (path, valid) in seeds(target) {
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(accept(&text), valid, "{}", path.display());
    }
}

#[test]
fn config_seeds() {
    check_text("parse_config", |s| ScenarioConfig::from_json(s).is_ok());
}

#[test]
fn expr_seeds() {
    check_text("parse_expr", |s| match Expr::parse(s) {
        Ok(e) => Expr::parse(&e.to_string()).is_ok(),
        Err(_) => false,
    });
}

#[test]
fn header_seeds() {
    check_text("parse_field_header", |s| parse_header(s).is_ok());
}

#[test]
fn manifest_seeds() {
    check_text("parse_manifest", |s| parse_manifest(s).is_ok());
}

#[test]
fn report_seeds() {
    check_text("parse_report", |s| ValidationReport::from_json(s).is_ok());
}

#[test]
fn dump_seeds() {
    for (path, valid) in seeds("decode_field_dump") {
        let data = fs::read(&path).unwrap();
        let (&count, payload) = data.split_first().unwrap();
        let components = (0..count % 4).map(|i| format!("c{i}")).collect();
        let header = FieldHeader {
            n: 8,
            length: 1.0,
            components,
            t: 0.0,
        };
        let decoded = decode(&header, payload);
        assert_eq!(decoded.is_ok(), valid, "{}", path.display());
        if let Ok(fields) = decoded {
            assert_eq!(encode(&fields.iter().collect::<Vec<_>>()), payload);
        }
    }
}
