//! On-disk layout of a run: field dumps, manifest, report, defect table.
//!
//! ```text
//! <dir>/manifest.json
//! <dir>/report.json
//! <dir>/defects.tsv
//! <dir>/timings.json
//! <dir>/fields/static/{gamma,phi_vel,phi_vel_laplacian}.{json,bin}
//! <dir>/fields/step_NNNNNN/{u_p,u_w,w,u,grad_p}.{json,bin}
//! ```
//!
//! Everything except `timings.json` is a pure function of the config, so two
//! runs of the same config produce byte-identical files.

use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dump::{self, FieldHeader};
use crate::fieldcalc::{Grid, ScalarField, VectorField};
use crate::pipeline::{PointFailure, ScenarioConfig, Snapshot, SolutionBundle, Timings};
use crate::validator::{emit_defect_table, ValidationReport};
use crate::{Error, Result};

pub const FORMAT: &str = "helmsplit-run/1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "defects.tsv";
pub const TIMINGS_FILE: &str = "timings.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaticFields {
    pub gamma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_vel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_vel_laplacian: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotFields {
    pub u_p: String,
    pub u_w: String,
    pub w: String,
    pub u: String,
    pub grad_p: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotEntry {
    pub step: usize,
    pub t: f64,
    pub fields: SnapshotFields,
}

/// Field paths are relative to the manifest's directory and name dumps
/// without extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub config: ScenarioConfig,
    pub config_hash: String,
    pub grid: Grid,
    pub static_fields: StaticFields,
    pub snapshots: Vec<SnapshotEntry>,
    pub pointwise_failures: Vec<PointFailure>,
    pub report: String,
    pub defect_table: String,
    pub timings: String,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Every field dump the manifest refers to.
    pub fn field_paths(&self) -> Vec<&str> {
        let s = &self.static_fields;
        let mut paths = vec![s.gamma.as_str()];
        paths.extend(s.phi_vel.as_deref());
        paths.extend(s.phi_vel_laplacian.as_deref());
        for e in &self.snapshots {
            let f = &e.fields;
            paths.extend([&f.u_p, &f.u_w, &f.w, &f.u, &f.grad_p].map(String::as_str));
        }
        paths
    }
}

fn check_relative(path: &str) -> Result<()> {
    let p = Path::new(path);
    let ok = !path.is_empty() && p.components().all(|c| matches!(c, Component::Normal(_)));
    if ok {
        Ok(())
    } else {
        Err(Error::Manifest(format!(
            "path {path:?} must be relative and stay inside the run directory"
        )))
    }
}

pub fn parse_manifest(src: &str) -> Result<Manifest> {
    let m: Manifest = serde_json::from_str(src).map_err(|e| Error::Manifest(e.to_string()))?;
    if m.format != FORMAT {
        return Err(Error::Manifest(format!(
            "unsupported format {:?}",
            m.format
        )));
    }
    m.config.validate()?;
    if m.config.grid()? != m.grid {
        return Err(Error::Manifest("grid disagrees with config".into()));
    }
    if m.config.hash() != m.config_hash {
        return Err(Error::Manifest("config hash does not match config".into()));
    }
    for p in m.field_paths() {
        check_relative(p)?;
    }
    for p in [&m.report, &m.defect_table, &m.timings] {
        check_relative(p)?;
    }
    Ok(m)
}

fn snapshot_dir(step: usize) -> String {
    format!("fields/step_{step:06}")
}

/// Writes the bundle and its report under `dir` and returns the manifest.
pub fn write_run(
    dir: &Path,
    bundle: &SolutionBundle,
    report: &ValidationReport,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let scalar = |rel: &str, name: &str, f: &ScalarField| -> Result<String> {
        dump::write_scalar(&dir.join(rel), name, f, 0.0)?;
        Ok(rel.to_string())
    };
    let static_fields = StaticFields {
        gamma: scalar("fields/static/gamma", "gamma", &bundle.gamma)?,
        phi_vel: bundle
            .phi_vel
            .as_ref()
            .map(|f| scalar("fields/static/phi_vel", "phi_vel", f))
            .transpose()?,
        phi_vel_laplacian: bundle
            .phi_vel_laplacian
            .as_ref()
            .map(|f| scalar("fields/static/phi_vel_laplacian", "phi_vel_laplacian", f))
            .transpose()?,
    };
    let snapshots = bundle
        .snapshots
        .iter()
        .map(|s| {
            let base = snapshot_dir(s.step);
            let vector = |name: &str, f: &VectorField| -> Result<String> {
                let rel = format!("{base}/{name}");
                dump::write_vector(&dir.join(&rel), name, f, s.t)?;
                Ok(rel)
            };
            Ok(SnapshotEntry {
                step: s.step,
                t: s.t,
                fields: SnapshotFields {
                    u_p: vector("u_p", &s.u_p)?,
                    u_w: vector("u_w", &s.u_w)?,
                    w: vector("w", &s.w)?,
                    u: vector("u", &s.u)?,
                    grad_p: vector("grad_p", &s.grad_p)?,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        format: FORMAT.to_string(),
        config: bundle.config.clone(),
        config_hash: bundle.config.hash(),
        grid: bundle.grid,
        static_fields,
        snapshots,
        pointwise_failures: bundle.failures.clone(),
        report: REPORT_FILE.to_string(),
        defect_table: TABLE_FILE.to_string(),
        timings: TIMINGS_FILE.to_string(),
    };
    fs::write(dir.join(MANIFEST_FILE), manifest.to_json())?;
    fs::write(dir.join(REPORT_FILE), report.to_json())?;
    fs::write(dir.join(TABLE_FILE), emit_defect_table(report))?;
    let mut timings = serde_json::to_string_pretty(&bundle.timings)?;
    timings.push('\n');
    fs::write(dir.join(TIMINGS_FILE), timings)?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    match fs::read_to_string(path) {
        Ok(src) => parse_manifest(&src),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => Err(e.into()),
    }
}

fn missing_files(root: &Path, manifest: &Manifest) -> Vec<PathBuf> {
    manifest
        .field_paths()
        .into_iter()
        .flat_map(|p| {
            let base = root.join(p);
            [base.with_extension("json"), base.with_extension("bin")]
        })
        .filter(|p| !p.is_file())
        .collect()
}

fn check_header(path: &str, header: &FieldHeader, grid: &Grid, t: f64) -> Result<()> {
    let found = header.grid()?;
    if &found != grid {
        return Err(Error::Manifest(format!(
            "{path}: grid n = {}, L = {} differs from run grid n = {}, L = {}",
            found.n(),
            found.length(),
            grid.n(),
            grid.length()
        )));
    }
    if header.t != t {
        return Err(Error::Manifest(format!(
            "{path}: time stamp {} differs from manifest time {t}",
            header.t
        )));
    }
    Ok(())
}

/// Reloads a bundle from a manifest; every referenced dump must exist and
/// share the manifest's grid.
pub fn load_bundle(manifest_path: &Path) -> Result<(Manifest, SolutionBundle)> {
    let manifest = read_manifest(manifest_path)?;
    let root = manifest_path.parent().unwrap_or(Path::new("."));
    let missing = missing_files(root, &manifest);
    if missing.len() == 1 {
        return Err(Error::MissingFile(missing[0].clone()));
    }
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|p| p.display().to_string()).collect();
        return Err(Error::Manifest(format!(
            "missing field files: {}",
            list.join(", ")
        )));
    }
    let grid = manifest.grid;
    let scalar = |rel: &str| -> Result<ScalarField> {
        let (header, f) = dump::read_scalar(&root.join(rel))?;
        check_header(rel, &header, &grid, 0.0)?;
        Ok(f)
    };
    let s = &manifest.static_fields;
    let gamma = scalar(&s.gamma)?;
    let phi_vel = s.phi_vel.as_deref().map(scalar).transpose()?;
    let phi_vel_laplacian = s.phi_vel_laplacian.as_deref().map(scalar).transpose()?;
    let snapshots = manifest
        .snapshots
        .iter()
        .map(|e| {
            let vector = |rel: &str| -> Result<VectorField> {
                let (header, f) = dump::read_vector(&root.join(rel))?;
                check_header(rel, &header, &grid, e.t)?;
                Ok(f)
            };
            Ok(Snapshot {
                step: e.step,
                t: e.t,
                u_p: vector(&e.fields.u_p)?,
                u_w: vector(&e.fields.u_w)?,
                w: vector(&e.fields.w)?,
                u: vector(&e.fields.u)?,
                grad_p: vector(&e.fields.grad_p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bundle = SolutionBundle {
        config: manifest.config.clone(),
        grid,
        gamma,
        phi_vel,
        phi_vel_laplacian,
        snapshots,
        failures: manifest.pointwise_failures.clone(),
        timings: Timings::default(),
    };
    Ok((manifest, bundle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::run;
    use crate::validator::constraint_report;

    fn sample_run(dir: &Path) -> (SolutionBundle, ValidationReport) {
        let cfg = ScenarioConfig::from_json(
            r#"{"n": 8, "nu": 0.1, "T": 0.04, "dt": 0.01, "snapshot_stride": 2,
                "initial_uw": "taylor_green",
                "initial_up": {"gradient_of": {"phi_vel": "0.2*sin(x)"}}}"#,
        )
        .unwrap();
        let bundle = run(&cfg).unwrap();
        let report = constraint_report(&bundle, &cfg.body_force().unwrap(), cfg.nu).unwrap();
        write_run(dir, &bundle, &report).unwrap();
        (bundle, report)
    }

    #[test]
    fn round_trip_reproduces_bundle_and_report() {
        let dir = tempfile::tempdir().unwrap();
        let (bundle, report) = sample_run(dir.path());
        let (m, loaded) = load_bundle(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(m.snapshots.len(), 3);
        assert_eq!(loaded.snapshots, bundle.snapshots);
        assert_eq!(
            (&loaded.gamma, &loaded.phi_vel),
            (&bundle.gamma, &bundle.phi_vel)
        );
        let again =
            constraint_report(&loaded, &m.config.body_force().unwrap(), m.config.nu).unwrap();
        assert_eq!(
            again.to_json(),
            fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap()
        );
        assert_eq!(again, report);
        let table = fs::read_to_string(dir.path().join(TABLE_FILE)).unwrap();
        assert_eq!(table, emit_defect_table(&report));
    }

    #[test]
    fn missing_dump_is_named() {
        let dir = tempfile::tempdir().unwrap();
        sample_run(dir.path());
        let gone = dir.path().join("fields/step_000002/w.bin");
        fs::remove_file(&gone).unwrap();
        match load_bundle(&dir.path().join(MANIFEST_FILE)) {
            Err(Error::MissingFile(p)) => assert_eq!(p, gone),
            other => panic!("{other:?}"),
        }
        fs::remove_file(dir.path().join("fields/static/gamma.json")).unwrap();
        let err = load_bundle(&dir.path().join(MANIFEST_FILE))
            .unwrap_err()
            .to_string();
        assert!(err.contains("gamma.json") && err.contains("w.bin"), "{err}");
    }

    #[test]
    fn foreign_grid_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        sample_run(dir.path());
        let other = VectorField::zeros(Grid::periodic(16).unwrap());
        dump::write_vector(&dir.path().join("fields/step_000004/u"), "u", &other, 0.04).unwrap();
        let err = load_bundle(&dir.path().join(MANIFEST_FILE)).unwrap_err();
        assert!(
            matches!(&err, Error::Manifest(m) if m.contains("n = 16")),
            "{err}"
        );
    }

    #[test]
    fn parse_rejects_inconsistent_manifests() {
        let dir = tempfile::tempdir().unwrap();
        sample_run(dir.path());
        let src = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        let m = parse_manifest(&src).unwrap();
        assert_eq!(parse_manifest(&m.to_json()).unwrap(), m);

        let mut escaped = m.clone();
        escaped.static_fields.gamma = "../gamma".into();
        assert!(parse_manifest(&escaped.to_json()).is_err());
        let mut absolute = m.clone();
        absolute.snapshots[0].fields.u = "/tmp/u".into();
        assert!(parse_manifest(&absolute.to_json()).is_err());
        let mut rehashed = m.clone();
        rehashed.config.nu = 0.2;
        assert!(parse_manifest(&rehashed.to_json()).is_err());
        let mut format = m.clone();
        format.format = "other".into();
        assert!(parse_manifest(&format.to_json()).is_err());
        assert!(
            parse_manifest(&src.replacen("\"format\"", "\"extra\": 1,\n  \"format\"", 1)).is_err()
        );
        assert!(matches!(
            read_manifest(&dir.path().join("nope.json")),
            Err(Error::MissingFile(_))
        ));
    }
}
