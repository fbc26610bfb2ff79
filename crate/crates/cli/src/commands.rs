use std::fs;
use std::path::{Path, PathBuf};

use helmsplit::manifest::{load_bundle, write_run, REPORT_FILE, TABLE_FILE};
use helmsplit::pipeline::{run, ScenarioConfig};
use helmsplit::validator::{constraint_report, emit_defect_table, ValidationReport};
use helmsplit::Error;

use crate::demos;

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

pub struct Options {
    pub output_dir: Option<PathBuf>,
    pub seed_override: Option<u64>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Grid(_) | Error::Expr { .. } | Error::TimeGrid(_) => EXIT_USAGE,
        _ => EXIT_RUNTIME,
    }
}

fn fail(e: &Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn print_summary(report: &ValidationReport) {
    for name in report.defect_names() {
        let (mut l2, mut max) = (0.0f64, 0.0f64);
        for n in report.snapshots.iter().filter_map(|s| s.get(&name)) {
            l2 = l2.max(n.l2);
            max = max.max(n.max);
        }
        println!("{name:<18} max {max:.3e}  l2 {l2:.3e}");
    }
}

pub fn run_file(path: &Path, opts: &Options) -> u8 {
    let src = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    run_config(&src, opts)
}

pub fn demo(name: &str, opts: &Options) -> u8 {
    match demos::find(name) {
        Some(d) => run_config(d.config, opts),
        None => {
            eprintln!("error: unknown demo {name:?}");
            EXIT_USAGE
        }
    }
}

fn run_config(src: &str, opts: &Options) -> u8 {
    let mut cfg = match ScenarioConfig::from_json(src) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(seed) = opts.seed_override {
        cfg = cfg.with_seed(seed);
    }
    let dir = opts
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let result = run(&cfg).and_then(|bundle| {
        let report = constraint_report(&bundle, &cfg.body_force()?, cfg.nu)?;
        write_run(&dir, &bundle, &report)?;
        Ok((bundle, report))
    });
    let (bundle, report) = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    println!(
        "wrote {}: {} snapshots, {} pointwise failures",
        dir.display(),
        bundle.snapshots.len(),
        bundle.failures.len()
    );
    print_summary(&report);
    if bundle.failures.is_empty() {
        EXIT_OK
    } else {
        eprintln!(
            "error: {} pointwise solves failed and were zero-filled",
            bundle.failures.len()
        );
        EXIT_RUNTIME
    }
}

pub fn validate(manifest_path: &Path, opts: &Options) -> u8 {
    let result = load_bundle(manifest_path).and_then(|(m, bundle)| {
        let report = constraint_report(&bundle, &m.config.body_force()?, m.config.nu)?;
        let root = manifest_path.parent().unwrap_or(Path::new("."));
        let stored = fs::read_to_string(root.join(&m.report)).ok();
        Ok((report, stored))
    });
    let (report, stored) = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let json = report.to_json();
    if let Some(dir) = &opts.output_dir {
        let written = fs::create_dir_all(dir)
            .and_then(|_| fs::write(dir.join(REPORT_FILE), &json))
            .and_then(|_| fs::write(dir.join(TABLE_FILE), emit_defect_table(&report)));
        if let Err(e) = written {
            return fail(&e.into());
        }
    }
    print_summary(&report);
    match stored {
        Some(s) if s == json => {
            println!("report matches stored report");
            EXIT_OK
        }
        Some(_) => {
            eprintln!("error: recomputed report differs from stored report");
            EXIT_RUNTIME
        }
        None => {
            eprintln!("error: stored report missing");
            EXIT_RUNTIME
        }
    }
}
