#![allow(dead_code)]

use std::path::{Path, PathBuf};

use ocf::solver::{solver_available, SolverConfig};
use ocf_core::formulation::{ForestModel, Symbol};

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn scratch() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

/// Solver config for exact solves of tiny models, or `None` (with a note on
/// stderr) when no solver binary is installed.
pub fn exact_solver(workspace: &Path) -> Option<SolverConfig> {
    let cfg = SolverConfig {
        time_limit_s: 300.0,
        workspace: Some(workspace.to_path_buf()),
        ..SolverConfig::default()
    };
    if solver_available(&cfg) {
        Some(cfg)
    } else {
        eprintln!("no MILP solver found; skipping solver-backed checks");
        None
    }
}

pub fn value(fm: &ForestModel, x: &[f64], sym: Symbol) -> f64 {
    x[fm.registry.id(sym).expect("symbol present").0]
}

pub fn bit(fm: &ForestModel, x: &[f64], sym: Symbol) -> u8 {
    u8::from(value(fm, x, sym) > 0.5)
}
