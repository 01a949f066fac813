//! Repeated train/validation/test benchmark over several methods.
//!
//! Every (repeat, rotation) triple is scaled on its training fold. Each
//! method is trained over its grid on the training rows, the model with the
//! best validation accuracy is kept (ties go to the earliest grid point) and
//! its test accuracy is recorded. Forest MILPs train on 75-point subsets of
//! the training fold; CART and the single-tree MILP use the whole fold.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use ocf_core::baselines::accuracy;
use ocf_core::folds::{make_folds_with, Triple};
use ocf_core::rng::derive_seed;
use ocf_core::sampling::{random_subsample, select_training_subset, SubsetSearchConfig};
use ocf_core::{Dataset, Forest};

use crate::data::{load_table, DatasetManifest, RawTable};
use crate::error::{Error, Result};
use crate::kv;
use crate::solver::{SolveStatus, SolverConfig};
use crate::train::{train, Method, TrainParams};

const WHAT: &str = "experiment spec";

/// How the forest MILP's 75-point training subset is picked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Downsampling {
    /// `candidates` uniform subsets, each solved over the whole budget grid.
    Random { candidates: usize },
    /// One subset: the best of `iterations` by SVM validation accuracy.
    Svm { iterations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub manifest: PathBuf,
    pub methods: Vec<Method>,
    pub budgets: Vec<usize>,
    pub seed: u64,
    pub repeats: usize,
    pub folds: usize,
    /// Run only the first `rotations` rotations of each repeat.
    pub rotations: Option<usize>,
    pub tree_depth: u32,
    pub forest_depth: u32,
    pub rf_sample_size: usize,
    pub subset_size: usize,
    pub downsampling: Downsampling,
    pub epsilon: f64,
    pub solver: SolverConfig,
    /// Worker threads; cells are independent.
    pub jobs: usize,
    /// Output directory, relative paths resolved against the spec file.
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(manifest: PathBuf, methods: Vec<Method>) -> Self {
        Self {
            manifest,
            methods,
            budgets: (1..=7).collect(),
            seed: 1,
            repeats: 5,
            folds: 4,
            rotations: None,
            tree_depth: 3,
            forest_depth: 2,
            rf_sample_size: 75,
            subset_size: 75,
            downsampling: Downsampling::Random { candidates: 5 },
            epsilon: ocf_core::formulation::DEFAULT_EPSILON,
            solver: SolverConfig::default(),
            jobs: 1,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.methods.is_empty() {
            return fail("no methods selected".into());
        }
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return fail("budget grid must be non-empty and positive".into());
        }
        if self.rotations == Some(0) || self.rotations.is_some_and(|r| r > self.folds) {
            return fail(format!("rotations must be in 1..={}", self.folds));
        }
        if self.jobs == 0 || self.subset_size == 0 || self.rf_sample_size == 0 {
            return fail("jobs, subset_size and rf_sample_size must be positive".into());
        }
        match self.downsampling {
            Downsampling::Random { candidates: 0 } | Downsampling::Svm { iterations: 0 } => {
                fail("downsampling needs at least one candidate".into())
            }
            _ => Ok(()),
        }
    }

    /// Parses a `key = value` spec. Relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let entries = kv::parse(WHAT, text)?;
        kv::unique(WHAT, &entries)?;
        let mut manifest = None;
        let mut spec = Self::new(PathBuf::new(), Vec::new());
        let mut candidates = None;
        let mut iterations = None;
        let mut mode = "random".to_owned();
        for e in &entries {
            let v = e.value.as_str();
            match e.key.as_str() {
                "dataset" => manifest = Some(base_dir.join(v)),
                "methods" => {
                    spec.methods = list(v)
                        .map(|s| s.parse::<Method>().map_err(|err| Error::parse(WHAT, e.line, 1, err.to_string())))
                        .collect::<Result<_>>()?
                }
                "budgets" => spec.budgets = list(v).map(|s| num(e, s)).collect::<Result<_>>()?,
                "seed" => spec.seed = kv::parse_value(WHAT, e)?,
                "repeats" => spec.repeats = kv::parse_value(WHAT, e)?,
                "folds" => spec.folds = kv::parse_value(WHAT, e)?,
                "rotations" => spec.rotations = Some(kv::parse_value(WHAT, e)?),
                "tree_depth" => spec.tree_depth = kv::parse_value(WHAT, e)?,
                "forest_depth" => spec.forest_depth = kv::parse_value(WHAT, e)?,
                "rf_sample_size" => spec.rf_sample_size = kv::parse_value(WHAT, e)?,
                "subset_size" => spec.subset_size = kv::parse_value(WHAT, e)?,
                "downsampling" => mode = v.to_owned(),
                "subset_candidates" => candidates = Some(kv::parse_value(WHAT, e)?),
                "svm_iterations" => iterations = Some(kv::parse_value(WHAT, e)?),
                "epsilon" => spec.epsilon = kv::parse_value(WHAT, e)?,
                "time_limit" => spec.solver.time_limit_s = kv::parse_value(WHAT, e)?,
                "mip_gap" => spec.solver.mip_gap = kv::parse_value(WHAT, e)?,
                "threads" => spec.solver.threads = kv::parse_value(WHAT, e)?,
                "solver_seed" => spec.solver.seed = kv::parse_value(WHAT, e)?,
                "solver" => spec.solver.kind = kv::parse_value(WHAT, e)?,
                "jobs" => spec.jobs = kv::parse_value(WHAT, e)?,
                "output" => spec.output = Some(base_dir.join(v)),
                key => return Err(Error::parse(WHAT, e.line, 1, format!("unknown key `{key}`"))),
            }
        }
        spec.manifest = manifest.ok_or_else(|| Error::parse(WHAT, 0, 0, "missing `dataset`"))?;
        spec.downsampling = match mode.as_str() {
            "random" => Downsampling::Random {
                candidates: candidates.unwrap_or(5),
            },
            "svm" => Downsampling::Svm {
                iterations: iterations.unwrap_or(100),
            },
            other => return Err(Error::Config(format!("downsampling must be random or svm, got `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn num(e: &kv::Entry, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::parse(WHAT, e.line, e.key.len() + 1, format!("bad integer `{s}` in `{}`", e.key)))
}

/// Outcome of one (triple, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub repeat: usize,
    pub rotation: usize,
    pub method: Method,
    pub budget: Option<usize>,
    /// Index of the chosen downsampling candidate.
    pub subset_candidate: Option<usize>,
    pub subset_seed: Option<u64>,
    /// Percentages.
    pub validation_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    /// `ok` for solver-free methods, the chosen solve's status for MILP
    /// methods, `failed` when no grid point produced a model.
    pub status: String,
    pub gap: Option<f64>,
    pub solves: usize,
    pub time_limited_solves: usize,
    pub failed_solves: usize,
    pub message: Option<String>,
    pub wall_time: f64,
    pub log_path: Option<PathBuf>,
    /// Global row indices the cell trained or selected on.
    pub fitted_rows: Vec<usize>,
}

impl CellRecord {
    pub fn failed(&self) -> bool {
        self.test_accuracy.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub dataset: String,
    pub methods: Vec<Method>,
    pub records: Vec<CellRecord>,
}

impl ExperimentResult {
    /// Methods whose every cell failed.
    pub fn failed_methods(&self) -> Vec<Method> {
        self.methods
            .iter()
            .copied()
            .filter(|&m| self.records.iter().filter(|r| r.method == m).all(CellRecord::failed))
            .collect()
    }
}

/// Checks that no test or validation row was used for fitting.
pub fn audit_hygiene(triple: &Triple, record: &CellRecord) -> Result<()> {
    let leaked: Vec<usize> = record
        .fitted_rows
        .iter()
        .copied()
        .filter(|i| triple.test.binary_search(i).is_ok() || triple.validation.binary_search(i).is_ok())
        .collect();
    if !leaked.is_empty() || record.fitted_rows.iter().any(|i| triple.train.binary_search(i).is_err()) {
        return Err(Error::Config(format!(
            "{} cell of triple ({}, {}) fitted on rows outside its training fold: {leaked:?}",
            record.method, triple.repeat, triple.rotation
        )));
    }
    Ok(())
}

struct Folds {
    train: Dataset,
    validation: Dataset,
    test: Dataset,
}

fn percent(data: &Dataset, forest: &Forest) -> Result<f64> {
    Ok(100.0 * accuracy(data, |x| forest.predict(x))?)
}

struct Candidate {
    budget: Option<usize>,
    subset: Option<(usize, u64)>,
    validation: f64,
    test: f64,
    status: String,
    gap: Option<f64>,
    log: Option<PathBuf>,
}

fn run_cell(spec: &ExperimentSpec, table: &RawTable, triple: &Triple, method: Method) -> Result<CellRecord> {
    let started = Instant::now();
    let folds = Folds {
        train: table.scaled_subset(&triple.train, &triple.train)?,
        validation: table.scaled_subset(&triple.train, &triple.validation)?,
        test: table.scaled_subset(&triple.train, &triple.test)?,
    };
    let cell_seed = derive_seed(spec.seed, &[triple.repeat as u64, triple.rotation as u64, method as u64]);
    let subset_size = spec.subset_size.min(folds.train.n());

    // (candidate index, subset seed, rows into the training fold)
    let subsets: Vec<(usize, u64, Vec<usize>)> = match (method, spec.downsampling) {
        (Method::Ocf3, Downsampling::Random { candidates }) => (0..candidates)
            .map(|k| {
                let rows = random_subsample(folds.train.n(), subset_size, cell_seed, k as u64)?;
                Ok((k, cell_seed, rows))
            })
            .collect::<Result<_>>()?,
        (Method::Ocf3, Downsampling::Svm { iterations }) => {
            let cfg = SubsetSearchConfig {
                subset_size,
                ..SubsetSearchConfig::new(iterations, cell_seed)
            };
            let sel = select_training_subset(&folds.train, &folds.validation, &cfg)?;
            vec![(sel.iteration, cell_seed, sel.indices)]
        }
        _ => vec![(0, cell_seed, (0..folds.train.n()).collect())],
    };
    let budgets: Vec<Option<usize>> = if method.uses_budget() {
        spec.budgets.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };

    let mut best: Option<Candidate> = None;
    let (mut solves, mut time_limited, mut failed) = (0, 0, 0);
    let mut last_error = None;
    let mut fitted_rows: Vec<usize> = Vec::new();
    for (k, subset_seed, rows) in &subsets {
        let data = if rows.len() == folds.train.n() { folds.train.clone() } else { folds.train.subset(rows)? };
        fitted_rows.extend(rows.iter().map(|&i| triple.train[i]));
        for &budget in &budgets {
            let params = TrainParams {
                budget: budget.unwrap_or(1),
                tree_depth: spec.tree_depth,
                forest_depth: spec.forest_depth,
                rf_sample_size: spec.rf_sample_size,
                epsilon: spec.epsilon,
                seed: derive_seed(cell_seed, &[*k as u64, budget.unwrap_or(0) as u64]),
            };
            let trained = train(method, &data, &params, &spec.solver);
            if method.needs_solver() {
                solves += 1;
            }
            let trained = match trained {
                Ok(t) => t,
                Err(e) => {
                    log::warn!("{method} ({}, {}) budget {budget:?}: {e}", triple.repeat, triple.rotation);
                    failed += 1;
                    last_error = Some(e.to_string());
                    continue;
                }
            };
            let (status, gap, log) = match &trained.solve {
                Some(s) => {
                    if s.outcome.status == SolveStatus::FeasibleTimeLimit {
                        time_limited += 1;
                    }
                    (s.outcome.status.as_str().to_owned(), s.outcome.gap, s.outcome.log_path.clone())
                }
                None => ("ok".to_owned(), None, None),
            };
            let validation = percent(&folds.validation, &trained.forest)?;
            if best.as_ref().is_none_or(|b| validation > b.validation) {
                best = Some(Candidate {
                    budget,
                    subset: (method == Method::Ocf3).then_some((*k, *subset_seed)),
                    validation,
                    test: percent(&folds.test, &trained.forest)?,
                    status,
                    gap,
                    log,
                });
            }
        }
    }
    fitted_rows.sort_unstable();
    fitted_rows.dedup();
    let record = CellRecord {
        repeat: triple.repeat,
        rotation: triple.rotation,
        method,
        budget: best.as_ref().and_then(|b| b.budget),
        subset_candidate: best.as_ref().and_then(|b| b.subset.map(|s| s.0)),
        subset_seed: best.as_ref().and_then(|b| b.subset.map(|s| s.1)),
        validation_accuracy: best.as_ref().map(|b| b.validation),
        test_accuracy: best.as_ref().map(|b| b.test),
        status: best.as_ref().map_or_else(|| "failed".to_owned(), |b| b.status.clone()),
        gap: best.as_ref().and_then(|b| b.gap),
        solves,
        time_limited_solves: time_limited,
        failed_solves: failed,
        message: if best.is_none() { last_error } else { None },
        wall_time: started.elapsed().as_secs_f64(),
        log_path: best.and_then(|b| b.log),
        fitted_rows,
    };
    audit_hygiene(triple, &record)?;
    Ok(record)
}

/// Runs every (triple, method) cell. Solve failures are recorded in the
/// cell; data and configuration errors abort the run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let manifest = DatasetManifest::from_file(&spec.manifest)?;
    let table = load_table(&manifest)?;
    run_on_table(spec, &manifest.name, &table)
}

pub fn run_on_table(spec: &ExperimentSpec, name: &str, table: &RawTable) -> Result<ExperimentResult> {
    spec.validate()?;
    let plan = make_folds_with(table.n, spec.seed, spec.repeats, spec.folds)?;
    let rotations = spec.rotations.unwrap_or(spec.folds);
    let triples: Vec<Triple> = plan.triples().into_iter().filter(|t| t.rotation < rotations).collect();
    let jobs: Vec<(usize, Method)> = (0..triples.len()).flat_map(|t| spec.methods.iter().map(move |&m| (t, m))).collect();
    let slots: Mutex<Vec<Option<Result<CellRecord>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..spec.jobs.min(jobs.len()) {
            s.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(t, method)) = jobs.get(j) else { break };
                let triple = &triples[t];
                log::info!("cell {}/{}: {method} repeat {} rotation {}", j + 1, jobs.len(), triple.repeat, triple.rotation);
                let out = run_cell(spec, table, triple, method);
                slots.lock().expect("no worker panicked")[j] = Some(out);
            });
        }
    });
    let records = slots
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        dataset: name.to_owned(),
        methods: spec.methods.clone(),
        records,
    })
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub records: usize,
    pub failed: usize,
    pub solves: usize,
    pub time_limited_solves: usize,
}

impl MethodSummary {
    /// `mean ± std` with two decimals, or `-` when every cell failed.
    pub fn cell(&self) -> String {
        match (self.mean, self.std) {
            (Some(m), Some(s)) => format!("{m:.2} ± {s:.2}"),
            _ => "-".to_owned(),
        }
    }
}

pub fn summarize(result: &ExperimentResult) -> Vec<MethodSummary> {
    result
        .methods
        .iter()
        .map(|&method| {
            let rows: Vec<&CellRecord> = result.records.iter().filter(|r| r.method == method).collect();
            let acc: Vec<f64> = rows.iter().filter_map(|r| r.test_accuracy).collect();
            let ms = mean_std(&acc);
            MethodSummary {
                method,
                mean: ms.map(|m| m.0),
                std: ms.map(|m| m.1),
                records: rows.len(),
                failed: rows.iter().filter(|r| r.failed()).count(),
                solves: rows.iter().map(|r| r.solves).sum(),
                time_limited_solves: rows.iter().map(|r| r.time_limited_solves).sum(),
            }
        })
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fixed(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// Per-cell records without timings or paths; identical across reruns with
/// the same seed whenever every solve finishes.
pub fn results_csv(result: &ExperimentResult) -> Result<String> {
    let header = [
        "dataset",
        "repeat",
        "rotation",
        "method",
        "budget",
        "subset_candidate",
        "subset_seed",
        "validation_accuracy",
        "test_accuracy",
        "status",
        "gap",
        "solves",
        "time_limited_solves",
        "failed_solves",
        "message",
    ];
    csv_text(
        &header,
        result.records.iter().map(|r| {
            vec![
                result.dataset.clone(),
                r.repeat.to_string(),
                r.rotation.to_string(),
                r.method.as_str().to_owned(),
                opt(r.budget),
                opt(r.subset_candidate),
                opt(r.subset_seed),
                fixed(r.validation_accuracy),
                fixed(r.test_accuracy),
                r.status.clone(),
                fixed(r.gap),
                r.solves.to_string(),
                r.time_limited_solves.to_string(),
                r.failed_solves.to_string(),
                r.message.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn timings_csv(result: &ExperimentResult) -> Result<String> {
    csv_text(
        &["repeat", "rotation", "method", "wall_time_s", "log"],
        result.records.iter().map(|r| {
            vec![
                r.repeat.to_string(),
                r.rotation.to_string(),
                r.method.as_str().to_owned(),
                format!("{:.3}", r.wall_time),
                r.log_path.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            ]
        }),
    )
}

pub fn summary_csv(result: &ExperimentResult) -> Result<String> {
    csv_text(
        &["dataset", "method", "mean", "std", "records", "failed", "solves", "time_limited_solves"],
        summarize(result).into_iter().map(|s| {
            vec![
                result.dataset.clone(),
                s.method.as_str().to_owned(),
                s.mean.map(|v| format!("{v:.2}")).unwrap_or_default(),
                s.std.map(|v| format!("{v:.2}")).unwrap_or_default(),
                s.records.to_string(),
                s.failed.to_string(),
                s.solves.to_string(),
                s.time_limited_solves.to_string(),
            ]
        }),
    )
}

/// One row in the fixed CART / OCT / 3-RF / 500-RF / 3-OCF column order;
/// methods that were not run show as blanks.
pub fn summary_table(result: &ExperimentResult) -> String {
    let summaries = summarize(result);
    let cells: Vec<String> = Method::ALL
        .iter()
        .map(|m| summaries.iter().find(|s| s.method == *m).map_or_else(String::new, MethodSummary::cell))
        .collect();
    let mut widths: Vec<usize> = Method::ALL.iter().map(|m| m.label().chars().count()).collect();
    for (w, c) in widths.iter_mut().zip(&cells) {
        *w = (*w).max(c.chars().count());
    }
    let name_w = result.dataset.chars().count().max("dataset".len());
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w - s.chars().count()));
    let mut s = String::new();
    let _ = write!(s, "{}", pad("dataset", name_w));
    for (m, w) in Method::ALL.iter().zip(&widths) {
        let _ = write!(s, " | {}", pad(m.label(), *w));
    }
    s.push('\n');
    let _ = write!(s, "{}", pad(&result.dataset, name_w));
    for (c, w) in cells.iter().zip(&widths) {
        let _ = write!(s, " | {}", pad(c, *w));
    }
    s.push('\n');
    for m in &summaries {
        if m.solves > 0 {
            let _ = writeln!(
                s,
                "{}: {}/{} solves stopped at the time limit",
                m.method.label(),
                m.time_limited_solves,
                m.solves
            );
        }
        if m.failed > 0 {
            let _ = writeln!(s, "{}: {}/{} cells produced no model", m.method.label(), m.failed, m.records);
        }
    }
    s
}

/// Writes `results.csv`, `summary.csv`, `summary.txt` and `timings.csv`.
pub fn write_reports(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("results.csv", results_csv(result)?),
        ("summary.csv", summary_csv(result)?),
        ("summary.txt", summary_table(result)),
        ("timings.csv", timings_csv(result)?),
    ];
    let mut out = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(method: Method, acc: Option<f64>) -> CellRecord {
        CellRecord {
            repeat: 0,
            rotation: 0,
            method,
            budget: None,
            subset_candidate: None,
            subset_seed: None,
            validation_accuracy: acc,
            test_accuracy: acc,
            status: if acc.is_some() { "ok" } else { "failed" }.into(),
            gap: None,
            solves: 0,
            time_limited_solves: 0,
            failed_solves: 0,
            message: None,
            wall_time: 0.0,
            log_path: None,
            fitted_rows: vec![],
        }
    }

    #[test]
    fn summary_cells() {
        let one = ExperimentResult {
            dataset: "d".into(),
            methods: vec![Method::Cart],
            records: vec![record(Method::Cart, Some(80.0))],
        };
        assert_eq!(summarize(&one)[0].cell(), "80.00 ± 0.00");
        let two = ExperimentResult {
            records: vec![record(Method::Cart, Some(70.0)), record(Method::Cart, Some(90.0))],
            ..one.clone()
        };
        assert_eq!(summarize(&two)[0].cell(), "80.00 ± 14.14");
        let table = summary_table(&two);
        assert!(table.starts_with("dataset | CART"), "{table}");
        assert!(table.contains("80.00 ± 14.14"));
    }

    #[test]
    fn failed_column_is_flagged() {
        let r = ExperimentResult {
            dataset: "d".into(),
            methods: vec![Method::Cart, Method::Ocf3],
            records: vec![record(Method::Cart, Some(50.0)), record(Method::Ocf3, None)],
        };
        assert_eq!(r.failed_methods(), vec![Method::Ocf3]);
        assert!(summary_table(&r).contains("3-OCF: 1/1 cells produced no model"));
    }

    #[test]
    fn spec_parsing() {
        let text = "dataset = d.manifest\nmethods = cart, ocf3\nbudgets = 1,3\nrotations = 1\ndownsampling = svm\nsvm_iterations = 7\ntime_limit = 5\n";
        let s = ExperimentSpec::parse(text, Path::new("/x")).unwrap();
        assert_eq!(s.manifest, Path::new("/x/d.manifest"));
        assert_eq!(s.methods, vec![Method::Cart, Method::Ocf3]);
        assert_eq!(s.budgets, vec![1, 3]);
        assert_eq!(s.downsampling, Downsampling::Svm { iterations: 7 });
        assert_eq!(s.solver.time_limit_s, 5.0);
        assert!(ExperimentSpec::parse("dataset = d\nmethods = cart\nbogus = 1\n", Path::new(".")).is_err());
        assert!(ExperimentSpec::parse("dataset = d\nmethods =\n", Path::new(".")).is_err());
        assert!(ExperimentSpec::parse("dataset = d\nmethods = cart\nbudgets = 0\n", Path::new(".")).is_err());
        assert!(ExperimentSpec::parse("methods = cart\n", Path::new(".")).is_err());
    }

    #[test]
    fn hygiene_detects_leaks() {
        let triple = Triple {
            repeat: 0,
            rotation: 0,
            train: vec![0, 1, 2],
            validation: vec![3],
            test: vec![4],
        };
        let mut r = record(Method::Cart, Some(1.0));
        r.fitted_rows = vec![0, 2];
        assert!(audit_hygiene(&triple, &r).is_ok());
        r.fitted_rows = vec![0, 4];
        assert!(audit_hygiene(&triple, &r).is_err());
    }
}
