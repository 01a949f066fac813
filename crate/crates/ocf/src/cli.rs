//! Command-line surface of the `ocf` binary.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ocf_core::baselines::{accuracy, n_min_for};
use ocf_core::folds::make_folds_with;
use ocf_core::formulation::{build_ocf_model, LeafConsistency, OcfConfig};
use ocf_core::Dataset;

use crate::data::{format_fold_plan, load_table, DatasetManifest, RawTable};
use crate::dot::write_forest_dot;
use crate::error::{Error, Result};
use crate::forest_format::{read_forest_file, write_forest};
use crate::harness::{run_experiment, summary_table, write_reports, ExperimentSpec};
use crate::lp::write_lp;
use crate::solver::{SolverConfig, SolverKind};
use crate::trace::{format_trace, parse_observation};
use crate::train::{solve_forest, train, Method, TrainParams};

#[derive(Debug, Parser)]
#[command(name = "ocf", version, about = "Optimal classification forests")]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Directory for solver scratch files and logs.
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    /// MILP solver: cbc, highs or auto (HiGHS when on PATH, else CBC).
    #[arg(long, global = true)]
    pub solver: Option<SolverKind>,
    /// MILP solver executable (defaults to the solver's name on PATH).
    #[arg(long, global = true)]
    pub solver_path: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a dataset and print its shape, encoding and fold plan.
    Ingest(IngestArgs),
    /// Train one method on a whole dataset and write the forest file.
    Train(TrainArgs),
    /// Build and solve the forest MILP for explicit (trees, depth, budget).
    Solve(SolveArgs),
    /// Run the repeated cross-validation benchmark of a spec file.
    Benchmark(BenchmarkArgs),
    /// Render each tree of a forest file as a DOT graph.
    ExportDot(ExportDotArgs),
    /// Write the forest MILP in LP format.
    EmitLp(EmitLpArgs),
    /// Show each tree's path and vote for one observation.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Also write the 5×4 fold plan to this file.
    #[arg(long)]
    pub folds_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Per-solve wall-clock limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mip_gap: f64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Keep LP and solution files after the solve.
    #[arg(long)]
    pub keep_files: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// cart, oct, rf3, rf500 or ocf3.
    #[arg(long)]
    pub method: Method,
    #[arg(long, default_value_t = 3)]
    pub budget: usize,
    #[arg(long, default_value_t = 3)]
    pub tree_depth: u32,
    #[arg(long, default_value_t = 2)]
    pub forest_depth: u32,
    /// Forest file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub trees: usize,
    #[arg(long, default_value_t = 2)]
    pub depth: u32,
    #[arg(long, default_value_t = 3)]
    pub budget: usize,
    /// Minimum leaf support; defaults to 2.5% of the rows, rounded up.
    #[arg(long)]
    pub n_min: Option<usize>,
    #[arg(long, default_value_t = ocf_core::formulation::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long)]
    pub no_symmetry_breaking: bool,
    #[arg(long)]
    pub no_warm_start: bool,
    /// pairwise, leaf-label or auto.
    #[arg(long, default_value = "auto", value_parser = parse_consistency)]
    pub leaf_consistency: LeafConsistency,
}

fn parse_consistency(s: &str) -> std::result::Result<LeafConsistency, String> {
    match s {
        "pairwise" => Ok(LeafConsistency::Pairwise),
        "leaf-label" => Ok(LeafConsistency::LeafLabel),
        "auto" => Ok(LeafConsistency::Auto),
        _ => Err(format!("expected pairwise, leaf-label or auto, got `{s}`")),
    }
}

impl ModelArgs {
    fn config(&self, n: usize) -> OcfConfig {
        OcfConfig {
            epsilon: self.epsilon,
            symmetry_breaking: !self.no_symmetry_breaking,
            warm_start: !self.no_warm_start,
            leaf_consistency: self.leaf_consistency,
            ..OcfConfig::new(self.trees, self.depth, self.budget, self.n_min.unwrap_or_else(|| n_min_for(n)))
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Forest file to write when a solution is found.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Report directory; overrides the spec's `output`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of methods; overrides the spec.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Per-solve limit in seconds; overrides the spec.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    #[arg(long)]
    pub forest: PathBuf,
    /// Directory receiving `tree_<r>.dot`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmitLpArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub forest: PathBuf,
    /// Feature values, comma separated. Scaled with the manifest's min-max
    /// when `--manifest` is given, otherwise taken as already normalized.
    #[arg(long, conflicts_with = "row", required_unless_present = "row")]
    pub observation: Option<String>,
    /// Row of the manifest's dataset (zero-based).
    #[arg(long, requires = "manifest")]
    pub row: Option<usize>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

impl Cli {
    fn solver(&self, args: &SolverArgs) -> SolverConfig {
        SolverConfig {
            kind: self.solver.clone().unwrap_or_else(SolverKind::auto),
            binary_path: self.solver_path.clone(),
            time_limit_s: args.time_limit,
            mip_gap: args.mip_gap,
            threads: args.threads,
            seed: self.seed,
            workspace: self.workspace.clone(),
            keep_files: args.keep_files,
        }
    }
}

fn load(manifest: &Path) -> Result<(DatasetManifest, RawTable, Dataset)> {
    let m = DatasetManifest::from_file(manifest)?;
    let table = load_table(&m)?;
    let data = table.normalized()?;
    Ok((m, table, data))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs a parsed invocation, writing results to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::io("<stdout>", e);
    match &cli.command {
        Command::Ingest(a) => {
            let (m, table, data) = load(&a.manifest)?;
            writeln!(out, "dataset {} ({} rows, {} features, {} positive)", m.name, data.n(), data.p(), data.positives()).map_err(io)?;
            for (q, name) in data.feature_names().iter().enumerate() {
                writeln!(out, "feature {q} {name}").map_err(io)?;
            }
            let prov = &table.provenance;
            writeln!(out, "source {} ({} raw rows, {} dropped)", prov.source, prov.raw_rows, prov.dropped_rows).map_err(io)?;
            for note in &prov.notes {
                writeln!(out, "note {note}").map_err(io)?;
            }
            if let Some(path) = &a.folds_out {
                let plan = make_folds_with(data.n(), cli.seed, 5, 4)?;
                write_file(path, &format_fold_plan(&plan))?;
                writeln!(out, "fold plan written to {}", path.display()).map_err(io)?;
            }
        }
        Command::Train(a) => {
            let (_, _, data) = load(&a.manifest)?;
            let params = TrainParams {
                budget: a.budget,
                tree_depth: a.tree_depth,
                forest_depth: a.forest_depth,
                seed: cli.seed,
                ..TrainParams::default()
            };
            let trained = train(a.method, &data, &params, &cli.solver(&a.solver))?;
            if let Some(s) = &trained.solve {
                writeln!(out, "status {} gap {}", s.outcome.status, s.outcome.gap.map_or("-".into(), |g| format!("{g:.4}"))).map_err(io)?;
            }
            let acc = accuracy(&data, |x| trained.forest.predict(x))?;
            writeln!(out, "{} training accuracy {:.2}% with {} splits", a.method.label(), 100.0 * acc, trained.forest.total_splits())
                .map_err(io)?;
            write_file(&a.out, &write_forest(&trained.forest, data.feature_names())?)?;
            writeln!(out, "forest written to {}", a.out.display()).map_err(io)?;
        }
        Command::Solve(a) => {
            let (_, _, data) = load(&a.model.manifest)?;
            let cfg = a.model.config(data.n());
            let solved = solve_forest(&data, &cfg, &cli.solver(&a.solver), cli.seed)?;
            let o = &solved.outcome;
            writeln!(out, "status {}", o.status).map_err(io)?;
            if let Some(w) = solved.warm_start_errors {
                writeln!(out, "warm start errors {}", w.round()).map_err(io)?;
            }
            if let Some(v) = o.objective_value {
                writeln!(out, "objective {v} ({} training errors)", (v * data.n() as f64).round()).map_err(io)?;
            }
            if let Some(g) = o.gap {
                writeln!(out, "gap {g:.6}").map_err(io)?;
            }
            if let Some(audit) = &solved.audit {
                writeln!(out, "audit {}", if audit.is_feasible() { "feasible" } else { "VIOLATED" }).map_err(io)?;
            }
            if let Some(log) = &o.log_path {
                writeln!(out, "log {}", log.display()).map_err(io)?;
            }
            match (&solved.forest, &a.out) {
                (Some(f), Some(path)) => {
                    write_file(path, &write_forest(f, data.feature_names())?)?;
                    writeln!(out, "forest written to {}", path.display()).map_err(io)?;
                }
                (None, _) => {
                    return Err(Error::Solver {
                        message: format!("no solution ({})", o.status),
                        log: o.log_path.clone().unwrap_or_default(),
                    })
                }
                _ => {}
            }
        }
        Command::Benchmark(a) => {
            let mut spec = ExperimentSpec::from_file(&a.spec)?;
            spec.seed = cli.seed;
            spec.solver.binary_path = cli.solver_path.clone();
            if let Some(kind) = &cli.solver {
                spec.solver.kind = kind.clone();
            }
            spec.solver.workspace = cli.workspace.clone();
            if let Some(m) = &a.methods {
                spec.methods = m.clone();
            }
            if let Some(t) = a.time_limit {
                spec.solver.time_limit_s = t;
            }
            if let Some(j) = a.jobs {
                spec.jobs = j;
            }
            let dir = a
                .out
                .clone()
                .or_else(|| spec.output.clone())
                .unwrap_or_else(|| cli.workspace.clone().unwrap_or_else(|| PathBuf::from(".")).join("benchmark"));
            let result = run_experiment(&spec)?;
            for path in write_reports(&result, &dir)? {
                writeln!(out, "wrote {}", path.display()).map_err(io)?;
            }
            write!(out, "{}", summary_table(&result)).map_err(io)?;
            let failed = result.failed_methods();
            if !failed.is_empty() {
                let names: Vec<&str> = failed.iter().map(|m| m.label()).collect();
                writeln!(out, "no usable model for: {}", names.join(", ")).map_err(io)?;
                return Ok(if failed.iter().any(|m| m.needs_solver()) { 3 } else { 2 });
            }
        }
        Command::ExportDot(a) => {
            let file = read_forest_file(&a.forest)?;
            for path in write_forest_dot(&file.forest, &file.feature_names, &a.out)? {
                writeln!(out, "wrote {}", path.display()).map_err(io)?;
            }
        }
        Command::EmitLp(a) => {
            let (_, _, data) = load(&a.model.manifest)?;
            let fm = build_ocf_model(&data, &a.model.config(data.n()))?;
            write_file(&a.out, &write_lp(&fm.model)?)?;
            writeln!(
                out,
                "{} variables, {} constraints written to {}",
                fm.model.num_variables(),
                fm.model.constraints().len(),
                a.out.display()
            )
            .map_err(io)?;
        }
        Command::Trace(a) => {
            let file = read_forest_file(&a.forest)?;
            let x = match (&a.observation, a.row, &a.manifest) {
                (Some(text), _, None) => parse_observation(text)?,
                (Some(text), _, Some(m)) => {
                    let (_, _, data) = load(m)?;
                    let scaler = data.provenance().scaler.clone().expect("normalized data carry their scaler");
                    ocf_core::dataset::normalize_with(&scaler, &parse_observation(text)?)?
                }
                (None, Some(i), Some(m)) => {
                    let (_, _, data) = load(m)?;
                    if i >= data.n() {
                        return Err(Error::Config(format!("row {i} out of range (dataset has {} rows)", data.n())));
                    }
                    writeln!(out, "row {i} label {}", data.label(i)).map_err(io)?;
                    data.row(i).to_vec()
                }
                _ => return Err(Error::Config("give --observation or --row with --manifest".into())),
            };
            if x.len() != file.forest.n_features() {
                return Err(Error::Config(format!(
                    "observation has {} values, forest expects {}",
                    x.len(),
                    file.forest.n_features()
                )));
            }
            write!(out, "{}", format_trace(&file.forest, &file.feature_names, &x)?).map_err(io)?;
        }
    }
    Ok(0)
}

/// Parses `args`, runs the command and maps failures to exit codes
/// (0 ok, 1 usage, 2 data, 3 solver).
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    eprintln!("seed: {}", cli.seed);
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
