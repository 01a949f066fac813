//! External MILP solvers driven through LP files.
//!
//! Profiles: CBC and HiGHS command-line solvers, and a generic profile
//! whose command line is a template with `{lp}`, `{sol}`, `{time}`, `{gap}`,
//! `{threads}`, `{seed}` and `{start}` placeholders, reading either
//! CBC-style or `name value` solution files.
//!
//! The solver binary is taken from the configuration, then from the
//! `OCF_SOLVER_PATH` environment variable, then looked up on `PATH`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use ocf_core::milp::MilpModel;

use crate::error::{Error, Result};
use crate::lp::{format_number, write_lp};

pub const SOLVER_PATH_ENV: &str = "OCF_SOLVER_PATH";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFormat {
    /// Status line, then `index name value [reduced cost]` per column.
    Cbc,
    /// `name value` per line; `#` comments, optionally
    /// `# Objective value = v`.
    NameValue,
    /// HiGHS raw solution file: model status, then a `# Columns n` block.
    /// Start files use the MIPLIB `=obj=` layout.
    Highs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverKind {
    Cbc,
    Highs,
    Generic { command: Vec<String>, format: SolutionFormat },
}

impl SolverKind {
    /// HiGHS when a `highs` binary is on `PATH`, else CBC.
    pub fn auto() -> Self {
        if find_on_path("highs").is_some() {
            SolverKind::Highs
        } else {
            SolverKind::Cbc
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Cbc => "cbc",
            SolverKind::Highs => "highs",
            SolverKind::Generic { .. } => "generic",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    /// `cbc`, `highs` or `auto`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cbc" => Ok(SolverKind::Cbc),
            "highs" => Ok(SolverKind::Highs),
            "auto" => Ok(SolverKind::auto()),
            other => Err(Error::Config(format!("unknown solver `{other}` (expected cbc, highs or auto)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub binary_path: Option<PathBuf>,
    pub time_limit_s: f64,
    pub mip_gap: f64,
    pub threads: usize,
    pub seed: u64,
    /// Root for per-solve directories and the `logs/` directory.
    pub workspace: Option<PathBuf>,
    /// Keep the per-solve directory after a successful solve.
    pub keep_files: bool,
}

impl Default for SolverConfig {
    /// Solver picked by [`SolverKind::auto`].
    fn default() -> Self {
        Self {
            kind: SolverKind::auto(),
            binary_path: None,
            time_limit_s: 60.0,
            mip_gap: 0.0,
            threads: 1,
            seed: 1,
            workspace: None,
            keep_files: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Stopped by a limit with an incumbent.
    FeasibleTimeLimit,
    /// Stopped by a limit before any feasible point was found.
    NoIncumbent,
    Infeasible,
    Error,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::FeasibleTimeLimit => "feasible-time-limit",
            SolveStatus::NoIncumbent => "no-incumbent",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Error => "error",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::FeasibleTimeLimit)
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Objective recomputed from the assignment (constant included).
    pub objective_value: Option<f64>,
    /// Objective as the solver reported it, constant added back.
    pub reported_objective: Option<f64>,
    /// Dense by model column; present iff the status has a solution.
    pub assignment: Option<Vec<f64>>,
    /// Relative gap; 0 when optimal, `None` when the solver did not say.
    pub gap: Option<f64>,
    pub wall_time: f64,
    pub log_path: Option<PathBuf>,
    pub message: Option<String>,
}

/// Solution file contents before status reconciliation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: Option<SolveStatus>,
    pub reported_objective: Option<f64>,
    pub assignment: Option<Vec<f64>>,
}

/// Parses a solution file against `model`. Columns the file omits are 0.
pub fn parse_solution(format: SolutionFormat, text: &str, model: &MilpModel) -> Result<ParsedSolution> {
    const WHAT: &str = "solution";
    let mut values = vec![0.0; model.num_variables()];
    let mut status = None;
    let mut reported = None;
    let mut any = false;
    if format == SolutionFormat::Highs {
        return parse_highs(text, model);
    }
    let mut lines = text.lines().enumerate().peekable();
    if format == SolutionFormat::Cbc {
        let Some((_, head)) = lines.next() else {
            return Err(Error::parse(WHAT, 1, 1, "empty solution file"));
        };
        let lower = head.trim().to_ascii_lowercase();
        status = Some(if lower.starts_with("optimal") {
            SolveStatus::Optimal
        } else if lower.contains("infeasible") {
            SolveStatus::Infeasible
        } else if lower.starts_with("stopped") {
            SolveStatus::FeasibleTimeLimit
        } else if lower.starts_with("unbounded") {
            SolveStatus::Error
        } else {
            return Err(Error::parse(WHAT, 1, 1, format!("unknown status line `{}`", head.trim())));
        });
        if let Some(pos) = lower.find("objective value") {
            let v = lower[pos + "objective value".len()..].trim();
            reported = v.parse::<f64>().ok().map(|v| v + model.objective_constant());
        }
        if status == Some(SolveStatus::Infeasible) {
            return Ok(ParsedSolution {
                status,
                reported_objective: None,
                assignment: None,
            });
        }
    }
    for (k, raw) in lines {
        let line = k + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('#') {
            if let Some((key, v)) = c.split_once('=') {
                if key.trim().eq_ignore_ascii_case("objective value") {
                    reported = v.trim().parse().ok();
                }
            }
            continue;
        }
        let t = t.trim_start_matches('*').trim_start();
        let fields: Vec<&str> = t.split_whitespace().collect();
        let (name, value) = match (format, fields.as_slice()) {
            (SolutionFormat::Cbc, [_, name, value, ..]) => (*name, *value),
            (SolutionFormat::NameValue, [name, value]) => (*name, *value),
            (SolutionFormat::Highs, _) => unreachable!("handled above"),
            _ => return Err(Error::parse(WHAT, line, 1, format!("malformed line `{t}`"))),
        };
        let id = model
            .var_by_name(name)
            .ok_or_else(|| Error::parse(WHAT, line, 1, format!("unknown variable `{name}`")))?;
        values[id.0] = value
            .parse()
            .map_err(|_| Error::parse(WHAT, line, 1, format!("bad value `{value}` for {name}")))?;
        any = true;
    }
    let has = status.is_none_or(SolveStatus::has_solution);
    Ok(ParsedSolution {
        status,
        reported_objective: reported,
        assignment: (has && (any || status.is_some())).then_some(values),
    })
}

fn parse_highs(text: &str, model: &MilpModel) -> Result<ParsedSolution> {
    const WHAT: &str = "solution";
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    match lines.next() {
        Some((_, "Model status")) => {}
        Some((line, other)) => return Err(Error::parse(WHAT, line, 1, format!("expected `Model status`, found `{other}`"))),
        None => return Err(Error::parse(WHAT, 1, 1, "empty solution file")),
    }
    let (line, model_status) = lines
        .next()
        .ok_or_else(|| Error::parse(WHAT, 2, 1, "missing model status"))?;
    let mut lines = lines.skip_while(|(_, l)| *l != "# Primal solution values").skip(1);
    let primal = lines.next().map(|(_, l)| l).unwrap_or("None");
    let status = match model_status {
        "Optimal" => SolveStatus::Optimal,
        "Infeasible" => SolveStatus::Infeasible,
        s if s.ends_with("limit reached") || s.starts_with("Interrupted") => {
            if primal == "Feasible" {
                SolveStatus::FeasibleTimeLimit
            } else {
                SolveStatus::NoIncumbent
            }
        }
        s if s.contains("nbounded") || s.starts_with("Not Set") || s.contains("error") => SolveStatus::Error,
        other => return Err(Error::parse(WHAT, line, 1, format!("unknown model status `{other}`"))),
    };
    if !status.has_solution() {
        return Ok(ParsedSolution {
            status: Some(status),
            reported_objective: None,
            assignment: None,
        });
    }
    if primal != "Feasible" {
        return Err(Error::parse(WHAT, line, 1, format!("status `{model_status}` without a feasible primal solution")));
    }
    let mut reported = None;
    let mut count = None;
    for (line, l) in lines.by_ref() {
        if let Some(v) = l.strip_prefix("Objective") {
            reported = v.trim().parse::<f64>().ok().map(|v| v + model.objective_constant());
        } else if let Some(v) = l.strip_prefix("# Columns") {
            count = Some(v.trim().parse::<usize>().map_err(|_| Error::parse(WHAT, line, 1, "bad column count"))?);
            break;
        }
    }
    let count = count.ok_or_else(|| Error::parse(WHAT, 0, 0, "missing `# Columns` block"))?;
    let mut values = vec![0.0; model.num_variables()];
    for _ in 0..count {
        let (line, l) = lines.next().ok_or_else(|| Error::parse(WHAT, 0, 0, "column block ends early"))?;
        let (name, value) = l
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(WHAT, line, 1, format!("malformed line `{l}`")))?;
        let id = model
            .var_by_name(name)
            .ok_or_else(|| Error::parse(WHAT, line, 1, format!("unknown variable `{name}`")))?;
        values[id.0] = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(WHAT, line, name.len() + 2, format!("bad value `{}` for {name}", value.trim())))?;
    }
    Ok(ParsedSolution {
        status: Some(status),
        reported_objective: reported,
        assignment: Some(values),
    })
}

/// Start file in the given format covering every column.
pub fn format_start(format: SolutionFormat, model: &MilpModel, values: &[f64]) -> Result<String> {
    let objective = model.objective_value(values)?;
    let mut s = String::new();
    match format {
        SolutionFormat::Cbc => {
            let _ = writeln!(s, "Feasible - objective value {}", format_number(objective - model.objective_constant()));
            for (j, (v, x)) in model.variables().iter().zip(values).enumerate() {
                let _ = writeln!(s, "{j} {} {} 0", v.name, format_number(*x));
            }
        }
        SolutionFormat::NameValue => {
            let _ = writeln!(s, "# Objective value = {}", format_number(objective));
            for (v, x) in model.variables().iter().zip(values) {
                let _ = writeln!(s, "{} {}", v.name, format_number(*x));
            }
        }
        SolutionFormat::Highs => {
            let _ = writeln!(s, "=obj= {}", format_number(objective - model.objective_constant()));
            for (v, x) in model.variables().iter().zip(values) {
                let _ = writeln!(s, "{} {}", v.name, format_number(*x));
            }
        }
    }
    Ok(s)
}

fn find_on_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| p.is_file())
}

/// Resolves the solver binary: configuration, environment, then `PATH`.
pub fn resolve_binary(config: &SolverConfig) -> Result<PathBuf> {
    let explicit = config
        .binary_path
        .clone()
        .or_else(|| std::env::var_os(SOLVER_PATH_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    if let Some(p) = explicit {
        if p.components().count() > 1 || p.is_file() {
            return if p.is_file() { Ok(p) } else { Err(Error::SolverMissing(p.display().to_string())) };
        }
        let name = p.to_string_lossy().into_owned();
        return find_on_path(&name).ok_or(Error::SolverMissing(name));
    }
    let default = match config.kind {
        SolverKind::Cbc => "cbc",
        SolverKind::Highs => "highs",
        SolverKind::Generic { .. } => {
            return Err(Error::Config("the generic solver profile needs an explicit binary path".into()))
        }
    };
    find_on_path(default).ok_or_else(|| Error::SolverMissing(default.into()))
}

/// Whether a solver binary can be resolved for `config`.
pub fn solver_available(config: &SolverConfig) -> bool {
    resolve_binary(config).is_ok()
}

struct Workspace {
    dir: Option<tempfile::TempDir>,
    path: PathBuf,
    log: PathBuf,
}

fn workspace(config: &SolverConfig) -> Result<Workspace> {
    let root = config.workspace.clone().unwrap_or_else(|| std::env::temp_dir().join("ocf"));
    let logs = root.join("logs");
    fs::create_dir_all(&logs).map_err(|e| Error::io(&logs, e))?;
    let dir = tempfile::Builder::new()
        .prefix("solve-")
        .tempdir_in(&root)
        .map_err(|e| Error::io(&root, e))?;
    let path = dir.path().to_path_buf();
    let id = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Workspace {
        dir: Some(dir),
        path,
        log: logs.join(format!("{id}.log")),
    })
}

struct Files {
    lp: PathBuf,
    sol: PathBuf,
    start: Option<PathBuf>,
}

fn command_for(binary: &Path, config: &SolverConfig, files: &Files) -> Result<(Command, SolutionFormat)> {
    let time = format_number(config.time_limit_s);
    let gap = format_number(config.mip_gap);
    match &config.kind {
        SolverKind::Cbc => {
            let mut cmd = Command::new(binary);
            cmd.arg(&files.lp)
                .args(["-timeMode", "elapsed", "-sec", &time, "-ratio", &gap])
                .args(["-threads", &config.threads.to_string()])
                .args(["-randomCbcSeed", &(config.seed % (i32::MAX as u64) + 1).to_string()]);
            if let Some(start) = &files.start {
                cmd.arg("-mips").arg(start);
            }
            cmd.arg("-solve").arg("-solu").arg(&files.sol);
            Ok((cmd, SolutionFormat::Cbc))
        }
        SolverKind::Highs => {
            let options = files.lp.with_file_name("highs.opt");
            let text = format!(
                "mip_rel_gap = {gap}\nthreads = {}\nrandom_seed = {}\n",
                config.threads,
                config.seed % (i32::MAX as u64)
            );
            fs::write(&options, text).map_err(|e| Error::io(&options, e))?;
            let mut cmd = Command::new(binary);
            cmd.arg("--model_file")
                .arg(&files.lp)
                .arg("--options_file")
                .arg(&options)
                .args(["--time_limit", &time])
                .arg("--solution_file")
                .arg(&files.sol);
            if let Some(start) = &files.start {
                cmd.arg("--read_solution_file").arg(start);
            }
            Ok((cmd, SolutionFormat::Highs))
        }
        SolverKind::Generic { command, format } => {
            let mut cmd = Command::new(binary);
            for tok in command {
                if tok.contains("{start}") && files.start.is_none() {
                    continue;
                }
                let start = files.start.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
                cmd.arg(
                    tok.replace("{lp}", &files.lp.display().to_string())
                        .replace("{sol}", &files.sol.display().to_string())
                        .replace("{time}", &time)
                        .replace("{gap}", &gap)
                        .replace("{threads}", &config.threads.to_string())
                        .replace("{seed}", &config.seed.to_string())
                        .replace("{start}", &start),
                );
            }
            Ok((cmd, *format))
        }
    }
}

fn supports_start(kind: &SolverKind) -> bool {
    match kind {
        SolverKind::Cbc | SolverKind::Highs => true,
        SolverKind::Generic { command, .. } => command.iter().any(|t| t.contains("{start}")),
    }
}

/// Relative gap from the CBC log, constant included.
fn cbc_gap(log: &str, objective: f64, constant: f64) -> Option<f64> {
    let bound = log.lines().rev().find_map(|l| {
        let l = l.trim();
        l.strip_prefix("Lower bound:")
            .or_else(|| l.strip_prefix("Best possible:"))
            .and_then(|v| v.trim().parse::<f64>().ok())
    })?;
    let bound = bound + constant;
    Some(((objective - bound).max(0.0)) / objective.abs().max(1e-9))
}

/// Relative gap from the HiGHS solving report, constant included.
fn highs_gap(log: &str, objective: f64, constant: f64) -> Option<f64> {
    let bound = log.lines().rev().find_map(|l| {
        l.trim()
            .strip_prefix("Dual bound")
            .and_then(|v| v.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite())
    })?;
    let bound = bound + constant;
    Some(((objective - bound).max(0.0)) / objective.abs().max(1e-9))
}

/// Writes the model (and an optional start) to a fresh workspace, runs the
/// solver, and parses the result. The solver's output is kept under
/// `<workspace>/logs/` in every case; the per-solve directory is removed
/// after a clean solve unless `keep_files` is set.
pub fn solve(model: &MilpModel, config: &SolverConfig, start: Option<&[f64]>) -> Result<SolveOutcome> {
    let binary = resolve_binary(config)?;
    let lp_text = write_lp(model)?;
    let mut ws = workspace(config)?;
    let files = Files {
        lp: ws.path.join("model.lp"),
        sol: ws.path.join("solution.sol"),
        start: None,
    };
    fs::write(&files.lp, &lp_text).map_err(|e| Error::io(&files.lp, e))?;
    let mut files = files;
    let format = match &config.kind {
        SolverKind::Cbc => SolutionFormat::Cbc,
        SolverKind::Highs => SolutionFormat::Highs,
        SolverKind::Generic { format, .. } => *format,
    };
    if let Some(values) = start {
        if supports_start(&config.kind) {
            let p = ws.path.join("start.sol");
            fs::write(&p, format_start(format, model, values)?).map_err(|e| Error::io(&p, e))?;
            files.start = Some(p);
        } else {
            log::info!("solver profile has no start-file placeholder; warm start skipped");
        }
    }
    let (mut cmd, format) = command_for(&binary, config, &files)?;
    let log_file = fs::File::create(&ws.log).map_err(|e| Error::io(&ws.log, e))?;
    let log_err = log_file.try_clone().map_err(|e| Error::io(&ws.log, e))?;
    cmd.current_dir(&ws.path).stdin(Stdio::null()).stdout(log_file).stderr(log_err);

    let started = Instant::now();
    let mut child = cmd.spawn().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::SolverMissing(binary.display().to_string()),
        _ => Error::io(&binary, e),
    })?;
    let grace = Duration::from_secs_f64((config.time_limit_s * 0.5).max(10.0));
    let deadline = Duration::from_secs_f64(config.time_limit_s.max(0.0)) + grace;
    let mut killed = false;
    let exit = loop {
        if let Some(status) = child.try_wait().map_err(|e| Error::io(&binary, e))? {
            break Some(status);
        }
        if started.elapsed() > deadline {
            let _ = child.kill();
            let _ = child.wait();
            killed = true;
            break None;
        }
        std::thread::sleep(Duration::from_millis(10));
    };
    let wall_time = started.elapsed().as_secs_f64();
    let log_text = fs::read_to_string(&ws.log).unwrap_or_default();

    let mut outcome = SolveOutcome {
        status: SolveStatus::Error,
        objective_value: None,
        reported_objective: None,
        assignment: None,
        gap: None,
        wall_time,
        log_path: Some(ws.log.clone()),
        message: None,
    };
    let sol_text = fs::read_to_string(&files.sol).ok().filter(|s| !s.trim().is_empty());
    match sol_text {
        None => {
            outcome.status = if killed || wall_time >= config.time_limit_s {
                SolveStatus::NoIncumbent
            } else {
                SolveStatus::Error
            };
            outcome.message = Some(match exit {
                Some(s) => format!("no solution file; solver exited with {s}"),
                None => "no solution file; solver killed after the deadline".into(),
            });
        }
        Some(text) => {
            let parsed = parse_solution(format, &text, model)?;
            let mut status = parsed.status.unwrap_or(if wall_time >= config.time_limit_s * 0.99 {
                SolveStatus::FeasibleTimeLimit
            } else {
                SolveStatus::Optimal
            });
            if format == SolutionFormat::Cbc && status == SolveStatus::FeasibleTimeLimit && cbc_without_incumbent(&log_text) {
                status = SolveStatus::NoIncumbent;
            }
            outcome.status = status;
            outcome.reported_objective = parsed.reported_objective;
            if status.has_solution() {
                let values = parsed.assignment.unwrap_or_else(|| vec![0.0; model.num_variables()]);
                let obj = model.objective_value(&values)?;
                outcome.objective_value = Some(obj);
                outcome.gap = match status {
                    SolveStatus::Optimal => Some(0.0),
                    _ if format == SolutionFormat::Cbc => cbc_gap(&log_text, obj, model.objective_constant()),
                    _ if format == SolutionFormat::Highs => highs_gap(&log_text, obj, model.objective_constant()),
                    _ => None,
                };
                outcome.assignment = Some(values);
            }
        }
    }
    if outcome.status != SolveStatus::Error && !config.keep_files {
        if let Some(dir) = ws.dir.take() {
            let _ = dir.close();
        }
    } else if let Some(dir) = ws.dir.take() {
        let kept = dir.keep();
        log::info!("solve files kept in {}", kept.display());
    }
    Ok(outcome)
}

fn cbc_without_incumbent(log: &str) -> bool {
    log.lines().any(|l| {
        let l = l.trim();
        l.starts_with("No feasible solution found") || l.contains("no integer solution")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ocf_core::milp::Relation;

    fn model() -> MilpModel {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y").unwrap();
        m.set_objective(x, 1.0);
        m.set_objective(y, 2.0);
        m.set_objective_constant(0.5);
        m.add_constraint("c", [(x, 1.0), (y, 1.0)], Relation::Ge, 1.0).unwrap();
        m
    }

    #[test]
    fn cbc_solution_with_omitted_columns() {
        let m = model();
        let p = parse_solution(SolutionFormat::Cbc, "Optimal - objective value 1.00000000\n      0 x  1  1\n", &m).unwrap();
        assert_eq!(p.status, Some(SolveStatus::Optimal));
        assert_eq!(p.assignment, Some(vec![1.0, 0.0]));
        assert_eq!(p.reported_objective, Some(1.5));
        assert_eq!(m.objective_value(p.assignment.as_ref().unwrap()).unwrap(), 1.5);
    }

    #[test]
    fn cbc_infeasible_has_no_assignment() {
        let p = parse_solution(SolutionFormat::Cbc, "Infeasible - objective value 2\n**  0 x 2 0\n", &model()).unwrap();
        assert_eq!(p.status, Some(SolveStatus::Infeasible));
        assert_eq!(p.assignment, None);
    }

    #[test]
    fn name_value_and_errors() {
        let m = model();
        let p = parse_solution(SolutionFormat::NameValue, "# Objective value = 2.5\ny 1\n", &m).unwrap();
        assert_eq!(p.assignment, Some(vec![0.0, 1.0]));
        assert_eq!(p.reported_objective, Some(2.5));
        assert!(parse_solution(SolutionFormat::NameValue, "z 1\n", &m).is_err());
        assert!(parse_solution(SolutionFormat::NameValue, "x\n", &m).is_err());
        assert!(parse_solution(SolutionFormat::Cbc, "Weird\n", &m).is_err());
    }

    #[test]
    fn start_file_round_trips() {
        let m = model();
        let text = format_start(SolutionFormat::Cbc, &m, &[0.0, 1.0]).unwrap();
        let p = parse_solution(SolutionFormat::Cbc, &text.replace("Feasible", "Stopped on time"), &m).unwrap();
        assert_eq!(p.assignment, Some(vec![0.0, 1.0]));
        assert_eq!(p.reported_objective, Some(2.5));
    }

    #[test]
    fn highs_raw_solution() {
        let m = model();
        let text = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 2\n# Columns 2\nx 0\ny 1\n# Rows 1\nc 1\n\n# Dual solution values\nNone\n";
        let p = parse_solution(SolutionFormat::Highs, text, &m).unwrap();
        assert_eq!(p.status, Some(SolveStatus::Optimal));
        assert_eq!(p.assignment, Some(vec![0.0, 1.0]));
        assert_eq!(p.reported_objective, Some(2.5));

        let stopped = "Model status\nTime limit reached\n\n# Primal solution values\nNone\n";
        let p = parse_solution(SolutionFormat::Highs, stopped, &m).unwrap();
        assert_eq!(p.status, Some(SolveStatus::NoIncumbent));
        assert_eq!(p.assignment, None);
        let p = parse_solution(SolutionFormat::Highs, &text.replace("Optimal", "Time limit reached"), &m).unwrap();
        assert_eq!(p.status, Some(SolveStatus::FeasibleTimeLimit));

        assert!(parse_solution(SolutionFormat::Highs, "Model status\nOptimal\n", &m).is_err());
        assert!(parse_solution(SolutionFormat::Highs, &text.replace("y 1", "z 1"), &m).is_err());
        assert!(parse_solution(SolutionFormat::Highs, "Status\n", &m).is_err());
    }

    #[test]
    fn highs_start_is_miplib_style() {
        let text = format_start(SolutionFormat::Highs, &model(), &[1.0, 0.0]).unwrap();
        assert_eq!(text, "=obj= 1\nx 1\ny 0\n");
    }

    #[test]
    fn solver_names() {
        assert_eq!("CBC".parse::<SolverKind>().unwrap(), SolverKind::Cbc);
        assert_eq!("highs".parse::<SolverKind>().unwrap(), SolverKind::Highs);
        assert!("gurobi".parse::<SolverKind>().is_err());
    }

    #[test]
    fn missing_binary_is_reported() {
        let cfg = SolverConfig {
            binary_path: Some(PathBuf::from("/nonexistent/solver")),
            ..SolverConfig::default()
        };
        assert!(matches!(resolve_binary(&cfg), Err(Error::SolverMissing(_))));
    }
}
