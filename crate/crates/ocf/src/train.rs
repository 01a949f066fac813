//! Training entry points shared by the CLI and the benchmark harness.

use std::fmt;
use std::str::FromStr;

use ocf_core::baselines::{n_min_for, train_cart, train_rf, CartConfig, RfConfig};
use ocf_core::formulation::{
    build_ocf_model, extract_forest, stump_feature_subsets, warm_start_assignment, ForestModel, OcfConfig,
};
use ocf_core::milp::{AuditReport, AUDIT_TOLERANCE};
use ocf_core::{Dataset, Forest};

use crate::error::{Error, Result};
use crate::solver::{solve, SolveOutcome, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Cart,
    Oct,
    Rf3,
    Rf500,
    Ocf3,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Cart, Method::Oct, Method::Rf3, Method::Rf500, Method::Ocf3];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cart => "cart",
            Method::Oct => "oct",
            Method::Rf3 => "rf3",
            Method::Rf500 => "rf500",
            Method::Ocf3 => "ocf3",
        }
    }

    /// Column heading in reports.
    pub fn label(self) -> &'static str {
        match self {
            Method::Cart => "CART",
            Method::Oct => "OCT",
            Method::Rf3 => "3-RF",
            Method::Rf500 => "500-RF",
            Method::Ocf3 => "3-OCF",
        }
    }

    pub fn needs_solver(self) -> bool {
        matches!(self, Method::Oct | Method::Ocf3)
    }

    /// Whether the method is tuned over the split budget grid.
    pub fn uses_budget(self) -> bool {
        matches!(self, Method::Cart | Method::Oct | Method::Ocf3)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown method `{s}` (expected cart, oct, rf3, rf500 or ocf3)")))
    }
}

/// Result of a MILP-backed training run.
#[derive(Debug, Clone)]
pub struct ForestSolve {
    pub model: ForestModel,
    pub outcome: SolveOutcome,
    /// Present when the solver returned a solution.
    pub forest: Option<Forest>,
    pub audit: Option<AuditReport>,
    /// Training errors of the warm start, if one was given.
    pub warm_start_errors: Option<f64>,
}

/// Builds the forest MILP, solves it and extracts the forest.
///
/// `stump_seed` picks the feature thirds of the warm start.
pub fn solve_forest(dataset: &Dataset, config: &OcfConfig, solver: &SolverConfig, stump_seed: u64) -> Result<ForestSolve> {
    let model = build_ocf_model(dataset, config)?;
    let start = if config.warm_start {
        let subsets = stump_feature_subsets(dataset.p(), config.tree_count, stump_seed);
        Some(warm_start_assignment(dataset, &model, &subsets)?)
    } else {
        None
    };
    let warm_start_errors = match &start {
        Some(x) => Some(model.model.objective_value(x)? * dataset.n() as f64),
        None => None,
    };
    let outcome = solve(&model.model, solver, start.as_deref())?;
    let mut forest = None;
    let mut audit = None;
    if let Some(values) = &outcome.assignment {
        let report = model.model.audit_feasibility(values, AUDIT_TOLERANCE)?;
        if !report.is_feasible() {
            log::warn!("solver solution violates {} rows / {} bounds", report.violated_rows.len(), report.bound_violations.len());
        }
        audit = Some(report);
        forest = Some(extract_forest(values, &model, dataset)?);
    }
    Ok(ForestSolve {
        model,
        outcome,
        forest,
        audit,
        warm_start_errors,
    })
}

/// Hyperparameters for a single training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub budget: usize,
    pub tree_depth: u32,
    pub forest_depth: u32,
    pub rf_sample_size: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            budget: 3,
            tree_depth: 3,
            forest_depth: 2,
            rf_sample_size: 75,
            epsilon: ocf_core::formulation::DEFAULT_EPSILON,
            seed: 1,
        }
    }
}

/// Trained model and, for MILP methods, the solve that produced it.
#[derive(Debug, Clone)]
pub struct Trained {
    pub forest: Forest,
    pub solve: Option<ForestSolve>,
}

/// Trains `method` on all of `dataset`.
pub fn train(method: Method, dataset: &Dataset, params: &TrainParams, solver: &SolverConfig) -> Result<Trained> {
    let n_min = n_min_for(dataset.n());
    match method {
        Method::Cart => {
            let cfg = CartConfig {
                depth: params.tree_depth,
                n_min,
                split_budget: params.budget,
            };
            Ok(Trained {
                forest: Forest::new(vec![train_cart(dataset, &cfg)?])?,
                solve: None,
            })
        }
        Method::Rf3 | Method::Rf500 => {
            let trees = if method == Method::Rf3 { 3 } else { 500 };
            let cfg = RfConfig {
                depth: params.forest_depth,
                sample_size: params.rf_sample_size,
                ..RfConfig::new(trees, params.seed)
            };
            Ok(Trained {
                forest: train_rf(dataset, &cfg)?,
                solve: None,
            })
        }
        Method::Oct | Method::Ocf3 => {
            let cfg = if method == Method::Oct {
                OcfConfig {
                    epsilon: params.epsilon,
                    ..OcfConfig::single_tree(params.tree_depth, params.budget, n_min)
                }
            } else {
                OcfConfig {
                    epsilon: params.epsilon,
                    ..OcfConfig::new(3, params.forest_depth, params.budget, n_min)
                }
            };
            let solved = solve_forest(dataset, &cfg, solver, params.seed)?;
            let forest = solved.forest.clone().ok_or_else(|| Error::Solver {
                message: format!("no solution ({})", solved.outcome.status),
                log: solved.outcome.log_path.clone().unwrap_or_default(),
            })?;
            Ok(Trained {
                forest,
                solve: Some(solved),
            })
        }
    }
}
