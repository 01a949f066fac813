//! The forest MILP: model construction, warm starts and extraction.
//!
//! R trees of depth D are trained jointly. Each tree assigns every
//! observation a class (`theta`), the forest prediction (`alpha`) is the
//! majority of those classes, and the objective counts observations whose
//! forest prediction differs from the label. A hard budget caps the total
//! number of active splits across the forest.

mod extract;
mod registry;
mod warm;

pub use extract::{extract_forest, routing_mismatches, RoutingMismatch};
pub use registry::{Symbol, VariableRegistry};
pub use warm::{encode_forest, order_by_disagreement, stump_feature_subsets, warm_start_assignment, warm_start_forest};

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::milp::{MilpModel, Relation, VarId};
use crate::topology::{TreeTopology, MAX_DEPTH};

/// Left-branch margin: a point goes left of threshold `b` iff `x <= b - eps`.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Above this many pairwise rows, [`LeafConsistency::Auto`] switches to
/// per-leaf class columns.
pub const PAIRWISE_ROW_LIMIT: usize = 20_000;

/// How "all observations in a leaf share one class" is encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeafConsistency {
    /// Two rows per pair of observations, leaf and tree:
    /// `z_i + z_j + theta_i - theta_j <= 2` and the mirrored row.
    Pairwise,
    /// One binary class column `c` per leaf and two rows per observation,
    /// leaf and tree: `theta - c + z <= 1` and `c - theta + z <= 1`.
    /// Same feasible set projected onto the original columns, with linear
    /// instead of quadratic row count.
    LeafLabel,
    /// Pairwise while the pairwise row count stays within
    /// [`PAIRWISE_ROW_LIMIT`], leaf-label above.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcfConfig {
    pub tree_count: usize,
    pub depth: u32,
    pub split_budget: usize,
    pub n_min: usize,
    pub epsilon: f64,
    pub symmetry_breaking: bool,
    pub warm_start: bool,
    pub leaf_consistency: LeafConsistency,
    /// Adds `penalty * d` per branch node to the objective. The budget row
    /// is kept either way.
    pub complexity_penalty: Option<f64>,
}

impl OcfConfig {
    pub fn new(tree_count: usize, depth: u32, split_budget: usize, n_min: usize) -> Self {
        Self {
            tree_count,
            depth,
            split_budget,
            n_min,
            epsilon: DEFAULT_EPSILON,
            symmetry_breaking: true,
            warm_start: true,
            leaf_consistency: LeafConsistency::Auto,
            complexity_penalty: None,
        }
    }

    /// Single-tree variant: one tree, no ordering rows.
    pub fn single_tree(depth: u32, split_budget: usize, n_min: usize) -> Self {
        Self {
            symmetry_breaking: false,
            ..Self::new(1, depth, split_budget, n_min)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tree_count == 0 || self.tree_count % 2 == 0 {
            return Err(Error::Config(format!("tree count must be odd and positive, got {}", self.tree_count)));
        }
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return Err(Error::Config(format!("depth must be in 1..={MAX_DEPTH}, got {}", self.depth)));
        }
        if self.split_budget == 0 {
            return Err(Error::Config("split budget must be at least 1".into()));
        }
        if self.n_min == 0 {
            return Err(Error::Config("n_min must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.1) {
            return Err(Error::Config(format!("epsilon must be in (0, 0.1), got {}", self.epsilon)));
        }
        if let Some(pen) = self.complexity_penalty {
            if !(pen.is_finite() && pen >= 0.0) {
                return Err(Error::Config(format!("complexity penalty must be finite and non-negative, got {pen}")));
            }
        }
        Ok(())
    }

    /// The encoding actually used for `n` observations.
    pub fn resolved_consistency(&self, n: usize) -> LeafConsistency {
        match self.leaf_consistency {
            LeafConsistency::Auto => {
                let leaves = 1usize << self.depth;
                let rows = n
                    .saturating_mul(n.saturating_sub(1))
                    .saturating_mul(leaves)
                    .saturating_mul(self.tree_count);
                if rows <= PAIRWISE_ROW_LIMIT {
                    LeafConsistency::Pairwise
                } else {
                    LeafConsistency::LeafLabel
                }
            }
            other => other,
        }
    }
}

/// A built model with its column layout and the configuration it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub model: MilpModel,
    pub registry: VariableRegistry,
    pub config: OcfConfig,
}

/// Builds the forest MILP for a normalized dataset.
pub fn build_ocf_model(dataset: &Dataset, config: &OcfConfig) -> Result<ForestModel> {
    config.validate()?;
    let n = dataset.n();
    if n == 0 {
        return Err(Error::Config("cannot build a model for an empty dataset".into()));
    }
    if config.n_min > n {
        return Err(Error::Config(format!("n_min = {} exceeds n = {n}", config.n_min)));
    }
    let p = dataset.p();
    let trees = config.tree_count;
    let topo = TreeTopology::new(config.depth)?;
    let symmetry = config.symmetry_breaking && trees > 1;
    let consistency = config.resolved_consistency(n);
    let registry = VariableRegistry::new(n, p, trees, topo, symmetry, consistency == LeafConsistency::LeafLabel);

    let reg = &registry;
    let mut model = MilpModel::new();
    for sym in reg.symbols() {
        let id = match sym {
            Symbol::B { .. } => model.add_continuous(sym.name(), 0.0, 1.0)?,
            _ => model.add_binary(sym.name())?,
        };
        debug_assert_eq!(Some(id), registry.id(sym));
    }
    let v = |s: Symbol| reg.col(s);
    let inv_n = 1.0 / n as f64;

    // Misclassification count / n, with |y - alpha| = y + (1 - 2y) alpha.
    let positives = dataset.positives();
    model.set_objective_constant(positives as f64 * inv_n);
    for i in 0..n {
        let y = f64::from(dataset.label(i));
        model.set_objective(v(Symbol::Alpha { i }), (1.0 - 2.0 * y) * inv_n);
    }
    if let Some(pen) = config.complexity_penalty {
        for r in 0..trees {
            for t in topo.branch_nodes() {
                model.set_objective(v(Symbol::D { t, r }), pen);
            }
        }
    }

    // Majority vote.
    let inv_r = 1.0 / trees as f64;
    for i in 0..n {
        let alpha = v(Symbol::Alpha { i });
        let thetas = || (0..trees).map(move |r| (reg.col(Symbol::Theta { i, r }), inv_r));
        model.add_constraint(
            format!("vote_up_{i}"),
            thetas().chain([(alpha, -1.0)]),
            Relation::Le,
            0.5,
        )?;
        model.add_constraint(
            format!("vote_down_{i}"),
            thetas().map(|(c, w)| (c, -w)).chain([(alpha, 1.0)]),
            Relation::Le,
            0.5,
        )?;
    }

    for r in 0..trees {
        add_leaf_consistency(&mut model, reg, r, consistency)?;
        add_tree_structure(&mut model, reg, dataset, config, r)?;
    }

    let d_terms: Vec<(VarId, f64)> = (0..trees)
        .flat_map(|r| topo.branch_nodes().map(move |t| (Symbol::D { t, r }, 1.0)))
        .map(|(s, c)| (v(s), c))
        .collect();
    model.add_constraint("budget", d_terms, Relation::Le, config.split_budget as f64)?;

    if symmetry {
        for r in 0..trees {
            for i in 0..n {
                let (x, th, al) = (v(Symbol::Xor { i, r }), v(Symbol::Theta { i, r }), v(Symbol::Alpha { i }));
                model.add_constraint(format!("xor_ge_a_{i}_{r}"), [(x, 1.0), (th, -1.0), (al, 1.0)], Relation::Ge, 0.0)?;
                model.add_constraint(format!("xor_ge_b_{i}_{r}"), [(x, 1.0), (th, 1.0), (al, -1.0)], Relation::Ge, 0.0)?;
                model.add_constraint(format!("xor_le_a_{i}_{r}"), [(x, 1.0), (th, -1.0), (al, -1.0)], Relation::Le, 0.0)?;
                model.add_constraint(format!("xor_le_b_{i}_{r}"), [(x, 1.0), (th, 1.0), (al, 1.0)], Relation::Le, 2.0)?;
            }
        }
        for r in 0..trees - 1 {
            let terms = (0..n).flat_map(|i| {
                [
                    (reg.col(Symbol::Xor { i, r }), 1.0),
                    (reg.col(Symbol::Xor { i, r: r + 1 }), -1.0),
                ]
            });
            model.add_constraint(format!("order_{r}"), terms, Relation::Le, 0.0)?;
        }
    }

    model.validate()?;
    Ok(ForestModel {
        model,
        registry,
        config: *config,
    })
}

/// Single optimal tree as the one-tree forest without ordering rows.
pub fn build_oct_model(dataset: &Dataset, depth: u32, split_budget: usize, n_min: usize, epsilon: f64) -> Result<ForestModel> {
    let config = OcfConfig {
        epsilon,
        ..OcfConfig::single_tree(depth, split_budget, n_min)
    };
    build_ocf_model(dataset, &config)
}

fn add_leaf_consistency(
    model: &mut MilpModel,
    reg: &VariableRegistry,
    r: usize,
    consistency: LeafConsistency,
) -> Result<()> {
    let n = reg.n();
    let v = |s: Symbol| reg.col(s);
    for t in reg.topology().leaf_nodes() {
        match consistency {
            LeafConsistency::Pairwise | LeafConsistency::Auto => {
                for i in 0..n {
                    for j in i + 1..n {
                        let (zi, zj) = (v(Symbol::Z { i, t, r }), v(Symbol::Z { i: j, t, r }));
                        let (ti, tj) = (v(Symbol::Theta { i, r }), v(Symbol::Theta { i: j, r }));
                        model.add_constraint(
                            format!("same_a_{i}_{j}_{t}_{r}"),
                            [(zi, 1.0), (zj, 1.0), (ti, 1.0), (tj, -1.0)],
                            Relation::Le,
                            2.0,
                        )?;
                        model.add_constraint(
                            format!("same_b_{i}_{j}_{t}_{r}"),
                            [(zi, 1.0), (zj, 1.0), (ti, -1.0), (tj, 1.0)],
                            Relation::Le,
                            2.0,
                        )?;
                    }
                }
            }
            LeafConsistency::LeafLabel => {
                let c = v(Symbol::LeafClass { t, r });
                for i in 0..n {
                    let (z, th) = (v(Symbol::Z { i, t, r }), v(Symbol::Theta { i, r }));
                    model.add_constraint(format!("label_a_{i}_{t}_{r}"), [(th, 1.0), (c, -1.0), (z, 1.0)], Relation::Le, 1.0)?;
                    model.add_constraint(format!("label_b_{i}_{t}_{r}"), [(th, -1.0), (c, 1.0), (z, 1.0)], Relation::Le, 1.0)?;
                }
            }
        }
    }
    Ok(())
}

fn add_tree_structure(
    model: &mut MilpModel,
    reg: &VariableRegistry,
    dataset: &Dataset,
    config: &OcfConfig,
    r: usize,
) -> Result<()> {
    let (n, p) = (reg.n(), reg.p());
    let topo = reg.topology();
    let v = |s: Symbol| reg.col(s);
    let eps = config.epsilon;

    for t in topo.branch_nodes() {
        let d = v(Symbol::D { t, r });
        let b = v(Symbol::B { t, r });
        model.add_constraint(
            format!("pick_{t}_{r}"),
            (0..p).map(|q| (reg.col(Symbol::A { t, q, r }), 1.0)).chain([(d, -1.0)]),
            Relation::Eq,
            0.0,
        )?;
        model.add_constraint(format!("thr_{t}_{r}"), [(b, 1.0), (d, -1.0)], Relation::Le, 0.0)?;
        if let Some(parent) = topo.parent(t) {
            model.add_constraint(
                format!("nest_{t}_{r}"),
                [(d, 1.0), (v(Symbol::D { t: parent, r }), -1.0)],
                Relation::Le,
                0.0,
            )?;
        }
    }

    for i in 0..n {
        model.add_constraint(
            format!("place_{i}_{r}"),
            topo.leaf_nodes().map(|t| (reg.col(Symbol::Z { i, t, r }), 1.0)),
            Relation::Eq,
            1.0,
        )?;
    }

    for t in topo.leaf_nodes() {
        let l = v(Symbol::L { t, r });
        for i in 0..n {
            model.add_constraint(format!("open_{i}_{t}_{r}"), [(v(Symbol::Z { i, t, r }), 1.0), (l, -1.0)], Relation::Le, 0.0)?;
        }
        model.add_constraint(
            format!("support_{t}_{r}"),
            (0..n).map(|i| (reg.col(Symbol::Z { i, t, r }), 1.0)).chain([(l, -(config.n_min as f64))]),
            Relation::Ge,
            0.0,
        )?;
        let anc = topo.ancestors(t)?;
        for i in 0..n {
            let x = dataset.row(i);
            let z = v(Symbol::Z { i, t, r });
            for &m in &anc.left {
                let terms = (0..p)
                    .map(|q| (reg.col(Symbol::A { t: m, q, r }), x[q]))
                    .chain([(v(Symbol::B { t: m, r }), -1.0), (z, 1.0 + eps)]);
                model.add_constraint(format!("left_{i}_{t}_{m}_{r}"), terms, Relation::Le, 1.0)?;
            }
            for &m in &anc.right {
                let terms = (0..p)
                    .map(|q| (reg.col(Symbol::A { t: m, q, r }), x[q]))
                    .chain([(v(Symbol::B { t: m, r }), -1.0), (z, -1.0)]);
                model.add_constraint(format!("right_{i}_{t}_{m}_{r}"), terms, Relation::Ge, -1.0)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
