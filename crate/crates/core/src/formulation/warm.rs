//! Complete feasible assignments: from an arbitrary forest, and from the
//! stump forest used as the solver's starting incumbent.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use super::{ForestModel, OcfConfig, Symbol};
use crate::baselines::{best_stump, label_leaves_by_majority};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::topology::TreeTopology;
use crate::tree::{DecisionTree, Forest, Split};
use crate::Class;

/// One random third of the features (at least one) per tree, sorted.
pub fn stump_feature_subsets(p: usize, trees: usize, seed: u64) -> Vec<Vec<usize>> {
    let size = p.div_ceil(3).max(1).min(p);
    (0..trees)
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let mut s = index::sample(&mut rng, p, size).into_vec();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Root split representable with margin `eps`, or `None`.
fn representable(dataset: &Dataset, split: Split, eps: f64) -> Option<Split> {
    let q = split.feature;
    let mut left_max = f64::NEG_INFINITY;
    let mut right_min = f64::INFINITY;
    for x in dataset.rows() {
        if split.goes_left(x) {
            left_max = left_max.max(x[q]);
        } else {
            right_min = right_min.min(x[q]);
        }
    }
    let gap = right_min - left_max;
    if !gap.is_finite() {
        return None;
    }
    if split.threshold - left_max >= eps {
        Some(split)
    } else if gap >= eps {
        Some(Split::new(q, right_min))
    } else {
        None
    }
}

fn stump_tree(dataset: &Dataset, topology: TreeTopology, split: Option<Split>) -> Result<DecisionTree> {
    let mut splits = vec![None; topology.branch_count()];
    splits[0] = split;
    let tree = DecisionTree::new(topology, dataset.p(), splits, vec![Default::default(); topology.leaf_count()], dataset.majority_class())?;
    label_leaves_by_majority(tree, dataset)
}

/// The starting forest: each of the first `min(C, R)` trees gets the most
/// discriminatory root split over its feature subset, the rest stay empty.
/// A stump that cannot honour the margin or the leaf minimum falls back to
/// the empty tree. Trees are ordered by how often they disagree with the
/// forest, as the ordering rows require.
pub fn warm_start_forest(dataset: &Dataset, config: &OcfConfig, subsets: &[Vec<usize>]) -> Result<Forest> {
    config.validate()?;
    if subsets.len() != config.tree_count {
        return Err(Error::Shape {
            expected: config.tree_count,
            actual: subsets.len(),
        });
    }
    let topology = TreeTopology::new(config.depth)?;
    let mut trees = Vec::with_capacity(config.tree_count);
    for (r, features) in subsets.iter().enumerate() {
        if features.is_empty() {
            return Err(Error::Config(format!("tree {r} has an empty stump feature subset")));
        }
        let mut split = None;
        if r < config.split_budget {
            let stump = best_stump(dataset, features)?;
            split = stump.split.and_then(|s| representable(dataset, s, config.epsilon));
            if let Some(s) = split {
                let left = dataset.rows().filter(|x| s.goes_left(x)).count();
                if left < config.n_min || dataset.n() - left < config.n_min {
                    split = None;
                }
            }
        }
        trees.push(stump_tree(dataset, topology, split)?);
    }
    order_by_disagreement(dataset, Forest::new(trees)?)
}

/// Reorders trees so the number of training points on which each tree
/// disagrees with the forest is non-decreasing (stable for ties). The
/// forest's predictions are unchanged.
pub fn order_by_disagreement(dataset: &Dataset, forest: Forest) -> Result<Forest> {
    let predictions: Vec<Class> = dataset.rows().map(|x| forest.predict(x)).collect::<Result<_>>()?;
    let mut keyed = Vec::with_capacity(forest.tree_count());
    for tree in forest.into_trees() {
        let mut disagree = 0;
        for (x, &a) in dataset.rows().zip(&predictions) {
            disagree += usize::from(tree.predict(x)? != a);
        }
        keyed.push((disagree, tree));
    }
    keyed.sort_by_key(|(k, _)| *k);
    Forest::new(keyed.into_iter().map(|(_, t)| t).collect())
}

/// Complete model assignment of a forest whose trees match the model's
/// depth and count. Fails when the forest is infeasible for the model:
/// a left point closer than `epsilon` to its threshold, a non-empty leaf
/// below `n_min`, too many splits, or trees out of disagreement order.
pub fn encode_forest(dataset: &Dataset, fm: &ForestModel, forest: &Forest) -> Result<Vec<f64>> {
    let reg = &fm.registry;
    let cfg = &fm.config;
    let topo = reg.topology();
    if forest.tree_count() != reg.tree_count() {
        return Err(Error::Shape {
            expected: reg.tree_count(),
            actual: forest.tree_count(),
        });
    }
    if dataset.n() != reg.n() || dataset.p() != reg.p() {
        return Err(Error::Shape {
            expected: reg.n(),
            actual: dataset.n(),
        });
    }
    if forest.total_splits() > cfg.split_budget {
        return Err(Error::InvalidModel(format!(
            "forest uses {} splits, budget is {}",
            forest.total_splits(),
            cfg.split_budget
        )));
    }
    let n = reg.n();
    let mut x = vec![0.0; reg.len()];
    let mut set = |s: Symbol, value: f64| x[reg.col(s).0] = value;

    let mut thetas = vec![vec![0 as Class; n]; reg.tree_count()];
    for (r, tree) in forest.trees().iter().enumerate() {
        if *tree.topology() != topo {
            return Err(Error::InvalidTree(format!("tree {r} has depth {}, model has {}", tree.topology().depth(), topo.depth())));
        }
        for t in topo.branch_nodes() {
            if let Some(s) = tree.split(t) {
                set(Symbol::D { t, r }, 1.0);
                set(Symbol::A { t, q: s.feature, r }, 1.0);
                set(Symbol::B { t, r }, s.threshold);
            }
        }
        let mut support = vec![0usize; topo.leaf_count()];
        let mut leaf_class = vec![None; topo.leaf_count()];
        for (i, row) in dataset.rows().enumerate() {
            for step in tree.route_path(row)? {
                if let (Some(s), true) = (step.split, step.went_left) {
                    if row[s.feature] > s.threshold - cfg.epsilon {
                        return Err(Error::InvalidModel(format!(
                            "observation {i} is within epsilon of threshold {} at node {} of tree {r}",
                            s.threshold, step.node
                        )));
                    }
                }
            }
            let leaf = tree.route(row)?;
            let class = tree.class_at(leaf);
            let k = topo.leaf_position(leaf)?;
            support[k] += 1;
            leaf_class[k] = Some(class);
            set(Symbol::Z { i, t: leaf, r }, 1.0);
            set(Symbol::Theta { i, r }, f64::from(class));
            thetas[r][i] = class;
        }
        for (k, t) in topo.leaf_nodes().enumerate() {
            if support[k] > 0 {
                if support[k] < cfg.n_min {
                    return Err(Error::InvalidModel(format!(
                        "leaf {t} of tree {r} holds {} points, n_min is {}",
                        support[k], cfg.n_min
                    )));
                }
                set(Symbol::L { t, r }, 1.0);
            }
            if reg.has_leaf_class() {
                set(Symbol::LeafClass { t, r }, f64::from(leaf_class[k].unwrap_or(0)));
            }
        }
    }

    let trees = reg.tree_count();
    let mut disagreement = vec![0usize; trees];
    for i in 0..n {
        let ones = (0..trees).filter(|&r| thetas[r][i] == 1).count();
        let alpha = u8::from(2 * ones > trees);
        set(Symbol::Alpha { i }, f64::from(alpha));
        for r in 0..trees {
            let differs = thetas[r][i] != alpha;
            disagreement[r] += usize::from(differs);
            if reg.has_xor() {
                set(Symbol::Xor { i, r }, if differs { 1.0 } else { 0.0 });
            }
        }
    }
    if reg.has_xor() && disagreement.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidModel(format!(
            "per-tree disagreement counts {disagreement:?} are not non-decreasing"
        )));
    }
    Ok(x)
}

/// Assignment of the stump forest from [`warm_start_forest`].
pub fn warm_start_assignment(dataset: &Dataset, fm: &ForestModel, subsets: &[Vec<usize>]) -> Result<Vec<f64>> {
    let forest = warm_start_forest(dataset, &fm.config, subsets)?;
    encode_forest(dataset, fm, &forest)
}
