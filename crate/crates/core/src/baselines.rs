//! Greedy baselines: the most discriminatory stump, best-first CART with a
//! split budget, and a random forest of shallow CART trees on subsamples.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::oracle::candidate_thresholds;
use crate::rng::stream_rng;
use crate::topology::TreeTopology;
use crate::tree::{DecisionTree, Forest, Leaf, Split};
use crate::Class;

/// `⌈2.5% · rows⌉`, at least 1.
pub fn n_min_for(rows: usize) -> usize {
    rows.div_ceil(40).max(1)
}

/// Majority class with ties resolved to 0.
#[inline]
fn majority(pos: usize, neg: usize) -> Class {
    u8::from(pos > neg)
}

#[inline]
fn errors_of(pos: usize, neg: usize) -> usize {
    if pos > neg {
        neg
    } else {
        pos
    }
}

/// Depth-one classifier. `split == None` is the no-split stump predicting the
/// global majority on both sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub split: Option<Split>,
    pub left_class: Class,
    pub right_class: Class,
    pub errors: usize,
}

impl Stump {
    pub fn predict(&self, x: &[f64]) -> Class {
        match self.split {
            Some(s) if s.goes_left(x) => self.left_class,
            _ => self.right_class,
        }
    }
}

/// Minimum-misclassification stump over the midpoints of `features`.
///
/// Ties prefer the no-split stump, then the lowest feature index, then the
/// smallest threshold.
pub fn best_stump(dataset: &Dataset, features: &[usize]) -> Result<Stump> {
    if features.is_empty() {
        return Err(Error::Config("best_stump needs a non-empty feature subset".into()));
    }
    if let Some(&q) = features.iter().find(|&&q| q >= dataset.p()) {
        return Err(Error::Config(format!("feature {q} out of range (p = {})", dataset.p())));
    }
    let pos = dataset.positives();
    let neg = dataset.n() - pos;
    let global = majority(pos, neg);
    let mut best = Stump {
        split: None,
        left_class: global,
        right_class: global,
        errors: errors_of(pos, neg),
    };
    let mut order: Vec<usize> = (0..dataset.n()).collect();
    let mut sorted_features = features.to_vec();
    sorted_features.sort_unstable();
    sorted_features.dedup();
    for q in sorted_features {
        order.sort_by(|&a, &b| dataset.value(a, q).total_cmp(&dataset.value(b, q)));
        let (mut lp, mut ln) = (0usize, 0usize);
        for k in 0..order.len() - 1 {
            let i = order[k];
            if dataset.label(i) == 1 {
                lp += 1;
            } else {
                ln += 1;
            }
            let v = dataset.value(i, q);
            let next = dataset.value(order[k + 1], q);
            if next <= v {
                continue;
            }
            let (rp, rn) = (pos - lp, neg - ln);
            let errors = errors_of(lp, ln) + errors_of(rp, rn);
            if errors < best.errors {
                best = Stump {
                    split: Some(Split::new(q, 0.5 * (v + next))),
                    left_class: majority(lp, ln),
                    right_class: majority(rp, rn),
                    errors,
                };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CartConfig {
    pub depth: u32,
    pub n_min: usize,
    /// Maximum number of active splits in the tree.
    pub split_budget: usize,
}

impl CartConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 {
            return Err(Error::Config("CART n_min must be at least 1".into()));
        }
        TreeTopology::new(self.depth)?;
        Ok(())
    }
}

struct Candidate {
    node: usize,
    split: Split,
    decrease: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Gini impurity times node size: `m - (pos² + neg²) / m`.
fn weighted_gini(pos: usize, neg: usize) -> f64 {
    let m = (pos + neg) as f64;
    if m == 0.0 {
        return 0.0;
    }
    m - ((pos * pos + neg * neg) as f64) / m
}

fn best_gini_split(dataset: &Dataset, members: &[usize], n_min: usize, node: usize) -> Option<Candidate> {
    let pos = members.iter().filter(|&&i| dataset.label(i) == 1).count();
    let neg = members.len() - pos;
    if pos == 0 || neg == 0 || members.len() < 2 * n_min {
        return None;
    }
    let parent = weighted_gini(pos, neg);
    let mut best: Option<(usize, f64, f64)> = None;
    let mut order = members.to_vec();
    for q in 0..dataset.p() {
        order.sort_by(|&a, &b| dataset.value(a, q).total_cmp(&dataset.value(b, q)));
        let (mut lp, mut ln) = (0usize, 0usize);
        for k in 0..order.len() - 1 {
            if dataset.label(order[k]) == 1 {
                lp += 1;
            } else {
                ln += 1;
            }
            let v = dataset.value(order[k], q);
            let next = dataset.value(order[k + 1], q);
            let left_size = k + 1;
            if next <= v || left_size < n_min || order.len() - left_size < n_min {
                continue;
            }
            let decrease = parent - weighted_gini(lp, ln) - weighted_gini(pos - lp, neg - ln);
            if best.is_none_or(|(_, _, d)| decrease > d) {
                best = Some((q, 0.5 * (v + next), decrease));
            }
        }
    }
    let (q, threshold, decrease) = best?;
    if decrease <= 1e-12 {
        return None;
    }
    let split = Split::new(q, threshold);
    let (left, right) = members.iter().partition(|&&i| split.goes_left(dataset.row(i)));
    Some(Candidate {
        node,
        split,
        decrease,
        left,
        right,
    })
}

/// Greedy Gini tree grown best-first until the depth, `n_min`, purity or the
/// split budget stops it. Leaves take the majority class (ties to 0); leaves
/// no training point reaches fall back to the global majority.
pub fn train_cart(dataset: &Dataset, config: &CartConfig) -> Result<DecisionTree> {
    config.validate()?;
    let topology = TreeTopology::new(config.depth)?;
    let mut splits: Vec<Option<Split>> = alloc::vec![None; topology.branch_count()];
    let mut frontier: Vec<Candidate> = Vec::new();
    let all: Vec<usize> = (0..dataset.n()).collect();
    if topology.is_branch(1) {
        frontier.extend(best_gini_split(dataset, &all, config.n_min, 1));
    }
    let mut granted = 0;
    while granted < config.split_budget && !frontier.is_empty() {
        let pick = frontier
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.decrease.total_cmp(&b.decrease).then(b.node.cmp(&a.node)))
            .map(|(k, _)| k)
            .expect("frontier is non-empty");
        let cand = frontier.swap_remove(pick);
        splits[cand.node - 1] = Some(cand.split);
        granted += 1;
        for (child, members) in [(2 * cand.node, cand.left), (2 * cand.node + 1, cand.right)] {
            if topology.is_branch(child) {
                frontier.extend(best_gini_split(dataset, &members, config.n_min, child));
            }
        }
    }
    let tree = DecisionTree::new(
        topology,
        dataset.p(),
        splits,
        alloc::vec![Leaf::default(); topology.leaf_count()],
        dataset.majority_class(),
    )?;
    label_leaves_by_majority(tree, dataset)
}

/// Re-labels every leaf with the majority class of the training points it
/// receives (ties to 0) and records the support.
pub fn label_leaves_by_majority(tree: DecisionTree, dataset: &Dataset) -> Result<DecisionTree> {
    let topology = *tree.topology();
    let mut counts = alloc::vec![(0usize, 0usize); topology.leaf_count()];
    for (i, x) in dataset.rows().enumerate() {
        let leaf = tree.route(x)?;
        let slot = &mut counts[leaf - topology.leaf_count()];
        if dataset.label(i) == 1 {
            slot.0 += 1;
        } else {
            slot.1 += 1;
        }
    }
    let leaves = counts
        .iter()
        .map(|&(pos, neg)| {
            if pos + neg == 0 {
                Leaf::default()
            } else {
                Leaf {
                    class: Some(majority(pos, neg)),
                    support: Some(pos + neg),
                }
            }
        })
        .collect();
    DecisionTree::new(topology, tree.n_features(), tree.splits().to_vec(), leaves, tree.fallback_class())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RfConfig {
    pub tree_count: usize,
    pub depth: u32,
    pub sample_size: usize,
    pub seed: u64,
}

impl RfConfig {
    pub fn new(tree_count: usize, seed: u64) -> Self {
        Self {
            tree_count,
            depth: 2,
            sample_size: 75,
            seed,
        }
    }
}

/// Whether `train_rf` would draw its subsamples with replacement.
pub fn rf_samples_with_replacement(n: usize, config: &RfConfig) -> bool {
    n < config.sample_size
}

/// Random forest of CART trees, each grown on an independent uniform
/// subsample (without replacement when the data allow it). Tree `r` draws from
/// stream `r` of the configured seed. Tied votes go to class 0.
pub fn train_rf(dataset: &Dataset, config: &RfConfig) -> Result<Forest> {
    if config.tree_count == 0 || config.sample_size == 0 {
        return Err(Error::Config("random forest needs at least one tree and one sample".into()));
    }
    let topology = TreeTopology::new(config.depth)?;
    let cart = CartConfig {
        depth: config.depth,
        n_min: n_min_for(config.sample_size),
        split_budget: topology.branch_count(),
    };
    let n = dataset.n();
    let with_replacement = rf_samples_with_replacement(n, config);
    let mut trees = Vec::with_capacity(config.tree_count);
    for r in 0..config.tree_count {
        let mut rng = stream_rng(config.seed, r as u64);
        let mut idx: Vec<usize> = if with_replacement {
            (0..config.sample_size).map(|_| rng.gen_range(0..n)).collect()
        } else {
            index::sample(&mut rng, n, config.sample_size).into_vec()
        };
        idx.sort_unstable();
        let sample = dataset.subset(&idx)?;
        let tree = train_cart(&sample, &cart)?;
        trees.push(tree);
    }
    Forest::with_any_count(trees)
}

/// Fraction of rows classified correctly by `predict`.
pub fn accuracy(dataset: &Dataset, mut predict: impl FnMut(&[f64]) -> Result<Class>) -> Result<f64> {
    let mut hits = 0usize;
    for (i, x) in dataset.rows().enumerate() {
        if predict(x)? == dataset.label(i) {
            hits += 1;
        }
    }
    Ok(hits as f64 / dataset.n() as f64)
}

/// Candidate thresholds of feature `q`; re-exported for callers that only
/// need baselines.
pub fn stump_thresholds(dataset: &Dataset, q: usize) -> Vec<f64> {
    candidate_thresholds(dataset, q)
}
