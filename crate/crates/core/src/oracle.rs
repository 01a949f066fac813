//! Exhaustive learner for tiny instances.
//!
//! Only the partition a split induces on the training points matters to the
//! training objective, so thresholds are restricted to midpoints between
//! consecutive distinct feature values. Trees are enumerated over those
//! thresholds, deduplicated by the leaf partition they induce, and forests of
//! one or three trees are searched exhaustively for the fewest majority-vote
//! errors. Ties prefer fewer total splits, then the earliest combination in
//! enumeration order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::topology::TreeTopology;
use crate::tree::{DecisionTree, Forest, Leaf, Split};
use crate::Class;

/// Sorted midpoints between consecutive distinct values of feature `q`.
pub fn candidate_thresholds(dataset: &Dataset, q: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..dataset.n()).map(|i| dataset.value(i, q)).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Canonical thresholds for every feature.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSplitSet {
    pub per_feature: Vec<Vec<f64>>,
}

impl CandidateSplitSet {
    pub fn new(dataset: &Dataset) -> Self {
        Self {
            per_feature: (0..dataset.p()).map(|q| candidate_thresholds(dataset, q)).collect(),
        }
    }

    /// Number of real splits, excluding the "no split" option.
    pub fn len(&self) -> usize {
        self.per_feature.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All splits, feature-major, thresholds ascending.
    pub fn splits(&self) -> impl Iterator<Item = Split> + '_ {
        self.per_feature
            .iter()
            .enumerate()
            .flat_map(|(q, ts)| ts.iter().map(move |&t| Split::new(q, t)))
    }
}

/// Size limits; exceeding any of them is a hard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_n: usize,
    pub max_p: usize,
    pub max_depth: u32,
    /// Upper bound on evaluated forest combinations.
    pub max_combinations: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_n: 20,
            max_p: 4,
            max_depth: 2,
            max_combinations: 2_000_000_000,
        }
    }
}

/// A tree produced by enumeration together with what it does on the
/// training data.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumeratedTree {
    /// Leaves labeled by majority (ties to 0).
    pub tree: DecisionTree,
    pub split_count: usize,
    /// `errors[i]` is true when observation `i` is misclassified.
    pub errors: Vec<bool>,
    pub error_count: usize,
    /// Bitmask of points per leaf, indexed by leaf position.
    leaf_masks: Vec<u64>,
}

impl EnumeratedTree {
    pub fn leaf_masks(&self) -> &[u64] {
        &self.leaf_masks
    }
}

fn check_limits(dataset: &Dataset, depth: u32, limits: &OracleLimits) -> Result<()> {
    if dataset.n() > limits.max_n || dataset.n() > 64 {
        return Err(Error::EnumerationCap(format!(
            "n = {} exceeds the oracle cap of {}",
            dataset.n(),
            limits.max_n.min(64)
        )));
    }
    if dataset.p() > limits.max_p {
        return Err(Error::EnumerationCap(format!("p = {} exceeds the oracle cap of {}", dataset.p(), limits.max_p)));
    }
    if depth > limits.max_depth {
        return Err(Error::EnumerationCap(format!("depth {depth} exceeds the oracle cap of {}", limits.max_depth)));
    }
    Ok(())
}

struct Structure {
    splits: Vec<Option<Split>>,
    split_count: usize,
    leaf_masks: Vec<u64>,
}

/// Walks every hierarchy-respecting assignment of candidate splits to branch
/// nodes, skipping splits that do not separate the points reaching the node.
struct Walker<'a> {
    topology: TreeTopology,
    candidates: Vec<(Split, u64)>,
    dataset: &'a Dataset,
    n_min: usize,
    members: Vec<u64>,
    current: Vec<Option<Split>>,
    out: Vec<Structure>,
}

impl Walker<'_> {
    fn visit(&mut self, node: usize) {
        let topo = self.topology;
        if node > topo.branch_count() {
            self.emit();
            return;
        }
        let parent_active = topo.parent(node).is_none_or(|p| self.current[p - 1].is_some());
        let here = self.members[node];
        // Inactive: everything continues right.
        self.current[node - 1] = None;
        self.members[2 * node] = 0;
        self.members[2 * node + 1] = here;
        self.visit(node + 1);
        if !parent_active || here.count_ones() < 2 {
            return;
        }
        for k in 0..self.candidates.len() {
            let (split, left_mask) = self.candidates[k];
            let left = here & left_mask;
            let right = here & !left_mask;
            if left == 0 || right == 0 {
                continue;
            }
            self.current[node - 1] = Some(split);
            self.members[2 * node] = left;
            self.members[2 * node + 1] = right;
            self.visit(node + 1);
        }
        self.current[node - 1] = None;
    }

    fn emit(&mut self) {
        let topo = self.topology;
        let leaf_masks: Vec<u64> = topo.leaf_nodes().map(|l| self.members[l]).collect();
        if leaf_masks.iter().any(|&m| m != 0 && (m.count_ones() as usize) < self.n_min) {
            return;
        }
        let _ = self.dataset;
        self.out.push(Structure {
            split_count: self.current.iter().filter(|s| s.is_some()).count(),
            splits: self.current.clone(),
            leaf_masks,
        });
    }
}

fn label_mask(dataset: &Dataset) -> u64 {
    dataset
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &y)| y == 1)
        .fold(0u64, |m, (i, _)| m | (1 << i))
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Distinct leaf partitions, each represented by its fewest-split tree.
fn structures(dataset: &Dataset, depth: u32, n_min: usize, limits: &OracleLimits) -> Result<Vec<Structure>> {
    check_limits(dataset, depth, limits)?;
    let topology = TreeTopology::new(depth)?;
    let set = CandidateSplitSet::new(dataset);
    let candidates = set
        .splits()
        .map(|s| {
            let mask = dataset
                .rows()
                .enumerate()
                .filter(|(_, x)| s.goes_left(x))
                .fold(0u64, |m, (i, _)| m | (1 << i));
            (s, mask)
        })
        .collect();
    let mut members = alloc::vec![0u64; topology.node_count() + 1];
    members[1] = full_mask(dataset.n());
    let mut walker = Walker {
        topology,
        candidates,
        dataset,
        n_min,
        members,
        current: alloc::vec![None; topology.branch_count()],
        out: Vec::new(),
    };
    walker.visit(1);
    let mut all = walker.out;
    // Stable: among equal split counts the enumeration order survives.
    all.sort_by_key(|s| s.split_count);
    let mut seen: BTreeMap<Vec<u64>, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for s in all {
        let mut key: Vec<u64> = s.leaf_masks.iter().copied().filter(|&m| m != 0).collect();
        key.sort_unstable();
        if seen.insert(key, ()).is_none() {
            out.push(s);
        }
    }
    Ok(out)
}

fn build_tree(
    dataset: &Dataset,
    topology: TreeTopology,
    s: &Structure,
    class_of: impl Fn(usize, u64) -> Class,
) -> Result<DecisionTree> {
    let leaves = s
        .leaf_masks
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            if m == 0 {
                Leaf::default()
            } else {
                Leaf {
                    class: Some(class_of(k, m)),
                    support: Some(m.count_ones() as usize),
                }
            }
        })
        .collect();
    DecisionTree::new(topology, dataset.p(), s.splits.clone(), leaves, dataset.majority_class())
}

/// Every structurally distinct pruned tree of depth `depth` whose non-empty
/// leaves hold at least `n_min` points, with leaf-majority classes and the
/// induced error vector. Ordered by split count, then enumeration order.
pub fn enumerate_trees(dataset: &Dataset, depth: u32, n_min: usize, limits: &OracleLimits) -> Result<Vec<EnumeratedTree>> {
    let topology = TreeTopology::new(depth)?;
    let ymask = label_mask(dataset);
    structures(dataset, depth, n_min, limits)?
        .into_iter()
        .map(|s| {
            let tree = build_tree(dataset, topology, &s, |_, m| {
                let pos = (m & ymask).count_ones();
                u8::from(pos > m.count_ones() - pos)
            })?;
            let errors: Vec<bool> = dataset
                .rows()
                .enumerate()
                .map(|(i, x)| tree.predict(x).map(|c| c != dataset.label(i)))
                .collect::<Result<_>>()?;
            let error_count = errors.iter().filter(|&&e| e).count();
            Ok(EnumeratedTree {
                tree,
                split_count: s.split_count,
                errors,
                error_count,
                leaf_masks: s.leaf_masks,
            })
        })
        .collect()
}

/// An optimal forest found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub forest: Forest,
    pub errors: usize,
    pub total_splits: usize,
}

struct Labeled {
    structure: usize,
    labeling: u32,
    splits: usize,
    wrong: u64,
}

/// Globally optimal forest of `trees ∈ {1, 3}` depth-`depth` trees with at
/// most `split_budget` active splits in total.
pub fn best_forest(
    dataset: &Dataset,
    trees: usize,
    depth: u32,
    split_budget: usize,
    n_min: usize,
    limits: &OracleLimits,
) -> Result<OracleSolution> {
    if trees != 1 && trees != 3 {
        return Err(Error::Config(format!("the oracle searches forests of 1 or 3 trees, not {trees}")));
    }
    let topology = TreeTopology::new(depth)?;
    let structs = structures(dataset, depth, n_min, limits)?;
    let ymask = label_mask(dataset);
    let full = full_mask(dataset.n());

    // Every labeling of the non-empty leaves, deduplicated by prediction.
    let mut labeled: Vec<Labeled> = Vec::new();
    let mut seen: BTreeMap<u64, ()> = BTreeMap::new();
    for (k, s) in structs.iter().enumerate() {
        let nonempty: Vec<u64> = s.leaf_masks.iter().copied().filter(|&m| m != 0).collect();
        for labeling in 0u32..(1 << nonempty.len()) {
            let pred = nonempty
                .iter()
                .enumerate()
                .filter(|(j, _)| labeling >> j & 1 == 1)
                .fold(0u64, |acc, (_, &m)| acc | m);
            if seen.insert(pred, ()).is_none() {
                labeled.push(Labeled {
                    structure: k,
                    labeling,
                    splits: s.split_count,
                    wrong: (pred ^ ymask) & full,
                });
            }
        }
    }
    // Structures are sorted by split count, so `labeled` is too.

    let mut work = 0u64;
    let mut bump = |amount: u64| -> Result<()> {
        work += amount;
        if work > limits.max_combinations {
            return Err(Error::EnumerationCap(format!(
                "more than {} forest combinations for n = {}, p = {}, depth {depth}, budget {split_budget}",
                limits.max_combinations,
                dataset.n(),
                dataset.p()
            )));
        }
        Ok(())
    };

    let max_per_tree = topology.branch_count();
    let buckets: Vec<core::ops::Range<usize>> = (0..=max_per_tree)
        .map(|s| {
            let lo = labeled.partition_point(|c| c.splits < s);
            let hi = labeled.partition_point(|c| c.splits <= s);
            lo..hi
        })
        .collect();

    let mut best: Option<(usize, usize, [usize; 3])> = None;
    if trees == 1 {
        for (idx, c) in labeled.iter().enumerate() {
            if c.splits > split_budget {
                break;
            }
            bump(1)?;
            let e = c.wrong.count_ones() as usize;
            if best.is_none_or(|(be, _, _)| e < be) {
                best = Some((e, c.splits, [idx, idx, idx]));
            }
        }
    } else {
        'levels: for total in 0..=split_budget {
            for a in 0..=max_per_tree.min(total) {
                for b in a..=max_per_tree.min(total - a) {
                    let c = total - a - b;
                    if c < b || c > max_per_tree {
                        continue;
                    }
                    for i in buckets[a].clone() {
                        let wi = labeled[i].wrong;
                        let j_start = if a == b { i } else { buckets[b].start };
                        for j in j_start..buckets[b].end {
                            let wj = labeled[j].wrong;
                            let both = wi & wj;
                            let either = wi ^ wj;
                            let floor = both.count_ones() as usize;
                            if best.is_some_and(|(be, _, _)| floor >= be) {
                                continue;
                            }
                            let k_start = if b == c { j } else { buckets[c].start };
                            let span = buckets[c].end - k_start;
                            bump(span as u64)?;
                            for k in k_start..buckets[c].end {
                                let e = floor + (either & labeled[k].wrong).count_ones() as usize;
                                if best.is_none_or(|(be, _, _)| e < be) {
                                    best = Some((e, total, [i, j, k]));
                                    if e == 0 {
                                        break 'levels;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let (errors, total_splits, picks) =
        best.ok_or_else(|| Error::Config("no forest satisfies the budget and n_min".into()))?;
    let chosen: &[usize] = if trees == 1 { &picks[..1] } else { &picks[..] };
    let forest_trees = chosen
        .iter()
        .map(|&idx| {
            let c = &labeled[idx];
            let s = &structs[c.structure];
            let nonempty_rank: Vec<Option<usize>> = {
                let mut rank = 0;
                s.leaf_masks
                    .iter()
                    .map(|&m| {
                        (m != 0).then(|| {
                            rank += 1;
                            rank - 1
                        })
                    })
                    .collect()
            };
            build_tree(dataset, topology, s, |k, _| {
                let j = nonempty_rank[k].expect("labels only non-empty leaves");
                (c.labeling >> j & 1) as Class
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleSolution {
        forest: Forest::new(forest_trees)?,
        errors,
        total_splits,
    })
}
