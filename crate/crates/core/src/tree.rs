//! Decision trees over a fixed-depth topology and majority-vote forests.
//!
//! A branch node either carries an axis-aligned split `x[feature] < threshold`
//! (left) / `x[feature] >= threshold` (right) or is inactive. Observations that
//! reach an inactive branch node always continue to the right child, which is
//! the only direction the mixed-integer formulation admits when `a = 0, b = 0`.
//! Consequently a tree with no splits sends everything to its rightmost leaf.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::topology::{NodeIndex, TreeTopology};
use crate::Class;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
}

impl Split {
    pub fn new(feature: usize, threshold: f64) -> Self {
        Self { feature, threshold }
    }

    #[inline]
    pub fn goes_left(&self, x: &[f64]) -> bool {
        x[self.feature] < self.threshold
    }
}

/// Leaf payload: the class learned in training (if any point reached the
/// leaf) and, optionally, how many training points it held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Leaf {
    pub class: Option<Class>,
    pub support: Option<usize>,
}

impl Leaf {
    pub fn with_class(class: Class) -> Self {
        Self {
            class: Some(class),
            support: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    topology: TreeTopology,
    n_features: usize,
    splits: Vec<Option<Split>>,
    leaves: Vec<Leaf>,
    fallback_class: Class,
}

/// One hop of a root-to-leaf path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStep {
    pub node: NodeIndex,
    /// Split evaluated at this node; `None` for inactive nodes and the leaf.
    pub split: Option<Split>,
    pub went_left: bool,
}

impl DecisionTree {
    /// Builds a tree after checking the split hierarchy, feature bounds and
    /// class values.
    pub fn new(
        topology: TreeTopology,
        n_features: usize,
        splits: Vec<Option<Split>>,
        leaves: Vec<Leaf>,
        fallback_class: Class,
    ) -> Result<Self> {
        let tree = Self {
            topology,
            n_features,
            splits,
            leaves,
            fallback_class,
        };
        tree.validate()?;
        Ok(tree)
    }

    /// A tree without splits whose every leaf is unlabeled.
    pub fn empty(topology: TreeTopology, n_features: usize, fallback_class: Class) -> Self {
        Self {
            topology,
            n_features,
            splits: alloc::vec![None; topology.branch_count()],
            leaves: alloc::vec![Leaf::default(); topology.leaf_count()],
            fallback_class,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let topo = &self.topology;
        if self.n_features == 0 {
            return Err(Error::InvalidTree("feature dimension must be positive".into()));
        }
        if self.splits.len() != topo.branch_count() || self.leaves.len() != topo.leaf_count() {
            return Err(Error::InvalidTree(format!(
                "expected {} branch slots and {} leaves, got {} and {}",
                topo.branch_count(),
                topo.leaf_count(),
                self.splits.len(),
                self.leaves.len()
            )));
        }
        check_class(self.fallback_class)?;
        for node in topo.branch_nodes() {
            let Some(split) = self.splits[node - 1] else {
                continue;
            };
            if split.feature >= self.n_features {
                return Err(Error::InvalidTree(format!(
                    "node {node} splits on feature {} but p = {}",
                    split.feature, self.n_features
                )));
            }
            if !(0.0..=1.0).contains(&split.threshold) {
                return Err(Error::InvalidTree(format!(
                    "node {node} threshold {} outside [0, 1]",
                    split.threshold
                )));
            }
            if let Some(parent) = topo.parent(node) {
                if self.splits[parent - 1].is_none() {
                    return Err(Error::InvalidTree(format!(
                        "node {node} has a split but its parent {parent} does not"
                    )));
                }
            }
        }
        for leaf in &self.leaves {
            if let Some(c) = leaf.class {
                check_class(c)?;
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> &TreeTopology {
        &self.topology
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn fallback_class(&self) -> Class {
        self.fallback_class
    }

    pub fn split(&self, node: NodeIndex) -> Option<&Split> {
        if self.topology.is_branch(node) {
            self.splits[node - 1].as_ref()
        } else {
            None
        }
    }

    pub fn splits(&self) -> &[Option<Split>] {
        &self.splits
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn leaf(&self, node: NodeIndex) -> Result<&Leaf> {
        Ok(&self.leaves[self.topology.leaf_position(node)?])
    }

    pub fn leaf_class(&self, node: NodeIndex) -> Result<Option<Class>> {
        Ok(self.leaf(node)?.class)
    }

    pub fn split_count(&self) -> usize {
        self.splits.iter().filter(|s| s.is_some()).count()
    }

    /// Features used by at least one split, ascending and deduplicated.
    pub fn referenced_features(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.splits.iter().flatten().map(|s| s.feature).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Leaf reached by `x`.
    pub fn route(&self, x: &[f64]) -> Result<NodeIndex> {
        self.check_shape(x)?;
        let mut t = 1;
        while self.topology.is_branch(t) {
            t = match &self.splits[t - 1] {
                Some(split) if split.goes_left(x) => 2 * t,
                _ => 2 * t + 1,
            };
        }
        Ok(t)
    }

    /// Full root-to-leaf path, ending with the leaf itself.
    pub fn route_path(&self, x: &[f64]) -> Result<Vec<PathStep>> {
        self.check_shape(x)?;
        let mut path = Vec::with_capacity(self.topology.depth() as usize + 1);
        let mut t = 1;
        while self.topology.is_branch(t) {
            let split = self.splits[t - 1];
            let went_left = split.is_some_and(|s| s.goes_left(x));
            path.push(PathStep {
                node: t,
                split,
                went_left,
            });
            t = if went_left { 2 * t } else { 2 * t + 1 };
        }
        path.push(PathStep {
            node: t,
            split: None,
            went_left: false,
        });
        Ok(path)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Class> {
        let leaf = self.route(x)?;
        Ok(self.class_at(leaf))
    }

    /// Class assigned at a leaf, falling back when it was empty in training.
    pub fn class_at(&self, leaf: NodeIndex) -> Class {
        self.leaves[leaf - self.topology.leaf_count()]
            .class
            .unwrap_or(self.fallback_class)
    }

    fn check_shape(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

fn check_class(c: Class) -> Result<()> {
    if c > 1 {
        return Err(Error::InvalidTree(format!("class {c} is not binary")));
    }
    Ok(())
}

/// Majority over binary votes: `1` iff strictly more than half the votes are
/// `1`. With an even number of voters a tie resolves to `0`.
pub fn majority_vote(votes: &[Class]) -> Result<Class> {
    if votes.is_empty() {
        return Err(Error::InvalidModel("cannot vote with zero trees".into()));
    }
    let ones = votes.iter().filter(|&&v| v == 1).count();
    Ok(u8::from(2 * ones > votes.len()))
}

/// An ensemble of trees combined by majority vote.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<DecisionTree>,
}

/// Per-tree explanation of a forest prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeTrace {
    pub path: Vec<PathStep>,
    pub leaf: NodeIndex,
    pub vote: Class,
    /// Whether the vote came from the tree's fallback class.
    pub used_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestTrace {
    pub trees: Vec<TreeTrace>,
    pub majority: Class,
    /// Indices of trees whose vote differs from the majority.
    pub dissenting: Vec<usize>,
}

impl Forest {
    /// A forest with an odd number of trees, so votes never tie.
    pub fn new(trees: Vec<DecisionTree>) -> Result<Self> {
        if trees.len() % 2 == 0 {
            return Err(Error::InvalidModel(format!(
                "a forest needs an odd number of trees, got {}",
                trees.len()
            )));
        }
        Self::with_any_count(trees)
    }

    /// Any non-zero tree count. Used by baselines with even tree counts;
    /// ties resolve to class 0.
    pub fn with_any_count(trees: Vec<DecisionTree>) -> Result<Self> {
        let Some(first) = trees.first() else {
            return Err(Error::InvalidModel("a forest needs at least one tree".into()));
        };
        let p = first.n_features();
        if let Some(bad) = trees.iter().position(|t| t.n_features() != p) {
            return Err(Error::InvalidModel(format!(
                "tree {bad} has {} features, tree 0 has {p}",
                trees[bad].n_features()
            )));
        }
        Ok(Self { trees })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn into_trees(self) -> Vec<DecisionTree> {
        self.trees
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.trees[0].n_features()
    }

    pub fn total_splits(&self) -> usize {
        self.trees.iter().map(DecisionTree::split_count).sum()
    }

    pub fn votes(&self, x: &[f64]) -> Result<Vec<Class>> {
        self.trees.iter().map(|t| t.predict(x)).collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Class> {
        majority_vote(&self.votes(x)?)
    }

    pub fn trace(&self, x: &[f64]) -> Result<ForestTrace> {
        let mut trees = Vec::with_capacity(self.trees.len());
        for tree in &self.trees {
            let path = tree.route_path(x)?;
            let leaf = path.last().map(|s| s.node).unwrap_or(1);
            let stored = tree.leaf_class(leaf)?;
            trees.push(TreeTrace {
                path,
                leaf,
                vote: stored.unwrap_or(tree.fallback_class()),
                used_fallback: stored.is_none(),
            });
        }
        let votes: Vec<Class> = trees.iter().map(|t| t.vote).collect();
        let majority = majority_vote(&votes)?;
        let dissenting = votes
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != majority)
            .map(|(r, _)| r)
            .collect();
        Ok(ForestTrace {
            trees,
            majority,
            dissenting,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn topo(d: u32) -> TreeTopology {
        TreeTopology::new(d).unwrap()
    }

    fn root_split_tree() -> DecisionTree {
        DecisionTree::new(
            topo(2),
            1,
            vec![Some(Split::new(0, 0.5)), None, None],
            vec![Leaf::default(), Leaf::with_class(0), Leaf::default(), Leaf::with_class(1)],
            1,
        )
        .unwrap()
    }

    #[test]
    fn single_root_split_routes_through_inactive_right_hops() {
        let tree = root_split_tree();
        // 0.3 < 0.5 goes left to node 2, which is inactive, so right to 5.
        assert_eq!(tree.route(&[0.3]).unwrap(), 5);
        assert_eq!(tree.route(&[0.5]).unwrap(), 7);
        assert_eq!(tree.predict(&[0.3]).unwrap(), 0);
        assert_eq!(tree.predict(&[0.9]).unwrap(), 1);
    }

    #[test]
    fn tree_without_splits_reaches_rightmost_leaf() {
        let tree = DecisionTree::empty(topo(2), 3, 0);
        for x in [[0.0, 0.0, 0.0], [1.0, 0.5, 0.2], [0.3, 0.9, 1.0]] {
            assert_eq!(tree.route(&x).unwrap(), 7);
            assert_eq!(tree.predict(&x).unwrap(), 0);
        }
    }

    #[test]
    fn nested_left_conditions_reach_leaf_four() {
        let tree = DecisionTree::new(
            topo(2),
            2,
            vec![Some(Split::new(0, 0.6)), Some(Split::new(1, 0.4)), None],
            vec![Leaf::with_class(1), Leaf::with_class(0), Leaf::default(), Leaf::with_class(0)],
            0,
        )
        .unwrap();
        assert_eq!(tree.route(&[0.2, 0.1]).unwrap(), 4);
        assert_eq!(tree.route(&[0.2, 0.4]).unwrap(), 5);
        assert_eq!(tree.route(&[0.6, 0.1]).unwrap(), 7);
    }

    #[test]
    fn leaf_classes_and_fallback() {
        let mut leaves = vec![Leaf::with_class(1); 4];
        let all_one = DecisionTree::new(topo(2), 1, vec![Some(Split::new(0, 0.5)), None, None], leaves.clone(), 0).unwrap();
        assert_eq!(all_one.predict(&[0.1]).unwrap(), 1);
        leaves[1] = Leaf::default();
        let with_empty = DecisionTree::new(topo(2), 1, vec![Some(Split::new(0, 0.5)), None, None], leaves, 0).unwrap();
        assert_eq!(with_empty.predict(&[0.1]).unwrap(), 0);
    }

    #[test]
    fn dimension_mismatch_is_a_shape_error() {
        let tree = root_split_tree();
        assert_eq!(
            tree.route(&[0.1, 0.2]),
            Err(Error::Shape { expected: 1, actual: 2 })
        );
    }

    #[test]
    fn hierarchy_violation_is_rejected() {
        let err = DecisionTree::new(
            topo(2),
            1,
            vec![None, Some(Split::new(0, 0.5)), None],
            vec![Leaf::default(); 4],
            0,
        );
        assert!(matches!(err, Err(Error::InvalidTree(_))));
    }

    #[test]
    fn bad_feature_and_threshold_rejected() {
        let bad_feature = DecisionTree::new(topo(1), 1, vec![Some(Split::new(1, 0.5))], vec![Leaf::default(); 2], 0);
        assert!(bad_feature.is_err());
        let bad_threshold = DecisionTree::new(topo(1), 1, vec![Some(Split::new(0, 1.5))], vec![Leaf::default(); 2], 0);
        assert!(bad_threshold.is_err());
    }

    fn constant_tree(class: Class) -> DecisionTree {
        DecisionTree::new(topo(1), 1, vec![None], vec![Leaf::default(), Leaf::with_class(class)], 0).unwrap()
    }

    #[test]
    fn majority_of_three() {
        let f = Forest::new(vec![constant_tree(1), constant_tree(0), constant_tree(1)]).unwrap();
        assert_eq!(f.predict(&[0.5]).unwrap(), 1);
        let g = Forest::new(vec![constant_tree(0), constant_tree(0), constant_tree(1)]).unwrap();
        assert_eq!(g.predict(&[0.5]).unwrap(), 0);
        let trace = f.trace(&[0.5]).unwrap();
        assert_eq!(trace.majority, 1);
        assert_eq!(trace.dissenting, vec![1]);
    }

    #[test]
    fn forest_rules() {
        assert!(Forest::new(vec![]).is_err());
        assert!(Forest::new(vec![constant_tree(0), constant_tree(1)]).is_err());
        let even = Forest::with_any_count(vec![constant_tree(0), constant_tree(1)]).unwrap();
        assert_eq!(even.predict(&[0.2]).unwrap(), 0);
        assert!(majority_vote(&[]).is_err());
        let mixed = Forest::new(vec![constant_tree(0), DecisionTree::empty(topo(1), 2, 0), constant_tree(1)]);
        assert!(mixed.is_err());
    }

    fn arb_tree(p: usize) -> impl Strategy<Value = DecisionTree> {
        let slots = proptest::collection::vec(
            proptest::option::weighted(0.7, (0..p, 0.0f64..=1.0)),
            3,
        );
        let leaves = proptest::collection::vec(proptest::option::of(0u8..2), 4);
        (slots, leaves, 0u8..2).prop_map(move |(s, l, fb)| {
            let mut splits: Vec<Option<Split>> = s.into_iter().map(|o| o.map(|(f, t)| Split::new(f, t))).collect();
            if splits[0].is_none() {
                splits[1] = None;
                splits[2] = None;
            }
            let leaves = l.into_iter().map(|c| Leaf { class: c, support: None }).collect();
            DecisionTree::new(TreeTopology::new(2).unwrap(), p, splits, leaves, fb).unwrap()
        })
    }

    proptest! {
        #[test]
        fn routing_is_total(tree in arb_tree(3), x in proptest::collection::vec(0.0f64..=1.0, 3)) {
            let leaf = tree.route(&x).unwrap();
            prop_assert!(tree.topology().is_leaf(leaf));
        }

        #[test]
        fn forest_vote_is_permutation_invariant(
            a in arb_tree(3), b in arb_tree(3), c in arb_tree(3),
            x in proptest::collection::vec(0.0f64..=1.0, 3),
        ) {
            let f1 = Forest::new(vec![a.clone(), b.clone(), c.clone()]).unwrap();
            let f2 = Forest::new(vec![c, a, b]).unwrap();
            prop_assert_eq!(f1.predict(&x).unwrap(), f2.predict(&x).unwrap());
        }

        #[test]
        fn unreferenced_features_never_matter(
            tree in arb_tree(3),
            x in proptest::collection::vec(0.0f64..=1.0, 3),
            noise in 0.0f64..=1.0,
        ) {
            let used = tree.referenced_features();
            for q in 0..3 {
                if used.contains(&q) { continue; }
                let mut y = x.clone();
                y[q] = noise;
                prop_assert_eq!(tree.predict(&x).unwrap(), tree.predict(&y).unwrap());
            }
        }
    }
}
