//! Index algebra of a complete binary tree of fixed depth.
//!
//! Nodes are numbered breadth-first starting at 1: the root is node 1 and the
//! children of node `t` are `2t` (left) and `2t + 1` (right). For depth `D`
//! the branch nodes are `1..=2^D - 1` and the leaves are `2^D..=2^(D+1) - 1`.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{Error, Result};

/// 1-based node index.
pub type NodeIndex = usize;

/// Largest supported depth; keeps every node index comfortably inside `usize`.
pub const MAX_DEPTH: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeTopology {
    depth: u32,
}

/// Ancestors of a leaf split by the branch taken on the root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ancestors {
    /// Nodes whose left branch is followed, ascending.
    pub left: Vec<NodeIndex>,
    /// Nodes whose right branch is followed, ascending.
    pub right: Vec<NodeIndex>,
}

impl TreeTopology {
    pub fn new(depth: u32) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::Config(alloc::format!(
                "tree depth {depth} exceeds the supported maximum {MAX_DEPTH}"
            )));
        }
        Ok(Self { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `T = 2^(D+1) - 1`.
    pub fn node_count(&self) -> usize {
        (1usize << (self.depth + 1)) - 1
    }

    pub fn branch_count(&self) -> usize {
        (1usize << self.depth) - 1
    }

    pub fn leaf_count(&self) -> usize {
        1usize << self.depth
    }

    /// `τ_b = {1, …, ⌊T/2⌋}`; empty for a depth-0 tree.
    pub fn branch_nodes(&self) -> RangeInclusive<NodeIndex> {
        1..=self.branch_count()
    }

    /// `τ_L = {⌈T/2⌉, …, T}`.
    pub fn leaf_nodes(&self) -> RangeInclusive<NodeIndex> {
        self.leaf_count()..=self.node_count()
    }

    pub fn is_branch(&self, node: NodeIndex) -> bool {
        node >= 1 && node <= self.branch_count()
    }

    pub fn is_leaf(&self, node: NodeIndex) -> bool {
        node >= self.leaf_count() && node <= self.node_count()
    }

    /// Position of a branch node inside `branch_nodes()` (0-based).
    pub fn branch_position(&self, node: NodeIndex) -> Result<usize> {
        if self.is_branch(node) {
            Ok(node - 1)
        } else {
            Err(self.invalid(node, "branch"))
        }
    }

    /// Position of a leaf inside `leaf_nodes()` (0-based).
    pub fn leaf_position(&self, node: NodeIndex) -> Result<usize> {
        if self.is_leaf(node) {
            Ok(node - self.leaf_count())
        } else {
            Err(self.invalid(node, "leaf"))
        }
    }

    pub fn parent(&self, node: NodeIndex) -> Option<NodeIndex> {
        (node >= 2 && node <= self.node_count()).then_some(node / 2)
    }

    pub fn left_child(&self, node: NodeIndex) -> Option<NodeIndex> {
        self.is_branch(node).then_some(2 * node)
    }

    pub fn right_child(&self, node: NodeIndex) -> Option<NodeIndex> {
        self.is_branch(node).then_some(2 * node + 1)
    }

    /// Leaf reached from `node` by always taking the right branch.
    pub fn rightmost_leaf_below(&self, node: NodeIndex) -> NodeIndex {
        let mut t = node;
        while self.is_branch(t) {
            t = 2 * t + 1;
        }
        t
    }

    /// Left and right ancestors `A_L(t)`, `A_R(t)` of a leaf.
    pub fn ancestors(&self, leaf: NodeIndex) -> Result<Ancestors> {
        if !self.is_leaf(leaf) {
            return Err(self.invalid(leaf, "leaf"));
        }
        let mut out = Ancestors::default();
        let mut t = leaf;
        while t > 1 {
            let parent = t / 2;
            if t % 2 == 0 {
                out.left.push(parent);
            } else {
                out.right.push(parent);
            }
            t = parent;
        }
        out.left.reverse();
        out.right.reverse();
        Ok(out)
    }

    /// Leaves in the subtree rooted at `node` (inclusive range).
    pub fn leaves_below(&self, node: NodeIndex) -> RangeInclusive<NodeIndex> {
        let mut lo = node;
        let mut hi = node;
        while self.is_branch(lo) {
            lo *= 2;
            hi = 2 * hi + 1;
        }
        lo..=hi
    }

    fn invalid(&self, node: NodeIndex, expected: &'static str) -> Error {
        Error::InvalidNode {
            node,
            depth: self.depth,
            expected,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn depth_two_node_sets() {
        let topo = TreeTopology::new(2).unwrap();
        assert_eq!(topo.node_count(), 7);
        assert_eq!(topo.branch_nodes(), 1..=3);
        assert_eq!(topo.leaf_nodes(), 4..=7);
    }

    #[test]
    fn ancestors_of_depth_two_leaves() {
        let topo = TreeTopology::new(2).unwrap();
        let a4 = topo.ancestors(4).unwrap();
        assert_eq!((a4.left, a4.right), (vec![1, 2], vec![]));
        let a5 = topo.ancestors(5).unwrap();
        assert_eq!((a5.left, a5.right), (vec![1], vec![2]));
        let a7 = topo.ancestors(7).unwrap();
        assert_eq!((a7.left, a7.right), (vec![], vec![1, 3]));
    }

    #[test]
    fn ancestors_rejects_branch_nodes() {
        let topo = TreeTopology::new(2).unwrap();
        assert!(matches!(
            topo.ancestors(3),
            Err(Error::InvalidNode { node: 3, .. })
        ));
        assert!(topo.ancestors(8).is_err());
        assert!(topo.ancestors(0).is_err());
    }

    #[test]
    fn depth_zero_is_a_single_leaf() {
        let topo = TreeTopology::new(0).unwrap();
        assert_eq!(topo.branch_count(), 0);
        assert_eq!(topo.leaf_nodes(), 1..=1);
        assert_eq!(topo.ancestors(1).unwrap(), Ancestors::default());
    }

    #[test]
    fn leaves_below_and_rightmost() {
        let topo = TreeTopology::new(3).unwrap();
        assert_eq!(topo.leaves_below(2), 8..=11);
        assert_eq!(topo.leaves_below(7), 14..=15);
        assert_eq!(topo.rightmost_leaf_below(2), 11);
        assert_eq!(topo.rightmost_leaf_below(1), 15);
    }

    proptest::proptest! {
        #[test]
        fn node_set_invariants(depth in 0u32..8) {
            let topo = TreeTopology::new(depth).unwrap();
            let t = topo.node_count();
            proptest::prop_assert_eq!(topo.branch_count(), (1usize << depth) - 1);
            proptest::prop_assert_eq!(topo.leaf_count(), 1usize << depth);
            for node in 1..=t {
                proptest::prop_assert!(topo.is_branch(node) ^ topo.is_leaf(node));
                if node >= 2 {
                    let p = topo.parent(node).unwrap();
                    proptest::prop_assert!(topo.left_child(p) == Some(node) || topo.right_child(p) == Some(node));
                }
            }
            for leaf in topo.leaf_nodes() {
                let a = topo.ancestors(leaf).unwrap();
                proptest::prop_assert_eq!(a.left.len() + a.right.len(), depth as usize);
                let mut all: Vec<_> = a.left.iter().chain(a.right.iter()).copied().collect();
                all.sort_unstable();
                let mut strict = Vec::new();
                let mut x = leaf;
                while x > 1 { x /= 2; strict.push(x); }
                strict.sort_unstable();
                proptest::prop_assert_eq!(all, strict);
            }
        }
    }
}
