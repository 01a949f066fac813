//! Column layout of the forest model.
//!
//! Blocks are laid out contiguously in this order, tree-major inside each
//! per-tree block:
//!
//! | block | shape | kind |
//! |-------|-------|------|
//! | `alpha_i` | n | binary |
//! | `theta_i_r` | R × n | binary |
//! | `z_i_t_r` | R × leaves × n | binary |
//! | `d_t_r` | R × branches | binary |
//! | `l_t_r` | R × leaves | binary |
//! | `a_t_q_r` | R × branches × p | binary |
//! | `b_t_r` | R × branches | continuous in [0, 1] |
//! | `xor_i_r` | R × n | binary, only with symmetry breaking |
//! | `c_t_r` | R × leaves | binary, only with per-leaf class columns |
//!
//! Observation and feature indices are zero-based, node indices one-based
//! (root = 1), tree indices zero-based.

use alloc::format;
use alloc::string::String;

use crate::milp::{VarId, VarKind};
use crate::topology::{NodeIndex, TreeTopology};

/// A model column by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// Forest prediction for observation `i`.
    Alpha { i: usize },
    /// Class tree `r` assigns to observation `i`.
    Theta { i: usize, r: usize },
    /// Observation `i` lands in leaf `t` of tree `r`.
    Z { i: usize, t: NodeIndex, r: usize },
    /// Branch node `t` of tree `r` splits.
    D { t: NodeIndex, r: usize },
    /// Leaf `t` of tree `r` is non-empty.
    L { t: NodeIndex, r: usize },
    /// Branch node `t` of tree `r` splits on feature `q`.
    A { t: NodeIndex, q: usize, r: usize },
    /// Threshold of branch node `t` in tree `r`.
    B { t: NodeIndex, r: usize },
    /// `|theta_i_r - alpha_i|`.
    Xor { i: usize, r: usize },
    /// Class of leaf `t` in tree `r`.
    LeafClass { t: NodeIndex, r: usize },
}

impl Symbol {
    /// LP-safe column name.
    pub fn name(&self) -> String {
        match *self {
            Symbol::Alpha { i } => format!("alpha_{i}"),
            Symbol::Theta { i, r } => format!("theta_{i}_{r}"),
            Symbol::Z { i, t, r } => format!("z_{i}_{t}_{r}"),
            Symbol::D { t, r } => format!("d_{t}_{r}"),
            Symbol::L { t, r } => format!("l_{t}_{r}"),
            Symbol::A { t, q, r } => format!("a_{t}_{q}_{r}"),
            Symbol::B { t, r } => format!("b_{t}_{r}"),
            Symbol::Xor { i, r } => format!("xor_{i}_{r}"),
            Symbol::LeafClass { t, r } => format!("c_{t}_{r}"),
        }
    }

    pub fn kind(&self) -> VarKind {
        match self {
            Symbol::B { .. } => VarKind::Continuous,
            _ => VarKind::Binary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Offsets {
    alpha: usize,
    theta: usize,
    z: usize,
    d: usize,
    l: usize,
    a: usize,
    b: usize,
    xor: usize,
    leaf_class: usize,
    end: usize,
}

/// Bijection between [`Symbol`]s and contiguous column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableRegistry {
    n: usize,
    p: usize,
    trees: usize,
    topology: TreeTopology,
    has_xor: bool,
    has_leaf_class: bool,
    off: Offsets,
}

impl VariableRegistry {
    pub fn new(n: usize, p: usize, trees: usize, topology: TreeTopology, has_xor: bool, has_leaf_class: bool) -> Self {
        let nb = topology.branch_count();
        let nl = topology.leaf_count();
        let alpha = 0;
        let theta = alpha + n;
        let z = theta + trees * n;
        let d = z + trees * nl * n;
        let l = d + trees * nb;
        let a = l + trees * nl;
        let b = a + trees * nb * p;
        let xor = b + trees * nb;
        let leaf_class = xor + if has_xor { trees * n } else { 0 };
        let end = leaf_class + if has_leaf_class { trees * nl } else { 0 };
        Self {
            n,
            p,
            trees,
            topology,
            has_xor,
            has_leaf_class,
            off: Offsets {
                alpha,
                theta,
                z,
                d,
                l,
                a,
                b,
                xor,
                leaf_class,
                end,
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn tree_count(&self) -> usize {
        self.trees
    }

    pub fn topology(&self) -> TreeTopology {
        self.topology
    }

    pub fn has_xor(&self) -> bool {
        self.has_xor
    }

    pub fn has_leaf_class(&self) -> bool {
        self.has_leaf_class
    }

    pub fn len(&self) -> usize {
        self.off.end
    }

    pub fn is_empty(&self) -> bool {
        self.off.end == 0
    }

    fn branch(&self, t: NodeIndex) -> Option<usize> {
        self.topology.branch_position(t).ok()
    }

    fn leaf(&self, t: NodeIndex) -> Option<usize> {
        self.topology.leaf_position(t).ok()
    }

    /// Column of `sym`, or `None` when the symbol is out of range or its
    /// block is absent.
    pub fn id(&self, sym: Symbol) -> Option<VarId> {
        let (n, p, nb, nl) = (self.n, self.p, self.topology.branch_count(), self.topology.leaf_count());
        let r_ok = |r: usize| r < self.trees;
        let col = match sym {
            Symbol::Alpha { i } if i < n => self.off.alpha + i,
            Symbol::Theta { i, r } if i < n && r_ok(r) => self.off.theta + r * n + i,
            Symbol::Z { i, t, r } if i < n && r_ok(r) => self.off.z + (r * nl + self.leaf(t)?) * n + i,
            Symbol::D { t, r } if r_ok(r) => self.off.d + r * nb + self.branch(t)?,
            Symbol::L { t, r } if r_ok(r) => self.off.l + r * nl + self.leaf(t)?,
            Symbol::A { t, q, r } if q < p && r_ok(r) => self.off.a + (r * nb + self.branch(t)?) * p + q,
            Symbol::B { t, r } if r_ok(r) => self.off.b + r * nb + self.branch(t)?,
            Symbol::Xor { i, r } if self.has_xor && i < n && r_ok(r) => self.off.xor + r * n + i,
            Symbol::LeafClass { t, r } if self.has_leaf_class && r_ok(r) => {
                self.off.leaf_class + r * nl + self.leaf(t)?
            }
            _ => return None,
        };
        Some(VarId(col))
    }

    /// Like [`id`](Self::id) for symbols known to exist.
    pub(crate) fn col(&self, sym: Symbol) -> VarId {
        self.id(sym).expect("symbol inside the registry layout")
    }

    /// Inverse of [`id`](Self::id).
    pub fn symbol(&self, id: VarId) -> Option<Symbol> {
        let (n, p, nb, nl) = (self.n, self.p, self.topology.branch_count(), self.topology.leaf_count());
        let c = id.0;
        let first_branch = 1;
        let first_leaf = nb + 1;
        let o = &self.off;
        let sym = if c < o.theta {
            Symbol::Alpha { i: c }
        } else if c < o.z {
            let k = c - o.theta;
            Symbol::Theta { i: k % n, r: k / n }
        } else if c < o.d {
            let k = c - o.z;
            let (rest, i) = (k / n, k % n);
            Symbol::Z { i, t: first_leaf + rest % nl, r: rest / nl }
        } else if c < o.l {
            let k = c - o.d;
            Symbol::D { t: first_branch + k % nb, r: k / nb }
        } else if c < o.a {
            let k = c - o.l;
            Symbol::L { t: first_leaf + k % nl, r: k / nl }
        } else if c < o.b {
            let k = c - o.a;
            let (rest, q) = (k / p, k % p);
            Symbol::A { t: first_branch + rest % nb, q, r: rest / nb }
        } else if c < o.xor {
            let k = c - o.b;
            Symbol::B { t: first_branch + k % nb, r: k / nb }
        } else if c < o.leaf_class {
            let k = c - o.xor;
            Symbol::Xor { i: k % n, r: k / n }
        } else if c < o.end {
            let k = c - o.leaf_class;
            Symbol::LeafClass { t: first_leaf + k % nl, r: k / nl }
        } else {
            return None;
        };
        Some(sym)
    }

    /// Every column in layout order.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.len()).map(|c| self.symbol(VarId(c)).expect("column inside the layout"))
    }
}
