//! Reading a forest back out of a solved assignment.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{ForestModel, Symbol};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::milp::{VarKind, AUDIT_TOLERANCE};
use crate::topology::NodeIndex;
use crate::tree::{DecisionTree, Forest, Leaf, Split};
use crate::Class;

fn rounded(values: &[f64], fm: &ForestModel, sym: Symbol) -> bool {
    values[fm.registry.col(sym).0] > 0.5
}

/// Forest encoded by `values`.
///
/// Thresholds are taken from `b`; when solver tolerances leave `b` on the
/// wrong side of a training point relative to the `z` placement, the
/// threshold is moved to the midpoint of the gap the placement implies.
/// Afterwards every training point is re-routed and must land in the leaf
/// its `z` column names.
pub fn extract_forest(values: &[f64], fm: &ForestModel, dataset: &Dataset) -> Result<Forest> {
    let reg = &fm.registry;
    if values.len() != reg.len() {
        return Err(Error::Shape {
            expected: reg.len(),
            actual: values.len(),
        });
    }
    if dataset.n() != reg.n() || dataset.p() != reg.p() {
        return Err(Error::Shape {
            expected: reg.n(),
            actual: dataset.n(),
        });
    }
    for (j, var) in fm.model.variables().iter().enumerate() {
        let x = values[j];
        if !x.is_finite() {
            return Err(Error::Extraction(format!("{} is not finite", var.name)));
        }
        if var.kind == VarKind::Binary && x.abs().min((1.0 - x).abs()) > AUDIT_TOLERANCE {
            return Err(Error::Extraction(format!("{} = {x} is not integral", var.name)));
        }
    }

    let topo = reg.topology();
    let (n, p) = (reg.n(), reg.p());
    let fallback = dataset.majority_class();
    let mut trees = Vec::with_capacity(reg.tree_count());
    for r in 0..reg.tree_count() {
        // Leaf of every observation according to z.
        let mut placed: Vec<NodeIndex> = Vec::with_capacity(n);
        for i in 0..n {
            let hits: Vec<NodeIndex> = topo.leaf_nodes().filter(|&t| rounded(values, fm, Symbol::Z { i, t, r })).collect();
            if hits.len() != 1 {
                return Err(Error::Consistency(format!("observation {i} sits in {} leaves of tree {r}", hits.len())));
            }
            placed.push(hits[0]);
        }

        let mut splits = vec![None; topo.branch_count()];
        for t in topo.branch_nodes() {
            if !rounded(values, fm, Symbol::D { t, r }) {
                continue;
            }
            let chosen: Vec<usize> = (0..p).filter(|&q| rounded(values, fm, Symbol::A { t, q, r })).collect();
            if chosen.len() != 1 {
                return Err(Error::Consistency(format!(
                    "node {t} of tree {r} is active with {} features selected",
                    chosen.len()
                )));
            }
            let q = chosen[0];
            let b = values[reg.col(Symbol::B { t, r }).0].clamp(0.0, 1.0);
            splits[t - 1] = Some(Split::new(q, snap(dataset, &placed, topo, t, q, b, r)?));
        }

        let mut leaves = vec![Leaf::default(); topo.leaf_count()];
        for (k, t) in topo.leaf_nodes().enumerate() {
            let mut class: Option<Class> = None;
            let mut support = 0;
            for (i, &leaf) in placed.iter().enumerate() {
                if leaf != t {
                    continue;
                }
                support += 1;
                let theta = u8::from(rounded(values, fm, Symbol::Theta { i, r }));
                match class {
                    None => class = Some(theta),
                    Some(c) if c != theta => {
                        return Err(Error::Consistency(format!("leaf {t} of tree {r} mixes classes")));
                    }
                    _ => {}
                }
            }
            if support > 0 {
                leaves[k] = Leaf {
                    class,
                    support: Some(support),
                };
            }
        }
        let tree = DecisionTree::new(topo, p, splits, leaves, fallback)?;
        for (i, &leaf) in placed.iter().enumerate() {
            let routed = tree.route(dataset.row(i))?;
            if routed != leaf {
                return Err(Error::Consistency(format!(
                    "observation {i} routes to leaf {routed} of tree {r} but is placed in leaf {leaf}"
                )));
            }
        }
        trees.push(tree);
    }
    Forest::new(trees)
}

/// Threshold in `(max left value, min right value]` for the points the
/// placement sends through node `t`, keeping `b` whenever it already works.
fn snap(
    dataset: &Dataset,
    placed: &[NodeIndex],
    topo: crate::topology::TreeTopology,
    t: NodeIndex,
    q: usize,
    b: f64,
    r: usize,
) -> Result<f64> {
    let left = topo.leaves_below(2 * t);
    let right = topo.leaves_below(2 * t + 1);
    let mut left_max = f64::NEG_INFINITY;
    let mut right_min = f64::INFINITY;
    for (i, leaf) in placed.iter().enumerate() {
        let v = dataset.value(i, q);
        if left.contains(leaf) {
            left_max = left_max.max(v);
        } else if right.contains(leaf) {
            right_min = right_min.min(v);
        }
    }
    if left_max < b && b <= right_min {
        return Ok(b);
    }
    if left_max >= right_min {
        return Err(Error::Consistency(format!(
            "node {t} of tree {r}: left values reach {left_max} but right values start at {right_min}"
        )));
    }
    Ok(if right_min.is_infinite() {
        (left_max + 1.0) / 2.0
    } else if left_max.is_infinite() {
        right_min / 2.0
    } else {
        0.5 * (left_max + right_min)
    })
}

/// An observation whose routed leaf disagrees with its placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingMismatch {
    pub observation: usize,
    pub tree: usize,
    pub routed: NodeIndex,
    pub placed: Option<NodeIndex>,
}

/// Observations whose route through `forest` differs from the leaf the
/// assignment's `z` columns place them in.
pub fn routing_mismatches(values: &[f64], fm: &ForestModel, dataset: &Dataset, forest: &Forest) -> Result<Vec<RoutingMismatch>> {
    let reg = &fm.registry;
    let mut out = Vec::new();
    for (r, tree) in forest.trees().iter().enumerate() {
        for i in 0..reg.n() {
            let routed = tree.route(dataset.row(i))?;
            let hits: Vec<NodeIndex> = reg
                .topology()
                .leaf_nodes()
                .filter(|&t| rounded(values, fm, Symbol::Z { i, t, r }))
                .collect();
            let placed = (hits.len() == 1).then(|| hits[0]);
            if placed != Some(routed) {
                out.push(RoutingMismatch {
                    observation: i,
                    tree: r,
                    routed,
                    placed,
                });
            }
        }
    }
    Ok(out)
}
