//! Graphviz renderings of trees, one digraph per tree.
//!
//! An inactive branch node sends every point to the rightmost leaf below
//! it, so it is drawn as that leaf and its subtree is omitted.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ocf_core::{DecisionTree, Forest, NodeIndex};

use crate::error::{Error, Result};

/// Short decimal for labels: at most six places, trailing zeros dropped.
pub fn format_threshold(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn feature_name(names: &[String], q: usize) -> String {
    names.get(q).cloned().unwrap_or_else(|| format!("x{q}"))
}

fn leaf_label(tree: &DecisionTree, leaf: NodeIndex) -> Result<String> {
    let payload = tree.leaf(leaf)?;
    Ok(match (payload.class, payload.support) {
        (Some(c), Some(n)) => format!("class {c}\\nsupport {n}"),
        (Some(c), None) => format!("class {c}"),
        (None, _) => format!("class {}\\n(empty, fallback)", tree.fallback_class()),
    })
}

/// DOT text for one tree. Nodes appear in breadth-first order and keep
/// their heap indices as identifiers.
pub fn tree_to_dot(tree: &DecisionTree, feature_names: &[String], name: &str) -> Result<String> {
    let topo = tree.topology();
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{}\" {{", escape(name));
    s.push_str("  node [fontname=\"Helvetica\"];\n");
    let mut queue = std::collections::VecDeque::from([1usize]);
    let mut edges = String::new();
    while let Some(t) = queue.pop_front() {
        match tree.split(t) {
            Some(sp) => {
                let label = format!("{} < {}", feature_name(feature_names, sp.feature), format_threshold(sp.threshold));
                let _ = writeln!(s, "  n{t} [shape=box, label=\"{}\"];", escape(&label));
                let (l, r) = (2 * t, 2 * t + 1);
                let _ = writeln!(edges, "  n{t} -> n{l} [label=\"yes\"];");
                let _ = writeln!(edges, "  n{t} -> n{r} [label=\"no\"];");
                queue.push_back(l);
                queue.push_back(r);
            }
            None => {
                let leaf = if topo.is_leaf(t) { t } else { topo.rightmost_leaf_below(t) };
                let _ = writeln!(s, "  n{t} [shape=ellipse, label=\"{}\"];", leaf_label(tree, leaf)?);
            }
        }
    }
    s.push_str(&edges);
    s.push_str("}\n");
    Ok(s)
}

pub fn forest_to_dot(forest: &Forest, feature_names: &[String]) -> Result<Vec<String>> {
    forest
        .trees()
        .iter()
        .enumerate()
        .map(|(r, t)| tree_to_dot(t, feature_names, &format!("tree_{r}")))
        .collect()
}

/// Writes `tree_<r>.dot` files into `dir`, creating it if needed.
pub fn write_forest_dot(forest: &Forest, feature_names: &[String], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for (r, text) in forest_to_dot(forest, feature_names)?.into_iter().enumerate() {
        let path = dir.join(format!("tree_{r}.dot"));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ocf_core::{Leaf, Split, TreeTopology};

    fn count(text: &str, pat: &str) -> usize {
        text.matches(pat).count()
    }

    #[test]
    fn empty_tree_is_one_node() {
        let tree = DecisionTree::empty(TreeTopology::new(2).unwrap(), 2, 1);
        let dot = tree_to_dot(&tree, &[], "t").unwrap();
        assert_eq!(count(&dot, "[shape="), 1);
        assert!(dot.contains("class 1"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn full_depth_two_has_seven_nodes() {
        let topo = TreeTopology::new(2).unwrap();
        let tree = DecisionTree::new(
            topo,
            2,
            vec![Some(Split::new(0, 0.5)), Some(Split::new(1, 0.25)), Some(Split::new(1, 0.75))],
            vec![Leaf { class: Some(0), support: Some(4) }, Leaf::with_class(1), Leaf::with_class(0), Leaf::default()],
            1,
        )
        .unwrap();
        let names = vec!["age".to_owned(), "say \"hi\"".to_owned()];
        let dot = tree_to_dot(&tree, &names, "t").unwrap();
        assert_eq!(count(&dot, "[shape="), 7);
        assert_eq!(count(&dot, "->"), 6);
        assert!(dot.contains("label=\"age < 0.5\""));
        assert!(dot.contains("say \\\"hi\\\" < 0.25"));
        assert!(dot.contains("support 4"));
        assert!(dot.contains("(empty, fallback)"));
        assert_eq!(dot, tree_to_dot(&tree, &names, "t").unwrap());
    }

    #[test]
    fn inactive_node_collapses() {
        let topo = TreeTopology::new(2).unwrap();
        let tree = DecisionTree::new(
            topo,
            1,
            vec![Some(Split::new(0, 0.5)), None, Some(Split::new(0, 0.75))],
            vec![Leaf::default(), Leaf::with_class(1), Leaf::with_class(0), Leaf::with_class(1)],
            0,
        )
        .unwrap();
        let dot = tree_to_dot(&tree, &[], "t").unwrap();
        assert_eq!(count(&dot, "[shape="), 5);
        assert!(dot.contains("n2 [shape=ellipse, label=\"class 1\"]"));
        assert!(dot.contains("x0 < 0.75"));
    }

    #[test]
    fn threshold_format() {
        assert_eq!(format_threshold(0.5), "0.5");
        assert_eq!(format_threshold(0.1 + 0.2), "0.3");
        assert_eq!(format_threshold(1.0), "1");
        assert_eq!(format_threshold(-0.0000001), "0");
    }
}
