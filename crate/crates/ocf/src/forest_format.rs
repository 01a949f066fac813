//! Plain-text forest files.
//!
//! ```text
//! ocf-forest v1
//! trees 3 features 2
//! feature 0 age
//! feature 1 income
//! tree 0 depth 2 fallback 0
//! split 1 feature 0 threshold 0.35
//! leaf 5 class 1 support 12
//! leaf 7 empty
//! end
//! ```
//!
//! Branch nodes without a `split` line are inactive; leaves without a
//! `leaf` line are empty. Thresholds use the shortest decimal form that
//! reads back to the same `f64`.

use std::fmt::Write as _;

use ocf_core::{Class, DecisionTree, Forest, Leaf, Split, TreeTopology};

use crate::error::{Error, Result};

const WHAT: &str = "forest";
const MAGIC: &str = "ocf-forest v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ForestFile {
    pub forest: Forest,
    pub feature_names: Vec<String>,
}

pub fn write_forest(forest: &Forest, feature_names: &[String]) -> Result<String> {
    if feature_names.len() != forest.n_features() {
        return Err(Error::Config(format!(
            "{} feature names for a forest over {} features",
            feature_names.len(),
            forest.n_features()
        )));
    }
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC}");
    let _ = writeln!(s, "trees {} features {}", forest.tree_count(), forest.n_features());
    for (q, name) in feature_names.iter().enumerate() {
        if name.trim() != name || name.is_empty() || name.contains('\n') {
            return Err(Error::Config(format!("feature name {name:?} cannot be stored")));
        }
        let _ = writeln!(s, "feature {q} {name}");
    }
    for (r, tree) in forest.trees().iter().enumerate() {
        let topo = tree.topology();
        let _ = writeln!(s, "tree {r} depth {} fallback {}", topo.depth(), tree.fallback_class());
        for t in topo.branch_nodes() {
            if let Some(sp) = tree.split(t) {
                let _ = writeln!(s, "split {t} feature {} threshold {}", sp.feature, sp.threshold);
            }
        }
        for t in topo.leaf_nodes() {
            let leaf = tree.leaf(t)?;
            match (leaf.class, leaf.support) {
                (Some(c), Some(n)) => {
                    let _ = writeln!(s, "leaf {t} class {c} support {n}");
                }
                (Some(c), None) => {
                    let _ = writeln!(s, "leaf {t} class {c}");
                }
                (None, _) => {
                    let _ = writeln!(s, "leaf {t} empty");
                }
            }
        }
        s.push_str("end\n");
    }
    Ok(s)
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    words: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn new(no: usize, text: &'a str) -> Self {
        let mut words = Vec::new();
        let mut start = None;
        for (k, ch) in text.char_indices().chain([(text.len(), ' ')]) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(k),
                (true, Some(s)) => {
                    words.push((s + 1, &text[s..k]));
                    start = None;
                }
                _ => {}
            }
        }
        Self { no, text, words }
    }

    fn err(&self, word: usize, message: impl Into<String>) -> Error {
        let col = self.words.get(word).map_or(self.text.len() + 1, |w| w.0);
        Error::parse(WHAT, self.no, col, message)
    }

    fn keyword(&self, word: usize, expect: &str) -> Result<()> {
        match self.words.get(word) {
            Some((_, w)) if *w == expect => Ok(()),
            Some((_, w)) => Err(self.err(word, format!("expected `{expect}`, found `{w}`"))),
            None => Err(self.err(word, format!("expected `{expect}`"))),
        }
    }

    fn num<T: std::str::FromStr>(&self, word: usize, what: &str) -> Result<T> {
        let (_, w) = self.words.get(word).ok_or_else(|| self.err(word, format!("missing {what}")))?;
        w.parse().map_err(|_| self.err(word, format!("bad {what} `{w}`")))
    }

    fn arity(&self, n: usize) -> Result<()> {
        if self.words.len() > n {
            return Err(self.err(n, "unexpected trailing text"));
        }
        Ok(())
    }
}

fn class(line: &Line<'_>, word: usize) -> Result<Class> {
    let c: Class = line.num(word, "class")?;
    if c > 1 {
        return Err(line.err(word, "class must be 0 or 1"));
    }
    Ok(c)
}

pub fn parse_forest(text: &str) -> Result<ForestFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, t)| Line::new(k + 1, t))
        .filter(|l| !l.words.is_empty() && !l.words[0].1.starts_with('#'));
    let eof = |what: &str| Error::parse(WHAT, text.lines().count() + 1, 1, format!("unexpected end of file, expected {what}"));

    let head = lines.next().ok_or_else(|| eof("header"))?;
    if head.text.trim() != MAGIC {
        return Err(head.err(0, format!("expected `{MAGIC}`")));
    }
    let dims = lines.next().ok_or_else(|| eof("`trees`"))?;
    dims.keyword(0, "trees")?;
    let tree_count: usize = dims.num(1, "tree count")?;
    dims.keyword(2, "features")?;
    let p: usize = dims.num(3, "feature count")?;
    dims.arity(4)?;

    let mut names = Vec::with_capacity(p);
    for q in 0..p {
        let l = lines.next().ok_or_else(|| eof("`feature`"))?;
        l.keyword(0, "feature")?;
        let idx: usize = l.num(1, "feature index")?;
        if idx != q {
            return Err(l.err(1, format!("expected feature {q}")));
        }
        let (col, _) = l.words.get(2).ok_or_else(|| l.err(2, "missing feature name"))?;
        names.push(l.text[col - 1..].trim_end().to_owned());
    }

    let mut trees = Vec::with_capacity(tree_count);
    for r in 0..tree_count {
        let l = lines.next().ok_or_else(|| eof("`tree`"))?;
        l.keyword(0, "tree")?;
        if l.num::<usize>(1, "tree index")? != r {
            return Err(l.err(1, format!("expected tree {r}")));
        }
        l.keyword(2, "depth")?;
        let depth: u32 = l.num(3, "depth")?;
        l.keyword(4, "fallback")?;
        let fallback = class(&l, 5)?;
        l.arity(6)?;
        let topo = TreeTopology::new(depth).map_err(|e| l.err(3, e.to_string()))?;
        let mut splits: Vec<Option<Split>> = vec![None; topo.branch_count()];
        let mut leaves = vec![Leaf::default(); topo.leaf_count()];
        let mut seen = vec![false; topo.node_count() + 1];
        loop {
            let l = lines.next().ok_or_else(|| eof("`end`"))?;
            let kind = l.words[0].1;
            if kind == "end" {
                l.arity(1)?;
                break;
            }
            let t: usize = l.num(1, "node")?;
            if t == 0 || t > topo.node_count() {
                return Err(l.err(1, format!("node {t} outside a depth-{depth} tree")));
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(l.err(1, format!("node {t} listed twice")));
            }
            match kind {
                "split" => {
                    if !topo.is_branch(t) {
                        return Err(l.err(1, format!("node {t} is a leaf")));
                    }
                    l.keyword(2, "feature")?;
                    let feature: usize = l.num(3, "feature")?;
                    l.keyword(4, "threshold")?;
                    let threshold: f64 = l.num(5, "threshold")?;
                    l.arity(6)?;
                    splits[t - 1] = Some(Split::new(feature, threshold));
                }
                "leaf" => {
                    if !topo.is_leaf(t) {
                        return Err(l.err(1, format!("node {t} is a branch node")));
                    }
                    let k = topo.leaf_position(t)?;
                    match l.words.get(2).map(|w| w.1) {
                        Some("empty") => l.arity(3)?,
                        Some("class") => {
                            let c = class(&l, 3)?;
                            let support = if l.words.len() > 4 {
                                l.keyword(4, "support")?;
                                l.arity(6)?;
                                Some(l.num(5, "support")?)
                            } else {
                                None
                            };
                            leaves[k] = Leaf { class: Some(c), support };
                        }
                        _ => return Err(l.err(2, "expected `class` or `empty`")),
                    }
                }
                other => return Err(l.err(0, format!("unknown record `{other}`"))),
            }
        }
        let tree = DecisionTree::new(topo, p, splits, leaves, fallback).map_err(|e| l.err(0, format!("tree {r}: {e}")))?;
        trees.push(tree);
    }
    if let Some(extra) = lines.next() {
        return Err(extra.err(0, "content after the last tree"));
    }
    let forest = if tree_count % 2 == 1 { Forest::new(trees)? } else { Forest::with_any_count(trees)? };
    Ok(ForestFile {
        forest,
        feature_names: names,
    })
}

pub fn read_forest_file(path: &std::path::Path) -> Result<ForestFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_forest(&text)
}
