//! Human-readable per-tree vote traces.

use std::fmt::Write as _;

use ocf_core::Forest;

use crate::dot::format_threshold;
use crate::error::{Error, Result};

/// Parses a comma- or whitespace-separated observation.
pub fn parse_observation(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(k, s)| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("observation value {} (`{s}`) is not a finite number", k + 1)))
        })
        .collect()
}

/// Traces `x` through every tree and reports votes and the majority.
pub fn format_trace(forest: &Forest, feature_names: &[String], x: &[f64]) -> Result<String> {
    let trace = forest.trace(x)?;
    let name = |q: usize| feature_names.get(q).cloned().unwrap_or_else(|| format!("x{q}"));
    let mut s = String::new();
    for (r, t) in trace.trees.iter().enumerate() {
        let _ = write!(s, "tree {r}:");
        for step in &t.path {
            match step.split {
                Some(sp) => {
                    let outcome = if step.went_left { "yes" } else { "no" };
                    let _ = write!(
                        s,
                        " node {} [{} = {} < {}: {outcome}] ->",
                        step.node,
                        name(sp.feature),
                        format_threshold(x[sp.feature]),
                        format_threshold(sp.threshold)
                    );
                }
                None if step.node != t.leaf => {
                    let _ = write!(s, " node {} [inactive] ->", step.node);
                }
                None => {}
            }
        }
        let fallback = if t.used_fallback { " (empty leaf, fallback)" } else { "" };
        let _ = writeln!(s, " leaf {} vote {}{fallback}", t.leaf, t.vote);
    }
    let votes: Vec<String> = trace.trees.iter().map(|t| t.vote.to_string()).collect();
    let _ = write!(s, "majority {} (votes {})", trace.majority, votes.join(" "));
    match trace.dissenting.as_slice() {
        [] => s.push_str(", unanimous\n"),
        d => {
            let ids: Vec<String> = d.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(s, ", dissenting tree{} {}", if d.len() > 1 { "s" } else { "" }, ids.join(" "));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ocf_core::{DecisionTree, Leaf, Split, TreeTopology};

    fn stump(threshold: f64) -> DecisionTree {
        DecisionTree::new(
            TreeTopology::new(1).unwrap(),
            2,
            vec![Some(Split::new(0, threshold))],
            vec![Leaf::with_class(0), Leaf::with_class(1)],
            0,
        )
        .unwrap()
    }

    #[test]
    fn reports_dissent() {
        let forest = Forest::new(vec![stump(0.2), stump(0.8), stump(0.4)]).unwrap();
        let names = vec!["income".to_owned(), "age".to_owned()];
        let text = format_trace(&forest, &names, &[0.5, 0.0]).unwrap();
        assert!(text.contains("tree 1: node 1 [income = 0.5 < 0.8: yes] -> leaf 2 vote 0"));
        assert!(text.ends_with("majority 1 (votes 1 0 1), dissenting tree 1\n"), "{text}");
    }

    #[test]
    fn unanimous_and_errors() {
        let forest = Forest::new(vec![stump(0.2); 3]).unwrap();
        let text = format_trace(&forest, &[], &[0.9, 0.0]).unwrap();
        assert!(text.ends_with("majority 1 (votes 1 1 1), unanimous\n"));
        assert!(format_trace(&forest, &[], &[0.9]).is_err());
        assert_eq!(parse_observation("0.1, 2 3e-1").unwrap(), vec![0.1, 2.0, 0.3]);
        assert!(parse_observation("1,nan").is_err());
    }
}
