mod common;

use ocf::data::{load_dataset, load_table, DatasetManifest};
use ocf::forest_format::{parse_forest, write_forest};
use ocf_core::folds::make_folds;
use ocf_core::{DecisionTree, Forest, Leaf, Split, TreeTopology};
use proptest::prelude::*;

use common::data_dir;

#[test]
fn heart_has_the_published_shape() {
    let m = DatasetManifest::from_file(&data_dir().join("heart_statlog.manifest")).unwrap();
    let d = load_dataset(&m).unwrap();
    assert_eq!((d.n(), d.p()), (270, 13));
    assert_eq!(d.positives(), 120);
    assert!(d.features().iter().all(|v| (0.0..=1.0).contains(v)));
    let mut sizes: Vec<usize> = make_folds(270, 1).unwrap().assignments[0].iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    assert_eq!(sizes, vec![68, 68, 67, 67]);
    assert_eq!(load_table(&m).unwrap().feature_names[0], "age");
}

#[test]
fn toy_manifest_maps_string_labels() {
    let m = DatasetManifest::from_file(&data_dir().join("toy16.manifest")).unwrap();
    let d = load_dataset(&m).unwrap();
    assert_eq!((d.n(), d.p()), (16, 2));
    assert_eq!(d.positives(), 8);
}

#[test]
fn tiny_thresholds_keep_full_precision() {
    let tree = DecisionTree::new(
        TreeTopology::new(1).unwrap(),
        1,
        vec![Some(Split::new(0, 0.00001))],
        vec![Leaf::with_class(1), Leaf::with_class(0)],
        1,
    )
    .unwrap();
    let forest = Forest::new(vec![tree, DecisionTree::empty(TreeTopology::new(2).unwrap(), 1, 1), DecisionTree::empty(TreeTopology::new(0).unwrap(), 1, 0)]).unwrap();
    let text = write_forest(&forest, &["x".to_owned()]).unwrap();
    assert!(text.contains("threshold 0.00001"), "{text}");
    let back = parse_forest(&text).unwrap();
    assert_eq!(back.forest, forest);
    assert_eq!(back.forest.trees()[1].fallback_class(), 1);
}

fn arb_tree(p: usize) -> impl Strategy<Value = DecisionTree> {
    (0u32..4, any::<u64>(), 0u8..2).prop_map(move |(depth, bits, fallback)| {
        let topo = TreeTopology::new(depth).unwrap();
        let mut state = bits;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        let mut splits: Vec<Option<Split>> = Vec::new();
        for t in topo.branch_nodes() {
            let parent_active = topo.parent(t).is_none_or(|u| splits[u - 1].is_some());
            splits.push((parent_active && next() % 3 != 0).then(|| Split::new(next() as usize % p, next() as f64 / 2147483648.0 / 3.0)));
        }
        let leaves = topo
            .leaf_nodes()
            .map(|_| match next() % 4 {
                0 => Leaf::default(),
                1 => Leaf { class: Some(1), support: Some(next() as usize % 50) },
                _ => Leaf::with_class((next() % 2) as u8),
            })
            .collect();
        DecisionTree::new(topo, p, splits, leaves, fallback).unwrap()
    })
}

proptest! {
    #[test]
    fn forest_files_round_trip(trees in proptest::collection::vec(arb_tree(3), 1..6)) {
        let forest = Forest::with_any_count(trees).unwrap();
        let names = vec!["a".to_owned(), "b c".to_owned(), "d-e".to_owned()];
        let text = write_forest(&forest, &names).unwrap();
        let back = parse_forest(&text).unwrap();
        prop_assert_eq!(&back.forest, &forest);
        prop_assert_eq!(back.feature_names, names);
    }
}
