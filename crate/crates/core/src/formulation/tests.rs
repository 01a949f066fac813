use super::*;
use crate::tree::Forest;
use crate::milp::{VarKind, AUDIT_TOLERANCE};
use crate::oracle::{best_forest, OracleLimits};
use crate::synthetic::grid_dataset;
use alloc::vec;

fn objective_errors(fm: &ForestModel, x: &[f64]) -> f64 {
    fm.model.objective_value(x).unwrap() * fm.registry.n() as f64
}

#[test]
fn column_counts_for_a_three_tree_forest() {
    let d = grid_dataset(75, 13, 11, 1).unwrap();
    let cfg = OcfConfig {
        leaf_consistency: LeafConsistency::Pairwise,
        ..OcfConfig::new(3, 2, 7, 2)
    };
    let fm = build_ocf_model(&d, &cfg).unwrap();
    let vars = fm.model.variables();
    let binaries = vars.iter().filter(|v| v.kind == VarKind::Binary).count();
    assert_eq!(binaries, 75 + 225 + 900 + 9 + 12 + 117 + 225);
    assert_eq!(vars.len() - binaries, 9);
    // Auto picks the compact encoding here: 12 leaf class columns more.
    let auto = build_ocf_model(&d, &OcfConfig::new(3, 2, 7, 2)).unwrap();
    assert_eq!(auto.model.num_binaries(), binaries + 12);
}

#[test]
fn single_voter_forces_alpha_to_theta() {
    let d = Dataset::from_rows(&[vec![0.0], vec![1.0]], &[0, 1]).unwrap();
    let fm = build_oct_model(&d, 1, 1, 1, DEFAULT_EPSILON).unwrap();
    assert!(fm.model.var_by_name("xor_0_0").is_none());
    let forest = crate::baselines::train_cart(&d, &crate::baselines::CartConfig { depth: 1, n_min: 1, split_budget: 1 }).unwrap();
    let forest = Forest::new(vec![forest]).unwrap();
    let mut x = encode_forest(&d, &fm, &forest).unwrap();
    assert!(fm.model.audit_feasibility(&x, AUDIT_TOLERANCE).unwrap().is_feasible());
    let a0 = fm.registry.col(Symbol::Alpha { i: 0 }).0;
    x[a0] = 1.0 - x[a0];
    let report = fm.model.audit_feasibility(&x, AUDIT_TOLERANCE).unwrap();
    assert!(report.violated_rows.iter().any(|v| v.name.starts_with("vote_")));
}

#[test]
fn oracle_optima_are_feasible_with_matching_objective() {
    for seed in 0..12u64 {
        let d = grid_dataset(9, 2, 6, seed).unwrap();
        for &(trees, budget) in &[(1usize, 1usize), (1, 3), (3, 2), (3, 4)] {
            let sol = best_forest(&d, trees, 2, budget, 1, &OracleLimits::default()).unwrap();
            for mode in [LeafConsistency::Pairwise, LeafConsistency::LeafLabel] {
                let cfg = OcfConfig {
                    leaf_consistency: mode,
                    ..OcfConfig::new(trees, 2, budget, 1)
                };
                let fm = build_ocf_model(&d, &cfg).unwrap();
                let forest = order_by_disagreement(&d, sol.forest.clone()).unwrap();
                let x = encode_forest(&d, &fm, &forest).unwrap();
                let report = fm.model.audit_feasibility(&x, AUDIT_TOLERANCE).unwrap();
                assert!(report.is_feasible(), "{report:?}");
                assert!((objective_errors(&fm, &x) - sol.errors as f64).abs() < 1e-9);

                let back = extract_forest(&x, &fm, &d).unwrap();
                assert!(routing_mismatches(&x, &fm, &d, &back).unwrap().is_empty());
                for row in d.rows() {
                    assert_eq!(back.predict(row).unwrap(), forest.predict(row).unwrap());
                }
            }
        }
    }
}

#[test]
fn warm_starts_are_feasible_and_no_better_than_the_optimum() {
    for seed in 0..100u64 {
        let d = grid_dataset(8 + (seed as usize % 5), 3, 7, 100 + seed).unwrap();
        let trees = if seed % 2 == 0 { 3 } else { 1 };
        let budget = 1 + seed as usize % 3;
        let n_min = 1 + seed as usize % 2;
        let cfg = OcfConfig::new(trees, 2, budget, n_min);
        let fm = build_ocf_model(&d, &cfg).unwrap();
        let subsets = stump_feature_subsets(d.p(), trees, seed);
        let x = warm_start_assignment(&d, &fm, &subsets).unwrap();
        let report = fm.model.audit_feasibility(&x, AUDIT_TOLERANCE).unwrap();
        assert!(report.is_feasible(), "seed {seed}: {report:?}");
        let opt = best_forest(&d, trees, 2, budget, n_min, &OracleLimits::default()).unwrap();
        assert!(objective_errors(&fm, &x) >= opt.errors as f64 - 1e-9);
    }
}

#[test]
fn identical_stumps_vote_unanimously() {
    let d = grid_dataset(10, 2, 5, 3).unwrap();
    let cfg = OcfConfig::new(3, 2, 3, 1);
    let fm = build_ocf_model(&d, &cfg).unwrap();
    let subsets = vec![vec![1]; 3];
    let forest = warm_start_forest(&d, &cfg, &subsets).unwrap();
    let x = encode_forest(&d, &fm, &forest).unwrap();
    for (i, row) in d.rows().enumerate() {
        let alpha = x[fm.registry.col(Symbol::Alpha { i }).0];
        assert_eq!(alpha, f64::from(forest.trees()[0].predict(row).unwrap()));
    }
}

#[test]
fn extraction_rejects_fractional_and_mixed_leaves() {
    let d = grid_dataset(6, 2, 5, 4).unwrap();
    let fm = build_ocf_model(&d, &OcfConfig::new(1, 1, 1, 1)).unwrap();
    let forest = warm_start_forest(&d, &fm.config, &[vec![0, 1]]).unwrap();
    let x = encode_forest(&d, &fm, &forest).unwrap();

    let mut frac = x.clone();
    frac[fm.registry.col(Symbol::Theta { i: 0, r: 0 }).0] = 0.5;
    assert!(matches!(extract_forest(&frac, &fm, &d), Err(Error::Extraction(_))));

    let mut mixed = x.clone();
    let th = fm.registry.col(Symbol::Theta { i: 0, r: 0 }).0;
    mixed[th] = 1.0 - mixed[th];
    assert!(matches!(extract_forest(&mixed, &fm, &d), Err(Error::Consistency(_)) | Err(Error::InvalidTree(_))));
}

#[test]
fn configuration_errors() {
    let d = grid_dataset(4, 1, 3, 0).unwrap();
    assert!(build_ocf_model(&d, &OcfConfig::new(2, 1, 1, 1)).is_err());
    assert!(build_ocf_model(&d, &OcfConfig::new(3, 1, 1, 5)).is_err());
    assert!(build_ocf_model(&d, &OcfConfig::new(3, 1, 0, 1)).is_err());
}
