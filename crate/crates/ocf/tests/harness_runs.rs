mod common;

use ocf::data::{load_table, DatasetManifest};
use ocf::harness::{audit_hygiene, mean_std, results_csv, run_on_table, summarize, ExperimentSpec};
use ocf::solver::SolverConfig;
use ocf::train::Method;
use ocf_core::folds::make_folds_with;

use common::{data_dir, exact_solver, scratch};

fn table(name: &str) -> (DatasetManifest, ocf::data::RawTable) {
    let m = DatasetManifest::from_file(&data_dir().join(name)).unwrap();
    let t = load_table(&m).unwrap();
    (m, t)
}

#[test]
fn one_rotation_gives_one_record() {
    let (m, t) = table("toy16.manifest");
    let spec = ExperimentSpec {
        repeats: 1,
        rotations: Some(1),
        ..ExperimentSpec::new(m.path.clone(), vec![Method::Cart])
    };
    let r = run_on_table(&spec, &m.name, &t).unwrap();
    assert_eq!(r.records.len(), 1);
    let rec = &r.records[0];
    assert!(rec.budget.is_some_and(|c| (1..=7).contains(&c)));
    assert!(rec.test_accuracy.is_some_and(|a| (0.0..=100.0).contains(&a)));
}

#[test]
fn cart_on_heart_is_clean_and_reproducible() {
    let (m, t) = table("heart_statlog.manifest");
    let spec = ExperimentSpec::new(m.path.clone(), vec![Method::Cart, Method::Rf3]);
    let r = run_on_table(&spec, &m.name, &t).unwrap();
    assert_eq!(r.records.len(), 40);
    let plan = make_folds_with(270, spec.seed, 5, 4).unwrap();
    for rec in &r.records {
        audit_hygiene(&plan.triple(rec.repeat, rec.rotation).unwrap(), rec).unwrap();
        if rec.method == Method::Cart {
            assert!(spec.budgets.contains(&rec.budget.unwrap()));
        }
    }
    let cart: Vec<f64> = r.records.iter().filter(|x| x.method == Method::Cart).filter_map(|x| x.test_accuracy).collect();
    assert_eq!(cart.len(), 20);
    let s = &summarize(&r)[0];
    let (mean, std) = mean_std(&cart).unwrap();
    assert_eq!((s.mean, s.std), (Some(mean), Some(std)));
    assert!((69.0..=80.0).contains(&mean), "{mean}");

    let again = run_on_table(&spec, &m.name, &t).unwrap();
    assert_eq!(results_csv(&again).unwrap(), results_csv(&r).unwrap());
}

#[test]
fn forest_cells_train_on_subsets_of_the_training_fold() {
    let ws = scratch();
    let Some(solver) = exact_solver(ws.path()) else { return };
    let (m, t) = table("heart_statlog.manifest");
    let spec = ExperimentSpec {
        repeats: 1,
        rotations: Some(1),
        budgets: vec![1, 2],
        subset_size: 12,
        downsampling: ocf::harness::Downsampling::Random { candidates: 2 },
        solver: SolverConfig { time_limit_s: 20.0, ..solver },
        ..ExperimentSpec::new(m.path.clone(), vec![Method::Ocf3])
    };
    let r = run_on_table(&spec, &m.name, &t).unwrap();
    let rec = &r.records[0];
    assert_eq!(rec.solves, 4);
    assert!(rec.fitted_rows.len() <= 24);
    assert!(rec.subset_candidate.is_some_and(|k| k < 2));
    let plan = make_folds_with(270, spec.seed, 1, 4).unwrap();
    audit_hygiene(&plan.triple(0, 0).unwrap(), rec).unwrap();
}
