//! Small random datasets for tests, demos and solver checks.

use alloc::vec::Vec;

use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::Class;

/// `n` points with `p` features drawn uniformly from the grid
/// `{0, 1/(levels-1), ..., 1}` and fair-coin labels. Distinct values of a
/// feature are therefore at least `1/(levels-1)` apart.
pub fn grid_dataset(n: usize, p: usize, levels: usize, seed: u64) -> Result<Dataset> {
    if levels < 2 {
        return Err(Error::Config("a grid needs at least two levels".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let step = 1.0 / (levels - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.gen_range(0..levels) as f64 * step).collect())
        .collect();
    let labels: Vec<Class> = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
    Dataset::from_rows(&rows, &labels)
}

/// Same points as [`grid_dataset`] with labels from `label`.
pub fn grid_dataset_labeled(
    n: usize,
    p: usize,
    levels: usize,
    seed: u64,
    mut label: impl FnMut(&[f64]) -> Class,
) -> Result<Dataset> {
    let base = grid_dataset(n, p, levels, seed)?;
    let rows: Vec<Vec<f64>> = base.rows().map(<[f64]>::to_vec).collect();
    let labels: Vec<Class> = rows.iter().map(|x| label(x)).collect();
    Dataset::from_rows(&rows, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_bounds_the_gap() {
        let d = grid_dataset(12, 3, 5, 9).unwrap();
        assert!(d.min_feature_gap().is_none_or(|g| g >= 0.25 - 1e-12));
        assert_eq!(d, grid_dataset(12, 3, 5, 9).unwrap());
    }
}
