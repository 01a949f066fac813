//! Repeated k-fold train / validation / test partitions.

use alloc::format;
use alloc::vec::Vec;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

pub const DEFAULT_REPEATS: usize = 5;
pub const DEFAULT_FOLDS: usize = 4;

/// Fold assignments for every repeat; fully determined by `seed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub seed: u64,
    pub n: usize,
    pub repeat_count: usize,
    pub fold_count: usize,
    /// `assignments[repeat][fold]` lists observation indices, ascending.
    pub assignments: Vec<Vec<Vec<usize>>>,
}

/// One (training, validation, test) split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub repeat: usize,
    pub rotation: usize,
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// 5 repeats of a 4-fold partition.
pub fn make_folds(n: usize, seed: u64) -> Result<FoldPlan> {
    make_folds_with(n, seed, DEFAULT_REPEATS, DEFAULT_FOLDS)
}

pub fn make_folds_with(n: usize, seed: u64, repeats: usize, folds: usize) -> Result<FoldPlan> {
    if folds < 3 {
        return Err(Error::Config(format!("need at least 3 folds for train/validation/test, got {folds}")));
    }
    if repeats == 0 {
        return Err(Error::Config("repeat count must be positive".into()));
    }
    if n < 2 * folds {
        return Err(Error::Config(format!(
            "{n} observations are too few for {folds} folds (need at least {})",
            2 * folds
        )));
    }
    let mut assignments = Vec::with_capacity(repeats);
    for repeat in 0..repeats {
        let mut rng = stream_rng(seed, repeat as u64);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let base = n / folds;
        let extra = n % folds;
        let mut start = 0;
        let mut parts = Vec::with_capacity(folds);
        for f in 0..folds {
            let size = base + usize::from(f < extra);
            let mut fold = perm[start..start + size].to_vec();
            fold.sort_unstable();
            parts.push(fold);
            start += size;
        }
        assignments.push(parts);
    }
    Ok(FoldPlan {
        seed,
        n,
        repeat_count: repeats,
        fold_count: folds,
        assignments,
    })
}

impl FoldPlan {
    /// Rotation `k` tests on fold `k`, validates on fold `k + 1` and trains on
    /// the remaining folds (indices modulo the fold count).
    pub fn triple(&self, repeat: usize, rotation: usize) -> Result<Triple> {
        if repeat >= self.repeat_count || rotation >= self.fold_count {
            return Err(Error::Config(format!(
                "no triple ({repeat}, {rotation}) in a {}×{} plan",
                self.repeat_count, self.fold_count
            )));
        }
        let folds = &self.assignments[repeat];
        let k = self.fold_count;
        let test = folds[rotation].clone();
        let validation = folds[(rotation + 1) % k].clone();
        let mut train: Vec<usize> = (2..k).flat_map(|off| folds[(rotation + off) % k].iter().copied()).collect();
        train.sort_unstable();
        Ok(Triple {
            repeat,
            rotation,
            train,
            validation,
            test,
        })
    }

    /// All `repeat_count × fold_count` triples in (repeat, rotation) order.
    pub fn triples(&self) -> Vec<Triple> {
        (0..self.repeat_count)
            .flat_map(|r| (0..self.fold_count).map(move |k| (r, k)))
            .map(|(r, k)| self.triple(r, k).expect("in range"))
            .collect()
    }
}
