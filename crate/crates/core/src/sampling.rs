//! Training-set downsampling: uniform subsamples and best-of-K subset
//! selection scored by a small kernel SVM.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::Class;

const TAU: f64 = 1e-12;

/// Kernel shape. `Radial` is exp(-gamma * |x - x'|^2), `Laplacian` is
/// exp(-gamma * |x - x'|).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernel {
    #[default]
    Radial,
    Laplacian,
}

impl Kernel {
    pub fn eval(&self, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
        let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        match self {
            Kernel::Radial => libm::exp(-gamma * sq),
            Kernel::Laplacian => libm::exp(-gamma * libm::sqrt(sq)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams {
    pub kernel: Kernel,
    /// `None` means 1/p.
    pub gamma: Option<f64>,
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: Option<usize>,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            kernel: Kernel::Radial,
            gamma: None,
            c: 1.0,
            tolerance: 1e-3,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub gamma: f64,
    pub c: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// Dual weight times the ±1 label, one per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    /// Set when training saw one class only; every prediction is that class.
    pub constant: Option<Class>,
    pub converged: bool,
    pub iterations: usize,
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        if let Some(c) = self.constant {
            return if c == 1 { 1.0 } else { -1.0 };
        }
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, w)| w * self.kernel.eval(self.gamma, sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Class 1 when the decision value is positive.
    pub fn predict(&self, x: &[f64]) -> Class {
        u8::from(self.decision_value(x) > 0.0)
    }
}

/// Soft-margin kernel SVM trained by sequential minimal optimization with
/// maximal-violating-pair working-set selection.
pub fn train_svm(points: &[&[f64]], labels: &[Class], params: &SvmParams) -> Result<SvmModel> {
    let n = points.len();
    if labels.len() != n {
        return Err(Error::Shape { expected: n, actual: labels.len() });
    }
    if n == 0 {
        return Err(Error::InvalidDataset("cannot train an SVM on zero points".into()));
    }
    if !(params.c > 0.0) || !(params.tolerance > 0.0) {
        return Err(Error::Config(format!("SVM needs C > 0 and tolerance > 0, got {} and {}", params.c, params.tolerance)));
    }
    let p = points[0].len();
    let gamma = params.gamma.unwrap_or(if p == 0 { 1.0 } else { 1.0 / p as f64 });
    let base = SvmModel {
        kernel: params.kernel,
        gamma,
        c: params.c,
        support_vectors: Vec::new(),
        coefficients: Vec::new(),
        bias: 0.0,
        constant: None,
        converged: true,
        iterations: 0,
    };
    if labels.iter().all(|&y| y == labels[0]) {
        return Ok(SvmModel { constant: Some(labels[0]), ..base });
    }

    let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let k: Vec<f64> = (0..n * n)
        .map(|idx| params.kernel.eval(gamma, points[idx / n], points[idx % n]))
        .collect();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let c = params.c;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = params.max_iterations.unwrap_or((100 * n).max(100_000));
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut up = usize::MAX;
        let mut low = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = (y[t] > 0.0 && alpha[t] < c) || (y[t] < 0.0 && alpha[t] > 0.0);
            let in_low = (y[t] > 0.0 && alpha[t] > 0.0) || (y[t] < 0.0 && alpha[t] < c);
            if in_up && v > gmax {
                gmax = v;
                up = t;
            }
            if in_low && v < gmin {
                gmin = v;
                low = t;
            }
        }
        if up == usize::MAX || low == usize::MAX || gmax - gmin < params.tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let (i, j) = (up, low);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
    }

    // Offset from free vectors, or the midpoint of the feasible interval.
    let (mut ub, mut lb, mut sum, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 { sum / free as f64 } else { 0.5 * (ub + lb) };

    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(points[t].to_vec());
            coefficients.push(alpha[t] * y[t]);
        }
    }
    Ok(SvmModel {
        support_vectors,
        coefficients,
        bias: -rho,
        converged,
        iterations,
        ..base
    })
}

/// How a candidate subset is scored on the validation fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scorer {
    Svm(SvmParams),
    /// Predicts the subset's majority class everywhere.
    MajorityBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetSearchConfig {
    pub subset_size: usize,
    pub iterations: usize,
    pub seed: u64,
    pub scorer: Scorer,
}

impl SubsetSearchConfig {
    pub fn new(iterations: usize, seed: u64) -> Self {
        Self {
            subset_size: 75,
            iterations,
            seed,
            scorer: Scorer::Svm(SvmParams::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelection {
    /// Sorted row indices into the training fold.
    pub indices: Vec<usize>,
    pub validation_accuracy: f64,
    /// Zero-based iteration that produced the winner.
    pub iteration: usize,
}

/// Uniform sample of `size` distinct rows out of `n`, drawn from stream
/// `stream` of `seed`, sorted ascending.
pub fn random_subsample(n: usize, size: usize, seed: u64, stream: u64) -> Result<Vec<usize>> {
    if size > n {
        return Err(Error::Config(format!("cannot draw {size} rows from {n}")));
    }
    let mut rng = stream_rng(seed, stream);
    let mut idx = index::sample(&mut rng, n, size).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Validation accuracy of `scorer` trained on `subset` rows of `train`.
pub fn score_subset(train: &Dataset, subset: &[usize], validation: &Dataset, scorer: &Scorer) -> Result<f64> {
    if validation.n() == 0 {
        return Err(Error::Config("validation fold is empty".into()));
    }
    let labels: Vec<Class> = subset.iter().map(|&i| train.label(i)).collect();
    let correct = match scorer {
        Scorer::MajorityBaseline => {
            let ones = labels.iter().filter(|&&y| y == 1).count();
            let class = u8::from(2 * ones > labels.len());
            validation.labels().iter().filter(|&&y| y == class).count()
        }
        Scorer::Svm(params) => {
            let points: Vec<&[f64]> = subset.iter().map(|&i| train.row(i)).collect();
            let model = train_svm(&points, &labels, params)?;
            (0..validation.n())
                .filter(|&i| model.predict(validation.row(i)) == validation.label(i))
                .count()
        }
    };
    Ok(correct as f64 / validation.n() as f64)
}

/// Best of `iterations` uniform subsamples by validation accuracy; ties go
/// to the earliest iteration. Iteration `k` draws from stream `k`, so a
/// larger `iterations` with the same seed extends the same sequence.
pub fn select_training_subset(train: &Dataset, validation: &Dataset, config: &SubsetSearchConfig) -> Result<SubsetSelection> {
    if config.iterations == 0 {
        return Err(Error::Config("subset search needs at least one iteration".into()));
    }
    if validation.n() == 0 {
        return Err(Error::Config("validation fold is empty".into()));
    }
    if config.subset_size == 0 || config.subset_size > train.n() {
        return Err(Error::Config(format!(
            "subset size {} must be in 1..={}",
            config.subset_size,
            train.n()
        )));
    }
    let mut best: Option<SubsetSelection> = None;
    for k in 0..config.iterations {
        let indices = random_subsample(train.n(), config.subset_size, config.seed, k as u64)?;
        let acc = score_subset(train, &indices, validation, &config.scorer)?;
        if best.as_ref().is_none_or(|b| acc > b.validation_accuracy) {
            best = Some(SubsetSelection {
                indices,
                validation_accuracy: acc,
                iteration: k,
            });
        }
    }
    Ok(best.expect("at least one iteration ran"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(points: &[[f64; 2]], labels: &[Class], params: &SvmParams) -> SvmModel {
        let refs: Vec<&[f64]> = points.iter().map(|p| &p[..]).collect();
        train_svm(&refs, labels, params).unwrap()
    }

    #[test]
    fn separable_pair() {
        let pts = [[0.1, 0.1], [0.9, 0.9]];
        let m = fit(&pts, &[0, 1], &SvmParams::default());
        assert!(m.converged);
        assert_eq!(m.predict(&pts[0]), 0);
        assert_eq!(m.predict(&pts[1]), 1);
    }

    #[test]
    fn radial_kernel_fits_xor() {
        let pts = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        let labels = [0, 0, 1, 1];
        let params = SvmParams { gamma: Some(1.0), c: 10.0, ..SvmParams::default() };
        let m = fit(&pts, &labels, &params);
        for (x, &y) in pts.iter().zip(&labels) {
            assert_eq!(m.predict(x), y);
        }
        for w in &m.coefficients {
            assert!(w.abs() <= params.c + 1e-12);
        }
    }

    #[test]
    fn single_class_is_constant() {
        let m = fit(&[[0.2, 0.3], [0.4, 0.5]], &[1, 1], &SvmParams::default());
        assert_eq!(m.constant, Some(1));
        assert_eq!(m.predict(&[0.9, 0.9]), 1);
    }

    #[test]
    fn majority_scorer_ties_keep_first_draw() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| alloc::vec![i as f64 / 19.0]).collect();
        let labels: Vec<Class> = (0..20).map(|i| (i % 2) as Class).collect();
        let train = Dataset::from_rows(&rows, &labels).unwrap();
        let val = Dataset::from_rows(&rows[..4], &labels[..4]).unwrap();
        let cfg = SubsetSearchConfig {
            subset_size: 5,
            iterations: 10,
            seed: 1,
            scorer: Scorer::MajorityBaseline,
        };
        let s = select_training_subset(&train, &val, &cfg).unwrap();
        assert_eq!(s.validation_accuracy, 0.5);
        assert_eq!(s.iteration, 0);
        assert_eq!(s.indices, random_subsample(20, 5, 1, 0).unwrap());
    }
}
