//! Normalized binary-labeled datasets and min-max scaling.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Class;

/// Where a dataset came from and what was done to it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub source: String,
    pub raw_rows: usize,
    pub raw_columns: usize,
    pub dropped_rows: usize,
    /// Scaling fitted on the raw encoded matrix, if any.
    pub scaler: Option<MinMaxScaler>,
    pub notes: Vec<String>,
}

/// `n × p` matrix of unit-interval features with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    features: Vec<f64>,
    labels: Vec<Class>,
    feature_names: Vec<String>,
    provenance: Provenance,
}

impl Dataset {
    /// `features` is row-major with `labels.len()` rows of `feature_names.len()` values.
    pub fn new(
        features: Vec<f64>,
        labels: Vec<Class>,
        feature_names: Vec<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = labels.len();
        let p = feature_names.len();
        if n == 0 || p == 0 {
            return Err(Error::InvalidDataset(format!(
                "need at least one row and one feature, got n = {n}, p = {p}"
            )));
        }
        if features.len() != n * p {
            return Err(Error::InvalidDataset(format!(
                "feature matrix has {} values, expected {n} × {p}",
                features.len()
            )));
        }
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::InvalidDataset(format!("label {} at row {i} is not binary", labels[i])));
        }
        if let Some(k) = features.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidDataset(format!(
                "value {} at row {}, feature {} is outside [0, 1]",
                features[k],
                k / p,
                k % p
            )));
        }
        Ok(Self {
            n,
            p,
            features,
            labels,
            feature_names,
            provenance,
        })
    }

    /// Convenience constructor with generated feature names `x0, x1, …`.
    pub fn from_rows(rows: &[Vec<f64>], labels: &[Class]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidDataset(format!("row {i} has {} values, expected {p}", rows[i].len())));
        }
        let names = (0..p).map(|q| format!("x{q}")).collect();
        Self::new(rows.concat(), labels.to_vec(), names, Provenance::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    #[inline]
    pub fn value(&self, i: usize, q: usize) -> f64 {
        self.features[i * self.p + q]
    }

    #[inline]
    pub fn label(&self, i: usize) -> Class {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.p)
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn provenance_mut(&mut self) -> &mut Provenance {
        &mut self.provenance
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    /// Most frequent label; ties go to class 0.
    pub fn majority_class(&self) -> Class {
        u8::from(2 * self.positives() > self.n)
    }

    /// Rows selected by `indices`, in that order (repeats allowed).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidDataset("empty subset".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::InvalidDataset(format!("row index {bad} out of range (n = {})", self.n)));
        }
        let mut features = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        Ok(Self {
            n: indices.len(),
            p: self.p,
            features,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Same rows with every feature column passed through `scaler`.
    pub fn rescaled(&self, scaler: &MinMaxScaler) -> Result<Self> {
        let features = normalize_with(scaler, &self.features)?;
        let mut out = self.clone();
        out.features = features;
        Ok(out)
    }

    /// Smallest strictly positive gap between two distinct values of any feature.
    pub fn min_feature_gap(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        let mut column = Vec::with_capacity(self.n);
        for q in 0..self.p {
            column.clear();
            column.extend((0..self.n).map(|i| self.value(i, q)));
            column.sort_by(f64::total_cmp);
            for w in column.windows(2) {
                let gap = w[1] - w[0];
                if gap > 0.0 && best.is_none_or(|b| gap < b) {
                    best = Some(gap);
                }
            }
        }
        best
    }
}

/// Per-column affine map onto `[0, 1]`. Constant columns map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl MinMaxScaler {
    /// Fits on a row-major matrix with `p` columns.
    pub fn fit(values: &[f64], p: usize) -> Result<Self> {
        if p == 0 || values.is_empty() || values.len() % p != 0 {
            return Err(Error::InvalidDataset(format!(
                "cannot fit a scaler on {} values with {p} columns",
                values.len()
            )));
        }
        let mut mins = alloc::vec![f64::INFINITY; p];
        let mut maxs = alloc::vec![f64::NEG_INFINITY; p];
        for row in values.chunks_exact(p) {
            for (q, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidDataset(format!("non-finite value in column {q}")));
                }
                mins[q] = mins[q].min(v);
                maxs[q] = maxs[q].max(v);
            }
        }
        Ok(Self { mins, maxs })
    }

    pub fn fit_dataset(dataset: &Dataset) -> Self {
        Self::fit(dataset.features(), dataset.p()).expect("datasets are non-empty and finite")
    }

    pub fn p(&self) -> usize {
        self.mins.len()
    }

    #[inline]
    pub fn scale(&self, q: usize, v: f64) -> f64 {
        let span = self.maxs[q] - self.mins[q];
        if span <= 0.0 {
            return 0.0;
        }
        ((v - self.mins[q]) / span).clamp(0.0, 1.0)
    }

    pub fn describe(&self) -> String {
        let mut s = String::new();
        for q in 0..self.p() {
            if q > 0 {
                s.push_str("; ");
            }
            s.push_str(&format!("{q}:[{}, {}]", self.mins[q], self.maxs[q]));
        }
        s.to_string()
    }
}

/// Applies previously fitted scaling to a row-major matrix, clipping to `[0, 1]`.
pub fn normalize_with(scaler: &MinMaxScaler, raw: &[f64]) -> Result<Vec<f64>> {
    let p = scaler.p();
    if p == 0 || raw.len() % p != 0 {
        return Err(Error::Shape {
            expected: p,
            actual: raw.len() % p.max(1),
        });
    }
    Ok(raw
        .chunks_exact(p)
        .flat_map(|row| row.iter().enumerate().map(|(q, &v)| scaler.scale(q, v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn min_max_endpoints() {
        let s = MinMaxScaler::fit(&[2.0, 4.0], 1).unwrap();
        assert_eq!(normalize_with(&s, &[2.0, 4.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn clipping_and_training_min() {
        let s = MinMaxScaler::fit(&[1.0, 10.0, 3.0, 20.0], 2).unwrap();
        assert_eq!(normalize_with(&s, &[1.0, 10.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(normalize_with(&s, &[7.0, 5.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let s = MinMaxScaler::fit(&[5.0, 5.0, 5.0], 1).unwrap();
        assert_eq!(normalize_with(&s, &[5.0, 6.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let s = MinMaxScaler::fit(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert!(matches!(normalize_with(&s, &[1.0, 2.0, 3.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::from_rows(&[vec![0.5]], &[2]).is_err());
        assert!(Dataset::from_rows(&[vec![1.5]], &[1]).is_err());
        assert!(Dataset::from_rows(&[], &[]).is_err());
        let d = Dataset::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6]], &[1, 0, 1]).unwrap();
        assert_eq!((d.n(), d.p()), (3, 2));
        assert_eq!(d.majority_class(), 1);
        let s = d.subset(&[2, 0]).unwrap();
        assert_eq!(s.row(0), &[0.5, 0.6]);
        assert_eq!(s.labels(), &[1, 1]);
        assert!((d.min_feature_gap().unwrap() - 0.2).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn normalizing_the_fitted_matrix_is_idempotent(
            rows in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 3), 1..20)
        ) {
            let raw = rows.concat();
            let s = MinMaxScaler::fit(&raw, 3).unwrap();
            let once = normalize_with(&s, &raw).unwrap();
            prop_assert!(once.iter().all(|v| (0.0..=1.0).contains(v)));
            let again = MinMaxScaler::fit(&once, 3).unwrap();
            prop_assert_eq!(normalize_with(&again, &once).unwrap(), once);
        }
    }
}
