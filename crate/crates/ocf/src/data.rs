//! CSV ingestion driven by a manifest, and fold-plan serialization.
//!
//! Manifest keys:
//!
//! ```text
//! name = heart_statlog
//! path = heart_statlog.csv          # relative to the manifest's directory
//! label_column = presence
//! positive_label = 2
//! default = numeric                 # or drop: policy for unlisted columns
//! na_values = ?,NA                  # empty cells always count as missing
//! column.chest_pain = categorical(1,2,3,4)
//! column.slope = ordinal(1,2,3)
//! column.id = drop
//! ```
//!
//! Rows holding a missing value in any used column are dropped. Categorical
//! columns become one indicator feature per category, named `column=value`.
//! Ordinal columns map the k-th listed value to k. Every encoded feature is
//! then min-max scaled.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ocf_core::dataset::{normalize_with, MinMaxScaler, Provenance};
use ocf_core::folds::FoldPlan;
use ocf_core::{Class, Dataset};

use crate::error::{Error, Result};
use crate::kv;

const WHAT: &str = "manifest";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Numeric,
    Categorical(Vec<String>),
    Ordinal(Vec<String>),
    Drop,
}

impl ColumnSpec {
    fn parse(text: &str) -> std::result::Result<Self, String> {
        let text = text.trim();
        let list = |inner: &str| -> Vec<String> { inner.split(',').map(|s| s.trim().to_owned()).collect() };
        if text == "numeric" {
            return Ok(ColumnSpec::Numeric);
        }
        if text == "drop" {
            return Ok(ColumnSpec::Drop);
        }
        for (prefix, ordinal) in [("categorical(", false), ("ordinal(", true)] {
            if let Some(rest) = text.strip_prefix(prefix) {
                let inner = rest.strip_suffix(')').ok_or("missing closing parenthesis")?;
                let values = list(inner);
                if values.iter().any(String::is_empty) {
                    return Err("empty category".into());
                }
                let distinct: BTreeSet<&String> = values.iter().collect();
                if distinct.len() != values.len() {
                    return Err("duplicate category".into());
                }
                if ordinal {
                    return Ok(ColumnSpec::Ordinal(values));
                }
                if values.len() < 2 {
                    return Err("a categorical column needs at least two categories".into());
                }
                return Ok(ColumnSpec::Categorical(values));
            }
        }
        Err(format!("unknown column kind `{text}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    pub path: PathBuf,
    pub label_column: String,
    pub positive_label: String,
    pub columns: BTreeMap<String, ColumnSpec>,
    /// Policy for columns the manifest does not list.
    pub default: ColumnSpec,
    pub na_values: Vec<String>,
}

impl DatasetManifest {
    /// Parses manifest text; a relative `path` is resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let entries = kv::parse(WHAT, text)?;
        kv::unique(WHAT, &entries)?;
        let mut name = None;
        let mut path = None;
        let mut label_column = None;
        let mut positive_label = None;
        let mut columns = BTreeMap::new();
        let mut default = ColumnSpec::Numeric;
        let mut na_values = vec!["?".to_owned(), "NA".to_owned()];
        for e in &entries {
            match e.key.as_str() {
                "name" => name = Some(e.value.clone()),
                "path" => path = Some(base_dir.join(&e.value)),
                "label_column" => label_column = Some(e.value.clone()),
                "positive_label" => positive_label = Some(e.value.clone()),
                "default" => {
                    default = match e.value.as_str() {
                        "numeric" => ColumnSpec::Numeric,
                        "drop" => ColumnSpec::Drop,
                        other => {
                            return Err(Error::parse(WHAT, e.line, 1, format!("default must be numeric or drop, got `{other}`")))
                        }
                    }
                }
                "na_values" => na_values = e.value.split(',').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect(),
                key => {
                    let Some(col) = key.strip_prefix("column.") else {
                        return Err(Error::parse(WHAT, e.line, 1, format!("unknown key `{key}`")));
                    };
                    let spec = ColumnSpec::parse(&e.value).map_err(|m| Error::parse(WHAT, e.line, e.key.len() + 1, m))?;
                    columns.insert(col.to_owned(), spec);
                }
            }
        }
        let need = |v: Option<String>, key: &str| v.ok_or_else(|| Error::parse(WHAT, 0, 0, format!("missing `{key}`")));
        let label_column = need(label_column, "label_column")?;
        if columns.contains_key(&label_column) {
            return Err(Error::Config(format!("label column `{label_column}` also has a feature spec")));
        }
        let path = path.ok_or_else(|| Error::parse(WHAT, 0, 0, "missing `path`"))?;
        Ok(Self {
            name: name.unwrap_or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()),
            path,
            label_column,
            positive_label: need(positive_label, "positive_label")?,
            columns,
            default,
            na_values,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// Encoded but unscaled table. Scaling is left to the caller so that it can
/// be fitted on a training fold only.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub n: usize,
    pub p: usize,
    /// Row-major `n × p`.
    pub values: Vec<f64>,
    pub labels: Vec<Class>,
    pub feature_names: Vec<String>,
    pub provenance: Provenance,
}

impl RawTable {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    /// Scales `rows` with a scaler fitted on `fit_rows` (both index lists
    /// into this table).
    pub fn scaled_subset(&self, fit_rows: &[usize], rows: &[usize]) -> Result<Dataset> {
        let fit: Vec<f64> = fit_rows.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        let scaler = MinMaxScaler::fit(&fit, self.p)?;
        self.scale_rows(&scaler, rows)
    }

    pub fn scale_rows(&self, scaler: &MinMaxScaler, rows: &[usize]) -> Result<Dataset> {
        let raw: Vec<f64> = rows.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        let features = normalize_with(scaler, &raw)?;
        let labels = rows.iter().map(|&i| self.labels[i]).collect();
        let provenance = Provenance {
            scaler: Some(scaler.clone()),
            ..self.provenance.clone()
        };
        Ok(Dataset::new(features, labels, self.feature_names.clone(), provenance)?)
    }

    /// Whole table scaled by its own min-max.
    pub fn normalized(&self) -> Result<Dataset> {
        let all: Vec<usize> = (0..self.n).collect();
        self.scaled_subset(&all, &all)
    }
}

/// Reads and encodes the manifest's CSV (header row required).
pub fn load_table(manifest: &DatasetManifest) -> Result<RawTable> {
    let file = std::fs::File::open(&manifest.path).map_err(|e| Error::io(&manifest.path, e))?;
    read_table(manifest, file)
}

/// Normalized dataset for a manifest.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<Dataset> {
    load_table(manifest)?.normalized()
}

enum Encoder {
    Numeric,
    OneHot(Vec<String>),
    Ordinal(Vec<String>),
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize);
    Error::ingest(row, None, e.to_string())
}

pub fn read_table(manifest: &DatasetManifest, reader: impl std::io::Read) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    let label_idx = headers
        .iter()
        .position(|h| *h == manifest.label_column)
        .ok_or_else(|| Error::ingest(None, Some(&manifest.label_column), "label column missing from header"))?;
    for col in manifest.columns.keys() {
        if !headers.contains(col) {
            return Err(Error::ingest(None, Some(col), "column listed in manifest but missing from header"));
        }
    }

    let mut plan: Vec<(usize, Encoder)> = Vec::new();
    let mut feature_names = Vec::new();
    for (k, h) in headers.iter().enumerate() {
        if k == label_idx {
            continue;
        }
        match manifest.columns.get(h).unwrap_or(&manifest.default) {
            ColumnSpec::Drop => {}
            ColumnSpec::Numeric => {
                feature_names.push(h.clone());
                plan.push((k, Encoder::Numeric));
            }
            ColumnSpec::Categorical(values) => {
                feature_names.extend(values.iter().map(|v| format!("{h}={v}")));
                plan.push((k, Encoder::OneHot(values.clone())));
            }
            ColumnSpec::Ordinal(values) => {
                feature_names.push(h.clone());
                plan.push((k, Encoder::Ordinal(values.clone())));
            }
        }
    }
    if feature_names.is_empty() {
        return Err(Error::Config("manifest leaves no feature columns".into()));
    }

    let is_na = |s: &str| s.is_empty() || manifest.na_values.iter().any(|na| na == s);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut raw_rows = 0;
    let mut dropped = 0;
    let mut label_values = BTreeSet::new();
    let mut row_buf = Vec::with_capacity(feature_names.len());
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        // Data row r sits on line r + 2 of the file.
        let line = r + 2;
        raw_rows += 1;
        if rec.len() != headers.len() {
            return Err(Error::ingest(Some(line), None, format!("{} fields, header has {}", rec.len(), headers.len())));
        }
        let label_raw = &rec[label_idx];
        if is_na(label_raw) || plan.iter().any(|(k, _)| is_na(&rec[*k])) {
            dropped += 1;
            continue;
        }
        row_buf.clear();
        for (k, enc) in &plan {
            let cell = &rec[*k];
            let col = Some(headers[*k].as_str());
            match enc {
                Encoder::Numeric => {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| Error::ingest(Some(line), col, format!("`{cell}` is not a number")))?;
                    if !v.is_finite() {
                        return Err(Error::ingest(Some(line), col, format!("`{cell}` is not finite")));
                    }
                    row_buf.push(v);
                }
                Encoder::OneHot(cats) => {
                    let hit = cats
                        .iter()
                        .position(|c| c == cell)
                        .ok_or_else(|| Error::ingest(Some(line), col, format!("unknown category `{cell}`")))?;
                    row_buf.extend((0..cats.len()).map(|j| if j == hit { 1.0 } else { 0.0 }));
                }
                Encoder::Ordinal(levels) => {
                    let hit = levels
                        .iter()
                        .position(|c| c == cell)
                        .ok_or_else(|| Error::ingest(Some(line), col, format!("unknown ordinal level `{cell}`")))?;
                    row_buf.push(hit as f64);
                }
            }
        }
        label_values.insert(label_raw.to_owned());
        if label_values.len() > 2 {
            return Err(Error::ingest(
                Some(line),
                Some(&manifest.label_column),
                format!("more than two label values: {label_values:?}"),
            ));
        }
        labels.push(u8::from(label_raw == manifest.positive_label));
        values.extend_from_slice(&row_buf);
    }
    if labels.is_empty() {
        return Err(Error::ingest(None, None, "no complete rows"));
    }
    let n = labels.len();
    let p = feature_names.len();
    let provenance = Provenance {
        source: manifest.path.display().to_string(),
        raw_rows,
        raw_columns: headers.len(),
        dropped_rows: dropped,
        scaler: None,
        notes: vec![format!("dataset {}; label {} = {} -> 1", manifest.name, manifest.label_column, manifest.positive_label)],
    };
    Ok(RawTable {
        n,
        p,
        values,
        labels,
        feature_names,
        provenance,
    })
}

/// Text rendering of a fold plan: one line per repeat and fold listing the
/// zero-based row indices.
pub fn format_fold_plan(plan: &FoldPlan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fold-plan seed {} n {} repeats {} folds {}", plan.seed, plan.n, plan.repeat_count, plan.fold_count);
    for (r, folds) in plan.assignments.iter().enumerate() {
        for (k, idx) in folds.iter().enumerate() {
            let list: Vec<String> = idx.iter().map(usize::to_string).collect();
            let _ = writeln!(s, "repeat {r} fold {k}: {}", list.join(" "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(extra: &str) -> DatasetManifest {
        let text = format!("path = x.csv\nlabel_column = y\npositive_label = yes\n{extra}");
        DatasetManifest::parse(&text, Path::new("/data")).unwrap()
    }

    #[test]
    fn numeric_endpoints_scale_to_unit() {
        let m = manifest("");
        let t = read_table(&m, "a,y\n2,yes\n4,no\n".as_bytes()).unwrap();
        let d = t.normalized().unwrap();
        assert_eq!(d.features(), &[0.0, 1.0]);
        assert_eq!(d.labels(), &[1, 0]);
        assert_eq!(m.path, Path::new("/data/x.csv"));
    }

    #[test]
    fn categorical_ordinal_and_na() {
        let m = manifest("column.c = categorical(r,g,b)\ncolumn.o = ordinal(lo,mid,hi)\ncolumn.skip = drop\n");
        let csv = "c,o,skip,y\nr,lo,1,yes\nb,hi,2,no\ng,?,3,no\n,mid,4,yes\ng,mid,5,no\n";
        let t = read_table(&m, csv.as_bytes()).unwrap();
        assert_eq!(t.feature_names, ["c=r", "c=g", "c=b", "o"]);
        assert_eq!(t.n, 3);
        assert_eq!(t.provenance.dropped_rows, 2);
        assert_eq!(t.row(1), &[0.0, 0.0, 1.0, 2.0]);
        let d = t.normalized().unwrap();
        assert_eq!(d.row(2), &[0.0, 1.0, 0.0, 0.5]);
    }

    #[test]
    fn errors_name_row_and_column() {
        let m = manifest("column.c = categorical(r,g)\n");
        let err = read_table(&m, "c,y\nr,yes\nq,no\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "row 3, column c: unknown category `q`");
        let err = read_table(&manifest(""), "a,y\n1,yes\nx,no\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "row 3, column a: `x` is not a number");
        let err = read_table(&manifest(""), "a,z\n1,yes\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("label column missing"));
        let err = read_table(&manifest(""), "a,y\n1,yes\n2,no\n3,maybe\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("more than two label values"));
    }

    #[test]
    fn manifest_validation() {
        let base = "path = x.csv\nlabel_column = y\npositive_label = 1\n";
        for bad in ["column.a = categorical(x)", "column.a = ordinal(x,x)", "column.a = weird", "bogus = 1"] {
            assert!(DatasetManifest::parse(&format!("{base}{bad}\n"), Path::new(".")).is_err(), "{bad}");
        }
        assert!(DatasetManifest::parse("path = x.csv\n", Path::new(".")).is_err());
    }
}
