//! Tabular example sets: schemas with attribute roles, CSV loading, seeded
//! splits and synthetic two-class data.

use std::collections::HashSet;
use std::fs::File;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng::seeded;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeKind {
    Numeric,
    BinaryNominal,
    Nominal,
}

impl AttributeKind {
    pub fn is_nominal(self) -> bool {
        !matches!(self, AttributeKind::Numeric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Regular,
    Label,
    Id,
}

/// One column of an [`ExampleSet`]. Nominal kinds carry their token vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    pub role: Role,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vocabulary: Vec<String>,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
            role: Role::Regular,
            vocabulary: Vec::new(),
        }
    }

    /// Nominal attribute; the kind is binary when the vocabulary has exactly two tokens.
    pub fn nominal(name: impl Into<String>, vocabulary: Vec<String>) -> Self {
        let kind = if vocabulary.len() == 2 {
            AttributeKind::BinaryNominal
        } else {
            AttributeKind::Nominal
        };
        Attribute {
            name: name.into(),
            kind,
            role: Role::Regular,
            vocabulary,
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Token(String),
    Absent,
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_token(&self) -> Option<&str> {
        match self {
            Value::Token(t) => Some(t),
            _ => None,
        }
    }
}

/// An immutable table of examples. Each row remembers its index in the set it
/// was originally loaded or generated as (`origin`), so partitions can be
/// traced back and written out as manifests.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSet {
    schema: Vec<Attribute>,
    rows: Vec<Vec<Value>>,
    origin: Vec<usize>,
    label: usize,
}

impl ExampleSet {
    pub fn new(schema: Vec<Attribute>, rows: Vec<Vec<Value>>) -> Result<Self> {
        let origin = (0..rows.len()).collect();
        Self::with_origin(schema, rows, origin)
    }

    pub(crate) fn with_origin(schema: Vec<Attribute>, rows: Vec<Vec<Value>>, origin: Vec<usize>) -> Result<Self> {
        let label = validate_schema(&schema)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::RaggedRow {
                    row: r,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            for (attr, value) in schema.iter().zip(row) {
                check_value(attr, value, r)?;
            }
        }
        debug_assert_eq!(origin.len(), rows.len());
        Ok(ExampleSet {
            schema,
            rows,
            origin,
            label,
        })
    }

    pub fn schema(&self) -> &[Attribute] {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn label_index(&self) -> usize {
        self.label
    }

    pub fn label_attribute(&self) -> &Attribute {
        &self.schema[self.label]
    }

    /// Class names in vocabulary order; this order fixes the network's output units.
    pub fn class_names(&self) -> &[String] {
        &self.schema[self.label].vocabulary
    }

    pub fn label_of(&self, row: usize) -> Option<&str> {
        self.rows[row][self.label].as_token()
    }

    /// Position of each row's label in [`class_names`](Self::class_names).
    pub fn class_indices(&self) -> Vec<Option<usize>> {
        let classes = self.class_names();
        (0..self.len())
            .map(|r| {
                self.label_of(r)
                    .map(|l| classes.iter().position(|c| c == l).expect("validated"))
            })
            .collect()
    }

    pub fn is_fully_labeled(&self) -> bool {
        (0..self.len()).all(|r| self.label_of(r).is_some())
    }

    pub fn is_fully_unlabeled(&self) -> bool {
        (0..self.len()).all(|r| self.label_of(r).is_none())
    }

    pub fn regular_indices(&self) -> Vec<usize> {
        self.schema
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Regular)
            .map(|(i, _)| i)
            .collect()
    }

    /// Regular attribute values as real vectors. Fails if any regular
    /// attribute is still nominal.
    pub fn feature_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let regular = self.regular_indices();
        if let Some(&i) = regular.iter().find(|&&i| self.schema[i].kind.is_nominal()) {
            return Err(Error::SchemaMismatch(format!(
                "attribute `{}` is nominal; apply the nominal mapping first",
                self.schema[i].name
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                regular
                    .iter()
                    .map(|&i| row[i].as_number().expect("validated numeric"))
                    .collect()
            })
            .collect())
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> ExampleSet {
        ExampleSet {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            origin: indices.iter().map(|&i| self.origin[i]).collect(),
            label: self.label,
        }
    }

    /// Concatenate two sets that share a schema.
    pub fn concat(&self, other: &ExampleSet) -> Result<ExampleSet> {
        self.check_compatible(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        let mut origin = self.origin.clone();
        origin.extend(&other.origin);
        Ok(ExampleSet {
            schema: self.schema.clone(),
            rows,
            origin,
            label: self.label,
        })
    }

    /// Make `name` the label attribute; the previous label becomes regular.
    pub fn set_role(&self, name: &str, role: Role) -> Result<ExampleSet> {
        let idx = self
            .schema
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no attribute named `{name}`")))?;
        let mut schema = self.schema.clone();
        match role {
            Role::Label => {
                if idx != self.label {
                    schema[self.label].role = Role::Regular;
                }
                schema[idx].role = Role::Label;
            }
            other => {
                if idx == self.label {
                    return Err(Error::InvalidArgument(
                        "an example set needs exactly one label attribute".into(),
                    ));
                }
                schema[idx].role = other;
            }
        }
        Self::with_origin(schema, self.rows.clone(), self.origin.clone())
    }

    /// Same names, kinds and roles per position, and the same class vocabulary.
    pub fn check_compatible(&self, other: &ExampleSet) -> Result<()> {
        if self.schema.len() != other.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} attributes vs {}",
                self.schema.len(),
                other.schema.len()
            )));
        }
        for (a, b) in self.schema.iter().zip(&other.schema) {
            if a.name != b.name || a.kind != b.kind || a.role != b.role {
                return Err(Error::SchemaMismatch(format!(
                    "attribute `{}` differs from `{}`",
                    a.name, b.name
                )));
            }
        }
        if self.class_names() != other.class_names() {
            return Err(Error::SchemaMismatch("class vocabularies differ".into()));
        }
        Ok(())
    }

    pub(crate) fn replace_rows(&self, schema: Vec<Attribute>, rows: Vec<Vec<Value>>) -> Result<Self> {
        Self::with_origin(schema, rows, self.origin.clone())
    }

    pub(crate) fn with_labels(&self, labels: &[Option<String>]) -> ExampleSet {
        let rows = self
            .rows
            .iter()
            .zip(labels)
            .map(|(row, l)| {
                let mut row = row.clone();
                row[self.label] = l.clone().map(Value::Token).unwrap_or(Value::Absent);
                row
            })
            .collect();
        ExampleSet {
            schema: self.schema.clone(),
            rows,
            origin: self.origin.clone(),
            label: self.label,
        }
    }

    /// Write in the same CSV dialect [`load_csv`] reads.
    /// The set as CSV text with a header row; absent values are empty cells.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.schema.iter().map(|a| a.name.as_str()))
            .map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| match v {
                Value::Number(x) => x.to_string(),
                Value::Token(t) => t.clone(),
                Value::Absent => String::new(),
            }))
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

fn validate_schema(schema: &[Attribute]) -> Result<usize> {
    let labels: Vec<usize> = schema
        .iter()
        .enumerate()
        .filter(|(_, a)| a.role == Role::Label)
        .map(|(i, _)| i)
        .collect();
    if labels.len() != 1 {
        return Err(Error::SchemaMismatch(format!(
            "expected exactly one label attribute, found {}",
            labels.len()
        )));
    }
    let mut names = HashSet::new();
    for a in schema {
        if !names.insert(a.name.as_str()) {
            return Err(Error::SchemaMismatch(format!("duplicate attribute `{}`", a.name)));
        }
        if a.kind.is_nominal() && a.vocabulary.is_empty() {
            return Err(Error::SchemaMismatch(format!(
                "nominal attribute `{}` has an empty vocabulary",
                a.name
            )));
        }
        if a.kind == AttributeKind::BinaryNominal && a.vocabulary.len() != 2 {
            return Err(Error::SchemaMismatch(format!(
                "binary attribute `{}` needs two tokens",
                a.name
            )));
        }
    }
    let label = labels[0];
    if !schema[label].kind.is_nominal() {
        return Err(Error::SchemaMismatch(format!(
            "label attribute `{}` must be nominal",
            schema[label].name
        )));
    }
    Ok(label)
}

fn check_value(attr: &Attribute, value: &Value, row: usize) -> Result<()> {
    let ok = match (attr.kind, value) {
        (_, Value::Absent) => {
            if attr.role == Role::Label {
                true
            } else {
                return Err(Error::MissingValue {
                    attribute: attr.name.clone(),
                    row,
                });
            }
        }
        (AttributeKind::Numeric, Value::Number(x)) => x.is_finite(),
        (AttributeKind::Numeric, Value::Token(_)) => false,
        (_, Value::Token(t)) => {
            if !attr.vocabulary.contains(t) {
                return Err(Error::SchemaMismatch(format!(
                    "row {row}: token `{t}` is not in the vocabulary of `{}`",
                    attr.name
                )));
            }
            true
        }
        (_, Value::Number(_)) => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::SchemaMismatch(format!(
            "row {row}: value {value:?} does not fit attribute `{}`",
            attr.name
        )))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

/// Load a headered, comma-separated file. Column kinds are inferred: a column
/// whose cells all parse as numbers is numeric, one with exactly two distinct
/// tokens is binary-nominal, anything else nominal. The label column is always
/// nominal and empty label cells mark unlabeled rows.
pub fn load_csv(path: &Path, label_column: &str) -> Result<ExampleSet> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    let label = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::LabelColumnNotFound(label_column.to_owned()))?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { len, .. } => Error::RaggedRow {
                row: r,
                expected: headers.len(),
                found: *len as usize,
            },
            _ => csv_error(e),
        })?;
        cells.push(record.iter().map(str::to_owned).collect());
    }
    if cells.is_empty() {
        return Err(Error::NoRows);
    }

    let mut schema = Vec::with_capacity(headers.len());
    for (c, name) in headers.iter().enumerate() {
        if c != label {
            if let Some(r) = cells.iter().position(|row| row[c].is_empty()) {
                return Err(Error::MissingValue {
                    attribute: name.clone(),
                    row: r,
                });
            }
        }
        let present = cells.iter().map(|row| row[c].as_str()).filter(|s| !s.is_empty());
        let numeric = c != label && present.clone().all(|s| parse_number(s).is_some());
        let attr = if numeric {
            Attribute::numeric(name.clone())
        } else {
            let mut vocab: Vec<String> = Vec::new();
            for token in present {
                if !vocab.iter().any(|v| v == token) {
                    vocab.push(token.to_owned());
                }
            }
            Attribute::nominal(name.clone(), vocab)
        };
        schema.push(if c == label { attr.with_role(Role::Label) } else { attr });
    }

    let rows = cells
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&schema)
                .map(|(cell, attr)| {
                    if cell.is_empty() {
                        Value::Absent
                    } else if attr.kind == AttributeKind::Numeric {
                        Value::Number(parse_number(&cell).expect("checked during inference"))
                    } else {
                        Value::Token(cell)
                    }
                })
                .collect()
        })
        .collect();
    ExampleSet::new(schema, rows)
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Result<Self> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "test fraction must lie strictly between 0 and 1, got {test_fraction}"
            )));
        }
        Ok(SplitSpec { test_fraction, seed })
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            test_fraction: 0.3,
            seed: 0,
        }
    }
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seeded(seed));
    idx
}

/// Seeded train/test partition. The test part holds `floor(fraction * n)`
/// rows; both parts keep the input row order.
pub fn split_random(set: &ExampleSet, spec: SplitSpec) -> Result<(ExampleSet, ExampleSet)> {
    let spec = SplitSpec::new(spec.test_fraction, spec.seed)?;
    if set.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 rows to split, got {}",
            set.len()
        )));
    }
    let n = set.len();
    // the epsilon absorbs products like 0.3 * 10 landing a hair under an integer
    let test_len = ((spec.test_fraction * n as f64) + 1e-9).floor() as usize;
    let idx = shuffled_indices(n, spec.seed);
    let mut test: Vec<usize> = idx[..test_len].to_vec();
    let mut train: Vec<usize> = idx[test_len..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((set.select(&train), set.select(&test)))
}

/// Ground-truth labels of an unlabeled pool, kept apart from the
/// [`ExampleSet`] learners see.
#[derive(Debug, Clone, PartialEq)]
pub struct SealedLabels {
    labels: Vec<(usize, String)>,
}

impl SealedLabels {
    /// `(origin, label)` pairs aligned with the rows of the unlabeled set.
    pub fn reveal(&self) -> &[(usize, String)] {
        &self.labels
    }
}

#[derive(Debug, Clone)]
pub struct LabeledSplit {
    pub labeled: ExampleSet,
    pub unlabeled: ExampleSet,
    pub sealed: SealedLabels,
}

/// Keep `labeled_count` randomly chosen rows labeled and strip the labels of
/// the rest.
pub fn split_labeled_unlabeled(train: &ExampleSet, labeled_count: usize, seed: u64) -> Result<LabeledSplit> {
    if labeled_count == 0 || labeled_count > train.len() {
        return Err(Error::InvalidArgument(format!(
            "labeled count must be in 1..={}, got {labeled_count}",
            train.len()
        )));
    }
    if let Some(r) = (0..train.len()).find(|&r| train.label_of(r).is_none()) {
        return Err(Error::Unlabeled(r));
    }
    let idx = shuffled_indices(train.len(), seed);
    let mut labeled: Vec<usize> = idx[..labeled_count].to_vec();
    let mut unlabeled: Vec<usize> = idx[labeled_count..].to_vec();
    labeled.sort_unstable();
    unlabeled.sort_unstable();

    let pool = train.select(&unlabeled);
    let sealed = SealedLabels {
        labels: (0..pool.len())
            .map(|r| (pool.origin[r], pool.label_of(r).expect("checked").to_owned()))
            .collect(),
    };
    let stripped = pool.with_labels(&vec![None; pool.len()]);
    Ok(LabeledSplit {
        labeled: train.select(&labeled),
        unlabeled: stripped,
        sealed,
    })
}

pub const SYNTHETIC_CLASSES: [&str; 2] = ["no", "yes"];

/// Two balanced classes of spherical unit-variance Gaussians centred at
/// `-separation/2` ("no") and `+separation/2` ("yes") on every coordinate.
/// Rows alternate between the classes.
pub fn generate_synthetic(n: usize, d: usize, class_separation: f64, seed: u64) -> Result<ExampleSet> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidArgument(format!(
            "synthetic data needs n >= 2 and d >= 1, got n={n}, d={d}"
        )));
    }
    if !(class_separation >= 0.0 && class_separation.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "class separation must be a nonnegative real, got {class_separation}"
        )));
    }
    let mut schema: Vec<Attribute> = (1..=d).map(|j| Attribute::numeric(format!("x{j}"))).collect();
    schema.push(
        Attribute::nominal("class", SYNTHETIC_CLASSES.iter().map(|s| s.to_string()).collect()).with_role(Role::Label),
    );
    let mut rng = seeded(seed);
    let half = class_separation / 2.0;
    let rows = (0..n)
        .map(|i| {
            let class = i % 2;
            let mean = if class == 1 { half } else { -half };
            let mut row: Vec<Value> = (0..d)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    Value::Number(mean + z)
                })
                .collect();
            row.push(Value::Token(SYNTHETIC_CLASSES[class].to_owned()));
            row
        })
        .collect();
    ExampleSet::new(schema, rows)
}

/// Write `(row_index, partition)` pairs so a split can be reproduced or audited.
/// `row_index,partition` lines for each entry. Partition names must not
/// contain commas or quotes.
pub fn split_manifest_csv(entries: &[(usize, &str)]) -> String {
    let mut s = String::from("row_index,partition\n");
    for (row, part) in entries {
        s.push_str(&format!("{row},{part}\n"));
    }
    s
}

pub fn write_split_manifest(path: &Path, entries: &[(usize, &str)]) -> Result<()> {
    std::fs::write(path, split_manifest_csv(entries)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_split_manifest(path: &Path) -> Result<Vec<(usize, String)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let row = rec
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Csv(format!("bad row index in {}", path.display())))?;
        out.push((row, rec.get(1).unwrap_or_default().to_owned()));
    }
    Ok(out)
}
