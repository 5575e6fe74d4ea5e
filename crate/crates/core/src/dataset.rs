//! Tabular datasets, CSV I/O and attribute classification.
//!
//! CSV dialect: comma delimiter, a header line, UTF-8, optional double-quote
//! quoting. Missing values are rejected.
//!
//! Every record carries a hidden *source index* (its row number in the file
//! it was loaded from). Anonymisation steps keep it attached to the record so
//! that evaluation can line published records up with their originals. It is
//! never written by [`write_csv`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Column {
            name: name.into(),
            kind,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Self::new(name, ColumnKind::Categorical)
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self::new(name, ColumnKind::Numeric)
    }
}

/// Ordered, non-empty list of uniquely named columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<Column>,
}

impl Schema {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidSchema("schema has no columns".into()));
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate column `{}`",
                    c.name
                )));
            }
        }
        Ok(Schema { columns })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value<T> {
    Text(String),
    Num(T),
}

impl<T: Scalar> Value<T> {
    pub fn as_num(&self) -> Option<T> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            Value::Num(_) => None,
        }
    }
}

impl<T: Scalar> fmt::Display for Value<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => f.write_str(s),
            Value::Num(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    schema: Schema,
    rows: Vec<Vec<Value<T>>>,
    source: Vec<usize>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset from rows, checking arity and cell types. Source
    /// indices are `0..n`.
    pub fn new(schema: Schema, rows: Vec<Vec<Value<T>>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::SchemaMismatch(format!(
                    "row {} has {} cells, schema has {} columns",
                    i + 1,
                    row.len(),
                    schema.len()
                )));
            }
            for (cell, col) in row.iter().zip(schema.columns()) {
                let ok = match (cell, col.kind) {
                    (Value::Num(v), ColumnKind::Numeric) => v.is_finite(),
                    (Value::Text(_), ColumnKind::Categorical) => true,
                    _ => false,
                };
                if !ok {
                    return Err(Error::Parse {
                        row: i + 1,
                        column: col.name.clone(),
                        message: format!("cell `{cell}` does not fit a {:?} column", col.kind),
                    });
                }
            }
        }
        let source = (0..rows.len()).collect();
        Ok(Dataset {
            schema,
            rows,
            source,
        })
    }

    pub(crate) fn from_parts(schema: Schema, rows: Vec<Vec<Value<T>>>, source: Vec<usize>) -> Self {
        debug_assert_eq!(rows.len(), source.len());
        Dataset {
            schema,
            rows,
            source,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Value<T>>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Value<T>] {
        &self.rows[i]
    }

    /// Source index of row `i` (evaluation only).
    pub fn source_index(&self, i: usize) -> usize {
        self.source[i]
    }

    pub fn source_indices(&self) -> &[usize] {
        &self.source
    }

    /// Map from source index to row position.
    pub fn rows_by_source(&self) -> HashMap<usize, usize> {
        self.source
            .iter()
            .enumerate()
            .map(|(row, &src)| (src, row))
            .collect()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .index_of(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("no column `{name}`")))
    }

    pub fn numeric_column(&self, name: &str) -> Result<Vec<T>> {
        let c = self.column_index(name)?;
        if self.schema.columns()[c].kind != ColumnKind::Numeric {
            return Err(Error::SchemaMismatch(format!("column `{name}` is not numeric")));
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r[c].as_num().expect("numeric column holds numbers"))
            .collect())
    }

    /// Cell of column `c` in row `i` rendered as text (numbers in canonical
    /// decimal form).
    pub fn text(&self, i: usize, c: usize) -> String {
        self.rows[i][c].to_string()
    }

    /// Returns a copy with one column appended.
    pub fn with_column(&self, column: Column, values: Vec<Value<T>>) -> Result<Self> {
        if values.len() != self.n() {
            return Err(Error::SchemaMismatch(format!(
                "new column `{}` has {} values for {} records",
                column.name,
                values.len(),
                self.n()
            )));
        }
        let mut cols = self.schema.columns().to_vec();
        cols.push(column);
        let schema = Schema::new(cols)?;
        let rows = self
            .rows
            .iter()
            .zip(values)
            .map(|(r, v)| {
                let mut r = r.clone();
                r.push(v);
                r
            })
            .collect::<Vec<_>>();
        let mut out = Dataset::new(schema, rows)?;
        out.source = self.source.clone();
        Ok(out)
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Self> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n))
            .collect::<Result<Vec<_>>>()?;
        let schema = Schema::new(idx.iter().map(|&i| self.schema.columns()[i].clone()).collect())?;
        let rows = self
            .rows
            .iter()
            .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
            .collect();
        Ok(Dataset::from_parts(schema, rows, self.source.clone()))
    }

    /// Replaces the hidden source indices, e.g. after reading a linkage file.
    pub fn with_source_indices(mut self, source: Vec<usize>) -> Result<Self> {
        if source.len() != self.n() {
            return Err(Error::SchemaMismatch(format!(
                "{} source indices for {} records",
                source.len(),
                self.n()
            )));
        }
        self.source = source;
        Ok(self)
    }
}

fn parse_cell<T: Scalar>(raw: &str, col: &Column, row: usize) -> Result<Value<T>> {
    if raw.is_empty() {
        return Err(Error::Parse {
            row,
            column: col.name.clone(),
            message: "missing value".into(),
        });
    }
    match col.kind {
        ColumnKind::Categorical => Ok(Value::Text(raw.to_string())),
        ColumnKind::Numeric => match raw.trim().parse::<T>() {
            Ok(v) if v.is_finite() => Ok(Value::Num(v)),
            _ => Err(Error::Parse {
                row,
                column: col.name.clone(),
                message: format!("`{raw}` is not a finite number"),
            }),
        },
    }
}

/// Reads CSV whose header must contain exactly the schema's columns (in any
/// order). Cells are returned in schema order.
pub fn read_csv<T: Scalar, R: Read>(reader: R, schema: &Schema) -> Result<Dataset<T>> {
    read_csv_inner(reader, schema, false)
}

/// Like [`read_csv`] but tolerates extra columns in the file, which are
/// dropped.
pub fn read_csv_projected<T: Scalar, R: Read>(reader: R, schema: &Schema) -> Result<Dataset<T>> {
    read_csv_inner(reader, schema, true)
}

fn read_csv_inner<T: Scalar, R: Read>(reader: R, schema: &Schema, allow_extra: bool) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();

    let mut positions = Vec::with_capacity(schema.len());
    for col in schema.columns() {
        match header.iter().position(|h| *h == col.name) {
            Some(p) => positions.push(p),
            None => {
                return Err(Error::SchemaMismatch(format!(
                    "header lacks column `{}`",
                    col.name
                )))
            }
        }
    }
    if !allow_extra {
        if let Some(extra) = header.iter().find(|h| schema.index_of(h).is_none()) {
            return Err(Error::SchemaMismatch(format!("unexpected column `{extra}`")));
        }
    }
    let mut seen = HashSet::new();
    if let Some(dup) = header.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(Error::SchemaMismatch(format!("duplicate header `{dup}`")));
    }

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row_no = i + 1;
        let rec = rec.map_err(|e| Error::Parse {
            row: row_no,
            column: String::new(),
            message: e.to_string(),
        })?;
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row: row_no,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        let row = schema
            .columns()
            .iter()
            .zip(&positions)
            .map(|(col, &p)| parse_cell(&rec[p], col, row_no))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::new(schema.clone(), rows)
}

pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset<T>> {
    read_csv(std::fs::File::open(path)?, schema)
}

pub fn load_csv_projected<T: Scalar>(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset<T>> {
    read_csv_projected(std::fs::File::open(path)?, schema)
}

/// Column names of a CSV file.
pub fn csv_header(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path)?;
    Ok(rdr.headers()?.iter().map(str::to_string).collect())
}

pub fn write_csv_to<T: Scalar, W: Write>(ds: &Dataset<T>, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    w.write_record(ds.schema.names())?;
    for row in &ds.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv<T: Scalar>(ds: &Dataset<T>, path: impl AsRef<Path>) -> Result<()> {
    write_csv_to(ds, std::io::BufWriter::new(std::fs::File::create(path)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Explicit,
    KQuasi,
    EpsQuasi,
    Sensitive,
}

/// Role of every column.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AttributeClassification {
    roles: BTreeMap<String, Role>,
}

impl AttributeClassification {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, column: impl Into<String>, role: Role) -> Self {
        self.roles.insert(column.into(), role);
        self
    }

    pub fn set(&mut self, column: impl Into<String>, role: Role) {
        self.roles.insert(column.into(), role);
    }

    pub fn role(&self, column: &str) -> Option<Role> {
        self.roles.get(column).copied()
    }

    /// Columns with `role`, in schema order.
    pub fn columns_with<'a>(&self, schema: &'a Schema, role: Role) -> Vec<&'a str> {
        schema
            .names()
            .filter(|n| self.role(n) == Some(role))
            .collect()
    }

    pub fn k_quasis<'a>(&self, schema: &'a Schema) -> Vec<&'a str> {
        self.columns_with(schema, Role::KQuasi)
    }

    pub fn eps_quasis<'a>(&self, schema: &'a Schema) -> Vec<&'a str> {
        self.columns_with(schema, Role::EpsQuasi)
    }

    /// Every schema column has a role, no role names an unknown column, and
    /// every ε-quasi is numeric.
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        for col in schema.columns() {
            match self.role(&col.name) {
                None => {
                    return Err(Error::Classification(format!(
                        "column `{}` has no role",
                        col.name
                    )))
                }
                Some(Role::EpsQuasi) if col.kind != ColumnKind::Numeric => {
                    return Err(Error::Classification(format!(
                        "ε-quasi `{}` must be numeric",
                        col.name
                    )))
                }
                _ => {}
            }
        }
        if let Some(name) = self.roles.keys().find(|n| schema.index_of(n).is_none()) {
            return Err(Error::Classification(format!(
                "role given for unknown column `{name}`"
            )));
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus at least one k-quasi and one ε-quasi.
    pub fn validate_for_pipeline(&self, schema: &Schema) -> Result<()> {
        self.validate(schema)?;
        if self.k_quasis(schema).is_empty() {
            return Err(Error::Classification("no k-quasi column".into()));
        }
        if self.eps_quasis(schema).is_empty() {
            return Err(Error::Classification("no ε-quasi column".into()));
        }
        Ok(())
    }
}

/// Drops every column classified as explicit. Records and their order are
/// untouched.
pub fn remove_explicit_identifiers<T: Scalar>(
    ds: &Dataset<T>,
    cls: &AttributeClassification,
) -> Dataset<T> {
    let keep: Vec<usize> = (0..ds.schema.len())
        .filter(|&i| cls.role(&ds.schema.columns()[i].name) != Some(Role::Explicit))
        .collect();
    let schema = Schema {
        columns: keep.iter().map(|&i| ds.schema.columns()[i].clone()).collect(),
    };
    let rows = ds
        .rows
        .iter()
        .map(|r| keep.iter().map(|&i| r[i].clone()).collect())
        .collect();
    Dataset::from_parts(schema, rows, ds.source.clone())
}

/// Fisher–Yates permutation of `0..n` driven by a ChaCha20 stream keyed by
/// `seed`.
pub fn shuffle_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng::stream(seed, Purpose::Shuffle, 0));
    perm
}

pub fn shuffle_records<T: Scalar>(ds: &Dataset<T>, seed: u64) -> Dataset<T> {
    let perm = shuffle_permutation(ds.n(), seed);
    let rows = perm.iter().map(|&i| ds.rows[i].clone()).collect();
    let source = perm.iter().map(|&i| ds.source[i]).collect();
    Dataset::from_parts(ds.schema.clone(), rows, source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gh_schema() -> Schema {
        Schema::new(vec![Column::categorical("gender"), Column::numeric("height")]).unwrap()
    }

    #[test]
    fn loads_three_rows() {
        let csv = "gender,height\nMale,180.5\nFemale,162\nMale,175\n";
        let ds: Dataset<f64> = read_csv(csv.as_bytes(), &gh_schema()).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.numeric_column("height").unwrap(), vec![180.5, 162.0, 175.0]);
        assert_eq!(ds.row(1)[0], Value::Text("Female".into()));
    }

    #[test]
    fn header_order_may_differ_from_schema() {
        let csv = "height,gender\n170,Male\n";
        let ds: Dataset<f64> = read_csv(csv.as_bytes(), &gh_schema()).unwrap();
        assert_eq!(ds.row(0)[0], Value::Text("Male".into()));
        assert_eq!(ds.row(0)[1], Value::Num(170.0));
    }

    #[test]
    fn missing_column_is_schema_mismatch() {
        let csv = "gender,weight\nMale,80\n";
        let err = read_csv::<f64, _>(csv.as_bytes(), &gh_schema()).unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch(ref m) if m.contains("height")), "{err}");
    }

    #[test]
    fn extra_column_is_schema_mismatch() {
        let csv = "gender,height,ssn\nMale,180,1\n";
        let err = read_csv::<f64, _>(csv.as_bytes(), &gh_schema()).unwrap_err();
        assert!(matches!(err, Error::SchemaMismatch(_)));
        let ok: Dataset<f64> = read_csv_projected(csv.as_bytes(), &gh_schema()).unwrap();
        assert_eq!(ok.schema().len(), 2);
    }

    #[test]
    fn bad_number_reports_row() {
        let csv = "gender,height\nMale,180\nFemale,abc\n";
        match read_csv::<f64, _>(csv.as_bytes(), &gh_schema()).unwrap_err() {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "height");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_data_and_missing_values_rejected() {
        let err = read_csv::<f64, _>("gender,height\n".as_bytes(), &gh_schema()).unwrap_err();
        assert!(matches!(err, Error::EmptyDataset));
        let err = read_csv::<f64, _>("gender,height\n,170\n".as_bytes(), &gh_schema()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
        let err = read_csv::<f64, _>("gender,height\nMale,inf\n".as_bytes(), &gh_schema()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn quoted_fields() {
        let csv = "gender,height\n\"Ma,le\",170\n";
        let ds: Dataset<f64> = read_csv(csv.as_bytes(), &gh_schema()).unwrap();
        assert_eq!(ds.row(0)[0], Value::Text("Ma,le".into()));
    }

    #[test]
    fn schema_rejects_duplicates_and_empty() {
        assert!(Schema::new(vec![]).is_err());
        assert!(Schema::new(vec![Column::numeric("a"), Column::categorical("a")]).is_err());
    }

    fn table2() -> (Dataset<f64>, AttributeClassification) {
        let schema = Schema::new(vec![
            Column::categorical("Name"),
            Column::categorical("SSN"),
            Column::categorical("Gender"),
            Column::numeric("Height"),
        ])
        .unwrap();
        let rows = (0..5)
            .map(|i| {
                vec![
                    Value::Text(format!("n{i}")),
                    Value::Text(format!("s{i}")),
                    Value::Text("Male".into()),
                    Value::Num(170.0 + i as f64),
                ]
            })
            .collect();
        let cls = AttributeClassification::new()
            .with("Name", Role::Explicit)
            .with("SSN", Role::Explicit)
            .with("Gender", Role::KQuasi)
            .with("Height", Role::EpsQuasi);
        (Dataset::new(schema, rows).unwrap(), cls)
    }

    #[test]
    fn explicit_identifiers_removed() {
        let (ds, cls) = table2();
        let out = remove_explicit_identifiers(&ds, &cls);
        assert_eq!(out.schema().names().collect::<Vec<_>>(), vec!["Gender", "Height"]);
        assert_eq!(out.n(), 5);
        assert_eq!(out.numeric_column("Height").unwrap(), ds.numeric_column("Height").unwrap());
    }

    #[test]
    fn no_explicit_columns_is_noop() {
        let (ds, _) = table2();
        let cls = AttributeClassification::new()
            .with("Name", Role::Sensitive)
            .with("SSN", Role::Sensitive)
            .with("Gender", Role::KQuasi)
            .with("Height", Role::EpsQuasi);
        assert_eq!(remove_explicit_identifiers(&ds, &cls), ds);
    }

    #[test]
    fn classification_validation() {
        let (ds, cls) = table2();
        cls.validate_for_pipeline(ds.schema()).unwrap();
        let bad = cls.clone().with("Gender", Role::EpsQuasi);
        assert!(matches!(bad.validate(ds.schema()), Err(Error::Classification(_))));
        let unknown = cls.clone().with("Weight", Role::Sensitive);
        assert!(unknown.validate(ds.schema()).is_err());
        let mut missing = AttributeClassification::new();
        missing.set("Name", Role::Explicit);
        assert!(missing.validate(ds.schema()).is_err());
        let no_eps = cls.with("Height", Role::Sensitive);
        no_eps.validate(ds.schema()).unwrap();
        assert!(no_eps.validate_for_pipeline(ds.schema()).is_err());
    }

    #[test]
    fn shuffle_single_record_unchanged() {
        let schema = gh_schema();
        let ds = Dataset::new(schema, vec![vec![Value::Text("M".into()), Value::Num(1.0)]]).unwrap();
        assert_eq!(shuffle_records(&ds, 99), ds);
    }

    fn numbered(n: usize) -> Dataset<f64> {
        let schema = gh_schema();
        let rows = (0..n)
            .map(|i| vec![Value::Text(format!("g{}", i % 3)), Value::Num(i as f64)])
            .collect();
        Dataset::new(schema, rows).unwrap()
    }

    #[test]
    fn shuffle_is_deterministic_permutation() {
        let ds = numbered(100);
        let a = shuffle_records(&ds, 7);
        let b = shuffle_records(&ds, 7);
        assert_eq!(a, b);
        assert_ne!(a.rows(), ds.rows());
        let mut before: Vec<String> = ds.rows().iter().map(|r| format!("{}|{}", r[0], r[1])).collect();
        let mut after: Vec<String> = a.rows().iter().map(|r| format!("{}|{}", r[0], r[1])).collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        // source indices travel with their rows
        for i in 0..a.n() {
            assert_eq!(a.row(i)[1], Value::Num(a.source_index(i) as f64));
        }
    }

    #[test]
    fn with_column_keeps_sources() {
        let ds = shuffle_records(&numbered(4), 3);
        let out = ds
            .with_column(Column::numeric("w"), (0..4).map(|i| Value::Num(i as f64)).collect())
            .unwrap();
        assert_eq!(out.source_indices(), ds.source_indices());
        assert!(ds.with_column(Column::numeric("w"), vec![]).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            rows in prop::collection::vec(("[a-zA-Z ,\"]{1,8}", -1e6f64..1e6), 1..30)
        ) {
            let schema = gh_schema();
            let ds = Dataset::new(
                schema.clone(),
                rows.iter().map(|(s, v)| vec![Value::Text(s.clone()), Value::Num(*v)]).collect(),
            ).unwrap();
            let mut buf = Vec::new();
            write_csv_to(&ds, &mut buf).unwrap();
            let back: Dataset<f64> = read_csv(buf.as_slice(), &schema).unwrap();
            prop_assert_eq!(back, ds);
        }
    }
}
