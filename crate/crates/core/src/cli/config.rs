//! Project configuration and CSV ingestion.

use crate::error::{Error, Result};
use crate::measures::{AtomDoc, DataTable, TableDoc, Tuple};
use crate::rational::{self, Rational};
use crate::schema::{validate_schema, Schema, SchemaDoc, Violation};
use crate::simpattr::AttributeList;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub schema: SchemaRef,
    pub tables: Vec<TableSpec>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SchemaRef {
    Path(String),
    Inline(SchemaDoc),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub name: String,
    pub source: Source,
    pub list: AttributeList,
    #[serde(default)]
    pub normalize: bool,
    /// Per-attribute ascending bin edges; a value `v` gets label `i` when
    /// `edges[i] <= v < edges[i+1]`, the last bin being unbounded.
    #[serde(default)]
    pub bins: BTreeMap<String, Vec<serde_json::Value>>,
    /// Rows are kept only if each named attribute takes one of the labels.
    #[serde(default, rename = "where")]
    pub filter: BTreeMap<String, Vec<String>>,
    /// Reorders columns after ingestion (new position `i` takes old `permute[i]`).
    #[serde(default)]
    pub permute: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Csv(String),
    Inline(Vec<AtomDoc>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub variable_budget: Option<usize>,
    #[serde(default)]
    pub closed_under_permutation: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// A loaded project: schema, named tables and input hashes.
#[derive(Clone, Debug)]
pub struct Project {
    pub config: ProjectConfig,
    pub schema: Schema,
    pub tables: Vec<(String, DataTable)>,
    pub inputs: Vec<InputHash>,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path, kind: fn(String) -> Error) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| kind(format!("{}: {e}", path.display())))
}

fn display_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

impl ProjectConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Field-level problems with the configuration against its schema.
    pub fn violations(&self, schema: &Schema) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |field: String, message: String| out.push(Violation { field, message });
        let mut names = BTreeSet::new();
        for (i, t) in self.tables.iter().enumerate() {
            let at = |f: &str| format!("tables[{i}].{f}");
            if !names.insert(&t.name) {
                push(at("name"), format!("duplicate table name {:?}", t.name));
            }
            for (j, a) in t.list.entries().iter().enumerate() {
                if !schema.has_attribute(a) {
                    push(at(&format!("list[{j}]")), format!("undeclared attribute {a:?}"));
                }
            }
            for (a, edges) in &t.bins {
                let field = at(&format!("bins.{a}"));
                if !t.list.entries().contains(a) {
                    push(field.clone(), format!("{a:?} is not in the table's list"));
                    continue;
                }
                match schema.attribute_space(a) {
                    Ok(s) if !s.is_numeric_labeled() => push(field.clone(), format!("space {} is not numeric-labeled", s.id)),
                    Ok(s) if edges.len() > s.len() => {
                        push(field.clone(), format!("{} bins but space {} has {} points", edges.len(), s.id, s.len()))
                    }
                    _ => {}
                }
                match edges.iter().map(rational::from_json).collect::<std::result::Result<Vec<_>, _>>() {
                    Err(e) => push(field, e),
                    Ok(v) if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) => {
                        push(field, "edges must be nonempty and strictly increasing".into())
                    }
                    Ok(_) => {}
                }
            }
            for (a, labels) in &t.filter {
                let field = at(&format!("where.{a}"));
                if !t.list.entries().contains(a) {
                    push(field, format!("{a:?} is not in the table's list"));
                    continue;
                }
                if let Ok(s) = schema.attribute_space(a) {
                    for l in labels {
                        if s.label_index(l).is_none() {
                            push(field.clone(), format!("label {l:?} not in space {}", s.id));
                        }
                    }
                }
            }
            if let Some(p) = &t.permute {
                if crate::simpattr::check_permutation(p, t.list.len()).is_err() {
                    push(at("permute"), format!("{p:?} is not a permutation of {} positions", t.list.len()));
                }
            }
        }
        out
    }
}

impl Project {
    pub fn budget(&self) -> Option<usize> {
        self.config.options.variable_budget
    }

    /// Reads the configuration and everything it references. Schema and
    /// configuration problems come back as field-level violations.
    pub fn load(path: &Path) -> std::result::Result<Project, (Error, Vec<Violation>)> {
        let plain = |e: Error| (e, Vec::new());
        let bytes = read(path, Error::Config).map_err(plain)?;
        let mut inputs = vec![InputHash { path: display_name(path), sha256: sha256(&bytes) }];
        let text = String::from_utf8(bytes).map_err(|e| plain(Error::Config(e.to_string())))?;
        let config = ProjectConfig::parse(&text).map_err(plain)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();

        let doc = match &config.schema {
            SchemaRef::Inline(d) => d.clone(),
            SchemaRef::Path(p) => {
                let bytes = read(&dir.join(p), Error::Config).map_err(plain)?;
                inputs.push(InputHash { path: p.clone(), sha256: sha256(&bytes) });
                serde_json::from_slice(&bytes).map_err(|e| plain(Error::Config(format!("{p}: {e}"))))?
            }
        };
        let schema = doc.into_schema().map_err(plain)?;
        let mut violations: Vec<Violation> = validate_schema(&schema)
            .into_iter()
            .map(|v| Violation { field: format!("schema.{}", v.field), message: v.message })
            .collect();
        violations.extend(config.violations(&schema));
        if !violations.is_empty() {
            let msg = format!("{} configuration problem(s)", violations.len());
            return Err((Error::Config(msg), violations));
        }

        let mut tables = Vec::new();
        for spec in &config.tables {
            let t = match &spec.source {
                Source::Csv(p) => {
                    let full: PathBuf = dir.join(p);
                    let bytes = read(&full, Error::Ingest).map_err(plain)?;
                    inputs.push(InputHash { path: p.clone(), sha256: sha256(&bytes) });
                    ingest_csv_bytes(&bytes, &schema, spec).map_err(|e| plain(prefix(e, p)))?
                }
                Source::Inline(atoms) => {
                    let doc = TableDoc { list: spec.list.clone(), atoms: atoms.clone() };
                    let t = DataTable::from_doc(&schema, &doc).map_err(|e| plain(prefix(e, &spec.name)))?;
                    finish_table(t, &schema, spec).map_err(plain)?
                }
            };
            tables.push((spec.name.clone(), t));
        }
        Ok(Project { config, schema, tables, inputs })
    }

    pub fn table(&self, name: &str) -> Result<&DataTable> {
        self.tables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::Config(format!("no table named {name:?}")))
    }

    /// The unique table on `list`.
    pub fn table_on(&self, list: &AttributeList) -> Result<&DataTable> {
        let mut it = self.tables.iter().filter(|(_, t)| t.list() == list);
        match (it.next(), it.next()) {
            (Some((_, t)), None) => Ok(t),
            (None, _) => Err(Error::MissingFace(format!("no table on {list}"))),
            (Some((a, _)), Some((b, _))) => Err(Error::Config(format!("tables {a:?} and {b:?} both sit on {list}"))),
        }
    }
}

fn prefix(e: Error, what: &str) -> Error {
    match e {
        Error::Ingest(m) => Error::Ingest(format!("{what}: {m}")),
        Error::Schema(m) => Error::Ingest(format!("{what}: {m}")),
        other => other,
    }
}

fn finish_table(t: DataTable, schema: &Schema, spec: &TableSpec) -> Result<DataTable> {
    let spaces = schema.spaces_for(t.list())?;
    let mut allowed: Vec<Option<BTreeSet<usize>>> = vec![None; t.list().len()];
    for (a, labels) in &spec.filter {
        let p = t.list().entries().iter().position(|e| e == a).expect("validated");
        allowed[p] = Some(labels.iter().filter_map(|l| spaces[p].label_index(l)).collect());
    }
    let keep = |x: &Tuple| x.iter().zip(&allowed).all(|(v, s)| s.as_ref().is_none_or(|s| s.contains(v)));
    let mut t = DataTable::new(t.list().clone(), t.atoms().iter().filter(|(x, _)| keep(x)).map(|(x, m)| (x.clone(), m.clone())))?;
    if spec.normalize {
        let m = t.total_mass();
        if m == rational::zero() {
            return Err(Error::Ingest(format!("{}: nothing left to normalize", spec.name)));
        }
        t = t.scale(&(rational::one() / m));
    }
    if let Some(p) = &spec.permute {
        t = t.permute(p)?;
    }
    Ok(t)
}

fn bin_index(edges: &[Rational], v: &Rational) -> Option<usize> {
    if v < edges.first()? {
        return None;
    }
    Some(edges.iter().rposition(|e| e <= v).expect("v is at least the first edge"))
}

/// Counting measure of a CSV file whose header equals `spec.list`.
pub fn ingest_csv(path: &Path, schema: &Schema, spec: &TableSpec) -> Result<DataTable> {
    let bytes = read(path, Error::Ingest)?;
    ingest_csv_bytes(&bytes, schema, spec)
}

pub fn ingest_csv_bytes(bytes: &[u8], schema: &Schema, spec: &TableSpec) -> Result<DataTable> {
    let list = &spec.list;
    let spaces = schema.spaces_for(list)?;
    let mut edges: Vec<Option<Vec<Rational>>> = vec![None; list.len()];
    for (a, e) in &spec.bins {
        let p = list.entries().iter().position(|x| x == a).ok_or_else(|| Error::Config(format!("bins on {a:?}")))?;
        edges[p] = Some(e.iter().map(rational::from_json).collect::<std::result::Result<_, _>>().map_err(Error::Config)?);
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).quoting(false).from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::Ingest(e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::Ingest("empty file".into()));
    }
    let names: Vec<&str> = header.iter().collect();
    if names != list.entries().iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(Error::Ingest(format!("header {names:?} does not match list {list}")));
    }
    let mut counts: BTreeMap<Tuple, Rational> = BTreeMap::new();
    let mut rows = 0usize;
    for (r, rec) in rdr.records().enumerate() {
        let line = r + 2;
        let rec = rec.map_err(|e| Error::Ingest(format!("line {line}: {e}")))?;
        let mut x = Vec::with_capacity(list.len());
        for (p, cell) in rec.iter().enumerate() {
            if cell.contains('"') {
                return Err(Error::Ingest(format!("line {line}: quoted labels are not supported")));
            }
            let label = match &edges[p] {
                None => cell.to_string(),
                Some(e) => {
                    let v = rational::parse(cell).map_err(|m| Error::Ingest(format!("line {line}: {m}")))?;
                    bin_index(e, &v)
                        .ok_or_else(|| Error::Ingest(format!("line {line}: {cell} lies below the first bin")))?
                        .to_string()
                }
            };
            let v = spaces[p].label_index(&label).ok_or_else(|| {
                Error::Ingest(format!("line {line}: label {label:?} not in space {} of {}", spaces[p].id, list.entries()[p]))
            })?;
            x.push(v);
        }
        *counts.entry(x).or_insert_with(rational::zero) += rational::one();
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Ingest("no data rows".into()));
    }
    finish_table(DataTable::new(list.clone(), counts)?, schema, spec)
}

/// Writes a counting measure back out, one row per unit of mass.
pub fn write_csv(t: &DataTable, schema: &Schema) -> Result<String> {
    let spaces = schema.spaces_for(t.list())?;
    let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::Never).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Ingest(e.to_string());
    w.write_record(t.list().entries()).map_err(io)?;
    for (x, m) in t.atoms() {
        if !m.is_integer() {
            return Err(Error::InvalidArgument(format!("mass {} is not a row count", rational::fmt(m))));
        }
        let n: u64 = m.to_integer().try_into().map_err(|_| Error::InvalidArgument("row count too large".into()))?;
        let row: Vec<&str> = x.iter().zip(&spaces).map(|(&v, s)| s.points[v].as_str()).collect();
        for _ in 0..n {
            w.write_record(&row).map_err(io)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Ingest(e.to_string()))?).map_err(|e| Error::Ingest(e.to_string()))
}
