//! Attributes, finite metric value spaces and the L∞ product metric.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::simpattr::AttributeList;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq)]
pub struct ValueSpace {
    pub id: String,
    pub points: Vec<String>,
    pub metric: Vec<Vec<Rational>>,
    index: BTreeMap<String, usize>,
}

impl ValueSpace {
    pub fn new(id: impl Into<String>, points: Vec<String>, metric: Vec<Vec<Rational>>) -> Self {
        let mut index = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            index.entry(p.clone()).or_insert(i);
        }
        ValueSpace { id: id.into(), points, metric, index }
    }

    /// Points `"0".."k-1"` with the discrete metric scaled by `unit`.
    pub fn discrete(id: impl Into<String>, k: usize, unit: Rational) -> Self {
        let points = (0..k).map(|i| i.to_string()).collect();
        let metric = (0..k)
            .map(|i| (0..k).map(|j| if i == j { Rational::zero() } else { unit.clone() }).collect())
            .collect();
        Self::new(id, points, metric)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.metric[i][j]
    }

    /// Every label reads as an integer, so numeric binning can target it.
    pub fn is_numeric_labeled(&self) -> bool {
        self.points.iter().all(|p| p.parse::<i64>().is_ok())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub space: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schema {
    pub spaces: Vec<ValueSpace>,
    pub attributes: Vec<Attribute>,
    space_index: BTreeMap<String, usize>,
    attr_index: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Violation { field: field.into(), message: message.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl Schema {
    /// Builds lookup tables without validating; see [`validate_schema`].
    pub fn new(spaces: Vec<ValueSpace>, attributes: Vec<Attribute>) -> Self {
        let mut space_index = BTreeMap::new();
        for (i, s) in spaces.iter().enumerate() {
            space_index.entry(s.id.clone()).or_insert(i);
        }
        let mut attr_index = BTreeMap::new();
        for (i, a) in attributes.iter().enumerate() {
            attr_index.entry(a.name.clone()).or_insert(i);
        }
        Schema { spaces, attributes, space_index, attr_index }
    }

    /// Builds and rejects any violation.
    pub fn validated(spaces: Vec<ValueSpace>, attributes: Vec<Attribute>) -> Result<Self> {
        let s = Self::new(spaces, attributes);
        let v = validate_schema(&s);
        if v.is_empty() {
            Ok(s)
        } else {
            Err(Error::Schema(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")))
        }
    }

    pub fn space(&self, id: &str) -> Option<&ValueSpace> {
        self.space_index.get(id).map(|&i| &self.spaces[i])
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.attr_index.contains_key(name)
    }

    pub fn attribute_space(&self, name: &str) -> Result<&ValueSpace> {
        let a = self
            .attr_index
            .get(name)
            .map(|&i| &self.attributes[i])
            .ok_or_else(|| Error::Schema(format!("undeclared attribute {name:?}")))?;
        self.space(&a.space)
            .ok_or_else(|| Error::Schema(format!("attribute {name:?} refers to unknown space {:?}", a.space)))
    }

    pub fn spaces_for(&self, list: &AttributeList) -> Result<Vec<&ValueSpace>> {
        list.entries().iter().map(|a| self.attribute_space(a)).collect()
    }

    pub fn check_list(&self, list: &AttributeList) -> Result<()> {
        self.spaces_for(list).map(|_| ())
    }

    pub fn product_metric(&self, list: &AttributeList) -> Result<ProductMetric<'_>> {
        Ok(ProductMetric { spaces: self.spaces_for(list)? })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SchemaDoc = serde_json::from_str(text).map_err(|e| Error::Schema(format!("parse error: {e}")))?;
        doc.into_schema()
    }

    pub fn to_doc(&self) -> SchemaDoc {
        SchemaDoc {
            spaces: self
                .spaces
                .iter()
                .map(|s| SpaceDoc {
                    id: s.id.clone(),
                    points: s.points.clone(),
                    metric: s
                        .metric
                        .iter()
                        .map(|r| r.iter().map(|x| serde_json::Value::String(rational::fmt(x))).collect())
                        .collect(),
                })
                .collect(),
            attributes: self.attributes.clone(),
        }
    }
}

/// The L∞ metric on the product of a list's value spaces, on index tuples.
pub struct ProductMetric<'a> {
    spaces: Vec<&'a ValueSpace>,
}

impl<'a> ProductMetric<'a> {
    pub fn dist(&self, x: &[usize], y: &[usize]) -> Rational {
        self.spaces
            .iter()
            .zip(x.iter().zip(y))
            .map(|(s, (&i, &j))| s.dist(i, j))
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn spaces(&self) -> &[&'a ValueSpace] {
        &self.spaces
    }
}

/// `max_i ρ_{a_i}(x_i, y_i)` for label tuples; 0 on the empty list.
pub fn product_distance(schema: &Schema, list: &AttributeList, x: &[&str], y: &[&str]) -> Result<Rational> {
    let spaces = schema.spaces_for(list)?;
    if x.len() != list.len() || y.len() != list.len() {
        return Err(Error::ListMismatch(format!("tuple length differs from {list}")));
    }
    let mut best = Rational::zero();
    for (s, (a, b)) in spaces.iter().zip(x.iter().zip(y)) {
        let i = s.label_index(a).ok_or_else(|| Error::Schema(format!("label {a:?} not in space {}", s.id)))?;
        let j = s.label_index(b).ok_or_else(|| Error::Schema(format!("label {b:?} not in space {}", s.id)))?;
        if s.dist(i, j) > &best {
            best = s.dist(i, j).clone();
        }
    }
    Ok(best)
}

pub fn validate_schema(schema: &Schema) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for (si, s) in schema.spaces.iter().enumerate() {
        let f = format!("spaces[{si}]");
        if !ids.insert(&s.id) {
            out.push(Violation::new(format!("{f}.id"), format!("duplicate space id {:?}", s.id)));
        }
        if s.points.is_empty() {
            out.push(Violation::new(format!("{f}.points"), "value space has no points"));
        }
        let mut seen = BTreeSet::new();
        for (pi, p) in s.points.iter().enumerate() {
            if !seen.insert(p) {
                out.push(Violation::new(format!("{f}.points[{pi}]"), format!("duplicate point {p:?}")));
            }
        }
        let n = s.points.len();
        if s.metric.len() != n || s.metric.iter().any(|r| r.len() != n) {
            out.push(Violation::new(format!("{f}.metric"), format!("metric is not {n}x{n}")));
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let m = &s.metric[i][j];
                let cell = format!("{f}.metric[{i}][{j}]");
                if m.is_negative() {
                    out.push(Violation::new(cell, "negative distance"));
                } else if i == j && !m.is_zero() {
                    out.push(Violation::new(cell, "nonzero self-distance"));
                } else if i < j && m != &s.metric[j][i] {
                    out.push(Violation::new(cell, "metric not symmetric"));
                } else if i < j && m.is_zero() {
                    out.push(Violation::new(cell, "zero distance between distinct points"));
                }
            }
        }
    }
    if schema.attributes.is_empty() {
        out.push(Violation::new("attributes", "no attributes declared"));
    }
    let mut names = BTreeSet::new();
    for (ai, a) in schema.attributes.iter().enumerate() {
        if !names.insert(&a.name) {
            out.push(Violation::new(format!("attributes[{ai}].name"), format!("duplicate attribute {:?}", a.name)));
        }
        if schema.space(&a.space).is_none() {
            out.push(Violation::new(format!("attributes[{ai}].space"), format!("unknown space {:?}", a.space)));
        }
    }
    out
}

/// Triangle-inequality failures; reported, never fatal.
pub fn metric_warnings(schema: &Schema) -> Vec<Violation> {
    let mut out = Vec::new();
    for (si, s) in schema.spaces.iter().enumerate() {
        let n = s.points.len();
        if s.metric.len() != n || s.metric.iter().any(|r| r.len() != n) {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if s.metric[i][k] > &s.metric[i][j] + &s.metric[j][k] {
                        out.push(Violation::new(
                            format!("spaces[{si}].metric[{i}][{k}]"),
                            format!("triangle inequality fails through point {j}"),
                        ));
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaDoc {
    pub spaces: Vec<SpaceDoc>,
    pub attributes: Vec<Attribute>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub id: String,
    pub points: Vec<String>,
    pub metric: Vec<Vec<serde_json::Value>>,
}

impl SchemaDoc {
    /// Converts without validating; rational parse failures name their cell.
    pub fn into_schema(self) -> Result<Schema> {
        let mut spaces = Vec::new();
        for (si, s) in self.spaces.into_iter().enumerate() {
            let mut metric = Vec::new();
            for (i, row) in s.metric.iter().enumerate() {
                let mut r = Vec::new();
                for (j, v) in row.iter().enumerate() {
                    r.push(
                        rational::from_json(v)
                            .map_err(|e| Error::Schema(format!("spaces[{si}].metric[{i}][{j}]: {e}")))?,
                    );
                }
                metric.push(r);
            }
            spaces.push(ValueSpace::new(s.id, s.points, metric));
        }
        Ok(Schema::new(spaces, self.attributes))
    }
}
