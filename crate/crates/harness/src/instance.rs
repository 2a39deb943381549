//! JSON instance documents.
//!
//! Every file holds one entity tagged by `"kind"`. Partitions are written as
//! block lists and canonicalized on load; distances are rational strings
//! `"p/q"` (a bare integer `"p"` is accepted on input).

use serde::{Deserialize, Serialize};
use thiserror::Error;
use ueq_core::{
    Carrier, ElementSet, EquivRel, FiniteTopology, MetricFamily, PseudoMetric, Rational,
    SpaceMap, TransitivePseudoMetric, UeqClass,
};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("validation error in `{field}`: {source}")]
    Validation {
        field: String,
        #[source]
        source: ueq_core::Error,
    },
    #[error("expected a `{expected}` document, found `{found}`")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
}

fn invalid(field: impl Into<String>) -> impl FnOnce(ueq_core::Error) -> InstanceError {
    let field = field.into();
    move |source| InstanceError::Validation { field, source }
}

pub type Blocks = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub carrier: usize,
    pub generators: Vec<Blocks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub source: SpaceDoc,
    pub target: SpaceDoc,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDoc {
    pub carrier: usize,
    pub dist: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub carrier: usize,
    pub metrics: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub carrier: usize,
    pub opens: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetDoc {
    pub space: SpaceDoc,
    pub elements: Vec<usize>,
}

/// A raw document as it appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceDoc {
    Space(SpaceDoc),
    Map(MapDoc),
    Metric(MetricDoc),
    Family(FamilyDoc),
    Topology(TopologyDoc),
    Subset(SubsetDoc),
}

/// A document after validation against the core types.
#[derive(Debug, Clone)]
pub enum Instance {
    Space(UeqClass),
    Map(SpaceMap),
    Metric(PseudoMetric),
    Family(MetricFamily),
    Topology(FiniteTopology),
    Subset { space: UeqClass, subset: ElementSet },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Space(_) => "space",
            Instance::Map(_) => "map",
            Instance::Metric(_) => "metric",
            Instance::Family(_) => "family",
            Instance::Topology(_) => "topology",
            Instance::Subset { .. } => "subset",
        }
    }
}

/// Parses and validates one instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    // the tagged enum buffers its input and would lose positions and paths,
    // so the tag is dispatched by hand
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let kind = match value.as_object_mut().and_then(|o| o.remove("kind")) {
        Some(serde_json::Value::String(k)) => k,
        _ => return Err(schema("kind", "missing or not a string")),
    };
    let doc = match kind.as_str() {
        "space" => InstanceDoc::Space(payload(value)?),
        "map" => InstanceDoc::Map(payload(value)?),
        "metric" => InstanceDoc::Metric(payload(value)?),
        "family" => InstanceDoc::Family(payload(value)?),
        "topology" => InstanceDoc::Topology(payload(value)?),
        "subset" => InstanceDoc::Subset(payload(value)?),
        other => return Err(schema("kind", format!("unknown kind `{other}`"))),
    };
    doc.validate()
}

fn schema(path: &str, message: impl Into<String>) -> InstanceError {
    InstanceError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn payload<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, InstanceError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })
}

impl InstanceDoc {
    pub fn validate(&self) -> Result<Instance, InstanceError> {
        Ok(match self {
            InstanceDoc::Space(s) => Instance::Space(s.to_class("")?),
            InstanceDoc::Map(m) => Instance::Map(m.to_map()?),
            InstanceDoc::Metric(m) => Instance::Metric(m.to_metric()?),
            InstanceDoc::Family(f) => Instance::Family(f.to_family()?),
            InstanceDoc::Topology(t) => Instance::Topology(t.to_topology()?),
            InstanceDoc::Subset(s) => {
                let space = s.space.to_class("space.")?;
                let subset = elements_to_set(space.carrier(), &s.elements, "elements")?;
                Instance::Subset { space, subset }
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

fn carrier(size: usize, field: &str) -> Result<Carrier, InstanceError> {
    Carrier::new(size).map_err(invalid(field))
}

fn elements_to_set(
    carrier: Carrier,
    elements: &[usize],
    field: &str,
) -> Result<ElementSet, InstanceError> {
    for (i, &x) in elements.iter().enumerate() {
        carrier.check(x).map_err(invalid(format!("{field}[{i}]")))?;
    }
    Ok(ElementSet::from_elements(carrier.size(), elements.iter().copied()))
}

impl SpaceDoc {
    pub fn from_class(class: &UeqClass) -> Self {
        SpaceDoc {
            carrier: class.carrier().size(),
            generators: class.generators().iter().map(EquivRel::blocks).collect(),
        }
    }

    /// Same carrier, with every member listed as a generator.
    pub fn members_of(class: &UeqClass) -> Self {
        SpaceDoc {
            carrier: class.carrier().size(),
            generators: class.members().iter().map(EquivRel::blocks).collect(),
        }
    }

    pub fn to_class(&self, prefix: &str) -> Result<UeqClass, InstanceError> {
        let c = carrier(self.carrier, &format!("{prefix}carrier"))?;
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, blocks)| {
                EquivRel::from_blocks(c, blocks.iter().map(|b| b.iter().copied()))
                    .map_err(invalid(format!("{prefix}generators[{i}]")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        UeqClass::generate(c, gens).map_err(invalid(format!("{prefix}generators")))
    }
}

impl MapDoc {
    pub fn from_map(map: &SpaceMap) -> Self {
        MapDoc {
            source: SpaceDoc::from_class(map.source()),
            target: SpaceDoc::from_class(map.target()),
            values: map.values().to_vec(),
        }
    }

    pub fn to_map(&self) -> Result<SpaceMap, InstanceError> {
        let source = self.source.to_class("source.")?;
        let target = self.target.to_class("target.")?;
        SpaceMap::new(source, target, self.values.clone()).map_err(invalid("values"))
    }
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str, field: &str) -> Result<Rational, InstanceError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| InstanceError::Validation {
            field: field.to_string(),
            source: ueq_core::Error::NotAPseudoMetric(format!("`{s}` is not a rational: {e}")),
        })
}

fn matrix_to_strings(m: &[Vec<Rational>]) -> Vec<Vec<String>> {
    m.iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

fn parse_matrix(
    size: usize,
    rows: &[Vec<String>],
    field: &str,
) -> Result<Vec<Vec<Rational>>, InstanceError> {
    if rows.len() != size {
        return Err(InstanceError::Validation {
            field: field.to_string(),
            source: ueq_core::Error::NotAPseudoMetric(format!(
                "expected {size} rows, found {}",
                rows.len()
            )),
        });
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| parse_rational(v, &format!("{field}[{i}][{j}]")))
                .collect()
        })
        .collect()
}

impl MetricDoc {
    pub fn from_metric(d: &PseudoMetric) -> Self {
        MetricDoc {
            carrier: d.size(),
            dist: matrix_to_strings(d.matrix()),
        }
    }

    pub fn to_metric(&self) -> Result<PseudoMetric, InstanceError> {
        carrier(self.carrier, "carrier")?;
        let m = parse_matrix(self.carrier, &self.dist, "dist")?;
        PseudoMetric::new(m).map_err(invalid("dist"))
    }
}

impl FamilyDoc {
    pub fn from_family(f: &MetricFamily) -> Self {
        FamilyDoc {
            carrier: f.carrier().size(),
            metrics: f
                .metrics()
                .iter()
                .map(|m| matrix_to_strings(m.metric().matrix()))
                .collect(),
        }
    }

    pub fn to_family(&self) -> Result<MetricFamily, InstanceError> {
        carrier(self.carrier, "carrier")?;
        let metrics = self
            .metrics
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                let field = format!("metrics[{i}]");
                let m = parse_matrix(self.carrier, rows, &field)?;
                TransitivePseudoMetric::from_matrix(m).map_err(invalid(field))
            })
            .collect::<Result<Vec<_>, _>>()?;
        MetricFamily::new(metrics).map_err(invalid("metrics"))
    }
}

impl TopologyDoc {
    pub fn from_topology(t: &FiniteTopology) -> Self {
        let mut opens: Vec<Vec<usize>> = t.opens().iter().map(ElementSet::to_vec).collect();
        opens.sort();
        TopologyDoc {
            carrier: t.carrier().size(),
            opens,
        }
    }

    pub fn to_topology(&self) -> Result<FiniteTopology, InstanceError> {
        let c = carrier(self.carrier, "carrier")?;
        let opens = self
            .opens
            .iter()
            .enumerate()
            .map(|(i, g)| elements_to_set(c, g, &format!("opens[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        FiniteTopology::from_open_sets(c, &opens).map_err(invalid("opens"))
    }
}

impl SubsetDoc {
    pub fn new(space: &UeqClass, subset: &ElementSet) -> Self {
        SubsetDoc {
            space: SpaceDoc::from_class(space),
            elements: subset.to_vec(),
        }
    }
}
