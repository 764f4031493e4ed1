//! JSON file formats. Every index in a file is 1-based; unknown fields are
//! rejected. Output goes through [`to_json`], which sorts object keys so
//! identical values always serialize to identical bytes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::contraction::{ContractionStep, ContractionTrace};
use crate::equivalence::IndexPermutation;
use crate::error::{Error, Result};
use crate::model::{MarkedPartition, Point, ProximityForest, ValidationReport};
use crate::tensor::IntersectionTensor;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestFile {
    pub dimension: usize,
    pub points: Vec<PointEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub id: usize,
    pub degree: u64,
    pub proximate_to: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub dimension: usize,
    pub size: usize,
    pub entries: Vec<EntryFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    pub index: Vec<usize>,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub steps: Vec<StepFile>,
    pub index_maps: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub contracted: usize,
    pub degree: u64,
    pub proximate_to_current: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub equivalent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub ok: bool,
    pub violations: Vec<ViolationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViolationEntry {
    pub rule: String,
    pub indices: Vec<usize>,
    pub message: String,
}

fn from_one_based(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::Parse(format!("{what}: indices are 1-based, got 0")))
}

impl ForestFile {
    /// Ids must run 1..m in order. Other rule breaches (late targets,
    /// too many targets, zero degrees) are kept for [`crate::model::validate_forest`].
    pub fn into_forest(self) -> Result<ProximityForest> {
        let mut points = Vec::with_capacity(self.points.len());
        for (pos, p) in self.points.into_iter().enumerate() {
            if p.id != pos + 1 {
                return Err(Error::Parse(format!(
                    "point ids must be 1..m in order: position {} has id {}",
                    pos + 1,
                    p.id
                )));
            }
            let mut targets = Vec::with_capacity(p.proximate_to.len());
            for j in p.proximate_to {
                targets.push(from_one_based(j, "proximate_to")?);
            }
            let count = targets.len();
            let point = Point::new(p.degree, targets);
            if point.proximate_to.len() != count {
                return Err(Error::Parse(format!("point {} lists a target twice", p.id)));
            }
            points.push(point);
        }
        Ok(ProximityForest::new(self.dimension, points))
    }

    pub fn from_forest(forest: &ProximityForest) -> Self {
        ForestFile {
            dimension: forest.dimension(),
            points: forest
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| PointEntry {
                    id: i + 1,
                    degree: p.degree,
                    proximate_to: p.proximate_to.iter().map(|j| j + 1).collect(),
                })
                .collect(),
        }
    }
}

impl PartitionFile {
    pub fn into_partition(self, size: usize) -> Result<MarkedPartition> {
        let blocks = self
            .blocks
            .into_iter()
            .map(|b| b.into_iter().map(|i| from_one_based(i, "blocks")).collect())
            .collect::<Result<Vec<Vec<usize>>>>()?;
        MarkedPartition::new(size, blocks)
    }

    pub fn from_partition(p: &MarkedPartition) -> Self {
        PartitionFile {
            blocks: p
                .blocks()
                .iter()
                .map(|b| b.iter().map(|i| i + 1).collect())
                .collect(),
        }
    }
}

impl TensorFile {
    pub fn into_tensor(self) -> Result<IntersectionTensor> {
        if self.dimension < 2 {
            return Err(Error::Parse(format!("dimension must be at least 2, got {}", self.dimension)));
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in self.entries {
            if e.index.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Parse(format!("index {:?} is not nondecreasing", e.index)));
            }
            let index = e
                .index
                .into_iter()
                .map(|i| from_one_based(i, "index"))
                .collect::<Result<Vec<_>>>()?;
            entries.push((index, e.value));
        }
        IntersectionTensor::from_entries(self.dimension, self.size, entries)
    }

    pub fn from_tensor(t: &IntersectionTensor) -> Self {
        TensorFile {
            dimension: t.dimension(),
            size: t.size(),
            entries: t
                .entries()
                .map(|(k, v)| EntryFile {
                    index: k.as_slice().iter().map(|i| i + 1).collect(),
                    value: v,
                })
                .collect(),
        }
    }
}

impl TraceFile {
    pub fn from_trace(trace: &ContractionTrace) -> Self {
        TraceFile {
            steps: trace.steps.iter().map(StepFile::from_step).collect(),
            index_maps: trace
                .index_maps
                .iter()
                .map(|m| m.iter().map(|c| c.map(|c| c + 1)).collect())
                .collect(),
        }
    }

    pub fn into_trace(self) -> Result<ContractionTrace> {
        if self.steps.len() != self.index_maps.len() {
            return Err(Error::Parse("one index map per step expected".into()));
        }
        let mut steps = Vec::with_capacity(self.steps.len());
        for (t, s) in self.steps.into_iter().enumerate() {
            let contracted = from_one_based(s.contracted, "contracted")?;
            let size = self.index_maps[t].iter().flatten().count();
            steps.push(ContractionStep {
                contracted,
                degree: s.degree,
                proximate_to_current: s
                    .proximate_to_current
                    .into_iter()
                    .map(|j| from_one_based(j, "proximate_to_current"))
                    .collect::<Result<_>>()?,
                kept: (0..size).filter(|&j| j != contracted).collect(),
            });
        }
        let index_maps = self
            .index_maps
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|c| c.map(|c| from_one_based(c, "index_maps")).transpose())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ContractionTrace { steps, index_maps })
    }
}

impl StepFile {
    fn from_step(s: &ContractionStep) -> Self {
        StepFile {
            contracted: s.contracted + 1,
            degree: s.degree,
            proximate_to_current: s.proximate_to_current.iter().map(|j| j + 1).collect(),
        }
    }
}

impl WitnessFile {
    pub fn from_result(found: Option<&IndexPermutation>) -> Self {
        WitnessFile {
            equivalent: found.is_some(),
            permutation: found.map(|p| p.as_slice().iter().map(|i| i + 1).collect()),
        }
    }
}

impl ReportFile {
    pub fn from_report(report: &ValidationReport) -> Self {
        ReportFile {
            ok: report.ok,
            violations: report
                .violations
                .iter()
                .map(|v| ViolationEntry {
                    rule: v.rule.clone(),
                    indices: v.indices.iter().map(|i| i + 1).collect(),
                    message: v.message.clone(),
                })
                .collect(),
        }
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_forest(text: &str) -> Result<ProximityForest> {
    parse::<ForestFile>(text)?.into_forest()
}

pub fn parse_tensor(text: &str) -> Result<IntersectionTensor> {
    parse::<TensorFile>(text)?.into_tensor()
}

pub fn parse_partition(text: &str, size: usize) -> Result<MarkedPartition> {
    parse::<PartitionFile>(text)?.into_partition(size)
}

pub fn forest_to_json(forest: &ProximityForest) -> String {
    to_json(&ForestFile::from_forest(forest))
}

pub fn tensor_to_json(t: &IntersectionTensor) -> String {
    to_json(&TensorFile::from_tensor(t))
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("file types serialize");
    let mut out = serde_json::to_string_pretty(&sort_keys(value)).expect("values serialize");
    out.push('\n');
    out
}

pub fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}
