//! JSON interchange format.
//!
//! Numbers written as plain JSON numbers are read as exact decimals; `*_frac`
//! keys carry exact fractions and `*_float` keys mark inexact values (for
//! example irrational weights), which route the instance to the float solver.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{InstanceError, OfflineNode, Scenario, Stage, StageEdge, TwoStageInstance, WeightMode};
use crate::numeric::{ratio, Scalar};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    format_version: u32,
    weight_mode: WeightMode,
    offline_nodes: Vec<RawNode>,
    first_stage: RawStage,
    scenarios: Vec<RawScenario>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_frac: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_float: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_frac: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight_float: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStage {
    nodes: Vec<String>,
    edges: Vec<RawEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probability: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probability_frac: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probability_float: Option<f64>,
    nodes: Vec<String>,
    edges: Vec<RawEdge>,
}

fn field_error(context: &str, message: impl Into<String>) -> InstanceError {
    InstanceError::Field {
        context: context.into(),
        message: message.into(),
    }
}

/// Reads one of `key`, `key_frac`, `key_float`; at most one may be present.
fn decode_scalar(
    context: &str,
    key: &str,
    decimal: Option<f64>,
    frac: Option<[i64; 2]>,
    float: Option<f64>,
) -> Result<Option<Scalar>, InstanceError> {
    let present = decimal.is_some() as u8 + frac.is_some() as u8 + float.is_some() as u8;
    if present > 1 {
        return Err(field_error(
            context,
            format!("give at most one of `{key}`, `{key}_frac`, `{key}_float`"),
        ));
    }
    if let Some(v) = decimal {
        return Scalar::from_decimal_f64(v)
            .map(Some)
            .ok_or_else(|| field_error(context, format!("`{key}` is not a finite number")));
    }
    if let Some([n, d]) = frac {
        if d == 0 {
            return Err(field_error(context, format!("`{key}_frac` has zero denominator")));
        }
        return Ok(Some(Scalar::Exact(ratio(n, d))));
    }
    if let Some(v) = float {
        if !v.is_finite() {
            return Err(field_error(context, format!("`{key}_float` is not a finite number")));
        }
        return Ok(Some(Scalar::Float(v)));
    }
    Ok(None)
}

type Encoded = (Option<f64>, Option<[i64; 2]>, Option<f64>);

fn encode_scalar(context: &str, value: &Scalar) -> Result<Encoded, InstanceError> {
    if let Scalar::Float(v) = value {
        return Ok((None, None, Some(*v)));
    }
    if let Some(v) = value.decimal_f64() {
        return Ok((Some(v), None, None));
    }
    let (n, d) = value
        .as_i64_fraction()
        .ok_or_else(|| field_error(context, format!("fraction {value} does not fit in 64-bit integers")))?;
    Ok((None, Some([n, d]), None))
}

fn decode_stage(
    name: &str,
    nodes: Vec<String>,
    edges: Vec<RawEdge>,
    offline: &HashMap<&str, usize>,
) -> Result<Stage, InstanceError> {
    let online: HashMap<&str, usize> = nodes.iter().enumerate().map(|(k, id)| (id.as_str(), k)).collect();
    let mut decoded = Vec::with_capacity(edges.len());
    for (idx, e) in edges.into_iter().enumerate() {
        let unknown = |node: &str| InstanceError::UnknownNode {
            stage: name.into(),
            edge: idx,
            from: e.from.clone(),
            to: e.to.clone(),
            node: node.into(),
        };
        let a = *online.get(e.from.as_str()).ok_or_else(|| unknown(&e.from))?;
        let i = *offline.get(e.to.as_str()).ok_or_else(|| unknown(&e.to))?;
        let context = format!("{name}: edge #{idx} ({} -> {})", e.from, e.to);
        let weight = decode_scalar(&context, "weight", e.weight, e.weight_frac, e.weight_float)?;
        decoded.push(StageEdge {
            online: a,
            offline: i,
            weight,
        });
    }
    Ok(Stage { nodes, edges: decoded })
}

fn encode_stage(name: &str, stage: &Stage, offline: &[OfflineNode]) -> Result<RawStage, InstanceError> {
    let edges = stage
        .edges
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let from = stage.nodes[e.online].clone();
            let to = offline[e.offline].id.clone();
            let (weight, weight_frac, weight_float) = match &e.weight {
                Some(w) => encode_scalar(&format!("{name}: edge #{idx} ({from} -> {to})"), w)?,
                None => (None, None, None),
            };
            Ok(RawEdge {
                from,
                to,
                weight,
                weight_frac,
                weight_float,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    Ok(RawStage {
        nodes: stage.nodes.clone(),
        edges,
    })
}

/// Parses and validates an instance from JSON text.
pub fn instance_from_json(text: &str) -> Result<TwoStageInstance, InstanceError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.format_version != FORMAT_VERSION {
        return Err(InstanceError::Version(raw.format_version));
    }
    let mut offline = Vec::with_capacity(raw.offline_nodes.len());
    for node in raw.offline_nodes {
        let context = format!("offline node `{}`", node.id);
        let weight = decode_scalar(&context, "weight", node.weight, node.weight_frac, node.weight_float)?;
        offline.push(OfflineNode { id: node.id, weight });
    }
    let index: HashMap<&str, usize> = offline.iter().enumerate().map(|(k, n)| (n.id.as_str(), k)).collect();
    let first_stage = decode_stage("first_stage", raw.first_stage.nodes, raw.first_stage.edges, &index)?;
    let mut scenarios = Vec::with_capacity(raw.scenarios.len());
    for (theta, s) in raw.scenarios.into_iter().enumerate() {
        let name = format!("scenarios[{theta}]");
        let probability = decode_scalar(
            &name,
            "probability",
            s.probability,
            s.probability_frac,
            s.probability_float,
        )?
        .ok_or_else(|| field_error(&name, "missing `probability`"))?;
        let stage = decode_stage(&name, s.nodes, s.edges, &index)?;
        scenarios.push(Scenario { probability, stage });
    }
    TwoStageInstance::new(raw.weight_mode, offline, first_stage, scenarios)
}

/// Serializes an instance to pretty-printed JSON.
pub fn instance_to_json(instance: &TwoStageInstance) -> Result<String, InstanceError> {
    let offline_nodes = instance
        .offline_nodes()
        .iter()
        .map(|n| {
            let (weight, weight_frac, weight_float) = match &n.weight {
                Some(w) => encode_scalar(&format!("offline node `{}`", n.id), w)?,
                None => (None, None, None),
            };
            Ok(RawNode {
                id: n.id.clone(),
                weight,
                weight_frac,
                weight_float,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let scenarios = instance
        .scenarios()
        .iter()
        .enumerate()
        .map(|(theta, s)| {
            let name = format!("scenarios[{theta}]");
            let (probability, probability_frac, probability_float) = encode_scalar(&name, &s.probability)?;
            let stage = encode_stage(&name, &s.stage, instance.offline_nodes())?;
            Ok(RawScenario {
                probability,
                probability_frac,
                probability_float,
                nodes: stage.nodes,
                edges: stage.edges,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    let raw = RawInstance {
        format_version: FORMAT_VERSION,
        weight_mode: instance.weight_mode(),
        offline_nodes,
        first_stage: encode_stage("first_stage", instance.first_stage(), instance.offline_nodes())?,
        scenarios,
    };
    Ok(serde_json::to_string_pretty(&raw).expect("raw instance serializes"))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<TwoStageInstance, InstanceError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    instance_from_json(&text)
}

pub fn write_instance(instance: &TwoStageInstance, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    let path = path.as_ref();
    let mut text = instance_to_json(instance)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })
}
