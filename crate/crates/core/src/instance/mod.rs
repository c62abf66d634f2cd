//! Two-stage instances: offline nodes, a first-stage graph and an explicit
//! finite distribution over second-stage graphs.

mod generators;
mod io;

pub use generators::{make_edge_gap_family, make_eight_cycle, make_random_instance, RandomInstanceSpec};
pub use io::{instance_from_json, instance_to_json, read_instance, write_instance, FORMAT_VERSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::{AvailabilityVector, BipartiteGraph, GraphEdge, Matching};
use crate::numeric::{Field, Scalar};

/// Scenario probabilities must sum to one within this tolerance.
pub const PROBABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("scenario block `scenarios`: probabilities sum to {sum}, expected 1")]
    ProbabilitySum { sum: f64 },
    #[error("scenario block `scenarios[{scenario}]`: probability {value} outside [0, 1]")]
    ProbabilityRange { scenario: usize, value: f64 },
    #[error("instance needs at least one scenario")]
    NoScenarios,
    #[error("{stage}: edge #{edge} ({from} -> {to}) references undeclared node `{node}`")]
    UnknownNode {
        stage: String,
        edge: usize,
        from: String,
        to: String,
        node: String,
    },
    #[error("{stage}: duplicate edge #{edge} ({from} -> {to})")]
    DuplicateEdge {
        stage: String,
        edge: usize,
        from: String,
        to: String,
    },
    #[error("{stage}: duplicate node id `{id}`")]
    DuplicateNode { stage: String, id: String },
    #[error("{context}: {message}")]
    WeightMismatch { context: String, message: String },
    #[error("{context}: {message}")]
    Field { context: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Unweighted,
    VertexWeighted,
    EdgeWeighted,
}

impl WeightMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightMode::Unweighted => "unweighted",
            WeightMode::VertexWeighted => "vertex_weighted",
            WeightMode::EdgeWeighted => "edge_weighted",
        }
    }
}

impl std::str::FromStr for WeightMode {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unweighted" => Ok(WeightMode::Unweighted),
            "vertex" | "vertex_weighted" | "vertex-weighted" => Ok(WeightMode::VertexWeighted),
            "edge" | "edge_weighted" | "edge-weighted" => Ok(WeightMode::EdgeWeighted),
            other => Err(InstanceError::Parameter(format!("unknown weight mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OfflineNode {
    pub id: String,
    pub weight: Option<Scalar>,
}

/// Edge between an online node (index into the stage's nodes) and an offline
/// node (index into the instance's offline nodes).
#[derive(Clone, Debug, PartialEq)]
pub struct StageEdge {
    pub online: usize,
    pub offline: usize,
    pub weight: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Stage {
    pub nodes: Vec<String>,
    pub edges: Vec<StageEdge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub probability: Scalar,
    pub stage: Stage,
}

/// Immutable, validated two-stage instance.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStageInstance {
    weight_mode: WeightMode,
    offline: Vec<OfflineNode>,
    first_stage: Stage,
    scenarios: Vec<Scenario>,
}

impl TwoStageInstance {
    pub fn new(
        weight_mode: WeightMode,
        offline: Vec<OfflineNode>,
        first_stage: Stage,
        scenarios: Vec<Scenario>,
    ) -> Result<Self, InstanceError> {
        let instance = Self {
            weight_mode,
            offline,
            first_stage,
            scenarios,
        };
        instance.validate()?;
        Ok(instance)
    }

    fn validate(&self) -> Result<(), InstanceError> {
        let mut ids = std::collections::HashSet::new();
        for node in &self.offline {
            if !ids.insert(node.id.as_str()) {
                return Err(InstanceError::DuplicateNode {
                    stage: "offline_nodes".into(),
                    id: node.id.clone(),
                });
            }
            match (self.weight_mode, &node.weight) {
                (WeightMode::VertexWeighted, None) => {
                    return Err(InstanceError::WeightMismatch {
                        context: format!("offline node `{}`", node.id),
                        message: "vertex_weighted mode requires a weight on every offline node".into(),
                    })
                }
                (WeightMode::VertexWeighted, Some(w)) if w.is_negative() => {
                    return Err(InstanceError::WeightMismatch {
                        context: format!("offline node `{}`", node.id),
                        message: "weights must be non-negative".into(),
                    })
                }
                (WeightMode::EdgeWeighted, Some(_)) => {
                    return Err(InstanceError::WeightMismatch {
                        context: format!("offline node `{}`", node.id),
                        message: "edge_weighted mode does not take vertex weights".into(),
                    })
                }
                (WeightMode::Unweighted, Some(w)) if w.to_f64() != 1.0 => {
                    return Err(InstanceError::WeightMismatch {
                        context: format!("offline node `{}`", node.id),
                        message: "unweighted mode requires every weight to be 1".into(),
                    })
                }
                _ => {}
            }
        }
        self.validate_stage("first_stage", &self.first_stage)?;
        if self.scenarios.is_empty() {
            return Err(InstanceError::NoScenarios);
        }
        let mut total = 0.0;
        for (idx, scenario) in self.scenarios.iter().enumerate() {
            let p = scenario.probability.to_f64();
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(InstanceError::ProbabilityRange {
                    scenario: idx,
                    value: p,
                });
            }
            total += p;
            self.validate_stage(&format!("scenarios[{idx}]"), &scenario.stage)?;
        }
        let exact_sum = self
            .scenarios
            .iter()
            .try_fold(Scalar::zero(), |acc, s| match &s.probability {
                Scalar::Exact(_) => Some(&acc + &s.probability),
                Scalar::Float(_) => None,
            });
        let off = match exact_sum {
            Some(sum) => sum != Scalar::one(),
            None => (total - 1.0).abs() > PROBABILITY_TOL,
        };
        if off {
            return Err(InstanceError::ProbabilitySum { sum: total });
        }
        Ok(())
    }

    fn validate_stage(&self, name: &str, stage: &Stage) -> Result<(), InstanceError> {
        let mut ids = std::collections::HashSet::new();
        for id in &stage.nodes {
            if !ids.insert(id.as_str()) {
                return Err(InstanceError::DuplicateNode {
                    stage: name.into(),
                    id: id.clone(),
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (idx, e) in stage.edges.iter().enumerate() {
            let from = stage
                .nodes
                .get(e.online)
                .cloned()
                .unwrap_or_else(|| format!("#{}", e.online));
            let to = self
                .offline
                .get(e.offline)
                .map(|n| n.id.clone())
                .unwrap_or_else(|| format!("#{}", e.offline));
            if e.online >= stage.nodes.len() || e.offline >= self.offline.len() {
                let node = if e.online >= stage.nodes.len() {
                    from.clone()
                } else {
                    to.clone()
                };
                return Err(InstanceError::UnknownNode {
                    stage: name.into(),
                    edge: idx,
                    from,
                    to,
                    node,
                });
            }
            if !seen.insert((e.online, e.offline)) {
                return Err(InstanceError::DuplicateEdge {
                    stage: name.into(),
                    edge: idx,
                    from,
                    to,
                });
            }
            let context = format!("{name}: edge #{idx} ({from} -> {to})");
            match (self.weight_mode, &e.weight) {
                (WeightMode::EdgeWeighted, None) => {
                    return Err(InstanceError::WeightMismatch {
                        context,
                        message: "edge_weighted mode requires a weight on every edge".into(),
                    })
                }
                (WeightMode::EdgeWeighted, Some(w)) if w.is_negative() => {
                    return Err(InstanceError::WeightMismatch {
                        context,
                        message: "weights must be non-negative".into(),
                    })
                }
                (WeightMode::VertexWeighted, Some(_)) => {
                    return Err(InstanceError::WeightMismatch {
                        context,
                        message: "vertex_weighted mode does not take edge weights".into(),
                    })
                }
                (WeightMode::Unweighted, Some(w)) if w.to_f64() != 1.0 => {
                    return Err(InstanceError::WeightMismatch {
                        context,
                        message: "unweighted mode requires every weight to be 1".into(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.weight_mode
    }

    pub fn offline_nodes(&self) -> &[OfflineNode] {
        &self.offline
    }

    pub fn num_offline(&self) -> usize {
        self.offline.len()
    }

    pub fn first_stage(&self) -> &Stage {
        &self.first_stage
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn scenario(&self, theta: usize) -> Option<&Scenario> {
        self.scenarios.get(theta)
    }

    pub fn probabilities_f64(&self) -> Vec<f64> {
        self.scenarios.iter().map(|s| s.probability.to_f64()).collect()
    }

    /// The effective weight w̃ of an edge under the instance's weight mode.
    pub fn edge_weight(&self, edge: &StageEdge) -> Scalar {
        match self.weight_mode {
            WeightMode::Unweighted => Scalar::one(),
            WeightMode::VertexWeighted => self.offline[edge.offline].weight.clone().unwrap_or_else(Scalar::one),
            WeightMode::EdgeWeighted => edge.weight.clone().unwrap_or_else(Scalar::one),
        }
    }

    /// True when every probability and effective weight is an exact rational.
    pub fn is_exact(&self) -> bool {
        let stage_exact = |s: &Stage| s.edges.iter().all(|e| self.edge_weight(e).is_exact());
        self.scenarios
            .iter()
            .all(|s| s.probability.is_exact() && stage_exact(&s.stage))
            && stage_exact(&self.first_stage)
    }

    /// Stage graph with online nodes on the left and offline nodes on the
    /// right. `None` when `W` is exact and some weight is not.
    pub fn stage_graph<W: Field>(&self, stage: &Stage) -> Option<BipartiteGraph<W>> {
        self.stage_graph_with(stage, W::from_scalar)
    }

    /// [`Self::stage_graph`] with a custom conversion of effective weights.
    pub fn stage_graph_with<W: Field>(
        &self,
        stage: &Stage,
        convert: impl Fn(&Scalar) -> Option<W>,
    ) -> Option<BipartiteGraph<W>> {
        let edges = stage
            .edges
            .iter()
            .map(|e| {
                Some(GraphEdge {
                    left: e.online,
                    right: e.offline,
                    weight: convert(&self.edge_weight(e))?,
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(BipartiteGraph::new(stage.nodes.len(), self.offline.len(), edges).expect("validated instance"))
    }

    pub fn first_stage_graph<W: Field>(&self) -> Option<BipartiteGraph<W>> {
        self.stage_graph(&self.first_stage)
    }

    pub fn scenario_graph<W: Field>(&self, theta: usize) -> Option<BipartiteGraph<W>> {
        self.stage_graph(&self.scenarios.get(theta)?.stage)
    }

    /// Same nodes and scenario graphs under a new distribution: each entry is
    /// `(scenario index, probability)`; listed scenarios may repeat a graph.
    pub fn with_distribution(&self, support: &[(usize, Scalar)]) -> Result<Self, InstanceError> {
        let scenarios = support
            .iter()
            .map(|(theta, p)| {
                let base = self
                    .scenarios
                    .get(*theta)
                    .ok_or_else(|| InstanceError::Parameter(format!("unknown scenario {theta}")))?;
                Ok(Scenario {
                    probability: p.clone(),
                    stage: base.stage.clone(),
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;
        Self::new(
            self.weight_mode,
            self.offline.clone(),
            self.first_stage.clone(),
            scenarios,
        )
    }

    /// Same instance with every weight replaced by 1 (or dropped), in the given mode.
    pub fn with_weight_mode_unweighted(&self) -> Self {
        let strip = |s: &Stage| Stage {
            nodes: s.nodes.clone(),
            edges: s
                .edges
                .iter()
                .map(|e| StageEdge {
                    weight: None,
                    ..e.clone()
                })
                .collect(),
        };
        Self {
            weight_mode: WeightMode::Unweighted,
            offline: self
                .offline
                .iter()
                .map(|n| OfflineNode {
                    id: n.id.clone(),
                    weight: None,
                })
                .collect(),
            first_stage: strip(&self.first_stage),
            scenarios: self
                .scenarios
                .iter()
                .map(|s| Scenario {
                    probability: s.probability.clone(),
                    stage: strip(&s.stage),
                })
                .collect(),
        }
    }
}

/// Offline nodes left unmatched by a first-stage matching.
pub fn availabilities_after(instance: &TwoStageInstance, first_stage: &Matching) -> AvailabilityVector {
    let mut available = vec![true; instance.num_offline()];
    for &(_, offline) in first_stage.edges() {
        available[offline] = false;
    }
    AvailabilityVector(available)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(
        mode: WeightMode,
        node_weight: Option<Scalar>,
        edge_weight: Option<Scalar>,
    ) -> Result<TwoStageInstance, InstanceError> {
        TwoStageInstance::new(
            mode,
            vec![OfflineNode {
                id: "i".into(),
                weight: node_weight,
            }],
            Stage {
                nodes: vec!["a".into()],
                edges: vec![StageEdge {
                    online: 0,
                    offline: 0,
                    weight: edge_weight,
                }],
            },
            vec![Scenario {
                probability: Scalar::one(),
                stage: Stage::default(),
            }],
        )
    }

    #[test]
    fn weight_fields_follow_mode() {
        assert!(tiny(WeightMode::Unweighted, None, None).is_ok());
        assert!(tiny(WeightMode::Unweighted, None, Some(Scalar::int(2))).is_err());
        assert!(tiny(WeightMode::VertexWeighted, None, None).is_err());
        assert!(tiny(WeightMode::VertexWeighted, Some(Scalar::int(2)), None).is_ok());
        assert!(tiny(WeightMode::EdgeWeighted, None, None).is_err());
        assert!(tiny(WeightMode::EdgeWeighted, None, Some(Scalar::Float(0.5))).is_ok());
        assert!(tiny(WeightMode::EdgeWeighted, None, Some(Scalar::int(-1))).is_err());
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let err = TwoStageInstance::new(
            WeightMode::Unweighted,
            vec![],
            Stage::default(),
            vec![Scenario {
                probability: Scalar::frac(9, 10),
                stage: Stage::default(),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, InstanceError::ProbabilitySum { .. }));
        assert!(err.to_string().contains("scenarios"));
        let ok = TwoStageInstance::new(
            WeightMode::Unweighted,
            vec![],
            Stage::default(),
            vec![
                Scenario {
                    probability: Scalar::frac(1, 3),
                    stage: Stage::default(),
                },
                Scenario {
                    probability: Scalar::frac(2, 3),
                    stage: Stage::default(),
                },
            ],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn edges_must_reference_declared_nodes() {
        let err = TwoStageInstance::new(
            WeightMode::Unweighted,
            vec![OfflineNode {
                id: "i".into(),
                weight: None,
            }],
            Stage {
                nodes: vec!["a".into()],
                edges: vec![StageEdge {
                    online: 0,
                    offline: 3,
                    weight: None,
                }],
            },
            vec![Scenario {
                probability: Scalar::one(),
                stage: Stage::default(),
            }],
        )
        .unwrap_err();
        assert!(matches!(err, InstanceError::UnknownNode { edge: 0, .. }));
    }

    #[test]
    fn availability_after_matching() {
        let inst = make_eight_cycle();
        assert_eq!(
            availabilities_after(&inst, &Matching::empty()),
            AvailabilityVector::all(4, true)
        );
        let m = Matching::from_edges(vec![(0, 0), (1, 2)]).unwrap();
        assert_eq!(availabilities_after(&inst, &m).0, vec![false, true, false, true]);
    }
}
