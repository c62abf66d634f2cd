use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{InstanceError, OfflineNode, Scenario, Stage, StageEdge, TwoStageInstance, WeightMode};
use crate::numeric::Scalar;

/// Weight grid for random instances: weights are multiples of `1/WEIGHT_GRID`.
const WEIGHT_GRID: i64 = 1000;

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

/// The unit-weight 8-cycle gap instance.
///
/// Offline nodes `i1..i4`; `a1` sees `i1, i2` and `a2` sees `i3, i4`. Each of
/// two equiprobable scenarios brings `b1, b2` whose edges close an 8-cycle
/// through all first-stage edges.
pub fn make_eight_cycle() -> TwoStageInstance {
    let edge = |online, offline| StageEdge {
        online,
        offline,
        weight: None,
    };
    let first_stage = Stage {
        nodes: ids("a", 2),
        edges: vec![edge(0, 0), edge(0, 1), edge(1, 2), edge(1, 3)],
    };
    // a1-i1-b1-i3-a2-i4-b2-i2-a1
    let cross = Stage {
        nodes: ids("b", 2),
        edges: vec![edge(0, 0), edge(0, 2), edge(1, 1), edge(1, 3)],
    };
    // a1-i2-b1-i3-a2-i4-b2-i1-a1
    let twisted = Stage {
        nodes: ids("b", 2),
        edges: vec![edge(0, 1), edge(0, 2), edge(1, 0), edge(1, 3)],
    };
    TwoStageInstance::new(
        WeightMode::Unweighted,
        ids("i", 4)
            .into_iter()
            .map(|id| OfflineNode { id, weight: None })
            .collect(),
        first_stage,
        vec![
            Scenario {
                probability: Scalar::frac(1, 2),
                stage: cross,
            },
            Scenario {
                probability: Scalar::frac(1, 2),
                stage: twisted,
            },
        ],
    )
    .expect("eight-cycle instance is valid")
}

/// Edge-weighted gap family: `2n` offline nodes paired under `n` first-stage
/// nodes with unit edges, and one equiprobable scenario per unordered offline
/// pair whose single online node sees the pair at weight `(1 + √2)·n`.
pub fn make_edge_gap_family(n: usize) -> Result<TwoStageInstance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Parameter("edge gap family needs n >= 1".into()));
    }
    let offline_count = 2 * n;
    let first_stage = Stage {
        nodes: ids("a", n),
        edges: (0..n)
            .flat_map(|a| {
                [2 * a, 2 * a + 1].map(|i| StageEdge {
                    online: a,
                    offline: i,
                    weight: Some(Scalar::one()),
                })
            })
            .collect(),
    };
    let heavy = Scalar::Float((1.0 + std::f64::consts::SQRT_2) * n as f64);
    let pairs = (offline_count * (offline_count - 1) / 2) as i64;
    let mut scenarios = Vec::with_capacity(pairs as usize);
    for p in 0..offline_count {
        for q in p + 1..offline_count {
            let edges = [p, q]
                .into_iter()
                .map(|i| StageEdge {
                    online: 0,
                    offline: i,
                    weight: Some(heavy.clone()),
                })
                .collect();
            scenarios.push(Scenario {
                probability: Scalar::frac(1, pairs),
                stage: Stage {
                    nodes: vec!["b".into()],
                    edges,
                },
            });
        }
    }
    TwoStageInstance::new(
        WeightMode::EdgeWeighted,
        ids("i", offline_count)
            .into_iter()
            .map(|id| OfflineNode { id, weight: None })
            .collect(),
        first_stage,
        scenarios,
    )
}

/// Parameters of a seeded random instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomInstanceSpec {
    pub seed: u64,
    pub offline: usize,
    pub first_stage: usize,
    pub second_stage: usize,
    pub edge_density: f64,
    pub weight_mode: WeightMode,
    pub scenarios: usize,
}

impl RandomInstanceSpec {
    pub fn new(seed: u64, offline: usize, first_stage: usize, weight_mode: WeightMode, scenarios: usize) -> Self {
        Self {
            seed,
            offline,
            first_stage,
            second_stage: first_stage,
            edge_density: 0.5,
            weight_mode,
            scenarios,
        }
    }
}

fn grid_weight(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::frac(rng.random_range(0..=WEIGHT_GRID), WEIGHT_GRID)
}

/// Seeded random instance. Each stage edge is present independently with
/// probability `edge_density`; scenarios are equiprobable; weights are uniform
/// on the grid `{0, 1/1000, ..., 1}`.
pub fn make_random_instance(spec: &RandomInstanceSpec) -> Result<TwoStageInstance, InstanceError> {
    if spec.offline == 0 || spec.first_stage == 0 || spec.second_stage == 0 {
        return Err(InstanceError::Parameter("node counts must be positive".into()));
    }
    if !(spec.edge_density > 0.0 && spec.edge_density <= 1.0) {
        return Err(InstanceError::Parameter(format!(
            "edge density {} outside (0, 1]",
            spec.edge_density
        )));
    }
    if spec.scenarios == 0 {
        return Err(InstanceError::Parameter("need at least one scenario".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edge_weighted = spec.weight_mode == WeightMode::EdgeWeighted;
    let offline = ids("i", spec.offline)
        .into_iter()
        .map(|id| OfflineNode {
            id,
            weight: (spec.weight_mode == WeightMode::VertexWeighted).then(|| grid_weight(&mut rng)),
        })
        .collect();
    let stage = |rng: &mut ChaCha8Rng, prefix: &str, online: usize| {
        let mut edges = Vec::new();
        for a in 0..online {
            for i in 0..spec.offline {
                if spec.edge_density >= 1.0 || rng.random_bool(spec.edge_density) {
                    let weight = edge_weighted.then(|| grid_weight(rng));
                    edges.push(StageEdge {
                        online: a,
                        offline: i,
                        weight,
                    });
                }
            }
        }
        Stage {
            nodes: ids(prefix, online),
            edges,
        }
    };
    let first_stage = stage(&mut rng, "a", spec.first_stage);
    let scenarios = (0..spec.scenarios)
        .map(|_| Scenario {
            probability: Scalar::frac(1, spec.scenarios as i64),
            stage: stage(&mut rng, "b", spec.second_stage),
        })
        .collect();
    TwoStageInstance::new(spec.weight_mode, offline, first_stage, scenarios)
}
