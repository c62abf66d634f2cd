//! GKPS dependent rounding of a fractional bipartite matching.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matching::{validate_fractional_matching, BipartiteGraph, FractionalViolation, Matching};
use crate::numeric::Field;

pub use crate::instance::availabilities_after;

/// Coordinates this close to 0 or 1 are snapped after every step.
pub const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RoundingError {
    #[error("infeasible fractional matching: {0}")]
    Infeasible(#[from] FractionalViolation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Cycle,
    Path,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `M_1 += α`, `M_2 −= α`.
    RaiseFirst,
    /// `M_1 −= β`, `M_2 += β`.
    LowerFirst,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundingStep {
    pub kind: StructureKind,
    /// Edge indices in traversal order.
    pub edges: Vec<usize>,
    pub m1: Vec<usize>,
    pub m2: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub branch: Branch,
    pub after: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RoundingTranscript {
    pub steps: Vec<RoundingStep>,
}

fn snap(v: f64) -> f64 {
    if v <= SNAP_TOL {
        0.0
    } else if v >= 1.0 - SNAP_TOL {
        1.0
    } else {
        v
    }
}

fn is_fractional(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

/// Walks fractional edges from `start`, never reusing the edge just taken.
/// Stops at the first repeated node (cycle) or at a node with no other
/// fractional edge (path).
fn walk<W: Field>(
    graph: &BipartiteGraph<W>,
    adjacency: &[Vec<usize>],
    start: usize,
) -> (StructureKind, Vec<usize>, usize) {
    let n_left = graph.n_left();
    let other = |e: usize, node: usize| {
        let edge = &graph.edges()[e];
        if node < n_left {
            n_left + edge.right
        } else {
            edge.left
        }
    };
    let mut position = vec![usize::MAX; adjacency.len()];
    position[start] = 0;
    let mut edges = Vec::new();
    let mut current = start;
    let mut previous = None;
    loop {
        let Some(&e) = adjacency[current].iter().find(|&&e| Some(e) != previous) else {
            return (StructureKind::Path, edges, current);
        };
        let next = other(e, current);
        edges.push(e);
        if position[next] != usize::MAX {
            let cycle = edges.split_off(position[next]);
            return (StructureKind::Cycle, cycle, next);
        }
        position[next] = edges.len();
        current = next;
        previous = Some(e);
    }
}

/// Cycle or maximal path among fractional edges, starting from the
/// lowest-indexed node (left nodes first) that touches one.
fn find_structure<W: Field>(graph: &BipartiteGraph<W>, values: &[f64]) -> Option<(StructureKind, Vec<usize>)> {
    let n_left = graph.n_left();
    let mut adjacency = vec![Vec::new(); n_left + graph.n_right()];
    for (k, e) in graph.edges().iter().enumerate() {
        if is_fractional(values[k]) {
            adjacency[e.left].push(k);
            adjacency[n_left + e.right].push(k);
        }
    }
    let start = adjacency.iter().position(|a| !a.is_empty())?;
    match walk(graph, &adjacency, start) {
        (StructureKind::Cycle, edges, _) => Some((StructureKind::Cycle, edges)),
        // The walk may have started mid-path; restart from the stuck end, a
        // leaf, so the path found is maximal.
        (StructureKind::Path, _, end) => {
            let (kind, edges, _) = walk(graph, &adjacency, end);
            Some((kind, edges))
        }
    }
}

/// One GKPS rounding run. Every output is a matching and `Pr[e ∈ M] = x_e`.
pub fn dependent_round<W: Field, R: Rng + ?Sized>(
    graph: &BipartiteGraph<W>,
    x: &[f64],
    rng: &mut R,
    keep_transcript: bool,
) -> Result<(Matching, Option<RoundingTranscript>), RoundingError> {
    validate_fractional_matching(graph, x)?;
    let mut values: Vec<f64> = x.iter().map(|v| snap(v.clamp(0.0, 1.0))).collect();
    let mut transcript = keep_transcript.then(RoundingTranscript::default);
    while let Some((kind, edges)) = find_structure(graph, &values) {
        let m1: Vec<usize> = edges.iter().copied().step_by(2).collect();
        let m2: Vec<usize> = edges.iter().copied().skip(1).step_by(2).collect();
        // Tightest edge under each branch, so one coordinate lands exactly.
        let raise = m1
            .iter()
            .map(|&e| (1.0 - values[e], e, 1.0))
            .chain(m2.iter().map(|&e| (values[e], e, 0.0)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("structure has an edge");
        let lower = m1
            .iter()
            .map(|&e| (values[e], e, 0.0))
            .chain(m2.iter().map(|&e| (1.0 - values[e], e, 1.0)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("structure has an edge");
        let (alpha, beta) = (raise.0, lower.0);
        let branch = if rng.random_bool(beta / (alpha + beta)) {
            Branch::RaiseFirst
        } else {
            Branch::LowerFirst
        };
        let (delta, tight) = match branch {
            Branch::RaiseFirst => (alpha, raise),
            Branch::LowerFirst => (-beta, lower),
        };
        for &e in &m1 {
            values[e] = snap(values[e] + delta);
        }
        for &e in &m2 {
            values[e] = snap(values[e] - delta);
        }
        values[tight.1] = tight.2;
        if let Some(t) = transcript.as_mut() {
            t.steps.push(RoundingStep {
                kind,
                edges,
                m1,
                m2,
                alpha,
                beta,
                branch,
                after: values.clone(),
            });
        }
    }
    let chosen = graph
        .edges()
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v == 1.0)
        .map(|(e, _)| (e.left, e.right))
        .collect();
    let matching = Matching::from_edges(chosen).expect("rounding preserves node degrees");
    Ok((matching, transcript))
}

/// [`dependent_round`] driven by a generator seeded from `seed`.
pub fn dependent_round_seeded<W: Field>(
    graph: &BipartiteGraph<W>,
    x: &[f64],
    seed: u64,
    keep_transcript: bool,
) -> Result<(Matching, Option<RoundingTranscript>), RoundingError> {
    dependent_round(graph, x, &mut ChaCha8Rng::seed_from_u64(seed), keep_transcript)
}
