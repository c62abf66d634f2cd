//! Exact maximum-weight bipartite matching (Hungarian method with
//! potentials) and fractional-matching checks.
//!
//! Left nodes are online nodes, right nodes are offline nodes throughout the
//! crate. Weights are generic over [`Field`] so the same code runs on exact
//! rationals for the oracles and on `f64` inside Monte Carlo loops.

use serde::Serialize;
use thiserror::Error;

use crate::numeric::Field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchingError {
    #[error("edge #{edge} ({left}, {right}) references a node outside {n_left}x{n_right}")]
    NodeOutOfRange {
        edge: usize,
        left: usize,
        right: usize,
        n_left: usize,
        n_right: usize,
    },
    #[error("duplicate edge ({left}, {right})")]
    DuplicateEdge { left: usize, right: usize },
    #[error("edge ({left}, {right}) has negative weight")]
    NegativeWeight { left: usize, right: usize },
    #[error("availability vector has {got} entries, graph has {expected} right nodes")]
    AvailabilityLength { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge<W> {
    pub left: usize,
    pub right: usize,
    pub weight: W,
}

/// Bipartite graph with non-negative edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteGraph<W> {
    n_left: usize,
    n_right: usize,
    edges: Vec<GraphEdge<W>>,
}

impl<W: Field> BipartiteGraph<W> {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<GraphEdge<W>>) -> Result<Self, MatchingError> {
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (idx, e) in edges.iter().enumerate() {
            if e.left >= n_left || e.right >= n_right {
                return Err(MatchingError::NodeOutOfRange {
                    edge: idx,
                    left: e.left,
                    right: e.right,
                    n_left,
                    n_right,
                });
            }
            if !seen.insert((e.left, e.right)) {
                return Err(MatchingError::DuplicateEdge {
                    left: e.left,
                    right: e.right,
                });
            }
            if e.weight.is_neg() {
                return Err(MatchingError::NegativeWeight {
                    left: e.left,
                    right: e.right,
                });
            }
        }
        Ok(Self { n_left, n_right, edges })
    }

    /// Unit weight on every listed pair.
    pub fn unweighted(n_left: usize, n_right: usize, pairs: &[(usize, usize)]) -> Result<Self, MatchingError> {
        let edges = pairs
            .iter()
            .map(|&(left, right)| GraphEdge {
                left,
                right,
                weight: W::one(),
            })
            .collect();
        Self::new(n_left, n_right, edges)
    }

    /// Vertex-weighted graph: matching right node `v` gains `right_weights[v]`.
    pub fn with_right_weights(
        n_left: usize,
        right_weights: &[W],
        pairs: &[(usize, usize)],
    ) -> Result<Self, MatchingError> {
        let n_right = right_weights.len();
        let mut edges = Vec::with_capacity(pairs.len());
        for (idx, &(left, right)) in pairs.iter().enumerate() {
            let weight = right_weights.get(right).cloned().ok_or(MatchingError::NodeOutOfRange {
                edge: idx,
                left,
                right,
                n_left,
                n_right,
            })?;
            edges.push(GraphEdge { left, right, weight });
        }
        Self::new(n_left, n_right, edges)
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn edges(&self) -> &[GraphEdge<W>] {
        &self.edges
    }

    pub fn edge_index(&self, left: usize, right: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.left == left && e.right == right)
    }

    /// Subgraph induced by the given node masks; edge order is preserved.
    pub fn induced(&self, left_active: Option<&[bool]>, right_active: &[bool]) -> Self {
        let edges = self
            .edges
            .iter()
            .filter(|e| right_active[e.right] && left_active.is_none_or(|m| m[e.left]))
            .cloned()
            .collect();
        Self {
            n_left: self.n_left,
            n_right: self.n_right,
            edges,
        }
    }
}

/// A set of vertex-disjoint edges, stored sorted by `(left, right)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a matching, returning `None` if two edges share a node.
    pub fn from_edges(mut edges: Vec<(usize, usize)>) -> Option<Self> {
        edges.sort_unstable();
        edges.dedup();
        let mut lefts: Vec<usize> = edges.iter().map(|e| e.0).collect();
        let mut rights: Vec<usize> = edges.iter().map(|e| e.1).collect();
        lefts.sort_unstable();
        rights.sort_unstable();
        let disjoint = lefts.windows(2).all(|w| w[0] != w[1]) && rights.windows(2).all(|w| w[0] != w[1]);
        disjoint.then_some(Self { edges })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, left: usize, right: usize) -> bool {
        self.edges.binary_search(&(left, right)).is_ok()
    }

    pub fn matches_right(&self, right: usize) -> bool {
        self.edges.iter().any(|e| e.1 == right)
    }

    /// True when every edge exists in `graph` and endpoints are disjoint.
    pub fn is_valid_in<W: Field>(&self, graph: &BipartiteGraph<W>) -> bool {
        Matching::from_edges(self.edges.clone()).is_some()
            && self.edges.iter().all(|&(l, r)| graph.edge_index(l, r).is_some())
    }

    pub fn weight_in<W: Field>(&self, graph: &BipartiteGraph<W>) -> W {
        self.edges
            .iter()
            .filter_map(|&(l, r)| graph.edge_index(l, r))
            .fold(W::zero(), |acc, idx| acc + graph.edges[idx].weight.clone())
    }
}

/// Availability of each right (offline) node; `true` means still matchable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AvailabilityVector(pub Vec<bool>);

impl AvailabilityVector {
    pub fn all(n: usize, value: bool) -> Self {
        Self(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn available(&self, node: usize) -> bool {
        self.0[node]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&a| a).count()
    }
}

/// Hungarian method with potentials on a dense cost matrix with `rows <= cols`.
/// Returns, for every row, the assigned column.
fn assignment<T: Field>(cost: &[Vec<T>], rows: usize, cols: usize) -> Vec<usize> {
    debug_assert!(rows <= cols);
    // 1-indexed, column 0 is the virtual start.
    let mut u = vec![T::zero(); rows + 1];
    let mut v = vec![T::zero(); cols + 1];
    let mut p = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<T>> = vec![None; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| cur < *m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].as_ref().expect("set above");
                if delta.as_ref().is_none_or(|d| *mj < *d) {
                    delta = Some(mj.clone());
                    j1 = j;
                }
            }
            let delta = delta.expect("rows <= cols leaves a free column");
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = minv[j].as_mut() {
                    *m = m.clone() - delta.clone();
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; rows];
    for j in 1..=cols {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Some maximum-weight matching over the edges selected by `keep`, plus its value.
fn hungarian<W: Field>(graph: &BipartiteGraph<W>, keep: impl Fn(usize) -> bool) -> (Vec<(usize, usize)>, W) {
    let (nl, nr) = (graph.n_left, graph.n_right);
    let mut chosen = Vec::new();
    let mut total = W::zero();
    if nl == 0 || nr == 0 {
        return (chosen, total);
    }
    let transpose = nl > nr;
    let (rows, cols) = if transpose { (nr, nl) } else { (nl, nr) };
    let mut cost = vec![vec![W::zero(); cols]; rows];
    let mut any = false;
    for (idx, e) in graph.edges.iter().enumerate() {
        if !keep(idx) || !e.weight.is_pos() {
            continue;
        }
        any = true;
        let (r, c) = if transpose {
            (e.right, e.left)
        } else {
            (e.left, e.right)
        };
        cost[r][c] = -e.weight.clone();
    }
    if !any {
        return (chosen, total);
    }
    for (r, c) in assignment(&cost, rows, cols).into_iter().enumerate() {
        if cost[r][c].is_neg() {
            let (l, rt) = if transpose { (c, r) } else { (r, c) };
            total = total - cost[r][c].clone();
            chosen.push((l, rt));
        }
    }
    (chosen, total)
}

/// Value of a maximum-weight matching, without canonicalising the matching.
pub fn max_weight_value<W: Field>(graph: &BipartiteGraph<W>) -> W {
    hungarian(graph, |_| true).1
}

/// Maximum-weight matching and its value.
///
/// Among optimal matchings the one with the lexicographically smallest sorted
/// edge list (positive-weight edges only) is returned, so results do not
/// depend on the internals of the assignment solver.
pub fn max_weight_matching<W: Field>(graph: &BipartiteGraph<W>) -> (Matching, W) {
    let best = max_weight_value(graph);
    let mut order: Vec<usize> = (0..graph.edges.len())
        .filter(|&i| graph.edges[i].weight.is_pos())
        .collect();
    order.sort_by_key(|&i| (graph.edges[i].left, graph.edges[i].right));

    let mut excluded = vec![false; graph.edges.len()];
    let mut used_left = vec![false; graph.n_left];
    let mut used_right = vec![false; graph.n_right];
    let mut chosen = Vec::new();
    let mut chosen_weight = W::zero();

    for &idx in &order {
        let e = &graph.edges[idx];
        if used_left[e.left] || used_right[e.right] {
            excluded[idx] = true;
            continue;
        }
        let with_e = chosen_weight.clone() + e.weight.clone();
        let (_, rest) = hungarian(graph, |j| {
            let f = &graph.edges[j];
            j != idx
                && !excluded[j]
                && !used_left[f.left]
                && !used_right[f.right]
                && f.left != e.left
                && f.right != e.right
        });
        if !(best.clone() - (with_e.clone() + rest)).is_pos() {
            used_left[e.left] = true;
            used_right[e.right] = true;
            chosen.push((e.left, e.right));
            chosen_weight = with_e;
        } else {
            excluded[idx] = true;
        }
    }
    let matching = Matching::from_edges(chosen).expect("greedy keeps endpoints disjoint");
    (matching, chosen_weight)
}

/// ν(G_A): maximum-weight matching value of the subgraph induced by the
/// available right nodes.
pub fn nu<W: Field>(graph: &BipartiteGraph<W>, availability: &AvailabilityVector) -> Result<W, MatchingError> {
    if availability.len() != graph.n_right {
        return Err(MatchingError::AvailabilityLength {
            got: availability.len(),
            expected: graph.n_right,
        });
    }
    Ok(max_weight_value(&graph.induced(None, &availability.0)))
}

/// First violated constraint of a fractional matching.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractionalViolation {
    #[error("expected {expected} edge values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("edge #{edge} ({left}, {right}) has invalid value {value}")]
    EdgeValue {
        edge: usize,
        left: usize,
        right: usize,
        value: f64,
    },
    #[error("left node {node} has fractional degree {load} > 1")]
    LeftDegree { node: usize, load: f64 },
    #[error("right node {node} has fractional degree {load} > 1")]
    RightDegree { node: usize, load: f64 },
}

/// Degree tolerance shared by every fractional-matching check.
pub const DEGREE_TOL: f64 = 1e-9;

/// Checks `x_e >= 0` and `sum_{e at v} x_e <= 1 + 1e-9` at every node. Values
/// are indexed like `graph.edges()`, so support is always within the edges.
pub fn validate_fractional_matching<W: Field>(graph: &BipartiteGraph<W>, x: &[f64]) -> Result<(), FractionalViolation> {
    if x.len() != graph.edges.len() {
        return Err(FractionalViolation::Length {
            expected: graph.edges.len(),
            got: x.len(),
        });
    }
    let mut left_load = vec![0.0; graph.n_left];
    let mut right_load = vec![0.0; graph.n_right];
    for (idx, (e, &value)) in graph.edges.iter().zip(x).enumerate() {
        if !value.is_finite() || !(-DEGREE_TOL..=1.0 + DEGREE_TOL).contains(&value) {
            return Err(FractionalViolation::EdgeValue {
                edge: idx,
                left: e.left,
                right: e.right,
                value,
            });
        }
        left_load[e.left] += value;
        right_load[e.right] += value;
    }
    if let Some((node, &load)) = left_load.iter().enumerate().find(|(_, &l)| l > 1.0 + DEGREE_TOL) {
        return Err(FractionalViolation::LeftDegree { node, load });
    }
    if let Some((node, &load)) = right_load.iter().enumerate().find(|(_, &l)| l > 1.0 + DEGREE_TOL) {
        return Err(FractionalViolation::RightDegree { node, load });
    }
    Ok(())
}

/// Fractional degree of every right node.
pub fn right_degrees<W: Field>(graph: &BipartiteGraph<W>, x: &[f64]) -> Vec<f64> {
    let mut load = vec![0.0; graph.n_right];
    for (e, v) in graph.edges.iter().zip(x) {
        load[e.right] += v;
    }
    load
}

/// Fractional degree of every left node.
pub fn left_degrees<W: Field>(graph: &BipartiteGraph<W>, x: &[f64]) -> Vec<f64> {
    let mut load = vec![0.0; graph.n_left];
    for (e, v) in graph.edges.iter().zip(x) {
        load[e.left] += v;
    }
    load
}
