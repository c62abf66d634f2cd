//! Verification harness: exhaustive checks of the matching lower bounds,
//! statistical checks where enumeration is impossible, negative-dependence
//! testers, and the Monte Carlo ratio estimator.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::crs::{build_star_crs, star_bound_h, ActiveSetDistribution, CrsError, MAX_MONOTONE_CHECK};
use crate::instance::TwoStageInstance;
use crate::lp::solve_lp_on;
use crate::matching::{
    left_degrees, max_weight_value, right_degrees, validate_fractional_matching, BipartiteGraph, FractionalViolation,
    GraphEdge,
};
use crate::numeric::C_EDGE;
use crate::rng::{trial_rng, TrialRng};
use crate::twostage::{brute_force_opt_online, Policy, TwoStageError};

/// One-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.326_347_874_040_840_8;
/// Slack for exhaustive comparisons.
pub const EXACT_TOL: f64 = 1e-9;
/// Largest graph the exhaustive checkers enumerate.
pub const MAX_EXACT_NODES: usize = 16;
/// Largest ground set for subset-wise dependence checks.
pub const MAX_DEPENDENCE_ELEMENTS: usize = 6;
/// Fewest trials accepted by the ratio estimator.
pub const MIN_TRIALS: u64 = 100;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("node {node}: {message}")]
    Precondition { node: String, message: String },
    #[error("{what} has {n} elements; the cap is {cap}")]
    TooLarge { what: &'static str, n: usize, cap: usize },
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error(transparent)]
    Fractional(#[from] FractionalViolation),
    #[error("accumulation orders disagree: {0} vs {1}")]
    Accumulation(f64, f64),
    #[error("need at least {MIN_TRIALS} trials, got {0}")]
    Trials(u64),
    #[error(transparent)]
    TwoStage(#[from] TwoStageError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Exact,
    Statistical,
}

/// Outcome of checking `lhs ≥ rhs`. For statistical reports `lhs` is the
/// sample mean and `ci_lower` the one-sided 99% lower confidence bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub descriptor: String,
    pub bound: String,
    pub lhs: f64,
    pub ci_lower: Option<f64>,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub tier: Tier,
}

impl BoundReport {
    pub fn exact(descriptor: String, bound: &str, lhs: f64, rhs: f64) -> Self {
        let verdict = if lhs >= rhs - EXACT_TOL {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            descriptor,
            bound: bound.into(),
            lhs,
            ci_lower: None,
            rhs,
            margin: EXACT_TOL,
            verdict,
            tier: Tier::Exact,
        }
    }

    /// Exact check of `|lhs − rhs| ≤ tol`.
    pub fn equality(descriptor: String, bound: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let verdict = if (lhs - rhs).abs() <= tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            descriptor,
            bound: bound.into(),
            lhs,
            ci_lower: None,
            rhs,
            margin: tol,
            verdict,
            tier: Tier::Exact,
        }
    }

    pub fn statistical(descriptor: String, bound: &str, estimate: &MeanEstimate, rhs: f64, margin: f64) -> Self {
        let verdict = if estimate.ci_lower >= rhs - margin {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            descriptor,
            bound: bound.into(),
            lhs: estimate.mean,
            ci_lower: Some(estimate.ci_lower),
            rhs,
            margin,
            verdict,
            tier: Tier::Statistical,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub const CSV_HEADER: &'static str = "descriptor,bound,lhs,ci_lower,rhs,margin,verdict,tier";

    pub fn csv_row(&self) -> String {
        let verdict = if self.passed() { "pass" } else { "fail" };
        let tier = match self.tier {
            Tier::Exact => "exact",
            Tier::Statistical => "statistical",
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.descriptor,
            self.bound,
            self.lhs,
            self.ci_lower.map(|v| v.to_string()).unwrap_or_default(),
            self.rhs,
            self.margin,
            verdict,
            tier
        )
    }
}

/// Sample mean with a one-sided 99% normal lower confidence bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub trials: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub ci_lower: f64,
}

impl MeanEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let variance = if samples.len() > 1 {
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let std_dev = variance.sqrt();
        Self {
            trials: samples.len() as u64,
            mean,
            std_dev,
            ci_lower: mean - Z_99 * std_dev / n.sqrt(),
        }
    }
}

fn node_name(side: char, k: usize) -> String {
    format!("{side}{k}")
}

fn check_len(expected: usize, got: usize) -> Result<(), VerifyError> {
    if expected == got {
        Ok(())
    } else {
        Err(VerifyError::Length { expected, got })
    }
}

/// Expected value of `value(left_active, right_active)` under independent
/// activations, summed in ascending order and again in Gray-code order.
fn enumerate_expectation(
    p_left: &[f64],
    p_right: &[f64],
    value: impl Fn(&[bool], &[bool]) -> f64,
) -> Result<f64, VerifyError> {
    let probs: Vec<f64> = p_left.iter().chain(p_right).copied().collect();
    let random: Vec<usize> = (0..probs.len()).filter(|&v| probs[v] > 0.0 && probs[v] < 1.0).collect();
    let n_left = p_left.len();
    let term = |mask: u64| {
        let mut active: Vec<bool> = probs.iter().map(|&p| p >= 1.0).collect();
        let mut weight = 1.0;
        for (bit, &v) in random.iter().enumerate() {
            let on = mask >> bit & 1 == 1;
            active[v] = on;
            weight *= if on { probs[v] } else { 1.0 - probs[v] };
        }
        weight * value(&active[..n_left], &active[n_left..])
    };
    let count = 1u64 << random.len();
    let ascending: f64 = (0..count).map(term).sum();
    let gray: f64 = (0..count).map(|k| term(k ^ (k >> 1))).sum();
    if (ascending - gray).abs() > 1e-12 * ascending.abs().max(1.0) {
        return Err(VerifyError::Accumulation(ascending, gray));
    }
    Ok(ascending)
}

fn unit_graph(graph: &BipartiteGraph<f64>) -> BipartiteGraph<f64> {
    let edges = graph
        .edges()
        .iter()
        .map(|e| GraphEdge {
            left: e.left,
            right: e.right,
            weight: 1.0,
        })
        .collect();
    BipartiteGraph::new(graph.n_left(), graph.n_right(), edges).expect("same shape")
}

fn check_availability(side: char, degrees: &[f64], p: &[f64]) -> Result<(), VerifyError> {
    for (k, (&x, &pv)) in degrees.iter().zip(p).enumerate() {
        if !(0.0..=1.0).contains(&pv) {
            return Err(VerifyError::Precondition {
                node: node_name(side, k),
                message: format!("Pr[A] = {pv} outside [0, 1]"),
            });
        }
        if pv < x - 1e-12 {
            return Err(VerifyError::Precondition {
                node: node_name(side, k),
                message: format!("Pr[A] = {pv} below fractional degree {x}"),
            });
        }
    }
    Ok(())
}

/// `E[ν(G_A)] ≥ Σ x_e − ½ Σ_v x_v (1 − Pr[A_v])` for independent activations
/// on both sides, by exhaustive enumeration. Edge weights are ignored.
pub fn check_vertex_bound_independent(
    descriptor: &str,
    graph: &BipartiteGraph<f64>,
    x: &[f64],
    p_left: &[f64],
    p_right: &[f64],
) -> Result<BoundReport, VerifyError> {
    check_len(graph.edges().len(), x.len())?;
    check_len(graph.n_left(), p_left.len())?;
    check_len(graph.n_right(), p_right.len())?;
    let nodes = graph.n_left() + graph.n_right();
    if nodes > MAX_EXACT_NODES {
        return Err(VerifyError::TooLarge {
            what: "graph",
            n: nodes,
            cap: MAX_EXACT_NODES,
        });
    }
    validate_fractional_matching(graph, x)?;
    let (xl, xr) = (left_degrees(graph, x), right_degrees(graph, x));
    check_availability('L', &xl, p_left)?;
    check_availability('R', &xr, p_right)?;
    let unit = unit_graph(graph);
    let lhs = enumerate_expectation(p_left, p_right, |l, r| max_weight_value(&unit.induced(Some(l), r)))?;
    let loss: f64 = xl
        .iter()
        .zip(p_left)
        .chain(xr.iter().zip(p_right))
        .map(|(x, p)| x * (1.0 - p))
        .sum();
    let rhs = x.iter().sum::<f64>() - 0.5 * loss;
    Ok(BoundReport::exact(
        descriptor.into(),
        "E[nu] >= sum x_e - 1/2 sum x_v (1 - p_v)",
        lhs,
        rhs,
    ))
}

/// `E[ν(G_A, w)] ≥ ½ Σ_v w_v x_v (1 + Pr[A_v])` for independent activations
/// of right nodes with vertex weights `w`, by exhaustive enumeration.
pub fn check_vertex_weighted_bound(
    descriptor: &str,
    graph: &BipartiteGraph<f64>,
    x: &[f64],
    p_right: &[f64],
    w_right: &[f64],
) -> Result<BoundReport, VerifyError> {
    check_len(graph.edges().len(), x.len())?;
    check_len(graph.n_right(), p_right.len())?;
    check_len(graph.n_right(), w_right.len())?;
    if graph.n_right() > MAX_EXACT_NODES {
        return Err(VerifyError::TooLarge {
            what: "right side",
            n: graph.n_right(),
            cap: MAX_EXACT_NODES,
        });
    }
    if let Some(k) = w_right.iter().position(|w| w.is_nan() || *w < 0.0) {
        return Err(VerifyError::Precondition {
            node: node_name('R', k),
            message: "negative weight".into(),
        });
    }
    validate_fractional_matching(graph, x)?;
    let xr = right_degrees(graph, x);
    check_availability('R', &xr, p_right)?;
    let pairs: Vec<(usize, usize)> = graph.edges().iter().map(|e| (e.left, e.right)).collect();
    let weighted = BipartiteGraph::with_right_weights(graph.n_left(), w_right, &pairs).expect("same shape");
    let lhs = enumerate_expectation(&[], p_right, |_, r| max_weight_value(&weighted.induced(None, r)))?;
    let rhs = 0.5
        * (0..graph.n_right())
            .map(|v| w_right[v] * xr[v] * (1.0 + p_right[v]))
            .sum::<f64>();
    Ok(BoundReport::exact(
        descriptor.into(),
        "E[nu_w] >= 1/2 sum w_v x_v (1 + p_v)",
        lhs,
        rhs,
    ))
}

/// Joint sampler of binary availabilities.
pub trait AvailabilitySampler: Sync {
    fn sample(&self, rng: &mut TrialRng) -> Vec<bool>;
}

impl<F: Fn(&mut TrialRng) -> Vec<bool> + Sync> AvailabilitySampler for F {
    fn sample(&self, rng: &mut TrialRng) -> Vec<bool> {
        self(rng)
    }
}

fn sample_all<T: Send>(trials: u64, seed: u64, parallel: bool, f: impl Fn(&mut TrialRng) -> T + Sync) -> Vec<T> {
    // Results are indexed by trial, so the order never depends on scheduling.
    if parallel {
        (0..trials)
            .into_par_iter()
            .map(|t| f(&mut trial_rng(seed, t)))
            .collect()
    } else {
        (0..trials).map(|t| f(&mut trial_rng(seed, t))).collect()
    }
}

/// `E[ν(G_A, w)] ≥ c Σ w_e x_e` for sampled availabilities of right nodes.
/// The marginal condition `Pr[A_v] ≥ 1 − c(1 − x_v)` is checked on the same
/// samples with slack `4/√N`. The verdict compares the 99% lower confidence
/// bound against the bound with slack `4·ν(G, w)/√N`.
#[allow(clippy::too_many_arguments)]
pub fn check_edge_weighted_bound(
    descriptor: &str,
    graph: &BipartiteGraph<f64>,
    x: &[f64],
    sampler: &dyn AvailabilitySampler,
    c: f64,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> Result<BoundReport, VerifyError> {
    check_len(graph.edges().len(), x.len())?;
    if trials < MIN_TRIALS {
        return Err(VerifyError::Trials(trials));
    }
    validate_fractional_matching(graph, x)?;
    let xr = right_degrees(graph, x);
    let draws = sample_all(trials, seed, parallel, |rng| {
        let a = sampler.sample(rng);
        let value = max_weight_value(&graph.induced(None, &a));
        (a, value)
    });
    let slack = 4.0 / (trials as f64).sqrt();
    for v in 0..graph.n_right() {
        let freq = draws.iter().filter(|(a, _)| a[v]).count() as f64 / trials as f64;
        let need = 1.0 - c * (1.0 - xr[v]);
        if freq < need - slack {
            return Err(VerifyError::Precondition {
                node: node_name('R', v),
                message: format!("empirical Pr[A] = {freq} below 1 - c(1 - x_v) = {need}"),
            });
        }
    }
    let values: Vec<f64> = draws.into_iter().map(|(_, v)| v).collect();
    let estimate = MeanEstimate::from_samples(&values);
    let rhs = c * graph.edges().iter().zip(x).map(|(e, v)| e.weight * v).sum::<f64>();
    let margin = slack * max_weight_value(graph);
    Ok(BoundReport::statistical(
        descriptor.into(),
        "E[nu_w] >= c sum w_e x_e",
        &estimate,
        rhs,
        margin,
    ))
}

/// Empirical negative-dependence evidence for a joint binary sampler.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependenceReport {
    pub trials: u64,
    pub margin: f64,
    pub marginals: Vec<f64>,
    /// `(i, j, Cov(A_i, A_j))` for `i < j`.
    pub covariances: Vec<(usize, usize, f64)>,
    pub ncd: Vec<NcdCheck>,
}

/// `E[Π_S A] ≤ Π_S E[A]` and the mirrored inequality on complements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcdCheck {
    pub subset: Vec<usize>,
    pub joint: f64,
    pub product: f64,
    pub joint_complement: f64,
    pub product_complement: f64,
}

impl DependenceReport {
    pub fn max_covariance(&self) -> f64 {
        self.covariances.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn covariances_pass(&self) -> bool {
        self.covariances.iter().all(|c| c.2 <= self.margin)
    }

    pub fn ncd_pass(&self) -> bool {
        self.ncd
            .iter()
            .all(|c| c.joint <= c.product + self.margin && c.joint_complement <= c.product_complement + self.margin)
    }

    pub fn passed(&self) -> bool {
        self.covariances_pass() && self.ncd_pass()
    }
}

/// Pairwise covariances and every subset NCD inequality, margin `4/√N`.
pub fn test_negative_dependence(
    sampler: &dyn AvailabilitySampler,
    n: usize,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> Result<DependenceReport, VerifyError> {
    if n > MAX_DEPENDENCE_ELEMENTS {
        return Err(VerifyError::TooLarge {
            what: "ground set",
            n,
            cap: MAX_DEPENDENCE_ELEMENTS,
        });
    }
    if trials == 0 {
        return Err(VerifyError::Trials(0));
    }
    let masks: Vec<u32> = sample_all(trials, seed, parallel, |rng| {
        let a = sampler.sample(rng);
        a.iter()
            .take(n)
            .enumerate()
            .fold(0u32, |m, (i, &on)| m | (on as u32) << i)
    });
    let full = (1u32 << n) - 1;
    let mut counts = vec![0u64; 1 << n];
    for m in masks {
        counts[m as usize] += 1;
    }
    let nf = trials as f64;
    // Fraction of samples containing all of `s` / missing all of `s`.
    let all_on = |s: u32| {
        counts
            .iter()
            .enumerate()
            .filter(|(m, _)| *m as u32 & s == s)
            .map(|(_, c)| *c)
            .sum::<u64>() as f64
            / nf
    };
    let all_off = |s: u32| {
        counts
            .iter()
            .enumerate()
            .filter(|(m, _)| *m as u32 & s == 0)
            .map(|(_, c)| *c)
            .sum::<u64>() as f64
            / nf
    };
    let marginals: Vec<f64> = (0..n).map(|i| all_on(1 << i)).collect();
    let mut covariances = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            covariances.push((i, j, all_on(1 << i | 1 << j) - marginals[i] * marginals[j]));
        }
    }
    let ncd = (1..=full)
        .filter(|s| s.count_ones() >= 2)
        .map(|s| {
            let subset = crate::crs::members(s);
            NcdCheck {
                joint: all_on(s),
                product: subset.iter().map(|&i| marginals[i]).product(),
                joint_complement: all_off(s),
                product_complement: subset.iter().map(|&i| 1.0 - marginals[i]).product(),
                subset,
            }
        })
        .collect();
    Ok(DependenceReport {
        trials,
        margin: 4.0 / nf.sqrt(),
        marginals,
        covariances,
        ncd,
    })
}

/// Mean of `policy` over `trials` seeded draws; each draw uses its own stream.
pub fn estimate_mean<P: Policy + ?Sized>(policy: &P, trials: u64, seed: u64, parallel: bool) -> MeanEstimate {
    MeanEstimate::from_samples(&sample_all(trials, seed, parallel, |rng| policy.sample_value(rng)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub estimate: MeanEstimate,
    pub lp_on: f64,
    pub opt_on: Option<f64>,
    pub ratio_lp: f64,
    pub ratio_lp_ci: f64,
    pub ratio_opt: Option<f64>,
}

/// Policy value against LPon, and against optimum online when the oracle
/// is within its cap.
pub fn estimate_ratio<P: Policy + ?Sized>(
    instance: &TwoStageInstance,
    policy: &P,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> Result<RatioEstimate, VerifyError> {
    if trials < MIN_TRIALS {
        return Err(VerifyError::Trials(trials));
    }
    let lp_on = solve_lp_on(instance).objective.to_f64();
    let opt_on = match brute_force_opt_online(instance) {
        Ok((v, _)) => Some(v.to_f64()),
        Err(TwoStageError::CapExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let estimate = estimate_mean(policy, trials, seed, parallel);
    let ratio = |v: f64, base: f64| if base > 0.0 { v / base } else { 1.0 };
    Ok(RatioEstimate {
        ratio_lp: ratio(estimate.mean, lp_on),
        ratio_lp_ci: ratio(estimate.ci_lower, lp_on),
        ratio_opt: opt_on.map(|o| ratio(estimate.mean, o)),
        estimate,
        lp_on,
        opt_on,
    })
}

/// Random fractional matching on `edges`: uniform draws scaled so every
/// node's degree is at most 1.
fn random_fractional(rng: &mut ChaCha8Rng, n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let raw: Vec<f64> = edges.iter().map(|_| rng.random::<f64>()).collect();
    let mut left = vec![0.0; n_left];
    let mut right = vec![0.0; n_right];
    for (&(l, r), v) in edges.iter().zip(&raw) {
        left[l] += v;
        right[r] += v;
    }
    edges
        .iter()
        .zip(&raw)
        .map(|(&(l, r), v)| v / left[l].max(right[r]).max(1.0))
        .collect()
}

/// Availability at least `degree`: sometimes exactly the degree or 1, to
/// exercise the boundary.
fn random_availability(rng: &mut ChaCha8Rng, degree: f64) -> f64 {
    let degree = degree.min(1.0);
    match rng.random_range(0..10) {
        0 | 1 => degree,
        2 => 1.0,
        _ => degree + (1.0 - degree) * rng.random::<f64>(),
    }
}

/// Random tree with 2 to `max_nodes` nodes, sides alternating by depth.
fn random_tree(rng: &mut ChaCha8Rng, max_nodes: usize) -> (usize, usize, Vec<(usize, usize)>) {
    let total = rng.random_range(2..=max_nodes);
    // (is_left, index on its side)
    let mut nodes = vec![(true, 0usize)];
    let (mut n_left, mut n_right) = (1, 0);
    let mut edges = Vec::new();
    for _ in 1..total {
        let parent = nodes[rng.random_range(0..nodes.len())];
        if parent.0 {
            nodes.push((false, n_right));
            edges.push((parent.1, n_right));
            n_right += 1;
        } else {
            nodes.push((true, n_left));
            edges.push((n_left, parent.1));
            n_left += 1;
        }
    }
    (n_left, n_right, edges)
}

/// Exhaustive unweighted bound on `count` random trees with at most 10 nodes.
pub fn vertex_bound_battery(seed: u64, count: usize) -> Result<Vec<BoundReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let (n_left, n_right, edges) = random_tree(&mut rng, 10);
            let graph = BipartiteGraph::unweighted(n_left, n_right, &edges).expect("tree edges are in range");
            let x = random_fractional(&mut rng, n_left, n_right, &edges);
            let p_left: Vec<f64> = left_degrees(&graph, &x)
                .into_iter()
                .map(|d| random_availability(&mut rng, d))
                .collect();
            let p_right: Vec<f64> = right_degrees(&graph, &x)
                .into_iter()
                .map(|d| random_availability(&mut rng, d))
                .collect();
            check_vertex_bound_independent(&format!("tree-{seed}-{k}"), &graph, &x, &p_left, &p_right)
        })
        .collect()
}

/// Exhaustive vertex-weighted bound on `count` random bipartite graphs with
/// at most 8 right nodes.
pub fn vertex_weighted_battery(seed: u64, count: usize) -> Result<Vec<BoundReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n_left = rng.random_range(1..=5);
            let n_right = rng.random_range(1..=8);
            let density = 0.2 + 0.6 * rng.random::<f64>();
            let mut edges = Vec::new();
            for l in 0..n_left {
                for r in 0..n_right {
                    if rng.random_bool(density) {
                        edges.push((l, r));
                    }
                }
            }
            let graph = BipartiteGraph::unweighted(n_left, n_right, &edges).expect("edges are in range");
            let x = random_fractional(&mut rng, n_left, n_right, &edges);
            let p: Vec<f64> = right_degrees(&graph, &x)
                .into_iter()
                .map(|d| random_availability(&mut rng, d))
                .collect();
            let w: Vec<f64> = (0..n_right).map(|_| rng.random::<f64>()).collect();
            check_vertex_weighted_bound(&format!("bipartite-{seed}-{k}"), &graph, &x, &p, &w)
        })
        .collect()
}

/// `h(m) ≤ 1` for `m ∈ 1..=max_m` and `h(m+1) ≤ h(m)` for `m ∈ 3..max_m`.
pub fn star_bound_reports(max_m: u32) -> Vec<BoundReport> {
    let mut reports: Vec<BoundReport> = (1..=max_m)
        .map(|m| BoundReport::exact(format!("m={m}"), "1 >= h(m)", 1.0, star_bound_h(m)))
        .collect();
    reports.extend(
        (3..max_m)
            .map(|m| BoundReport::exact(format!("m={m}"), "h(m) >= h(m+1)", star_bound_h(m), star_bound_h(m + 1))),
    );
    reports
}

/// Built star schemes on `count` random feasible inputs with at most 6
/// elements: one marginal report per element (`Pr[i selected] = c·y_i`
/// within 1e-9) and, for at most 5 elements, one monotonicity report.
pub fn star_crs_battery(seed: u64, count: usize) -> Result<Vec<BoundReport>, CrsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for k in 0..count {
        let n = rng.random_range(1..=6);
        let (y, p) = random_star_input(&mut rng, n);
        let dist = ActiveSetDistribution::independent(&p)?;
        let scheme = build_star_crs(&y, &dist)?;
        for (i, m) in scheme.marginals(&dist).into_iter().enumerate() {
            reports.push(BoundReport::equality(
                format!("star-{seed}-{k}-e{i}"),
                "Pr[i selected] = c y_i",
                m,
                C_EDGE * y[i],
                1e-9,
            ));
        }
        if n <= MAX_MONOTONE_CHECK {
            let monotone = if scheme.is_monotone()? { 1.0 } else { 0.0 };
            reports.push(BoundReport::exact(
                format!("star-{seed}-{k}"),
                "monotone",
                monotone,
                1.0,
            ));
        }
    }
    Ok(reports)
}

/// Targets with `Σy ≤ 1` (some exactly zero) and independent activation
/// probabilities in `[1 − c(1 − y_i), 1]`.
pub fn random_star_input(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_range(0..6) == 0 {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    let total = raw.iter().sum::<f64>() + rng.random::<f64>();
    let y: Vec<f64> = raw.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
    let p = y
        .iter()
        .map(|&yi| {
            let low = 1.0 - C_EDGE * (1.0 - yi);
            if rng.random_range(0..4) == 0 {
                low
            } else {
                low + (1.0 - low) * rng.random::<f64>()
            }
        })
        .collect();
    (y, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{
        make_edge_gap_family, make_eight_cycle, OfflineNode, Scenario, Stage, StageEdge, WeightMode,
    };
    use crate::numeric::Scalar;
    use crate::twostage::RoundAugmentPolicy;

    #[test]
    fn single_edge_is_tight() {
        let g = BipartiteGraph::unweighted(1, 1, &[(0, 0)]).unwrap();
        let r = check_vertex_bound_independent("edge", &g, &[0.5], &[0.5], &[0.5]).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-15 && (r.rhs - 0.25).abs() < 1e-15);
        assert!(r.passed());
        assert_eq!(r.tier, Tier::Exact);
    }

    #[test]
    fn deterministic_availability_is_lossless() {
        let g = BipartiteGraph::unweighted(2, 2, &[(0, 0), (0, 1), (1, 1)]).unwrap();
        let x = [0.4, 0.6, 0.4];
        let r = check_vertex_bound_independent("det", &g, &x, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(r.lhs, 2.0);
        assert!((r.rhs - 1.4).abs() < 1e-12);
    }

    #[test]
    fn availability_below_degree_is_rejected() {
        let g = BipartiteGraph::unweighted(1, 1, &[(0, 0)]).unwrap();
        match check_vertex_bound_independent("bad", &g, &[0.5], &[1.0], &[0.4]) {
            Err(VerifyError::Precondition { node, .. }) => assert_eq!(node, "R0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weighted_single_node() {
        let g = BipartiteGraph::unweighted(1, 1, &[(0, 0)]).unwrap();
        let r = check_vertex_weighted_bound("one", &g, &[0.5], &[0.5], &[5.0]).unwrap();
        assert!((r.lhs - 2.5).abs() < 1e-12);
        assert!((r.rhs - 1.875).abs() < 1e-12);
        assert!(r.passed());
    }

    #[test]
    fn batteries_pass() {
        assert!(vertex_bound_battery(3, 40).unwrap().iter().all(BoundReport::passed));
        assert!(vertex_weighted_battery(3, 40).unwrap().iter().all(BoundReport::passed));
    }

    #[test]
    fn star_battery_passes() {
        let reports = star_crs_battery(5, 10).unwrap();
        assert!(reports.iter().any(|r| r.bound == "monotone"));
        assert!(reports.iter().all(BoundReport::passed));
    }

    #[test]
    fn star_bound_reports_pass() {
        assert!(star_bound_reports(200).iter().all(BoundReport::passed));
    }

    #[test]
    fn enumeration_matches_monte_carlo() {
        let g = BipartiteGraph::unweighted(2, 2, &[(0, 0), (0, 1), (1, 1)]).unwrap();
        let x = [0.3, 0.5, 0.4];
        let (pl, pr) = ([0.9, 0.5], [0.4, 0.95]);
        let exact = check_vertex_bound_independent("mc", &g, &x, &pl, &pr).unwrap().lhs;
        let sample = |rng: &mut TrialRng| {
            let l: Vec<bool> = pl.iter().map(|&p| rng.random_bool(p)).collect();
            let r: Vec<bool> = pr.iter().map(|&p| rng.random_bool(p)).collect();
            max_weight_value(&g.induced(Some(&l), &r))
        };
        let est = estimate_mean(&sample, 20_000, 1, false);
        assert!((est.mean - exact).abs() < 4.0 * est.std_dev / (20_000f64).sqrt());
    }

    #[test]
    fn deterministic_policy_has_zero_width() {
        let edge = StageEdge {
            online: 0,
            offline: 0,
            weight: None,
        };
        let inst = TwoStageInstance::new(
            WeightMode::Unweighted,
            vec![OfflineNode {
                id: "i".into(),
                weight: None,
            }],
            Stage {
                nodes: vec!["a".into()],
                edges: vec![edge.clone()],
            },
            vec![Scenario {
                probability: Scalar::one(),
                stage: Stage {
                    nodes: vec!["b".into()],
                    edges: vec![edge],
                },
            }],
        )
        .unwrap();
        let policy = RoundAugmentPolicy::new(&inst, &solve_lp_on(&inst), 0.0).unwrap();
        let r = estimate_ratio(&inst, &policy, 100, 1, false).unwrap();
        assert_eq!(r.estimate.std_dev, 0.0);
        assert_eq!(r.estimate.ci_lower, r.estimate.mean);
        assert!(estimate_ratio(&inst, &policy, 99, 1, false).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let inst = make_eight_cycle();
        let policy = RoundAugmentPolicy::new(&inst, &solve_lp_on(&inst), 1.0).unwrap();
        assert_eq!(
            estimate_mean(&policy, 500, 9, false),
            estimate_mean(&policy, 500, 9, true)
        );
    }

    #[test]
    fn coupled_dominance_preserved() {
        let inst = make_eight_cycle();
        let policy = RoundAugmentPolicy::new(&inst, &solve_lp_on(&inst), 1.0).unwrap();
        let worse = |rng: &mut TrialRng| policy.sample_value(rng) - 0.5;
        assert!(estimate_mean(&policy, 300, 2, false).mean > estimate_mean(&worse, 300, 2, false).mean);
    }

    #[test]
    fn exactly_one_sampler_is_negative() {
        let one_of = |rng: &mut TrialRng| {
            let k = rng.random_range(0..4);
            (0..4).map(|i| i == k).collect::<Vec<bool>>()
        };
        let r = test_negative_dependence(&one_of, 4, 20_000, 1, false).unwrap();
        for &(_, _, cov) in &r.covariances {
            assert!(cov < 0.0 && (cov + 1.0 / 16.0).abs() < 0.01);
        }
        assert!(r.passed());
    }

    #[test]
    fn independent_sampler_is_boundary() {
        let independent = |rng: &mut TrialRng| (0..3).map(|_| rng.random_bool(0.5)).collect::<Vec<bool>>();
        let r = test_negative_dependence(&independent, 3, 20_000, 2, false).unwrap();
        assert!(r.passed());
        assert!(r.covariances.iter().all(|c| c.2.abs() < r.margin));
    }

    #[test]
    fn positively_correlated_sampler_fails() {
        let together = |rng: &mut TrialRng| vec![rng.random_bool(0.5); 2];
        let r = test_negative_dependence(&together, 2, 10_000, 3, false).unwrap();
        assert!(!r.covariances_pass());
    }

    #[test]
    fn edge_bound_on_gap_family() {
        let inst = make_edge_gap_family(2).unwrap();
        let sol = solve_lp_on(&inst);
        let policy = RoundAugmentPolicy::new(&inst, &sol, C_EDGE).unwrap();
        let sampler = |rng: &mut TrialRng| {
            let m = policy.round_first_stage(rng).unwrap();
            (0..4).map(|i| !m.matches_right(i)).collect::<Vec<bool>>()
        };
        for theta in [0, 1] {
            let g = inst.scenario_graph::<f64>(theta).unwrap();
            let r = check_edge_weighted_bound("gap", &g, &sol.y_f64(theta), &sampler, C_EDGE, 5_000, 4, false).unwrap();
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.tier, Tier::Statistical);
        }
    }

    #[test]
    fn deterministic_edge_bound() {
        let g = BipartiteGraph::new(
            1,
            2,
            vec![
                GraphEdge {
                    left: 0,
                    right: 0,
                    weight: 2.0,
                },
                GraphEdge {
                    left: 0,
                    right: 1,
                    weight: 1.0,
                },
            ],
        )
        .unwrap();
        let all = |_: &mut TrialRng| vec![true, true];
        let r = check_edge_weighted_bound("det", &g, &[0.5, 0.5], &all, C_EDGE, 100, 1, false).unwrap();
        assert_eq!(r.lhs, 2.0);
        assert!(r.passed());
    }
}
