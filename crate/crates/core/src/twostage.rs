//! Round-Augment, the offline two-stage rounding, the optimum-online oracle,
//! the sample-based variant and the gap tables.

use std::collections::HashMap;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::instance::{InstanceError, TwoStageInstance, WeightMode};
use crate::lp::{build_lp_on_with, solve_lp_on, FractionalSolution, LpError, LpOutcome};
use crate::matching::{
    max_weight_matching, max_weight_value, validate_fractional_matching, AvailabilityVector, BipartiteGraph, Matching,
};
use crate::numeric::{ratio, Field, QuadSqrt2, Rational, Scalar, C_EDGE};
use crate::rng::{trial_rng, TrialRng};
use crate::rounding::{dependent_round, RoundingError};

/// Largest first-stage graph the optimum-online oracle enumerates.
pub const ORACLE_EDGE_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum TwoStageError {
    #[error("unknown scenario {0}")]
    UnknownScenario(usize),
    #[error("first-stage graph has {edges} edges; the oracle enumerates at most {cap}")]
    CapExceeded { edges: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Default first-stage scale for a weight mode.
pub fn default_scale(mode: WeightMode) -> f64 {
    match mode {
        WeightMode::Unweighted | WeightMode::VertexWeighted => 1.0,
        WeightMode::EdgeWeighted => C_EDGE,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoStageRun {
    pub scenario: usize,
    pub first_stage: Matching,
    pub second_stage: Matching,
    pub value: f64,
    pub seed: u64,
}

impl TwoStageRun {
    /// Offline nodes matched in either stage.
    pub fn matched_offline(&self, n_offline: usize) -> Vec<bool> {
        let mut matched = vec![false; n_offline];
        for &(_, i) in self.first_stage.edges().iter().chain(self.second_stage.edges()) {
            matched[i] = true;
        }
        matched
    }

    /// Stage matchings share no offline node.
    pub fn is_disjoint(&self) -> bool {
        self.first_stage
            .edges()
            .iter()
            .all(|&(_, i)| !self.second_stage.matches_right(i))
    }
}

fn check_scale(c: f64) -> Result<(), TwoStageError> {
    if (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(TwoStageError::Parameter(format!("scale c = {c} outside [0, 1]")))
    }
}

fn float_graphs(instance: &TwoStageInstance) -> (BipartiteGraph<f64>, Vec<BipartiteGraph<f64>>) {
    let first = instance
        .first_stage_graph::<f64>()
        .expect("f64 represents every scalar");
    let scenarios = (0..instance.scenarios().len())
        .map(|t| instance.scenario_graph::<f64>(t).expect("f64 represents every scalar"))
        .collect();
    (first, scenarios)
}

/// Round-Augment with its inputs prepared once for repeated sampling.
#[derive(Clone, Debug)]
pub struct RoundAugmentPolicy {
    first: BipartiteGraph<f64>,
    scenarios: Vec<BipartiteGraph<f64>>,
    probabilities: Vec<f64>,
    scaled_x: Vec<f64>,
    n_offline: usize,
}

impl RoundAugmentPolicy {
    /// Rounds `c·x` in stage one, where `x` is the first-stage part of
    /// `solution` (which may come from a different distribution over the same
    /// first stage). Stage two is evaluated on `instance`'s scenarios.
    pub fn new(instance: &TwoStageInstance, solution: &FractionalSolution, c: f64) -> Result<Self, TwoStageError> {
        check_scale(c)?;
        if solution.x.len() != instance.first_stage().edges.len() {
            return Err(TwoStageError::Parameter(
                "solution does not match the first stage".into(),
            ));
        }
        let (first, scenarios) = float_graphs(instance);
        let scaled_x: Vec<f64> = solution.x.iter().map(|v| c * v.to_f64()).collect();
        validate_fractional_matching(&first, &scaled_x).map_err(RoundingError::from)?;
        Ok(Self {
            first,
            scenarios,
            probabilities: instance.probabilities_f64(),
            scaled_x,
            n_offline: instance.num_offline(),
        })
    }

    pub fn round_first_stage<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Matching, RoundingError> {
        Ok(dependent_round(&self.first, &self.scaled_x, rng, false)?.0)
    }

    fn availability(&self, first_stage: &Matching) -> AvailabilityVector {
        let mut available = vec![true; self.n_offline];
        for &(_, i) in first_stage.edges() {
            available[i] = false;
        }
        AvailabilityVector(available)
    }

    /// Full run in a realized scenario.
    pub fn run<R: Rng + ?Sized>(&self, scenario: usize, rng: &mut R) -> Result<TwoStageRun, TwoStageError> {
        let graph = self
            .scenarios
            .get(scenario)
            .ok_or(TwoStageError::UnknownScenario(scenario))?;
        let first_stage = self.round_first_stage(rng)?;
        let available = self.availability(&first_stage);
        let (second_stage, second_value) = max_weight_matching(&graph.induced(None, &available.0));
        let value = first_stage.weight_in(&self.first) + second_value;
        Ok(TwoStageRun {
            scenario,
            first_stage,
            second_stage,
            value,
            seed: 0,
        })
    }

    /// Value of one rounding draw with the scenario expectation taken exactly.
    pub fn expected_value_given<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let first_stage = self.round_first_stage(rng).expect("policy inputs were validated");
        let available = self.availability(&first_stage);
        let second: f64 = self
            .scenarios
            .iter()
            .zip(&self.probabilities)
            .map(|(g, p)| p * max_weight_value(&g.induced(None, &available.0)))
            .sum();
        first_stage.weight_in(&self.first) + second
    }
}

/// A randomized two-stage policy whose value can be sampled.
pub trait Policy: Sync {
    /// Value of one draw of the policy's randomness, averaged exactly over
    /// the scenario distribution.
    fn sample_value(&self, rng: &mut TrialRng) -> f64;
}

impl Policy for RoundAugmentPolicy {
    fn sample_value(&self, rng: &mut TrialRng) -> f64 {
        self.expected_value_given(rng)
    }
}

impl<F: Fn(&mut TrialRng) -> f64 + Sync> Policy for F {
    fn sample_value(&self, rng: &mut TrialRng) -> f64 {
        self(rng)
    }
}

/// One Round-Augment run in scenario `scenario`, seeded by `seed`.
pub fn round_augment(
    instance: &TwoStageInstance,
    solution: &FractionalSolution,
    c: f64,
    seed: u64,
    scenario: usize,
) -> Result<TwoStageRun, TwoStageError> {
    let policy = RoundAugmentPolicy::new(instance, solution, c)?;
    let mut run = policy.run(scenario, &mut ChaCha8Rng::seed_from_u64(seed))?;
    run.seed = seed;
    Ok(run)
}

/// Offline two-stage rounding: round `x` and `y^θ` independently; stage one
/// wins conflicts on offline nodes.
pub fn offline_round(
    instance: &TwoStageInstance,
    solution: &FractionalSolution,
    seed: u64,
    scenario: usize,
) -> Result<TwoStageRun, TwoStageError> {
    if scenario >= instance.scenarios().len() {
        return Err(TwoStageError::UnknownScenario(scenario));
    }
    let (first, scenarios) = float_graphs(instance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m1, _) = dependent_round(&first, &solution.x_f64(), &mut rng, false)?;
    let (m2, _) = dependent_round(&scenarios[scenario], &solution.y_f64(scenario), &mut rng, false)?;
    let second_stage = Matching::from_edges(
        m2.edges()
            .iter()
            .copied()
            .filter(|&(_, i)| !m1.matches_right(i))
            .collect(),
    )
    .expect("subset of a matching");
    let value = m1.weight_in(&first) + second_stage.weight_in(&scenarios[scenario]);
    Ok(TwoStageRun {
        scenario,
        first_stage: m1,
        second_stage,
        value,
        seed,
    })
}

/// Per-offline-node matched frequency of the offline rounding over `trials`
/// draws, with the scenario averaged exactly in each draw. Draws are summed
/// in trial order, so `parallel` does not change the result.
pub fn offline_match_frequencies(
    instance: &TwoStageInstance,
    solution: &FractionalSolution,
    trials: u64,
    seed: u64,
    parallel: bool,
) -> Result<Vec<f64>, TwoStageError> {
    let (first, scenarios) = float_graphs(instance);
    let x = solution.x_f64();
    let ys: Vec<Vec<f64>> = (0..scenarios.len()).map(|t| solution.y_f64(t)).collect();
    let probabilities = instance.probabilities_f64();
    let n = instance.num_offline();
    let draw = |trial: u64| -> Result<Vec<f64>, RoundingError> {
        let mut rng = trial_rng(seed, trial);
        let mut matched = vec![0.0; n];
        let (m1, _) = dependent_round(&first, &x, &mut rng, false)?;
        for (theta, graph) in scenarios.iter().enumerate() {
            let (m2, _) = dependent_round(graph, &ys[theta], &mut rng, false)?;
            for &(_, i) in m2.edges() {
                if !m1.matches_right(i) {
                    matched[i] += probabilities[theta];
                }
            }
        }
        for &(_, i) in m1.edges() {
            matched[i] = 1.0;
        }
        Ok(matched)
    };
    let draws: Vec<Vec<f64>> = if parallel {
        (0..trials).into_par_iter().map(draw).collect::<Result<_, _>>()?
    } else {
        (0..trials).map(draw).collect::<Result<_, _>>()?
    };
    let mut totals = vec![0.0; n];
    for d in &draws {
        totals.iter_mut().zip(d).for_each(|(t, v)| *t += v);
    }
    Ok(totals.into_iter().map(|t| t / trials as f64).collect())
}

/// Every matching of `graph`, in a fixed depth-first order over edge indices.
fn all_matchings<W: Field>(graph: &BipartiteGraph<W>) -> Vec<Vec<usize>> {
    fn extend<W: Field>(
        graph: &BipartiteGraph<W>,
        next: usize,
        used_left: &mut Vec<bool>,
        used_right: &mut Vec<bool>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(current.clone());
        for k in next..graph.edges().len() {
            let e = &graph.edges()[k];
            if used_left[e.left] || used_right[e.right] {
                continue;
            }
            used_left[e.left] = true;
            used_right[e.right] = true;
            current.push(k);
            extend(graph, k + 1, used_left, used_right, current, out);
            current.pop();
            used_left[e.left] = false;
            used_right[e.right] = false;
        }
    }
    let mut out = Vec::new();
    extend(
        graph,
        0,
        &mut vec![false; graph.n_left()],
        &mut vec![false; graph.n_right()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

fn oracle<W: Field>(instance: &TwoStageInstance, convert: impl Fn(&Scalar) -> Option<W>) -> Option<(W, Matching)> {
    let first = instance.stage_graph_with(instance.first_stage(), &convert)?;
    let scenarios: Vec<BipartiteGraph<W>> = instance
        .scenarios()
        .iter()
        .map(|s| instance.stage_graph_with(&s.stage, &convert))
        .collect::<Option<_>>()?;
    let probabilities: Vec<W> = instance
        .scenarios()
        .iter()
        .map(|s| W::from_scalar(&s.probability))
        .collect::<Option<_>>()?;
    let mut cache: Vec<HashMap<u64, W>> = vec![HashMap::new(); scenarios.len()];
    let mut best: Option<(W, Vec<usize>)> = None;
    for chosen in all_matchings(&first) {
        let mut used: u64 = 0;
        let mut value = W::zero();
        for &k in &chosen {
            let e = &first.edges()[k];
            used |= 1 << e.right;
            value = value + e.weight.clone();
        }
        let available: Vec<bool> = (0..instance.num_offline()).map(|i| used >> i & 1 == 0).collect();
        for (theta, graph) in scenarios.iter().enumerate() {
            let nu = cache[theta]
                .entry(used)
                .or_insert_with(|| max_weight_value(&graph.induced(None, &available)))
                .clone();
            value = value + probabilities[theta].clone() * nu;
        }
        if best.as_ref().is_none_or(|(b, _)| (value.clone() - b.clone()).is_pos()) {
            best = Some((value, chosen));
        }
    }
    let (value, chosen) = best.expect("the empty matching is always enumerated");
    let edges = chosen
        .into_iter()
        .map(|k| (first.edges()[k].left, first.edges()[k].right))
        .collect();
    Some((
        value,
        Matching::from_edges(edges).expect("enumerated matchings are disjoint"),
    ))
}

fn check_oracle_size(instance: &TwoStageInstance) -> Result<(), TwoStageError> {
    let edges = instance.first_stage().edges.len();
    if edges > ORACLE_EDGE_CAP {
        return Err(TwoStageError::CapExceeded {
            edges,
            cap: ORACLE_EDGE_CAP,
        });
    }
    if instance.num_offline() > 64 {
        return Err(TwoStageError::Parameter(
            "oracle supports at most 64 offline nodes".into(),
        ));
    }
    Ok(())
}

/// Optimum online value by enumerating every first-stage matching. Exact when
/// the instance data is rational.
pub fn brute_force_opt_online(instance: &TwoStageInstance) -> Result<(Scalar, Matching), TwoStageError> {
    check_oracle_size(instance)?;
    if let Some((v, m)) = oracle(instance, Rational::from_scalar) {
        return Ok((Scalar::Exact(v), m));
    }
    let (v, m) = oracle(instance, f64::from_scalar).expect("f64 represents every scalar");
    Ok((Scalar::Float(v), m))
}

/// `k ≥ (2/ε²)(2 ln 2·|I| + ln(2/δ))`, smallest such integer.
pub fn sample_size_vertex(n_offline: usize, epsilon: f64, delta: f64) -> Result<u64, TwoStageError> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    Ok(
        ((2.0 / (epsilon * epsilon)) * (2.0 * std::f64::consts::LN_2 * n_offline as f64 + (2.0 / delta).ln())).ceil()
            as u64,
    )
}

/// `k ≥ (2W²/(μ²ε²))(2 ln 2·|E| + ln(2/δ))`, smallest such integer.
pub fn sample_size_edge(n_edges: usize, epsilon: f64, delta: f64, w_max: f64, mu: f64) -> Result<u64, TwoStageError> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    if !(mu > 0.0 && w_max >= mu) {
        return Err(TwoStageError::Parameter(format!(
            "need W ≥ μ > 0, got W = {w_max}, μ = {mu}"
        )));
    }
    let scale = (w_max * w_max) / (mu * mu * epsilon * epsilon);
    Ok((2.0 * scale * (2.0 * std::f64::consts::LN_2 * n_edges as f64 + (2.0 / delta).ln())).ceil() as u64)
}

fn check_unit(name: &str, v: f64) -> Result<(), TwoStageError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(TwoStageError::Parameter(format!("{name} = {v} outside (0, 1)")))
    }
}

/// Source of i.i.d. scenario indices.
pub trait ScenarioSampler {
    fn sample(&mut self, rng: &mut TrialRng) -> usize;
}

/// Samples scenarios from an instance's own distribution.
pub struct InstanceSampler {
    cumulative: Vec<f64>,
}

impl InstanceSampler {
    pub fn new(instance: &TwoStageInstance) -> Self {
        let mut total = 0.0;
        let cumulative = instance
            .probabilities_f64()
            .into_iter()
            .map(|p| {
                total += p;
                total
            })
            .collect();
        Self { cumulative }
    }
}

impl ScenarioSampler for InstanceSampler {
    fn sample(&mut self, rng: &mut TrialRng) -> usize {
        let u: f64 = rng.random::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }
}

/// Uniform distribution over `k` sampled scenarios, stored as multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalDistribution {
    /// `(scenario, count)` sorted by scenario; counts positive.
    pub counts: Vec<(usize, u64)>,
    pub total: u64,
}

impl EmpiricalDistribution {
    pub fn from_samples(samples: &[usize]) -> Result<Self, TwoStageError> {
        let mut counts: Vec<(usize, u64)> = Vec::new();
        let mut sorted = samples.to_vec();
        sorted.sort_unstable();
        for s in sorted {
            match counts.last_mut() {
                Some((last, n)) if *last == s => *n += 1,
                _ => counts.push((s, 1)),
            }
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: Vec<(usize, u64)>) -> Result<Self, TwoStageError> {
        if counts.iter().any(|&(_, n)| n == 0) {
            return Err(TwoStageError::Parameter("multiplicities must be positive".into()));
        }
        let total = counts.iter().map(|&(_, n)| n).sum();
        if total == 0 {
            return Err(TwoStageError::Parameter("need at least one sample".into()));
        }
        Ok(Self { counts, total })
    }

    /// `instance` with its distribution replaced by this one.
    pub fn to_instance(&self, instance: &TwoStageInstance) -> Result<TwoStageInstance, TwoStageError> {
        let support: Vec<(usize, Scalar)> = self
            .counts
            .iter()
            .map(|&(s, n)| (s, Scalar::frac(n as i64, self.total as i64)))
            .collect();
        Ok(instance.with_distribution(&support)?)
    }
}

/// Round-Augment trained on an empirical distribution, evaluated on the true one.
#[derive(Clone, Debug)]
pub struct SampledPolicy {
    pub empirical: EmpiricalDistribution,
    pub solution: FractionalSolution,
    pub policy: RoundAugmentPolicy,
}

/// Draws `k` scenarios, solves LPon on their empirical distribution, and
/// returns the resulting Round-Augment policy on the true instance.
pub fn sample_based_round_augment(
    instance: &TwoStageInstance,
    sampler: &mut dyn ScenarioSampler,
    k: u64,
    c: f64,
    seed: u64,
) -> Result<SampledPolicy, TwoStageError> {
    if k == 0 {
        return Err(TwoStageError::Parameter("k must be positive".into()));
    }
    let mut rng = trial_rng(seed, 0);
    let samples: Vec<usize> = (0..k).map(|_| sampler.sample(&mut rng)).collect();
    policy_from_empirical(instance, EmpiricalDistribution::from_samples(&samples)?, c)
}

/// Round-Augment policy trained on a given empirical distribution.
pub fn policy_from_empirical(
    instance: &TwoStageInstance,
    empirical: EmpiricalDistribution,
    c: f64,
) -> Result<SampledPolicy, TwoStageError> {
    let trained = empirical.to_instance(instance)?;
    let solution = solve_lp_on(&trained);
    let policy = RoundAugmentPolicy::new(instance, &solution, c)?;
    Ok(SampledPolicy {
        empirical,
        solution,
        policy,
    })
}

/// One row of a gap table.
#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    pub n: usize,
    pub lp_on: Scalar,
    pub opt_on: Scalar,
    pub ratio: Scalar,
    /// LPon, optimum online and their ratio in `Q(√2)`, where the weights
    /// live there.
    pub lp_on_exact: Option<QuadSqrt2>,
    pub opt_on_exact: Option<QuadSqrt2>,
    pub ratio_exact: Option<QuadSqrt2>,
    /// Closed-form optimum online, where one is known.
    pub closed_form: Option<QuadSqrt2>,
}

/// LPon, optimum online and their ratio on the 8-cycle instance.
pub fn gap_eight_cycle() -> GapRow {
    let instance = crate::instance::make_eight_cycle();
    let lp_on = solve_lp_on(&instance).objective;
    let (opt_on, _) = brute_force_opt_online(&instance).expect("eight-cycle is within the oracle cap");
    GapRow {
        n: 1,
        ratio: &opt_on / &lp_on,
        lp_on,
        opt_on,
        lp_on_exact: None,
        opt_on_exact: None,
        ratio_exact: None,
        closed_form: None,
    }
}

/// `(1 + √2)·n`, the heavy weight of edge gap member `n`.
fn edge_gap_heavy(n: usize) -> QuadSqrt2 {
    let n = Rational::from_int(n as i64);
    QuadSqrt2::new(n.clone(), n)
}

/// Best expected online value on the edge gap family when `m` of the `n`
/// first-stage nodes are matched, maximized over integral `m`. With `m`
/// nodes matched, a scenario pair is blocked only if both its offline nodes
/// are taken, which happens for `m(m−1)/2` of the `C(2n, 2)` pairs.
pub fn edge_gap_closed_form(n: usize) -> QuadSqrt2 {
    let nq = n as i64;
    let pairs = nq * (2 * nq - 1);
    (0..=nq)
        .map(|m| {
            let served = QuadSqrt2::rational(ratio(pairs - m * (m - 1) / 2, pairs));
            QuadSqrt2::from_int(m) + served * edge_gap_heavy(n)
        })
        .reduce(|a, b| if b > a { b } else { a })
        .expect("m ranges over at least {0}")
}

/// Weight conversion into `Q(√2)` for edge gap member `n`. The instance
/// stores the heavy weight as a float; it is replaced by `(1 + √2)·n` after
/// checking the two agree.
fn edge_gap_weight(n: usize) -> impl Fn(&Scalar) -> Option<QuadSqrt2> {
    let heavy = edge_gap_heavy(n);
    move |s: &Scalar| match s {
        Scalar::Exact(q) => Some(QuadSqrt2::rational(q.clone())),
        Scalar::Float(v) => ((v - heavy.to_f64()).abs() <= 1e-12 * v.abs()).then(|| heavy.clone()),
    }
}

/// Brute-force optimum online on edge gap member `n`, computed in `Q(√2)`.
pub fn edge_gap_opt_exact(n: usize) -> Result<QuadSqrt2, TwoStageError> {
    let instance = crate::instance::make_edge_gap_family(n)?;
    check_oracle_size(&instance)?;
    let (value, _) = oracle(&instance, edge_gap_weight(n)).expect("every weight is rational or the heavy weight");
    Ok(value)
}

/// LPon optimum of edge gap member `n`, solved in `Q(√2)`.
pub fn edge_gap_lp_on_exact(n: usize) -> Result<QuadSqrt2, TwoStageError> {
    let instance = crate::instance::make_edge_gap_family(n)?;
    let lp = build_lp_on_with(&instance, edge_gap_weight(n)).expect("every weight is rational or the heavy weight");
    match lp.solve() {
        LpOutcome::Optimal(s) => Ok(s.objective),
        _ => Err(LpError::Solver("LPon is feasible and bounded").into()),
    }
}

/// Gap-table row for member `n` of the edge gap family.
pub fn gap_edge_family(n: usize) -> Result<GapRow, TwoStageError> {
    let instance = crate::instance::make_edge_gap_family(n)?;
    let lp_on = solve_lp_on(&instance).objective;
    let (opt_on, _) = brute_force_opt_online(&instance)?;
    let (lp_exact, opt_exact) = (edge_gap_lp_on_exact(n)?, edge_gap_opt_exact(n)?);
    Ok(GapRow {
        n,
        ratio: &opt_on / &lp_on,
        lp_on,
        opt_on,
        ratio_exact: Some(opt_exact.clone() / lp_exact.clone()),
        lp_on_exact: Some(lp_exact),
        opt_on_exact: Some(opt_exact),
        closed_form: Some(edge_gap_closed_form(n)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{make_edge_gap_family, make_eight_cycle, OfflineNode, Scenario, Stage, StageEdge};
    use crate::lp::{solve_lp_off, Relaxation};

    fn single_node() -> TwoStageInstance {
        let edge = StageEdge {
            online: 0,
            offline: 0,
            weight: None,
        };
        TwoStageInstance::new(
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
        .unwrap()
    }

    #[test]
    fn zero_scale_skips_stage_one() {
        let inst = make_eight_cycle();
        let sol = solve_lp_on(&inst);
        for theta in 0..2 {
            let run = round_augment(&inst, &sol, 0.0, 5, theta).unwrap();
            assert!(run.first_stage.is_empty());
            assert_eq!(run.value, 2.0);
        }
    }

    #[test]
    fn eight_cycle_runs() {
        let inst = make_eight_cycle();
        let sol = solve_lp_on(&inst);
        for seed in 0..200 {
            for theta in 0..2 {
                let run = round_augment(&inst, &sol, 1.0, seed, theta).unwrap();
                assert!(run.value == 3.0 || run.value == 4.0);
                assert!(run.is_disjoint());
            }
        }
    }

    #[test]
    fn unknown_scenario() {
        let inst = make_eight_cycle();
        let sol = solve_lp_on(&inst);
        assert!(matches!(
            round_augment(&inst, &sol, 1.0, 0, 2),
            Err(TwoStageError::UnknownScenario(2))
        ));
        assert!(matches!(
            round_augment(&inst, &sol, 1.5, 0, 0),
            Err(TwoStageError::Parameter(_))
        ));
    }

    #[test]
    fn eight_cycle_oracle() {
        let (v, m) = brute_force_opt_online(&make_eight_cycle()).unwrap();
        assert_eq!(v, Scalar::frac(7, 2));
        assert!(m.len() <= 2);
        let row = gap_eight_cycle();
        assert_eq!(row.lp_on, Scalar::int(4));
        assert_eq!(row.ratio, Scalar::frac(7, 8));
    }

    #[test]
    fn oracle_without_second_stage() {
        let base = make_eight_cycle();
        let inst = TwoStageInstance::new(
            WeightMode::Unweighted,
            base.offline_nodes().to_vec(),
            base.first_stage().clone(),
            vec![Scenario {
                probability: Scalar::one(),
                stage: Stage::default(),
            }],
        )
        .unwrap();
        assert_eq!(brute_force_opt_online(&inst).unwrap().0, Scalar::int(2));
    }

    #[test]
    fn edge_family_oracle_matches_closed_form() {
        for n in 1..=3 {
            let row = gap_edge_family(n).unwrap();
            assert_eq!(row.opt_on_exact, row.closed_form, "n = {n}");
            // LPon = (2 + √2)·n
            assert_eq!(
                row.lp_on_exact,
                Some(QuadSqrt2::new(ratio(2 * n as i64, 1), ratio(n as i64, 1)))
            );
            assert!(
                (row.opt_on.to_f64() - row.closed_form.unwrap().to_f64()).abs() < 1e-9,
                "n = {n}"
            );
        }
        // n = 1: both offline nodes are in the single scenario pair, so no
        // first-stage match beats 1 + √2 + 1 = 2 + √2.
        assert_eq!(edge_gap_closed_form(1), QuadSqrt2::new(ratio(2, 1), ratio(1, 1)));
    }

    #[test]
    fn oracle_cap() {
        let spec = crate::instance::RandomInstanceSpec {
            seed: 1,
            offline: 6,
            first_stage: 4,
            second_stage: 1,
            edge_density: 1.0,
            weight_mode: WeightMode::Unweighted,
            scenarios: 1,
        };
        let inst = crate::instance::make_random_instance(&spec).unwrap();
        assert!(matches!(
            brute_force_opt_online(&inst),
            Err(TwoStageError::CapExceeded { edges: 24, cap: 20 })
        ));
    }

    #[test]
    fn sample_sizes() {
        assert_eq!(sample_size_vertex(10, 0.1, 0.05).unwrap(), 3511);
        let k = sample_size_vertex(10, 0.05, 0.05).unwrap();
        assert!((k as f64 / 3511.0 - 4.0).abs() < 2e-3);
        assert_eq!(sample_size_edge(10, 0.1, 0.05, 2.0, 2.0).unwrap(), 3511);
        assert!(sample_size_vertex(10, 0.0, 0.05).is_err());
        assert!(sample_size_edge(10, 0.1, 0.05, 1.0, 2.0).is_err());
    }

    #[test]
    fn offline_round_single_node() {
        let inst = single_node();
        let mut sol = FractionalSolution::zeros(&inst, Relaxation::Offline);
        sol.x[0] = Scalar::frac(1, 2);
        sol.y[0][0] = Scalar::frac(1, 2);
        let freq = offline_match_frequencies(&inst, &sol, 20_000, 3, false).unwrap();
        assert!((freq[0] - 0.75).abs() < 4.0 * (0.25f64 / 20_000.0).sqrt());
        let run = offline_round(&inst, &sol, 9, 0).unwrap();
        assert!(run.is_disjoint());
    }

    #[test]
    fn offline_round_integral_first_stage() {
        let inst = single_node();
        let mut sol = solve_lp_off(&inst);
        sol.x[0] = Scalar::one();
        sol.y[0][0] = Scalar::zero();
        let run = offline_round(&inst, &sol, 1, 0).unwrap();
        assert_eq!(run.first_stage.edges(), &[(0, 0)]);
        assert!(run.second_stage.is_empty());
    }

    #[test]
    fn empirical_distribution_with_true_support_matches() {
        let inst = make_eight_cycle();
        let exact = EmpiricalDistribution::from_counts(vec![(0, 1), (1, 1)]).unwrap();
        let trained = policy_from_empirical(&inst, exact, 1.0).unwrap();
        assert_eq!(trained.solution.x, solve_lp_on(&inst).x);
        let mut sampler = InstanceSampler::new(&inst);
        let sampled = sample_based_round_augment(&inst, &mut sampler, 100, 1.0, 4).unwrap();
        assert_eq!(sampled.empirical.total, 100);
        assert!(sample_based_round_augment(&inst, &mut sampler, 0, 1.0, 4).is_err());
    }

    #[test]
    fn edge_family_runs_are_disjoint() {
        let inst = make_edge_gap_family(2).unwrap();
        let sol = solve_lp_on(&inst);
        for seed in 0..50 {
            let run = round_augment(&inst, &sol, C_EDGE, seed, (seed % 6) as usize).unwrap();
            assert!(run.is_disjoint());
        }
    }
}
