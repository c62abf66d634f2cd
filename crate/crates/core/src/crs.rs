//! Contention resolution over explicit active-set distributions: a monotone
//! star scheme with exact selection marginals, the λ-bounded existence test,
//! and the numeric bound used by the star scheme.
//!
//! Sets over the ground set `[n]` are bitmasks.

use rand::{Rng, RngExt};
use serde::Serialize;
use thiserror::Error;

use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::numeric::C_EDGE;

/// Largest ground set for which all priority orders are enumerated.
pub const MAX_STAR_ELEMENTS: usize = 8;
/// Largest ground set for the monotonicity check.
pub const MAX_MONOTONE_CHECK: usize = 5;
/// Largest ground set for the λ-bounded existence LP.
pub const MAX_LAMBDA_ELEMENTS: usize = 12;

const PROB_TOL: f64 = 1e-9;
const PRECONDITION_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum CrsError {
    #[error("active-set distribution: {0}")]
    Distribution(String),
    #[error("targets: {0}")]
    Targets(String),
    #[error("ground set of {n} elements exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("no scheme exists: Pr[A meets {subset:?}] = {covered} < c·Σy = {required}")]
    Precondition {
        subset: Vec<usize>,
        covered: f64,
        required: f64,
    },
    #[error("feasible family is not downward closed: {set:?} is missing")]
    NotDownwardClosed { set: Vec<usize> },
    #[error("feasible family is empty")]
    EmptyFamily,
    #[error("internal LP failure: {0}")]
    Lp(&'static str),
}

pub fn members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

fn mask_of(items: &[usize]) -> u32 {
    items.iter().fold(0, |m, &i| m | 1 << i)
}

/// Explicit joint distribution of the active set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActiveSetDistribution {
    n: usize,
    support: Vec<(u32, f64)>,
}

impl ActiveSetDistribution {
    pub fn new(n: usize, support: Vec<(u32, f64)>) -> Result<Self, CrsError> {
        if n > 31 {
            return Err(CrsError::TooLarge { n, cap: 31 });
        }
        let mut total = 0.0;
        for &(mask, p) in &support {
            if mask >> n != 0 {
                return Err(CrsError::Distribution(format!(
                    "set {:?} leaves the ground set",
                    members(mask)
                )));
            }
            if !(0.0..=1.0 + PROB_TOL).contains(&p) {
                return Err(CrsError::Distribution(format!("probability {p} outside [0, 1]")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(CrsError::Distribution(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            n,
            support: support.into_iter().filter(|&(_, p)| p > 0.0).collect(),
        })
    }

    /// Independent activations with the given marginals.
    pub fn independent(marginals: &[f64]) -> Result<Self, CrsError> {
        let n = marginals.len();
        if n > 20 {
            return Err(CrsError::TooLarge { n, cap: 20 });
        }
        if let Some(p) = marginals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(CrsError::Distribution(format!("marginal {p} outside [0, 1]")));
        }
        let support = (0..1u32 << n)
            .map(|mask| {
                let p = (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            marginals[i]
                        } else {
                            1.0 - marginals[i]
                        }
                    })
                    .product();
                (mask, p)
            })
            .collect();
        Self::new(n, support)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[(u32, f64)] {
        &self.support
    }

    pub fn prob_meets(&self, subset: u32) -> f64 {
        self.support
            .iter()
            .filter(|(a, _)| a & subset != 0)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.prob_meets(1 << i)).collect()
    }
}

/// Select the first active, non-abstaining element in `order`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PriorityRule {
    pub order: Vec<usize>,
    pub abstain: u32,
}

impl PriorityRule {
    pub fn select(&self, active: u32) -> Option<usize> {
        let eligible = active & !self.abstain;
        self.order.iter().copied().find(|&i| eligible >> i & 1 == 1)
    }
}

/// Mixture of priority rules followed by per-element thinning.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrsScheme {
    pub n: usize,
    pub rules: Vec<PriorityRule>,
    pub weights: Vec<f64>,
    pub thinning: Vec<f64>,
}

impl CrsScheme {
    /// `Pr[i selected | active set]` for every `i`.
    pub fn selection_given(&self, active: u32) -> Vec<f64> {
        let mut sel = vec![0.0; self.n];
        for (rule, w) in self.rules.iter().zip(&self.weights) {
            if let Some(i) = rule.select(active) {
                sel[i] += w;
            }
        }
        sel.iter_mut().zip(&self.thinning).for_each(|(s, t)| *s *= t);
        sel
    }

    /// Exact selection marginals under `dist`.
    pub fn marginals(&self, dist: &ActiveSetDistribution) -> Vec<f64> {
        let mut total = vec![0.0; self.n];
        for &(active, p) in dist.support() {
            for (t, s) in total.iter_mut().zip(self.selection_given(active)) {
                *t += p * s;
            }
        }
        total
    }

    /// Checks `Pr[i selected | A] ≥ Pr[i selected | B]` for all `i ∈ A ⊆ B`.
    pub fn is_monotone(&self) -> Result<bool, CrsError> {
        if self.n > MAX_MONOTONE_CHECK {
            return Err(CrsError::TooLarge {
                n: self.n,
                cap: MAX_MONOTONE_CHECK,
            });
        }
        let full = (1u32 << self.n) - 1;
        let table: Vec<Vec<f64>> = (0..=full).map(|a| self.selection_given(a)).collect();
        for a in 0..=full {
            // Every superset b of a.
            let rest = full & !a;
            let mut extra = rest;
            loop {
                let b = a | extra;
                if members(a)
                    .into_iter()
                    .any(|i| table[a as usize][i] + PRECONDITION_TOL < table[b as usize][i])
                {
                    return Ok(false);
                }
                if extra == 0 {
                    break;
                }
                extra = (extra - 1) & rest;
            }
        }
        Ok(true)
    }
}

/// Applies one sampled rule to `active`, then thins.
pub fn crs_select<R: Rng + ?Sized>(scheme: &CrsScheme, active: u32, rng: &mut R) -> Option<usize> {
    if active == 0 || scheme.rules.is_empty() {
        return None;
    }
    let mut u: f64 = rng.random();
    let mut chosen = scheme.rules.len() - 1;
    for (k, w) in scheme.weights.iter().enumerate() {
        if u < *w {
            chosen = k;
            break;
        }
        u -= w;
    }
    let i = scheme.rules[chosen].select(active)?;
    rng.random_bool(scheme.thinning[i].clamp(0.0, 1.0)).then_some(i)
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut all = vec![current.clone()];
    loop {
        let Some(k) = (1..n).rev().find(|&k| current[k - 1] < current[k]) else {
            return all;
        };
        let l = (k..n)
            .rev()
            .find(|&l| current[k - 1] < current[l])
            .expect("successor exists");
        current.swap(k - 1, l);
        current[k..].reverse();
        all.push(current.clone());
    }
}

/// Monotone scheme selecting each `i` with probability exactly `c·y_i`, with
/// `c = 2√2 − 2`.
pub fn build_star_crs(y: &[f64], dist: &ActiveSetDistribution) -> Result<CrsScheme, CrsError> {
    build_star_crs_with(y, dist, C_EDGE)
}

/// [`build_star_crs`] for an arbitrary scale `c ∈ [0, 1]`.
pub fn build_star_crs_with(y: &[f64], dist: &ActiveSetDistribution, c: f64) -> Result<CrsScheme, CrsError> {
    let n = y.len();
    if n != dist.n() {
        return Err(CrsError::Targets(format!(
            "{n} targets for a ground set of {}",
            dist.n()
        )));
    }
    if n > MAX_STAR_ELEMENTS {
        return Err(CrsError::TooLarge {
            n,
            cap: MAX_STAR_ELEMENTS,
        });
    }
    if y.iter().any(|v| v.is_nan() || *v < 0.0) || y.iter().sum::<f64>() > 1.0 + PROB_TOL {
        return Err(CrsError::Targets("need y ≥ 0 with Σy ≤ 1".into()));
    }
    for subset in 1..1u32 << n {
        let covered = dist.prob_meets(subset);
        let required = c * members(subset).iter().map(|&i| y[i]).sum::<f64>();
        if covered + PRECONDITION_TOL < required {
            return Err(CrsError::Precondition {
                subset: members(subset),
                covered,
                required,
            });
        }
    }
    let zero_targets = mask_of(&(0..n).filter(|&i| y[i] == 0.0).collect::<Vec<_>>());
    let orders = permutations(n);
    // q[φ][i] = Pr[i is the first eligible active element under φ].
    let q: Vec<Vec<f64>> = orders
        .iter()
        .map(|order| {
            let rule = PriorityRule {
                order: order.clone(),
                abstain: zero_targets,
            };
            let mut row = vec![0.0; n];
            for &(active, p) in dist.support() {
                if let Some(i) = rule.select(active) {
                    row[i] += p;
                }
            }
            row
        })
        .collect();
    // Maximize t subject to Σ_φ λ_φ q_φi ≥ t·c·y_i, Σλ = 1, t ≤ 1.
    let t = orders.len();
    let mut objective = vec![0.0; t + 1];
    objective[t] = 1.0;
    let mut lp = LinearProgram::new(t + 1, objective);
    for i in (0..n).filter(|&i| y[i] > 0.0) {
        let mut row: Vec<(usize, f64)> = (0..t).filter(|&k| q[k][i] > 0.0).map(|k| (k, q[k][i])).collect();
        row.push((t, -c * y[i]));
        lp.add(row, Relation::Ge, 0.0);
    }
    lp.add((0..t).map(|k| (k, 1.0)).collect(), Relation::Eq, 1.0);
    lp.add(vec![(t, 1.0)], Relation::Le, 1.0);
    let solution = match lp.solve() {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(CrsError::Lp("infeasible")),
        LpOutcome::Unbounded => return Err(CrsError::Lp("unbounded")),
    };
    if solution.x[t] < 1.0 - PROB_TOL {
        return Err(CrsError::Lp("priority mixture cannot reach the targets"));
    }
    let mut rules = Vec::new();
    let mut weights = Vec::new();
    for (k, order) in orders.into_iter().enumerate() {
        if solution.x[k] > 0.0 {
            rules.push(PriorityRule {
                order,
                abstain: zero_targets,
            });
            weights.push(solution.x[k]);
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut scheme = CrsScheme {
        n,
        rules,
        weights,
        thinning: vec![1.0; n],
    };
    // Thin each element from its pre-thinning marginal down to c·y_i.
    let before = scheme.marginals(dist);
    scheme.thinning = (0..n)
        .map(|i| {
            if y[i] == 0.0 {
                0.0
            } else {
                (c * y[i] / before[i]).min(1.0)
            }
        })
        .collect();
    Ok(scheme)
}

/// `h(m) = c + c^m (1 − 1/m)^m`.
pub fn star_bound_h(m: u32) -> f64 {
    assert!(m >= 1, "h is defined for m ≥ 1");
    let mf = m as f64;
    C_EDGE + C_EDGE.powi(m as i32) * (1.0 - 1.0 / mf).powi(m as i32)
}

/// Outcome of the λ-bounded existence test.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum LambdaCrs {
    /// A scheme: for each active set in the support, a distribution over the
    /// maximal feasible sets it contains (conditional probabilities).
    Exists { choices: Vec<(u32, Vec<(u32, f64)>)> },
    /// Weights `w ≥ 0` (scaled so the largest is 1) with
    /// `Σ w_i λ_i − E[max_S w(S)] = gap > 0`.
    Counterexample { weights: Vec<f64>, gap: f64 },
}

impl LambdaCrs {
    pub fn exists(&self) -> bool {
        matches!(self, LambdaCrs::Exists { .. })
    }

    /// `Pr[i ∈ S]` when the scheme is replayed over `dist`.
    pub fn replay(&self, dist: &ActiveSetDistribution) -> Option<Vec<f64>> {
        let LambdaCrs::Exists { choices } = self else {
            return None;
        };
        let mut total = vec![0.0; dist.n()];
        for &(active, p) in dist.support() {
            let Some((_, sets)) = choices.iter().find(|(a, _)| *a == active) else {
                continue;
            };
            for &(set, q) in sets {
                for i in members(set) {
                    total[i] += p * q;
                }
            }
        }
        Some(total)
    }
}

fn maximal_feasible(family: &[u32], active: u32) -> Vec<u32> {
    let inside: Vec<u32> = family.iter().copied().filter(|s| s & !active == 0).collect();
    inside
        .iter()
        .copied()
        .filter(|&s| !inside.iter().any(|&t| t != s && t & s == s))
        .collect()
}

/// Decides whether a λ-bounded scheme exists for `(family, dist)`.
pub fn check_lambda_crs(family: &[u32], dist: &ActiveSetDistribution, lambda: &[f64]) -> Result<LambdaCrs, CrsError> {
    let n = dist.n();
    if n > MAX_LAMBDA_ELEMENTS {
        return Err(CrsError::TooLarge {
            n,
            cap: MAX_LAMBDA_ELEMENTS,
        });
    }
    if lambda.len() != n || lambda.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(CrsError::Targets(format!("need {n} values of λ in [0, 1]")));
    }
    if family.is_empty() {
        return Err(CrsError::EmptyFamily);
    }
    let mut sorted = family.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &s in &sorted {
        if s >> n != 0 {
            return Err(CrsError::Targets(format!(
                "feasible set {:?} leaves the ground set",
                members(s)
            )));
        }
        for i in members(s) {
            let smaller = s & !(1 << i);
            if sorted.binary_search(&smaller).is_err() {
                return Err(CrsError::NotDownwardClosed { set: members(smaller) });
            }
        }
    }
    let blocks: Vec<(u32, f64, Vec<u32>)> = dist
        .support()
        .iter()
        .map(|&(a, p)| (a, p, maximal_feasible(&sorted, a)))
        .collect();

    // Primal: p_{S|A} ≥ 0 with Σ_S p_{S|A} = Pr[A] and Σ_{A, S ∋ i} p_{S|A} ≥ λ_i.
    let n_vars: usize = blocks.iter().map(|(_, _, s)| s.len()).sum();
    let mut primal = LinearProgram::new(n_vars, vec![0.0; n_vars]);
    let mut coverage = vec![Vec::new(); n];
    let mut var = 0;
    for (_, p, sets) in &blocks {
        primal.add((var..var + sets.len()).map(|k| (k, 1.0)).collect(), Relation::Eq, *p);
        for (k, &s) in sets.iter().enumerate() {
            for i in members(s) {
                coverage[i].push((var + k, 1.0));
            }
        }
        var += sets.len();
    }
    for (i, row) in coverage.into_iter().enumerate() {
        if lambda[i] > 0.0 {
            primal.add(row, Relation::Ge, lambda[i]);
        }
    }
    if let LpOutcome::Optimal(s) = primal.solve() {
        let mut var = 0;
        let choices = blocks
            .iter()
            .map(|(a, p, sets)| {
                let dist = sets
                    .iter()
                    .enumerate()
                    .map(|(k, &set)| (set, (s.x[var + k] / p).clamp(0.0, 1.0)))
                    .filter(|&(_, q)| q > 0.0)
                    .collect();
                var += sets.len();
                (*a, dist)
            })
            .collect();
        return Ok(LambdaCrs::Exists { choices });
    }

    // Separation: min Σ_A Pr[A] β_A − Σ λ_i w_i, β_A ≥ w(S) for maximal S ⊆ A, Σ w = 1.
    let n_blocks = blocks.len();
    let mut objective = vec![0.0; n + n_blocks];
    objective[..n].copy_from_slice(lambda);
    for (k, (_, p, _)) in blocks.iter().enumerate() {
        objective[n + k] = -p;
    }
    let mut dual = LinearProgram::new(n + n_blocks, objective);
    for (k, (_, _, sets)) in blocks.iter().enumerate() {
        for &s in sets {
            let mut row = vec![(n + k, 1.0)];
            row.extend(members(s).into_iter().map(|i| (i, -1.0)));
            dual.add(row, Relation::Ge, 0.0);
        }
    }
    dual.add((0..n).map(|i| (i, 1.0)).collect(), Relation::Eq, 1.0);
    let s = dual
        .solve()
        .optimal()
        .ok_or(CrsError::Lp("separation program failed"))?;
    let w = &s.x[..n];
    let expected_max: f64 = blocks
        .iter()
        .map(|(_, p, sets)| {
            p * sets
                .iter()
                .map(|&set| members(set).iter().map(|&i| w[i]).sum::<f64>())
                .fold(0.0, f64::max)
        })
        .sum();
    let scale = w.iter().copied().fold(0.0, f64::max);
    let gap = (w.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>() - expected_max) / scale;
    Ok(LambdaCrs::Counterexample {
        weights: w.iter().map(|v| v / scale).collect(),
        gap,
    })
}

/// Sets of right nodes that can be perfectly matched into the left side.
pub fn transversal_family(n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    let mut neighbors = vec![Vec::new(); n_right];
    for &(l, r) in edges {
        neighbors[r].push(l);
    }
    (0..1u32 << n_right)
        .filter(|&set| {
            // Kuhn's augmenting paths from each member.
            let mut owner: Vec<Option<usize>> = vec![None; n_left];
            fn augment(r: usize, neighbors: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
                for &l in &neighbors[r] {
                    if seen[l] {
                        continue;
                    }
                    seen[l] = true;
                    if owner[l].is_none_or(|other| augment(other, neighbors, owner, seen)) {
                        owner[l] = Some(r);
                        return true;
                    }
                }
                false
            }
            members(set)
                .into_iter()
                .all(|r| augment(r, &neighbors, &mut owner, &mut vec![false; n_left]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn single_element_is_pure_thinning() {
        let dist = ActiveSetDistribution::new(1, vec![(1, 1.0)]).unwrap();
        let scheme = build_star_crs(&[1.0], &dist).unwrap();
        assert!((scheme.thinning[0] - C_EDGE).abs() < 1e-12);
        assert!((scheme.marginals(&dist)[0] - C_EDGE).abs() < 1e-12);
    }

    #[test]
    fn two_elements_independent() {
        let dist = ActiveSetDistribution::independent(&[1.0 - C_EDGE / 2.0; 2]).unwrap();
        let scheme = build_star_crs(&[0.5, 0.5], &dist).unwrap();
        for m in scheme.marginals(&dist) {
            assert!((m - C_EDGE / 2.0).abs() < 1e-9);
        }
        assert!(scheme.is_monotone().unwrap());
    }

    #[test]
    fn three_elements_independent() {
        let dist = ActiveSetDistribution::independent(&[1.0 - 2.0 * C_EDGE / 3.0; 3]).unwrap();
        let scheme = build_star_crs(&[1.0 / 3.0; 3], &dist).unwrap();
        for m in scheme.marginals(&dist) {
            assert!((m - C_EDGE / 3.0).abs() < 1e-9);
        }
        assert!(scheme.is_monotone().unwrap());
    }

    #[test]
    fn precondition_failure_names_subset() {
        // Both elements active together with probability 1/2 only.
        let dist = ActiveSetDistribution::new(2, vec![(0b11, 0.5), (0, 0.5)]).unwrap();
        match build_star_crs(&[0.5, 0.5], &dist) {
            Err(CrsError::Precondition { subset, .. }) => assert!(!subset.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn select_respects_active_set() {
        let dist = ActiveSetDistribution::independent(&[1.0 - C_EDGE / 2.0; 2]).unwrap();
        let scheme = build_star_crs(&[0.5, 0.5], &dist).unwrap();
        let mut rng = trial_rng(1, 0);
        assert_eq!(crs_select(&scheme, 0, &mut rng), None);
        for _ in 0..100 {
            assert_ne!(crs_select(&scheme, 0b01, &mut rng), Some(1));
        }
        let sure = CrsScheme {
            n: 2,
            rules: vec![PriorityRule {
                order: vec![1, 0],
                abstain: 0,
            }],
            weights: vec![1.0],
            thinning: vec![1.0, 1.0],
        };
        assert_eq!(crs_select(&sure, 0b01, &mut rng), Some(0));
    }

    #[test]
    fn h_values() {
        assert!((star_bound_h(1) - C_EDGE).abs() < 1e-15);
        assert!((star_bound_h(2) - 1.0).abs() < 1e-12);
        assert!((star_bound_h(3) - 0.996).abs() < 1e-3);
    }

    #[test]
    fn lambda_zero_exists() {
        let dist = ActiveSetDistribution::new(2, vec![(0b11, 1.0)]).unwrap();
        let out = check_lambda_crs(&[0, 1, 2], &dist, &[0.0, 0.0]).unwrap();
        assert!(out.exists());
    }

    #[test]
    fn lambda_counterexample_on_one_uniform() {
        let dist = ActiveSetDistribution::new(2, vec![(0b11, 1.0)]).unwrap();
        match check_lambda_crs(&[0, 1, 2], &dist, &[0.6, 0.6]).unwrap() {
            LambdaCrs::Counterexample { weights, gap } => {
                assert!((weights[0] - 1.0).abs() < 1e-9 && (weights[1] - 1.0).abs() < 1e-9);
                assert!(gap > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lambda_rejects_non_downward_closed() {
        let dist = ActiveSetDistribution::new(2, vec![(0b11, 1.0)]).unwrap();
        assert!(matches!(
            check_lambda_crs(&[0, 0b11], &dist, &[0.1, 0.1]),
            Err(CrsError::NotDownwardClosed { .. })
        ));
    }

    #[test]
    fn star_transversal_additive_guarantee() {
        // One center adjacent to four leaves: the family is 1-uniform.
        let family = transversal_family(1, 4, &[(0, 0), (0, 1), (0, 2), (0, 3)]);
        assert_eq!(family.len(), 5);
        let x = [0.1, 0.2, 0.3, 0.4];
        let dist = ActiveSetDistribution::independent(&x).unwrap();
        let lambda: Vec<f64> = x.iter().map(|v| v * (1.0 + v) / 2.0).collect();
        let out = check_lambda_crs(&family, &dist, &lambda).unwrap();
        let achieved = out.replay(&dist).unwrap();
        for (a, l) in achieved.iter().zip(&lambda) {
            assert!(*a >= l - 1e-9);
        }
    }

    #[test]
    fn transversal_family_of_path() {
        // Left {0, 1}; right 0 - l0 - right 1 - l1 - right 2.
        let family = transversal_family(2, 3, &[(0, 0), (0, 1), (1, 1), (1, 2)]);
        assert!(family.contains(&0b011) && family.contains(&0b101) && family.contains(&0b110));
        assert!(!family.contains(&0b111));
    }

    #[test]
    fn permutations_are_complete() {
        let p = permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], vec![0, 1, 2, 3]);
        assert_eq!(p[23], vec![3, 2, 1, 0]);
    }
}
