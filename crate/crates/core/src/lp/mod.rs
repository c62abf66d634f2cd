//! The online relaxation LPon and the offline relaxation LPoff.
//!
//! Variable order: first-stage edges in instance order, then each scenario's
//! edges in scenario order.

mod simplex;

pub use simplex::{Constraint, LinearProgram, LpOutcome, LpSolution, Relation};

use serde_json::{json, Value};
use thiserror::Error;

use crate::instance::TwoStageInstance;
use crate::numeric::{Field, Rational, Scalar};

/// Constraint tolerance for the independent feasibility walker.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

/// Which relaxation a solution belongs to; selects the feasibility rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relaxation {
    Online,
    Offline,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("instance has inexact data; the exact backend cannot represent it")]
    InexactData,
    #[error("solver reported an {0} program")]
    Solver(&'static str),
}

#[derive(Debug, Error, PartialEq)]
pub enum FeasibilityViolation {
    #[error("solution shape does not match the instance: {0}")]
    Shape(String),
    #[error("{stage}: edge #{edge} value {value} outside [0, 1]")]
    Bound { stage: String, edge: usize, value: f64 },
    #[error("offline node `{node}` in scenario {scenario}: x_i + y_i = {load} > 1")]
    Coupling { node: String, scenario: usize, load: f64 },
    #[error("offline node `{node}`: x_i + E[y_i] = {load} > 1")]
    ExpectedCoupling { node: String, load: f64 },
    #[error("offline node `{node}` in scenario {scenario}: second-stage load {load} > 1")]
    OfflineCapacity { node: String, scenario: usize, load: f64 },
    #[error("{stage}: online node `{node}` has load {load} > 1")]
    OnlineCapacity { stage: String, node: String, load: f64 },
}

/// Fractional first-stage values `x` and per-scenario second-stage values `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalSolution {
    pub relaxation: Relaxation,
    pub backend: Backend,
    pub x: Vec<Scalar>,
    pub y: Vec<Vec<Scalar>>,
    pub objective: Scalar,
}

impl FractionalSolution {
    /// All-zero solution shaped like `instance`.
    pub fn zeros(instance: &TwoStageInstance, relaxation: Relaxation) -> Self {
        Self {
            relaxation,
            backend: Backend::Exact,
            x: vec![Scalar::zero(); instance.first_stage().edges.len()],
            y: instance
                .scenarios()
                .iter()
                .map(|s| vec![Scalar::zero(); s.stage.edges.len()])
                .collect(),
            objective: Scalar::zero(),
        }
    }

    pub fn x_f64(&self) -> Vec<f64> {
        self.x.iter().map(Scalar::to_f64).collect()
    }

    pub fn y_f64(&self, theta: usize) -> Vec<f64> {
        self.y[theta].iter().map(Scalar::to_f64).collect()
    }

    /// Fractional degree of each offline node in stage one.
    pub fn x_offline(&self, instance: &TwoStageInstance) -> Vec<f64> {
        let mut load = vec![0.0; instance.num_offline()];
        for (e, v) in instance.first_stage().edges.iter().zip(&self.x) {
            load[e.offline] += v.to_f64();
        }
        load
    }

    /// Expected second-stage fractional degree `E_θ[y_i^θ]` of each offline node.
    pub fn expected_y_offline(&self, instance: &TwoStageInstance) -> Vec<f64> {
        let mut load = vec![0.0; instance.num_offline()];
        for (s, ys) in instance.scenarios().iter().zip(&self.y) {
            let p = s.probability.to_f64();
            for (e, v) in s.stage.edges.iter().zip(ys) {
                load[e.offline] += p * v.to_f64();
            }
        }
        load
    }
}

fn variable_count(instance: &TwoStageInstance) -> usize {
    instance.first_stage().edges.len() + instance.scenarios().iter().map(|s| s.stage.edges.len()).sum::<usize>()
}

fn scenario_offsets(instance: &TwoStageInstance) -> Vec<usize> {
    let mut offset = instance.first_stage().edges.len();
    instance
        .scenarios()
        .iter()
        .map(|s| {
            let start = offset;
            offset += s.stage.edges.len();
            start
        })
        .collect()
}

fn objective<T: Field>(instance: &TwoStageInstance, weight: &impl Fn(&Scalar) -> Option<T>) -> Option<Vec<T>> {
    let mut c = Vec::with_capacity(variable_count(instance));
    for e in &instance.first_stage().edges {
        c.push(weight(&instance.edge_weight(e))?);
    }
    for s in instance.scenarios() {
        let p = T::from_scalar(&s.probability)?;
        for e in &s.stage.edges {
            c.push(p.clone() * weight(&instance.edge_weight(e))?);
        }
    }
    Some(c)
}

/// Online capacity rows shared by both relaxations.
fn add_online_capacity<T: Field>(lp: &mut LinearProgram<T>, instance: &TwoStageInstance, offsets: &[usize]) {
    let mut add_stage = |nodes: usize, edges: &[crate::instance::StageEdge], base: usize| {
        let mut rows = vec![Vec::new(); nodes];
        for (k, e) in edges.iter().enumerate() {
            rows[e.online].push((base + k, T::one()));
        }
        for row in rows.into_iter().filter(|r| !r.is_empty()) {
            lp.add(row, Relation::Le, T::one());
        }
    };
    add_stage(instance.first_stage().nodes.len(), &instance.first_stage().edges, 0);
    for (s, &base) in instance.scenarios().iter().zip(offsets) {
        add_stage(s.stage.nodes.len(), &s.stage.edges, base);
    }
}

fn first_stage_terms<T: Field>(instance: &TwoStageInstance) -> Vec<Vec<(usize, T)>> {
    let mut terms = vec![Vec::new(); instance.num_offline()];
    for (k, e) in instance.first_stage().edges.iter().enumerate() {
        terms[e.offline].push((k, T::one()));
    }
    terms
}

/// LPon over field `T`; `None` when `T` cannot represent the instance data.
pub fn build_lp_on<T: Field>(instance: &TwoStageInstance) -> Option<LinearProgram<T>> {
    build_lp_on_with(instance, T::from_scalar)
}

/// [`build_lp_on`] with a custom conversion of effective edge weights.
pub fn build_lp_on_with<T: Field>(
    instance: &TwoStageInstance,
    weight: impl Fn(&Scalar) -> Option<T>,
) -> Option<LinearProgram<T>> {
    let mut lp = LinearProgram::new(variable_count(instance), objective(instance, &weight)?);
    let offsets = scenario_offsets(instance);
    let first = first_stage_terms::<T>(instance);
    for (s, &base) in instance.scenarios().iter().zip(&offsets) {
        let mut rows = first.clone();
        for (k, e) in s.stage.edges.iter().enumerate() {
            rows[e.offline].push((base + k, T::one()));
        }
        for row in rows.into_iter().filter(|r| !r.is_empty()) {
            lp.add(row, Relation::Le, T::one());
        }
    }
    add_online_capacity(&mut lp, instance, &offsets);
    Some(lp)
}

/// LPoff over field `T`; `None` when `T` cannot represent the instance data.
pub fn build_lp_off<T: Field>(instance: &TwoStageInstance) -> Option<LinearProgram<T>> {
    let mut lp = LinearProgram::new(variable_count(instance), objective(instance, &T::from_scalar)?);
    let offsets = scenario_offsets(instance);
    let mut expected = first_stage_terms::<T>(instance);
    for (s, &base) in instance.scenarios().iter().zip(&offsets) {
        let p = T::from_scalar(&s.probability)?;
        let mut per_scenario = vec![Vec::new(); instance.num_offline()];
        for (k, e) in s.stage.edges.iter().enumerate() {
            if p.is_pos() {
                expected[e.offline].push((base + k, p.clone()));
            }
            per_scenario[e.offline].push((base + k, T::one()));
        }
        for row in per_scenario.into_iter().filter(|r| !r.is_empty()) {
            lp.add(row, Relation::Le, T::one());
        }
    }
    for row in expected.into_iter().filter(|r| !r.is_empty()) {
        lp.add(row, Relation::Le, T::one());
    }
    add_online_capacity(&mut lp, instance, &offsets);
    Some(lp)
}

fn default_backend(instance: &TwoStageInstance) -> Backend {
    if instance.is_exact() {
        Backend::Exact
    } else {
        Backend::Float
    }
}

fn solve_with<T: Field>(
    instance: &TwoStageInstance,
    lp: Option<LinearProgram<T>>,
    relaxation: Relaxation,
    backend: Backend,
) -> Result<FractionalSolution, LpError> {
    let lp = lp.ok_or(LpError::InexactData)?;
    let solution = match lp.solve() {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(LpError::Solver("infeasible")),
        LpOutcome::Unbounded => return Err(LpError::Solver("unbounded")),
    };
    let mut values = solution.x.into_iter().map(Field::into_scalar);
    let x = values.by_ref().take(instance.first_stage().edges.len()).collect();
    let y = instance
        .scenarios()
        .iter()
        .map(|s| values.by_ref().take(s.stage.edges.len()).collect())
        .collect();
    Ok(FractionalSolution {
        relaxation,
        backend,
        x,
        y,
        objective: solution.objective.into_scalar(),
    })
}

/// Optimal LPon solution; exact whenever the instance data is rational.
pub fn solve_lp_on(instance: &TwoStageInstance) -> FractionalSolution {
    solve_lp_on_with(instance, default_backend(instance)).expect("LPon is feasible and bounded")
}

pub fn solve_lp_on_with(instance: &TwoStageInstance, backend: Backend) -> Result<FractionalSolution, LpError> {
    match backend {
        Backend::Exact => solve_with(instance, build_lp_on::<Rational>(instance), Relaxation::Online, backend),
        Backend::Float => solve_with(instance, build_lp_on::<f64>(instance), Relaxation::Online, backend),
    }
}

/// Optimal LPoff solution; exact whenever the instance data is rational.
pub fn solve_lp_off(instance: &TwoStageInstance) -> FractionalSolution {
    solve_lp_off_with(instance, default_backend(instance)).expect("LPoff is feasible and bounded")
}

pub fn solve_lp_off_with(instance: &TwoStageInstance, backend: Backend) -> Result<FractionalSolution, LpError> {
    match backend {
        Backend::Exact => solve_with(
            instance,
            build_lp_off::<Rational>(instance),
            Relaxation::Offline,
            backend,
        ),
        Backend::Float => solve_with(instance, build_lp_off::<f64>(instance), Relaxation::Offline, backend),
    }
}

/// Checks the solution against its relaxation's constraints directly.
pub fn check_feasibility(
    instance: &TwoStageInstance,
    solution: &FractionalSolution,
) -> Result<(), FeasibilityViolation> {
    let first = instance.first_stage();
    if solution.x.len() != first.edges.len() {
        return Err(FeasibilityViolation::Shape(format!(
            "{} first-stage values for {} edges",
            solution.x.len(),
            first.edges.len()
        )));
    }
    if solution.y.len() != instance.scenarios().len() {
        return Err(FeasibilityViolation::Shape(format!(
            "{} scenario blocks for {} scenarios",
            solution.y.len(),
            instance.scenarios().len()
        )));
    }
    let node_id = |i: usize| instance.offline_nodes()[i].id.clone();
    let bounds = |stage: &str, values: &[Scalar]| {
        for (edge, v) in values.iter().enumerate() {
            let value = v.to_f64();
            if !(-FEASIBILITY_TOL..=1.0 + FEASIBILITY_TOL).contains(&value) || !value.is_finite() {
                return Err(FeasibilityViolation::Bound {
                    stage: stage.into(),
                    edge,
                    value,
                });
            }
        }
        Ok(())
    };
    let online = |stage: &str, nodes: &[String], edges: &[crate::instance::StageEdge], values: &[Scalar]| {
        let mut load = vec![0.0; nodes.len()];
        for (e, v) in edges.iter().zip(values) {
            load[e.online] += v.to_f64();
        }
        match load.iter().position(|&l| l > 1.0 + FEASIBILITY_TOL) {
            Some(a) => Err(FeasibilityViolation::OnlineCapacity {
                stage: stage.into(),
                node: nodes[a].clone(),
                load: load[a],
            }),
            None => Ok(()),
        }
    };
    bounds("first_stage", &solution.x)?;
    online("first_stage", &first.nodes, &first.edges, &solution.x)?;
    let x_load = solution.x_offline(instance);
    for (theta, (s, ys)) in instance.scenarios().iter().zip(&solution.y).enumerate() {
        let name = format!("scenarios[{theta}]");
        if ys.len() != s.stage.edges.len() {
            return Err(FeasibilityViolation::Shape(format!(
                "{name}: {} values for {} edges",
                ys.len(),
                s.stage.edges.len()
            )));
        }
        bounds(&name, ys)?;
        online(&name, &s.stage.nodes, &s.stage.edges, ys)?;
        let mut y_load = vec![0.0; instance.num_offline()];
        for (e, v) in s.stage.edges.iter().zip(ys) {
            y_load[e.offline] += v.to_f64();
        }
        for i in 0..instance.num_offline() {
            match solution.relaxation {
                Relaxation::Online if x_load[i] + y_load[i] > 1.0 + FEASIBILITY_TOL => {
                    return Err(FeasibilityViolation::Coupling {
                        node: node_id(i),
                        scenario: theta,
                        load: x_load[i] + y_load[i],
                    })
                }
                Relaxation::Offline if y_load[i] > 1.0 + FEASIBILITY_TOL => {
                    return Err(FeasibilityViolation::OfflineCapacity {
                        node: node_id(i),
                        scenario: theta,
                        load: y_load[i],
                    })
                }
                _ => {}
            }
        }
    }
    if solution.relaxation == Relaxation::Offline {
        let expected = solution.expected_y_offline(instance);
        for i in 0..instance.num_offline() {
            if x_load[i] + expected[i] > 1.0 + FEASIBILITY_TOL {
                return Err(FeasibilityViolation::ExpectedCoupling {
                    node: node_id(i),
                    load: x_load[i] + expected[i],
                });
            }
        }
    }
    Ok(())
}

/// `Σ w̃ x + Σ_θ p^θ Σ w̃ y^θ` after verifying feasibility. Exact when every
/// value involved is exact.
pub fn lp_objective(
    instance: &TwoStageInstance,
    solution: &FractionalSolution,
) -> Result<Scalar, FeasibilityViolation> {
    check_feasibility(instance, solution)?;
    let mut total = Scalar::zero();
    for (e, v) in instance.first_stage().edges.iter().zip(&solution.x) {
        total = &total + &(&instance.edge_weight(e) * v);
    }
    for (s, ys) in instance.scenarios().iter().zip(&solution.y) {
        let mut stage = Scalar::zero();
        for (e, v) in s.stage.edges.iter().zip(ys) {
            stage = &stage + &(&instance.edge_weight(e) * v);
        }
        total = &total + &(&s.probability * &stage);
    }
    Ok(total)
}

fn scalar_json(v: &Scalar) -> Value {
    match v {
        Scalar::Exact(_) => match v.decimal_f64() {
            Some(d) => json!(d),
            None => json!(v.to_string()),
        },
        Scalar::Float(f) => json!(f),
    }
}

/// JSON mirroring the instance's edge keys, with a `backend` marker. Exact
/// values that are not finite decimals are written as `"n/d"` strings.
pub fn solution_to_json(instance: &TwoStageInstance, solution: &FractionalSolution) -> Value {
    let offline = instance.offline_nodes();
    let edges = |nodes: &[String], edges: &[crate::instance::StageEdge], values: &[Scalar]| -> Value {
        edges
            .iter()
            .zip(values)
            .map(|(e, v)| json!({"from": nodes[e.online], "to": offline[e.offline].id, "value": scalar_json(v)}))
            .collect()
    };
    let first = instance.first_stage();
    json!({
        "backend": solution.backend.as_str(),
        "relaxation": match solution.relaxation { Relaxation::Online => "online", Relaxation::Offline => "offline" },
        "objective": scalar_json(&solution.objective),
        "first_stage": {"edges": edges(&first.nodes, &first.edges, &solution.x)},
        "scenarios": instance.scenarios().iter().zip(&solution.y)
            .map(|(s, ys)| json!({"edges": edges(&s.stage.nodes, &s.stage.edges, ys)}))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{
        make_edge_gap_family, make_eight_cycle, OfflineNode, Scenario, Stage, StageEdge, WeightMode,
    };

    fn half_everywhere(instance: &TwoStageInstance) -> FractionalSolution {
        let mut s = FractionalSolution::zeros(instance, Relaxation::Online);
        s.x.iter_mut().for_each(|v| *v = Scalar::frac(1, 2));
        s.y.iter_mut().flatten().for_each(|v| *v = Scalar::frac(1, 2));
        s
    }

    #[test]
    fn eight_cycle_lp_on_is_four() {
        let inst = make_eight_cycle();
        let s = solve_lp_on(&inst);
        assert_eq!(s.backend, Backend::Exact);
        assert_eq!(s.objective, Scalar::int(4));
        assert_eq!(lp_objective(&inst, &s).unwrap(), Scalar::int(4));
        assert_eq!(lp_objective(&inst, &half_everywhere(&inst)).unwrap(), Scalar::int(4));
    }

    #[test]
    fn edge_gap_lp_on() {
        let inst = make_edge_gap_family(2).unwrap();
        let s = solve_lp_on(&inst);
        assert_eq!(s.backend, Backend::Float);
        let expected = (2.0 + 2f64.sqrt()) * 2.0;
        assert!((s.objective.to_f64() - expected).abs() < 1e-9);
        assert!((lp_objective(&inst, &half_everywhere(&inst)).unwrap().to_f64() - expected).abs() < 1e-9);
        assert!(matches!(
            solve_lp_on_with(&inst, Backend::Exact),
            Err(LpError::InexactData)
        ));
    }

    #[test]
    fn empty_instance() {
        let inst = TwoStageInstance::new(
            WeightMode::Unweighted,
            vec![OfflineNode {
                id: "i".into(),
                weight: None,
            }],
            Stage::default(),
            vec![Scenario {
                probability: Scalar::one(),
                stage: Stage::default(),
            }],
        )
        .unwrap();
        let s = solve_lp_on(&inst);
        assert_eq!(s.objective, Scalar::zero());
        assert!(s.x.is_empty() && s.y[0].is_empty());
        assert_eq!(
            lp_objective(&inst, &FractionalSolution::zeros(&inst, Relaxation::Online)).unwrap(),
            Scalar::zero()
        );
    }

    #[test]
    fn eight_cycle_lp_off_dominates() {
        let inst = make_eight_cycle();
        let off = solve_lp_off(&inst);
        assert!(off.objective.to_f64() >= 4.0);
        check_feasibility(&inst, &off).unwrap();
    }

    #[test]
    fn single_node_offline() {
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
        assert_eq!(solve_lp_off(&inst).objective, Scalar::one());
        assert_eq!(solve_lp_on(&inst).objective, Scalar::one());
    }

    #[test]
    fn vertex_weighted_objective_by_hand() {
        let base = make_eight_cycle();
        let mut offline = base.offline_nodes().to_vec();
        for (k, node) in offline.iter_mut().enumerate() {
            node.weight = Some(if k == 0 { Scalar::int(2) } else { Scalar::one() });
        }
        let inst = TwoStageInstance::new(
            WeightMode::VertexWeighted,
            offline,
            base.first_stage().clone(),
            base.scenarios().to_vec(),
        )
        .unwrap();
        // Every edge at 1/2: stage one touches each node once (weight sum 5
        // halved), each scenario likewise, weighted by 1/2 twice.
        let hand = 0.5 * 5.0 + 0.5 * (0.5 * 5.0) + 0.5 * (0.5 * 5.0);
        let value = lp_objective(&inst, &half_everywhere(&inst)).unwrap();
        assert_eq!(value, Scalar::frac(5, 1));
        assert_eq!(value.to_f64(), hand);
    }

    #[test]
    fn walker_rejects_violations() {
        let inst = make_eight_cycle();
        let mut s = half_everywhere(&inst);
        s.y[0][0] = Scalar::one();
        s.y[0][1] = Scalar::zero();
        assert!(matches!(
            lp_objective(&inst, &s),
            Err(FeasibilityViolation::Coupling { .. })
        ));
        let mut s = half_everywhere(&inst);
        s.x[0] = Scalar::frac(3, 4);
        assert!(matches!(
            check_feasibility(&inst, &s),
            Err(FeasibilityViolation::OnlineCapacity { .. })
        ));
        let mut s = half_everywhere(&inst);
        s.x[0] = Scalar::int(-1);
        assert!(matches!(
            check_feasibility(&inst, &s),
            Err(FeasibilityViolation::Bound { .. })
        ));
        let mut s = half_everywhere(&inst);
        s.x.pop();
        assert!(matches!(
            check_feasibility(&inst, &s),
            Err(FeasibilityViolation::Shape(_))
        ));
    }

    #[test]
    fn solution_json_marks_backend() {
        let inst = make_eight_cycle();
        let v = solution_to_json(&inst, &solve_lp_on(&inst));
        assert_eq!(v["backend"], "exact");
        assert_eq!(v["objective"], 4.0);
        assert_eq!(v["first_stage"]["edges"].as_array().unwrap().len(), 4);
        assert_eq!(v["scenarios"].as_array().unwrap().len(), 2);
    }
}
