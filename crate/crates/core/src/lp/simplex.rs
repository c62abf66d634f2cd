//! Two-phase dense-tableau simplex with Bland's rule, generic over the
//! numeric field. Variables are non-negative; the objective is maximized.

use crate::numeric::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint<T> {
    /// Sparse row: `(variable, coefficient)`.
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub n_vars: usize,
    /// Maximized; one entry per variable.
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// One dual value per constraint, in the constraint's original orientation.
    pub duals: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn optimal(self) -> Option<LpSolution<T>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl<T: Field> LinearProgram<T> {
    pub fn new(n_vars: usize, objective: Vec<T>) -> Self {
        assert_eq!(objective.len(), n_vars);
        Self {
            n_vars,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.n_vars));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome<T> {
        Tableau::build(self).run(self)
    }
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    n_cols: usize,
    /// Columns `>= first_artificial` are artificial.
    first_artificial: usize,
    /// Column that held the identity entry of each row initially.
    initial_basic: Vec<usize>,
    flipped: Vec<bool>,
}

impl<T: Field> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.constraints.len();
        let mut relations = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for c in &lp.constraints {
            let flip = c.rhs.is_neg();
            flipped.push(flip);
            relations.push(match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            });
        }
        let n_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
        let n_art = relations.iter().filter(|r| **r != Relation::Le).count();
        let first_artificial = lp.n_vars + n_slack;
        let n_cols = first_artificial + n_art;

        let mut rows = vec![vec![T::zero(); n_cols]; m];
        let mut rhs = Vec::with_capacity(m);
        let mut basis = vec![0; m];
        let mut slack = lp.n_vars;
        let mut art = first_artificial;
        for (r, c) in lp.constraints.iter().enumerate() {
            let sign = if flipped[r] { -T::one() } else { T::one() };
            for (j, v) in &c.coeffs {
                rows[r][*j] = rows[r][*j].clone() + sign.clone() * v.clone();
            }
            rhs.push(sign * c.rhs.clone());
            match relations[r] {
                Relation::Le => {
                    rows[r][slack] = T::one();
                    basis[r] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    rows[r][slack] = -T::one();
                    slack += 1;
                    rows[r][art] = T::one();
                    basis[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    rows[r][art] = T::one();
                    basis[r] = art;
                    art += 1;
                }
            }
        }
        let initial_basic = basis.clone();
        Self {
            rows,
            rhs,
            basis,
            n_cols,
            first_artificial,
            initial_basic,
            flipped,
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        self.rows[r][j] = T::one();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (k, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    row[k] = row[k].clone() - f.clone() * pv.clone();
                }
            }
            row[j] = T::zero();
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        self.basis[r] = j;
    }

    /// Maximizes `cost · columns` from the current basis. Columns `>= limit`
    /// never enter. Returns false when unbounded.
    fn optimize(&mut self, cost: &[T], limit: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (r, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[r][j].is_zero() {
                        reduced = reduced - cost[b].clone() * self.rows[r][j].clone();
                    }
                }
                if reduced.is_pos() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][j].is_pos() {
                    continue;
                }
                let ratio = self.rhs[r].clone() / self.rows[r][j].clone();
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        let diff = ratio.clone() - best_ratio.clone();
                        if diff.is_neg() || (!diff.is_pos() && self.basis[r] < self.basis[best]) {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leaving else { return false };
            self.pivot(r, j);
        }
    }

    fn run(mut self, lp: &LinearProgram<T>) -> LpOutcome<T> {
        if self.first_artificial < self.n_cols {
            let mut phase_one = vec![T::zero(); self.n_cols];
            for c in phase_one.iter_mut().skip(self.first_artificial) {
                *c = -T::one();
            }
            self.optimize(&phase_one, self.n_cols);
            let infeasibility = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(b, _)| **b >= self.first_artificial)
                .fold(T::zero(), |acc, (_, v)| acc + v.clone());
            if infeasibility.is_pos() {
                return LpOutcome::Infeasible;
            }
            // Drive zero-valued artificials out of the basis where possible;
            // a row with no structural entry is redundant and keeps its artificial.
            for r in 0..self.rows.len() {
                if self.basis[r] < self.first_artificial {
                    continue;
                }
                if let Some(j) = (0..self.first_artificial).find(|&j| !self.rows[r][j].is_negligible()) {
                    self.pivot(r, j);
                }
            }
        }
        let mut cost = vec![T::zero(); self.n_cols];
        cost[..lp.n_vars].clone_from_slice(&lp.objective);
        if !self.optimize(&cost, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![T::zero(); lp.n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < lp.n_vars {
                x[b] = self.rhs[r].clone();
            }
        }
        let objective = x
            .iter()
            .zip(&lp.objective)
            .fold(T::zero(), |acc, (v, c)| acc + v.clone() * c.clone());
        let duals = (0..self.rows.len())
            .map(|k| {
                let col = self.initial_basic[k];
                let value = self.basis.iter().enumerate().fold(T::zero(), |acc, (r, &b)| {
                    acc + cost[b].clone() * self.rows[r][col].clone()
                });
                if self.flipped[k] {
                    -value
                } else {
                    value
                }
            })
            .collect();
        LpOutcome::Optimal(LpSolution { x, objective, duals })
    }
}
