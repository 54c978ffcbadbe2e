//! Exact rational linear programming.
//!
//! A dense two-phase primal simplex over [`Rational`] with Bland's
//! lowest-index rule for both the entering and the leaving variable, so
//! every run terminates and identical problems follow identical pivot
//! sequences.
//!
//! Every result carries a certificate that [`verify`] re-checks from the
//! original problem alone:
//!
//! * optimal: a point satisfying all constraints with `objective · point`
//!   equal to the reported optimum;
//! * infeasible: Farkas multipliers `w`, one per constraint, with
//!   `w_i >= 0` on `<=` rows, `w_i <= 0` on `>=` rows, `(wᵀA)_j >= 0` for
//!   nonnegative variables, `(wᵀA)_j = 0` for free ones and `wᵀb < 0`;
//! * unbounded: a feasible point and an improving recession direction.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub bound: Rational,
}

/// `maximize objective · x` subject to linear constraints. Variables are
/// nonnegative unless marked free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    variables: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    nonnegative: Vec<bool>,
}

impl LpProblem {
    /// Zero objective, no constraints, all variables nonnegative.
    pub fn new(variables: usize) -> Self {
        LpProblem {
            variables,
            objective: vec![Rational::zero(); variables],
            constraints: Vec::new(),
            nonnegative: vec![true; variables],
        }
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn is_nonnegative(&self, var: usize) -> bool {
        self.nonnegative[var]
    }

    pub fn set_objective(&mut self, objective: Vec<Rational>) -> Result<()> {
        self.check_len(objective.len())?;
        self.objective = objective;
        Ok(())
    }

    pub fn set_free(&mut self, var: usize) -> Result<()> {
        if var >= self.variables {
            return Err(Error::domain(format!("no variable {var}")));
        }
        self.nonnegative[var] = false;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        bound: Rational,
    ) -> Result<()> {
        self.check_len(coefficients.len())?;
        self.constraints.push(Constraint {
            coefficients,
            relation,
            bound,
        });
        Ok(())
    }

    /// Adds `Σ coef · x_var (relation) bound` from sparse terms.
    pub fn add_sparse(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        relation: Relation,
        bound: Rational,
    ) -> Result<()> {
        let mut row = vec![Rational::zero(); self.variables];
        for (var, coef) in terms {
            if var >= self.variables {
                return Err(Error::domain(format!("no variable {var}")));
            }
            row[var] += coef;
        }
        self.add_constraint(row, relation, bound)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.variables {
            return Err(Error::domain(format!(
                "row has {len} coefficients, problem has {} variables",
                self.variables
            )));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.objective.len() != self.variables || self.nonnegative.len() != self.variables {
            return Err(Error::domain(
                "objective length differs from variable count",
            ));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.variables {
                return Err(Error::domain(format!(
                    "constraint {i} has the wrong length"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present when optimal.
    pub optimum: Option<Rational>,
    /// Optimal point, or a feasible starting point when unbounded.
    pub point: Option<Vec<Rational>>,
    /// Farkas multipliers, one per constraint, when infeasible.
    pub farkas: Option<Vec<Rational>>,
    /// Improving recession direction when unbounded.
    pub ray: Option<Vec<Rational>>,
}

/// Where an original variable lives among the standard-form columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    Nonneg(usize),
    Free { plus: usize, minus: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs with the negated objective value in the last slot.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns allowed to enter the basis.
    enterable: usize,
    /// Index of the right-hand side column.
    rhs: usize,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.rhs
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let pivot = self.rows[r][k].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[k].clone();
            if factor.is_zero() {
                return;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = k;
    }

    /// Bland's rule. Returns the entering column when the tableau is
    /// unbounded in that direction.
    fn run(&mut self) -> Option<usize> {
        let rhs = self.rhs();
        loop {
            let k = (0..self.enterable).find(|&j| self.cost[j].is_negative())?;
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[k].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[k];
                let better = match &best {
                    None => true,
                    Some((b, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, k),
                None => return Some(k),
            }
        }
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let rhs = self.rhs();
        let mut cost: Vec<Rational> = costs.to_vec();
        cost.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    cost[j] -= cb * v;
                }
            }
        }
        debug_assert_eq!(cost.len(), rhs + 1);
        self.cost = cost;
    }

    fn basic_values(&self, columns: usize) -> Vec<Rational> {
        let rhs = self.rhs();
        let mut x = vec![Rational::zero(); columns];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < columns {
                x[b] = row[rhs].clone();
            }
        }
        x
    }
}

pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.variables;
    let m = problem.constraints.len();

    let mut layout = Vec::with_capacity(n);
    let mut next = 0;
    for j in 0..n {
        if problem.nonnegative[j] {
            layout.push(Column::Nonneg(next));
            next += 1;
        } else {
            layout.push(Column::Free {
                plus: next,
                minus: next + 1,
            });
            next += 2;
        }
    }
    let structural = next;
    let slack_count = problem
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let real = structural + slack_count;
    let total = real + m;

    // Standard form: every row flipped so its right-hand side is
    // nonnegative, then one artificial column per row.
    let mut flips = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut slack = structural;
    for (i, c) in problem.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); total + 1];
        for (j, a) in c.coefficients.iter().enumerate() {
            match layout[j] {
                Column::Nonneg(col) => row[col] = a.clone(),
                Column::Free { plus, minus } => {
                    row[plus] = a.clone();
                    row[minus] = -a.clone();
                }
            }
        }
        match c.relation {
            Relation::Le => {
                row[slack] = Rational::from_integer(1.into());
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = Rational::from_integer((-1).into());
                slack += 1;
            }
            Relation::Eq => {}
        }
        row[total] = c.bound.clone();
        let flip = c.bound.is_negative();
        if flip {
            for v in row.iter_mut() {
                *v = -std::mem::take(v);
            }
        }
        row[real + i] = Rational::from_integer(1.into());
        flips.push(flip);
        rows.push(row);
    }

    let mut tableau = Tableau {
        rows,
        cost: Vec::new(),
        basis: (real..total).collect(),
        enterable: total,
        rhs: total,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![Rational::zero(); total];
    for c in &mut phase1[real..] {
        *c = Rational::from_integer(1.into());
    }
    tableau.set_costs(&phase1);
    let unbounded = tableau.run();
    debug_assert!(unbounded.is_none(), "phase 1 is bounded below by zero");
    let infeasibility = -tableau.cost[total].clone();
    if infeasibility.is_positive() {
        // Duals y_i = 1 - reduced cost of artificial i; the Farkas vector
        // for the flipped rows is -y, unflipped back to the original rows.
        let farkas = (0..m)
            .map(|i| {
                let y = Rational::from_integer(1.into()) - &tableau.cost[real + i];
                if flips[i] {
                    y
                } else {
                    -y
                }
            })
            .collect();
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            optimum: None,
            point: None,
            farkas: Some(farkas),
            ray: None,
        });
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and dropped.
    let mut i = 0;
    while i < tableau.rows.len() {
        if tableau.basis[i] >= real {
            match (0..real).find(|&k| !tableau.rows[i][k].is_zero()) {
                Some(k) => tableau.pivot(i, k),
                None => {
                    tableau.rows.remove(i);
                    tableau.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2: minimize -objective over the real columns.
    let mut phase2 = vec![Rational::zero(); total];
    for (j, c) in problem.objective.iter().enumerate() {
        match layout[j] {
            Column::Nonneg(col) => phase2[col] = -c.clone(),
            Column::Free { plus, minus } => {
                phase2[plus] = -c.clone();
                phase2[minus] = c.clone();
            }
        }
    }
    tableau.enterable = real;
    tableau.set_costs(&phase2);
    let unbounded = tableau.run();

    let std_point = tableau.basic_values(real);
    let point = to_original(&layout, &std_point);

    if let Some(k) = unbounded {
        let mut direction = vec![Rational::zero(); real];
        direction[k] = Rational::from_integer(1.into());
        for (row, &b) in tableau.rows.iter().zip(&tableau.basis) {
            if b < real {
                direction[b] = -row[k].clone();
            }
        }
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            optimum: None,
            point: Some(point),
            farkas: None,
            ray: Some(to_original(&layout, &direction)),
        });
    }

    let optimum = dot(&problem.objective, &point);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        optimum: Some(optimum),
        point: Some(point),
        farkas: None,
        ray: None,
    })
}

fn to_original(layout: &[Column], std: &[Rational]) -> Vec<Rational> {
    layout
        .iter()
        .map(|c| match *c {
            Column::Nonneg(col) => std[col].clone(),
            Column::Free { plus, minus } => &std[plus] - &std[minus],
        })
        .collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

fn satisfied(lhs: &Rational, relation: Relation, rhs: &Rational) -> bool {
    match relation {
        Relation::Le => lhs <= rhs,
        Relation::Eq => lhs == rhs,
        Relation::Ge => lhs >= rhs,
    }
}

fn check_feasible(problem: &LpProblem, point: &[Rational]) -> Result<()> {
    if point.len() != problem.variables {
        return Err(Error::Verification("point has the wrong dimension".into()));
    }
    for (j, x) in point.iter().enumerate() {
        if problem.nonnegative[j] && x.is_negative() {
            return Err(Error::Verification(format!("variable {j} is negative")));
        }
    }
    for (i, c) in problem.constraints.iter().enumerate() {
        let lhs = dot(&c.coefficients, point);
        if !satisfied(&lhs, c.relation, &c.bound) {
            return Err(Error::Verification(format!(
                "constraint {i} violated: {lhs} {:?} {}",
                c.relation, c.bound
            )));
        }
    }
    Ok(())
}

/// Re-checks a solution's certificate against the problem with exact
/// arithmetic, independently of how the solution was produced.
pub fn verify(problem: &LpProblem, solution: &LpSolution) -> Result<()> {
    problem.validate()?;
    let missing = |what: &str| Error::Verification(format!("missing {what}"));
    match solution.status {
        LpStatus::Optimal => {
            let point = solution.point.as_ref().ok_or_else(|| missing("point"))?;
            let optimum = solution
                .optimum
                .as_ref()
                .ok_or_else(|| missing("optimum"))?;
            check_feasible(problem, point)?;
            if dot(&problem.objective, point) != *optimum {
                return Err(Error::Verification(
                    "objective at point differs from optimum".into(),
                ));
            }
        }
        LpStatus::Infeasible => {
            let w = solution
                .farkas
                .as_ref()
                .ok_or_else(|| missing("Farkas vector"))?;
            if w.len() != problem.constraints.len() {
                return Err(Error::Verification(
                    "Farkas vector has the wrong length".into(),
                ));
            }
            for (i, (wi, c)) in w.iter().zip(&problem.constraints).enumerate() {
                let ok = match c.relation {
                    Relation::Le => !wi.is_negative(),
                    Relation::Ge => !wi.is_positive(),
                    Relation::Eq => true,
                };
                if !ok {
                    return Err(Error::Verification(format!(
                        "multiplier {i} has the wrong sign"
                    )));
                }
            }
            for j in 0..problem.variables {
                let combo: Rational = w
                    .iter()
                    .zip(&problem.constraints)
                    .filter(|(wi, _)| !wi.is_zero())
                    .map(|(wi, c)| wi * &c.coefficients[j])
                    .sum();
                let ok = if problem.nonnegative[j] {
                    !combo.is_negative()
                } else {
                    combo.is_zero()
                };
                if !ok {
                    return Err(Error::Verification(format!(
                        "combined coefficient of variable {j} is {combo}"
                    )));
                }
            }
            let rhs: Rational = w
                .iter()
                .zip(&problem.constraints)
                .map(|(wi, c)| wi * &c.bound)
                .sum();
            if !rhs.is_negative() {
                return Err(Error::Verification(format!(
                    "combined right-hand side {rhs} is not negative"
                )));
            }
        }
        LpStatus::Unbounded => {
            let point = solution.point.as_ref().ok_or_else(|| missing("point"))?;
            let ray = solution.ray.as_ref().ok_or_else(|| missing("ray"))?;
            check_feasible(problem, point)?;
            if ray.len() != problem.variables {
                return Err(Error::Verification("ray has the wrong dimension".into()));
            }
            for (j, d) in ray.iter().enumerate() {
                if problem.nonnegative[j] && d.is_negative() {
                    return Err(Error::Verification(format!(
                        "ray leaves variable {j} bound"
                    )));
                }
            }
            for (i, c) in problem.constraints.iter().enumerate() {
                let lhs = dot(&c.coefficients, ray);
                if !satisfied(&lhs, c.relation, &Rational::zero()) {
                    return Err(Error::Verification(format!("ray leaves constraint {i}")));
                }
            }
            if !dot(&problem.objective, ray).is_positive() {
                return Err(Error::Verification(
                    "ray does not improve the objective".into(),
                ));
            }
        }
    }
    Ok(())
}
