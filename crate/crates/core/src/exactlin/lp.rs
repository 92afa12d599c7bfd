//! Dense two-phase simplex over the rationals.
//!
//! Pivoting follows Bland's rule (smallest eligible entering column,
//! smallest basic index on ratio ties), so degenerate programs terminate.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Maximize `objective . x` subject to the constraints and optional
/// per-variable bounds. Variables without bounds are free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    bounds: Vec<(Option<Rational>, Option<Rational>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        point: Vec<Rational>,
        value: Rational,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }
}

impl LinearProgram {
    /// A program maximizing `objective . x` over free variables.
    pub fn maximize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            bounds: vec![(None, None); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[(Option<Rational>, Option<Rational>)] {
        &self.bounds
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) {
        assert_eq!(coefficients.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.bounds[var] = (lower, upper);
    }
}

/// How an original variable is expressed in nonnegative standard variables.
struct Substitution {
    offset: Rational,
    terms: Vec<(usize, Rational)>,
}

pub fn solve(p: &LinearProgram) -> LpOutcome {
    let n = p.num_vars();
    let mut subs = Vec::with_capacity(n);
    let mut std_vars = 0usize;
    let mut extra_rows: Vec<(Vec<(usize, Rational)>, Rational)> = Vec::new();
    for (lower, upper) in &p.bounds {
        let sub = match (lower, upper) {
            (Some(l), Some(u)) => {
                let v = std_vars;
                std_vars += 1;
                extra_rows.push((vec![(v, Rational::one())], u - l));
                Substitution {
                    offset: l.clone(),
                    terms: vec![(v, Rational::one())],
                }
            }
            (Some(l), None) => {
                std_vars += 1;
                Substitution {
                    offset: l.clone(),
                    terms: vec![(std_vars - 1, Rational::one())],
                }
            }
            (None, Some(u)) => {
                std_vars += 1;
                Substitution {
                    offset: u.clone(),
                    terms: vec![(std_vars - 1, -Rational::one())],
                }
            }
            (None, None) => {
                std_vars += 2;
                Substitution {
                    offset: Rational::zero(),
                    terms: vec![
                        (std_vars - 2, Rational::one()),
                        (std_vars - 1, -Rational::one()),
                    ],
                }
            }
        };
        subs.push(sub);
    }

    // Rows in standard variables: (coefficients, relation, rhs).
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &p.constraints {
        let mut coeffs = vec![Rational::zero(); std_vars];
        let mut rhs = c.rhs.clone();
        for (a, sub) in c.coefficients.iter().zip(&subs) {
            if a.is_zero() {
                continue;
            }
            rhs -= a * &sub.offset;
            for (v, s) in &sub.terms {
                coeffs[*v] += a * s;
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (terms, rhs) in extra_rows {
        let mut coeffs = vec![Rational::zero(); std_vars];
        for (v, s) in terms {
            coeffs[v] = s;
        }
        rows.push((coeffs, Relation::Le, rhs));
    }
    let mut cost = vec![Rational::zero(); std_vars];
    for (c, sub) in p.objective.iter().zip(&subs) {
        for (v, s) in &sub.terms {
            cost[*v] += c * s;
        }
    }

    let std_point = match Tableau::build(rows, std_vars).run(&cost) {
        Phase::Infeasible => return LpOutcome::Infeasible,
        Phase::Unbounded => return LpOutcome::Unbounded,
        Phase::Optimal(x) => x,
    };
    let point: Vec<Rational> = subs
        .iter()
        .map(|sub| {
            sub.terms
                .iter()
                .fold(sub.offset.clone(), |acc, (v, s)| acc + s * &std_point[*v])
        })
        .collect();
    let value = p
        .objective
        .iter()
        .zip(&point)
        .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
    LpOutcome::Optimal { point, value }
}

enum Phase {
    Optimal(Vec<Rational>),
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `rows x (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    structural: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(rows: Vec<(Vec<Rational>, Relation, Rational)>, structural: usize) -> Self {
        let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = rows
            .into_iter()
            .map(|(c, rel, rhs)| {
                if rhs.is_negative() {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.into_iter().map(|x| -x).collect(), flipped, -rhs)
                } else {
                    (c, rel, rhs)
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_artificial = structural + slacks;
        let cols = first_artificial + artificials;
        let mut t = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut next_slack, mut next_art) = (structural, first_artificial);
        for (coeffs, rel, rhs) in rows.drain(..) {
            let mut row = coeffs;
            row.resize(cols + 1, Rational::zero());
            match rel {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            row[cols] = rhs;
            t.push(row);
        }
        Self {
            t,
            basis,
            cols,
            structural,
            first_artificial,
        }
    }

    fn run(mut self, cost: &[Rational]) -> Phase {
        if self.first_artificial < self.cols {
            let mut phase1 = vec![Rational::zero(); self.cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            // Phase one is bounded above by zero.
            let _ = self.optimize(&phase1, self.cols);
            let infeasibility: Rational = self
                .basis
                .iter()
                .zip(&self.t)
                .filter(|(b, _)| **b >= self.first_artificial)
                .map(|(_, row)| row[self.cols].clone())
                .sum();
            if infeasibility.is_positive() {
                return Phase::Infeasible;
            }
            self.drive_out_artificials();
        }
        let mut phase2 = vec![Rational::zero(); self.cols];
        phase2[..self.structural].clone_from_slice(cost);
        if !self.optimize(&phase2, self.first_artificial) {
            return Phase::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.structural];
        for (row, &b) in self.t.iter().zip(&self.basis) {
            if b < self.structural {
                x[b] = row[self.cols].clone();
            }
        }
        Phase::Optimal(x)
    }

    /// Maximizes `cost . x`, letting only columns `< allowed` enter.
    /// Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (row, &b) in self.t.iter().zip(&self.basis) {
                    if !row[j].is_zero() {
                        d -= &cost[b] * &row[j];
                    }
                }
                d.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[j];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((i, _)) = leaving else { return false };
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.t.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.t[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    // Redundant equality.
                    self.t.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}
