//! Exact sparse row reduction over ℚ.
//!
//! Rows are [`Vector`]s keyed by column. A row in an [`Echelon`] always has
//! its pivot as its smallest column and coefficient 1 there.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::lincomb::Vector;
use crate::scalar::Scalar;

/// Incrementally maintained row-echelon basis of a row space.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Vector>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, column: usize) -> bool {
        self.rows.contains_key(&column)
    }

    /// Residual of `row` after eliminating every pivot column it meets.
    pub fn reduce(&self, row: &Vector) -> Vector {
        let mut row = row.clone();
        let mut floor = 0usize;
        loop {
            let next = row.keys().copied().find(|&c| c >= floor && self.rows.contains_key(&c));
            let Some(col) = next else { return row };
            let factor = row.coeff(&col);
            row.add_scaled(&-factor, &self.rows[&col]);
            floor = col + 1;
        }
    }

    /// Adds `row`; returns the new pivot column, or `None` if it was dependent.
    pub fn insert(&mut self, row: &Vector) -> Option<usize> {
        let mut row = self.reduce(row);
        let (&lead, c) = row.iter().next()?;
        let c = c.clone();
        if !c.is_one() {
            row = row.scaled(&(Scalar::one() / c));
        }
        // Keep every pivot the leading column of its row.
        let lower: Vec<usize> = self.rows.range(..lead).map(|(&p, _)| p).collect();
        for p in lower {
            let factor = self.rows[&p].coeff(&lead);
            if !factor.is_zero() {
                let updated = {
                    let mut r = self.rows[&p].clone();
                    r.add_scaled(&-factor, &row);
                    r
                };
                self.rows.insert(p, updated);
            }
        }
        self.rows.insert(lead, row);
        Some(lead)
    }

    /// `true` iff `row` lies in the row space.
    pub fn contains(&self, row: &Vector) -> bool {
        self.reduce(row).is_zero()
    }

    /// Fully reduced rows keyed by pivot.
    pub fn rows(&self) -> &BTreeMap<usize, Vector> {
        &self.rows
    }
}

/// Solves `Σ_c row[c]·x_c = rhs` for every `(row, rhs)`; free unknowns are set to zero.
///
/// Unknowns are columns `0..n_unknowns`. Returns `None` if inconsistent.
pub fn solve(equations: &[(Vector, Scalar)], n_unknowns: usize) -> Option<Vector> {
    let mut echelon = Echelon::new();
    for (row, rhs) in equations {
        debug_assert!(row.keys().all(|&c| c < n_unknowns));
        let mut augmented = row.clone();
        augmented.add_term(n_unknowns, rhs.clone());
        if echelon.insert(&augmented) == Some(n_unknowns) {
            return None;
        }
    }
    let mut solution = Vector::new();
    for (&p, row) in echelon.rows() {
        solution.add_term(p, row.coeff(&n_unknowns));
    }
    Some(solution)
}

/// Basis of `{x : Σ_c row[c]·x_c = 0 for every row}` in `n_unknowns` variables.
pub fn kernel(rows: &[Vector], n_unknowns: usize) -> Vec<Vector> {
    let mut echelon = Echelon::new();
    for row in rows {
        echelon.insert(row);
    }
    let mut basis = Vec::new();
    for free in (0..n_unknowns).filter(|c| !echelon.is_pivot(*c)) {
        let mut v = Vector::single(free, Scalar::one());
        for (&p, row) in echelon.rows() {
            let c = row.coeff(&free);
            if !c.is_zero() {
                v.add_term(p, -c);
            }
        }
        basis.push(v);
    }
    basis
}

/// Standard basis vectors among `candidates` completing `span` to the span of
/// `span ∪ candidates`, chosen greedily from the left.
pub fn complement(span: &[Vector], candidates: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut echelon = Echelon::new();
    for v in span {
        echelon.insert(v);
    }
    candidates.into_iter().filter(|&j| echelon.insert(&Vector::basis(j)).is_some()).collect()
}

/// Coordinates of `target` in the linearly independent family `basis`.
pub fn coordinates(basis: &[Vector], target: &Vector) -> Option<Vector> {
    // Unknown i multiplies basis[i]; one equation per ambient column.
    let mut by_column: BTreeMap<usize, Vector> = BTreeMap::new();
    for (i, b) in basis.iter().enumerate() {
        for (&c, a) in b.iter() {
            by_column.entry(c).or_default().add_term(i, a.clone());
        }
    }
    let mut equations: Vec<(Vector, Scalar)> = by_column.iter().map(|(c, row)| (row.clone(), target.coeff(c))).collect();
    for (&c, value) in target.iter() {
        if !by_column.contains_key(&c) {
            equations.push((Vector::new(), value.clone()));
        }
    }
    solve(&equations, basis.len())
}

/// Rank of a family of vectors.
pub fn rank(vectors: &[Vector]) -> usize {
    let mut echelon = Echelon::new();
    vectors.iter().filter(|v| echelon.insert(v).is_some()).count()
}
