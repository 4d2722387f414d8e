//! Linear equations in the coefficients of an unknown symmetric multilinear map.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::graded::{GradedModule, Symmetry};
use crate::linalg::solve;
use crate::lincomb::Vector;
use crate::multimap::{canonical_words, koszul_apply, MultiMap, Slot};
use crate::scalar::{minus_one_pow, Scalar};

/// Output coordinate ↦ linear form in the unknowns.
pub(crate) type SymbolicVector = BTreeMap<usize, Vector>;

/// Unknown symmetric map `S^n(W) → W'` of fixed degree, restricted to the
/// canonical words accepted by a filter; other words are fixed to zero.
pub(crate) struct MapUnknowns {
    arity: usize,
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    degree: i64,
    index: BTreeMap<(Vec<usize>, usize), usize>,
    keys: Vec<(Vec<usize>, usize)>,
}

impl MapUnknowns {
    pub(crate) fn new(
        arity: usize,
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        degree: i64,
        filter: impl Fn(&[usize]) -> bool,
    ) -> Self {
        let mut index = BTreeMap::new();
        let mut keys = Vec::new();
        for word in canonical_words(&source, arity, Symmetry::Symmetric) {
            if !filter(&word) {
                continue;
            }
            let out: i64 = word.iter().map(|&i| source.degree(i)).sum::<i64>() + degree;
            for j in target.indices_of_degree(out) {
                index.insert((word.clone(), j), keys.len());
                keys.push((word.clone(), j));
            }
        }
        Self { arity, source, target, degree, index, keys }
    }

    pub(crate) fn len(&self) -> usize {
        self.keys.len()
    }

    pub(crate) fn eval_word(&self, word: &[usize]) -> SymbolicVector {
        let mut out = SymbolicVector::new();
        let Some((odd, sorted)) = crate::graded::canonicalize(word, self.source.degrees(), Symmetry::Symmetric) else {
            return out;
        };
        let sign = crate::scalar::parity_sign(odd);
        let out_degree: i64 = sorted.iter().map(|&i| self.source.degree(i)).sum::<i64>() + self.degree;
        for j in self.target.indices_of_degree(out_degree) {
            if let Some(&u) = self.index.get(&(sorted.clone(), j)) {
                out.entry(j).or_default().add_term(u, sign.clone());
            }
        }
        out
    }

    pub(crate) fn eval_vectors(&self, args: &[Vector]) -> SymbolicVector {
        let mut out = SymbolicVector::new();
        let mut word = Vec::with_capacity(self.arity);
        self.eval_rec(args, Scalar::from_integer(1.into()), &mut word, &mut out);
        out
    }

    fn eval_rec(&self, args: &[Vector], coeff: Scalar, word: &mut Vec<usize>, out: &mut SymbolicVector) {
        if word.len() == args.len() {
            add_symbolic(out, &coeff, &self.eval_word(word));
            return;
        }
        for (&i, c) in args[word.len()].iter() {
            word.push(i);
            self.eval_rec(args, &coeff * c, word, out);
            word.pop();
        }
    }

    /// `δ(x)(w) = Q_1'(x(w)) − (−1)^{|x|} Σ_i ± x(…, Q_1 w_i, …)` as a symbolic vector.
    pub(crate) fn delta_word(&self, q1: &MultiMap, q1_target: &MultiMap, word: &[usize]) -> SymbolicVector {
        let mut out = apply_linear(q1_target, &self.eval_word(word));
        let sign = -minus_one_pow(self.degree);
        let degrees = self.source.degrees();
        for i in 0..word.len() {
            let mut slots = vec![Slot::Identity; word.len()];
            slots[i] = Slot::Map(q1);
            let (koszul, vectors) = koszul_apply(&slots, word, degrees);
            add_symbolic(&mut out, &(&sign * koszul), &self.eval_vectors(&vectors));
        }
        out
    }

    pub(crate) fn to_map(&self, solution: &Vector) -> MultiMap {
        let mut map = MultiMap::zero(self.arity, self.source.clone(), self.target.clone(), self.degree, Symmetry::Symmetric);
        for (&u, c) in solution.iter() {
            let (word, j) = &self.keys[u];
            map.insert(word, &Vector::single(*j, c.clone())).expect("unknown keys are admissible");
        }
        map
    }
}

pub(crate) fn add_symbolic(out: &mut SymbolicVector, factor: &Scalar, other: &SymbolicVector) {
    for (j, form) in other {
        let entry = out.entry(*j).or_default();
        entry.add_scaled(factor, form);
        if entry.is_zero() {
            out.remove(j);
        }
    }
}

/// `L(x)` for a unary map `L` and a symbolic `x`.
pub(crate) fn apply_linear(map: &MultiMap, x: &SymbolicVector) -> SymbolicVector {
    let mut out = SymbolicVector::new();
    for (j, form) in x {
        for (k, c) in map.eval(&[*j]).iter() {
            let entry = out.entry(*k).or_default();
            entry.add_scaled(c, form);
            if entry.is_zero() {
                out.remove(k);
            }
        }
    }
    out
}

/// Collects `symbolic = target` coordinate-wise.
#[derive(Default)]
pub(crate) struct Equations {
    rows: Vec<(Vector, Scalar)>,
}

impl Equations {
    pub(crate) fn push(&mut self, symbolic: &SymbolicVector, target: &Vector) {
        for (j, form) in symbolic {
            self.rows.push((form.clone(), target.coeff(j)));
        }
        for (j, c) in target.iter() {
            if !symbolic.contains_key(j) && !c.is_zero() {
                self.rows.push((Vector::new(), c.clone()));
            }
        }
    }

    pub(crate) fn solve(&self, unknowns: &MapUnknowns) -> Option<MultiMap> {
        solve(&self.rows, unknowns.len()).map(|s| unknowns.to_map(&s))
    }
}
