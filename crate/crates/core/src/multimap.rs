//! Sparse graded multilinear maps with an explicit Σ_n symmetry.
//!
//! Entries are keyed by canonical words: nondecreasing flat indices for
//! symmetric and exterior maps, every ordered word for plain maps. The value
//! on any other word is recovered through the action sign.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{argument, Result};
use crate::graded::{
    action_sign_for, bubble_sort_parity, canonicalize, sorted_word_vanishes, GradedModule, Permutation, Symmetry,
};
use crate::lincomb::{Vector, WordComb};
use crate::scalar::{factorial, parity_sign, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    arity: usize,
    source: Arc<GradedModule>,
    target: Arc<GradedModule>,
    degree: i64,
    symmetry: Symmetry,
    entries: BTreeMap<Vec<usize>, Vector>,
}

/// Canonical basis words of the given length for a symmetry type.
pub fn canonical_words(module: &GradedModule, arity: usize, symmetry: Symmetry) -> Vec<Vec<usize>> {
    let dim = module.dim();
    let degrees = module.degrees();
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(arity);
    fn rec(
        dim: usize,
        arity: usize,
        degrees: &[i64],
        symmetry: Symmetry,
        word: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if word.len() == arity {
            out.push(word.clone());
            return;
        }
        let start = match (symmetry, word.last()) {
            (Symmetry::Plain, _) | (_, None) => 0,
            (_, Some(&last)) => last,
        };
        for i in start..dim {
            word.push(i);
            let ok = symmetry == Symmetry::Plain || !sorted_word_vanishes(&word[word.len().saturating_sub(2)..], |j| degrees[j], symmetry);
            if ok {
                rec(dim, arity, degrees, symmetry, word, out);
            }
            word.pop();
        }
    }
    rec(dim, arity, degrees, symmetry, &mut word, &mut out);
    out
}

/// One tensor slot of a Koszul tensor product of maps.
#[derive(Clone, Copy, Debug)]
pub enum Slot<'a> {
    Identity,
    Map(&'a MultiMap),
}

impl Slot<'_> {
    fn arity(&self) -> usize {
        match self {
            Slot::Identity => 1,
            Slot::Map(m) => m.arity,
        }
    }

    fn degree(&self) -> i64 {
        match self {
            Slot::Identity => 0,
            Slot::Map(m) => m.degree,
        }
    }
}

/// `(s_1⊗…⊗s_k)(w)` with the Koszul rule `(f⊗g)(a⊗b) = (−1)^{|g||a|} f(a)⊗g(b)`.
///
/// Returns the overall sign and one output vector per slot.
pub fn koszul_apply(slots: &[Slot<'_>], word: &[usize], degrees: &[i64]) -> (Scalar, Vec<Vector>) {
    let mut exponent = 0i64;
    let mut consumed_degree = 0i64;
    let mut position = 0usize;
    let mut outputs = Vec::with_capacity(slots.len());
    for slot in slots {
        let arity = slot.arity();
        let block = &word[position..position + arity];
        exponent += slot.degree() * consumed_degree;
        consumed_degree += block.iter().map(|&i| degrees[i]).sum::<i64>();
        position += arity;
        outputs.push(match slot {
            Slot::Identity => Vector::basis(block[0]),
            Slot::Map(m) => m.eval(block),
        });
    }
    debug_assert_eq!(position, word.len(), "slot arities must exhaust the word");
    (crate::scalar::minus_one_pow(exponent), outputs)
}

/// Expands `v_1 ⊙ … ⊙ v_k` (or `∧`) into canonical words.
pub fn word_product(vectors: &[Vector], degrees: &[i64], symmetry: Symmetry) -> WordComb {
    let mut out = WordComb::new();
    let mut word = Vec::with_capacity(vectors.len());
    fn rec(
        vectors: &[Vector],
        degrees: &[i64],
        symmetry: Symmetry,
        coeff: Scalar,
        word: &mut Vec<usize>,
        out: &mut WordComb,
    ) {
        if word.len() == vectors.len() {
            if let Some((odd, sorted)) = canonicalize(word, degrees, symmetry) {
                out.add_term(sorted, if odd { -coeff } else { coeff });
            }
            return;
        }
        for (&i, c) in vectors[word.len()].iter() {
            word.push(i);
            rec(vectors, degrees, symmetry, &coeff * c, word, out);
            word.pop();
        }
    }
    rec(vectors, degrees, symmetry, Scalar::one(), &mut word, &mut out);
    out
}

impl MultiMap {
    pub fn zero(
        arity: usize,
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        degree: i64,
        symmetry: Symmetry,
    ) -> Self {
        Self { arity, source, target, degree, symmetry, entries: BTreeMap::new() }
    }

    /// Tabulates `f` on every canonical word whose output degree occurs in the target.
    pub fn from_fn(
        arity: usize,
        source: Arc<GradedModule>,
        target: Arc<GradedModule>,
        degree: i64,
        symmetry: Symmetry,
        mut f: impl FnMut(&[usize]) -> Vector,
    ) -> Self {
        let mut map = Self::zero(arity, source, target, degree, symmetry);
        for word in canonical_words(&map.source, arity, symmetry) {
            let out_degree: i64 = word.iter().map(|&i| map.source.degree(i)).sum::<i64>() + degree;
            if map.target.indices_of_degree(out_degree).is_empty() {
                continue;
            }
            let value = f(&word);
            debug_assert!(value.keys().all(|&j| map.target.degree(j) == out_degree), "inhomogeneous value");
            if !value.is_zero() {
                map.entries.insert(word, value);
            }
        }
        map
    }

    pub fn identity(module: Arc<GradedModule>) -> Self {
        let mut map = Self::zero(1, module.clone(), module.clone(), 0, Symmetry::Symmetric);
        for i in 0..module.dim() {
            map.entries.insert(vec![i], Vector::basis(i));
        }
        map
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn source(&self) -> &Arc<GradedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedModule> {
        &self.target
    }

    /// Stored values on canonical words.
    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Vector> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `value` at `word` (any order); the action sign is folded in.
    pub fn insert(&mut self, word: &[usize], value: &Vector) -> Result<()> {
        if word.len() != self.arity {
            return argument(format!("word of length {} for a map of arity {}", word.len(), self.arity));
        }
        if let Some(&bad) = word.iter().find(|&&i| i >= self.source.dim()) {
            return argument(format!("source index {bad} out of range"));
        }
        let out_degree: i64 = word.iter().map(|&i| self.source.degree(i)).sum::<i64>() + self.degree;
        for &j in value.keys() {
            if j >= self.target.dim() || self.target.degree(j) != out_degree {
                return argument(format!("value component {j} violates the declared degree {}", self.degree));
            }
        }
        match canonicalize(word, self.source.degrees(), self.symmetry) {
            None if value.is_zero() => Ok(()),
            None => argument(format!("word {word:?} vanishes under the {:?} relation", self.symmetry)),
            Some((odd, key)) => {
                let slot = self.entries.entry(key.clone()).or_default();
                slot.add_scaled(&parity_sign(odd), value);
                if slot.is_zero() {
                    self.entries.remove(&key);
                }
                Ok(())
            }
        }
    }

    /// Value on an arbitrary (not necessarily canonical) basis word.
    pub fn eval(&self, word: &[usize]) -> Vector {
        debug_assert_eq!(word.len(), self.arity);
        match self.symmetry {
            Symmetry::Plain => self.entries.get(word).cloned().unwrap_or_default(),
            _ => {
                let mut sorted = word.to_vec();
                let degrees = self.source.degrees();
                let odd = bubble_sort_parity(&mut sorted, |i| degrees[i], self.symmetry);
                match self.entries.get(&sorted) {
                    Some(v) if odd => v.negated(),
                    Some(v) => v.clone(),
                    None => Vector::new(),
                }
            }
        }
    }

    /// Multilinear extension to arbitrary vector arguments.
    pub fn eval_vectors(&self, args: &[Vector]) -> Vector {
        debug_assert_eq!(args.len(), self.arity);
        let mut out = Vector::new();
        let mut word = Vec::with_capacity(self.arity);
        self.eval_rec(args, Scalar::one(), &mut word, &mut out);
        out
    }

    fn eval_rec(&self, args: &[Vector], coeff: Scalar, word: &mut Vec<usize>, out: &mut Vector) {
        if word.len() == args.len() {
            out.add_scaled(&coeff, &self.eval(word));
            return;
        }
        for (&i, c) in args[word.len()].iter() {
            word.push(i);
            self.eval_rec(args, &coeff * c, word, out);
            word.pop();
        }
    }

    /// Value on a combination of canonical words of the source power.
    pub fn eval_words(&self, words: &WordComb) -> Vector {
        let mut out = Vector::new();
        for (word, c) in words.iter() {
            if word.len() == self.arity {
                out.add_scaled(c, &self.eval(word));
            }
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity
            || self.degree != other.degree
            || self.symmetry != other.symmetry
            || self.source != other.source
            || self.target != other.target
        {
            return argument("maps differ in arity, degree, symmetry or modules");
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(&Scalar::one(), other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(&-Scalar::one(), other);
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, factor: &Scalar, other: &Self) {
        for (word, value) in &other.entries {
            let slot = self.entries.entry(word.clone()).or_default();
            slot.add_scaled(factor, value);
            if slot.is_zero() {
                self.entries.remove(word);
            }
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> Self {
        let mut out = Self::zero(self.arity, self.source.clone(), self.target.clone(), self.degree, self.symmetry);
        if !factor.is_zero() {
            out.entries = self.entries.iter().map(|(w, v)| (w.clone(), v.scaled(factor))).collect();
        }
        out
    }

    /// Same map with every ordered word stored explicitly.
    pub fn to_plain(&self) -> Self {
        if self.symmetry == Symmetry::Plain {
            return self.clone();
        }
        Self::from_fn(self.arity, self.source.clone(), self.target.clone(), self.degree, Symmetry::Plain, |w| {
            self.eval(w)
        })
    }

    /// First ordered word on which the two maps differ, with the residual `self − other`.
    pub fn first_difference(&self, other: &Self) -> Option<(Vec<usize>, Vector)> {
        let symmetry = if self.symmetry == other.symmetry { self.symmetry } else { Symmetry::Plain };
        for word in canonical_words(&self.source, self.arity, symmetry) {
            let residual = self.eval(&word).difference(&other.eval(&word));
            if !residual.is_zero() {
                return Some((word, residual));
            }
        }
        None
    }

    /// Equality as multilinear maps, independent of the stored symmetry type.
    pub fn same_values(&self, other: &Self) -> bool {
        self.arity == other.arity
            && self.source.degrees() == other.source.degrees()
            && self.first_difference(other).is_none()
    }

    /// Reinterprets the map with a new source and target of identical dimensions.
    pub fn with_modules(&self, source: Arc<GradedModule>, target: Arc<GradedModule>, degree: i64) -> Self {
        Self { source, target, degree, ..self.clone() }
    }

    /// `self ∘ α_n` for the chosen action; the result is equivariant for that action.
    pub fn antisymmetrize(&self, mode: Symmetry) -> Self {
        let perms = Permutation::all(self.arity);
        let degrees = self.source.degrees().to_vec();
        Self::from_fn(self.arity, self.source.clone(), self.target.clone(), self.degree, mode, |word| {
            let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
            let mut out = Vector::new();
            for sigma in &perms {
                let sign = action_sign_for(sigma, &word_degrees, mode).expect("orders match");
                out.add_scaled(&sign, &self.eval(&sigma.permute(word)));
            }
            out
        })
    }

    /// `self ∘ σ.` as a plain map: `(self∘σ.)(v) = sign(σ, v) · self(v_{σ(1)}, …)`.
    pub fn after_permutation(&self, sigma: &Permutation, mode: Symmetry) -> Result<Self> {
        if sigma.len() != self.arity {
            return argument("permutation order differs from the arity");
        }
        let degrees = self.source.degrees().to_vec();
        Ok(Self::from_fn(self.arity, self.source.clone(), self.target.clone(), self.degree, Symmetry::Plain, |word| {
            let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
            let sign = action_sign_for(sigma, &word_degrees, mode).expect("orders match");
            self.eval(&sigma.permute(word)).scaled(&sign)
        }))
    }

    /// `outer ∘ (s_1 ⊗ … ⊗ s_k)` as a plain map on the common source of the slots.
    pub fn tensor_compose(outer: &Self, slots: &[Slot<'_>], source: Arc<GradedModule>) -> Result<Self> {
        if slots.len() != outer.arity {
            return argument("number of slots differs from the outer arity");
        }
        for slot in slots {
            match slot {
                Slot::Identity if *outer.source != *source => return argument("identity slot changes modules"),
                Slot::Map(m) if *m.source != *source || *m.target != *outer.source => {
                    return argument("slot modules do not chain")
                }
                _ => {}
            }
        }
        let arity: usize = slots.iter().map(Slot::arity).sum();
        let degree = outer.degree + slots.iter().map(Slot::degree).sum::<i64>();
        let degrees = source.degrees().to_vec();
        Ok(Self::from_fn(arity, source, outer.target.clone(), degree, Symmetry::Plain, |word| {
            let (sign, vectors) = koszul_apply(slots, word, &degrees);
            outer.eval_vectors(&vectors).scaled(&sign)
        }))
    }

    /// `outer ∘ self` for a unary `outer`.
    pub fn then(&self, outer: &Self) -> Result<Self> {
        if outer.arity != 1 || *outer.source != *self.target {
            return argument("post-composition needs a unary map on the target");
        }
        let degree = self.degree + outer.degree;
        let mut out = Self::zero(self.arity, self.source.clone(), outer.target.clone(), degree, self.symmetry);
        for (word, value) in &self.entries {
            let image = outer.eval_vectors(std::slice::from_ref(value));
            if !image.is_zero() {
                out.entries.insert(word.clone(), image);
            }
        }
        Ok(out)
    }

    /// `self ∘ (inner ⊗ … ⊗ inner)` for a unary degree-0 `inner`; keeps the symmetry.
    pub fn precompose_linear(&self, inner: &Self) -> Result<Self> {
        if inner.arity != 1 || inner.degree != 0 || *inner.target != *self.source {
            return argument("pre-composition needs a unary degree-0 map into the source");
        }
        let images: Vec<Vector> = (0..inner.source.dim()).map(|i| inner.eval(&[i])).collect();
        Ok(Self::from_fn(self.arity, inner.source.clone(), self.target.clone(), self.degree, self.symmetry, |word| {
            let args: Vec<Vector> = word.iter().map(|&i| images[i].clone()).collect();
            self.eval_vectors(&args)
        }))
    }

    /// Converts between equivariance types by re-tabulating; valid only when
    /// the map is already equivariant for `symmetry`.
    pub fn relabel_symmetry(&self, symmetry: Symmetry) -> Self {
        Self::from_fn(self.arity, self.source.clone(), self.target.clone(), self.degree, symmetry, |w| self.eval(w))
    }

    /// Whether `self(σ.v) = self(v)` holds for every σ and basis word.
    pub fn is_equivariant(&self, mode: Symmetry) -> bool {
        let perms = Permutation::all(self.arity);
        let degrees = self.source.degrees();
        canonical_words(&self.source, self.arity, Symmetry::Plain).iter().all(|word| {
            let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
            let base = self.eval(word);
            perms.iter().all(|sigma| {
                let sign = action_sign_for(sigma, &word_degrees, mode).expect("orders match");
                self.eval(&sigma.permute(word)).scaled(&sign) == base
            })
        })
    }

    /// `n!`, the factor by which `α_n` rescales an already equivariant map.
    pub fn antisymmetrizer_factor(&self) -> Scalar {
        factorial(self.arity)
    }
}

impl std::fmt::Display for MultiMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (word, value) in &self.entries {
            let args: Vec<&str> = word.iter().map(|&i| self.source.label(i)).collect();
            let terms: Vec<String> = value
                .iter()
                .map(|(&j, c)| format!("{}·{}", crate::scalar::format_scalar(c), self.target.label(j)))
                .collect();
            writeln!(f, "({}) ↦ {}", args.join(", "), terms.join(" + "))?;
        }
        if self.entries.is_empty() {
            writeln!(f, "0")?;
        }
        Ok(())
    }
}
