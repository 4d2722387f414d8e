//! Graded modules, permutations, shuffles and the two Koszul sign conventions.
//!
//! A basis vector is addressed by its flat index in a [`GradedModule`]; flat
//! indices are ordered by `(degree, position)`, so sorting flat indices is the
//! canonical tuple order.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::scalar::{parity_sign, Scalar};

/// One homogeneous piece of a graded module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub degree: i64,
    pub labels: Vec<String>,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Finite-dimensional ℤ-graded module with labelled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    components: Vec<Component>,
    degrees: Vec<i64>,
    labels: Vec<String>,
    offsets: Vec<usize>,
}

impl GradedModule {
    /// Components must have strictly increasing degrees and globally unique labels.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let components: Vec<Component> =
            components.into_iter().filter(|c| !c.labels.is_empty()).collect();
        for pair in components.windows(2) {
            if pair[0].degree >= pair[1].degree {
                return argument(format!(
                    "component degrees must increase strictly, got {} then {}",
                    pair[0].degree, pair[1].degree
                ));
            }
        }
        let mut degrees = Vec::new();
        let mut labels = Vec::new();
        let mut offsets = Vec::new();
        let mut seen = HashMap::new();
        for component in &components {
            offsets.push(degrees.len());
            for label in &component.labels {
                if seen.insert(label.clone(), ()).is_some() {
                    return argument(format!("duplicate basis label {label:?}"));
                }
                degrees.push(component.degree);
                labels.push(label.clone());
            }
        }
        Ok(Self { components, degrees, labels, offsets })
    }

    pub fn zero() -> Self {
        Self { components: Vec::new(), degrees: Vec::new(), labels: Vec::new(), offsets: Vec::new() }
    }

    /// Builds a module from `(degree, label)` pairs listed in nondecreasing degree.
    pub fn from_basis<I, S>(basis: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, S)>,
        S: Into<String>,
    {
        let mut components: Vec<Component> = Vec::new();
        for (degree, label) in basis {
            match components.last_mut() {
                Some(last) if last.degree == degree => last.labels.push(label.into()),
                Some(last) if last.degree > degree => {
                    return argument("basis must be listed in nondecreasing degree");
                }
                _ => components.push(Component { degree, labels: vec![label.into()] }),
            }
        }
        Self::new(components)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn degree(&self, index: usize) -> i64 {
        self.degrees[index]
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Flat indices of the basis vectors of degree `degree`.
    pub fn indices_of_degree(&self, degree: i64) -> std::ops::Range<usize> {
        match self.components.iter().position(|c| c.degree == degree) {
            Some(k) => self.offsets[k]..self.offsets[k] + self.components[k].dim(),
            None => 0..0,
        }
    }

    /// `M[k]` with `M[k]^i = M^{i+k}`: every degree drops by `k`, labels are kept.
    pub fn shifted(&self, k: i64) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| Component { degree: c.degree - k, labels: c.labels.clone() })
            .collect();
        Self::new(components).expect("shifting preserves validity")
    }

    /// Direct sum with basis labels prefixed by the tags; returns the flat
    /// positions of the left and right summands inside the sum.
    pub fn direct_sum(&self, other: &Self, left_tag: &str, right_tag: &str) -> (Self, Vec<usize>, Vec<usize>) {
        let mut entries: Vec<(i64, usize, usize, String)> = Vec::new();
        for i in 0..self.dim() {
            entries.push((self.degree(i), 0, i, format!("{left_tag}{}", self.label(i))));
        }
        for i in 0..other.dim() {
            entries.push((other.degree(i), 1, i, format!("{right_tag}{}", other.label(i))));
        }
        entries.sort_by_key(|e| (e.0, e.1, e.2));
        let mut left = vec![0; self.dim()];
        let mut right = vec![0; other.dim()];
        for (pos, entry) in entries.iter().enumerate() {
            if entry.1 == 0 {
                left[entry.2] = pos;
            } else {
                right[entry.2] = pos;
            }
        }
        let sum = Self::from_basis(entries.into_iter().map(|e| (e.0, e.3))).expect("tags keep labels unique");
        (sum, left, right)
    }

    pub fn to_basis_tuple(&self, flat: &[usize]) -> BasisTuple {
        BasisTuple {
            indices: flat
                .iter()
                .map(|&i| {
                    let k = self.components.iter().position(|c| c.degree == self.degrees[i]).unwrap();
                    (self.degrees[i], i - self.offsets[k])
                })
                .collect(),
        }
    }

    pub fn flat_indices(&self, tuple: &BasisTuple) -> Result<Vec<usize>> {
        tuple
            .indices
            .iter()
            .map(|&(degree, position)| {
                let range = self.indices_of_degree(degree);
                if position < range.len() {
                    Ok(range.start + position)
                } else {
                    argument(format!("basis pair ({degree}, {position}) does not resolve"))
                }
            })
            .collect()
    }
}

/// Basis vectors named by `(degree, position within that degree)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisTuple {
    pub indices: Vec<(i64, usize)>,
}

/// Element of the symmetric group on `{1..n}` given by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &image in &images {
            if image == 0 || image > n || seen[image - 1] {
                return argument(format!("{images:?} is not a permutation of 1..{n}"));
            }
            seen[image - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of `i`, both 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different orders");
        Self { images: other.images.iter().map(|&i| self.images[i - 1]).collect() }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.len()];
        for (i, &image) in self.images.iter().enumerate() {
            images[image - 1] = i + 1;
        }
        Self { images }
    }

    /// `(x_{σ(1)}, …, x_{σ(n)})`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| items[i - 1].clone()).collect()
    }

    pub fn is_shuffle(&self, k: usize) -> bool {
        k <= self.len()
            && self.images[..k].windows(2).all(|w| w[0] < w[1])
            && self.images[k..].windows(2).all(|w| w[0] < w[1])
    }

    /// All of Σ_n in lexicographic order of image sequences.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fn rec(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if current.len() == n {
                out.push(Permutation { images: current.clone() });
                return;
            }
            for i in 0..n {
                if !used[i] {
                    used[i] = true;
                    current.push(i + 1);
                    rec(n, current, used, out);
                    current.pop();
                    used[i] = false;
                }
            }
        }
        rec(n, &mut current, &mut used, &mut out);
        out
    }
}

/// Which Σ_n action a multilinear map is equivariant for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// ε-action: `w_1⊗w_2 = (−1)^{w_1w_2} w_2⊗w_1` in `S(W)`.
    Symmetric,
    /// χ-action: `a_1⊗a_2 = −(−1)^{a_1a_2} a_2⊗a_1` in `Λ(L)`.
    Exterior,
    /// No equivariance; values are stored on every ordered tuple.
    Plain,
}

/// Parity of the sign picked up when two adjacent factors of degrees `a`, `b` swap.
pub(crate) fn swap_is_odd(a: i64, b: i64, symmetry: Symmetry) -> bool {
    let koszul = (a * b).rem_euclid(2) == 1;
    match symmetry {
        Symmetry::Symmetric => koszul,
        Symmetry::Exterior => !koszul,
        Symmetry::Plain => false,
    }
}

/// Sorts `word` (entries index `degrees`) by adjacent transpositions; returns
/// whether the accumulated sign is odd.
pub(crate) fn bubble_sort_parity(word: &mut [usize], degree: impl Fn(usize) -> i64, symmetry: Symmetry) -> bool {
    let mut odd = false;
    let n = word.len();
    for pass in 0..n {
        let mut swapped = false;
        for j in 0..n.saturating_sub(pass + 1) {
            if word[j] > word[j + 1] {
                odd ^= swap_is_odd(degree(word[j]), degree(word[j + 1]), symmetry);
                word.swap(j, j + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    odd
}

/// Whether a sorted word vanishes in the symmetric (repeated odd factor) or
/// exterior (repeated even factor) power.
pub(crate) fn sorted_word_vanishes(word: &[usize], degree: impl Fn(usize) -> i64, symmetry: Symmetry) -> bool {
    word.windows(2).any(|w| {
        w[0] == w[1]
            && match symmetry {
                Symmetry::Symmetric => degree(w[0]).rem_euclid(2) == 1,
                Symmetry::Exterior => degree(w[0]).rem_euclid(2) == 0,
                Symmetry::Plain => false,
            }
    })
}

/// Canonical representative of a basis word: `Some((odd, sorted))` with
/// `word = (−1)^odd · sorted`, or `None` when the word is zero.
pub fn canonicalize(word: &[usize], degrees: &[i64], symmetry: Symmetry) -> Option<(bool, Vec<usize>)> {
    if symmetry == Symmetry::Plain {
        return Some((false, word.to_vec()));
    }
    let mut sorted = word.to_vec();
    let odd = bubble_sort_parity(&mut sorted, |i| degrees[i], symmetry);
    if sorted_word_vanishes(&sorted, |i| degrees[i], symmetry) {
        None
    } else {
        Some((odd, sorted))
    }
}

fn action_sign(sigma: &Permutation, degrees: &[i64], symmetry: Symmetry) -> Result<Scalar> {
    if sigma.len() != degrees.len() {
        return argument(format!(
            "permutation of order {} applied to {} degrees",
            sigma.len(),
            degrees.len()
        ));
    }
    let mut word: Vec<usize> = sigma.images().iter().map(|&i| i - 1).collect();
    Ok(parity_sign(bubble_sort_parity(&mut word, |i| degrees[i], symmetry)))
}

/// `ε(σ, w)` with `w_{σ(1)}⊙…⊙w_{σ(n)} = ε · w_1⊙…⊙w_n`.
pub fn epsilon_sign(sigma: &Permutation, degrees: &[i64]) -> Result<Scalar> {
    action_sign(sigma, degrees, Symmetry::Symmetric)
}

/// `χ(σ, a)` with `a_{σ(1)}∧…∧a_{σ(n)} = χ · a_1∧…∧a_n`.
pub fn chi_sign(sigma: &Permutation, degrees: &[i64]) -> Result<Scalar> {
    action_sign(sigma, degrees, Symmetry::Exterior)
}

/// Sign of σ under the given action; `Plain` always yields `+1`.
pub fn action_sign_for(sigma: &Permutation, degrees: &[i64], symmetry: Symmetry) -> Result<Scalar> {
    action_sign(sigma, degrees, symmetry)
}

/// Shuffles `Sh(k, n)` in lexicographic order of image sequences.
pub fn enumerate_shuffles(k: usize, n: usize) -> Result<Vec<Permutation>> {
    if k > n {
        return argument(format!("shuffle block {k} exceeds order {n}"));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    fn rec(start: usize, k: usize, n: usize, chosen: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        if chosen.len() == k {
            let mut images = chosen.clone();
            images.extend((1..=n).filter(|i| !chosen.contains(i)));
            out.push(Permutation { images });
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - chosen.len() {
                break;
            }
            chosen.push(i);
            rec(i + 1, k, n, chosen, out);
            chosen.pop();
        }
    }
    rec(1, k, n, &mut chosen, &mut out);
    Ok(out)
}

/// Exponent `(n−1)a_1 + … + 1·a_{n−1}` of the décalage isomorphism `Λ^n L → L[1]^{⊙n}`.
pub(crate) fn decalage_exponent(degrees: &[i64]) -> i64 {
    let n = degrees.len() as i64;
    degrees.iter().enumerate().map(|(i, a)| (n - 1 - i as i64) * a).sum()
}

/// Sign of `↓ⁿ(a_1∧…∧a_n) = ± ↓a_1⊙…⊙↓a_n`; `degrees` are the degrees in `L`.
pub fn decalage_sign(degrees: &[i64]) -> Scalar {
    crate::scalar::minus_one_pow(decalage_exponent(degrees))
}

/// Sign of the inverse `(↓ⁿ)^{-1} = (−1)^{n(n−1)/2} ↑ⁿ` on the same word.
pub fn decalage_inverse_sign(degrees: &[i64]) -> Scalar {
    let n = degrees.len() as i64;
    // ↑ⁿ on ↓a_1⊗…⊗↓a_n carries the Koszul exponent Σ (n−i)(a_i − 1).
    let koszul: i64 = degrees.iter().enumerate().map(|(i, a)| (n - 1 - i as i64) * (a - 1)).sum();
    crate::scalar::minus_one_pow(n * (n - 1) / 2 + koszul)
}
