//! Sparse exact linear combinations keyed by basis indices or basis words.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::Scalar;

/// Finite formal sum `Σ c_k · k`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Scalar>,
}

/// Element of a graded module in its flat basis.
pub type Vector = LinComb<usize>;

/// Element of a symmetric (or exterior) power, keyed by canonical basis words.
pub type WordComb = LinComb<Vec<usize>>;

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(key: K, coeff: Scalar) -> Self {
        let mut out = Self::new();
        out.add_term(key, coeff);
        out
    }

    pub fn add_term(&mut self, key: K, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, factor: &Scalar, other: &Self) {
        if factor.is_zero() {
            return;
        }
        for (key, coeff) in &other.terms {
            self.add_term(key.clone(), factor * coeff);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (key, coeff) in &other.terms {
            self.add_term(key.clone(), coeff.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (key, coeff) in &other.terms {
            self.add_term(key.clone(), -coeff.clone());
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> Self {
        let mut out = Self::new();
        out.add_scaled(factor, self);
        out
    }

    pub fn negated(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect() }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for LinComb<K> {
    fn from_iter<T: IntoIterator<Item = (K, Scalar)>>(iter: T) -> Self {
        let mut out = Self::new();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

impl Vector {
    pub fn basis(index: usize) -> Self {
        Self::single(index, Scalar::from_integer(1.into()))
    }
}
