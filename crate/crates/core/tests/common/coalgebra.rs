//! Tensor-expansion oracles for the coalgebra diagrams.
//!
//! Elements of `S(W) ⊗ S(W)` are sums of pairs of canonical words. Nothing
//! here calls the set-partition or shuffle-insertion code of the library.

use std::collections::BTreeMap;

use linfty_core::graded::{epsilon_sign, enumerate_shuffles};
use linfty_core::{CoalgebraMap, LinComb, Scalar, WordComb};
use num_traits::{One, Zero};

pub type TensorComb = LinComb<(Vec<usize>, Vec<usize>)>;

/// Reduced coproduct `Δ⁺` on a combination of canonical words.
pub fn reduced_coproduct(x: &WordComb, degrees: &[i64]) -> TensorComb {
    let mut out = TensorComb::new();
    for (word, c) in x.iter() {
        let m = word.len();
        let word_degrees: Vec<i64> = word.iter().map(|&i| degrees[i]).collect();
        for j in 1..m {
            for sigma in enumerate_shuffles(j, m).unwrap() {
                let sign = epsilon_sign(&sigma, &word_degrees).unwrap();
                let permuted = sigma.permute(word);
                out.add_term((permuted[..j].to_vec(), permuted[j..].to_vec()), c * sign);
            }
        }
    }
    out
}

/// Applies word-level maps to each tensor factor with the Koszul sign of `right_degree`.
pub fn tensor_apply(
    x: &TensorComb,
    left: impl Fn(&[usize]) -> WordComb,
    right: impl Fn(&[usize]) -> WordComb,
    right_degree: i64,
    degrees: &[i64],
) -> TensorComb {
    let mut out = TensorComb::new();
    for ((a, b), c) in x.iter() {
        let a_degree: i64 = a.iter().map(|&i| degrees[i]).sum();
        let sign = if (right_degree * a_degree).rem_euclid(2) == 1 { -Scalar::one() } else { Scalar::one() };
        let la = left(a);
        let rb = right(b);
        for (wa, ca) in la.iter() {
            for (wb, cb) in rb.iter() {
                out.add_term((wa.clone(), wb.clone()), c * ca * cb * &sign);
            }
        }
    }
    out
}

pub fn identity_word(word: &[usize]) -> WordComb {
    WordComb::single(word.to_vec(), Scalar::one())
}

/// Full value of a family of `CoalgebraMap`s indexed by input length.
pub fn by_length(maps: &BTreeMap<usize, CoalgebraMap>) -> impl Fn(&[usize]) -> WordComb + '_ {
    move |word| maps.get(&word.len()).map(|m| m.eval(word)).unwrap_or_else(WordComb::new)
}

pub fn is_zero_tensor(x: &TensorComb) -> bool {
    x.iter().all(|(_, c)| c.is_zero())
}
