//! The general-target morphism condition in the `μ_n` / `f_n` presentation,
//! expanded over all permutations:
//!
//! `Σ_k Σ_{|I|=n} (−1)^{k(k−1)/2 + i_1(k−1) + … + i_{k−1}} μ'_k ∘ f_I
//!  = Σ_{k+l=n+1} (−1)^{k(l−1)} f_l ∘ (μ_k ⊗ 1 ⊗ … ⊗ 1) ∘ α_{k,n}`
//! with `f_I = (1/(I! k!)) (f_{i_1} ⊗ … ⊗ f_{i_k}) ∘ α_n`.

use linfty_core::{LInftyMorphism, Scalar, Vector};
use num_traits::One;

use super::transfer::{chi, sign};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (1..=n - (k - 1)).flat_map(|first| {
        compositions(n - first, k - 1).into_iter().map(move |mut rest| {
            rest.insert(0, first);
            rest
        })
    })
    .collect()
}

fn factorial(n: usize) -> Scalar {
    (1..=n).fold(Scalar::one(), |acc, i| acc * Scalar::from_integer((i as i64).into()))
}

/// `LHS − RHS` on one basis word of the source.
pub fn display_residual(morphism: &LInftyMorphism, word: &[usize]) -> Vector {
    let (source, target) = (morphism.source(), morphism.target());
    let n = word.len();
    let degrees: Vec<i64> = word.iter().map(|&i| source.module().degree(i)).collect();
    let perms = permutations(n);
    let mut residual = Vector::new();
    for k in 1..=n.min(target.max_arity()) {
        for parts in compositions(n, k) {
            let mut exponent = (k * (k - 1) / 2) as i64;
            for (m, &i) in parts[..k - 1].iter().enumerate() {
                exponent += (i * (k - 1 - m)) as i64;
            }
            let mut weight = factorial(k);
            for &i in &parts {
                weight *= factorial(i);
            }
            let coefficient = sign(exponent.rem_euclid(2) == 1) / weight;
            for perm in &perms {
                let permuted: Vec<usize> = perm.iter().map(|&p| word[p]).collect();
                let mut koszul = false;
                let mut passed = 0i64;
                let mut args = Vec::with_capacity(k);
                let mut start = 0;
                for &i in &parts {
                    let block = &permuted[start..start + i];
                    let map_degree = 1 - i as i64;
                    koszul ^= (map_degree * passed).rem_euclid(2) == 1;
                    args.push(morphism.component(i).eval(block));
                    passed += block.iter().map(|&x| source.module().degree(x)).sum::<i64>();
                    start += i;
                }
                let c = &coefficient * chi(perm, &degrees) * sign(koszul);
                residual.add_scaled(&c, &target.mu(k).eval_vectors(&args));
            }
        }
    }
    for k in 1..=n.min(source.max_arity()) {
        let l = n + 1 - k;
        for perm in perms.iter().filter(|p| p[..k].windows(2).all(|w| w[0] < w[1]) && p[k..].windows(2).all(|w| w[0] < w[1])) {
            let permuted: Vec<usize> = perm.iter().map(|&p| word[p]).collect();
            let inner = source.mu(k).eval(&permuted[..k]);
            if inner.is_zero() {
                continue;
            }
            let mut args = vec![inner];
            args.extend(permuted[k..].iter().map(|&x| Vector::basis(x)));
            let c = sign((k * (l - 1)) % 2 == 1) * chi(perm, &degrees);
            residual.add_scaled(&-c, &morphism.component(l).eval_vectors(&args));
        }
    }
    residual
}
